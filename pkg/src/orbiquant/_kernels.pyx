# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, cos, sin

cnp.import_array()


def assemble_quantized(plus, minus, Py_ssize_t N, int degree):
    cdef const double complex[:, :, ::1] cp = np.ascontiguousarray(plus, dtype=np.complex128)
    cdef const double complex[:, :, ::1] cm = np.ascontiguousarray(minus, dtype=np.complex128)
    cdef Py_ssize_t D = (cp.shape[0] - 1) // 2
    cdef Py_ssize_t d = cp.shape[1]
    cdef Py_ssize_t M = 2 * N + 1
    out_arr = np.zeros((M * d, M * d), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t col, j, row, a, b, m
    cdef double w
    cdef double complex c
    for col in range(M):
        m = col - N
        if m == 0:
            w = 1.0 if degree == 0 else 0.0
        else:
            w = pow(fabs(<double>m), degree)
        for j in range(-D, D + 1):
            row = col + j
            if row < 0 or row >= M:
                continue
            for a in range(d):
                for b in range(d):
                    if m > 0:
                        c = cp[j + D, a, b]
                    elif m < 0:
                        c = cm[j + D, a, b]
                    else:
                        c = 0.5 * (cp[j + D, a, b] + cm[j + D, a, b])
                    out[row * d + a, col * d + b] = c * w
    return out_arr


cdef inline void _powers(double x, Py_ssize_t D, double complex* z) noexcept nogil:
    # z[j + D] = exp(i j x) for |j| <= D
    cdef Py_ssize_t j
    z[D] = 1.0
    for j in range(1, D + 1):
        z[D + j] = cos(j * x) + 1j * sin(j * x)
        z[D - j] = z[D + j].conjugate()


cdef void _rhs(double x, double complex* W, Py_ssize_t d,
               const double complex[::1] sp, const double complex[::1] dsp,
               const double complex[:, :, ::1] sb, double s,
               double complex* zc, double complex* zs, double complex* S,
               double* vx, double* vL, double complex* vW) noexcept nogil:
    cdef Py_ssize_t Dc = (sp.shape[0] - 1) // 2
    cdef Py_ssize_t Ds = (sb.shape[0] - 1) // 2
    cdef Py_ssize_t j, a, b, k
    cdef double complex acc, accd
    _powers(x, Dc, zc)
    _powers(x, Ds, zs)
    acc = 0.0
    accd = 0.0
    for j in range(2 * Dc + 1):
        acc = acc + sp[j] * zc[j]
        accd = accd + dsp[j] * zc[j]
    vx[0] = s * acc.real
    vL[0] = -s * accd.real
    for a in range(d):
        for b in range(d):
            acc = 0.0
            for j in range(2 * Ds + 1):
                acc = acc + sb[j, a, b] * zs[j]
            S[a * d + b] = acc
    for a in range(d):
        for b in range(d):
            acc = 0.0
            for k in range(d):
                acc = acc + W[a * d + k] * S[k * d + b]
            vW[a * d + b] = 1j * acc


def transport_rk4(speed_plus, speed_minus, sub_plus, sub_minus, theta0, int sign,
                  double t, Py_ssize_t nsteps):
    src = speed_plus if sign > 0 else speed_minus
    cdef const double complex[::1] sp = np.ascontiguousarray(src, dtype=np.complex128)
    Dc_py = (sp.shape[0] - 1) // 2
    cdef const double complex[::1] dsp = np.ascontiguousarray(
        np.asarray(src, dtype=np.complex128) * (1j * np.arange(-Dc_py, Dc_py + 1)))
    cdef const double complex[:, :, ::1] sb = np.ascontiguousarray(
        sub_plus if sign > 0 else sub_minus, dtype=np.complex128)
    cdef const double[::1] x0 = np.ascontiguousarray(theta0, dtype=np.float64)
    cdef Py_ssize_t npts = x0.shape[0]
    cdef Py_ssize_t d = sb.shape[1]
    cdef Py_ssize_t dd = d * d
    x_arr = np.empty(npts)
    L_arr = np.zeros(npts)
    W_arr = np.zeros((npts, d, d), dtype=np.complex128)
    cdef double[::1] xo = x_arr
    cdef double[::1] Lo = L_arr
    cdef double complex[:, :, ::1] Wo = W_arr
    cdef double h = t / nsteps
    cdef double s = <double>sign
    zc_arr = np.empty(sp.shape[0], dtype=np.complex128)
    zs_arr = np.empty(sb.shape[0], dtype=np.complex128)
    work = np.empty((7, dd), dtype=np.complex128)
    cdef double complex[::1] zc = zc_arr
    cdef double complex[::1] zs = zs_arr
    cdef double complex[:, ::1] wk = work
    cdef double complex* W = &wk[0, 0]
    cdef double complex* S = &wk[1, 0]
    cdef double complex* tmp = &wk[2, 0]
    cdef double complex* k1 = &wk[3, 0]
    cdef double complex* k2 = &wk[4, 0]
    cdef double complex* k3 = &wk[5, 0]
    cdef double complex* k4 = &wk[6, 0]
    cdef double x, L, x1, x2, x3, x4, L1, L2, L3, L4
    cdef Py_ssize_t p, step, q, a
    with nogil:
        for p in range(npts):
            x = x0[p]
            L = 0.0
            for q in range(dd):
                W[q] = 0.0
            for a in range(d):
                W[a * d + a] = 1.0
            for step in range(nsteps):
                _rhs(x, W, d, sp, dsp, sb, s, &zc[0], &zs[0], S, &x1, &L1, k1)
                for q in range(dd):
                    tmp[q] = W[q] + 0.5 * h * k1[q]
                _rhs(x + 0.5 * h * x1, tmp, d, sp, dsp, sb, s, &zc[0], &zs[0], S, &x2, &L2, k2)
                for q in range(dd):
                    tmp[q] = W[q] + 0.5 * h * k2[q]
                _rhs(x + 0.5 * h * x2, tmp, d, sp, dsp, sb, s, &zc[0], &zs[0], S, &x3, &L3, k3)
                for q in range(dd):
                    tmp[q] = W[q] + h * k3[q]
                _rhs(x + h * x3, tmp, d, sp, dsp, sb, s, &zc[0], &zs[0], S, &x4, &L4, k4)
                x = x + h / 6.0 * (x1 + 2 * x2 + 2 * x3 + x4)
                L = L + h / 6.0 * (L1 + 2 * L2 + 2 * L3 + L4)
                for q in range(dd):
                    W[q] = W[q] + h / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q])
            xo[p] = x
            Lo[p] = L
            for a in range(d):
                for q in range(d):
                    Wo[p, a, q] = W[a * d + q]
    return x_arr, L_arr, W_arr
