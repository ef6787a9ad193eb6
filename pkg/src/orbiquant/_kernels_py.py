"""NumPy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` extension; used
when the extension is unavailable or ``ORBIQUANT_PURE_PYTHON`` is set.
"""
import numpy as np


def assemble_quantized(plus, minus, N, degree):
    """Matrix of the circle quantization of a homogeneous symbol.

    Block ``(m', m)`` equals ``c_{sgn m}[m' - m] * |m|**degree``; column 0
    uses the average of both cone components with weight ``1`` for degree 0
    and ``0`` otherwise.
    """
    plus = np.asarray(plus, dtype=complex)
    minus = np.asarray(minus, dtype=complex)
    D = (plus.shape[0] - 1) // 2
    d = plus.shape[1]
    M = 2 * N + 1
    modes = np.arange(-N, N + 1)
    weights = np.abs(modes).astype(float) ** degree if degree >= 0 else np.zeros(M)
    if degree < 0:
        nz = modes != 0
        weights[nz] = np.abs(modes[nz]).astype(float) ** degree
    weights[N] = 1.0 if degree == 0 else 0.0
    out = np.zeros((M, d, M, d), complex)
    cols = np.arange(M)
    avg = 0.5 * (plus + minus)
    for j in range(-D, D + 1):
        rows = cols + j
        ok = (rows >= 0) & (rows < M)
        c, r = cols[ok], rows[ok]
        sgn = np.sign(modes[c])
        blocks = np.where(sgn[:, None, None] > 0, plus[j + D],
                          np.where(sgn[:, None, None] < 0, minus[j + D], avg[j + D]))
        out[r, :, c, :] = blocks * weights[c][:, None, None]
    return out.reshape(M * d, M * d)


def _eval(coeffs, x):
    D = (coeffs.shape[0] - 1) // 2
    ph = np.exp(1j * np.multiply.outer(x, np.arange(-D, D + 1)))
    return np.tensordot(ph, coeffs, axes=(-1, 0))


def transport_rk4(speed_plus, speed_minus, sub_plus, sub_minus, theta0, sign, t, nsteps):
    """RK4 for the characteristic flow of ``c_s(x)|xi|`` with a right-multiplied frame.

    Integrates ``x' = s c_s(x)``, ``(log|xi|)' = -s c_s'(x)`` and
    ``W' = i W sub_s(x)`` from ``W(0) = I`` for every start in ``theta0``.
    Returns ``(x, log|xi| - log|xi_0|, W)``.
    """
    sp = np.asarray(speed_plus if sign > 0 else speed_minus, dtype=complex)
    sb = np.asarray(sub_plus if sign > 0 else sub_minus, dtype=complex)
    Dc = (sp.shape[0] - 1) // 2
    dsp = sp * (1j * np.arange(-Dc, Dc + 1))
    x = np.array(theta0, dtype=float)
    npts = x.shape[0]
    d = sb.shape[1]
    L = np.zeros(npts)
    W = np.broadcast_to(np.eye(d, dtype=complex), (npts, d, d)).copy()
    h = t / nsteps
    s = float(sign)

    def f(x, W):
        vx = s * _eval(sp, x).real
        vL = -s * _eval(dsp, x).real
        vW = 1j * np.matmul(W, _eval(sb, x))
        return vx, vL, vW

    for _ in range(nsteps):
        k1 = f(x, W)
        k2 = f(x + 0.5 * h * k1[0], W + 0.5 * h * k1[2])
        k3 = f(x + 0.5 * h * k2[0], W + 0.5 * h * k2[2])
        k4 = f(x + h * k3[0], W + h * k3[2])
        x = x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        L = L + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        W = W + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return x, L, W
