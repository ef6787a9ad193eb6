"""Heisenberg evolution of observables and transport of matrix symbols.

Quantum side: ``A(t) = exp(itP) A exp(-itP)`` through a Hermitian
eigendecomposition of ``P`` (no time stepping).

Classical side: for ``P`` with complete symbol ``c_s(theta)|xi| + p0`` the
principal symbol of ``A(t)`` at ``nu`` is ``W a(f_t nu) W^{-1}``, where
``f_t`` is the characteristic flow and the frame solves

    dW/ds = i W sub(f_s nu),    W(0) = I.

The frame multiplies from the right: this is the ordering realized by the
quantum evolution when ``sub`` does not commute with itself along the
trajectory. Both orderings share the derivative at ``t = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import HermiticityError, InvarianceError, ShapeError
from .group_actions import AffineIsometryAction
from .quantization import (CompleteSymbolOrder1, HomogeneousSymbol, OperatorMatrix,
                           invariant_projection, subprincipal)
from .symplectic_flows import CotangentPoint


class SpectralDecomposition:
    """``P = Q diag(lam) Q^*`` for a Hermitian operator matrix."""

    def __init__(self, P, check: bool = True):
        data = np.asarray(P)
        trunc = getattr(P, "trunc", None)
        scale = max(1.0, float(np.max(np.abs(data))))
        if np.max(np.abs(data - data.conj().T)) > 1e-12 * scale:
            raise HermiticityError("evolution generator must be Hermitian")
        lam, Q = np.linalg.eigh(data)
        if check:
            recon = (Q * lam) @ Q.conj().T
            if np.max(np.abs(recon - data)) > 1e-10 * scale:
                raise HermiticityError("eigendecomposition failed reconstruction check")
            if np.max(np.abs(Q.conj().T @ Q - np.eye(len(lam)))) > 1e-10:
                raise HermiticityError("eigenvectors are not unitary")
        self.eigenvalues = lam
        self.eigenvectors = Q
        self.trunc = trunc

    def unitary(self, t: float) -> np.ndarray:
        """``exp(itP)``."""
        Q = self.eigenvectors
        return (Q * np.exp(1j * t * self.eigenvalues)) @ Q.conj().T

    def evolve(self, A, t: float) -> np.ndarray:
        if t == 0:
            return np.array(np.asarray(A), dtype=complex)
        U = self.unitary(t)
        return U @ np.asarray(A) @ U.conj().T


def heisenberg(P, A, t: float):
    """``exp(itP) A exp(-itP)``; ``P`` may be a prepared :class:`SpectralDecomposition`."""
    eig = P if isinstance(P, SpectralDecomposition) else SpectralDecomposition(P)
    a = np.asarray(A)
    if a.shape != (len(eig.eigenvalues),) * 2:
        raise ShapeError("operator shapes differ")
    out = eig.evolve(a, t)
    trunc = getattr(A, "trunc", None) or eig.trunc
    return OperatorMatrix(out, trunc) if trunc is not None else out


@dataclass(frozen=True, eq=False)
class TransportFrame:
    """Frame ``W`` along the characteristic through ``point`` after time ``t``."""

    W: np.ndarray
    point: CotangentPoint
    end: CotangentPoint
    t: float
    dt: float

    def unitarity_defect(self) -> float:
        W = self.W
        return float(np.max(np.abs(W.conj().T @ W - np.eye(W.shape[0]))))


def _speed_arrays(P: CompleteSymbolOrder1):
    return P.p1.plus.coeffs[:, 0, 0], P.p1.minus.coeffs[:, 0, 0]


def _transport(P: CompleteSymbolOrder1, theta, sign: int, t: float, dt: float):
    theta = np.atleast_1d(np.asarray(theta, float))
    if t == 0:
        d = P.size
        return theta.copy(), np.zeros_like(theta), np.broadcast_to(
            np.eye(d, dtype=complex), (theta.size, d, d)).copy()
    sub = subprincipal(P)
    sp, sm = _speed_arrays(P)
    nsteps = max(1, int(np.ceil(abs(t) / dt - 1e-9)))
    return kernels.transport_rk4(sp, sm, sub.plus.coeffs, sub.minus.coeffs, theta,
                                 int(sign), float(t), nsteps)


def transport_frame(P: CompleteSymbolOrder1, point: CotangentPoint, t: float,
                    dt: float = 1e-3) -> TransportFrame:
    """Integrate the frame along the characteristic flow of ``P`` (RK4)."""
    if point.dim != 1:
        raise ShapeError("transport is implemented on the circle")
    xi = float(point.xi[0])
    if xi == 0:
        raise ValueError("transport needs a point off the zero section")
    if not dt > 0:
        raise ValueError("dt must be positive")
    s = 1 if xi > 0 else -1
    x, L, W = _transport(P, [point.x[0]], s, t, dt)
    end = CotangentPoint(x, [xi * np.exp(L[0])])
    return TransportFrame(W[0], point, end, t, dt)


def ad_transport_symbol(a: HomogeneousSymbol, P: CompleteSymbolOrder1, point: CotangentPoint,
                        t: float, dt: float = 1e-3) -> np.ndarray:
    """``W a(f_t nu) W^{-1}`` for a matrix symbol ``a``."""
    fr = transport_frame(P, point, t, dt)
    val = a(fr.end.x[0], fr.end.xi[0])
    return fr.W @ val @ np.linalg.inv(fr.W)


def ad_transport_on_grid(a: HomogeneousSymbol, P: CompleteSymbolOrder1, theta, xi,
                         t: float, dt: float = 1e-3) -> np.ndarray:
    """Vectorized :func:`ad_transport_symbol` over ``theta`` for a fixed ``xi != 0``."""
    s = 1 if xi > 0 else -1
    x, L, W = _transport(P, theta, s, t, dt)
    vals = a(x, xi * np.exp(L))
    return W @ vals @ np.linalg.inv(W)


def transport_generator(a: HomogeneousSymbol, P: CompleteSymbolOrder1,
                        point: CotangentPoint) -> np.ndarray:
    """``H_h a + i [sub, a]`` at ``point``, computed from symbol coefficients."""
    theta, xi = float(point.x[0]), float(point.xi[0])
    s = 1 if xi > 0 else -1
    k = a.degree
    c = P.p1.component(s)
    a_s = a.component(s)
    # H_h a = d_xi p1 d_x a - d_x p1 d_xi a with p1 = c(theta)|xi|
    flow_part = s * abs(xi) ** k * (c(theta)[0, 0] * a_s.derivative()(theta)
                                    - k * c.derivative()(theta)[0, 0] * a_s(theta))
    sub = subprincipal(P)(theta, xi)
    val = a(theta, xi)
    return flow_part + 1j * (sub @ val - val @ sub)


def orbifold_heisenberg(action: AffineIsometryAction, P_tilde, A_tilde, t: float,
                        rep=None, tol: float = 1e-10):
    """Both sides of ``exp(itP) A exp(-itP) = Pi exp(itP~) A~ exp(-itP~) Pi``.

    The left side is computed inside ``range(Pi)``: ``P~`` and ``Pi A~ Pi``
    are compressed to an orthonormal basis of invariant vectors, evolved
    there and embedded back. The right side evolves on the whole window.
    """
    T = P_tilde.trunc
    Pi = np.asarray(invariant_projection(action, T, rep))
    Pt, At = np.asarray(P_tilde), np.asarray(A_tilde)
    if np.max(np.abs(Pt @ Pi - Pi @ Pt)) > tol:
        raise InvarianceError("P~ does not commute with the invariant projection")
    lam, vec = np.linalg.eigh(Pi)
    Q = vec[:, np.abs(lam - 1.0) <= 1e-8]
    P_small = Q.conj().T @ Pt @ Q
    P_small = 0.5 * (P_small + P_small.conj().T)
    A_small = Q.conj().T @ (Pi @ At @ Pi) @ Q
    lhs = Q @ SpectralDecomposition(P_small).evolve(A_small, t) @ Q.conj().T
    rhs = Pi @ SpectralDecomposition(Pt).evolve(At, t) @ Pi
    return OperatorMatrix(lhs, T), OperatorMatrix(rhs, T)
