"""Fourier-truncated quantization on the circle.

Symbols are positively homogeneous on ``T*S^1 \\ 0``. In one dimension such a
symbol of degree ``k`` is ``a(theta, xi) = |xi|^k a_{sgn xi}(theta)`` with two
matrix-valued trigonometric polynomials ``a_+`` and ``a_-``. The quantization
acts on truncated Fourier modes ``{-N..N}`` by

    Op(a) e_m = |m|^k sum_j  hat(a_{sgn m})(j) e_{m+j},

which is the usual left (Kohn-Nirenberg) quantization restricted to the
window. At ``m = 0`` the two cone components are averaged and ``|0|^k`` is
read as 1 for ``k = 0`` and 0 otherwise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import HermiticityError, ShapeError
from .group_actions import AffineIsometryAction, mode_action
from .trigpoly import TrigPoly


@dataclass(frozen=True, eq=False)
class Truncation:
    """Symmetric Fourier window ``{-N..N}^n`` with a ``d``-dimensional fibre."""

    N: int
    n: int = 1
    d: int = 1

    def __post_init__(self):
        if self.N < 1 or self.n not in (1, 2) or self.d < 1:
            raise ValueError("need N >= 1, n in {1, 2} and d >= 1")

    @property
    def modes(self) -> np.ndarray:
        r = np.arange(-self.N, self.N + 1)
        if self.n == 1:
            return r[:, None]
        return np.stack(np.meshgrid(r, r, indexing="ij"), axis=-1).reshape(-1, 2)

    @property
    def n_modes(self) -> int:
        return (2 * self.N + 1) ** self.n

    @property
    def dim(self) -> int:
        return self.n_modes * self.d

    def index_of(self, modes) -> np.ndarray:
        m = np.asarray(modes, dtype=int).reshape(-1, self.n) + self.N
        if np.any(m < 0) or np.any(m > 2 * self.N):
            raise ShapeError("mode outside the truncation window")
        if self.n == 1:
            return m[:, 0]
        return m[:, 0] * (2 * self.N + 1) + m[:, 1]

    def mode_norms(self, metric=None) -> np.ndarray:
        g = np.ones(self.n) if metric is None else np.asarray(metric, float)
        return np.sqrt(np.sum(self.modes ** 2 / g, axis=1))


class OperatorMatrix:
    """Dense matrix over ``(mode, fibre index)`` pairs in mode-major order."""

    __array_priority__ = 20

    def __init__(self, data, trunc: Truncation, hermitized: bool = False):
        data = np.asarray(data, dtype=complex)
        if data.shape != (trunc.dim, trunc.dim):
            raise ShapeError(f"matrix shape {data.shape} does not match truncation {trunc.dim}")
        self.data = data
        self.trunc = trunc
        self.hermitized = hermitized

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def shape(self):
        return self.data.shape

    def _wrap(self, data):
        return OperatorMatrix(data, self.trunc)

    def __matmul__(self, other):
        return self._wrap(self.data @ np.asarray(other))

    def __rmatmul__(self, other):
        return self._wrap(np.asarray(other) @ self.data)

    def __add__(self, other):
        return self._wrap(self.data + np.asarray(other))

    def __sub__(self, other):
        return self._wrap(self.data - np.asarray(other))

    def __mul__(self, scalar):
        return self._wrap(self.data * scalar)

    __rmul__ = __mul__

    def adjoint(self) -> OperatorMatrix:
        return self._wrap(self.data.conj().T)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.data))))
        return self.hermiticity_defect() <= tol * scale

    def block(self, row_mode: int, col_mode: int) -> np.ndarray:
        T = self.trunc
        r, c = T.index_of([row_mode])[0], T.index_of([col_mode])[0]
        return self.data[r * T.d:(r + 1) * T.d, c * T.d:(c + 1) * T.d]

    def to_json(self) -> str:
        T = self.trunc
        flat = self.data.ravel()
        return json.dumps({"N": T.N, "n": T.n, "d": T.d, "dimension": T.dim,
                           "real": flat.real.tolist(), "imag": flat.imag.tolist()})

    @classmethod
    def from_json(cls, text: str) -> OperatorMatrix:
        obj = json.loads(text)
        T = Truncation(obj["N"], obj["n"], obj["d"])
        flat = np.asarray(obj["real"]) + 1j * np.asarray(obj["imag"])
        return cls(flat.reshape(T.dim, T.dim), T)

    def __repr__(self):
        return f"OperatorMatrix(N={self.trunc.N}, n={self.trunc.n}, d={self.trunc.d})"


_SIGNS = {"+": (1,), "-": (-1,), "both": (1, -1), "+-": (1, -1), 1: (1,), -1: (-1,), 0: (1, -1)}


@dataclass(frozen=True, eq=False)
class HomogeneousSymbol:
    """Degree-``k`` homogeneous symbol on ``T*S^1 \\ 0`` stored by cone component."""

    degree: int
    plus: TrigPoly
    minus: TrigPoly

    def __post_init__(self):
        if self.plus.size != self.minus.size:
            raise ShapeError("cone components must have the same size")
        D = max(self.plus.degree, self.minus.degree)
        object.__setattr__(self, "plus", self.plus.padded(D))
        object.__setattr__(self, "minus", self.minus.padded(D))

    @classmethod
    def from_terms(cls, degree: int, terms, size: int = 1) -> HomogeneousSymbol:
        """Terms are ``(sign, frequency, coefficient[, (row, col)])``.

        ``sign`` is ``'+'``, ``'-'`` or ``'both'``.
        """
        by_sign = {1: [], -1: []}
        for term in terms:
            sign, rest = term[0], tuple(term[1:])
            if sign not in _SIGNS:
                raise ValueError(f"unknown cone component {sign!r}")
            for s in _SIGNS[sign]:
                by_sign[s].append(rest)
        return cls(degree, TrigPoly.from_terms(by_sign[1], size) if by_sign[1]
                   else TrigPoly.zeros(size),
                   TrigPoly.from_terms(by_sign[-1], size) if by_sign[-1]
                   else TrigPoly.zeros(size))

    @classmethod
    def from_trigpoly(cls, degree: int, p: TrigPoly, minus: TrigPoly | None = None):
        return cls(degree, p, p if minus is None else minus)

    @property
    def size(self) -> int:
        return self.plus.size

    @property
    def x_degree(self) -> int:
        return self.plus.degree

    def component(self, sign: int) -> TrigPoly:
        return self.plus if sign > 0 else self.minus

    def __call__(self, theta, xi) -> np.ndarray:
        """Evaluate ``a(theta, xi)``; shape ``broadcast(theta, xi).shape + (d, d)``."""
        theta, xi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(xi, float))
        if np.any(xi == 0):
            raise ValueError("homogeneous symbols are not defined at xi = 0")
        vals = np.where((xi > 0)[..., None, None], self.plus(theta), self.minus(theta))
        return vals * (np.abs(xi) ** self.degree)[..., None, None]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.plus.is_hermitian(tol) and self.minus.is_hermitian(tol)

    def _map(self, fn, degree=None) -> HomogeneousSymbol:
        return HomogeneousSymbol(self.degree if degree is None else degree,
                                 fn(self.plus), fn(self.minus))

    def __add__(self, other: HomogeneousSymbol) -> HomogeneousSymbol:
        if other.degree != self.degree:
            raise ShapeError("can only add symbols of equal degree")
        return HomogeneousSymbol(self.degree, self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other):
        if isinstance(other, HomogeneousSymbol):
            return HomogeneousSymbol(self.degree + other.degree, self.plus.matmul(other.plus),
                                     self.minus.matmul(other.minus))
        return self._map(lambda p: p * other)

    __rmul__ = __mul__

    def adjoint(self) -> HomogeneousSymbol:
        return self._map(TrigPoly.adjoint)

    def translated(self, shift_plus: float, shift_minus: float) -> HomogeneousSymbol:
        """``(theta, xi) -> a(theta + shift_{sgn xi}, xi)``."""
        return HomogeneousSymbol(self.degree, self.plus.pullback(1, shift_plus),
                                 self.minus.pullback(1, shift_minus))

    def max_abs_diff(self, other: HomogeneousSymbol) -> float:
        return max(self.plus.max_abs_diff(other.plus), self.minus.max_abs_diff(other.minus))


def pullback_symbol(a: HomogeneousSymbol, action: AffineIsometryAction, g: int,
                    rep=None) -> HomogeneousSymbol:
    """``a o lift(g)``, i.e. ``(x, xi) -> a(A_g x + b_g, A_g xi)`` on the circle.

    With a representation ``rep`` the fibre is conjugated as well:
    ``rep[g]^{-1} a(lift(g) nu) rep[g]``.
    """
    if action.dim != 1:
        raise ShapeError("symbols are implemented on the circle only")
    g = action.group._check(g)
    sigma = int(action.matrices[g][0, 0])
    b = float(action.offsets[g][0])
    plus = a.component(sigma).pullback(sigma, b)
    minus = a.component(-sigma).pullback(sigma, b)
    out = HomogeneousSymbol(a.degree, plus, minus)
    if rep is not None:
        R = np.asarray(rep, complex)[g]
        Rc = TrigPoly.constant(R.conj().T)
        Rm = TrigPoly.constant(R)
        out = out._map(lambda p: Rc.matmul(p).matmul(Rm))
    return out


@dataclass(frozen=True, eq=False)
class CompleteSymbolOrder1:
    """First-order complete symbol ``p1 + p0`` with real scalar principal part."""

    p1: HomogeneousSymbol
    p0: HomogeneousSymbol

    def __post_init__(self):
        if self.p1.degree != 1 or self.p0.degree != 0:
            raise ShapeError("need a degree-1 principal part and a degree-0 remainder")
        if self.p1.size != 1 or not (self.p1.plus.is_real_scalar() and
                                     self.p1.minus.is_real_scalar()):
            raise ShapeError("principal symbol must be real and scalar")

    @classmethod
    def metric_norm(cls, potential: HomogeneousSymbol | TrigPoly | None = None,
                    metric: float = 1.0, size: int | None = None):
        """``p1 = |xi|_g`` on the circle with optional degree-0 part."""
        speed = TrigPoly.constant(1.0 / np.sqrt(metric))
        p1 = HomogeneousSymbol(1, speed, speed)
        if potential is None:
            p0 = HomogeneousSymbol(0, TrigPoly.zeros(size or 1), TrigPoly.zeros(size or 1))
        elif isinstance(potential, TrigPoly):
            p0 = HomogeneousSymbol(0, potential, potential)
        else:
            p0 = potential
        return cls(p1, p0)

    @property
    def size(self) -> int:
        return self.p0.size

    def is_metric_norm(self) -> bool:
        c = self.p1.plus
        return (c.trimmed().degree == 0 and self.p1.minus.max_abs_diff(c) == 0.0)


def op_quantize(a: HomogeneousSymbol, T: Truncation) -> OperatorMatrix:
    """Quantize a homogeneous symbol on the truncated circle window."""
    if T.n != 1:
        raise ShapeError("op_quantize is implemented on the circle (n = 1)")
    if T.d != a.size:
        raise ShapeError(f"symbol size {a.size} does not match truncation fibre {T.d}")
    data = kernels.assemble_quantized(a.plus.coeffs, a.minus.coeffs, T.N, a.degree)
    return OperatorMatrix(data, T)


def multiplication_operator(f: TrigPoly, T: Truncation) -> OperatorMatrix:
    """Truncated multiplication by ``f(theta)``; Toeplitz in the modes."""
    return op_quantize(HomogeneousSymbol(0, f, f), T)


def symbol_from_matrix(B, m: int, T: Truncation | None = None) -> TrigPoly:
    """Column symbol ``b(theta; m) = sum_{m'} B[m', m] exp(i (m' - m) theta)``."""
    T = T or B.trunc
    data = np.asarray(B)
    if abs(m) > T.N:
        raise ShapeError("mode outside the truncation window")
    d, N = T.d, T.N
    c = T.index_of([m])[0]
    col = data[:, c * d:(c + 1) * d].reshape(2 * N + 1, d, d)
    D = N + abs(m)
    coeffs = np.zeros((2 * D + 1, d, d), complex)
    # row mode m' sits at frequency m' - m
    start = (-N - m) + D
    coeffs[start:start + 2 * N + 1] = col
    return TrigPoly(coeffs)


def symbol_on_grid(B, modes, theta, T: Truncation | None = None) -> np.ndarray:
    """``b(theta_i; m)`` for many modes at once; shape ``(len(modes), len(theta), d, d)``."""
    T = T or B.trunc
    data = np.asarray(B)
    d, N = T.d, T.N
    modes = np.asarray(modes, dtype=int)
    theta = np.asarray(theta, dtype=float)
    cols = T.index_of(modes)
    blocks = data.reshape(2 * N + 1, d, 2 * N + 1, d)[:, :, cols, :]
    E = np.exp(1j * np.multiply.outer(theta, np.arange(-N, N + 1)))
    vals = np.einsum("tr,racb->ctab", E, blocks)
    return vals * np.exp(-1j * np.multiply.outer(modes, theta))[:, :, None, None]


def invariant_projection(action: AffineIsometryAction, T: Truncation, rep=None) -> OperatorMatrix:
    """Orthogonal projection onto ``K``-invariant vectors, ``|K|^{-1} sum_k U_k``."""
    if action.dim != T.n:
        raise ShapeError("action and truncation dimensions differ")
    if rep is None and T.d > 1:
        rep = np.broadcast_to(np.eye(T.d), (action.order, T.d, T.d))
    total = np.zeros((T.dim, T.dim), complex)
    for k in action.group.elements:
        total += mode_action(action, k, T.N, rep)
    return OperatorMatrix(total / action.order, T)


def sqrt_laplacian(T: Truncation, metric=None) -> OperatorMatrix:
    """``sqrt(Delta)`` for a constant diagonal metric: ``diag(|m|_g) (x) I_d``."""
    diag = np.repeat(T.mode_norms(metric), T.d)
    return OperatorMatrix(np.diag(diag.astype(complex)), T)


def build_first_order(P: CompleteSymbolOrder1, T: Truncation) -> OperatorMatrix:
    """Hermitian part of ``Op(p1) (x) I + Op(p0)``."""
    if not P.p0.is_hermitian():
        raise HermiticityError("degree-0 part of the complete symbol must be Hermitian")
    d = P.size
    p1 = P.p1._map(lambda p: p.kron_identity(d))
    B = op_quantize(p1, T).data + op_quantize(P.p0, T).data
    herm = 0.5 * (B + B.conj().T)
    return OperatorMatrix(herm, T, hermitized=bool(np.any(herm != B)))


def subprincipal(P: CompleteSymbolOrder1) -> HomogeneousSymbol:
    """``p0 - (1/2i) d^2 p1 / dx dxi``.

    On the cone component of sign ``s`` with ``p1 = c_s(theta)|xi|`` the mixed
    derivative is ``s c_s'(theta)``.
    """
    d = P.size
    parts = []
    for s in (1, -1):
        mixed = P.p1.component(s).derivative() * s
        parts.append(P.p0.component(s) - mixed.kron_identity(d) * (1.0 / 2j))
    return HomogeneousSymbol(0, parts[0], parts[1])


def sandwich(Pi, A) -> OperatorMatrix:
    """``Pi A Pi``."""
    Pd, Ad = np.asarray(Pi), np.asarray(A)
    if Pd.shape != Ad.shape:
        raise ShapeError("projection and operator shapes differ")
    T = getattr(A, "trunc", None) or getattr(Pi, "trunc")
    return OperatorMatrix(Pd @ Ad @ Pd, T)


def commutator_norm(A, B) -> float:
    a, b = np.asarray(A), np.asarray(B)
    return float(np.max(np.abs(a @ b - b @ a)))
