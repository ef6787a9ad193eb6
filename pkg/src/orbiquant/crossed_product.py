"""Finite crossed products ``C(S^1) x| K`` and their symbol algebra.

An element is a family ``f(., k)`` of matrix-valued trigonometric polynomials
indexed by ``k in K``. With normalized Haar weights ``1/|K|``

    (f * g)(x, k) = |K|^{-1} sum_h f(x, h) g(h^{-1} x, h^{-1} k)
    f^*(x, k)     = f(k^{-1} x, k^{-1})^*
    R(f)          = |K|^{-1} sum_k M_{f(., k)} U_k

so the unit is ``|K| delta_e``. Every operation is a re-indexing or phasing
of Fourier coefficients, hence exact up to rounding.

The same formulas applied fibrewise on ``T*S^1 \\ 0`` with the cotangent-lifted
action define the crossed product of homogeneous symbols.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionError, GroupError, ShapeError
from .group_actions import TWO_PI, AffineIsometryAction, act, mode_action, torus_distance
from .quantization import (CompleteSymbolOrder1, HomogeneousSymbol, OperatorMatrix,
                           Truncation, multiplication_operator, op_quantize, pullback_symbol)
from .symplectic_flows import HamiltonianSpec
from .trigpoly import TrigPoly


def _circle_action(action: AffineIsometryAction) -> AffineIsometryAction:
    if action.dim != 1:
        raise ShapeError("crossed products are implemented over the circle")
    return action


def _same_action(a, b):
    if a.action is not b.action and not (
            np.array_equal(a.action.group.table, b.action.group.table)
            and np.allclose(a.action.offsets, b.action.offsets)
            and np.array_equal(a.action.matrices, b.action.matrices)):
        raise GroupError("operands live over different group actions")


def _inverse_pullback(p: TrigPoly, action: AffineIsometryAction, h: int) -> TrigPoly:
    """``x -> p(h^{-1} x)``."""
    hi = action.group.inv(h)
    return p.pullback(int(action.matrices[hi][0, 0]), float(action.offsets[hi][0]))


def _fixed_order_sum(terms):
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


@dataclass(frozen=True, eq=False)
class CrossedFunction:
    """Element of ``C(S^1) x| K``; ``components[k]`` is ``f(., k)``."""

    action: AffineIsometryAction
    components: tuple

    def __post_init__(self):
        _circle_action(self.action)
        comps = tuple(self.components)
        if len(comps) != self.action.order:
            raise ShapeError(f"need {self.action.order} components, got {len(comps)}")
        sizes = {c.size for c in comps}
        if len(sizes) != 1:
            raise ShapeError("components must share a fibre size")
        D = max(c.degree for c in comps)
        object.__setattr__(self, "components", tuple(c.padded(D) for c in comps))

    @classmethod
    def zeros(cls, action, size: int = 1, degree: int = 0) -> CrossedFunction:
        return cls(action, [TrigPoly.zeros(size, degree)] * action.order)

    @classmethod
    def unit(cls, action, size: int = 1) -> CrossedFunction:
        """``|K| delta_e`` (normalized Haar)."""
        comps = [TrigPoly.zeros(size)] * action.order
        comps[0] = TrigPoly.constant(float(action.order), size)
        return cls(action, comps)

    @classmethod
    def from_terms(cls, action, terms, size: int = 1) -> CrossedFunction:
        """Terms are ``(k, frequency, coefficient[, (row, col)])``."""
        per = [[] for _ in range(action.order)]
        for term in terms:
            k = action.group._check(term[0])
            per[k].append(tuple(term[1:]))
        return cls(action, [TrigPoly.from_terms(t, size) if t else TrigPoly.zeros(size)
                            for t in per])

    @classmethod
    def random(cls, action, rng: np.random.Generator, degree: int, size: int = 1):
        return cls(action, [TrigPoly.random(rng, degree, size) for _ in action.group.elements])

    @property
    def size(self) -> int:
        return self.components[0].size

    @property
    def degree(self) -> int:
        return self.components[0].degree

    def __call__(self, x, k: int) -> np.ndarray:
        return self.components[self.action.group._check(k)](x)

    def __add__(self, other: CrossedFunction) -> CrossedFunction:
        _same_action(self, other)
        return CrossedFunction(self.action, [a + b for a, b in
                                             zip(self.components, other.components)])

    def __sub__(self, other: CrossedFunction) -> CrossedFunction:
        _same_action(self, other)
        return CrossedFunction(self.action, [a - b for a, b in
                                             zip(self.components, other.components)])

    def __mul__(self, scalar) -> CrossedFunction:
        return CrossedFunction(self.action, [c * scalar for c in self.components])

    __rmul__ = __mul__

    def max_abs_diff(self, other: CrossedFunction) -> float:
        return max(a.max_abs_diff(b) for a, b in zip(self.components, other.components))


def convolve(f: CrossedFunction, g: CrossedFunction) -> CrossedFunction:
    """Crossed-product multiplication, summed over ``h`` in index order."""
    _same_action(f, g)
    action, G = f.action, f.action.group
    out = []
    for k in G.elements:
        terms = [f.components[h].matmul(
                 _inverse_pullback(g.components[G.mul(G.inv(h), k)], action, h))
                 for h in G.elements]
        out.append(_fixed_order_sum(terms) * (1.0 / G.order))
    return CrossedFunction(action, out)


def involution(f: CrossedFunction) -> CrossedFunction:
    action, G = f.action, f.action.group
    return CrossedFunction(action, [
        _inverse_pullback(f.components[G.inv(k)], action, k).adjoint() for k in G.elements])


@dataclass(frozen=True)
class GroupoidElement:
    """Arrow ``(x, k)`` of the transformation groupoid, from ``k^{-1} x`` to ``x``."""

    action: AffineIsometryAction
    x: float
    k: int

    @property
    def source(self) -> float:
        return float(act(self.action, self.action.group.inv(self.k), self.x))

    @property
    def target(self) -> float:
        return float(np.mod(self.x, TWO_PI))

    def composable(self, other: GroupoidElement, tol: float = 1e-9) -> bool:
        return float(torus_distance([self.source], [other.target])) <= tol

    def __mul__(self, other: GroupoidElement) -> GroupoidElement:
        if not self.composable(other):
            raise ValueError("arrows are not composable: s(g1) != r(g2)")
        return GroupoidElement(self.action, self.x, self.action.group.mul(self.k, other.k))

    def inverse(self) -> GroupoidElement:
        return GroupoidElement(self.action, self.source, self.action.group.inv(self.k))


def source(gamma: GroupoidElement) -> float:
    return gamma.source


def target(gamma: GroupoidElement) -> float:
    return gamma.target


def _fibre_identity(action, T: Truncation, k: int) -> np.ndarray:
    U = mode_action(action, k, T.N)
    return U if T.d == 1 else np.kron(U, np.eye(T.d))


def represent(f: CrossedFunction, T: Truncation) -> OperatorMatrix:
    """``R(f) = |K|^{-1} sum_k M_{f(., k)} U_k`` on the truncated window."""
    if T.d != f.size:
        raise ShapeError("fibre size of the window does not match f")
    total = np.zeros((T.dim, T.dim), complex)
    for k in f.action.group.elements:
        total += multiplication_operator(f.components[k], T).data @ _fibre_identity(
            f.action, T, k)
    return OperatorMatrix(total / f.action.order, T)


def fiber_represent(f: CrossedFunction, x) -> np.ndarray:
    """``R_x(f)`` as a ``(|K| d, |K| d)`` block matrix; batched over an array ``x``.

    Block ``[k, k1]`` is ``|K|^{-1} f(k^{-1} x, k^{-1} k1)``.
    """
    action, G = f.action, f.action.group
    x = np.asarray(x, dtype=float)
    n, d = G.order, f.size
    out = np.zeros(x.shape + (n * d, n * d), complex)
    for k in G.elements:
        ki = G.inv(k)
        y = act(action, ki, x[..., None])[..., 0]
        for k1 in G.elements:
            out[..., k * d:(k + 1) * d, k1 * d:(k1 + 1) * d] = f.components[G.mul(ki, k1)](y)
    return out / n


@dataclass(frozen=True)
class NormEstimate:
    """Grid maximum of ``||R_x(f)||`` with refinement diagnostics.

    ``value`` is a lower bound for the reduced norm; the true supremum exceeds
    it by at most ``lipschitz * pi / Q``.
    """

    value: float
    refined: float
    delta: float
    lipschitz: float
    Q: int

    @property
    def upper_bound(self) -> float:
        return self.value + self.lipschitz * np.pi / self.Q


def lipschitz_constant(f: CrossedFunction) -> float:
    """Bound on the Lipschitz constant of ``x -> ||R_x(f)||`` (Schur test)."""
    total = 0.0
    for c in f.components:
        norms = np.linalg.norm(c.coeffs, ord=2, axis=(1, 2))
        total += float(np.sum(np.abs(c.frequencies) * norms))
    return total / f.action.order


def _grid_norm(f: CrossedFunction, Q: int) -> float:
    x = TWO_PI * np.arange(Q) / Q
    return float(np.max(np.linalg.norm(fiber_represent(f, x), ord=2, axis=(1, 2))))


def reduced_norm(f: CrossedFunction, Q: int = 64) -> NormEstimate:
    if Q < 64:
        raise ValueError("grid resolution must be at least 64")
    v, r = _grid_norm(f, Q), _grid_norm(f, 2 * Q)
    return NormEstimate(v, r, abs(r - v), lipschitz_constant(f), Q)


# symbols --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CrossedSymbol:
    """Family ``a(., ., k)`` of homogeneous symbols of a common degree."""

    action: AffineIsometryAction
    components: tuple

    def __post_init__(self):
        _circle_action(self.action)
        comps = tuple(self.components)
        if len(comps) != self.action.order:
            raise ShapeError(f"need {self.action.order} components, got {len(comps)}")
        if len({c.degree for c in comps}) != 1 or len({c.size for c in comps}) != 1:
            raise ShapeError("components must share degree and size")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_function(cls, f: CrossedFunction) -> CrossedSymbol:
        """Degree-0 pullback ``(nu, k) -> f(x(nu), k)``."""
        return cls(f.action, [HomogeneousSymbol(0, c, c) for c in f.components])

    @classmethod
    def from_terms(cls, action, degree: int, terms, size: int = 1) -> CrossedSymbol:
        """Terms are ``(k, sign, frequency, coefficient[, (row, col)])``."""
        per = [[] for _ in range(action.order)]
        for term in terms:
            per[action.group._check(term[0])].append(tuple(term[1:]))
        return cls(action, [HomogeneousSymbol.from_terms(degree, t, size) for t in per])

    @classmethod
    def random(cls, action, rng: np.random.Generator, x_degree: int, degree: int = 0,
               size: int = 1) -> CrossedSymbol:
        return cls(action, [HomogeneousSymbol(degree, TrigPoly.random(rng, x_degree, size),
                                              TrigPoly.random(rng, x_degree, size))
                            for _ in action.group.elements])

    @property
    def degree(self) -> int:
        return self.components[0].degree

    @property
    def size(self) -> int:
        return self.components[0].size

    @property
    def x_degree(self) -> int:
        return max(c.x_degree for c in self.components)

    def __call__(self, theta, xi, k: int) -> np.ndarray:
        return self.components[self.action.group._check(k)](theta, xi)

    def max_abs_diff(self, other: CrossedSymbol) -> float:
        return max(a.max_abs_diff(b) for a, b in zip(self.components, other.components))


def symbol_convolve(a: CrossedSymbol, b: CrossedSymbol) -> CrossedSymbol:
    """Fibrewise crossed product with the cotangent-lifted action."""
    _same_action(a, b)
    action, G = a.action, a.action.group
    out = []
    for k in G.elements:
        terms = [a.components[h] * pullback_symbol(b.components[G.mul(G.inv(h), k)],
                                                   action, G.inv(h))
                 for h in G.elements]
        out.append(_fixed_order_sum(terms) * (1.0 / G.order))
    return CrossedSymbol(action, out)


def symbol_involution(a: CrossedSymbol) -> CrossedSymbol:
    action, G = a.action, a.action.group
    return CrossedSymbol(action, [
        pullback_symbol(a.components[G.inv(k)], action, G.inv(k)).adjoint()
        for k in G.elements])


def crossed_quantize(a: CrossedSymbol, T: Truncation) -> OperatorMatrix:
    """``|K|^{-1} sum_k Op(a(., ., k)) U_k``."""
    if T.d != a.size:
        raise ShapeError("fibre size of the window does not match the symbol")
    total = np.zeros((T.dim, T.dim), complex)
    for k in a.action.group.elements:
        total += op_quantize(a.components[k], T).data @ _fibre_identity(a.action, T, k)
    return OperatorMatrix(total / a.action.order, T)


def _stencil(m: int, count: int, floor: int, N: int) -> list[int]:
    """``count`` consecutive modes of the sign of ``m`` with ``floor < |mode| <= N``."""
    s = 1 if m > 0 else -1
    mag = abs(m)
    if mag - count + 1 > floor:
        mags = range(mag - count + 1, mag + 1)
    else:
        mags = range(mag, mag + count)
    if mags[-1] > N:
        raise DecompositionError(f"no room for a {count}-mode stencil at m = {m}")
    return [s * q for q in mags]


def crossed_components_at(A, action: AffineIsometryAction, m: int, degree: int = 0,
                          x_degree: int | None = None, T: Truncation | None = None,
                          max_condition: float = 1e8) -> list[TrigPoly]:
    """Recover the cone-``sgn(m)`` parts of ``a(., ., k)`` for every ``k``.

    ``A`` is assumed to have the form ``|K|^{-1} sum_h Op(a_h) U_h`` near mode
    ``m``. Column ``sigma m`` of ``U_h`` lands on ``m`` exactly for the elements
    with linear part ``sigma``; those contributions differ only by the phases
    ``exp(-i m b_h)``, which are separated with a small Vandermonde solve over
    neighbouring modes of the same sign.
    """
    _circle_action(action)
    T = T or A.trunc
    data = np.asarray(A)
    N, d, n = T.N, T.d, action.order
    if m == 0:
        raise DecompositionError("components are not recoverable at the zero mode")
    D = x_degree if x_degree is not None else abs(m) - 1
    sigmas = np.array([int(action.matrices[h][0, 0]) for h in action.group.elements])
    offsets = np.array([float(action.offsets[h][0]) for h in action.group.elements])
    out: list = [None] * n
    for sigma in (1, -1):
        cls = np.flatnonzero(sigmas == sigma)
        if cls.size == 0:
            continue
        stencil = _stencil(m, cls.size, D, N)
        J = min(D, min(min(abs(q) - 1, N - abs(q)) for q in stencil))
        if J < 0:
            raise DecompositionError(f"mode {m} leaves no rows for the symbol")
        rhs = []
        for q in stencil:
            col = T.index_of([sigma * q])[0]
            rows = T.index_of(np.arange(q - J, q + J + 1))
            blk = data.reshape(2 * N + 1, d, 2 * N + 1, d)[rows, :, col, :]
            rhs.append(blk.reshape(-1) * n / abs(q) ** degree)
        V = np.exp(-1j * np.outer(stencil, offsets[cls]))
        if np.linalg.cond(V) > max_condition:
            raise DecompositionError("group components are not separable at this mode")
        sol, *_ = np.linalg.lstsq(V, np.array(rhs), rcond=None)
        for i, h in enumerate(cls):
            out[h] = TrigPoly(sol[i].reshape(2 * J + 1, d, d))
    return out


def crossed_symbol_of(A, action: AffineIsometryAction, m: int, k: int, degree: int = 0,
                      x_degree: int | None = None, T: Truncation | None = None) -> TrigPoly:
    """Leading symbol of the ``k``-component of ``A`` at mode ``m`` (cone ``sgn m``)."""
    k = action.group._check(k)
    return crossed_components_at(A, action, m, degree, x_degree, T)[k]


def class_residual(A, action: AffineIsometryAction, x_degree: int, degree: int = 0,
                   T: Truncation | None = None) -> float:
    """How far ``A`` is from ``crossed_quantize`` of its own peeled components.

    Components are peeled at ``+-(x_degree + 1)`` and the comparison runs over
    all columns with ``x_degree < |m| <= N - x_degree``. Zero means the
    ``U_k``-decomposition exists with ``m``-independent symbols there.
    """
    T = T or A.trunc
    D = x_degree
    m0 = D + 1 + action.order
    plus = crossed_components_at(A, action, m0, degree, D, T)
    minus = crossed_components_at(A, action, -m0, degree, D, T)
    sym = CrossedSymbol(action, [HomogeneousSymbol(degree, p, q) for p, q in zip(plus, minus)])
    B = np.asarray(crossed_quantize(sym, T))
    modes = T.modes[:, 0]
    cols = np.flatnonzero((np.abs(modes) > D) & (np.abs(modes) <= T.N - D))
    cols = (cols[:, None] * T.d + np.arange(T.d)).ravel()
    return float(np.max(np.abs(np.asarray(A)[:, cols] - B[:, cols])))


def _flow_speed(H) -> float:
    if isinstance(H, HamiltonianSpec):
        if H.kind != "metric-norm" or H.dim != 1:
            raise ValueError("closed-form pullback unavailable for this Hamiltonian")
        return 1.0 / np.sqrt(float(H.metric[0]))
    if isinstance(H, CompleteSymbolOrder1):
        if not H.is_metric_norm():
            raise ValueError("closed-form pullback unavailable for this Hamiltonian")
        return float(H.p1.plus.coeffs[0, 0, 0].real)
    raise TypeError("expected a HamiltonianSpec or CompleteSymbolOrder1")


def nc_flow_pullback(a: CrossedSymbol, H, t: float) -> CrossedSymbol:
    """``F_t^* a = a o F_t`` with ``F_t(nu, k) = (f_t(nu), k)`` for metric-norm ``H``.

    On the cone ``sgn xi = s`` the flow translates ``theta`` by ``s c t``.
    """
    shift = _flow_speed(H) * t
    return CrossedSymbol(a.action, [c.translated(shift, -shift) for c in a.components])
