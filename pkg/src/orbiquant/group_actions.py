"""Finite isometry groups and circle actions on flat tori.

All torus coordinates are radians reduced to ``[0, 2*pi)``. A finite group
acts by affine maps ``x -> A_g x + b_g`` with integer orthogonal ``A_g``; the
cotangent lift is ``(x, xi) -> (A_g x + b_g, A_g xi)`` and the induced
unitary on Fourier modes is ``(U_g u)(x) = u(g^{-1} x)``, which sends
``exp(i<m,x>)`` to ``exp(-i<A_g m, b_g>) exp(i<A_g m, x>)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import GroupError

TWO_PI = 2.0 * np.pi


def wrap(x):
    """Reduce angles to ``[0, 2*pi)``."""
    y = np.mod(np.asarray(x, dtype=float), TWO_PI)
    return np.where(y >= TWO_PI, y - TWO_PI, y)


def torus_distance(x, y) -> np.ndarray:
    """Flat torus distance between points (last axis is the coordinate axis)."""
    diff = np.mod(np.asarray(x, float) - np.asarray(y, float) + np.pi, TWO_PI) - np.pi
    return np.sqrt(np.sum(np.atleast_1d(diff) ** 2, axis=-1))


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Finite group given by its multiplication table; element 0 is the identity."""

    table: np.ndarray
    name: str = "K"

    def __post_init__(self):
        t = np.asarray(self.table, dtype=int)
        n = t.shape[0]
        if t.shape != (n, n) or n < 1:
            raise GroupError("multiplication table must be square")
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries must be element ids")
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise GroupError("element 0 must be the identity")
        for row in t:
            if len(set(row.tolist())) != n:
                raise GroupError("table rows must be permutations")
        # associativity, exhaustively
        if not np.array_equal(_assoc_lhs(t), _assoc_rhs(t)):
            raise GroupError("table is not associative")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        inv = np.argmax(t == 0, axis=1)
        inv.setflags(write=False)
        object.__setattr__(self, "inverses", inv)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def elements(self) -> range:
        return range(self.order)

    identity = 0

    def mul(self, g: int, h: int) -> int:
        return int(self.table[self._check(g), self._check(h)])

    def inv(self, g: int) -> int:
        return int(self.inverses[self._check(g)])

    def _check(self, g) -> int:
        g = int(g)
        if not 0 <= g < self.order:
            raise GroupError(f"unknown group element {g}")
        return g

    def is_subgroup(self, subset: Sequence[int]) -> bool:
        s = set(int(g) for g in subset)
        if 0 not in s:
            return False
        return all(self.mul(a, self.inv(b)) in s for a in s for b in s)


def _assoc_lhs(t):
    # (a*b)*c for all triples
    return t[t[:, :, None], np.arange(t.shape[0])[None, None, :]]


def _assoc_rhs(t):
    # a*(b*c) for all triples
    return t[np.arange(t.shape[0])[:, None, None], t[None, :, :]]


@dataclass(frozen=True, eq=False)
class AffineIsometryAction:
    """Finite group acting on the flat torus ``T^n`` by integer-orthogonal affine maps.

    Use :meth:`from_maps` to derive the group table from the maps themselves.
    """

    group: FiniteGroup
    matrices: np.ndarray
    offsets: np.ndarray
    name: str = "action"

    def __post_init__(self):
        A = np.asarray(self.matrices, dtype=int)
        b = wrap(np.asarray(self.offsets, dtype=float))
        K = self.group.order
        if A.ndim != 3 or A.shape[0] != K or A.shape[1] != A.shape[2]:
            raise GroupError("need one n x n matrix per group element")
        n = A.shape[1]
        if n not in (1, 2):
            raise GroupError("only tori of dimension 1 or 2 are supported")
        if b.shape != (K, n):
            raise GroupError("need one offset vector per group element")
        eye = np.eye(n, dtype=int)
        for g in range(K):
            if not np.array_equal(A[g].T @ A[g], eye):
                raise GroupError(f"matrix of element {g} is not orthogonal")
        for g, h in product(range(K), repeat=2):
            gh = self.group.mul(g, h)
            if not np.array_equal(A[g] @ A[h], A[gh]):
                raise GroupError("linear parts do not form a homomorphism")
            if torus_distance(A[g] @ b[h] + b[g], b[gh]) > 1e-12:
                raise GroupError("offsets do not form a homomorphism")
        for g in range(1, K):
            if np.array_equal(A[g], eye) and torus_distance(b[g], np.zeros(n)) <= 1e-12:
                raise GroupError(f"element {g} acts trivially; action is not effective")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "matrices", A)
        object.__setattr__(self, "offsets", b)

    @classmethod
    def from_maps(cls, matrices, offsets, name: str = "action") -> AffineIsometryAction:
        """Close a list of affine maps (identity first) into a group action.

        Offsets may be floats (radians) or :class:`fractions.Fraction` turns,
        i.e. multiples of ``2*pi``.
        """
        A = np.asarray(matrices, dtype=int)
        b = np.array([[_to_radians(v) for v in np.atleast_1d(row)] for row in offsets], float)
        K = A.shape[0]
        table = np.empty((K, K), dtype=int)
        for g, h in product(range(K), repeat=2):
            Agh = A[g] @ A[h]
            bgh = A[g] @ b[h] + b[g]
            match = [k for k in range(K)
                     if np.array_equal(A[k], Agh) and torus_distance(b[k], bgh) <= 1e-12]
            if len(match) != 1:
                raise GroupError("maps are not closed under composition or not distinct")
            table[g, h] = match[0]
        return cls(FiniteGroup(table, name=name), A, b, name=name)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def order(self) -> int:
        return self.group.order

    def inverse_map(self, g: int):
        gi = self.group.inv(g)
        return self.matrices[gi], self.offsets[gi]


def _to_radians(v) -> float:
    if isinstance(v, Fraction):
        return float(v) * TWO_PI
    return float(v)


@dataclass(frozen=True)
class CircleAction:
    """Circle action ``x -> x + s * weight`` on ``T^n`` with coprime integer weight."""

    weight: tuple

    def __post_init__(self):
        w = tuple(int(v) for v in np.atleast_1d(self.weight))
        if not any(w):
            raise GroupError("circle weight must be nonzero")
        if math.gcd(*w) != 1:
            raise GroupError("circle weight must have coprime entries (effective action)")
        object.__setattr__(self, "weight", w)

    @property
    def dim(self) -> int:
        return len(self.weight)

    @property
    def generator(self) -> np.ndarray:
        return np.asarray(self.weight, dtype=float)

    def act(self, s: float, x) -> np.ndarray:
        return wrap(np.asarray(x, float) + s * self.generator)


# built-in actions --------------------------------------------------------

def trivial(n: int = 1) -> AffineIsometryAction:
    return AffineIsometryAction.from_maps([np.eye(n, dtype=int)], [[0.0] * n], name="trivial")


def rotation(q: int) -> AffineIsometryAction:
    """``Z_q`` acting on the circle by rotations through ``2*pi*j/q``."""
    return AffineIsometryAction.from_maps(
        [[[1]]] * q, [[Fraction(j, q)] for j in range(q)], name=f"Z{q}-rotation")


def reflection() -> AffineIsometryAction:
    """``Z_2`` acting on the circle by ``theta -> -theta``."""
    return AffineIsometryAction.from_maps([[[1]], [[-1]]], [[0.0], [0.0]], name="Z2-reflection")


def dihedral(q: int) -> AffineIsometryAction:
    """Dihedral group of order ``2q`` on the circle; ``q = 2`` gives ``D_2``."""
    mats = [[[1]]] * q + [[[-1]]] * q
    offs = [[Fraction(j, q)] for j in range(q)] * 2
    return AffineIsometryAction.from_maps(mats, offs, name=f"D{q}")


def quarter_turn() -> AffineIsometryAction:
    """``Z_4`` acting on ``T^2`` by rotating coordinates a quarter turn."""
    R = np.array([[0, -1], [1, 0]])
    mats = [np.linalg.matrix_power(R, j) for j in range(4)]
    return AffineIsometryAction.from_maps(mats, [[0.0, 0.0]] * 4, name="Z4-quarter-turn")


def coordinate_swap() -> AffineIsometryAction:
    """``Z_2`` acting on ``T^2`` by ``(x, y) -> (y, x)``."""
    return AffineIsometryAction.from_maps(
        [np.eye(2, dtype=int), [[0, 1], [1, 0]]], [[0.0, 0.0]] * 2, name="Z2-swap")


BUILTIN_ACTIONS = {
    "trivial": lambda: trivial(1),
    "Z2-reflection": reflection,
    "D2": lambda: dihedral(2),
    "Z4-quarter-turn": quarter_turn,
    "Z2-swap": coordinate_swap,
}


def builtin_action(name: str) -> AffineIsometryAction:
    """Look up a built-in action: the names above, ``Z<q>-rotation`` or ``D<q>``."""
    if name in BUILTIN_ACTIONS:
        return BUILTIN_ACTIONS[name]()
    if name.startswith("Z") and name.endswith("-rotation") and name[1:-9].isdigit():
        return rotation(int(name[1:-9]))
    if name.startswith("D") and name[1:].isdigit():
        return dihedral(int(name[1:]))
    raise GroupError(f"unknown built-in action {name!r}")


# operations ---------------------------------------------------------------

def act(action: AffineIsometryAction, g: int, x) -> np.ndarray:
    """Apply ``g`` to torus point(s) ``x``."""
    g = action.group._check(g)
    x = np.asarray(x, dtype=float)
    if action.dim == 1 and x.ndim == 0:
        return wrap(action.matrices[g][0, 0] * x + action.offsets[g][0])
    return wrap(x @ action.matrices[g].T + action.offsets[g])


def cotangent_lift(action: AffineIsometryAction, g: int, point):
    """Lift ``g`` to ``T*M``; covectors transform by ``A_g`` (orthogonal)."""
    from .symplectic_flows import CotangentPoint

    g = action.group._check(g)
    A = action.matrices[g]
    return CotangentPoint(act(action, g, point.x), A @ point.xi)


def isotropy(action: AffineIsometryAction, x, tol: float = 1e-9) -> list[int]:
    """Elements fixing ``x`` up to ``tol`` in the torus metric."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return [g for g in action.group.elements
            if torus_distance(act(action, g, x), x) <= tol]


def is_regular(action: AffineIsometryAction, x, tol: float = 1e-9) -> bool:
    return isotropy(action, x, tol) == [0]


def mode_action(action: AffineIsometryAction, g: int, N: int, rep=None) -> np.ndarray:
    """Unitary ``U_g`` on the truncated Fourier window ``{-N..N}^n``.

    With ``rep`` (array of shape ``(|K|, d, d)``) the result is
    ``U_g (x) rep[g]`` in mode-major layout.
    """
    from .quantization import Truncation

    g = action.group._check(g)
    T = Truncation(N, n=action.dim)
    modes = T.modes
    A, b = action.matrices[g], action.offsets[g]
    images = modes @ A.T
    phases = np.exp(-1j * (images @ b))
    U = np.zeros((T.n_modes, T.n_modes), complex)
    U[T.index_of(images), np.arange(T.n_modes)] = phases
    if rep is not None:
        U = np.kron(U, np.asarray(rep, dtype=complex)[g])
    return U


def haar_average(action_or_group, values):
    """Normalized Haar (counting) average ``|K|^{-1} sum_k f(k)``."""
    group = getattr(action_or_group, "group", action_or_group)
    vals = [values[k] for k in group.elements]
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total / group.order
