"""Matrix-valued trigonometric polynomials on the circle.

A :class:`TrigPoly` stores exact Fourier coefficients

    f(theta) = sum_{j=-D}^{D} c_j exp(i j theta),    c_j in C^{d x d}

so that products, adjoints, derivatives and pullbacks by isometries of the
circle are coefficient manipulations with no quadrature error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Trigonometric polynomial with ``d x d`` matrix coefficients.

    Parameters
    ----------
    coeffs : ndarray, shape (2D+1, d, d)
        ``coeffs[j + D]`` is the coefficient of ``exp(i j theta)``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim != 3 or c.shape[0] % 2 != 1 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coefficient array has invalid shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction ---------------------------------------------------------
    @classmethod
    def zeros(cls, size: int = 1, degree: int = 0) -> TrigPoly:
        return cls(np.zeros((2 * degree + 1, size, size), complex))

    @classmethod
    def constant(cls, value, size: int | None = None) -> TrigPoly:
        v = np.asarray(value, dtype=complex)
        if v.ndim == 0:
            v = v * np.eye(size or 1)
        return cls(v[None, :, :])

    @classmethod
    def from_terms(cls, terms, size: int = 1) -> TrigPoly:
        """Build from ``(frequency, coefficient[, (row, col)])`` tuples.

        Scalar coefficients without an entry index multiply the identity;
        ``(d, d)`` array coefficients are used as they are.
        """
        terms = list(terms)
        degree = max((abs(int(t[0])) for t in terms), default=0)
        c = np.zeros((2 * degree + 1, size, size), complex)
        for term in terms:
            j, coef = int(term[0]), term[1]
            if len(term) > 2 and term[2] is not None:
                r, s = term[2]
                c[j + degree, r, s] += coef
            elif np.ndim(coef) == 2:
                c[j + degree] += np.asarray(coef, dtype=complex)
            else:
                c[j + degree] += complex(coef) * np.eye(size)
        return cls(c)

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int, size: int = 1,
               hermitian: bool = False, real: bool = False) -> TrigPoly:
        c = rng.standard_normal((2 * degree + 1, size, size))
        if not real:
            c = c + 1j * rng.standard_normal((2 * degree + 1, size, size))
        p = cls(c)
        if hermitian or real:
            p = (p + p.adjoint()) * 0.5
        return p

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def size(self) -> int:
        return self.coeffs.shape[1]

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coefficient(self, j: int) -> np.ndarray:
        if abs(j) > self.degree:
            return np.zeros((self.size, self.size), complex)
        return self.coeffs[j + self.degree]

    def padded(self, degree: int) -> TrigPoly:
        if degree < self.degree:
            raise ValueError("cannot pad to a smaller degree")
        extra = degree - self.degree
        return TrigPoly(np.pad(self.coeffs, ((extra, extra), (0, 0), (0, 0))))

    def trimmed(self, tol: float = 0.0) -> TrigPoly:
        """Drop outer frequencies whose coefficients are all ``<= tol``."""
        mags = np.abs(self.coeffs).reshape(self.coeffs.shape[0], -1).max(axis=1)
        D = self.degree
        keep = 0
        for j in range(D, 0, -1):
            if mags[D + j] > tol or mags[D - j] > tol:
                keep = j
                break
        return TrigPoly(self.coeffs[D - keep:D + keep + 1])

    def __call__(self, theta) -> np.ndarray:
        """Evaluate at angles ``theta``; result has shape ``theta.shape + (d, d)``."""
        theta = np.asarray(theta, dtype=float)
        phases = np.exp(1j * np.multiply.outer(theta, self.frequencies))
        return np.tensordot(phases, self.coeffs, axes=(-1, 0))

    # algebra --------------------------------------------------------------
    def _aligned(self, other: TrigPoly):
        D = max(self.degree, other.degree)
        return self.padded(D).coeffs, other.padded(D).coeffs

    def __add__(self, other):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other, self.size)
        a, b = self._aligned(other)
        return TrigPoly(a + b)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return self.matmul(other)
        return TrigPoly(self.coeffs * other)

    __rmul__ = __mul__

    def matmul(self, other: TrigPoly) -> TrigPoly:
        """Pointwise matrix product ``f(theta) @ g(theta)``."""
        Da, Db = self.degree, other.degree
        out = np.zeros((2 * (Da + Db) + 1, self.size, other.size), complex)
        # fixed summation order over the left factor's frequencies
        for i in range(2 * Da + 1):
            out[i:i + 2 * Db + 1] += np.matmul(self.coeffs[i], other.coeffs)
        return TrigPoly(out)

    def adjoint(self) -> TrigPoly:
        """Pointwise conjugate transpose: coefficient ``j`` becomes ``c_{-j}^H``."""
        return TrigPoly(np.conj(self.coeffs[::-1]).transpose(0, 2, 1))

    def conj(self) -> TrigPoly:
        """Pointwise entrywise complex conjugate."""
        return TrigPoly(np.conj(self.coeffs[::-1]))

    def derivative(self, order: int = 1) -> TrigPoly:
        factor = (1j * self.frequencies) ** order
        return TrigPoly(self.coeffs * factor[:, None, None])

    def pullback(self, sign: int, shift: float) -> TrigPoly:
        """Return ``theta -> f(sign * theta + shift)`` with ``sign = +-1``."""
        phased = self.coeffs * np.exp(1j * self.frequencies * shift)[:, None, None]
        if sign == 1:
            return TrigPoly(phased)
        if sign == -1:
            return TrigPoly(phased[::-1])
        raise ValueError("circle isometries have linear part +-1")

    def kron_identity(self, size: int) -> TrigPoly:
        """Scalar polynomial tensored with ``I_size``."""
        if self.size != 1:
            raise ValueError("kron_identity needs a scalar polynomial")
        return TrigPoly(self.coeffs[:, :, :] * np.eye(size)[None])

    # comparisons ----------------------------------------------------------
    def max_abs_diff(self, other: TrigPoly) -> float:
        a, b = self._aligned(other)
        return float(np.abs(a - b).max()) if a.size else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.max_abs_diff(self.adjoint()) <= tol

    def is_real_scalar(self, tol: float = 1e-12) -> bool:
        return self.size == 1 and self.is_hermitian(tol)

    def sup_norm_bound(self) -> float:
        """Upper bound ``sum_j ||c_j||_2`` for the sup of the spectral norm."""
        return float(sum(np.linalg.norm(c, 2) for c in self.coeffs))

    def __repr__(self):
        return f"TrigPoly(degree={self.degree}, size={self.size})"
