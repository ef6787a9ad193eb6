"""Hamiltonian flows on the cotangent bundle of a flat torus.

Three integrators are provided: a closed-form flow for metric-norm
Hamiltonians ``H = |xi|_g`` (constant diagonal metric), leapfrog for
separable Hamiltonians ``H = T(xi) + V(x)``, and implicit midpoint for
everything else. Momentum maps of circle actions and the reduced flow on the
conormal bundle ``J^{-1}(0)`` live here as well.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (ConicSingularityError, ConvergenceError, InvarianceError,
                     NotConormalError)
from .group_actions import (AffineIsometryAction, CircleAction, TWO_PI, act,
                            torus_distance, wrap)

XI_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class CotangentPoint:
    """Base point on the torus (radians, reduced) and a covector."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = wrap(np.atleast_1d(np.asarray(self.x, dtype=float)))
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float)).copy()
        if x.shape != xi.shape or x.ndim != 1:
            raise ValueError("x and xi must be vectors of equal length")
        x.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def distance(self, other: CotangentPoint) -> float:
        """Torus distance on the base plus Euclidean distance on covectors."""
        return float(torus_distance(self.x, other.x) + np.linalg.norm(self.xi - other.xi))


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """A Hamiltonian on ``T*T^n``.

    Build with :meth:`metric_norm` or :meth:`closed_form`. ``invariances``
    lists the finite or circle actions the Hamiltonian is declared to respect;
    each declaration is spot-checked on construction.
    """

    kind: str
    dim: int
    value: Callable
    grad_x: Callable
    grad_xi: Callable
    metric: np.ndarray | None = None
    separable: bool = False
    homogeneity: int | None = None
    invariances: tuple = ()
    name: str = "H"

    def __post_init__(self):
        object.__setattr__(self, "invariances", tuple(self.invariances))
        if self.kind not in ("metric-norm", "closed-form"):
            raise ValueError(f"unknown Hamiltonian kind {self.kind!r}")
        for sym in self.invariances:
            self.check_invariance(sym)

    @classmethod
    def metric_norm(cls, metric: Sequence[float] = (1.0,), invariances=(), name="|xi|_g"):
        g = np.asarray(metric, dtype=float)
        if np.any(g <= 0):
            raise ValueError("metric must be positive definite")
        ginv = 1.0 / g

        def value(x, xi):
            return np.sqrt(np.sum(ginv * xi * xi, axis=-1))

        def grad_x(x, xi):
            return np.zeros_like(np.asarray(xi, float))

        def grad_xi(x, xi):
            return ginv * xi / value(x, xi)[..., None]

        return cls("metric-norm", len(g), value, grad_x, grad_xi, metric=g,
                   separable=True, homogeneity=1, invariances=invariances, name=name)

    @classmethod
    def closed_form(cls, dim, value, grad_x, grad_xi, separable=False, homogeneity=None,
                    invariances=(), name="H"):
        return cls("closed-form", dim, value, grad_x, grad_xi, separable=separable,
                   homogeneity=homogeneity, invariances=invariances, name=name)

    def __call__(self, point: CotangentPoint) -> float:
        return float(self.value(point.x, point.xi))

    def with_invariances(self, invariances) -> HamiltonianSpec:
        return HamiltonianSpec(self.kind, self.dim, self.value, self.grad_x, self.grad_xi,
                               self.metric, self.separable, self.homogeneity,
                               tuple(invariances), self.name)

    def check_invariance(self, symmetry, samples: int = 100, tol: float = 1e-10, seed: int = 0):
        """Spot-check ``|H(lift(g, nu)) - H(nu)| <= tol`` on random points."""
        rng = np.random.default_rng(seed)
        x = rng.uniform(0, TWO_PI, (samples, self.dim))
        xi = rng.normal(size=(samples, self.dim))
        xi[np.linalg.norm(xi, axis=1) < 0.1] += 1.0
        h0 = self.value(x, xi)
        if isinstance(symmetry, CircleAction):
            s = rng.uniform(0, TWO_PI, (samples, 1))
            h1 = self.value(wrap(x + s * symmetry.generator), xi)
            worst = np.max(np.abs(h1 - h0))
        elif isinstance(symmetry, AffineIsometryAction):
            worst = 0.0
            for g in symmetry.group.elements:
                A = symmetry.matrices[g]
                h1 = self.value(act(symmetry, g, x), xi @ A.T)
                worst = max(worst, float(np.max(np.abs(h1 - h0))))
        else:
            raise TypeError("symmetry must be a finite or circle action")
        if worst > tol:
            raise InvarianceError(
                f"{self.name} is not invariant under {symmetry!r}: deviation {worst:.3e}")
        return worst

    def is_invariant_under(self, symmetry) -> bool:
        return any(s is symmetry or s == symmetry for s in self.invariances)


def kinetic_plus_potential(dim: int, terms, invariances=(), name="|xi|^2/2+V"):
    """Separable ``H = |xi|^2 / 2 + sum_k a_k cos(<k, x> + phi_k)``.

    ``terms`` is a sequence of ``(k_vector, amplitude, phase)``.
    """
    ks = np.array([np.atleast_1d(t[0]) for t in terms], dtype=float).reshape(-1, dim)
    amps = np.array([t[1] for t in terms], dtype=float)
    phis = np.array([t[2] if len(t) > 2 else 0.0 for t in terms], dtype=float)

    def value(x, xi):
        x = np.asarray(x, float)
        pot = np.cos(x @ ks.T + phis) @ amps if len(amps) else 0.0
        return 0.5 * np.sum(np.asarray(xi) ** 2, axis=-1) + pot

    def grad_x(x, xi):
        x = np.asarray(x, float)
        if not len(amps):
            return np.zeros_like(x)
        return -(np.sin(x @ ks.T + phis) * amps) @ ks

    def grad_xi(x, xi):
        return np.array(xi, dtype=float)

    return HamiltonianSpec.closed_form(dim, value, grad_x, grad_xi, separable=True,
                                       invariances=invariances, name=name)


def add_momentum_square(H: HamiltonianSpec, circle: CircleAction, invariances=None):
    """Another invariant extension: ``H + J^2`` with ``J = <xi, w>``."""
    w = circle.generator

    def value(x, xi):
        return H.value(x, xi) + (np.asarray(xi) @ w) ** 2

    def grad_xi(x, xi):
        return H.grad_xi(x, xi) + 2.0 * (np.asarray(xi) @ w)[..., None] * w

    return HamiltonianSpec.closed_form(
        H.dim, value, H.grad_x, grad_xi, separable=H.separable,
        invariances=H.invariances if invariances is None else invariances,
        name=f"{H.name}+J^2")


@dataclass(frozen=True)
class FlowConfig:
    """Integrator choice and step size."""

    integrator: str = "exact"
    dt: float = 1e-3
    tol: float = 1e-14
    max_iter: int = 100

    def __post_init__(self):
        if self.integrator not in ("exact", "leapfrog", "implicit-midpoint"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled flow: ``x[k], xi[k]`` at time ``t[k]``."""

    t: np.ndarray
    x: np.ndarray
    xi: np.ndarray

    def __len__(self):
        return len(self.t)

    def point(self, k: int) -> CotangentPoint:
        return CotangentPoint(self.x[k], self.xi[k])


def _flow_arrays(H: HamiltonianSpec, x, xi, t: float, cfg: FlowConfig):
    """Flow arrays of shape ``(..., n)``; ``x`` is not reduced mod 2*pi."""
    x = np.array(x, dtype=float)
    xi = np.array(xi, dtype=float)
    if H.homogeneity is not None and np.any(np.linalg.norm(xi, axis=-1) < XI_FLOOR):
        raise ConicSingularityError("conic singularity: xi = 0 for a homogeneous Hamiltonian")
    if t == 0:
        return x, xi
    if cfg.integrator == "exact":
        if H.kind != "metric-norm":
            raise ValueError("exact integrator requires a metric-norm Hamiltonian")
        if H.dim == 1:
            # g^{-1} xi / |xi|_g = sgn(xi) / sqrt(g), exactly scale invariant
            return x + t * np.sign(xi) / np.sqrt(H.metric), xi
        u = xi / H.value(x, xi)[..., None]
        return x + t * (u / H.metric), xi
    nsteps = max(1, int(np.ceil(abs(t) / cfg.dt - 1e-9)))
    h = t / nsteps
    if cfg.integrator == "leapfrog":
        if not H.separable:
            raise ValueError("leapfrog requires a separable Hamiltonian")
        for _ in range(nsteps):
            xi = xi - 0.5 * h * H.grad_x(x, xi)
            x = x + h * H.grad_xi(x, xi)
            xi = xi - 0.5 * h * H.grad_x(x, xi)
        return x, xi
    for _ in range(nsteps):
        x, xi = _midpoint_step(H, x, xi, h, cfg)
    return x, xi


def _midpoint_step(H, x0, xi0, h, cfg):
    x1, xi1 = x0 + h * H.grad_xi(x0, xi0), xi0 - h * H.grad_x(x0, xi0)
    for _ in range(cfg.max_iter):
        xm, xim = 0.5 * (x0 + x1), 0.5 * (xi0 + xi1)
        x2 = x0 + h * H.grad_xi(xm, xim)
        xi2 = xi0 - h * H.grad_x(xm, xim)
        delta = max(np.max(np.abs(x2 - x1)), np.max(np.abs(xi2 - xi1)))
        x1, xi1 = x2, xi2
        scale = 1.0 + max(np.max(np.abs(x1)), np.max(np.abs(xi1)))
        if delta <= cfg.tol * scale:
            return x1, xi1
    raise ConvergenceError("implicit midpoint did not converge", float(delta))


def hamiltonian_flow(H: HamiltonianSpec, point: CotangentPoint, t: float,
                     cfg: FlowConfig | None = None) -> CotangentPoint:
    """Time-``t`` map of the Hamiltonian flow of ``H`` applied to ``point``."""
    cfg = cfg or FlowConfig("exact" if H.kind == "metric-norm" else "implicit-midpoint")
    x, xi = _flow_arrays(H, point.x, point.xi, t, cfg)
    return CotangentPoint(x, xi)


def trajectory(H: HamiltonianSpec, point: CotangentPoint, t: float, cfg: FlowConfig,
               samples: int = 11) -> Trajectory:
    """Flow sampled at ``samples`` equally spaced times in ``[0, t]``.

    Successive samples are obtained by continuing the integration, so the
    total number of steps matches a single call with the same ``dt``.
    """
    times = np.linspace(0.0, t, samples)
    xs, xis = [np.array(point.x)], [np.array(point.xi)]
    x, xi = point.x, point.xi
    for k in range(1, samples):
        x, xi = _flow_arrays(H, x, xi, times[k] - times[k - 1], cfg)
        xs.append(np.array(x))
        xis.append(np.array(xi))
    return Trajectory(times, wrap(np.array(xs)), np.array(xis))


def momentum_map(circle: CircleAction, point: CotangentPoint) -> float:
    """``J(x, xi) = <xi, w>`` for the circle action with weight ``w``."""
    return float(np.dot(point.xi, circle.generator))


def is_conormal(circle: CircleAction, point: CotangentPoint, tol: float = 1e-9) -> bool:
    return abs(momentum_map(circle, point)) <= tol


def reduced_flow(H: HamiltonianSpec, circle: CircleAction, point: CotangentPoint, t: float,
                 cfg: FlowConfig | None = None, tol: float = 1e-9) -> CotangentPoint:
    """Flow of an invariant extension restricted to the conormal bundle."""
    if not is_conormal(circle, point, tol):
        raise NotConormalError(
            f"not on conormal bundle: J = {momentum_map(circle, point):.3e}")
    if not H.is_invariant_under(circle):
        raise InvarianceError(f"{H.name} is not declared invariant under the circle action")
    out = hamiltonian_flow(H, point, t, cfg)
    if abs(momentum_map(circle, out)) > 10 * tol:
        raise InvarianceError("flow left the conormal bundle; declared invariance is wrong")
    return out


def evaluate_invariant_observable(obs: Callable, traj: Trajectory, symmetry=None,
                                  tol: float = 1e-10) -> np.ndarray:
    """Values of ``obs(x, xi)`` along a trajectory.

    When ``symmetry`` is given the observable's invariance is spot-checked
    at the trajectory samples first.
    """
    vals = np.array([obs(traj.x[k], traj.xi[k]) for k in range(len(traj))], dtype=float)
    if symmetry is not None:
        rng = np.random.default_rng(1)
        for k in range(len(traj)):
            if isinstance(symmetry, CircleAction):
                y = symmetry.act(rng.uniform(0, TWO_PI), traj.x[k])
                moved = [obs(y, traj.xi[k])]
            else:
                moved = [obs(act(symmetry, g, traj.x[k]), symmetry.matrices[g] @ traj.xi[k])
                         for g in symmetry.group.elements]
            if np.max(np.abs(np.asarray(moved) - vals[k])) > tol:
                raise InvarianceError("observable is not invariant under the symmetry")
    return vals


def write_trajectory_csv(path, traj: Trajectory, H: HamiltonianSpec,
                         circle: CircleAction | None = None) -> None:
    """Dump ``t, x1..xn, xi1..xin, H, J`` (``J`` empty without a circle action)."""
    n = traj.x.shape[1]
    header = (["t"] + [f"x{i + 1}" for i in range(n)] + [f"xi{i + 1}" for i in range(n)]
              + ["H", "J"])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(len(traj)):
            J = "" if circle is None else repr(float(traj.xi[k] @ circle.generator))
            row = [traj.t[k], *traj.x[k], *traj.xi[k], H.value(traj.x[k], traj.xi[k])]
            w.writerow([repr(float(v)) for v in row] + [J])


def equivariance_residual(H: HamiltonianSpec, symmetry, point: CotangentPoint, t: float,
                          cfg: FlowConfig, s: float = 0.7) -> float:
    """``max_g dist(lift(g, f_t(nu)), f_t(lift(g, nu)))`` over the symmetry."""
    base = hamiltonian_flow(H, point, t, cfg)
    worst = 0.0
    if isinstance(symmetry, CircleAction):
        moved = CotangentPoint(symmetry.act(s, point.x), point.xi)
        a = CotangentPoint(symmetry.act(s, base.x), base.xi)
        return hamiltonian_flow(H, moved, t, cfg).distance(a)
    for g in symmetry.group.elements:
        A = symmetry.matrices[g]
        moved = CotangentPoint(act(symmetry, g, point.x), A @ point.xi)
        a = CotangentPoint(act(symmetry, g, base.x), A @ base.xi)
        worst = max(worst, hamiltonian_flow(H, moved, t, cfg).distance(a))
    return worst
