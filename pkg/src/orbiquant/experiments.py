"""Config-driven convergence experiments.

Each runner turns a validated :class:`ExperimentConfig` into an
:class:`ErrorTable`: per-row residuals plus tolerance gates. Writers emit
``detail.csv`` (or ``detail.json``) and ``summary.json``; both are
deterministic functions of the config.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__, kernels
from .crossed_product import (CrossedFunction, CrossedSymbol, GroupoidElement,
                              class_residual, convolve, crossed_components_at,
                              crossed_quantize, fiber_represent,
                              involution, nc_flow_pullback, reduced_norm, represent,
                              symbol_convolve, symbol_involution)
from .errors import ConfigError, GroupError, InvarianceError
from .group_actions import CircleAction, builtin_action, mode_action
from .heisenberg import (SpectralDecomposition, ad_transport_on_grid, ad_transport_symbol,
                         orbifold_heisenberg, transport_generator)
from .quantization import (CompleteSymbolOrder1, HomogeneousSymbol, OperatorMatrix, Truncation,
                           build_first_order, op_quantize, symbol_on_grid)
from .symplectic_flows import (CotangentPoint, FlowConfig, HamiltonianSpec,
                               add_momentum_square, equivariance_residual,
                               evaluate_invariant_observable, kinetic_plus_potential,
                               momentum_map, reduced_flow, trajectory)
from .trigpoly import TrigPoly

EXPERIMENTS = ("classical-egorov", "matrix-egorov", "nc-egorov", "reduction", "algebra-suite")
SCHEMA = "# orbiquant detail schema v1"
COLUMNS = ("experiment", "quantity", "N", "t", "m", "error", "interior")
CONFIG_DIR = Path(__file__).with_name("configs")

DEFAULT_TOLERANCES = {
    "classical-egorov": {"interior": 1e-12, "sandwich": 1e-10},
    "matrix-egorov": {"dyadic_low": 0.3, "dyadic_high": 0.8,
                      "order_low": 0.8, "order_high": 1.2},
    "nc-egorov": {"interior": 1e-12, "class": 1e-12},
    "reduction": {"momentum": 1e-12, "conormal": 1e-8, "dual": 1e-6, "equivariance": 1e-8},
    "algebra-suite": {"residual": 1e-12},
}

_TOP_KEYS = {"experiment", "seed", "model", "tolerances", "output"}


# config ---------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    model: dict
    tolerances: dict
    seed: int = 0
    format: str = "csv"
    out_dir: str | None = None

    def tol(self, key: str) -> float:
        return float(self.tolerances[key])


def _fail(msg: str):
    raise ConfigError(msg)


def _check_N(values):
    if not isinstance(values, list) or not values:
        _fail("model.N must be a non-empty list")
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in values):
        _fail("model.N entries must be positive integers")
    if any(b <= a for a, b in zip(values, values[1:])):
        _fail("model.N must be strictly increasing")


def _check_t(values):
    if not isinstance(values, list) or not values:
        _fail("model.t must be a non-empty list")
    try:
        ok = all(math.isfinite(float(v)) for v in values)
    except (TypeError, ValueError):
        ok = False
    if not ok:
        _fail("model.t entries must be finite numbers")


def _check_group(name):
    try:
        builtin_action(str(name))
    except GroupError as exc:
        raise ConfigError(str(exc)) from None


def validate_config(raw: dict, out_dir: str | None = None) -> ExperimentConfig:
    """Validate a parsed config mapping; raises :class:`ConfigError`."""
    if not isinstance(raw, dict):
        _fail("config must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        _fail(f"unknown top-level keys: {sorted(unknown)}")
    exp = raw.get("experiment")
    if exp not in EXPERIMENTS:
        _fail(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    model = raw.get("model") or {}
    if not isinstance(model, dict):
        _fail("model must be a mapping")
    if exp != "algebra-suite" and exp != "reduction":
        _check_N(model.get("N", [64, 128, 256]))
    _check_t(model.get("t", [0.5, 1.0, 2.0]))
    if model.get("group") is not None:
        _check_group(model["group"])
    for g in model.get("groups", []) or []:
        _check_group(g)
    if "dt" in model and not float(model["dt"]) > 0:
        _fail("model.dt must be positive")
    output = raw.get("output") or {}
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        _fail("output.format must be csv or json")
    tols = dict(DEFAULT_TOLERANCES[exp])
    for key, val in (raw.get("tolerances") or {}).items():
        if key not in tols:
            _fail(f"unknown tolerance {key!r} for {exp}")
        if not float(val) > 0:
            _fail(f"tolerance {key} must be positive")
        tols[key] = float(val)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        _fail("seed must be an integer")
    try:
        _build_model(exp, model)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError, InvarianceError) as exc:
        raise ConfigError(f"invalid model: {exc}") from None
    return ExperimentConfig(exp, model, tols, seed, fmt, out_dir)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML: {exc}") from None
    return validate_config(raw)


def builtin_configs() -> dict[str, Path]:
    return {p.stem: p for p in sorted(CONFIG_DIR.glob("*.yaml"))}


# model parsing ---------------------------------------------------------------

def _scalar(v) -> complex:
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def _coef(v):
    if isinstance(v, list):
        return np.array([[_scalar(x) for x in row] for row in v], dtype=complex)
    return _scalar(v)


def _term(t, lead: int):
    """Convert a config term; the first ``lead`` fields are labels."""
    t = list(t)
    out = t[:lead] + [int(t[lead]), _coef(t[lead + 1])]
    if len(t) > lead + 2:
        out.append(tuple(t[lead + 2]))
    return tuple(out)


def parse_symbol(block: dict) -> HomogeneousSymbol:
    size = int(block.get("size", 1))
    terms = [_term(t, 1) for t in block.get("terms", [])]
    return HomogeneousSymbol.from_terms(int(block.get("degree", 0)), terms, size)


def parse_trigpoly(terms, size: int) -> TrigPoly:
    terms = [_term(t, 0) for t in terms or []]
    return TrigPoly.from_terms(terms, size) if terms else TrigPoly.zeros(size)


def parse_complete_symbol(block: dict | None, size: int) -> CompleteSymbolOrder1:
    """``p1 = c(theta)|xi|`` with ``c`` from ``speed`` (default ``1/sqrt(metric)``)."""
    block = block or {}
    V = parse_trigpoly(block.get("potential"), size)
    if "speed" in block:
        c = parse_trigpoly(block["speed"], 1)
        return CompleteSymbolOrder1(HomogeneousSymbol(1, c, c), HomogeneousSymbol(0, V, V))
    return CompleteSymbolOrder1.metric_norm(V, float(block.get("metric", 1.0)), size)


def parse_crossed_symbol(action, block: dict) -> CrossedSymbol:
    size = int(block.get("size", 1))
    terms = [_term(t, 2) for t in block.get("terms", [])]
    return CrossedSymbol.from_terms(action, int(block.get("degree", 0)), terms, size)


def _build_model(exp: str, model: dict):
    """Parse everything once so that validation catches bad model blocks."""
    if exp in ("classical-egorov", "matrix-egorov"):
        a = parse_symbol(model.get("symbol", {}))
        P = parse_complete_symbol(model.get("hamiltonian"), a.size)
        if exp == "matrix-egorov" and a.size < 2:
            _fail("matrix-egorov needs a matrix symbol (size >= 2)")
        if exp == "classical-egorov" and a.size != 1:
            _fail("classical-egorov needs a scalar symbol")
        return a, P
    if exp == "nc-egorov":
        action = builtin_action(model.get("group", "Z2-reflection"))
        a = parse_crossed_symbol(action, model.get("crossed_symbol", {}))
        P = parse_complete_symbol(model.get("hamiltonian"), a.size)
        if not P.is_metric_norm():
            _fail("nc-egorov needs a metric-norm hamiltonian")
        return action, a, P
    if exp == "reduction":
        return _reduction_model(model)
    return None


def _reduction_model(model: dict):
    w = [int(v) for v in model.get("weight", [1, 0])]
    circle = CircleAction(w)
    terms = [(np.array(k, float), float(a), float(p)) for k, a, p in
             model.get("potential", [[[0, 1], 0.5, 0.3]])]
    H = kinetic_plus_potential(circle.dim, terms, name="kinetic+potential")
    H = H.with_invariances([circle])
    return circle, H, terms


# tables ------------------------------------------------------------------------

@dataclass
class Gate:
    name: str
    value: float
    low: float | None
    high: float | None

    @property
    def passed(self) -> bool:
        v = self.value
        if not math.isfinite(v):
            return False
        return (self.low is None or v >= self.low) and (self.high is None or v <= self.high)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "low": self.low,
                "high": self.high, "passed": self.passed}


@dataclass
class ErrorTable:
    """Detail rows ``(quantity, N, t, m, error, interior)`` and tolerance gates."""

    experiment: str
    rows: list = field(default_factory=list)
    gates: list = field(default_factory=list)

    def add(self, quantity: str, error: float, N=None, t=None, m=None, interior=True):
        error = float(error)
        if error < 0:
            raise ValueError("errors are nonnegative")
        self.rows.append((quantity, N, None if t is None else float(t), m, error,
                          bool(interior)))

    def gate(self, name: str, value: float, low=None, high=None) -> Gate:
        g = Gate(name, float(value), low, high)
        self.gates.append(g)
        return g

    @property
    def passed(self) -> bool:
        return all(g.passed for g in self.gates)

    def interior_max(self, quantity: str | None = None) -> float:
        vals = [r[4] for r in self.rows if r[5] and (quantity is None or r[0] == quantity)]
        return max(vals) if vals else 0.0

    def summary(self) -> list[dict]:
        """Interior-band maxima per ``(quantity, N, t)``; recomputable from rows."""
        groups: dict = {}
        for q, N, t, m, err, interior in self.rows:
            g = groups.setdefault((q, N, t), {"max": 0.0, "count": 0, "interior": 0})
            g["count"] += 1
            if interior:
                g["interior"] += 1
                g["max"] = max(g["max"], err)
        return [{"quantity": q, "N": N, "t": t, "interior_max": _num(v["max"]),
                 "rows": v["count"], "interior_rows": v["interior"]}
                for (q, N, t), v in groups.items()]

    def dyadic_ratios(self, quantity: str) -> list[dict]:
        """``err(2m)/err(m)`` with ``err(m)`` the max over both signs of ``m``."""
        by: dict = {}
        for q, N, t, m, err, interior in self.rows:
            if q == quantity and m is not None and interior:
                key = (N, t)
                d = by.setdefault(key, {})
                d[abs(m)] = max(d.get(abs(m), 0.0), err)
        out = []
        for (N, t), errs in by.items():
            for m in sorted(errs):
                if 2 * m in errs:
                    e0, e1 = errs[m], errs[2 * m]
                    ratio = e1 / e0 if e0 > 0 else float("nan")
                    out.append({"N": N, "t": t, "m": m, "ratio": _num(ratio)})
        return out


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


# experiments ---------------------------------------------------------------------

def _theta(model) -> np.ndarray:
    n = int(model.get("theta_grid", 256))
    return 2 * np.pi * np.arange(n) / n


def _reference_symbol(a: HomogeneousSymbol, P: CompleteSymbolOrder1, theta, m: int, t: float,
                      dt: float) -> np.ndarray:
    """Classical transport of ``a`` to mode ``m``; closed form for metric-norm ``P``."""
    if P.is_metric_norm() and not np.any(P.p0.plus.coeffs) and not np.any(P.p0.minus.coeffs):
        c = float(P.p1.plus.coeffs[0, 0, 0].real)
        s = 1 if m > 0 else -1
        return a(theta + s * c * t, m)
    return ad_transport_on_grid(a, P, theta, m, t, dt)


def run_classical_egorov(cfg: ExperimentConfig) -> ErrorTable:
    model = cfg.model
    a, P = _build_model(cfg.experiment, model)
    D = a.x_degree
    theta = _theta(model)
    dt = float(model.get("dt", 1e-3))
    table = ErrorTable(cfg.experiment)
    action = builtin_action(model["group"]) if model.get("group") else None
    sandwich_err = 0.0
    for N in model.get("N", [64, 128, 256]):
        T = Truncation(N)
        A = op_quantize(a, T)
        eig = SpectralDecomposition(build_first_order(P, T))
        for t in model.get("t", [0.5, 1.0, 2.0]):
            At = eig.evolve(A.data, float(t))
            modes = np.array([m for m in range(-N, N + 1) if m != 0])
            quantum = symbol_on_grid(At, modes, theta, T)[:, :, 0, 0]
            for i, m in enumerate(modes):
                ref = _reference_symbol(a, P, theta, int(m), float(t), dt)[:, 0, 0]
                err = np.max(np.abs(quantum[i] - ref)) / max(1.0, abs(m) ** a.degree)
                table.add("symbol", err, N, t, int(m), D < abs(m) <= N - D)
            if action is not None:
                lhs, rhs = orbifold_heisenberg(action, build_first_order(P, T), A, float(t))
                err = float(np.max(np.abs(lhs.data - rhs.data)))
                sandwich_err = max(sandwich_err, err)
                table.add("sandwich", err, N, t)
    table.gate("symbol interior max", table.interior_max("symbol"), high=cfg.tol("interior"))
    if action is not None:
        table.gate("sandwich max", sandwich_err, high=cfg.tol("sandwich"))
    return table


def _derivative_errors(a, P, points, hs, dt_factor=10):
    """Finite-difference errors of ``d/dt Ad(alpha_t)^* a`` at ``t = 0``."""
    errs = []
    for h in hs:
        worst = 0.0
        for nu in points:
            fd = (ad_transport_symbol(a, P, nu, h, dt=h / dt_factor) - a(nu.x[0], nu.xi[0])) / h
            worst = max(worst, float(np.max(np.abs(fd - transport_generator(a, P, nu)))))
        errs.append(worst)
    return errs


def run_matrix_egorov(cfg: ExperimentConfig) -> ErrorTable:
    model = cfg.model
    a, P = _build_model(cfg.experiment, model)
    D = max(a.x_degree, P.p0.x_degree, P.p1.x_degree)
    theta = _theta(model)
    dt = float(model.get("dt", 1e-3))
    table = ErrorTable(cfg.experiment)
    modes = [int(m) for m in model.get("modes", [8, 16, 32, 64])]
    for N in model.get("N", [256]):
        T = Truncation(N, d=a.size)
        A = op_quantize(a, T)
        eig = SpectralDecomposition(build_first_order(P, T))
        for t in model.get("t", [1.0]):
            At = eig.evolve(A.data, float(t))
            for m in modes:
                for s in (1, -1):
                    mm = s * m
                    q = symbol_on_grid(At, [mm], theta, T)[0]
                    ref = ad_transport_on_grid(a, P, theta, mm, float(t), dt)
                    err = np.max(np.abs(q - ref)) / max(1.0, m ** a.degree)
                    table.add("symbol", err, N, t, mm, D < m <= N - D)
    ratios = table.dyadic_ratios("symbol")
    for r in ratios:
        v = r["ratio"] if isinstance(r["ratio"], float) else float("nan")
        table.gate(f"dyadic ratio N={r['N']} t={r['t']} m={r['m']}", v,
                   low=cfg.tol("dyadic_low"), high=cfg.tol("dyadic_high"))
    hs = [float(h) for h in model.get("derivative_h", [1e-3, 1e-4])]
    rng = np.random.default_rng(cfg.seed)
    pts = [CotangentPoint([x], [xi]) for x, xi in
           zip(rng.uniform(0, 2 * np.pi, 4), [3.0, -2.0, 5.0, -7.0])]
    derrs = _derivative_errors(a, P, pts, hs)
    for h, e in zip(hs, derrs):
        table.add("derivative", e, t=h, interior=True)
    for h0, h1, e0, e1 in zip(hs, hs[1:], derrs, derrs[1:]):
        # observed convergence order log(e0/e1) / log(h0/h1); first order means 1
        order = (math.log(e0 / e1) / math.log(h0 / h1)) if e0 > 0 and e1 > 0 else float("nan")
        table.gate(f"derivative order h={h0:g}->{h1:g}", order,
                   low=cfg.tol("order_low"), high=cfg.tol("order_high"))
    return table


def _invariance_defect(P_data, action, T) -> float:
    worst = 0.0
    for k in action.group.elements:
        U = np.kron(mode_action(action, k, T.N), np.eye(T.d))
        worst = max(worst, float(np.max(np.abs(P_data @ U - U @ P_data))))
    return worst


def run_nc_egorov(cfg: ExperimentConfig) -> ErrorTable:
    model = cfg.model
    action, a, P = _build_model(cfg.experiment, model)
    D = a.x_degree
    table = ErrorTable(cfg.experiment)
    class_worst = 0.0
    for N in model.get("N", [64, 128, 256]):
        T = Truncation(N, d=a.size)
        A = crossed_quantize(a, T)
        Pm = build_first_order(P, T)
        if _invariance_defect(Pm.data, action, T) > 1e-10:
            raise InvarianceError("P~ is not invariant under the group")
        eig = SpectralDecomposition(Pm)
        for t in model.get("t", [0.5, 1.0, 2.0]):
            At = eig.evolve(A.data, float(t))
            Atm = OperatorMatrix(At, T)
            b = nc_flow_pullback(a, P, float(t))
            for m in range(-(N - D), N - D + 1):
                if abs(m) <= D:
                    continue
                comps = crossed_components_at(Atm, action, m, a.degree, D, T)
                err = max(c.max_abs_diff(b.components[k].component(m))
                          for k, c in enumerate(comps))
                table.add("component", err, N, t, m, True)
            res = class_residual(Atm, action, D, a.degree, T)
            class_worst = max(class_worst, res)
            table.add("class", res, N, t)
    table.gate("component interior max", table.interior_max("component"),
               high=cfg.tol("interior"))
    table.gate("class residual max", class_worst, high=cfg.tol("class"))
    return table


def run_reduction(cfg: ExperimentConfig) -> ErrorTable:
    model = cfg.model
    circle, H, terms = _reduction_model(model)
    table = ErrorTable(cfg.experiment)
    dt = float(model.get("dt", 1e-3))
    steps = int(model.get("steps", 10_000))
    flow = FlowConfig("leapfrog", dt=dt)
    x0 = np.array(model.get("x", [0.4, 1.1]), float)
    xi0 = np.array(model.get("xi", [0.7, -0.3]), float)

    # momentum conservation from a generic (non-conormal) point
    traj = trajectory(H, CotangentPoint(x0, xi0), steps * dt, flow, samples=101)
    J = traj.xi @ circle.generator
    table.add("momentum", np.max(np.abs(J - J[0])), t=steps * dt)

    # conormal start: remove the J-component of xi
    w = circle.generator
    xi_c = xi0 - (xi0 @ w) / (w @ w) * w
    start = CotangentPoint(x0, xi_c)
    k1 = terms[0][0]

    def obs(x, xi):
        return float((xi @ k1) * np.cos(x @ k1) + xi @ xi)

    H2 = add_momentum_square(H, circle, invariances=[circle])
    worst = {"conormal": 0.0, "dual": 0.0, "equivariance": 0.0}
    for t in model.get("t", [0.0, 1.0]):
        t = float(t)
        end = reduced_flow(H, circle, start, t, flow)
        table.add("conormal", abs(momentum_map(circle, end)), t=t)
        tr1 = trajectory(H, start, t, flow, samples=11)
        tr2 = trajectory(H2, start, t, flow, samples=11)
        v1 = evaluate_invariant_observable(obs, tr1, circle)
        v2 = evaluate_invariant_observable(obs, tr2, circle)
        dual = float(np.max(np.abs(v1 - v2)))
        eq = equivariance_residual(H, circle, start, t, flow)
        table.add("dual", dual, t=t)
        table.add("equivariance", eq, t=t)
        worst["conormal"] = max(worst["conormal"], abs(momentum_map(circle, end)))
        worst["dual"] = max(worst["dual"], dual)
        worst["equivariance"] = max(worst["equivariance"], eq)
    table.gate("momentum drift", table.interior_max("momentum"), high=cfg.tol("momentum"))
    table.gate("conormal max", worst["conormal"], high=cfg.tol("conormal"))
    table.gate("dual extension max", worst["dual"], high=cfg.tol("dual"))
    table.gate("equivariance max", worst["equivariance"], high=cfg.tol("equivariance"))
    return table


def _central(T: Truncation, margin: int) -> np.ndarray:
    idx = np.flatnonzero(np.abs(T.modes[:, 0]) <= T.N - margin)
    return (idx[:, None] * T.d + np.arange(T.d)).ravel()


def _block_diff(X, Y, idx) -> float:
    return float(np.max(np.abs((np.asarray(X) - np.asarray(Y))[np.ix_(idx, idx)])))


def algebra_residuals(action, rng: np.random.Generator, D: int, N: int, size: int = 1,
                      t: float = 0.7, s: float = 0.4) -> dict[str, float]:
    """All crossed-product identities for one random draw; returns residuals."""
    G = action.group
    f, g, h = (CrossedFunction.random(action, rng, D, size) for _ in range(3))
    unit = CrossedFunction.unit(action, size)
    res: dict[str, float] = {}
    fg = convolve(f, g)
    res["associativity"] = convolve(fg, h).max_abs_diff(convolve(f, convolve(g, h)))
    res["unit"] = max(convolve(unit, f).max_abs_diff(f), convolve(f, unit).max_abs_diff(f))
    res["involution twice"] = involution(involution(f)).max_abs_diff(f)
    res["anti-multiplicativity"] = involution(fg).max_abs_diff(
        convolve(involution(g), involution(f)))

    T = Truncation(N, d=size)
    Rf, Rg = represent(f, T), represent(g, T)
    idx = _central(T, 2 * D)
    res["R homomorphism"] = _block_diff(Rf.data @ Rg.data, represent(fg, T), idx)
    res["R involution"] = _block_diff(Rf.data.conj().T, represent(involution(f), T), idx)
    res["R unit"] = float(np.max(np.abs(represent(unit, T).data - np.eye(T.dim))))

    x = rng.uniform(0, 2 * np.pi, 16)
    Fx, Gx = fiber_represent(f, x), fiber_represent(g, x)
    res["R_x homomorphism"] = float(np.max(np.abs(Fx @ Gx - fiber_represent(fg, x))))
    res["R_x involution"] = float(np.max(np.abs(
        np.conj(np.swapaxes(Fx, -1, -2)) - fiber_represent(involution(f), x))))
    res["R_x unit"] = float(np.max(np.abs(fiber_represent(unit, x) - np.eye(G.order * size))))

    worst = 0.0
    for x0 in rng.uniform(0, 2 * np.pi, 4):
        for k in G.elements:
            g1 = GroupoidElement(action, float(x0), k)
            for l in G.elements:
                g2 = GroupoidElement(action, g1.source, l)
                prod = g1 * g2
                worst = max(worst,
                            float(abs(np.angle(np.exp(1j * (prod.target - g1.target))))),
                            float(abs(np.angle(np.exp(1j * (prod.source - g2.source))))))
    res["groupoid"] = worst

    worst = 0.0
    for m in (D + 1 + G.order, N // 2, -(D + 1 + G.order), -(N // 2)):
        comps = crossed_components_at(Rf, action, m, 0, D, T)
        worst = max(worst, max(c.max_abs_diff(f.components[k]) for k, c in enumerate(comps)))
    res["sigma(R(f)) = pullback"] = worst
    res["crossed_quantize(pullback) = R"] = float(np.max(np.abs(
        crossed_quantize(CrossedSymbol.from_function(f), T).data - Rf.data)))

    a = CrossedSymbol.random(action, rng, D, 0, size)
    b = CrossedSymbol.random(action, rng, D, 0, size)
    ab = symbol_convolve(a, b)
    AB = crossed_quantize(a, T).data @ crossed_quantize(b, T).data
    worst = 0.0
    for m in (2 * D + 1 + G.order, N // 2, -(2 * D + 1 + G.order), -(N // 2)):
        comps = crossed_components_at(OperatorMatrix(AB, T), action, m, 0, 2 * D, T)
        worst = max(worst, max(c.max_abs_diff(ab.components[k].component(m))
                               for k, c in enumerate(comps)))
    res["symbol homomorphism"] = worst

    H = HamiltonianSpec.metric_norm([1.0], invariances=[action])
    Ft = lambda z, tt=t: nc_flow_pullback(z, H, tt)  # noqa: E731
    res["F_t multiplicative"] = Ft(ab).max_abs_diff(symbol_convolve(Ft(a), Ft(b)))
    res["F_t involutive"] = Ft(symbol_involution(a)).max_abs_diff(symbol_involution(Ft(a)))
    res["F_t group law"] = nc_flow_pullback(a, H, t + s).max_abs_diff(
        nc_flow_pullback(nc_flow_pullback(a, H, s), H, t))
    res["F_0 identity"] = nc_flow_pullback(a, H, 0.0).max_abs_diff(a)

    est = reduced_norm(unit)
    res["unit norm"] = abs(est.value - 1.0)
    est = reduced_norm(f)
    res["norm refinement"] = max(0.0, est.delta - est.lipschitz * np.pi / est.Q)
    return res


def run_algebra_suite(cfg: ExperimentConfig) -> ErrorTable:
    model = cfg.model
    table = ErrorTable(cfg.experiment)
    rng = np.random.default_rng(cfg.seed)
    groups = model.get("groups", ["Z2-reflection", "Z4-rotation", "D2"])
    D = int(model.get("degree", 4))
    N = int(model.get("N", 128)) if not isinstance(model.get("N"), list) else model["N"][-1]
    trials = int(model.get("trials", 2))
    sizes = [int(v) for v in model.get("sizes", [1, 2])]
    for name in groups:
        action = builtin_action(name)
        for size in sizes:
            for _ in range(trials):
                for q, v in algebra_residuals(action, rng, D, N, size).items():
                    table.add(f"{name}: {q}", v, N, interior=True)
    table.gate("algebra residual max", table.interior_max(), high=cfg.tol("residual"))
    return table


RUNNERS = {
    "classical-egorov": run_classical_egorov,
    "matrix-egorov": run_matrix_egorov,
    "nc-egorov": run_nc_egorov,
    "reduction": run_reduction,
    "algebra-suite": run_algebra_suite,
}


def run(cfg: ExperimentConfig) -> ErrorTable:
    return RUNNERS[cfg.experiment](cfg)


# output ------------------------------------------------------------------------------

def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def detail_csv(table: ErrorTable) -> str:
    buf = io.StringIO()
    buf.write(SCHEMA + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for q, N, t, m, err, interior in table.rows:
        w.writerow([_cell(v) for v in (table.experiment, q, N, t, m, err, interior)])
    return buf.getvalue()


def detail_json(table: ErrorTable) -> str:
    rows = [dict(zip(COLUMNS, (table.experiment, q, N, t, m, _num(err), interior)))
            for q, N, t, m, err, interior in table.rows]
    return json.dumps({"schema": SCHEMA[2:], "rows": rows}, sort_keys=True, indent=1) + "\n"


def summary_dict(table: ErrorTable, cfg: ExperimentConfig) -> dict:
    out = {
        "experiment": table.experiment,
        "seed": cfg.seed,
        "passed": table.passed,
        "gates": [g.as_dict() for g in table.gates],
        "summary": table.summary(),
        "versions": {"orbiquant": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "kernel_backend": kernels.BACKEND,
        "tolerances": dict(sorted(cfg.tolerances.items())),
    }
    if table.experiment == "matrix-egorov":
        out["dyadic_ratios"] = table.dyadic_ratios("symbol")
    return out


def write_outputs(table: ErrorTable, cfg: ExperimentConfig, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if cfg.format == "csv":
        paths["detail"] = out / "detail.csv"
        paths["detail"].write_text(detail_csv(table))
    else:
        paths["detail"] = out / "detail.json"
        paths["detail"].write_text(detail_json(table))
    paths["summary"] = out / "summary.json"
    paths["summary"].write_text(json.dumps(summary_dict(table, cfg), sort_keys=True,
                                           indent=1) + "\n")
    manifest = out / "failures.json"
    if table.passed:
        if manifest.exists():
            manifest.unlink()
    else:
        failed = [g.as_dict() for g in table.gates if not g.passed]
        manifest.write_text(json.dumps({"experiment": table.experiment, "failed": failed},
                                       sort_keys=True, indent=1) + "\n")
        paths["failures"] = manifest
    return paths


def parse_detail_csv(text: str) -> list[tuple]:
    """Inverse of :func:`detail_csv` (used to recompute summaries)."""
    lines = text.splitlines()
    if not lines or lines[0] != SCHEMA:
        raise ValueError("missing or unknown schema header")
    rows = []
    for rec in csv.DictReader(lines[1:]):
        rows.append((rec["quantity"], int(rec["N"]) if rec["N"] else None,
                     float(rec["t"]) if rec["t"] else None,
                     int(rec["m"]) if rec["m"] else None, float(rec["error"]),
                     rec["interior"] == "1"))
    return rows
