"""Acceptance criteria 1-7, each at its stated tolerance and runtime budget."""
import time

import numpy as np
import pytest

from orbiquant import experiments as ex
from orbiquant.cli import main
from orbiquant.crossed_product import (CrossedSymbol, nc_flow_pullback, symbol_convolve,
                                       symbol_involution)
from orbiquant.group_actions import builtin_action
from orbiquant.symplectic_flows import HamiltonianSpec

CONFIGS = ex.builtin_configs()
pytestmark = pytest.mark.acceptance


def _timed(name, **model):
    cfg = ex.load_config(CONFIGS[name])
    cfg.model.update(model)
    start = time.perf_counter()
    table = ex.run(cfg)
    return table, time.perf_counter() - start


def _gates(table):
    return "; ".join(f"{g.name}={g.value:.3g}" for g in table.gates if not g.passed) or "all gates"


def _group(name):
    return ex.load_config(CONFIGS[name]).model["group"]


def test_criterion_1_classical_egorov(acceptance):
    table, secs = _timed("classical-egorov")
    err = table.interior_max("symbol")
    ok = err <= 1e-12 and secs <= 60 and table.passed
    acceptance(1, ok, f"interior max {err:.2e} <= 1e-12, {secs:.1f}s <= 60s")
    assert err <= 1e-12
    assert secs <= 60


def test_criterion_2_matrix_egorov(acceptance):
    table, secs = _timed("matrix-egorov")
    dyadic = [g for g in table.gates if g.name.startswith("dyadic")]
    deriv = [g for g in table.gates if g.name.startswith("derivative")]
    ratios = ", ".join(f"{g.value:.3g}" for g in dyadic)
    orders = ", ".join(f"{g.value:.3f}" for g in deriv)
    ok = table.passed and secs <= 300
    acceptance(2, ok, f"dyadic ratios [{ratios}] in [0.3, 0.8]; derivative order [{orders}] "
               f"in [0.8, 1.2]; {secs:.1f}s <= 300s")
    assert len(dyadic) == 3 and deriv
    assert all(g.passed for g in deriv)
    assert secs <= 300
    assert all(g.passed for g in dyadic), _gates(table)


def test_criterion_3_noncommutative_egorov(acceptance):
    details, ok = [], True
    total = 0.0
    for name in ("nc-egorov", "nc-egorov-z4"):
        table, secs = _timed(name)
        total += secs
        comp = table.interior_max("component")
        cls = max(r[4] for r in table.rows if r[0] == "class")
        ok &= comp <= 1e-12 and cls <= 1e-12
        details.append(f"{_group(name)}: component {comp:.2e}, class {cls:.2e}")
    ok &= total <= 120
    acceptance(3, ok, "; ".join(details) + f"; {total:.1f}s <= 120s")
    assert ok


def test_criterion_4_sandwich(acceptance):
    table, secs = _timed("sandwich")
    err = table.interior_max("sandwich")
    cfg = ex.load_config(CONFIGS["sandwich"])
    ok = err <= 1e-10 and cfg.model["N"] == [128] and cfg.model["group"] == "Z2-reflection"
    acceptance(4, ok, f"Z2 reflection N=128: max {err:.2e} <= 1e-10, {secs:.1f}s")
    assert ok


def test_criterion_5_reduction(acceptance):
    table, secs = _timed("reduction")
    mom = table.interior_max("momentum")
    con = table.interior_max("conormal")
    dual = max(r[4] for r in table.rows if r[0] == "dual" and r[2] == 1.0)
    steps = ex.load_config(CONFIGS["reduction"]).model["steps"]
    ok = mom <= 1e-12 and con <= 1e-8 and dual <= 1e-6 and steps >= 10_000
    acceptance(5, ok, f"J drift {mom:.2e} over {steps} steps, conormal {con:.2e}, "
               f"dual at t=1 {dual:.2e}; {secs:.1f}s")
    assert ok


def test_criterion_6_crossed_product_suite(acceptance):
    table, secs = _timed("algebra-suite")
    worst = table.interior_max()
    groups = set(ex.load_config(CONFIGS["algebra-suite"]).model["groups"])
    # automorphism property on a wider set of groups and times
    rng = np.random.default_rng(7)
    H = HamiltonianSpec.metric_norm()
    auto = 0.0
    for name in ("Z2-reflection", "Z4-rotation", "D2"):
        K = builtin_action(name)
        for t in (-1.3, 0.5, 2.0):
            a = CrossedSymbol.random(K, rng, 4, size=2)
            b = CrossedSymbol.random(K, rng, 4, size=2)
            F = lambda z: nc_flow_pullback(z, H, t)  # noqa: E731
            auto = max(auto, F(symbol_convolve(a, b)).max_abs_diff(symbol_convolve(F(a), F(b))),
                       F(symbol_involution(a)).max_abs_diff(symbol_involution(F(a))))
    ok = worst <= 1e-12 and auto <= 1e-12 and groups == {"Z2-reflection", "Z4-rotation", "D2"}
    acceptance(6, ok, f"algebra residual max {worst:.2e}, F_t automorphism {auto:.2e} "
               f"<= 1e-12; {secs:.1f}s")
    assert ok


def test_criterion_7_determinism(acceptance, tmp_path):
    mismatched = []
    for name, path in CONFIGS.items():
        exp = ex.load_config(path).experiment
        outs = []
        for run in ("a", "b"):
            out = tmp_path / name / run
            main(["run", exp, "--config", str(path), "--out", str(out)])
            outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if outs[0] != outs[1]:
            mismatched.append(name)
    ok = not mismatched
    acceptance(7, ok, f"{len(CONFIGS)} built-in configs run twice, byte-identical outputs"
               + (f"; mismatched: {mismatched}" if mismatched else ""))
    assert ok
