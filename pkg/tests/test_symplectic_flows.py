import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbiquant.errors import (ConicSingularityError, ConvergenceError, InvarianceError,
                              NotConormalError)
from orbiquant.group_actions import TWO_PI, CircleAction, act, reflection
from orbiquant.symplectic_flows import (CotangentPoint, FlowConfig, HamiltonianSpec,
                                        add_momentum_square, equivariance_residual,
                                        evaluate_invariant_observable, hamiltonian_flow,
                                        is_conormal, kinetic_plus_potential, momentum_map,
                                        reduced_flow, trajectory, write_trajectory_csv)

EXACT = FlowConfig("exact")
LEAP = FlowConfig("leapfrog", dt=1e-3)


def _modulated_kinetic(eps=0.3):
    """Non-separable ``H = (1 + eps cos x) xi^2 / 2`` on the circle."""
    def value(x, xi):
        return (1 + eps * np.cos(x[..., 0])) * np.sum(xi ** 2, -1) / 2

    def grad_x(x, xi):
        return np.stack([-eps * np.sin(x[..., 0]) * np.sum(xi ** 2, -1) / 2], -1)

    def grad_xi(x, xi):
        return (1 + eps * np.cos(x[..., :1])) * xi

    return HamiltonianSpec.closed_form(1, value, grad_x, grad_xi, name="modulated")


def test_exact_flow_example():
    H = HamiltonianSpec.metric_norm([1.0])
    out = hamiltonian_flow(H, CotangentPoint([0.0], [3.0]), np.pi / 2)
    assert out.x[0] == pytest.approx(np.pi / 2, abs=1e-15) and out.xi[0] == 3.0


def test_flow_at_time_zero_is_identity():
    nu = CotangentPoint([1.0, 2.0], [0.5, -0.2])
    for H, cfg in [(HamiltonianSpec.metric_norm([1.0, 2.0]), EXACT),
                   (kinetic_plus_potential(2, [([1, 0], 0.3, 0.0)]), LEAP)]:
        out = hamiltonian_flow(H, nu, 0.0, cfg)
        assert np.array_equal(out.x, nu.x) and np.array_equal(out.xi, nu.xi)


def test_leapfrog_matches_exact_branch():
    H = HamiltonianSpec.metric_norm([1.0])
    nu = CotangentPoint([0.2], [-1.7])
    a = hamiltonian_flow(H, nu, 10.0, EXACT)
    b = hamiltonian_flow(H, nu, 10.0, LEAP)
    assert a.distance(b) <= 1e-9


def test_metric_norm_exact_flow_uses_metric():
    g = [2.0, 0.5]
    H = HamiltonianSpec.metric_norm(g)
    nu = CotangentPoint([0.0, 0.0], [1.0, 1.0])
    t = 0.3
    out = hamiltonian_flow(H, nu, t)
    norm = np.sqrt(1 / 2.0 + 1 / 0.5)
    expected = np.mod(t * np.array([1 / 2.0, 1 / 0.5]) / norm, TWO_PI)
    assert np.allclose(out.x, expected, atol=1e-15)
    # implicit midpoint agrees with the closed form
    mid = hamiltonian_flow(H, nu, t, FlowConfig("implicit-midpoint", dt=1e-3))
    assert mid.distance(out) <= 1e-10


def test_conic_singularity():
    H = HamiltonianSpec.metric_norm([1.0])
    with pytest.raises(ConicSingularityError):
        hamiltonian_flow(H, CotangentPoint([0.1], [0.0]), 1.0)


def test_implicit_midpoint_reports_residual():
    H = _modulated_kinetic()
    with pytest.raises(ConvergenceError) as info:
        hamiltonian_flow(H, CotangentPoint([0.3], [50.0]), 1.0,
                         FlowConfig("implicit-midpoint", dt=0.5, max_iter=2))
    assert info.value.residual > 0


def test_config_validation():
    with pytest.raises(ValueError):
        FlowConfig("rk4")
    with pytest.raises(ValueError):
        FlowConfig("leapfrog", dt=0.0)
    with pytest.raises(ValueError):
        hamiltonian_flow(_modulated_kinetic(), CotangentPoint([0.1], [1.0]), 1.0, EXACT)
    with pytest.raises(ValueError):
        hamiltonian_flow(_modulated_kinetic(), CotangentPoint([0.1], [1.0]), 1.0, LEAP)


def test_momentum_map_examples():
    c = CircleAction([1, 0])
    a = CotangentPoint([0, 0], [0, 2.5])
    b = CotangentPoint([1, 1], [3, 0])
    assert momentum_map(c, a) == 0.0 and momentum_map(c, b) == 3.0
    assert is_conormal(c, a) and not is_conormal(c, b)


@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.floats(-3, 3))
def test_momentum_map_is_linear_in_xi(v, s):
    c = CircleAction([1, 2])
    x = [0.3, 0.9]
    p, q = np.array(v[:2]), np.array(v[2:])
    lhs = momentum_map(c, CotangentPoint(x, p + s * q))
    rhs = momentum_map(c, CotangentPoint(x, p)) + s * momentum_map(c, CotangentPoint(x, q))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def _invariant_H(circle):
    return kinetic_plus_potential(2, [([0, 1], 0.5, 0.3), ([0, 2], -0.2, 1.1)],
                                  invariances=[circle])


def test_noether_over_ten_thousand_steps():
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    tr = trajectory(H, CotangentPoint([0.4, 1.1], [0.7, -0.3]), 10.0, LEAP, samples=51)
    J = tr.xi @ c.generator
    assert np.max(np.abs(J - J[0])) <= 1e-12


def test_noether_for_diagonal_weight():
    c = CircleAction([1, 1])
    H = kinetic_plus_potential(2, [([1, -1], 0.7, 0.2)], invariances=[c])
    tr = trajectory(H, CotangentPoint([0.4, 1.1], [0.7, -0.3]), 10.0, LEAP, samples=11)
    J = tr.xi @ c.generator
    assert np.max(np.abs(J - J[0])) <= 1e-12


def test_reduced_flow_preconditions():
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    with pytest.raises(NotConormalError):
        reduced_flow(H, c, CotangentPoint([0, 0], [1.0, 0.3]), 1.0, LEAP)
    bare = kinetic_plus_potential(2, [([0, 1], 0.5, 0.3)])
    with pytest.raises(InvarianceError):
        reduced_flow(bare, c, CotangentPoint([0, 0], [0.0, 0.3]), 1.0, LEAP)
    nu = CotangentPoint([0.2, 0.1], [0.0, 0.3])
    out = reduced_flow(H, c, nu, 0.0, LEAP)
    assert np.array_equal(out.x, nu.x) and np.array_equal(out.xi, nu.xi)
    assert abs(momentum_map(c, reduced_flow(H, c, nu, 1.0, LEAP))) <= 1e-9


def test_declared_invariance_is_checked():
    c = CircleAction([1, 0])
    with pytest.raises(InvarianceError):
        kinetic_plus_potential(2, [([1, 0], 0.5, 0.0)], invariances=[c])
    with pytest.raises(InvarianceError):
        kinetic_plus_potential(1, [([1], 0.5, 0.7)], invariances=[reflection()])


def test_dual_extension_agreement():
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    H2 = add_momentum_square(H, c)
    nu = CotangentPoint([0.4, 1.1], [0.0, -0.3])
    t1 = trajectory(H, nu, 1.0, LEAP)
    t2 = trajectory(H2, nu, 1.0, LEAP)
    for obs in (lambda x, xi: np.cos(x[1]), lambda x, xi: xi[1]):
        v1 = evaluate_invariant_observable(obs, t1, c)
        v2 = evaluate_invariant_observable(obs, t2, c)
        assert np.max(np.abs(v1 - v2)) <= 1e-6


def test_evaluate_invariant_observable():
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    tr = trajectory(H, CotangentPoint([0.4, 1.1], [0.7, -0.3]), 2.0, LEAP)
    assert np.all(evaluate_invariant_observable(lambda x, xi: 2.0, tr) == 2.0)
    J = evaluate_invariant_observable(lambda x, xi: xi @ c.generator, tr, c)
    assert np.ptp(J) <= 1e-12
    with pytest.raises(InvarianceError):
        evaluate_invariant_observable(lambda x, xi: np.cos(x[0]), tr, c)
    # cos x along the geodesic flow in closed form
    Hg = HamiltonianSpec.metric_norm([1.0])
    tr = trajectory(Hg, CotangentPoint([0.3], [2.0]), 1.5, EXACT)
    vals = evaluate_invariant_observable(lambda x, xi: np.cos(x[0]), tr)
    assert np.allclose(vals, np.cos(0.3 + tr.t), atol=1e-14)


def test_equivariance_exact_and_numeric():
    z2 = reflection()
    Hg = HamiltonianSpec.metric_norm([1.0], invariances=[z2])
    assert equivariance_residual(Hg, z2, CotangentPoint([0.4], [1.3]), 2.0, EXACT) <= 1e-12
    Hk = kinetic_plus_potential(1, [([1], 0.5, 0.0)], invariances=[z2])
    assert equivariance_residual(Hk, z2, CotangentPoint([0.4], [1.3]), 2.0, LEAP) <= 1e-8
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    assert equivariance_residual(H, c, CotangentPoint([0.4, 1.1], [0.7, -0.3]), 2.0, LEAP) <= 1e-8


@settings(max_examples=30)
@given(st.floats(0, TWO_PI, exclude_max=True), st.floats(0.1, 5), st.floats(0.1, 20),
       st.floats(-5, 5))
def test_metric_norm_flow_is_homogeneous(x, xi, lam, t):
    H = HamiltonianSpec.metric_norm([1.3])
    a = hamiltonian_flow(H, CotangentPoint([x], [xi]), t)
    b = hamiltonian_flow(H, CotangentPoint([x], [lam * xi]), t)
    assert np.array_equal(a.x, b.x)
    assert b.xi[0] == lam * xi


def test_flow_commutes_with_reflection_for_invariant_H():
    z2 = reflection()
    H = kinetic_plus_potential(1, [([1], 0.5, 0.0), ([2], 0.2, 0.0)], invariances=[z2])
    nu = CotangentPoint([0.7], [1.1])
    a = hamiltonian_flow(H, CotangentPoint(act(z2, 1, nu.x), -nu.xi), 3.0, LEAP)
    b = hamiltonian_flow(H, nu, 3.0, LEAP)
    assert a.distance(CotangentPoint(act(z2, 1, b.x), -b.xi)) <= 1e-8


def test_implicit_midpoint_energy():
    H = _modulated_kinetic()
    tr = trajectory(H, CotangentPoint([0.3], [1.2]), 10.0,
                    FlowConfig("implicit-midpoint", dt=2.5e-4), samples=41)
    E = np.array([H.value(tr.x[k], tr.xi[k]) for k in range(len(tr))])
    assert np.max(np.abs(E - E[0])) <= 1e-8


def test_trajectory_csv(tmp_path):
    c = CircleAction([1, 0])
    H = _invariant_H(c)
    tr = trajectory(H, CotangentPoint([0.4, 1.1], [0.7, -0.3]), 1.0, LEAP, samples=5)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, tr, H, c)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["t", "x1", "x2", "xi1", "xi2", "H", "J"]
    assert len(rows) == 6
    assert float(rows[-1][-1]) == pytest.approx(0.7, abs=1e-12)
    assert float(rows[1][5]) == pytest.approx(float(rows[-1][5]), abs=1e-6)


def test_cotangent_point_wraps():
    nu = CotangentPoint([7.0], [1.0])
    assert 0 <= nu.x[0] < TWO_PI
    with pytest.raises(ValueError):
        CotangentPoint([0.0, 1.0], [1.0])


def test_metric_norm_flow_homogeneous_in_two_dimensions():
    H = HamiltonianSpec.metric_norm([1.0, 2.0])
    rng = np.random.default_rng(7)
    for _ in range(20):
        x, xi, lam = rng.uniform(0, TWO_PI, 2), rng.normal(size=2), rng.uniform(0.1, 10)
        a = hamiltonian_flow(H, CotangentPoint(x, xi), 1.7)
        b = hamiltonian_flow(H, CotangentPoint(x, lam * xi), 1.7)
        assert np.max(np.abs(np.angle(np.exp(1j * (a.x - b.x))))) <= 1e-13
        assert np.allclose(b.xi, lam * xi, rtol=0, atol=0)
