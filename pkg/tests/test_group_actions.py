import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orbiquant.errors import GroupError
from orbiquant.group_actions import (TWO_PI, AffineIsometryAction, CircleAction, FiniteGroup,
                                     act, builtin_action, coordinate_swap, cotangent_lift,
                                     dihedral, haar_average, is_regular, isotropy, mode_action,
                                     quarter_turn, reflection, rotation, trivial, wrap)
from orbiquant.symplectic_flows import CotangentPoint

ACTIONS = [trivial(1), reflection(), rotation(4), dihedral(2), dihedral(3), rotation(5),
           quarter_turn(), coordinate_swap()]
angles = st.floats(0, TWO_PI, exclude_max=True, allow_nan=False)


def test_reflection_and_rotation_examples():
    r = reflection()
    assert act(r, 1, 1.0) == pytest.approx(TWO_PI - 1.0, abs=1e-15)
    z4 = rotation(4)
    assert act(z4, 1, 0.0) == pytest.approx(np.pi / 2, abs=1e-15)
    assert act(z4, 2, 0.0) == pytest.approx(np.pi, abs=1e-15)
    assert z4.group.mul(1, 1) == 2


@given(angles)
def test_identity_acts_trivially(x):
    for a in ACTIONS[:6]:
        assert act(a, 0, x) == pytest.approx(float(wrap(x)), abs=1e-15)


@pytest.mark.parametrize("action", ACTIONS, ids=lambda a: a.name)
def test_homomorphism(action):
    rng = np.random.default_rng(1)
    x = rng.uniform(0, TWO_PI, (100, action.dim))
    G = action.group
    for g in G.elements:
        for h in G.elements:
            lhs = act(action, g, act(action, h, x))
            rhs = act(action, G.mul(g, h), x)
            diff = np.mod(lhs - rhs + np.pi, TWO_PI) - np.pi
            assert np.max(np.abs(diff)) <= 1e-12


@pytest.mark.parametrize("action", ACTIONS, ids=lambda a: a.name)
def test_group_table_axioms(action):
    G = action.group
    t = G.table
    n = G.order
    for a in range(n):
        assert G.mul(a, G.inv(a)) == 0 and G.mul(G.inv(a), a) == 0
        for b in range(n):
            for c in range(n):
                assert t[t[a, b], c] == t[a, t[b, c]]


def test_bad_tables_and_maps_are_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(np.array([[0, 1], [0, 1]]))
    with pytest.raises(GroupError):
        FiniteGroup(np.array([[1, 0], [0, 1]]))
    # not effective: two elements acting the same way
    with pytest.raises(GroupError):
        AffineIsometryAction(FiniteGroup(np.array([[0, 1], [1, 0]])),
                             np.array([[[1]], [[1]]]), np.zeros((2, 1)))
    with pytest.raises(GroupError):
        AffineIsometryAction.from_maps([[[1]], [[2]]], [[0.0], [0.0]])
    with pytest.raises(GroupError):
        act(reflection(), 5, 0.3)
    with pytest.raises(GroupError):
        builtin_action("Z3-translation")


def test_builtin_lookup():
    assert builtin_action("Z3-rotation").order == 3
    assert builtin_action("D4").order == 8
    assert builtin_action("Z2-reflection").order == 2


def test_cotangent_lift_examples():
    nu = CotangentPoint([0.7], [2.5])
    out = cotangent_lift(reflection(), 1, nu)
    assert out.x[0] == pytest.approx(TWO_PI - 0.7) and out.xi[0] == -2.5
    out = cotangent_lift(rotation(4), 1, nu)
    assert out.x[0] == pytest.approx(0.7 + np.pi / 2) and out.xi[0] == 2.5


def _lift_map(action, g):
    A, b = action.matrices[g].astype(float), action.offsets[g]

    def f(z):
        n = action.dim
        return np.concatenate([A @ z[:n] + b, A @ z[n:]])
    return f


@pytest.mark.parametrize("action", [reflection(), dihedral(3), quarter_turn(), coordinate_swap()],
                         ids=lambda a: a.name)
def test_cotangent_lift_is_symplectic(action):
    # finite-difference Jacobian J of the lift satisfies J^T Omega J = Omega
    n = action.dim
    Om = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    rng = np.random.default_rng(2)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        z = np.concatenate([rng.uniform(0, TWO_PI, n), rng.normal(size=n)])
        for g in action.group.elements:
            f = _lift_map(action, g)
            J = np.column_stack([(f(z + h * e) - f(z - h * e)) / (2 * h) for e in np.eye(2 * n)])
            worst = max(worst, np.max(np.abs(J.T @ Om @ J - Om)))
    assert worst <= 1e-8


def test_isotropy_examples():
    r = reflection()
    assert isotropy(r, 0.0) == [0, 1]
    assert isotropy(r, np.pi) == [0, 1]
    assert isotropy(r, np.pi / 3) == [0]
    assert not is_regular(r, 0.0) and is_regular(r, np.pi / 3)
    # D_2: reflection theta -> -theta + pi fixes pi/2
    assert isotropy(dihedral(2), np.pi / 2) == [0, 3]


@pytest.mark.parametrize("action", [reflection(), dihedral(2), dihedral(3), quarter_turn()],
                         ids=lambda a: a.name)
def test_isotropy_is_a_subgroup(action):
    rng = np.random.default_rng(3)
    pts = list(rng.uniform(0, TWO_PI, (50, action.dim)))
    pts += [np.zeros(action.dim), np.full(action.dim, np.pi)]
    for x in pts:
        iso = isotropy(action, x)
        assert action.group.is_subgroup(iso)
        assert is_regular(action, x) == (len(iso) == 1)


def test_regular_points_are_generic():
    rng = np.random.default_rng(4)
    x = rng.uniform(0, TWO_PI, 1000)
    frac = np.mean([is_regular(reflection(), v) for v in x])
    assert frac >= 0.95


def test_mode_action_examples():
    N = 5
    U = mode_action(reflection(), 1, N)
    P = np.fliplr(np.eye(2 * N + 1))
    assert np.array_equal(U, P)
    alpha = np.pi / 2
    U = mode_action(rotation(4), 1, N)
    assert np.allclose(U, np.diag(np.exp(-1j * np.arange(-N, N + 1) * alpha)), atol=1e-15)


def test_mode_action_realizes_pullback_by_inverse():
    # (U_g u)(x) = u(g^{-1} x) checked on a random trigonometric polynomial
    N = 6
    rng = np.random.default_rng(5)
    c = rng.normal(size=2 * N + 1) + 1j * rng.normal(size=2 * N + 1)
    x = rng.uniform(0, TWO_PI, 20)
    E = np.exp(1j * np.outer(x, np.arange(-N, N + 1)))
    for action in (reflection(), rotation(3), dihedral(3)):
        for g in action.group.elements:
            lhs = E @ (mode_action(action, g, N) @ c)
            y = act(action, action.group.inv(g), x[:, None])[:, 0]
            rhs = np.exp(1j * np.outer(y, np.arange(-N, N + 1))) @ c
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


@pytest.mark.parametrize("action", [rotation(4), dihedral(2), quarter_turn()],
                         ids=lambda a: a.name)
def test_mode_action_is_unitary_representation(action):
    N = 4
    G = action.group
    U = [mode_action(action, g, N) for g in G.elements]
    for g in G.elements:
        assert np.allclose(U[g].conj().T, U[G.inv(g)], atol=1e-15)
        for h in G.elements:
            assert np.max(np.abs(U[g] @ U[h] - U[G.mul(g, h)])) <= 1e-12


def test_mode_action_with_representation():
    rep = np.array([np.eye(2), [[0, 1], [1, 0]]], dtype=complex)
    U = mode_action(reflection(), 1, 2, rep)
    assert U.shape == (10, 10)
    assert np.allclose(U @ U, np.eye(10))


def test_haar_average():
    z2 = reflection()
    assert haar_average(z2, [3.0, 3.0]) == 3.0
    assert haar_average(z2, [1.0, -1.0]) == 0.0
    G = dihedral(3).group
    vals = np.random.default_rng(6).normal(size=G.order)
    base = haar_average(G, vals)
    for g in G.elements:
        shifted = [vals[G.mul(g, k)] for k in G.elements]
        assert haar_average(G, shifted) == pytest.approx(base, abs=1e-15)


def test_circle_action():
    c = CircleAction([1, 0])
    assert np.allclose(c.act(0.5, [0.1, 0.2]), [0.6, 0.2])
    with pytest.raises(GroupError):
        CircleAction([2, 4])
    with pytest.raises(GroupError):
        CircleAction([0, 0])


@settings(max_examples=50)
@given(st.integers(2, 8), angles)
def test_rotation_orbit_closes(q, x):
    a = rotation(q)
    y = x
    for _ in range(q):
        y = act(a, 1, y)
    assert abs(np.angle(np.exp(1j * (y - x)))) <= 1e-12
