import itertools

import numpy as np
import pytest

from gptkit.composites import (
    ChshScenario,
    JointState,
    ball_measurement,
    binary_measurements,
    chsh_value,
    correlator,
    enumerate_deterministic_chsh,
    in_max_tensor,
    is_separable,
    load_scenarios,
    marginal,
    max_tensor_vertices,
    maximize_chsh,
    no_signalling_check,
    product_state,
    rows_to_csv,
    run_scenario,
    singlet_state,
    tensor,
    two_qubit_gpt,
)
from gptkit.zoo import (
    box_world_pair,
    classical_simplex,
    euclidean_ball,
    get_theory,
    polygon_theory,
    sample_ball_state,
)

BIT = classical_simplex(1)
BOX = box_world_pair()
BALL3 = euclidean_ball(3)

# 4x4 quantum oracle in the Pauli basis
_SG = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _rho2(r_a, r_b, t):
    rho = np.eye(4, dtype=complex)
    for i in range(3):
        rho += r_a[i] * np.kron(_SG[i], np.eye(2))
        rho += r_b[i] * np.kron(np.eye(2), _SG[i])
        for j in range(3):
            rho += t[i, j] * np.kron(_SG[i], _SG[j])
    return rho / 4.0


def _effect_op(v):
    return 0.5 * (np.eye(2, dtype=complex) + sum(v[k] * _SG[k] for k in range(3)))


def test_tensor_is_a_major():
    z0 = np.array([1.0, -1.0])
    assert tensor(z0, z0).tolist() == [1.0, -1.0, -1.0, 1.0]


def test_tensor_kron_identity_on_random_draws():
    rng = np.random.default_rng(21)
    for _ in range(100):
        x = rng.standard_normal(3)
        y = rng.standard_normal(4)
        e = rng.standard_normal(3)
        f = rng.standard_normal(4)
        lhs = tensor(e, f) @ tensor(x, y)
        rhs = (e @ x) * (f @ y)
        assert abs(lhs - rhs) < 1e-12


def test_unit_pairing_on_products():
    rng = np.random.default_rng(22)
    for _ in range(20):
        za = sample_ball_state(3, rng)
        zb = sample_ball_state(3, rng)
        phi = product_state(za, zb, BALL3, BALL3)
        assert abs(phi.pair_product(BALL3.unit, BALL3.unit) - 1.0) < 1e-12


def test_marginal_round_trip():
    rng = np.random.default_rng(23)
    za = sample_ball_state(3, rng)
    zb = sample_ball_state(3, rng)
    phi = product_state(za, zb, BALL3, BALL3)
    assert np.array_equal(marginal(phi, "a"), za)
    assert np.array_equal(marginal(phi, "b"), zb)
    with pytest.raises(ValueError):
        marginal(phi, "c")


def test_joint_state_validation():
    with pytest.raises(ValueError):
        JointState(np.ones(5), BIT, BIT)  # wrong length
    bad = 2.0 * tensor(BIT.states.vertices[0], BIT.states.vertices[0])
    with pytest.raises(ValueError):
        JointState(bad, BIT, BIT)
    unchecked = JointState(bad, BIT, BIT, check=False)
    assert not in_max_tensor(unchecked)


@pytest.mark.parametrize("exact", [False, True])
def test_product_states_are_separable(exact):
    phi = product_state(BIT.states.vertices[0], BIT.states.vertices[1], BIT, BIT)
    verdict = is_separable(phi, exact=exact)
    assert verdict.status == "separable"
    assert verdict.weights is not None


def test_mixtures_of_products_are_separable():
    rng = np.random.default_rng(24)
    local = polygon_theory(4)
    states = local.states.vertices
    for _ in range(5):
        weights = rng.dirichlet(np.ones(5))
        vec = sum(
            w * tensor(states[rng.integers(4)], states[rng.integers(4)])
            for w in weights
        )
        phi = JointState(vec, local, local)
        assert is_separable(phi).status == "separable"


def test_ball_local_mixed_products_separable_at_resolution():
    rng = np.random.default_rng(25)
    za = np.concatenate([[1.0], 0.5 * rng.standard_normal(3)])
    za[1:] *= 0.5 / np.linalg.norm(za[1:])
    zb = za.copy()
    phi = product_state(za, zb, BALL3, BALL3)
    verdict = is_separable(phi, k=200)
    assert verdict.status == "separable"
    assert verdict.resolution == 200


def test_deterministic_strategy_oracle():
    assert enumerate_deterministic_chsh() == 2.0


def test_maximize_chsh_classical_bit():
    result = maximize_chsh(BIT, BIT)
    assert abs(result.value - enumerate_deterministic_chsh()) < 1e-9
    exact = maximize_chsh(BIT, BIT, exact=True)
    assert abs(exact.value - 2.0) < 1e-12


def test_chsh_value_over_deterministic_product_states():
    # evaluating the scenario on the four deterministic product states
    # reproduces the 16-assignment enumeration bound
    meas = binary_measurements(BIT)[0]
    best = -np.inf
    for za in BIT.states.vertices:
        for zb in BIT.states.vertices:
            scenario = ChshScenario(
                meas, meas, meas, meas, product_state(za, zb, BIT, BIT)
            )
            best = max(best, chsh_value(scenario))
    assert abs(best - enumerate_deterministic_chsh()) < 1e-12


def test_maximize_chsh_box_world_reaches_four():
    result = maximize_chsh(BOX.local, BOX.local, BOX.measurements, BOX.measurements)
    assert abs(result.value - 4.0) < 1e-7
    assert in_max_tensor(result.witness)
    assert no_signalling_check(result.witness)
    verdict = is_separable(result.witness, exact=True)
    assert verdict.status == "entangled"
    assert verdict.margin > 1e-6


def test_maximize_chsh_ball_locals_with_resolution():
    z = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    meas = [
        ball_measurement(z),
        ball_measurement(x),
        ball_measurement(-(z + x) / np.sqrt(2.0)),
        ball_measurement((x - z) / np.sqrt(2.0)),
    ]
    result = maximize_chsh(BALL3, BALL3, meas[:2], meas[2:], k=32)
    # the singlet is feasible and reaches 2 sqrt(2) at these angles; the
    # algebraic no-signalling ceiling of 4 cannot be exceeded
    assert result.value >= 2.0 * np.sqrt(2.0) - 1e-6
    assert result.value <= 4.0 + 1e-9


# Regression constant: CHSH optimum for polygon-3 locals, computed once via
# the max-tensor LP.  The trit is a classical system, so the optimum sits at
# the deterministic bound.
POLYGON3_CHSH = 2.0


def test_maximize_chsh_polygon3_regression():
    result = maximize_chsh(polygon_theory(3), polygon_theory(3))
    assert 2.0 - 1e-9 <= result.value <= 4.0 + 1e-9
    assert abs(result.value - POLYGON3_CHSH) < 1e-7


def test_classical_locals_kill_entanglement():
    simplex = classical_simplex(2)
    result = maximize_chsh(simplex, simplex)
    assert result.value <= 2.0 + 1e-9
    for vertex in max_tensor_vertices(simplex, simplex):
        phi = JointState(vertex, simplex, simplex, check=False)
        assert is_separable(phi).status == "separable"


def test_separable_states_respect_chsh_bound():
    rng = np.random.default_rng(26)
    local = BOX.local
    states = local.states.vertices
    meas = BOX.measurements
    for _ in range(20):
        w = rng.dirichlet(np.ones(6))
        vec = sum(
            wi * tensor(states[rng.integers(4)], states[rng.integers(4)]) for wi in w
        )
        scenario = ChshScenario(
            meas[0], meas[1], meas[0], meas[1], JointState(vec, local, local)
        )
        assert chsh_value(scenario) <= 2.0 + 1e-9


def test_in_max_tensor_examples():
    phi = product_state(BIT.states.vertices[0], BIT.states.vertices[0], BIT, BIT)
    assert in_max_tensor(phi)
    doubled = JointState(2.0 * phi.vector, BIT, BIT, check=False)
    assert not in_max_tensor(doubled)


def test_no_signalling_examples():
    phi = product_state(
        BOX.local.states.vertices[0], BOX.local.states.vertices[2], BOX.local, BOX.local
    )
    assert no_signalling_check(phi)
    corrupted = phi.vector.copy()
    corrupted[-1] += 0.1
    assert not no_signalling_check(JointState(corrupted, BOX.local, BOX.local, check=False))


def test_no_signalling_on_all_box_world_vertices():
    vertices = max_tensor_vertices(BOX.local, BOX.local)
    assert len(vertices) > 0
    for v in vertices:
        phi = JointState(v, BOX.local, BOX.local, check=False)
        assert no_signalling_check(phi)
        assert in_max_tensor(phi)


def test_min_subset_of_max():
    # anything separable also lies in the maximal tensor product
    rng = np.random.default_rng(27)
    for local in (BIT, polygon_theory(5)):
        states = local.states.vertices
        for _ in range(10):
            w = rng.dirichlet(np.ones(4))
            vec = sum(
                wi * tensor(states[rng.integers(len(states))], states[rng.integers(len(states))])
                for wi in w
            )
            phi = JointState(vec, local, local)
            assert is_separable(phi).status == "separable"
            assert in_max_tensor(phi)


def test_singlet_pairings_match_quantum_oracle():
    rng = np.random.default_rng(28)
    phi = singlet_state()
    for _ in range(100):
        a = rng.standard_normal(3)
        a /= np.linalg.norm(a)
        b = rng.standard_normal(3)
        b /= np.linalg.norm(b)
        ea, _ = ball_measurement(a)
        eb, _ = ball_measurement(b)
        p_gpt = phi.pair_product(ea, eb)
        assert abs(p_gpt - 0.25 * (1.0 - a @ b)) < 1e-12
        rho = _rho2(np.zeros(3), np.zeros(3), -np.eye(3))
        p_quantum = float(np.trace(rho @ np.kron(_effect_op(a), _effect_op(b))).real)
        assert abs(p_gpt - p_quantum) < 1e-12


def test_two_qubit_gpt_pairings_match_oracle_generally():
    rng = np.random.default_rng(29)
    for _ in range(20):
        # random physical two-qubit state from a random pure 4-vector mixture
        amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        amps /= np.linalg.norm(amps)
        rho = np.outer(amps, amps.conj())
        r_a = np.array([np.trace(rho @ np.kron(_SG[i], np.eye(2))).real for i in range(3)])
        r_b = np.array([np.trace(rho @ np.kron(np.eye(2), _SG[j])).real for j in range(3)])
        t = np.array(
            [
                [np.trace(rho @ np.kron(_SG[i], _SG[j])).real for j in range(3)]
                for i in range(3)
            ]
        )
        phi = two_qubit_gpt(r_a, r_b, t)
        for _ in range(5):
            a = rng.standard_normal(3)
            a /= np.linalg.norm(a)
            b = rng.standard_normal(3)
            b /= np.linalg.norm(b)
            ea, _ = ball_measurement(a)
            eb, _ = ball_measurement(b)
            p_quantum = float(np.trace(rho @ np.kron(_effect_op(a), _effect_op(b))).real)
            assert abs(phi.pair_product(ea, eb) - p_quantum) < 1e-10


def test_two_qubit_gpt_trivial_correlations():
    phi = two_qubit_gpt(np.zeros(3), np.zeros(3), np.zeros((3, 3)))
    mixed = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(phi.vector, tensor(mixed, mixed))


def test_two_qubit_gpt_rejects_nonphysical():
    with pytest.raises(ValueError):
        two_qubit_gpt(np.zeros(3), np.zeros(3), np.eye(3))  # T = +I has no state
    with pytest.raises(ValueError):
        two_qubit_gpt(np.zeros(2), np.zeros(3), np.zeros((3, 3)))


def test_singlet_chsh_reaches_tsirelson():
    phi = singlet_state()
    z = np.array([0.0, 0.0, 1.0])
    x = np.array([1.0, 0.0, 0.0])
    scenario = ChshScenario(
        ball_measurement(z),
        ball_measurement(x),
        ball_measurement(-(z + x) / np.sqrt(2.0)),
        ball_measurement((x - z) / np.sqrt(2.0)),
        phi,
    )
    value = chsh_value(scenario)
    assert abs(value - 2.0 * np.sqrt(2.0)) < 1e-12
    # correlators match the quantum oracle E(a, b) = -a.b
    for a, b in itertools.product((z, x), ((z + x) / np.sqrt(2.0),)):
        e = correlator(phi, ball_measurement(a), ball_measurement(b))
        assert abs(e - (-(a @ b))) < 1e-12


def test_singlet_separability_is_inconclusive_at_k_but_chsh_certifies():
    phi = singlet_state()
    verdict = is_separable(phi, k=200)
    assert verdict.status == "inconclusive"
    assert verdict.resolution == 200
    assert verdict.margin > 0.05  # far outside the discretized separable set


def test_chsh_rejects_malformed_measurements():
    phi = singlet_state()
    good = ball_measurement(np.array([0.0, 0.0, 1.0]))
    bad = (good[0], good[0])
    scenario = ChshScenario(bad, good, good, good, phi)
    with pytest.raises(ValueError):
        chsh_value(scenario)


def test_binary_measurements_for_restricted_classical_sets():
    pairs = binary_measurements(classical_simplex(2))
    assert len(pairs) == 3
    u = classical_simplex(2).unit
    for plus, minus in pairs:
        assert np.allclose(plus + minus, u, atol=1e-12)


def test_scenario_round_trip_and_csv():
    docs = load_scenarios('[{"id": "box", "local_a": "polygon:4", "local_b": "polygon:4"}]')
    row = run_scenario(docs[0])
    assert row["scenario_id"] == "box"
    assert abs(row["chsh_value"] - 4.0) < 1e-6
    text = rows_to_csv([row])
    lines = text.strip().split("\n")
    assert lines[0] == "scenario_id,local_a,local_b,chsh_value,separability_verdict"
    assert lines[1].startswith("box,polygon:4,polygon:4,")


def test_scenario_with_explicit_vector():
    vec = tensor(BIT.states.vertices[0], BIT.states.vertices[1]).tolist()
    row = run_scenario(
        {"id": "prod", "local_a": "bit", "local_b": "bit", "joint_vector": vec}
    )
    assert row["separability_verdict"] == "separable"
    assert abs(row["chsh_value"]) <= 2.0 + 1e-9


def test_max_tensor_vertices_bit_pair_are_products():
    vertices = max_tensor_vertices(BIT, BIT)
    assert len(vertices) == 4
    products = [
        tensor(a, b)
        for a in BIT.states.vertices
        for b in BIT.states.vertices
    ]
    for v in vertices:
        assert any(np.max(np.abs(v - p)) < 1e-9 for p in products)
