import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringcert.errors import CapacityError, ConsistencyError, PreconditionError, ValidationError
from ringcert.rgb4 import Rgb4Params, rgb4_strategy
from ringcert.ring_model import (
    QuantumRingStrategy,
    RingLayout,
    TokenStrategy,
    binomial_probs,
    classical_distribution,
    parity_predicate,
    quantum_distribution,
    support_check,
)
from ringcert.rigidity import (
    PartyUnitary,
    build_chain_operators,
    build_party_unitary,
    canonical_ptc_strategy,
    canonical_tc_strategy,
    check_token_functions,
    factor_product_unitary,
    find_token_functions,
    lemma_chain_harness,
    locally_rotated,
    naimark_dilate_binary,
    parity_party_unitary,
    ptc_token_strategy,
    pvm_from_unitarity,
    relabel_messages,
    stabilizer_residual,
    tc_message_model,
    tc_party_unitaries,
    tc_phase,
)
from ringcert.rigidity.unitaries import rgb4_label_values
from ringcert.suites import naimark_instance, naimark_residual, noisy_instance, projective_instance
from ringcert.tensor_core import StateVector, random_state, random_unitary

seeds = st.integers(0, 2**32 - 1)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def random_ring(seed, n, dims=None):
    rng = np.random.default_rng(seed)
    d = [int(x) for x in rng.integers(2, 4, size=n)] if dims is None else [dims] * n
    states = tuple(random_state((d[k], d[k]), rng) for k in range(n))
    layout = RingLayout(n, tuple(s.dims for s in states))
    meas = tuple({"0": np.eye(layout.party_dim(k))} for k in range(n))
    s = QuantumRingStrategy(layout, states, meas)
    return s, [random_unitary(layout.party_dim(k), rng) for k in range(n)]


class TestPartyUnitary:
    def test_phase_pi_over_six(self):
        assert np.angle(tc_phase(0, 3, 3)) == pytest.approx(np.pi / 6)

    def test_projective_gives_unitary(self):
        s = canonical_tc_strategy([1, 1, 1], [(0.5, 0.5)] * 3)
        for m in s.party_measurements:
            u = build_party_unitary(m, 3, 3)
            assert np.max(np.abs(u.matrix.conj().T @ u.matrix - np.eye(len(u.matrix)))) <= 1e-12
            phases = list(u.phase_map.values())
            assert len(phases) == 3
            assert min(abs(a - b) for a, b in itertools.combinations(phases, 2)) > 0.1

    def test_all_phases_distinct(self):
        ph = [tc_phase(x, 5, 4) for x in range(6)]
        assert min(abs(a - b) for a, b in itertools.combinations(ph, 2)) > 1e-3

    def test_bad_label(self):
        with pytest.raises(ValidationError, match="integer"):
            build_party_unitary({"zero": np.eye(2)}, 2, 3)

    def test_label_out_of_range(self):
        with pytest.raises(ValidationError):
            build_party_unitary({"4": np.eye(2)}, 3, 3)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError, match="unitary"):
            PartyUnitary(np.diag([1.0, 0.5]), {0: 1.0})


class TestStabilizer:
    def test_canonical_tc(self):
        s = canonical_tc_strategy([1, 2, 1], [binomial_probs(1, 0.3), binomial_probs(2, 0.6), (0.5, 0.5)])
        assert stabilizer_residual(s, tc_party_unitaries(s, 4)) <= 1e-12

    @pytest.mark.parametrize("theta", [0.0, 0.2, 0.36, np.pi / 4])
    def test_rgb4(self, theta):
        s = rgb4_strategy(theta).strategy
        assert stabilizer_residual(s, tc_party_unitaries(s, 3, rgb4_label_values())) <= 1e-12

    def test_ptc(self):
        s = canonical_ptc_strategy([0.2, 0.7, 0.4])
        units = [parity_party_unitary(m) for m in s.party_measurements]
        assert stabilizer_residual(s, units) <= 1e-12

    def test_replaced_source(self, rng):
        s = canonical_tc_strategy([1, 1, 1], [(0.5, 0.5)] * 3)
        units = tc_party_unitaries(s, 3)
        other = random_state(s.source_states[0].dims, rng)
        bad = QuantumRingStrategy(s.layout, (other,) + s.source_states[1:], s.party_measurements)
        assert stabilizer_residual(bad, units) > 0.1

    @given(seeds)
    def test_survives_local_rotation(self, seed):
        s = locally_rotated(canonical_tc_strategy([1, 1, 2], [(0.4, 0.6), (0.5, 0.5), (0.2, 0.3, 0.5)]), seed)
        assert stabilizer_residual(s, tc_party_unitaries(s, 4)) <= 1e-12


class TestPvmCriterion:
    def test_rank_one_qubit(self):
        assert pvm_from_unitarity({"0": np.diag([1.0, 0]), "1": np.diag([0, 1.0])}, [1, -1])

    def test_noisy(self):
        eps = 0.1
        povm = {
            "0": (1 - eps) * np.diag([1.0, 0]) + eps * np.eye(2) / 2,
            "1": (1 - eps) * np.diag([0, 1.0]) + eps * np.eye(2) / 2,
        }
        assert pvm_from_unitarity(povm, [1, -1]) is False

    def test_single_outcome(self):
        assert pvm_from_unitarity({"0": np.eye(3)}, [1j])

    def test_repeated_phase(self):
        with pytest.raises(ValidationError, match="distinct"):
            pvm_from_unitarity({"0": np.diag([1.0, 0]), "1": np.diag([0, 1.0])}, [1, 1])

    def test_phase_mapping(self):
        assert pvm_from_unitarity({"a": np.diag([1.0, 0]), "b": np.diag([0, 1.0])}, {"a": 1j, "b": -1j})

    @given(seeds)
    def test_random_projective_and_noisy(self, seed):
        rng = np.random.default_rng(seed)
        assert pvm_from_unitarity(*projective_instance(rng))
        assert not pvm_from_unitarity(*noisy_instance(rng))

    def test_consistency_error_path(self):
        # not a POVM: diag(1, 1) - diag(0, 2) is unitary while E1 is not idempotent
        with pytest.raises(ConsistencyError):
            pvm_from_unitarity({"0": np.eye(2), "1": np.diag([0.0, 2.0])}, [1, -1])


class TestFactorization:
    @given(seeds)
    def test_recovers_product(self, seed):
        rng = np.random.default_rng(seed)
        v, w = random_unitary(2, rng), random_unitary(3, rng)
        got = factor_product_unitary(np.kron(v, w), (2, 3))
        assert got is not None
        a, b = got
        assert np.max(np.abs(np.kron(a, b) - np.kron(v, w))) <= 1e-8
        assert abs(np.angle(np.linalg.det(a))) <= 1e-8
        # a equals v up to a scalar
        c = np.vdot(v.ravel(), a.ravel()) / 2
        assert np.max(np.abs(a - c * v)) <= 1e-8

    def test_cnot(self):
        assert factor_product_unitary(CNOT, (2, 2)) is None

    def test_identity(self):
        a, b = factor_product_unitary(np.eye(6), (2, 3))
        assert np.allclose(a, np.eye(2)) and np.allclose(b, np.eye(3))


class TestChain:
    def test_maximally_entangled_frames(self):
        s = canonical_ptc_strategy([0.5, 0.5, 0.5])
        ch = build_chain_operators(s, [parity_party_unitary(m) for m in s.party_measurements])
        for k in range(3):
            assert np.allclose(ch.lam(k), np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("seed", range(50))
    def test_local_identities(self, seed):
        n = 3 + seed % 2
        s, units = random_ring(seed, n)
        ch = build_chain_operators(s, units)
        assert max(ch.local_residuals().values()) <= 1e-10
        ring = ch.ring_residuals()
        assert ring["g_chain"] <= 1e-10 and ring["f_chain"] <= 1e-10

    def test_operator_definitions(self):
        s, units = random_ring(3, 4, dims=2)
        ch = build_chain_operators(s, units)
        for k in range(4):
            lam2 = np.kron(ch.lam(k - 1), ch.lam(k))
            assert np.allclose(ch.g_ops[k], lam2 @ ch.frame_unitaries[k].T)
            assert np.allclose(ch.f_ops[k], ch.frame_unitaries[k].conj().T @ lam2)

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_stabilized_chain_equality(self, n):
        tokens = [1] * n
        s = locally_rotated(canonical_tc_strategy(tokens, [(0.3, 0.7)] * n), seed=n)
        ring = build_chain_operators(s, tc_party_unitaries(s, n)).ring_residuals()
        assert ring["chain_equality"] <= 1e-10

    def test_chain_equality_fails_without_stabilizer(self):
        s, units = random_ring(11, 4, dims=2)
        assert build_chain_operators(s, units).ring_residuals()["chain_equality"] > 1e-3

    def test_rank_deficient_source(self):
        s = canonical_tc_strategy([1, 1, 1], [(1.0, 0.0), (0.5, 0.5), (0.5, 0.5)])
        with pytest.raises(PreconditionError, match="source 0"):
            build_chain_operators(s, tc_party_unitaries(s, 3))


class TestLemmaHarness:
    def test_even(self):
        rep = lemma_chain_harness(1, 4, 2, "even")
        assert rep["passed"] and all(r == 1 for r in rep["schmidt_ranks"].values())
        assert len(rep["schmidt_ranks"]) == 4

    def test_odd(self):
        rep = lemma_chain_harness(2, 3, 2, "odd")
        assert rep["passed"] and all(r == 1 for r in rep["schmidt_ranks"].values())

    def test_adversarial_even(self):
        rep = lemma_chain_harness(1, 4, 2, "even", adversarial=True)
        assert rep["equality_residual"] > 0.01 and rep["passed"]

    @given(seeds, st.sampled_from([3, 4, 5, 6]), st.integers(2, 3))
    def test_honest_property(self, seed, n, d):
        rep = lemma_chain_harness(seed, n, d)
        assert rep["equality_residual"] <= 1e-10
        assert rep["factor_residual"] <= 1e-8

    def test_parity_mismatch(self):
        from ringcert.errors import DomainError

        with pytest.raises(DomainError):
            lemma_chain_harness(0, 4, 2, "odd")


class TestNaimark:
    def test_projective_input(self):
        e0 = np.diag([1.0, 0.0, 0.0])
        e1 = np.diag([0.0, 1.0, 0.0])
        nd = naimark_dilate_binary(e0, e1)
        assert set(np.round(nd.weights, 12)) <= {0.0, 1.0}
        assert np.allclose(nd.compress(0), e0, atol=1e-12)

    def test_half_split(self):
        pi = np.diag([1.0, 1.0, 0.0])
        nd = naimark_dilate_binary(pi / 2, pi / 2)
        assert np.allclose(nd.weights, 0.5)
        assert np.allclose(nd.compress(1), pi / 2, atol=1e-12)

    @pytest.mark.parametrize("theta", [0.1, 0.36, np.pi / 4])
    def test_rgb4_split(self, theta):
        par = Rgb4Params(theta)
        b0, b1 = par.split_vector(0), par.split_vector(1)
        assert naimark_residual(np.outer(b0, b0), np.outer(b1, b1)) <= 1e-12

    @given(seeds)
    def test_random(self, seed):
        assert naimark_residual(*naimark_instance(np.random.default_rng(seed))) <= 1e-12

    def test_not_a_projector(self):
        with pytest.raises(ValidationError, match="projector"):
            naimark_dilate_binary(0.3 * np.eye(2), 0.3 * np.eye(2))


class TestTokens:
    def test_identity_on_canonical(self):
        ts = TokenStrategy(3, (1, 1, 1), ((0.5, 0.5),) * 3)
        joint, resp = tc_message_model(ts)
        tf = find_token_functions(joint, resp, ts.tokens, ts.send_right_probs)
        assert tf.right == ((0, 1),) * 3 and tf.left == ((0, 1),) * 3
        assert all(check_token_functions(tf, joint, resp, ts.tokens, ts.send_right_probs).values())

    @given(seeds)
    def test_inverse_relabeling(self, seed):
        rng = np.random.default_rng(seed)
        tokens = tuple(int(x) for x in rng.integers(1, 3, size=3))
        ts = TokenStrategy(3, tokens, tuple(binomial_probs(t, 0.37) for t in tokens))
        joint, resp = tc_message_model(ts)
        rp = [list(rng.permutation(t + 1)) for t in tokens]
        lp = [list(rng.permutation(tokens[(k - 1) % 3] + 1)) for k in range(3)]
        j2, r2 = relabel_messages(joint, resp, rp, lp)
        tf = find_token_functions(j2, r2, tokens, ts.send_right_probs)
        for k in range(3):
            for i in range(tokens[k] + 1):
                assert tf.right[k][rp[k][i]] == i
            for j in range(tokens[(k - 1) % 3] + 1):
                assert tf.left[k][lp[k][j]] == j

    def test_uniform_xor_has_none(self):
        joint = [np.full((2, 2), 0.25)] * 3
        resp = [np.array([[0, 1], [1, 0]])] * 3
        assert find_token_functions(joint, resp, (1, 1, 1)) is None

    def test_capacity(self):
        joint = [np.full((6, 6), 1 / 36)] * 3
        resp = [np.zeros((6, 6), dtype=int)] * 3
        with pytest.raises(CapacityError):
            find_token_functions(joint, resp, (1, 1, 1))

    def test_wrong_distribution(self):
        ts = TokenStrategy(3, (1, 1, 1), ((0.5, 0.5),) * 3)
        joint, resp = tc_message_model(ts)
        assert find_token_functions(joint, resp, ts.tokens, [(0.9, 0.1)] * 3) is None


class TestCanonical:
    @given(
        st.lists(st.integers(0, 2), min_size=3, max_size=4),
        st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4),
    )
    def test_tc_matches_classical(self, tokens, q):
        n = len(tokens)
        probs = [binomial_probs(t, q[k]) for k, t in enumerate(tokens)]
        s = canonical_tc_strategy(tokens, probs)
        for stt in s.source_states:
            assert abs(np.linalg.norm(stt.amplitudes) - 1) <= 1e-12
        cl = classical_distribution(TokenStrategy(n, tuple(tokens), tuple(probs)))
        assert quantum_distribution(s).max_abs_diff(cl) <= 1e-12

    def test_tc_with_junk(self, rng):
        junk = [[random_state((2, 2), rng) for _ in range(2)] for _ in range(3)]
        s = canonical_tc_strategy([1, 1, 1], [(0.3, 0.7)] * 3, junk)
        cl = classical_distribution(TokenStrategy(3, (1, 1, 1), ((0.3, 0.7),) * 3))
        assert quantum_distribution(s).max_abs_diff(cl) <= 1e-12
        assert stabilizer_residual(s, tc_party_unitaries(s, 3)) <= 1e-12

    @given(st.lists(st.floats(0.0, 1.0), min_size=3, max_size=4))
    def test_ptc(self, p):
        s = canonical_ptc_strategy(p)
        d = quantum_distribution(s)
        assert support_check(d, parity_predicate(len(p) % 2))
        assert d.max_abs_diff(classical_distribution(ptc_token_strategy(p))) <= 1e-12

    def test_ptc_point_mass(self):
        d = quantum_distribution(canonical_ptc_strategy([1, 1, 1]))
        assert d[("1", "1", "1")] == pytest.approx(1.0)

    def test_ptc_degenerate_flag(self):
        assert canonical_ptc_strategy([0.5, 0.2, 0.5]).metadata["degenerate_sources"] == [0, 2]

    def test_bad_probs(self):
        with pytest.raises(ValidationError):
            canonical_tc_strategy([1, 1, 1], [(0.5, 0.4)] * 3)
