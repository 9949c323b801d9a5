import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ringcert.errors import ConsistencyError, DomainError, ValidationError
from ringcert.rgb4 import (
    LABELS,
    Rgb4Params,
    check_junk_identity,
    coarse_grained,
    coherence_r,
    coherence_terms,
    consistency_probabilities,
    global_token_states,
    ideal_coherence,
    random_junk,
    rgb4_closed_form,
    rgb4_strategy,
)
from ringcert.ring_model import (
    TokenStrategy,
    classical_distribution,
    quantum_distribution,
    support_check,
    token_sum_predicate,
)
from ringcert.tensor_core import StateVector, random_state

thetas = st.floats(0.0, np.pi / 4)


def brute_force_rgb4(theta):
    """Oracle: six-qubit state and 4x4 party projectors written out directly."""
    u = [np.cos(theta), np.sin(theta)]
    v = [np.sin(theta), -np.cos(theta)]
    src = np.array([[0.0, 1.0], [1.0, 0.0]]) / np.sqrt(2)  # axes (R_k, L_{k+1})
    psi = np.einsum("ab,cd,ef->abcdef", src, src, src)  # R0 L1 R1 L2 R2 L0
    proj = {}
    for lab, vec in (("0", [1, 0, 0, 0]), ("2", [0, 0, 0, 1])):
        proj[lab] = np.outer(vec, vec).astype(float)
    for i in range(2):
        b = np.array([0.0, u[i], v[i], 0.0])  # (L, R) occupation: |01>, |10>
        proj[f"1_{i}"] = np.outer(b, b)
    out = {}
    for o in itertools.product(LABELS, repeat=3):
        p0, p1, p2 = (proj[l].reshape(2, 2, 2, 2) for l in o)
        t = np.einsum("FAfa,BCbc,DEde,abcdef->ABCDEF", p0, p1, p2, psi)
        out[o] = float(np.sum(t**2))
    return out


class TestParams:
    @given(thetas)
    def test_relations(self, theta):
        p = Rgb4Params(theta)
        assert p.u[0] == pytest.approx(-p.v[1])
        assert p.v[0] == pytest.approx(p.u[1])
        assert np.allclose(p.u**2 + p.v**2, 1)

    @pytest.mark.parametrize("theta", [-0.01, 0.8, float("nan")])
    def test_domain(self, theta):
        with pytest.raises(DomainError):
            Rgb4Params(theta)

    def test_split_at_quarter_pi(self):
        b = Rgb4Params(np.pi / 4).split_vector(0)
        assert np.allclose(b, np.array([0, 1, 1, 0]) / np.sqrt(2))


class TestClosedForm:
    @given(thetas)
    def test_edge_entry(self, theta):
        assert rgb4_closed_form(theta)[("1_0", "0", "2")] == pytest.approx(np.cos(theta) ** 2 / 8, abs=1e-15)

    def test_theta_zero(self):
        d = rgb4_closed_form(0.0)
        assert d[("1_0", "1_0", "1_0")] == pytest.approx(1 / 8)
        assert d[("1_1", "0", "2")] == 0.0

    @pytest.mark.parametrize("theta", [0.0, 0.2, 0.36, np.pi / 4])
    def test_normalized(self, theta):
        assert rgb4_closed_form(theta).total() == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 0.1, 0.36, 0.6, np.pi / 4])
    def test_matches_brute_force(self, theta):
        d = rgb4_closed_form(theta)
        oracle = brute_force_rgb4(theta)
        assert len(d.probabilities) == 64
        assert max(abs(p - oracle[o]) for o, p in d.items()) <= 1e-14

    def test_nonzero_count(self):
        assert len(rgb4_closed_form(0.0).support()) == 8
        assert len(rgb4_closed_form(np.pi / 4).support()) == 16

    @given(thetas)
    def test_cyclic_images(self, theta):
        d = rgb4_closed_form(theta)
        for o, p in d.items():
            assert d[(o[2], o[0], o[1])] == pytest.approx(p, abs=1e-15)

    @given(thetas)
    def test_support_and_coarse_graining(self, theta):
        d = rgb4_closed_form(theta)
        assert support_check(d, token_sum_predicate(3))
        tc = classical_distribution(TokenStrategy(3, (1, 1, 1), ((0.5, 0.5),) * 3))
        assert coarse_grained(d).max_abs_diff(tc) <= 1e-12


class TestStrategy:
    @pytest.mark.parametrize("theta", [0.1, 0.36, np.pi / 4])
    def test_simulation(self, theta):
        s = rgb4_strategy(theta)
        assert quantum_distribution(s.strategy).max_abs_diff(rgb4_closed_form(theta)) <= 1e-12

    def test_completeness(self):
        for m in rgb4_strategy(0.3).strategy.party_measurements:
            assert np.max(np.abs(sum(m.values()) - np.eye(4))) <= 1e-12

    def test_random_junk_keeps_distribution(self):
        s = rgb4_strategy(0.3, random_junk(4, ((2, 3), (1, 2), (2, 2))))
        assert check_junk_identity(s)
        # junk changes the coherence, so only the token-count marginal is fixed
        tc = classical_distribution(TokenStrategy(3, (1, 1, 1), ((0.5, 0.5),) * 3))
        assert coarse_grained(quantum_distribution(s.strategy)).max_abs_diff(tc) <= 1e-12


class TestTokenStates:
    def test_orthogonal(self):
        c, a = global_token_states(rgb4_strategy(0.3))
        assert abs(np.vdot(c.amplitudes, a.amplitudes)) <= 1e-15

    def test_locally_orthogonal(self):
        s = rgb4_strategy(0.3)
        c, a = global_token_states(s)
        tc = s.strategy.party_major_tensor(c.amplitudes)
        ta = s.strategy.party_major_tensor(a.amplitudes)
        from ringcert.tensor_core import apply_local

        for k1, k2 in itertools.combinations_with_replacement(range(3), 2):
            for l1, l2 in itertools.product(LABELS, repeat=2):
                t = apply_local(ta, s.projectors(k1)[l1], [k1])
                if k2 != k1:
                    t = apply_local(t, s.projectors(k2)[l2], [k2])
                assert abs(np.vdot(tc, t)) <= 1e-14

    def test_overlap_quarter(self):
        s = rgb4_strategy(0.3)
        c, a = global_token_states(s)
        both = (c.amplitudes + a.amplitudes) / np.sqrt(2)
        assert abs(np.vdot(both, s.strategy.global_state().amplitudes)) ** 2 == pytest.approx(0.25)

    def test_rejects_plain_strategy(self):
        with pytest.raises(ValidationError):
            global_token_states(rgb4_strategy(0.3).strategy)


class TestCoherence:
    @pytest.mark.parametrize("theta", np.linspace(0.0, np.pi / 4, 20))
    def test_ideal(self, theta):
        assert coherence_r(rgb4_strategy(theta)) == pytest.approx(2 * (np.sin(theta) * np.cos(theta)) ** 3, abs=1e-10)
        assert ideal_coherence(theta) == pytest.approx(np.sin(2 * theta) ** 3 / 4, abs=1e-15)

    def test_value_at_036(self):
        assert coherence_r(rgb4_strategy(0.36)) == pytest.approx(0.0717, abs=5e-5)

    @given(st.integers(0, 2**32 - 1))
    def test_terms_agree_with_junk(self, seed):
        terms = coherence_terms(rgb4_strategy(0.3, random_junk(seed)))
        vals = list(terms.values())
        assert len(vals) == 8 and max(vals) - min(vals) <= 1e-10

    @pytest.mark.parametrize("source", [0, 1, 2])
    def test_which_way_junk_kills_coherence(self, source):
        e0 = StateVector((2, 1), [1, 0])
        e1 = StateVector((2, 1), [0, 1])
        flat = StateVector((2, 1), [1, 0])
        junk = [(flat, flat)] * 3
        junk[source] = (e0, e1)
        assert coherence_r(rgb4_strategy(0.36, junk)) == pytest.approx(0.0, abs=1e-15)

    def test_disagreement_raises(self):
        s = rgb4_strategy(0.3)
        # a negative tolerance cannot be met, which exercises the reporting path
        with pytest.raises(ConsistencyError, match="disagree") as exc:
            coherence_r(s, tol=-1.0)
        assert str(exc.value).count("e-") + str(exc.value).count("e+") == 8


class TestConsistency:
    def test_ideal(self):
        rep = consistency_probabilities(rgb4_strategy(0.36))
        assert rep["max_residual"] <= 1e-12

    def test_with_junk(self):
        rep = consistency_probabilities(rgb4_strategy(0.2, random_junk(9)))
        assert rep["expansion"] <= 1e-12

    def test_theta_zero(self):
        assert quantum_distribution(rgb4_strategy(0.0).strategy)[("1_1", "0", "2")] == pytest.approx(0.0, abs=1e-16)
