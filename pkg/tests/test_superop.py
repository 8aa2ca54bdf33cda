import numpy as np
import pytest

from qdbound.linalg import (
    expm_skew_hermitian,
    gue_hermitian,
    haar_unitary,
    random_density,
    stream,
)
from qdbound.superop import (
    OTNormEstimate,
    SuperOperator,
    commutator_generator,
    commutator_ot_norm_upper,
    conjugation_channel,
    identity_superop,
    ot_norm_lower,
    stack,
    superop_exp,
    unstack,
)


class TestStackingConvention:
    def test_stack_roundtrip(self):
        rho = np.arange(9, dtype=complex).reshape(3, 3)
        assert np.array_equal(unstack(stack(rho)), rho)

    def test_apply_matches_direct_algebra(self):
        # pins the column-stacking sign/transpose convention:
        # matrix kron(B^T, A) must implement rho -> A rho B
        rng = stream(30)
        a = gue_hermitian(3, rng) + 1j * gue_hermitian(3, rng)
        b = gue_hermitian(3, rng) + 1j * gue_hermitian(3, rng)
        rho = random_density(3, rng)
        op = SuperOperator(3, np.kron(b.T, a))
        assert np.max(np.abs(op.apply(rho) - a @ rho @ b)) < 1e-13

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            SuperOperator(3, np.eye(4, dtype=complex))
        with pytest.raises(ValueError):
            identity_superop(2).apply(np.eye(3, dtype=complex))


class TestCommutatorGenerator:
    def test_zero(self):
        l = commutator_generator(np.zeros((2, 2), dtype=complex))
        assert np.max(np.abs(l.matrix)) == 0.0

    def test_pauli_algebra(self, paulis):
        sx, sy, sz = paulis
        got = commutator_generator(sz).apply(sx)
        assert np.max(np.abs(got - 2 * sy)) < 1e-14  # -i[sz, sx] = 2 sy

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            commutator_generator(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_nested_commutator_exponential(self):
        # exp(t L) rho must equal e^{-itH} rho e^{itH}, computed independently
        for seed in range(10):
            rng = stream(31, seed)
            h = gue_hermitian(2, rng)
            rho = random_density(2, rng)
            t = 0.7
            lhs = superop_exp(commutator_generator(h), t).apply(rho)
            u = expm_skew_hermitian(h, t)
            assert np.max(np.abs(lhs - u @ rho @ u.conj().T)) < 1e-9


class TestConjugationChannel:
    def test_identity(self):
        ch = conjugation_channel(np.eye(3, dtype=complex))
        assert np.max(np.abs(ch.matrix - np.eye(9))) < 1e-14

    def test_bit_flip(self, paulis):
        sx, _, _ = paulis
        ket0 = np.diag([1.0, 0.0]).astype(complex)
        ket1 = np.diag([0.0, 1.0]).astype(complex)
        assert np.max(np.abs(conjugation_channel(sx).apply(ket0) - ket1)) < 1e-14

    def test_preserves_trace_and_hermiticity(self):
        for seed in range(100):
            rng = stream(32, seed)
            u = haar_unitary(3, rng)
            rho = random_density(3, rng)
            out = conjugation_channel(u).apply(rho)
            assert abs(np.trace(out) - 1) < 1e-12
            assert np.max(np.abs(out - out.conj().T)) < 1e-12

    def test_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            conjugation_channel(np.diag([2.0, 1.0]).astype(complex))


class TestSuperopExp:
    def test_zero_time(self):
        l = commutator_generator(gue_hermitian(2, stream(33)))
        assert np.max(np.abs(superop_exp(l, 0.0).matrix - np.eye(4))) < 1e-14

    def test_matches_conjugation_channel(self):
        for seed in range(10):
            h = gue_hermitian(3, stream(34, seed))
            t = 0.6
            via_exp = superop_exp(commutator_generator(h), t).matrix
            via_channel = conjugation_channel(expm_skew_hermitian(h, t)).matrix
            assert np.max(np.abs(via_exp - via_channel)) < 1e-9

    def test_semigroup(self):
        l = commutator_generator(gue_hermitian(2, stream(35)))
        lhs = superop_exp(l, 0.9).matrix
        rhs = superop_exp(l, 0.5).matrix @ superop_exp(l, 0.4).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-9


class TestOtNormUpper:
    def test_zero(self):
        assert commutator_ot_norm_upper(np.zeros((2, 2), dtype=complex)) == 0.0

    def test_pauli_z(self, paulis):
        _, _, sz = paulis
        assert commutator_ot_norm_upper(sz) == pytest.approx(2.0, abs=1e-14)

    def test_dominates_search_estimate(self):
        for seed in range(30):
            omega = gue_hermitian(int(stream(36, seed).integers(2, 5)), stream(37, seed))
            est = ot_norm_lower(commutator_generator(omega), samples=4, refine_iters=40, seed=seed)
            assert est.value <= commutator_ot_norm_upper(omega) + 1e-9


class TestOtNormLower:
    def test_zero_map(self):
        est = ot_norm_lower(SuperOperator(2, np.zeros((4, 4), dtype=complex)), samples=2, refine_iters=5)
        assert est.value == pytest.approx(0.0, abs=1e-14)

    def test_unitary_channels_have_norm_one(self):
        for seed in range(10):
            u = haar_unitary(3, stream(38, seed))
            est = ot_norm_lower(conjugation_channel(u), samples=4, refine_iters=30, seed=seed)
            assert 1 - 1e-6 <= est.value <= 1 + 1e-10

    def test_pauli_z_spectral_spread(self, paulis):
        # brute-force dyad grid puts the supremum at lambda_max - lambda_min = 2
        _, _, sz = paulis
        l = commutator_generator(sz)
        grid = 0.0
        thetas = np.linspace(0, np.pi, 25)
        phis = np.linspace(0, 2 * np.pi, 49)
        from qdbound._ascent_py import dyad_objective

        for t1 in thetas:
            for p1 in phis[::4]:
                u = np.array([np.cos(t1 / 2), np.exp(1j * p1) * np.sin(t1 / 2)])
                for t2 in thetas:
                    for p2 in phis[::4]:
                        v = np.array([np.cos(t2 / 2), np.exp(1j * p2) * np.sin(t2 / 2)])
                        grid = max(grid, dyad_objective(l.matrix, u, v))
        assert grid == pytest.approx(2.0, abs=2e-2)
        est = ot_norm_lower(l, samples=8, refine_iters=60, seed=0)
        assert est.value >= 2.0 - 1e-4
        assert est.value <= 2.0 + 1e-10

    def test_monotone_in_samples(self):
        l = commutator_generator(gue_hermitian(3, stream(39)))
        values = [
            ot_norm_lower(l, samples=s, refine_iters=30, seed=11).value for s in (1, 2, 4, 8)
        ]
        assert all(a <= b + 1e-15 for a, b in zip(values, values[1:]))

    def test_value_matches_attained_dyad(self):
        l = commutator_generator(gue_hermitian(2, stream(40)))
        est = ot_norm_lower(l, samples=4, refine_iters=30, seed=3)
        assert isinstance(est, OTNormEstimate)
        assert est.recompute(l) == pytest.approx(est.value, abs=1e-13)
        u, v = est.attained_at
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_unitary_invariance_of_estimates(self):
        # conjugating by unitary channels must not change the norm; at the
        # default budget the two estimates agree to the estimator scatter
        rng = stream(41)
        omega = gue_hermitian(2, rng)
        l = commutator_generator(omega)
        g1 = conjugation_channel(haar_unitary(2, rng))
        g2 = conjugation_channel(haar_unitary(2, rng))
        wrapped = g1.compose(l).compose(SuperOperator(2, g2.matrix.conj().T))
        e_plain = ot_norm_lower(l, seed=5)
        e_wrapped = ot_norm_lower(wrapped, seed=6)
        assert abs(e_plain.value - e_wrapped.value) < 1e-3

    def test_submultiplicative_probe(self):
        rng = stream(42)
        o1, o2 = gue_hermitian(2, rng), gue_hermitian(2, rng)
        l1, l2 = commutator_generator(o1), commutator_generator(o2)
        est = ot_norm_lower(l1.compose(l2), samples=6, refine_iters=50, seed=7)
        assert est.value <= commutator_ot_norm_upper(o1) * commutator_ot_norm_upper(o2) + 1e-9

    def test_invalid_samples(self):
        with pytest.raises(ValueError):
            ot_norm_lower(identity_superop(2), samples=0)
