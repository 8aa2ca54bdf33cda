import numpy as np
import pytest
from helpers import trotter_propagator, trotter_time_dependent

from qdbound.dynamics import (
    Free,
    HamiltonianSchedule,
    Pulse,
    common_refinement,
    concatenate,
    constant_schedule,
    effective_hamiltonian,
    effective_norm_check,
    fold_pulses,
    interaction_picture,
    magnus_convergence_ok,
    magnus_effective_hamiltonian,
    magnus_term1,
    magnus_term12,
    propagator,
    propagator_to,
    schedule,
    schedule_effective_hamiltonian,
    schedule_sum,
)
from qdbound.linalg import (
    BranchCutError,
    PAULI_X,
    PAULI_Z,
    expm_skew_hermitian,
    gue_hermitian,
    stream,
    svd_values,
)
from qdbound.norms import FROBENIUS, OPERATOR, TRACE, kyfan


def _normalized(rng, d, scale=1.0):
    h = gue_hermitian(d, rng)
    return scale * h / float(svd_values(h)[0])


def _random_free_schedule(rng, d, n_seg, total, scale=1.0):
    durations = rng.uniform(0.5, 1.5, n_seg)
    durations *= total / durations.sum()
    return HamiltonianSchedule(
        tuple(Free(float(t), _normalized(rng, d, scale)) for t in durations)
    )


class TestPropagator:
    def test_single_segment(self):
        h = gue_hermitian(3, stream(50))
        assert np.allclose(
            propagator(constant_schedule(0.8, h)), expm_skew_hermitian(h, 0.8), atol=0
        )

    def test_spin_echo(self):
        # e^{-it sz} X e^{-it sz} = X: the echo cancels the free evolution
        sched = schedule(Free(0.7, PAULI_Z), Pulse(PAULI_X), Free(0.7, PAULI_Z))
        assert np.max(np.abs(propagator(sched) - PAULI_X)) < 1e-12

    def test_against_product_integration_oracle(self):
        for seed in range(10):
            rng = stream(51, seed)
            sched = _random_free_schedule(rng, 4, 3, 1.0)
            u_oracle = trotter_propagator(sched, 10_000)
            assert np.max(np.abs(propagator(sched) - u_oracle)) < 1e-6

    def test_composition_law(self):
        rng = stream(52)
        s1 = _random_free_schedule(rng, 3, 2, 0.5)
        s2 = _random_free_schedule(rng, 3, 2, 0.7)
        lhs = propagator(concatenate(s1, s2))
        assert np.max(np.abs(lhs - propagator(s2) @ propagator(s1))) < 1e-12

    def test_partial_propagator(self):
        rng = stream(53)
        sched = _random_free_schedule(rng, 2, 3, 1.2)
        assert np.allclose(propagator_to(sched, 1.2), propagator(sched), atol=1e-12)
        u_half = propagator_to(sched, 0.6)
        assert np.max(np.abs(u_half.conj().T @ u_half - np.eye(2))) < 1e-12

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            schedule(Free(1.0, PAULI_Z), Free(1.0, np.eye(3, dtype=complex)))

    def test_zero_duration_rejected(self):
        with pytest.raises(ValueError):
            Free(0.0, PAULI_Z)


class TestInteractionPicture:
    def test_zero_perturbation(self):
        rng = stream(54)
        h0 = _random_free_schedule(rng, 2, 2, 1.0)
        v = HamiltonianSchedule(
            tuple(Free(s.duration, np.zeros((2, 2), dtype=complex)) for s in h0.segments)
        )
        u_tilde, _ = interaction_picture(h0, v)
        assert np.max(np.abs(u_tilde - np.eye(2))) < 1e-12

    def test_zero_base(self):
        rng = stream(55)
        v = _random_free_schedule(rng, 2, 2, 1.0)
        h0 = HamiltonianSchedule(
            tuple(Free(s.duration, np.zeros((2, 2), dtype=complex)) for s in v.segments)
        )
        u_tilde, _ = interaction_picture(h0, v)
        assert np.max(np.abs(u_tilde - propagator(v))) < 1e-12

    def test_reconstructs_full_propagator(self):
        # U0(t) * [time-ordered integral of the rotated perturbation] = U(t)
        for seed in range(3):
            rng = stream(56, seed)
            h0 = _random_free_schedule(rng, 2, 2, 1.0)
            v = _random_free_schedule(rng, 2, 3, 1.0, scale=0.8)
            u_tilde, h_tilde_at = interaction_picture(h0, v)
            t = h0.total_duration
            cuts = np.cumsum([s.duration for s in common_refinement(h0, v)[0].segments])
            u_tilde_oracle = trotter_time_dependent(h_tilde_at, t, 10_000, breakpoints=cuts)
            full = propagator(schedule_sum(h0, v))
            assert np.max(np.abs(propagator(h0) @ u_tilde_oracle - full)) < 1e-6
            assert np.max(np.abs(u_tilde - u_tilde_oracle)) < 1e-6

    def test_requires_matching_durations(self):
        with pytest.raises(ValueError):
            interaction_picture(
                constant_schedule(1.0, PAULI_Z), constant_schedule(0.5, PAULI_X)
            )


class TestCommonRefinement:
    def test_preserves_propagator(self):
        rng = stream(57)
        a = _random_free_schedule(rng, 2, 3, 1.0)
        b = _random_free_schedule(rng, 2, 2, 1.0)
        ra, rb = common_refinement(a, b)
        assert np.max(np.abs(propagator(ra) - propagator(a))) < 1e-12
        assert np.max(np.abs(propagator(rb) - propagator(b))) < 1e-12
        assert len(ra.segments) == len(rb.segments)

    def test_schedule_sum_commutes(self):
        rng = stream(58)
        a = _random_free_schedule(rng, 2, 2, 1.0)
        b = _random_free_schedule(rng, 2, 3, 1.0)
        s1 = schedule_sum(a, b)
        s2 = schedule_sum(b, a)
        assert np.max(np.abs(propagator(s1) - propagator(s2))) < 1e-12


class TestEffectiveHamiltonian:
    def test_constant_generator(self):
        h = _normalized(stream(59), 3, 1.0)
        t = 0.9 * np.pi  # keeps ||H|| t under the branch cut
        eff = effective_hamiltonian(expm_skew_hermitian(h, t), t)
        assert np.max(np.abs(eff.omega - h)) < 1e-9
        assert eff.method == "principal-log"
        assert eff.branch_margin > 0

    def test_commuting_two_step_average(self):
        h1 = np.diag([0.3, -0.1]).astype(complex)
        h2 = np.diag([-0.2, 0.4]).astype(complex)
        sched = schedule(Free(0.5, h1), Free(0.5, h2))
        eff = effective_hamiltonian(propagator(sched), 1.0)
        assert np.max(np.abs(eff.omega - (h1 + h2) / 2)) < 1e-12

    def test_reconstruction_invariant(self):
        for seed in range(10):
            rng = stream(60, seed)
            sched = _random_free_schedule(rng, 4, 3, 0.6)
            u = propagator(sched)
            eff = effective_hamiltonian(u, sched.total_duration)
            assert np.max(np.abs(expm_skew_hermitian(eff.omega, eff.t) - u)) < 1e-8

    def test_third_order_agreement_with_magnus12(self):
        # t ||omega_log - omega_magnus12|| must shrink ~8x when t halves
        for seed in range(5):
            rng = stream(61, seed)
            ha = _normalized(rng, 2, 1.0)
            hb = _normalized(rng, 2, 1.0)

            def err(t):
                sched = schedule(Free(t / 2, ha), Free(t / 2, hb))
                omega = effective_hamiltonian(propagator(sched), t).omega
                m12 = magnus_term12(sched)
                return t * float(svd_values(omega - m12)[0])

            errs = [err(0.4 / 2**k) for k in range(4)]
            ratios = [a / b for a, b in zip(errs, errs[1:])]
            assert all(6.0 <= r <= 10.0 for r in ratios), ratios

    def test_branch_guard_propagates(self):
        with pytest.raises(BranchCutError):
            effective_hamiltonian(np.diag([np.exp(1j * (np.pi - 1e-9)), 1.0]), 1.0)

    def test_requires_positive_time(self):
        with pytest.raises(ValueError):
            effective_hamiltonian(np.eye(2, dtype=complex), 0.0)


class TestMagnusTerms:
    def test_constant(self):
        h = gue_hermitian(2, stream(62))
        sched = constant_schedule(1.3, h)
        assert np.max(np.abs(magnus_term1(sched) - h)) < 1e-14
        assert np.max(np.abs(magnus_term12(sched) - h)) < 1e-14

    def test_commuting_segments(self):
        h1 = np.diag([0.5, -0.5]).astype(complex)
        h2 = np.diag([0.2, 0.8]).astype(complex)
        sched = schedule(Free(0.4, h1), Free(0.6, h2))
        assert np.max(np.abs(magnus_term12(sched) - magnus_term1(sched))) < 1e-14

    def test_second_term_against_grid_quadrature(self):
        # cell-sum quadrature of the nested double integral, boundary-aligned
        sched = schedule(Free(0.5, PAULI_Z), Free(0.5, PAULI_X))
        t = 1.0
        n = 16
        dt = t / n
        mids = [(k + 0.5) * dt for k in range(n)]

        def h_at(s):
            return PAULI_Z if s < 0.5 else PAULI_X

        acc = np.zeros((2, 2), dtype=complex)
        for i in range(n):
            for j in range(i):
                hi, hj = h_at(mids[i]), h_at(mids[j])
                acc += (hi @ hj - hj @ hi) * dt * dt
        omega2_quad = -1j / (2 * t) * acc
        got = magnus_term12(sched) - magnus_term1(sched)
        assert np.max(np.abs(got - omega2_quad)) < 1e-12

    def test_pulses_rejected(self):
        sched = schedule(Free(0.5, PAULI_Z), Pulse(PAULI_X), Free(0.5, PAULI_Z))
        with pytest.raises(ValueError):
            magnus_term1(sched)
        with pytest.raises(ValueError):
            magnus_term12(sched)

    def test_magnus_result_wrapper(self):
        sched = constant_schedule(1.0, PAULI_Z)
        assert magnus_effective_hamiltonian(sched, 1).method == "magnus1"
        assert magnus_effective_hamiltonian(sched, 2).method == "magnus12"
        with pytest.raises(ValueError):
            magnus_effective_hamiltonian(sched, 3)


class TestFoldPulses:
    def test_factorization_identity(self):
        rng = stream(63)
        sched = schedule(
            Free(0.3, _normalized(rng, 2)),
            Pulse(PAULI_X),
            Free(0.4, _normalized(rng, 2)),
            Pulse(PAULI_Z),
            Free(0.3, _normalized(rng, 2)),
        )
        folded, net = fold_pulses(sched)
        assert not folded.has_pulses
        assert np.max(np.abs(propagator(sched) - net @ propagator(folded))) < 1e-12

    def test_norms_preserved(self):
        rng = stream(64)
        h = _normalized(rng, 2)
        sched = schedule(Free(0.5, h), Pulse(PAULI_X), Free(0.5, h))
        folded, _ = fold_pulses(sched)
        for seg in folded.free_segments():
            assert float(svd_values(seg.h)[0]) == pytest.approx(float(svd_values(h)[0]), abs=1e-12)

    def test_schedule_effective_hamiltonian_phase_fix(self):
        # net pulse product -I would push every eigenphase across the cut;
        # the folded extraction must stay well inside the principal branch
        h = 0.05 * PAULI_Z
        sched = schedule(
            Free(0.5, h), Pulse(PAULI_X), Free(0.5, h), Pulse(PAULI_X.conj().T @ -np.eye(2))
        )
        eff, folded_used = schedule_effective_hamiltonian(sched)
        assert folded_used
        assert eff.branch_margin > 1.0


class TestMagnusGate:
    def test_threshold_cases(self):
        h = PAULI_Z  # operator norm exactly 1
        ok3, i3 = magnus_convergence_ok(constant_schedule(3.0, h))
        ok4, i4 = magnus_convergence_ok(constant_schedule(4.0, h))
        assert ok3 and i3 == pytest.approx(3.0, abs=1e-12)
        assert not ok4 and i4 == pytest.approx(4.0, abs=1e-12)

    def test_piecewise_sum(self):
        sched = schedule(Free(1.0, 0.5 * PAULI_Z), Free(2.0, 0.25 * PAULI_X))
        _, integral = magnus_convergence_ok(sched)
        assert integral == pytest.approx(1.0, abs=1e-12)


class TestEffectiveNormCheck:
    def test_zero_perturbation(self):
        rng = stream(65)
        h0 = _random_free_schedule(rng, 2, 2, 1.0)
        v = HamiltonianSchedule(
            tuple(Free(s.duration, np.zeros((2, 2), dtype=complex)) for s in h0.segments)
        )
        report = effective_norm_check(h0, v, TRACE)
        assert report.ok
        assert all(abs(c.lhs) < 1e-12 and abs(c.rhs) < 1e-12 for c in report.checks)

    def test_constant_perturbation_saturates(self):
        v = constant_schedule(1.0, 0.4 * PAULI_X)
        h0 = constant_schedule(1.0, np.zeros((2, 2), dtype=complex))
        report = effective_norm_check(h0, v, OPERATOR)
        eff_check, avg_check = report.checks
        assert eff_check.lhs == pytest.approx(eff_check.rhs, abs=1e-10)
        assert avg_check.lhs == pytest.approx(avg_check.rhs, abs=1e-12)

    @pytest.mark.parametrize("kind", [TRACE, FROBENIUS, OPERATOR, kyfan(2)], ids=str)
    def test_fuzz_both_pictures(self, kind):
        for seed in range(15):
            rng = stream(66, seed)
            h0 = _random_free_schedule(rng, 4, 2, 0.8)
            v = _random_free_schedule(rng, 4, 3, 0.8, scale=0.5)
            assert effective_norm_check(h0, v, kind).ok
            assert effective_norm_check(h0, v, kind, picture="schroedinger").ok

    def test_rejects_unknown_picture(self):
        s = constant_schedule(1.0, PAULI_Z)
        with pytest.raises(ValueError):
            effective_norm_check(s, s, TRACE, picture="heisenberg")
