"""Piecewise-constant time-dependent evolution.

A schedule is an ordered list of free-evolution intervals (positive duration,
Hermitian generator) and zero-width unitary pulses.  Piecewise-constant
generators are the only time-dependence model: propagators are then exact
ordered products of matrix exponentials, so no integrator error enters the
verification chain.  Continuous drives must be pre-discretized by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .linalg import (
    BRANCH_TOL,
    expm_skew_hermitian,
    logm_unitary_principal,
    require_hermitian,
    require_unitary,
    svd_values,
    unitary_branch_margin,
)
from .norms import NormKind, norm
from .reporting import CheckRecord, SlackReport

COROLLARY_SLACK_TOL = 1e-9


@dataclass(frozen=True)
class Free:
    """Free evolution under a constant Hermitian generator for ``duration``."""

    duration: float
    h: np.ndarray

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"free segment needs duration > 0, got {self.duration}")
        require_hermitian(self.h)

    @property
    def dim(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class Pulse:
    """Instantaneous (zero-width) unitary kick."""

    u: np.ndarray

    def __post_init__(self):
        require_unitary(self.u)

    @property
    def dim(self) -> int:
        return self.u.shape[0]


Segment = Union[Free, Pulse]


@dataclass(frozen=True)
class HamiltonianSchedule:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule must have at least one segment")
        dims = {s.dim for s in self.segments}
        if len(dims) != 1:
            raise ValueError(f"segments have mixed dimensions {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments if isinstance(s, Free))

    @property
    def has_pulses(self) -> bool:
        return any(isinstance(s, Pulse) for s in self.segments)

    def free_segments(self) -> list[Free]:
        return [s for s in self.segments if isinstance(s, Free)]


def schedule(*segments: Segment) -> HamiltonianSchedule:
    return HamiltonianSchedule(tuple(segments))


def constant_schedule(duration: float, h: np.ndarray) -> HamiltonianSchedule:
    return schedule(Free(duration, h))


def concatenate(a: HamiltonianSchedule, b: HamiltonianSchedule) -> HamiltonianSchedule:
    return HamiltonianSchedule(a.segments + b.segments)


def propagator(sched: HamiltonianSchedule) -> np.ndarray:
    """Time-ordered product of per-segment unitaries (later segments act on the left)."""
    u = np.eye(sched.dim, dtype=complex)
    for seg in sched.segments:
        if isinstance(seg, Free):
            u = expm_skew_hermitian(seg.h, seg.duration) @ u
        else:
            u = seg.u @ u
    return u


def _free_boundaries(sched: HamiltonianSchedule) -> list[float]:
    """Cumulative end times of free segments (pulses contribute zero width)."""
    times, t = [], 0.0
    for seg in sched.segments:
        if isinstance(seg, Free):
            t += seg.duration
        times.append(t)
    return times


def propagator_to(sched: HamiltonianSchedule, s: float) -> np.ndarray:
    """Propagator from 0 to intermediate time s <= total duration.

    At a pulse instant the pulse is taken to have already acted (pulses sit at
    the *end* of the preceding free interval's endpoint).
    """
    total = sched.total_duration
    if not 0 <= s <= total + 1e-12:
        raise ValueError(f"time {s} outside [0, {total}]")
    u = np.eye(sched.dim, dtype=complex)
    t = 0.0
    for seg in sched.segments:
        if isinstance(seg, Pulse):
            u = seg.u @ u
            continue
        if s >= t + seg.duration - 1e-15:
            u = expm_skew_hermitian(seg.h, seg.duration) @ u
            t += seg.duration
        else:
            if s > t:
                u = expm_skew_hermitian(seg.h, s - t) @ u
            return u
    return u


def hamiltonian_at(sched: HamiltonianSchedule, s: float) -> np.ndarray:
    """Generator value at time s (right-continuous; last segment at s = total)."""
    t = 0.0
    frees = sched.free_segments()
    if not frees:
        raise ValueError("schedule has no free segments")
    for seg in frees:
        if s < t + seg.duration:
            return seg.h
        t += seg.duration
    return frees[-1].h


def common_refinement(
    a: HamiltonianSchedule, b: HamiltonianSchedule
) -> tuple[HamiltonianSchedule, HamiltonianSchedule]:
    """Re-segment two pulse-free schedules onto shared breakpoints."""
    for s in (a, b):
        if s.has_pulses:
            raise ValueError("common refinement is defined for pulse-free schedules")
    if abs(a.total_duration - b.total_duration) > 1e-12:
        raise ValueError(
            f"durations differ: {a.total_duration} vs {b.total_duration}"
        )
    raw = sorted(_free_boundaries(a) + _free_boundaries(b))
    cuts: list[float] = []
    for c in raw:
        if c > 1e-13 and (not cuts or c - cuts[-1] > 1e-12):
            cuts.append(c)
    cuts[-1] = a.total_duration  # both end within 1e-12 of here

    def resegment(s: HamiltonianSchedule) -> HamiltonianSchedule:
        segs, prev = [], 0.0
        for c in cuts:
            segs.append(Free(c - prev, hamiltonian_at(s, (prev + c) / 2)))
            prev = c
        return HamiltonianSchedule(tuple(segs))

    return resegment(a), resegment(b)


def schedule_sum(a: HamiltonianSchedule, b: HamiltonianSchedule) -> HamiltonianSchedule:
    """Segment-wise sum H_a(t) + H_b(t) on the common refinement."""
    ra, rb = common_refinement(a, b)
    return HamiltonianSchedule(
        tuple(Free(x.duration, x.h + y.h) for x, y in zip(ra.segments, rb.segments))
    )


def fold_pulses(sched: HamiltonianSchedule) -> tuple[HamiltonianSchedule, np.ndarray]:
    """Toggling-frame fold: move every pulse into the free-segment generators.

    Each free segment's H is replaced by Q† H Q with Q the product of all
    preceding pulses; returns (folded pulse-free schedule, net pulse product
    Q_total).  The original propagator factorizes exactly as
    ``Q_total @ propagator(folded)``.
    """
    q = np.eye(sched.dim, dtype=complex)
    segs = []
    for seg in sched.segments:
        if isinstance(seg, Pulse):
            q = seg.u @ q
        else:
            segs.append(Free(seg.duration, q.conj().T @ seg.h @ q))
    if not segs:
        raise ValueError("cannot fold a schedule with no free segments")
    return HamiltonianSchedule(tuple(segs)), q


def interaction_picture(
    h0: HamiltonianSchedule, v: HamiltonianSchedule
) -> tuple[np.ndarray, Callable[[float], np.ndarray]]:
    """Frame with the h0 evolution removed.

    Returns the interaction propagator U0(t)† U(t) (U generated by h0 + v) and
    the function s ↦ U0(s)† V(s) U0(s).  Both schedules must be pulse-free and
    share total duration; they are re-segmented to common breakpoints.
    """
    h0r, vr = common_refinement(h0, v)
    full = schedule_sum(h0r, vr)
    u0 = propagator(h0r)
    u = propagator(full)
    u_tilde = u0.conj().T @ u

    boundaries = _free_boundaries(h0r)
    prefixes = [np.eye(h0r.dim, dtype=complex)]
    for seg in h0r.segments:
        prefixes.append(expm_skew_hermitian(seg.h, seg.duration) @ prefixes[-1])

    def h_tilde_at(s: float) -> np.ndarray:
        k, t_start = 0, 0.0
        while k < len(boundaries) - 1 and s >= boundaries[k]:
            t_start = boundaries[k]
            k += 1
        seg = h0r.segments[k]
        u0s = expm_skew_hermitian(seg.h, min(s, boundaries[k]) - t_start) @ prefixes[k]
        vs = hamiltonian_at(vr, s)
        return u0s.conj().T @ vs @ u0s

    return u_tilde, h_tilde_at


# ---------------------------------------------------------------------------
# effective Hamiltonians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EffectiveHamiltonianResult:
    """Hermitian Ω with U = exp(-i t Ω), plus how it was obtained."""

    omega: np.ndarray
    t: float
    method: str  # principal-log | magnus1 | magnus12
    branch_margin: float


def effective_hamiltonian(u: np.ndarray, t: float) -> EffectiveHamiltonianResult:
    """Ω = (principal log of U) / t; rejects eigenphases near the ±π cut."""
    if not t > 0:
        raise ValueError("t must be positive")
    margin = unitary_branch_margin(u)
    omega = logm_unitary_principal(u, BRANCH_TOL) / t
    return EffectiveHamiltonianResult(omega, t, "principal-log", margin)


def magnus_term1(sched: HamiltonianSchedule) -> np.ndarray:
    """Duration-weighted average of the segment generators (exact first term)."""
    if sched.has_pulses:
        raise ValueError("fold pulses into the toggling frame before Magnus terms")
    t = sched.total_duration
    acc = np.zeros((sched.dim, sched.dim), dtype=complex)
    for seg in sched.free_segments():
        acc += seg.duration * seg.h
    return acc / t


def magnus_term12(sched: HamiltonianSchedule) -> np.ndarray:
    """First plus second Magnus term.

    For piecewise-constant generators the nested double integral collapses to
    a sum over ordered segment pairs:
      Ω2 = (-i / 2t) Σ_{k>j} τ_k τ_j [H_k, H_j],
    since equal-segment commutators vanish.  (Checked against numerical
    quadrature of the double integral in the test suite.)
    """
    if sched.has_pulses:
        raise ValueError("fold pulses into the toggling frame before Magnus terms")
    frees = sched.free_segments()
    t = sched.total_duration
    omega2 = np.zeros((sched.dim, sched.dim), dtype=complex)
    for k in range(len(frees)):
        for j in range(k):
            hk, hj = frees[k].h, frees[j].h
            omega2 += frees[k].duration * frees[j].duration * (hk @ hj - hj @ hk)
    omega2 *= -1j / (2 * t)
    return magnus_term1(sched) + omega2


def magnus_effective_hamiltonian(
    sched: HamiltonianSchedule, order: int = 2
) -> EffectiveHamiltonianResult:
    if order == 1:
        return EffectiveHamiltonianResult(
            magnus_term1(sched), sched.total_duration, "magnus1", float("nan")
        )
    if order == 2:
        return EffectiveHamiltonianResult(
            magnus_term12(sched), sched.total_duration, "magnus12", float("nan")
        )
    raise ValueError("only orders 1 and 2 are implemented")


def schedule_effective_hamiltonian(
    sched: HamiltonianSchedule,
) -> tuple[EffectiveHamiltonianResult, bool]:
    """Effective Hamiltonian of a schedule's propagator, pulse-phase fixed.

    Pulsed schedules whose net pulse product is proportional to the identity
    (e.g. complete decoupling cycles) generate the same channel as their
    toggling-frame fold, but the stray global phase would shift every
    eigenphase of the raw propagator and poison the principal log.  For such
    schedules the log is taken of the folded propagator; otherwise of the raw
    one.  Returns (result, True-if-folded).
    """
    if sched.has_pulses:
        folded, q = fold_pulses(sched)
        phase = _identity_phase(q)
        if phase is not None:
            return effective_hamiltonian(propagator(folded), sched.total_duration), True
    return effective_hamiltonian(propagator(sched), sched.total_duration), False


def _identity_phase(q: np.ndarray, tol: float = 1e-10) -> complex | None:
    """The phase c with q = c·I (|c| = 1), or None if q is not of that form."""
    c = q[0, 0]
    if abs(abs(c) - 1.0) > tol:
        return None
    if np.max(np.abs(q - c * np.eye(q.shape[0]))) > tol:
        return None
    return complex(c)


def magnus_convergence_ok(sched: HamiltonianSchedule) -> tuple[bool, float]:
    """Sufficient (not necessary) series gate: ∫ ||H(s)||_inf ds < π."""
    if sched.has_pulses:
        raise ValueError("fold pulses into the toggling frame first")
    integral = sum(seg.duration * float(svd_values(seg.h)[0]) for seg in sched.free_segments())
    return integral < np.pi, integral


def effective_norm_check(
    h0: HamiltonianSchedule,
    v: HamiltonianSchedule,
    kind: NormKind,
    picture: str = "interaction",
) -> SlackReport:
    """Effective-generator norm versus time-averaged perturbation norm.

    Interaction picture: with Ω~ the principal-log effective Hamiltonian of
    U0† U, checks ||Ω~|| ≤ (1/t)∫||V(s)|| ds ≤ sup_s ||V(s)||.  Any Hermitian
    log of U0† U admits the averaged bound, and the principal branch has the
    smallest singular values among all branches, so the check is guaranteed
    up to round-off whenever the branch guard passes.

    Schrödinger picture: same comparison for Ω of the full evolution against
    the averaged norm of H0 + V.
    """
    if picture not in ("interaction", "schroedinger"):
        raise ValueError(f"unknown picture {picture!r}")
    t = h0.total_duration
    if picture == "interaction":
        u_tilde, _ = interaction_picture(h0, v)
        omega = effective_hamiltonian(u_tilde, t).omega
        _, pert = common_refinement(h0, v)
    else:
        full = schedule_sum(h0, v)
        omega = effective_hamiltonian(propagator(full), t).omega
        pert = full
    seg_norms = [(seg.duration, norm(seg.h, kind)) for seg in pert.free_segments()]
    avg = sum(d * n for d, n in seg_norms) / t
    sup = max(n for _, n in seg_norms)
    omega_norm = norm(omega, kind)
    return SlackReport(
        (
            CheckRecord(f"effective-norm<=avg[{kind}]", omega_norm, avg, COROLLARY_SLACK_TOL),
            CheckRecord(f"avg<=sup[{kind}]", avg, sup, COROLLARY_SLACK_TOL),
        )
    )
