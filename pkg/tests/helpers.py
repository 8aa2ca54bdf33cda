"""Independent oracles shared by the test modules.

These deliberately avoid the library's own computational paths: exponentials
come from a truncated Taylor series on small steps, propagators from product
integration, and Pauli bookkeeping from a symbolic (phase, label) table.
"""

from __future__ import annotations

import numpy as np

from qdbound.dynamics import Free, HamiltonianSchedule


def taylor_expm(m: np.ndarray, terms: int = 24) -> np.ndarray:
    """Plain Taylor-series exponential; accurate for small ||m||."""
    acc = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        acc = acc + term
    return acc


def trotter_propagator(sched: HamiltonianSchedule, n_steps: int = 10_000) -> np.ndarray:
    """First-order product integration of a pulse-free schedule.

    Steps are allocated per segment proportionally to duration; within a
    segment the per-step factor is a Taylor exponential, so the only shared
    machinery with the library path is complex matmul.
    """
    total = sched.total_duration
    u = np.eye(sched.dim, dtype=complex)
    for seg in sched.segments:
        if not isinstance(seg, Free):
            u = seg.u @ u
            continue
        k = max(1, int(round(n_steps * seg.duration / total)))
        step = taylor_expm(-1j * (seg.duration / k) * seg.h)
        for _ in range(k):
            u = step @ u
    return u


def trotter_time_dependent(h_at, t: float, n_steps: int = 10_000, breakpoints=()) -> np.ndarray:
    """Midpoint product integration of a time-dependent generator.

    Steps never straddle a listed breakpoint (where the generator may jump);
    between breakpoints the generator must be smooth for the midpoint rule's
    second-order accuracy to hold.
    """
    edges = [0.0] + sorted(b for b in breakpoints if 1e-12 < b < t - 1e-12) + [t]
    dim = h_at(0.0).shape[0]
    u = np.eye(dim, dtype=complex)
    for lo, hi in zip(edges, edges[1:]):
        k = max(1, int(round(n_steps * (hi - lo) / t)))
        dt = (hi - lo) / k
        for step in range(k):
            u = taylor_expm(-1j * dt * h_at(lo + (step + 0.5) * dt)) @ u
    return u


# symbolic single-qubit Pauli algebra: elements are (power-of-i phase, label)
_PAULI_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}


def pauli_product(labels: list[str]) -> tuple[int, str]:
    """Compose Paulis applied in time order (later factors multiply on the left).

    Returns (phase exponent of i modulo 4, label)."""
    phase, acc = 0, "I"
    for lab in labels:
        p, acc = _PAULI_MUL[(lab, acc)]
        phase = (phase + p) % 4
    return phase, acc
