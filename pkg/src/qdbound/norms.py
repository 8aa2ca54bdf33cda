"""Unitarily invariant matrix norms and their inequalities.

Covers the trace, Frobenius, operator, and Ky Fan k norms, the trace/operator
duality, and the partial-trace norm inequality with its specializations.  All
four norms are computed from one SVD call so that every identity in the test
suite is checked through a single numerical pathway.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    SubsystemDims,
    adjoint,
    ginibre,
    haar_unitary,
    partial_trace_b,
    require_square,
    stream,
    svd_values,
)
from .reporting import CheckRecord, SlackReport

SLACK_TOL = 1e-10

_TAGS = ("trace", "frobenius", "operator", "kyfan")


@dataclass(frozen=True)
class NormKind:
    tag: str
    k: int | None = None

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValueError(f"unknown norm tag {self.tag!r}")
        if self.tag == "kyfan":
            if self.k is None or self.k < 1:
                raise ValueError("kyfan norm needs k >= 1")
        elif self.k is not None:
            raise ValueError(f"{self.tag} norm takes no k")

    def __str__(self) -> str:
        return f"kyfan({self.k})" if self.tag == "kyfan" else self.tag

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Parse 'trace' | 'frobenius' | 'operator' | 'kyfan:k'."""
        if text.startswith("kyfan:"):
            return cls("kyfan", int(text.split(":", 1)[1]))
        return cls(text)


TRACE = NormKind("trace")
FROBENIUS = NormKind("frobenius")
OPERATOR = NormKind("operator")


def kyfan(k: int) -> NormKind:
    return NormKind("kyfan", k)


MULTIPLICATIVE_KINDS = (TRACE, FROBENIUS, OPERATOR)


def norm(a: np.ndarray, kind: NormKind) -> float:
    """Unitarily invariant norm of ``a`` computed from its singular values."""
    s = svd_values(a)
    if kind.tag == "trace":
        return float(s.sum())
    if kind.tag == "frobenius":
        return float(np.sqrt((s**2).sum()))
    if kind.tag == "operator":
        return float(s[0]) if s.size else 0.0
    if kind.k > s.size:
        raise ValueError(f"kyfan k={kind.k} exceeds matrix side {s.size}")
    return float(s[: kind.k].sum())


def identity_norm(dim: int, kind: NormKind) -> float:
    """Closed form of ||I_dim|| for each kind: dim, sqrt(dim), 1, or k."""
    if kind.tag == "trace":
        return float(dim)
    if kind.tag == "frobenius":
        return float(np.sqrt(dim))
    if kind.tag == "operator":
        return 1.0
    if kind.k > dim:
        raise ValueError(f"kyfan k={kind.k} exceeds dim {dim}")
    return float(kind.k)


def polar_unitary(a: np.ndarray) -> np.ndarray:
    """Unitary factor W V† of the SVD; attains max_{B unitary} |Tr(B† A)| = ||A||_1."""
    w, _, vh = np.linalg.svd(require_square(a))
    return w @ vh


def check_duality(a: np.ndarray, trials: int = 100, seed: int = 0) -> SlackReport:
    """Trace/operator-norm duality on ``a``.

    Random probes B check |Tr(BA)| <= ||A||_inf ||B†||_1 and the transposed
    pairing; the polar unitary of A certifies that max_{B†B=I} |Tr(B† A)|
    equals the trace norm (checked as a two-sided slack).
    """
    a = require_square(a)
    rng = stream(seed, 0)
    a_tr, a_op = norm(a, TRACE), norm(a, OPERATOR)
    checks = []
    worst_pairing_1 = -np.inf
    worst_pairing_2 = -np.inf
    unit_max = -np.inf
    for _ in range(max(1, trials)):
        b = ginibre(a.shape[0], rng)
        val = abs(np.trace(b @ a))
        bd = adjoint(b)
        worst_pairing_1 = max(worst_pairing_1, val - a_op * norm(bd, TRACE))
        worst_pairing_2 = max(worst_pairing_2, val - norm(bd, OPERATOR) * a_tr)
        u = haar_unitary(a.shape[0], rng)
        unit_max = max(unit_max, abs(np.trace(adjoint(u) @ a)))
    checks.append(CheckRecord("pairing<=op*trace", worst_pairing_1, 0.0, SLACK_TOL))
    checks.append(CheckRecord("pairing<=trace*op", worst_pairing_2, 0.0, SLACK_TOL))
    checks.append(CheckRecord("unitary-probe<=trace-norm", unit_max, a_tr, SLACK_TOL))
    attained = abs(np.trace(adjoint(polar_unitary(a)) @ a))
    checks.append(CheckRecord("polar-attains-trace-norm", abs(attained - a_tr), 0.0, SLACK_TOL))
    return SlackReport(tuple(checks))


def partial_trace_rhs_factor(dims: SubsystemDims, kind: NormKind) -> float:
    """The d_B / ||I_B|| prefactor of the partial-trace norm inequality."""
    return dims.d_b / identity_norm(dims.d_b, kind)


def check_partial_trace_bound(
    x: np.ndarray, dims: SubsystemDims, kind: NormKind
) -> SlackReport:
    """||tr_B X|| <= (d_B/||I_B||) ||X|| for tensor-multiplicative norms.

    For trace/frobenius/operator the inequality is guaranteed and a violation
    raises.  Ky Fan norms are not multiplicative over tensor products and the
    inequality can genuinely reverse, so for them the report is returned
    without enforcement (counterexample mode).
    """
    lhs = norm(partial_trace_b(x, dims), kind)
    rhs = partial_trace_rhs_factor(dims, kind) * norm(x, kind)
    report = SlackReport((CheckRecord(f"partial-trace-{kind}", lhs, rhs, SLACK_TOL),))
    if kind.tag != "kyfan":
        report.require()
    return report
