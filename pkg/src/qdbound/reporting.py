"""Slack bookkeeping shared by every inequality check in the package.

A check compares a left-hand side against a right-hand side that is supposed
to dominate it; ``slack = rhs - lhs`` may dip below zero only by round-off,
bounded by the per-check tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class BoundViolation(RuntimeError):
    """A guaranteed inequality failed beyond its round-off tolerance."""


@dataclass(frozen=True)
class CheckRecord:
    name: str
    lhs: float
    rhs: float
    tol: float = 1e-10

    def __post_init__(self):
        # numpy scalars sneak in from norm computations; pin plain floats so
        # records serialize cleanly and compare predictably
        object.__setattr__(self, "lhs", float(self.lhs))
        object.__setattr__(self, "rhs", float(self.rhs))
        object.__setattr__(self, "tol", float(self.tol))

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def ok(self) -> bool:
        return self.slack >= -self.tol

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tol": self.tol,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class SlackReport:
    checks: tuple[CheckRecord, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def worst(self) -> CheckRecord:
        if not self.checks:
            raise ValueError("empty report has no worst check")
        return min(self.checks, key=lambda c: c.slack)

    def require(self) -> "SlackReport":
        """Raise BoundViolation if any check failed; return self otherwise."""
        bad = [c for c in self.checks if not c.ok]
        if bad:
            w = min(bad, key=lambda c: c.slack)
            raise BoundViolation(
                f"{w.name}: lhs={w.lhs!r} > rhs={w.rhs!r} (slack {w.slack:.3e}, tol {w.tol:.1e})"
            )
        return self

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}
