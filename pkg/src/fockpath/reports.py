from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    """Outcome of a bounded check.  ``bound`` is ``None`` for unbounded checks."""

    name: str
    ok: bool
    bound: Any = None
    violations: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        bound = list(self.bound) if isinstance(self.bound, tuple) else self.bound
        return {
            "check": self.name,
            "ok": self.ok,
            "bound": bound,
            "violations": self.violations,
            "details": self.details,
        }


@dataclass
class Verdict:
    """Predicate verdict: ``{predicate, verdict, witnesses, bound_used, clause}``.

    ``clause`` holds the mathematical statement the verdict is about.
    """

    predicate: str
    verdict: str
    witnesses: list = field(default_factory=list)
    bound_used: Any = None
    clause: str = ""
    evidence: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "bound_used": self.bound_used,
            "clause": self.clause,
            "evidence": self.evidence,
        }
