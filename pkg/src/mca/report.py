"""Law-check reports: one line per law plus a JSON summary."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field


class Verdict(str, enum.Enum):
    EXACT = "exact-pass"
    SAMPLED = "sampled-pass"
    FAIL = "fail"
    UNKNOWN = "indeterminate"

    @property
    def ok(self) -> bool:
        return self in (Verdict.EXACT, Verdict.SAMPLED)


@dataclass
class LawTally:
    law: str
    exact: int = 0
    sampled: int = 0
    failed: int = 0
    unknown: int = 0
    skipped: int = 0
    witness: str | None = None

    def record(self, verdict: Verdict, witness=None) -> None:
        """Count one instance; ``witness`` may be a string or a thunk producing one."""
        if verdict is Verdict.EXACT:
            self.exact += 1
        elif verdict is Verdict.SAMPLED:
            self.sampled += 1
        elif verdict is Verdict.FAIL:
            self.failed += 1
            if self.witness is None and witness is not None:
                self.witness = str(witness() if callable(witness) else witness)
        else:
            self.unknown += 1

    def check(self, holds: bool, witness=None, exact: bool = True) -> None:
        if holds:
            self.record(Verdict.EXACT if exact else Verdict.SAMPLED)
        else:
            self.record(Verdict.FAIL, witness)

    @property
    def passed(self) -> int:
        return self.exact + self.sampled

    @property
    def status(self) -> str:
        if self.failed:
            return "FAIL"
        if self.passed == 0 and self.unknown:
            return "UNKNOWN"
        return "PASS"

    def line(self) -> str:
        parts = [f"{self.status:7} {self.law}", f"pass={self.passed}"]
        if self.sampled:
            parts.append(f"sampled={self.sampled}")
        parts.append(f"fail={self.failed}")
        if self.unknown:
            parts.append(f"indeterminate={self.unknown}")
        if self.skipped:
            parts.append(f"skipped={self.skipped}")
        if self.witness is not None:
            parts.append(f"witness={self.witness}")
        return "  ".join(parts)


@dataclass
class Report:
    title: str
    laws: dict[str, LawTally] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def law(self, name: str) -> LawTally:
        if name not in self.laws:
            self.laws[name] = LawTally(name)
        return self.laws[name]

    def merge(self, other: "Report") -> "Report":
        for name, t in other.laws.items():
            mine = self.law(name)
            mine.exact += t.exact
            mine.sampled += t.sampled
            mine.failed += t.failed
            mine.unknown += t.unknown
            mine.skipped += t.skipped
            if mine.witness is None:
                mine.witness = t.witness
        self.notes.extend(other.notes)
        return self

    @property
    def ok(self) -> bool:
        return all(t.failed == 0 for t in self.laws.values())

    @property
    def verdict(self) -> Verdict:
        if not self.ok:
            return Verdict.FAIL
        if any(t.passed == 0 and t.unknown for t in self.laws.values()):
            return Verdict.UNKNOWN
        if any(t.sampled for t in self.laws.values()):
            return Verdict.SAMPLED
        return Verdict.EXACT

    def failing(self) -> str | None:
        """``law: witness`` for the first failing law, if any."""
        for name, t in self.laws.items():
            if t.failed:
                return f"{name}: {t.witness}"
        return None

    def lines(self) -> list[str]:
        out = [f"== {self.title}"]
        out.extend(self.laws[k].line() for k in self.laws)
        out.extend(f"note: {n}" for n in self.notes)
        return out

    def text(self) -> str:
        return "\n".join(self.lines())

    def summary(self) -> dict:
        return {
            "report": self.title,
            "verdict": self.verdict.value,
            "laws": {
                k: {
                    "pass": t.passed,
                    "sampled": t.sampled,
                    "fail": t.failed,
                    "indeterminate": t.unknown,
                    "skipped": t.skipped,
                    "witness": t.witness,
                }
                for k, t in self.laws.items()
            },
        }

    def json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)
