"""Report-valued checks share one small structure: named laws plus witnesses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Witness:
    law: str
    where: tuple[tuple[str, str], ...] = ()
    detail: str = ""

    def get(self, key: str) -> str | None:
        return dict(self.where).get(key)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"law": self.law}
        out.update(dict(self.where))
        if self.detail:
            out["detail"] = self.detail
        return out

    def __str__(self) -> str:
        loc = ", ".join(f"{k}={v}" for k, v in self.where)
        return f"{self.law} [{loc}]" + (f": {self.detail}" if self.detail else "")


@dataclass
class CheckReport:
    """Outcome of an exhaustive check.

    ``passed`` holds exactly when no witness was recorded.  ``laws`` lists every
    law that was examined, so a pass is distinguishable from a vacuous run.
    ``info`` carries computed data worth reporting (tables, counts).
    """

    name: str
    laws: list[str] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.witnesses

    @property
    def counterexamples(self) -> list[Witness]:
        return self.witnesses

    def law(self, name: str) -> None:
        if name not in self.laws:
            self.laws.append(name)

    def check(self, law: str, condition: bool, detail: str = "", **where) -> bool:
        self.law(law)
        if not condition:
            self.fail(law, detail, **where)
        return bool(condition)

    def fail(self, law: str, detail: str = "", **where) -> None:
        self.law(law)
        self.witnesses.append(Witness(law, tuple((k, str(v)) for k, v in where.items()), detail))

    def failed_laws(self) -> set[str]:
        return {w.law for w in self.witnesses}

    def merge(self, other: "CheckReport", prefix: str = "") -> None:
        for law in other.laws:
            self.law(prefix + law)
        for w in other.witnesses:
            self.witnesses.append(Witness(prefix + w.law, w.where, w.detail))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "laws": list(self.laws),
            "witnesses": [w.to_dict() for w in self.witnesses],
            "info": self.info,
        }

    def __bool__(self) -> bool:
        return self.passed
