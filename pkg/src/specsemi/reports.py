"""Verdict reports with witnesses, serializable with a stable field order."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Verdict:
    law: str
    ok: bool
    witness: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"law": self.law, "ok": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    subject: str
    verdicts: list[Verdict] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.ok]

    def verdict(self, law: str) -> Verdict:
        for v in self.verdicts:
            if v.law == law:
                return v
        raise KeyError(law)

    def add(self, law: str, witness: dict[str, Any] | None) -> Verdict:
        """Record ``law`` as passing when ``witness`` is None, failing otherwise."""
        v = Verdict(law, witness is None, witness)
        self.verdicts.append(v)
        return v

    def first_failure(self) -> Verdict | None:
        for v in self.verdicts:
            if not v.ok:
                return v
        return None

    def summary(self) -> str:
        bad = self.first_failure()
        if bad is None:
            return f"{self.subject}: ok"
        return f"{self.subject}: {bad.law} violated, witness {bad.witness}"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"subject": self.subject, "ok": self.ok,
                               "verdicts": [v.to_dict() for v in self.verdicts]}
        if self.info:
            out["info"] = self.info
        return out

    def to_text(self) -> str:
        lines = [f"{self.subject}: {'ok' if self.ok else 'FAILED'}"]
        for v in self.verdicts:
            line = f"  {'pass' if v.ok else 'FAIL'}  {v.law}"
            if v.witness is not None:
                line += "  witness=" + json.dumps(v.witness, ensure_ascii=False)
            lines.append(line)
        for key, value in self.info.items():
            lines.append(f"  {key}: " + json.dumps(value, ensure_ascii=False))
        return "\n".join(lines)
