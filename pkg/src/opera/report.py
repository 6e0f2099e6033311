"""Verification reports and their text, LaTeX and JSON renderings."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    id: str
    status: str
    detail: str = ""

    def __post_init__(self):
        if self.status not in ("pass", "fail"):
            raise ValueError(f"status must be pass or fail, got {self.status!r}")

    @classmethod
    def of(cls, id: str, ok: bool, detail: str = "") -> "Check":
        return cls(id, "pass" if ok else "fail", detail)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def exit_status(self) -> int:
        return 0 if all(c.passed for c in self.checks) else 1

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "checks": [{"id": c.id, "status": c.status, "detail": c.detail} for c in self.checks],
            "config": dict(self.config),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [f"suite: {self.suite}"]
        width = max((len(c.id) for c in self.checks), default=0)
        for c in self.checks:
            line = f"  [{c.status.upper()}] {c.id.ljust(width)}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line.rstrip())
        passed = sum(c.passed for c in self.checks)
        lines.append(f"{passed}/{len(self.checks)} checks passed")
        return "\n".join(lines)

    def to_latex(self) -> str:
        rows = [r"\begin{tabular}{lll}", r"\hline", r"check & status & detail \\", r"\hline"]
        for c in self.checks:
            rows.append(f"{_tex_escape(c.id)} & {c.status} & {_tex_escape(c.detail)} \\\\")
        rows += [r"\hline", r"\end{tabular}"]
        return "\n".join(rows)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "latex":
            return self.to_latex()
        return self.to_text()


_TEX = {"\\": r"\textbackslash{}", "&": r"\&", "%": r"\%", "$": r"\$", "#": r"\#", "_": r"\_",
        "{": r"\{", "}": r"\}", "~": r"\textasciitilde{}", "^": r"\^{}"}


def _tex_escape(s: str) -> str:
    return "".join(_TEX.get(ch, ch) for ch in s)
