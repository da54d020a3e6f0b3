"""Run report: a flat event log collected across pipeline stages.

Events are serializable as JSON lines, one object per warning or error,
carrying the source line number where one applies.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class ReportEvent:
    level: str  # "warning" | "error"
    stage: str
    message: str
    line: int | None = None

    def to_dict(self) -> dict:
        out = {"level": self.level, "stage": self.stage, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
        return out


@dataclass
class RunReport:
    events: list[ReportEvent] = field(default_factory=list)
    counters: dict[str, int] = field(default_factory=dict)

    def warning(self, stage: str, message: str, line: int | None = None) -> None:
        self.events.append(ReportEvent("warning", stage, message, line))

    def error(self, stage: str, message: str, line: int | None = None) -> None:
        self.events.append(ReportEvent("error", stage, message, line))

    def count(self, key: str, n: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + n

    @property
    def errors(self) -> list[ReportEvent]:
        return [e for e in self.events if e.level == "error"]

    @property
    def has_errors(self) -> bool:
        return any(e.level == "error" for e in self.events)

    def to_jsonl(self) -> str:
        return "".join(
            json.dumps(e.to_dict(), sort_keys=True, ensure_ascii=False) + "\n"
            for e in self.events
        )

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_jsonl())
