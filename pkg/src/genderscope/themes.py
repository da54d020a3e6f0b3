"""Analyst theme assignments over gendered term lists.

Themes group terms by hand. Every mutation is an event: it bumps the
ledger revision, stamps the affected themes, and can be appended to an
audit log whose replay reproduces the ledger state exactly. Concurrent
editors are serialized optimistically: a mutation names the revision it
was based on and is refused when the ledger has moved past it.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

from .errors import DataError, NotFoundError, StaleRevisionError
from .gender import GENDERED, Gender

LEDGER_FORMAT = "genderscope-ledger"
LEDGER_VERSION = 1


@dataclass
class Theme:
    name: str
    gender: Gender
    terms: set[str] = field(default_factory=set)           # direct assignments
    indirect_terms: set[str] = field(default_factory=set)  # related, bracketed in print
    notes: str = ""
    created: str = ""   # ISO-8601, supplied by the mutation event
    modified: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "gender": self.gender.value,
            "terms": sorted(self.terms),
            "indirect_terms": sorted(self.indirect_terms),
            "notes": self.notes,
            "created": self.created,
            "modified": self.modified,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Theme":
        return cls(
            name=data["name"],
            gender=Gender(data["gender"]),
            terms=set(data.get("terms", ())),
            indirect_terms=set(data.get("indirect_terms", ())),
            notes=data.get("notes", ""),
            created=data.get("created", ""),
            modified=data.get("modified", ""),
        )


def _require_name(value: str, what: str) -> str:
    value = value.strip()
    if not value:
        raise DataError(f"{what} must not be empty")
    return value


@dataclass
class ThemeLedger:
    """All themes for one run, with a monotonically increasing revision."""

    run_id: str = ""
    revision: int = 0
    themes: dict[str, Theme] = field(default_factory=dict)

    # -- event application -------------------------------------------------

    def apply(self, event: dict) -> None:
        """Apply one mutation event. Replaying a log calls this repeatedly."""
        op = event.get("op")
        handler = getattr(self, f"_apply_{str(op).replace('-', '_')}", None)
        if handler is None:
            raise DataError(f"unknown ledger event {op!r}")
        handler(event)
        self.revision += 1

    def _theme(self, name: str) -> Theme:
        try:
            return self.themes[name]
        except KeyError:
            raise NotFoundError(f"no theme named {name!r}") from None

    def _apply_create_theme(self, ev: dict) -> None:
        name = _require_name(ev["name"], "theme name")
        if name in self.themes:
            raise DataError(f"theme {name!r} already exists")
        self.themes[name] = Theme(
            name=name,
            gender=Gender(ev["gender"]),
            notes=ev.get("notes", ""),
            created=ev.get("ts", ""),
            modified=ev.get("ts", ""),
        )

    def _apply_assign_term(self, ev: dict) -> None:
        term = _require_name(ev["term"], "term")
        name = _require_name(ev["theme"], "theme name")
        gender = Gender(ev["gender"])
        direct = bool(ev.get("direct", True))
        ts = ev.get("ts", "")
        theme = self.themes.get(name)
        if theme is None:
            theme = Theme(name=name, gender=gender, created=ts, modified=ts)
            self.themes[name] = theme
        elif theme.gender is not gender:
            raise DataError(f"theme {name!r} collects {theme.gender.value} terms, "
                            f"not {gender.value}")
        if direct:
            # Direct membership is exclusive per gender: leaving the old theme
            # is part of the same event.
            for other in self.themes.values():
                if other is not theme and other.gender is gender and term in other.terms:
                    other.terms.discard(term)
                    other.modified = ts
            theme.indirect_terms.discard(term)
            theme.terms.add(term)
        else:
            theme.terms.discard(term)
            theme.indirect_terms.add(term)
        theme.modified = ts

    def _apply_remove_term(self, ev: dict) -> None:
        theme = self._theme(ev["theme"])
        term = ev["term"]
        if term not in theme.terms and term not in theme.indirect_terms:
            raise NotFoundError(f"term {term!r} is not in theme {theme.name!r}")
        theme.terms.discard(term)
        theme.indirect_terms.discard(term)
        theme.modified = ev.get("ts", "")

    def _apply_rename_theme(self, ev: dict) -> None:
        new = _require_name(ev["new_name"], "theme name")
        theme = self._theme(ev["theme"])
        if new == theme.name:
            return
        if new in self.themes:
            raise DataError(f"theme {new!r} already exists")
        del self.themes[theme.name]
        theme.name = new
        theme.modified = ev.get("ts", "")
        self.themes[new] = theme

    def _apply_set_notes(self, ev: dict) -> None:
        theme = self._theme(ev["theme"])
        theme.notes = ev.get("notes", "")
        theme.modified = ev.get("ts", "")

    def _apply_delete_theme(self, ev: dict) -> None:
        self._theme(ev["theme"])
        del self.themes[ev["theme"]]

    # -- convenience wrappers ----------------------------------------------

    def assign_term(self, term: str, theme: str, gender: Gender,
                    direct: bool = True, ts: str = "") -> dict:
        event = {"op": "assign_term", "term": term, "theme": theme,
                 "gender": gender.value, "direct": direct, "ts": ts}
        self.apply(event)
        return event

    def create_theme(self, name: str, gender: Gender, notes: str = "",
                     ts: str = "") -> dict:
        event = {"op": "create_theme", "name": name, "gender": gender.value,
                 "notes": notes, "ts": ts}
        self.apply(event)
        return event

    def theme_of(self, term: str, gender: Gender) -> str | None:
        for theme in self.themes.values():
            if theme.gender is gender and term in theme.terms:
                return theme.name
        return None

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "format": LEDGER_FORMAT,
            "version": LEDGER_VERSION,
            "run_id": self.run_id,
            "revision": self.revision,
            "themes": [self.themes[name].to_json() for name in sorted(self.themes)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False,
                          indent=2) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_json(cls, data: dict) -> "ThemeLedger":
        if data.get("format") != LEDGER_FORMAT or data.get("version") != LEDGER_VERSION:
            raise DataError(
                f"unsupported ledger file: format={data.get('format')!r} "
                f"version={data.get('version')!r}"
            )
        themes = [Theme.from_json(t) for t in data.get("themes", ())]
        return cls(
            run_id=data.get("run_id", ""),
            revision=int(data.get("revision", 0)),
            themes={t.name: t for t in themes},
        )

    @classmethod
    def load(cls, path) -> "ThemeLedger":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    @classmethod
    def replay(cls, events: list[dict], run_id: str = "") -> "ThemeLedger":
        """Rebuild a ledger from its audit log."""
        ledger = cls(run_id=run_id)
        for event in events:
            ledger.apply(event)
        return ledger


@dataclass(frozen=True)
class LedgerFinding:
    kind: str     # "stale-term" | "duplicate-direct" | "empty-theme"
    message: str
    theme: str
    term: str | None = None


def validate_ledger(ledger: ThemeLedger,
                    current_terms: dict[Gender, set[str]]) -> list[LedgerFinding]:
    """Report (never repair) ledger entries that no longer line up.

    Flags terms absent from the current run's term lists, direct terms
    that somehow belong to two themes of the same gender (possible only
    in a hand-edited file), and themes with no terms at all.
    """
    findings: list[LedgerFinding] = []
    for name in sorted(ledger.themes):
        theme = ledger.themes[name]
        known = current_terms.get(theme.gender, set())
        for term in sorted(theme.terms | theme.indirect_terms):
            if term not in known:
                findings.append(LedgerFinding(
                    "stale-term",
                    f"theme {name!r}: term {term!r} is not on the current "
                    f"{theme.gender.value} term lists",
                    theme=name, term=term,
                ))
        if not theme.terms and not theme.indirect_terms:
            findings.append(LedgerFinding(
                "empty-theme", f"theme {name!r} has no terms", theme=name))

    for gender in GENDERED:
        seen: dict[str, str] = {}
        for name in sorted(ledger.themes):
            theme = ledger.themes[name]
            if theme.gender is not gender:
                continue
            for term in sorted(theme.terms):
                if term in seen:
                    findings.append(LedgerFinding(
                        "duplicate-direct",
                        f"term {term!r} is a direct member of both "
                        f"{seen[term]!r} and {name!r}",
                        theme=name, term=term,
                    ))
                else:
                    seen[term] = name
    return findings


class ThemeStore:
    """File-backed ledger with an audit log and optimistic concurrency.

    All mutations pass through `mutate`, which checks the caller's base
    revision under a lock, applies the event, persists the ledger, and
    appends the event to the audit log.
    """

    def __init__(self, ledger_path, audit_path, run_id: str = ""):
        self.ledger_path = ledger_path
        self.audit_path = audit_path
        self._lock = threading.Lock()
        try:
            self.ledger = ThemeLedger.load(ledger_path)
        except FileNotFoundError:
            self.ledger = ThemeLedger(run_id=run_id)
            self.ledger.save(ledger_path)

    def snapshot(self) -> dict:
        with self._lock:
            return self.ledger.to_json()

    def mutate(self, base_revision: int, event: dict) -> int:
        """Apply `event` if the ledger is still at `base_revision`.

        Returns the new revision. Raises StaleRevisionError on a
        revision mismatch, leaving the ledger untouched.
        """
        with self._lock:
            if base_revision != self.ledger.revision:
                raise StaleRevisionError(base_revision, self.ledger.revision)
            self.ledger.apply(event)
            self.ledger.save(self.ledger_path)
            with open(self.audit_path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")
            return self.ledger.revision

    @staticmethod
    def read_audit(path) -> list[dict]:
        events = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events
