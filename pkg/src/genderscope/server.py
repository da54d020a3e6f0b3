"""HTTP API over a completed run directory.

All reads come from the precomputed reports and snapshots; only
concordance sampling and co-occurrence scans are evaluated on request,
and both are pure functions of their query parameters. Theme mutations
go through the file-backed ledger store, serialized by revision checks.
"""
from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__, analysis, render
from .errors import (ConfigError, DataError, NotFoundError,
                     StaleRevisionError)
from .gender import GENDERED, Gender, parse_gender
from .ingest import Corpus
from .pipeline import load_corpus_snapshot, safe_filename
from .textprep import TermIndex
from .themes import ThemeStore


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunState:
    """Everything the API serves, loaded once from a run directory."""

    def __init__(self, run_dir: Path):
        self.run_dir = run_dir
        self.meta = self._read_json("snapshot/meta.json")
        self.run_id = self.meta["run_id"]
        self.index: TermIndex = TermIndex.load(run_dir / "snapshot" / "index.json")
        self.corpus: Corpus
        self.corpus, self.labels = load_corpus_snapshot(run_dir / "snapshot" / "corpus.json")
        self.field_ratios = self._read_json("field_ratios.json")
        self.overall = {
            Gender.FEMALE: self._read_json("overall_terms_f.json"),
            Gender.MALE: self._read_json("overall_terms_m.json"),
        }
        self.crossfield = {
            Gender.FEMALE: self._read_json("crossfield_f.json"),
            Gender.MALE: self._read_json("crossfield_m.json"),
        }
        self.tallies = self._read_json("snapshot/tallies.json")
        self.themes = ThemeStore(
            run_dir / "ledger.json",
            run_dir / "ledger_audit.jsonl",
            run_id=self.run_id,
        )

    def _read_json(self, rel: str):
        with open(self.run_dir / rel, encoding="utf-8") as fh:
            return json.load(fh)

    def field_terms(self, code: str) -> dict:
        path = self.run_dir / "field_terms" / f"{safe_filename(code)}.json"
        if not path.is_file():
            raise NotFoundError(f"no per-field report for field {code!r}")
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)

    def list_terms(self, gender: Gender) -> set[str]:
        return {e["term"] for e in self.overall[gender]["entries"]}


def _error_body(message: str, **extra) -> dict:
    return {"error": dict(extra, message=message)}


def create_app(run_dir, cors_origins: list[str] | None = None,
               ui_dir: str | None = None) -> FastAPI:
    run_dir = Path(run_dir)
    if not (run_dir / "snapshot" / "meta.json").is_file():
        raise DataError(f"{run_dir} is not a run directory (snapshot/meta.json missing)")
    state = RunState(run_dir)

    app = FastAPI(title="genderscope", version=__version__)
    app.state.run = state

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def malformed_query(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content=_error_body("malformed request", code="bad-request"))

    @app.exception_handler(NotFoundError)
    async def not_found(request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404,
                            content=_error_body(str(exc), code="not-found"))

    @app.exception_handler(StaleRevisionError)
    async def stale_revision(request: Request, exc: StaleRevisionError):
        return JSONResponse(
            status_code=409,
            content=_error_body(str(exc), code="stale-revision",
                                current_revision=exc.current),
        )

    @app.exception_handler(ConfigError)
    async def bad_request(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400,
                            content=_error_body(str(exc), code="bad-request"))

    @app.exception_handler(DataError)
    async def data_error(request: Request, exc: DataError):
        return JSONResponse(status_code=400,
                            content=_error_body(str(exc), code="invalid"))

    def resolve_gender(raw: str) -> Gender:
        try:
            gender = parse_gender(raw)
        except DataError:
            raise ConfigError(f"unknown gender {raw!r}") from None
        if gender not in GENDERED:
            raise ConfigError(f"gender must be F or M, got {raw!r}")
        return gender

    @app.get("/api/run")
    def get_run() -> dict:
        return {"run_id": state.run_id, "meta": state.meta}

    @app.get("/api/fields")
    def get_fields() -> dict:
        return {
            "broad": state.field_ratios["broad"],
            "narrow": state.field_ratios["narrow"],
            "factors": state.field_ratios["factors"],
        }

    @app.get("/api/terms")
    def get_terms(scope: str = Query("overall"), gender: str = Query(...)) -> dict:
        g = resolve_gender(gender)
        if scope == "overall":
            payload = state.overall[g]
            entries = [dict(e, crossfield_total=sum(state.tallies.get(e["term"], (0, 0))))
                       for e in payload["entries"]]
            return {
                "scope": "overall",
                "gender": g.value,
                "ordered_by": payload["ordered_by"],
                "overall_fm": payload["overall_fm"],
                "fdr": payload["fdr"],
                "entries": entries,
            }
        payload = state.field_terms(scope)
        key = "female" if g is Gender.FEMALE else "male"
        return {
            "scope": scope,
            "gender": g.value,
            "ordered_by": "chi2",
            "field_name": payload["name"],
            "broad_name": payload["broad"],
            "entries": payload[key],
        }

    @app.get("/api/terms/crossfield")
    def get_crossfield(gender: str = Query(...)) -> dict:
        g = resolve_gender(gender)
        return state.crossfield[g]

    @app.get("/api/kwic")
    def get_kwic(term: str = Query(...), n: int = Query(30, ge=1, le=500),
                 seed: int = Query(0), scope: str = Query("all"),
                 gender: str | None = Query(None)) -> dict:
        fields = None
        if scope != "all":
            fields = {c.strip() for c in scope.split(",") if c.strip()}
        g = resolve_gender(gender) if gender else None
        samples = analysis.kwic_sample(state.index, state.corpus, term, n=n,
                                       fields=fields, gender=g, seed=seed)
        total = len(state.index.docs_with_term(term, fields=fields, gender=g))
        return render.kwic_json(samples, total)

    @app.get("/api/cooccur")
    def get_cooccur(term: str = Query(...),
                    baseline: str = Query(analysis.BASELINE_ALL),
                    gender: str | None = Query(None),
                    limit: int = Query(50, ge=1, le=1000)) -> dict:
        g = resolve_gender(gender) if gender else None
        result = analysis.cooccurrence_scan(state.index, term, baseline=baseline,
                                            gender=g, limit=limit)
        return render.cooccurrence_json(result)

    # -- themes ---------------------------------------------------------------

    @app.get("/api/themes")
    def get_themes() -> dict:
        return state.themes.snapshot()

    @app.post("/api/themes")
    def create_theme(body: dict = Body(...)) -> dict:
        revision = _require_revision(body)
        event = {
            "op": "create_theme",
            "name": _require_str(body, "name"),
            "gender": resolve_gender(_require_str(body, "gender")).value,
            "notes": str(body.get("notes", "")),
            "ts": _now(),
        }
        return {"revision": state.themes.mutate(revision, event)}

    @app.post("/api/themes/assign")
    def assign_term(body: dict = Body(...)) -> dict:
        revision = _require_revision(body)
        term = _require_str(body, "term")
        gender = resolve_gender(_require_str(body, "gender"))
        if term not in state.list_terms(gender):
            raise NotFoundError(f"term {term!r} is not on the {gender.value} term list")
        event = {
            "op": "assign_term",
            "term": term,
            "theme": _require_str(body, "theme"),
            "gender": gender.value,
            "direct": bool(body.get("direct", True)),
            "ts": _now(),
        }
        return {"revision": state.themes.mutate(revision, event)}

    @app.put("/api/themes/{name}")
    def update_theme(name: str, body: dict = Body(...)) -> dict:
        revision = _require_revision(body)
        if "rename" in body:
            event = {"op": "rename_theme", "theme": name,
                     "new_name": _require_str(body, "rename"), "ts": _now()}
        elif "notes" in body:
            event = {"op": "set_notes", "theme": name,
                     "notes": str(body["notes"]), "ts": _now()}
        else:
            raise ConfigError("update body must carry 'rename' or 'notes'")
        return {"revision": state.themes.mutate(revision, event)}

    @app.delete("/api/themes/{name}")
    def delete_theme(name: str, revision: int = Query(...)) -> dict:
        event = {"op": "delete_theme", "theme": name, "ts": _now()}
        return {"revision": state.themes.mutate(revision, event)}

    @app.delete("/api/themes/{name}/terms/{term}")
    def remove_term(name: str, term: str, revision: int = Query(...)) -> dict:
        event = {"op": "remove_term", "theme": name, "term": term, "ts": _now()}
        return {"revision": state.themes.mutate(revision, event)}

    @app.get("/api/themes/validate")
    def validate_themes() -> dict:
        from .themes import validate_ledger

        findings = validate_ledger(
            state.themes.ledger,
            {g: state.list_terms(g) for g in GENDERED},
        )
        return {
            "revision": state.themes.ledger.revision,
            "findings": [
                {"kind": f.kind, "message": f.message, "theme": f.theme,
                 "term": f.term}
                for f in findings
            ],
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _require_revision(body: dict) -> int:
    revision = body.get("revision")
    if not isinstance(revision, int) or isinstance(revision, bool) or revision < 0:
        raise ConfigError("body must carry the base 'revision' as a non-negative integer")
    return revision


def _require_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str) or not value.strip():
        raise ConfigError(f"body must carry a non-empty string {key!r}")
    return value.strip()
