"""End-to-end pipeline: ingest, gender, filter, index, analyze, emit.

A run directory is content-addressed: its name is a digest of the
configuration and the input file bytes, and nothing time-dependent is
written, so rerunning the same configuration over the same inputs
produces byte-identical output.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass, fields as dc_fields
from pathlib import Path

from . import analysis, render
from .errors import ConfigError, DataError, GenderscopeError
from .gender import (GENDERED, CorrectionFactors, Gender, NameGenderTable,
                     ValidationSample, estimate_correction_factors, infer_gender)
from .ingest import (ArticleRecord, Corpus, FieldCatalog, FormatConfig,
                     dedupe_articles, filter_min_size, gender_counts,
                     merge_corpora, parse_records, restrict_fields)
from .report import RunReport
from .stats import POLICIES
from .textprep import DEPLURAL_MODES, TermIndex, build_index, load_stoplist

ENV_PREFIX = "GENDERSCOPE_"

REPORT_FILES = (
    "field_ratios.tsv",
    "overall_terms_f.tsv",
    "overall_terms_m.tsv",
    "crossfield_f.tsv",
    "crossfield_m.tsv",
    "significance.json",
    "run_report.json",
)


@dataclass(frozen=True)
class RunConfig:
    corpus_paths: tuple[str, ...] = ()
    format_path: str | None = None
    names_path: str = ""
    catalog_path: str = ""
    validation_path: str | None = None
    stoplist_path: str | None = None

    name_threshold: float = 0.90
    min_field_size: int = 50
    top_n: int = 1000
    rank_n: int = 100
    top_k: int = 20
    min_fields: int = 17
    min_share: float = 0.70
    alpha: float = 0.001
    kwic_n: int = 30

    policy: str = "auto"
    deplural: str = "conditional"
    seed: int = 0
    lenient: bool = False
    output_dir: str = "runs"

    def validate(self) -> None:
        if not self.corpus_paths:
            raise ConfigError("no corpus files configured")
        if not self.names_path:
            raise ConfigError("no name table configured")
        if not self.catalog_path:
            raise ConfigError("no field catalog configured")
        if not 0.0 < self.name_threshold <= 1.0:
            raise ConfigError(f"name threshold must lie in (0, 1], got {self.name_threshold}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.5 <= self.min_share <= 1.0:
            raise ConfigError(f"min_share must lie in [0.5, 1], got {self.min_share}")
        for name in ("min_field_size", "top_n", "rank_n", "top_k", "min_fields", "kwic_n"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown correction policy {self.policy!r}")
        if self.deplural not in DEPLURAL_MODES:
            raise ConfigError(f"unknown depluralization mode {self.deplural!r}")

    def as_dict(self) -> dict:
        """The configuration echoed into reports (output location excluded)."""
        out = {}
        for f in dc_fields(self):
            if f.name == "output_dir":
                continue
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def load(cls, path, env: dict | None = None, **overrides) -> "RunConfig":
        """Read an INI run configuration.

        Sections: [inputs] corpus (comma-separated), format, names, catalog,
        validation, stoplist; [thresholds] and [run] keys matching the
        field names. Environment variables GENDERSCOPE_<FIELD> override the
        file; keyword overrides beat both.
        """
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise OSError(f"cannot read run config {path}")
        base = Path(path).parent

        def respath(value: str) -> str:
            return str((base / value)) if value and not os.path.isabs(value) else value

        values: dict = {}
        inputs = parser["inputs"] if parser.has_section("inputs") else {}
        corpus = (inputs.get("corpus") or "").strip()
        if corpus:
            values["corpus_paths"] = tuple(
                respath(p.strip()) for p in corpus.split(",") if p.strip()
            )
        for key, target in (("format", "format_path"), ("names", "names_path"),
                            ("catalog", "catalog_path"), ("validation", "validation_path"),
                            ("stoplist", "stoplist_path")):
            raw = (inputs.get(key) or "").strip()
            if raw:
                values[target] = respath(raw)

        field_types = {f.name: f.type for f in dc_fields(cls)}
        for section in ("thresholds", "run"):
            if not parser.has_section(section):
                continue
            for key, raw in parser[section].items():
                if key not in field_types:
                    raise ConfigError(f"unknown run config key {key!r} in [{section}]")
                values[key] = _coerce(key, raw)

        env = os.environ if env is None else env
        for f in dc_fields(cls):
            raw = env.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                if f.name == "corpus_paths":
                    values[f.name] = tuple(p.strip() for p in raw.split(",") if p.strip())
                else:
                    values[f.name] = _coerce(f.name, raw)

        values.update(overrides)
        config = cls(**values)
        config.validate()
        return config


_INT_KEYS = {"min_field_size", "top_n", "rank_n", "top_k", "min_fields", "kwic_n", "seed"}
_FLOAT_KEYS = {"name_threshold", "min_share", "alpha"}
_BOOL_KEYS = {"lenient"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            return raw.casefold() in ("1", "true", "yes", "on")
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None
    return raw


@contextmanager
def _stage(name: str):
    """Tag any toolkit error with the pipeline stage it came from."""
    try:
        yield
    except GenderscopeError as err:
        raise type(err)(f"{name}: {err}") from err


@dataclass
class PipelineState:
    """Everything the analyses need, computed once per configuration."""

    config: RunConfig
    report: RunReport
    catalog: FieldCatalog
    corpus: Corpus              # per-field rows, restricted to kept fields
    deduped: Corpus
    labels: dict[str, Gender]
    factors: CorrectionFactors
    kept: list[str]
    excluded: dict[str, int]
    index: TermIndex
    overall_fm: float
    overlap: float
    counts: dict[str, int]


def prepare(config: RunConfig, report: RunReport | None = None) -> PipelineState:
    """Run the ingest, gender, filter and index stages."""
    config.validate()
    report = report if report is not None else RunReport()

    with _stage("ingest"):
        fmt = FormatConfig.load(config.format_path) if config.format_path else FormatConfig()
        catalog = FieldCatalog.load(config.catalog_path,
                                    minimum_gendered_articles=config.min_field_size)
        corpora = [parse_records(path, fmt, report) for path in config.corpus_paths]
        corpus = merge_corpora(corpora)
        row_errors = len(report.errors)
        if row_errors and not config.lenient:
            raise DataError(f"{row_errors} malformed rows (rerun with lenient "
                            f"mode to skip them)")
        deduped = dedupe_articles(corpus)

    with _stage("gender"):
        table = NameGenderTable.load(config.names_path, config.name_threshold, report)
        labels = {r.article_id: infer_gender(r.given_name, table)
                  for r in deduped.records}
        if config.validation_path:
            sample = ValidationSample.load(config.validation_path, labels)
            factors = estimate_correction_factors(sample)
        else:
            factors = CorrectionFactors.unit()
            report.warning("gender", "no validation sample configured; "
                                     "correction factors left at 1.0")

    with _stage("filter"):
        kept, excluded = filter_min_size(corpus, catalog, labels)
        if not kept:
            report.warning("filter", "no field reached the minimum gendered "
                                     "article count")
        corpus_kept = restrict_fields(corpus, set(kept))
        deduped_kept = dedupe_articles(corpus_kept)

    with _stage("index"):
        stoplist = load_stoplist(config.stoplist_path) if config.stoplist_path else frozenset()
        index = build_index(corpus_kept, labels, catalog,
                            deplural=config.deplural, stoplist=stoplist)

    counts_all = gender_counts(deduped, labels)
    counts_kept = gender_counts(deduped_kept, labels)
    n_f, n_m = counts_kept[Gender.FEMALE], counts_kept[Gender.MALE]
    overall_fm = n_f / n_m if n_m else float("inf")
    if deduped_kept.records:
        overlap = sum(len(r.field_codes) for r in deduped_kept.records) / len(deduped_kept.records)
    else:
        overlap = 1.0

    return PipelineState(
        config=config,
        report=report,
        catalog=catalog,
        corpus=corpus_kept,
        deduped=deduped_kept,
        labels=labels,
        factors=factors,
        kept=kept,
        excluded=excluded,
        index=index,
        overall_fm=overall_fm,
        overlap=max(1.0, overlap),
        counts={
            "rows": len(corpus),
            "articles": len(deduped),
            "articles_kept": len(deduped_kept),
            "female": n_f,
            "male": n_m,
            "unknown": counts_all[Gender.UNKNOWN],
        },
    )


@dataclass
class RunResult:
    run_dir: Path
    run_id: str
    state: PipelineState
    participation: analysis.FieldParticipation
    overall: dict[Gender, analysis.GenderedTermList]
    per_field: dict[str, dict[Gender, analysis.GenderedTermList]]
    tally: analysis.CrossFieldTally | None
    report: RunReport


def run_id_for(config: RunConfig) -> str:
    """Digest of the configuration and all input file bytes."""
    h = hashlib.sha256()
    h.update(json.dumps(config.as_dict(), sort_keys=True).encode("utf-8"))
    paths = list(config.corpus_paths) + [
        p for p in (config.format_path, config.names_path, config.catalog_path,
                    config.validation_path, config.stoplist_path) if p
    ]
    for path in paths:
        h.update(b"\0")
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                h.update(chunk)
    return h.hexdigest()[:12]


def run_pipeline(config: RunConfig) -> RunResult:
    """Execute every stage and write the run directory."""
    report = RunReport()
    run_id = run_id_for(config)
    state = prepare(config, report)

    with _stage("ratios"):
        participation = analysis.field_participation(
            state.corpus, state.labels, state.factors, state.catalog, state.kept)

    overall: dict[Gender, analysis.GenderedTermList] = {}
    with _stage("terms"):
        for gender in GENDERED:
            try:
                overall[gender] = analysis.overall_gendered_terms(
                    state.index, gender, top_n=config.top_n, rank_n=config.rank_n,
                    alpha=config.alpha, policy=config.policy, report=report)
            except DataError as err:
                report.warning("terms", str(err))
                overall[gender] = analysis.GenderedTermList(
                    gender=gender, scope=None, ordered_by="term_ratio", entries=[])

    per_field: dict[str, dict[Gender, analysis.GenderedTermList]] = {}
    with _stage("field-terms"):
        for code in state.kept:
            try:
                per_field[code] = analysis.per_field_top_terms(
                    state.index, code, k=config.top_k, policy=config.policy,
                    report=report)
            except DataError as err:
                report.warning("field-terms", str(err))

    tally = None
    with _stage("tally"):
        if per_field:
            tally = analysis.cross_field_tally(
                per_field, state.index.doc_frequencies(),
                min_fields=config.min_fields, min_share=config.min_share,
                overlap=state.overlap, report=report)
        else:
            report.warning("tally", "no field was analyzed; tally skipped")

    with _stage("emit"):
        run_dir = Path(config.output_dir) / f"run-{run_id}"
        _emit(run_dir, run_id, state, participation, overall, per_field, tally)

    return RunResult(
        run_dir=run_dir,
        run_id=run_id,
        state=state,
        participation=participation,
        overall=overall,
        per_field=per_field,
        tally=tally,
        report=report,
    )


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path: Path, payload) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, ensure_ascii=False,
                                 indent=1) + "\n")


def _emit(run_dir: Path, run_id: str, state: PipelineState,
          participation, overall, per_field, tally) -> None:
    config = state.config
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "field_terms").mkdir(exist_ok=True)
    (run_dir / "snapshot").mkdir(exist_ok=True)
    config_echo = config.as_dict()
    comment = f"run {run_id} config " + json.dumps(config_echo, sort_keys=True)

    header, rows = render.field_ratio_table(participation)
    _write_text(run_dir / "field_ratios.tsv", render.render_tsv(header, rows, comment))
    payload = render.participation_json(participation)
    payload["config"] = config_echo
    _write_json(run_dir / "field_ratios.json", payload)

    for gender, suffix in ((Gender.FEMALE, "f"), (Gender.MALE, "m")):
        lst = overall[gender]
        header, rows = render.overall_terms_table(lst, state.overall_fm)
        _write_text(run_dir / f"overall_terms_{suffix}.tsv",
                    render.render_tsv(header, rows, comment))
        _write_json(run_dir / f"overall_terms_{suffix}.json", {
            "config": config_echo,
            "gender": gender.value,
            "scope": None,
            "ordered_by": lst.ordered_by,
            "overall_fm": render.json_num(state.overall_fm),
            "fdr": {
                "alpha": lst.bh_alpha,
                "selected": lst.bh_rejected_count,
                "min_selected_chi2": lst.min_selected_chi2,
                "reference_min_chi2": analysis.REFERENCE_MIN_SELECTED_CHI2[gender],
            },
            "entries": render.term_entries_json(lst, state.overall_fm),
            "warnings": list(lst.warnings),
        })

    for code, lists in sorted(per_field.items()):
        safe = safe_filename(code)
        header, rows = render.field_terms_table(lists)
        _write_text(run_dir / "field_terms" / f"{safe}.tsv",
                    render.render_tsv(header, rows, comment))
        _write_json(run_dir / "field_terms" / f"{safe}.json", {
            "config": config_echo,
            "field": code,
            "name": state.catalog.narrow_name(code),
            "broad": state.catalog.broad_name(code),
            "n_f": state.index.field_partition(code, Gender.FEMALE).size,
            "n_m": state.index.field_partition(code, Gender.MALE).size,
            "female": render.term_entries_json(lists[Gender.FEMALE]),
            "male": render.term_entries_json(lists[Gender.MALE]),
        })

    for gender, suffix in ((Gender.FEMALE, "f"), (Gender.MALE, "m")):
        if tally is not None:
            header, rows = render.crossfield_table(tally, gender)
            body = render.crossfield_json(tally, gender)
        else:
            header, rows = ["term", "fields", "majority_pct", "f_lists", "m_lists"], []
            body = {"gender": gender.value, "rows": [], "significance": None}
        _write_text(run_dir / f"crossfield_{suffix}.tsv",
                    render.render_tsv(header, rows, comment))
        body["config"] = config_echo
        _write_json(run_dir / f"crossfield_{suffix}.json", body)

    _write_json(run_dir / "significance.json", {
        "config": config_echo,
        "significance": render.significance_json(tally.significance) if tally else None,
        "warnings": list(tally.warnings) if tally else [],
    })

    factors = state.factors
    _write_json(run_dir / "run_report.json", {
        "run_id": run_id,
        "config": config_echo,
        "correction_factors": {
            "male_multiplier": factors.male_multiplier,
            "female_multiplier": factors.female_multiplier,
            "manual_male": factors.manual_male,
            "manual_female": factors.manual_female,
            "auto_male": factors.auto_male,
            "auto_female": factors.auto_female,
        },
        "corpus": dict(state.counts, overall_fm=render.json_num(state.overall_fm),
                       overlap=state.overlap),
        "fields": {"kept": state.kept, "excluded": state.excluded},
        "degenerate_tables_skipped": state.report.counters.get(
            "degenerate_tables_skipped", 0),
        "counters": dict(sorted(state.report.counters.items())),
        "warnings": [e.to_dict() for e in state.report.events if e.level == "warning"],
        "row_errors": [e.to_dict() for e in state.report.errors],
    })
    state.report.write_jsonl(run_dir / "ingest_report.jsonl")

    state.index.save(run_dir / "snapshot" / "index.json")
    _write_json(run_dir / "snapshot" / "corpus.json", _corpus_json(state))
    _write_json(run_dir / "snapshot" / "tallies.json",
                {} if tally is None else {t: list(fm) for t, fm in tally.tallies.items()})
    _write_json(run_dir / "snapshot" / "meta.json", {
        "run_id": run_id,
        "config": config_echo,
        "overall_fm": render.json_num(state.overall_fm),
        "overlap": state.overlap,
        "kept_fields": state.kept,
        "field_names": {code: list(state.catalog.fields[code]) for code in state.kept},
    })


def _corpus_json(state: PipelineState) -> dict:
    kept_ids = state.deduped.article_ids()
    return {
        "format": "genderscope-corpus",
        "version": 1,
        "mode": state.deduped.mode,
        "records": [
            {
                "article_id": r.article_id,
                "year": r.year,
                "field_codes": sorted(r.field_codes),
                "given_name": r.given_name,
                "country": r.country,
                "title": r.title,
                "abstract": r.abstract,
                "keywords": list(r.keywords),
            }
            for r in state.deduped.records
        ],
        "labels": {aid: g.value for aid, g in sorted(state.labels.items())
                   if aid in kept_ids},
    }


def load_corpus_snapshot(path) -> tuple[Corpus, dict[str, Gender]]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("format") != "genderscope-corpus" or data.get("version") != 1:
        raise DataError(f"unsupported corpus snapshot {path}")
    records = tuple(
        ArticleRecord(
            article_id=r["article_id"],
            year=r["year"],
            field_codes=frozenset(r["field_codes"]),
            given_name=r["given_name"],
            country=r["country"],
            title=r["title"],
            abstract=r["abstract"],
            keywords=tuple(r["keywords"]),
        )
        for r in data["records"]
    )
    labels = {aid: Gender(g) for aid, g in data["labels"].items()}
    return Corpus(records, data["mode"]), labels


def safe_filename(code: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in code)
