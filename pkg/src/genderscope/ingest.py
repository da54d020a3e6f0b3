"""Reading bibliographic exports into corpora.

Records arrive as one CSV per download, one row per article per narrow
field, so the same article shows up once for each field it was fetched
under. Parsing keeps that per-field shape; deduplication merges rows that
share an article id into a single record carrying the union of field
codes.
"""
from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field, replace

from .errors import ConfigError, ConflictError, DataError
from .gender import GENDERED, Gender
from .report import RunReport

PER_FIELD = "per-field"
DEDUPLICATED = "deduplicated"

# Logical record fields and their default CSV column names.
COLUMN_KEYS = ("article_id", "year", "field_codes", "given_name",
               "country", "title", "abstract", "keywords")
DEFAULT_COLUMNS = {key: key for key in COLUMN_KEYS}

# A mapping that mirrors common bibliographic database exports.
EXPORT_COLUMNS = {
    "article_id": "EID",
    "year": "Year",
    "field_codes": "ASJC",
    "given_name": "First Author Given Name",
    "country": "Country",
    "title": "Title",
    "abstract": "Abstract",
    "keywords": "Author Keywords",
}


@dataclass(frozen=True)
class ArticleRecord:
    article_id: str
    year: int
    field_codes: frozenset[str]
    given_name: str
    country: str
    title: str
    abstract: str
    keywords: tuple[str, ...]

    def broad_fields(self, catalog: "FieldCatalog") -> set[str]:
        return {catalog.broad_name(code) for code in self.field_codes}


@dataclass
class FieldCatalog:
    """Narrow field codes with their names and parent broad fields."""

    fields: dict[str, tuple[str, str]]  # code -> (narrow name, broad name)
    minimum_gendered_articles: int = 50

    def __post_init__(self):
        if self.minimum_gendered_articles < 1:
            raise ConfigError(
                f"minimum gendered articles must be at least 1, "
                f"got {self.minimum_gendered_articles}"
            )

    @classmethod
    def load(cls, path, minimum_gendered_articles: int = 50) -> "FieldCatalog":
        fields: dict[str, tuple[str, str]] = {}
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"code", "narrow_name", "broad_name"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise DataError(f"field catalog {path}: header must contain {sorted(required)}")
            for row in reader:
                code = (row["code"] or "").strip()
                if not code:
                    continue
                entry = ((row["narrow_name"] or "").strip(), (row["broad_name"] or "").strip())
                if code in fields and fields[code] != entry:
                    raise DataError(f"field catalog {path}: code {code!r} defined twice "
                                    f"with different names")
                fields[code] = entry
        return cls(fields, minimum_gendered_articles)

    def __contains__(self, code: str) -> bool:
        return code in self.fields

    def __len__(self) -> int:
        return len(self.fields)

    def codes(self) -> list[str]:
        return sorted(self.fields)

    def narrow_name(self, code: str) -> str:
        try:
            return self.fields[code][0]
        except KeyError:
            raise DataError(f"unknown field code {code!r}") from None

    def broad_name(self, code: str) -> str:
        try:
            return self.fields[code][1]
        except KeyError:
            raise DataError(f"unknown field code {code!r}") from None

    def broad_names(self) -> list[str]:
        return sorted({broad for _, broad in self.fields.values()})

    def codes_for_broad(self, broad: str) -> list[str]:
        return sorted(code for code, (_, b) in self.fields.items() if b == broad)


@dataclass(frozen=True)
class Corpus:
    records: tuple[ArticleRecord, ...]
    mode: str = PER_FIELD

    def __post_init__(self):
        if self.mode not in (PER_FIELD, DEDUPLICATED):
            raise DataError(f"unknown corpus mode {self.mode!r}")
        if self.mode == DEDUPLICATED:
            seen = set()
            for r in self.records:
                if r.article_id in seen:
                    raise DataError(
                        f"deduplicated corpus contains article {r.article_id!r} twice"
                    )
                seen.add(r.article_id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def article_ids(self) -> set[str]:
        return {r.article_id for r in self.records}

    def by_id(self) -> dict[str, ArticleRecord]:
        if self.mode != DEDUPLICATED:
            raise DataError("id lookup needs a deduplicated corpus")
        return {r.article_id: r for r in self.records}


@dataclass(frozen=True)
class FormatConfig:
    """Column mapping and cell conventions for one export format."""

    columns: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_COLUMNS))
    keyword_delimiter: str = ";"
    field_code_delimiter: str = ";"
    country_filter: str | None = None  # exact match, case-insensitive; None passes all

    def __post_init__(self):
        unknown = set(self.columns) - set(COLUMN_KEYS)
        if unknown:
            raise ConfigError(f"unknown column keys in format config: {sorted(unknown)}")
        merged = dict(DEFAULT_COLUMNS)
        merged.update(self.columns)
        object.__setattr__(self, "columns", merged)

    @classmethod
    def load(cls, path) -> "FormatConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise OSError(f"cannot read format config {path}")
        columns = dict(parser["columns"]) if parser.has_section("columns") else {}
        options = parser["options"] if parser.has_section("options") else {}
        country = options.get("country_filter", "").strip()
        return cls(
            columns=columns,
            keyword_delimiter=options.get("keyword_delimiter", ";"),
            field_code_delimiter=options.get("field_code_delimiter", ";"),
            country_filter=country or None,
        )

    def keeps_country(self, country: str) -> bool:
        if self.country_filter is None:
            return True
        return country.strip().casefold() == self.country_filter.strip().casefold()


def _split_cell(cell: str, delimiter: str) -> list[str]:
    return [part.strip() for part in cell.split(delimiter) if part.strip()]


def parse_records(path, fmt: FormatConfig | None = None,
                  report: RunReport | None = None) -> Corpus:
    """Parse one export CSV into a per-field corpus.

    Malformed rows (empty article id, no field codes, unparsable year)
    are recorded on the report with their line numbers and skipped; a
    missing mapped column is a configuration error. Rows dropped by the
    country filter are counted, not flagged.
    """
    fmt = fmt or FormatConfig()
    report = report if report is not None else RunReport()
    records: list[ArticleRecord] = []
    with open(path, encoding="utf-8-sig", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file, no header row")
        missing = [col for col in fmt.columns.values() if col not in reader.fieldnames]
        if missing:
            raise ConfigError(f"{path}: missing mapped columns {missing}")

        for row in reader:
            line = reader.line_num

            def cell(key: str) -> str:
                return (row.get(fmt.columns[key]) or "").strip()

            article_id = cell("article_id")
            if not article_id:
                report.error("ingest", "row has an empty article id", line)
                continue
            codes = _split_cell(cell("field_codes"), fmt.field_code_delimiter)
            if not codes:
                report.error("ingest", f"article {article_id}: no field codes", line)
                continue
            raw_year = cell("year")
            year = 0
            if raw_year:
                try:
                    year = int(raw_year)
                except ValueError:
                    report.error("ingest", f"article {article_id}: bad year {raw_year!r}", line)
                    continue
            country = cell("country")
            if not fmt.keeps_country(country):
                report.count("country_filtered")
                continue
            records.append(ArticleRecord(
                article_id=article_id,
                year=year,
                field_codes=frozenset(codes),
                given_name=cell("given_name"),
                country=country,
                title=cell("title"),
                abstract=cell("abstract"),
                keywords=tuple(_split_cell(cell("keywords"), fmt.keyword_delimiter)),
            ))
    report.count("rows_parsed", len(records))
    return Corpus(tuple(records), PER_FIELD)


def write_records(corpus: Corpus, path, fmt: FormatConfig | None = None,
                  line_terminator: str = "\r\n") -> None:
    """Serialize a corpus back to CSV in the given format (round-trip safe)."""
    fmt = fmt or FormatConfig()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator=line_terminator)
        writer.writerow([fmt.columns[key] for key in COLUMN_KEYS])
        for r in corpus.records:
            writer.writerow([
                r.article_id,
                str(r.year) if r.year else "",
                fmt.field_code_delimiter.join(sorted(r.field_codes)),
                r.given_name,
                r.country,
                r.title,
                r.abstract,
                fmt.keyword_delimiter.join(r.keywords),
            ])


def merge_corpora(corpora: list[Corpus]) -> Corpus:
    """Concatenate per-field corpora parsed from separate downloads."""
    records: list[ArticleRecord] = []
    for corpus in corpora:
        records.extend(corpus.records)
    return Corpus(tuple(records), PER_FIELD)


def dedupe_articles(corpus: Corpus) -> Corpus:
    """Collapse per-field rows into one record per article.

    Field codes are unioned. Rows that share an article id must agree on
    the title; a mismatch means the id is unreliable and raises. The
    result is sorted by article id, so the operation is insensitive to
    input order and idempotent.
    """
    groups: dict[str, list[ArticleRecord]] = {}
    for record in corpus.records:
        groups.setdefault(record.article_id, []).append(record)

    merged: list[ArticleRecord] = []
    for article_id in sorted(groups):
        rows = groups[article_id]
        titles = {r.title for r in rows}
        if len(titles) > 1:
            shown = sorted(titles)
            raise ConflictError(
                f"article {article_id!r} has conflicting titles: "
                f"{shown[0]!r} vs {shown[1]!r}"
            )
        codes = frozenset().union(*(r.field_codes for r in rows))
        # Pick a canonical survivor so input order cannot leak through.
        survivor = min(rows, key=lambda r: (r.year, r.given_name, r.country,
                                            r.abstract, r.keywords))
        merged.append(replace(survivor, field_codes=codes))
    return Corpus(tuple(merged), DEDUPLICATED)


def restrict_fields(corpus: Corpus, keep: set[str]) -> Corpus:
    """Drop field codes outside `keep`, and records left with none."""
    records = []
    for r in corpus.records:
        codes = r.field_codes & keep
        if codes:
            records.append(replace(r, field_codes=frozenset(codes)))
    return Corpus(tuple(records), corpus.mode)


def filter_min_size(corpus: Corpus, catalog: FieldCatalog,
                    labels: dict[str, Gender]) -> tuple[list[str], dict[str, int]]:
    """Split catalog fields by their count of distinct gendered articles.

    Returns (kept codes, excluded code -> count). A field is kept when at
    least `catalog.minimum_gendered_articles` distinct articles in it
    carry a resolved gender label. Codes missing from the catalog raise.
    """
    per_field: dict[str, set[str]] = {code: set() for code in catalog.fields}
    for record in corpus.records:
        if labels.get(record.article_id) not in GENDERED:
            continue
        for code in record.field_codes:
            if code not in per_field:
                raise DataError(
                    f"article {record.article_id}: field code {code!r} not in the field catalog"
                )
            per_field[code].add(record.article_id)

    kept: list[str] = []
    excluded: dict[str, int] = {}
    for code in sorted(per_field):
        count = len(per_field[code])
        if count >= catalog.minimum_gendered_articles:
            kept.append(code)
        else:
            excluded[code] = count
    return kept, excluded


def gender_counts(corpus: Corpus, labels: dict[str, Gender]) -> dict[Gender, int]:
    """Distinct articles per label over the corpus."""
    seen: dict[Gender, set[str]] = {g: set() for g in Gender}
    for r in corpus.records:
        seen[labels.get(r.article_id, Gender.UNKNOWN)].add(r.article_id)
    return {g: len(ids) for g, ids in seen.items()}
