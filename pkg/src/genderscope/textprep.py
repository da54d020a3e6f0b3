"""Tokenization, depluralization and the article-incidence term index.

Terms are counted once per article regardless of how often they repeat
inside it, so every partition of the index maps a term to the set of
article ids containing it.
"""
from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field

from .errors import DataError
from .gender import GENDERED, Gender
from .ingest import ArticleRecord, Corpus, FieldCatalog, dedupe_articles

INDEX_FORMAT = "genderscope-index"
INDEX_VERSION = 1

DEPLURAL_MODES = ("conditional", "always", "off")


@dataclass(frozen=True)
class TokenRules:
    """What counts as a token: allowed joiners, case folding, length floor."""

    intra_chars: str = "-'’"  # hyphen plus straight and curly apostrophes
    lowercase: bool = True
    min_length: int = 1

    def pattern(self) -> re.Pattern:
        # A token is a run of letters/digits possibly joined by intra chars;
        # leading and trailing joiners are stripped afterwards.
        return re.compile(rf"(?:[^\W_]|[{re.escape(self.intra_chars)}])+")


DEFAULT_RULES = TokenRules()


def normalize_text(text: str) -> str:
    return unicodedata.normalize("NFC", text)


def tokenize_with_spans(text: str, rules: TokenRules = DEFAULT_RULES
                        ) -> list[tuple[str, int, int]]:
    """All tokens of `text` in order, with (start, end) offsets.

    Offsets index into the NFC-normalized text, which callers must use as
    the display window for highlighting to line up.
    """
    normalized = normalize_text(text)
    out: list[tuple[str, int, int]] = []
    for match in rules.pattern().finditer(normalized):
        raw = match.group()
        stripped = raw.strip(rules.intra_chars)
        if len(stripped) < max(rules.min_length, 1):
            continue
        lead = len(raw) - len(raw.lstrip(rules.intra_chars))
        start = match.start() + lead
        end = start + len(stripped)
        token = stripped.lower() if rules.lowercase else stripped
        out.append((token, start, end))
    return out


def tokenize(text: str, rules: TokenRules = DEFAULT_RULES) -> set[str]:
    """The set of distinct tokens in `text` (incidence, not frequency)."""
    return {tok for tok, _, _ in tokenize_with_spans(text, rules)}


def depluralize(term: str, vocabulary: set[str] | frozenset[str],
                mode: str = "conditional") -> str:
    """Strip one trailing "s" when a matching singular is plausible.

    The stem must be at least three characters and the term must not end
    in "ss". In "conditional" mode the stem must additionally occur in
    the corpus vocabulary; "always" skips that check; "off" is identity.
    """
    if mode not in DEPLURAL_MODES:
        raise DataError(f"unknown depluralization mode {mode!r}; expected one of {DEPLURAL_MODES}")
    if mode == "off":
        return term
    if len(term) < 4 or not term.endswith("s") or term.endswith("ss"):
        return term
    stem = term[:-1]
    if mode == "always" or stem in vocabulary:
        return stem
    return term


def compose_text(record: ArticleRecord) -> str:
    """The searchable window of an article: title, abstract, keywords."""
    return normalize_text(
        "\n".join((record.title, record.abstract, "; ".join(record.keywords)))
    )


def _empty_partition() -> "Partition":
    return Partition(set(), {})


@dataclass
class Partition:
    """One document group: its article ids and term postings."""

    docs: set[str]
    postings: dict[str, set[str]]

    @property
    def size(self) -> int:
        return len(self.docs)

    def doc_count(self, term: str) -> int:
        return len(self.postings.get(term, ()))


@dataclass
class TermIndex:
    """Term-to-articles postings, partitioned by narrow field and gender.

    `overall` holds the two whole-corpus (deduplicated) partitions used
    for corpus-wide scoring; `fields` holds one partition per
    (narrow field, gender) pair for per-field scoring. The raw-token
    vocabulary and the depluralization mode are retained so later lookups
    (concordance highlighting) map tokens to terms identically.
    """

    overall: dict[Gender, Partition]
    fields: dict[str, dict[Gender, Partition]]
    vocabulary: frozenset[str]
    rules: TokenRules = DEFAULT_RULES
    deplural: str = "conditional"
    stoplist: frozenset[str] = frozenset()
    _merged: dict[str, set[str]] | None = field(default=None, repr=False, compare=False)

    def overall_partition(self, gender: Gender) -> Partition:
        return self.overall.get(gender) or _empty_partition()

    def field_partition(self, code: str, gender: Gender) -> Partition:
        return (self.fields.get(code) or {}).get(gender) or _empty_partition()

    def field_codes(self) -> list[str]:
        return sorted(self.fields)

    def overall_terms(self) -> set[str]:
        out: set[str] = set()
        for part in self.overall.values():
            out.update(part.postings)
        return out

    def overall_doc_freq(self, term: str) -> int:
        # Overall partitions are disjoint by gender, so counts add.
        return sum(p.doc_count(term) for p in self.overall.values())

    def doc_frequencies(self) -> dict[str, int]:
        freq: dict[str, int] = {}
        for part in self.overall.values():
            for term, docs in part.postings.items():
                freq[term] = freq.get(term, 0) + len(docs)
        return freq

    def merged_postings(self) -> dict[str, set[str]]:
        """Term -> article ids regardless of gender (cached)."""
        if self._merged is None:
            merged: dict[str, set[str]] = {}
            for part in self.overall.values():
                for term, docs in part.postings.items():
                    merged.setdefault(term, set()).update(docs)
            self._merged = merged
        return self._merged

    def docs_with_term(self, term: str, fields: set[str] | None = None,
                       gender: Gender | None = None) -> set[str]:
        genders = (gender,) if gender is not None else GENDERED
        found: set[str] = set()
        if fields is None:
            for g in genders:
                found.update(self.overall_partition(g).postings.get(term, ()))
        else:
            for code in fields:
                for g in genders:
                    found.update(self.field_partition(code, g).postings.get(term, ()))
        return found

    def final_term(self, token: str) -> str:
        """Map a raw token to the indexed term it contributes to."""
        return depluralize(token, self.vocabulary, self.deplural)

    def to_json(self) -> dict:
        def dump(part: Partition) -> dict:
            return {
                "docs": sorted(part.docs),
                "postings": {t: sorted(ids) for t, ids in sorted(part.postings.items())},
            }

        return {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "rules": {
                "intra_chars": self.rules.intra_chars,
                "lowercase": self.rules.lowercase,
                "min_length": self.rules.min_length,
            },
            "deplural": self.deplural,
            "stoplist": sorted(self.stoplist),
            "vocabulary": sorted(self.vocabulary),
            "overall": {g.value: dump(p) for g, p in sorted(self.overall.items(), key=lambda kv: kv[0].value)},
            "fields": {
                code: {g.value: dump(p) for g, p in sorted(parts.items(), key=lambda kv: kv[0].value)}
                for code, parts in sorted(self.fields.items())
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "TermIndex":
        if data.get("format") != INDEX_FORMAT or data.get("version") != INDEX_VERSION:
            raise DataError(
                f"unsupported index snapshot: format={data.get('format')!r} "
                f"version={data.get('version')!r}"
            )

        def load(part: dict) -> Partition:
            return Partition(
                docs=set(part["docs"]),
                postings={t: set(ids) for t, ids in part["postings"].items()},
            )

        rules = TokenRules(**data["rules"])
        return cls(
            overall={Gender(g): load(p) for g, p in data["overall"].items()},
            fields={
                code: {Gender(g): load(p) for g, p in parts.items()}
                for code, parts in data["fields"].items()
            },
            vocabulary=frozenset(data["vocabulary"]),
            rules=rules,
            deplural=data["deplural"],
            stoplist=frozenset(data.get("stoplist", ())),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, ensure_ascii=False, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "TermIndex":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def load_stoplist(path) -> frozenset[str]:
    """One term per line; blank lines and #-comments are ignored."""
    terms = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            term = line.strip()
            if term and not term.startswith("#"):
                terms.add(term.casefold())
    return frozenset(terms)


def build_index(corpus: Corpus, labels: dict[str, Gender], catalog: FieldCatalog,
                rules: TokenRules = DEFAULT_RULES, deplural: str = "conditional",
                stoplist: frozenset[str] = frozenset()) -> TermIndex:
    """Index a corpus: two whole-corpus partitions plus one per (field, gender).

    Only articles with a resolved gender label participate. The corpus is
    deduplicated first, so the whole-corpus partitions count each article
    once and the per-field partitions draw on each article's full set of
    field codes. Unknown field codes are refused.
    """
    if deplural not in DEPLURAL_MODES:
        raise DataError(f"unknown depluralization mode {deplural!r}; expected one of {DEPLURAL_MODES}")
    deduped = dedupe_articles(corpus)
    gendered = [r for r in deduped.records if labels.get(r.article_id) in GENDERED]

    vocabulary: set[str] = set()
    doc_tokens: list[tuple[ArticleRecord, set[str]]] = []
    for record in gendered:
        tokens = tokenize(compose_text(record), rules)
        vocabulary.update(tokens)
        doc_tokens.append((record, tokens))

    overall: dict[Gender, Partition] = {g: _empty_partition() for g in GENDERED}
    fields: dict[str, dict[Gender, Partition]] = {}
    for record, tokens in doc_tokens:
        g = labels[record.article_id]
        terms = {depluralize(t, vocabulary, deplural) for t in tokens} - stoplist
        parts = [overall[g]]
        for code in sorted(record.field_codes):
            if code not in catalog:
                raise DataError(
                    f"article {record.article_id}: field code {code!r} not in the field catalog"
                )
            parts.append(fields.setdefault(code, {g2: _empty_partition() for g2 in GENDERED})[g])
        for part in parts:
            part.docs.add(record.article_id)
            for term in terms:
                part.postings.setdefault(term, set()).add(record.article_id)

    return TermIndex(
        overall=overall,
        fields=fields,
        vocabulary=frozenset(vocabulary),
        rules=rules,
        deplural=deplural,
        stoplist=stoplist,
    )
