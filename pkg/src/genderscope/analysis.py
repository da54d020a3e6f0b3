"""Corpus analyses: participation ratios, gendered term lists, tallies,
concordance sampling and co-occurrence scans.

Per-field scoring compares the female and male partitions of one narrow
field; corpus-wide scoring compares the two whole-corpus partitions of
the deduplicated corpus. Chi-squared ties always break lexicographically
by term so every ranking is reproducible.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import ConfigError, DataError, NotFoundError
from .gender import GENDERED, CorrectionFactors, Gender, corrected_odds_ratio
from .ingest import Corpus, FieldCatalog
from .report import RunReport
from .stats import (AssociationScore, BinomialModel, ContingencyTable,
                    Direction, benjamini_hochberg, binomial_tail,
                    chi_square_2x2, tally_union_bound)
from .textprep import Partition, TermIndex, compose_text, tokenize_with_spans

# Minimum chi-squared among FDR-selected terms observed in the reference
# 2017-snapshot analysis of a full bibliographic database. Reported next
# to fresh runs for orientation; never asserted.
REFERENCE_MIN_SELECTED_CHI2 = {Gender.MALE: 48.4, Gender.FEMALE: 55.7}


@dataclass(frozen=True)
class NarrowFieldRow:
    code: str
    name: str
    broad_name: str
    f_count: int
    m_count: int
    ratio: float  # corrected F/M; may be inf when m_count is 0


@dataclass(frozen=True)
class BroadFieldRow:
    name: str
    n_fields: int
    f_count: int
    m_count: int
    ratio: float
    most_female: NarrowFieldRow
    most_male: NarrowFieldRow


@dataclass
class FieldParticipation:
    broad: list[BroadFieldRow]
    narrow: list[NarrowFieldRow]
    factors: CorrectionFactors


def _ratio_sort_key(ratio: float, name: str) -> tuple:
    # Descending by ratio with infinities first; ties alphabetical.
    return (-ratio if not math.isnan(ratio) else math.inf, name)


def field_participation(corpus: Corpus, labels: dict[str, Gender],
                        factors: CorrectionFactors, catalog: FieldCatalog,
                        kept: list[str] | None = None) -> FieldParticipation:
    """Corrected female-to-male participation per narrow and broad field.

    Counts are distinct gendered articles. An article contributes once to
    each narrow field it belongs to and once to each broad field, however
    many of that broad field's narrow fields it sits in. Broad rows carry
    their most female and most male narrow subfields.
    """
    codes = kept if kept is not None else catalog.codes()
    per_field: dict[str, dict[Gender, set[str]]] = {
        code: {g: set() for g in GENDERED} for code in codes
    }
    wanted = set(codes)
    for record in corpus.records:
        g = labels.get(record.article_id)
        if g not in GENDERED:
            continue
        for code in record.field_codes & wanted:
            per_field[code][g].add(record.article_id)

    narrow: list[NarrowFieldRow] = []
    for code in codes:
        f = len(per_field[code][Gender.FEMALE])
        m = len(per_field[code][Gender.MALE])
        narrow.append(NarrowFieldRow(
            code=code,
            name=catalog.narrow_name(code),
            broad_name=catalog.broad_name(code),
            f_count=f,
            m_count=m,
            ratio=corrected_odds_ratio(f, m, factors),
        ))
    narrow.sort(key=lambda r: _ratio_sort_key(r.ratio, r.name))

    by_broad: dict[str, list[NarrowFieldRow]] = {}
    for row in narrow:
        by_broad.setdefault(row.broad_name, []).append(row)

    broad: list[BroadFieldRow] = []
    for name, rows in by_broad.items():
        f_ids: set[str] = set()
        m_ids: set[str] = set()
        for row in rows:
            f_ids.update(per_field[row.code][Gender.FEMALE])
            m_ids.update(per_field[row.code][Gender.MALE])
        ranked = sorted(rows, key=lambda r: _ratio_sort_key(r.ratio, r.name))
        broad.append(BroadFieldRow(
            name=name,
            n_fields=len(rows),
            f_count=len(f_ids),
            m_count=len(m_ids),
            ratio=corrected_odds_ratio(len(f_ids), len(m_ids), factors),
            most_female=ranked[0],
            most_male=ranked[-1],
        ))
    broad.sort(key=lambda r: _ratio_sort_key(r.ratio, r.name))
    return FieldParticipation(broad, narrow, factors)


@dataclass(frozen=True)
class TermEntry:
    term: str
    score: AssociationScore
    gender_count: int     # articles of the list's gender containing the term
    other_count: int
    gender_share: float
    other_share: float
    term_ratio: float     # gender_share / other_share; inf when other_count is 0
    bh_rejected: bool | None = None


@dataclass
class GenderedTermList:
    gender: Gender
    scope: str | None      # narrow field code, or None for the whole corpus
    ordered_by: str        # "chi2" | "term_ratio"
    entries: list[TermEntry]
    bh_alpha: float | None = None
    bh_rejected_count: int | None = None
    min_selected_chi2: float | None = None
    skipped_degenerate: int = 0
    warnings: tuple[str, ...] = ()


def _score_pair(part1: Partition, part2: Partition, policy: str
                ) -> tuple[list[AssociationScore], int]:
    """Score every term across two partitions; row 1 is part1.

    Returns the scores and the number of degenerate tables skipped.
    """
    n1, n2 = part1.size, part2.size
    terms = set(part1.postings) | set(part2.postings)
    scores: list[AssociationScore] = []
    skipped = 0
    for term in sorted(terms):
        a = part1.doc_count(term)
        c = part2.doc_count(term)
        table = ContingencyTable(a, n1 - a, c, n2 - c)
        if table.degenerate:
            skipped += 1
            continue
        scores.append(chi_square_2x2(table, policy, term))
    return scores, skipped


def _entry_from_score(score: AssociationScore, flip: bool,
                      bh_rejected: bool | None = None) -> TermEntry:
    t = score.table
    if flip:
        g_count, g_total = t.c, t.c + t.d
        o_count, o_total = t.a, t.a + t.b
    else:
        g_count, g_total = t.a, t.a + t.b
        o_count, o_total = t.c, t.c + t.d
    g_share = g_count / g_total
    o_share = o_count / o_total
    ratio = g_share / o_share if o_count > 0 else math.inf
    return TermEntry(
        term=score.term,
        score=score,
        gender_count=g_count,
        other_count=o_count,
        gender_share=g_share,
        other_share=o_share,
        term_ratio=ratio,
        bh_rejected=bh_rejected,
    )


def overall_gendered_terms(index: TermIndex, gender: Gender, top_n: int = 1000,
                           rank_n: int = 100, alpha: float = 0.001,
                           policy: str = "auto",
                           report: RunReport | None = None) -> GenderedTermList:
    """The corpus-wide terms most associated with one gender.

    Every term leaning toward `gender` is scored over the whole-corpus
    partitions; the `top_n` largest chi-squared values go through
    Benjamini-Hochberg at `alpha` (reported, not filtering), and the
    final list re-ranks them by the between-gender share ratio, keeping
    `rank_n`.
    """
    if gender not in GENDERED:
        raise ConfigError("term list gender must be female or male")
    if top_n < 1 or rank_n < 1:
        raise ConfigError(f"top_n and rank_n must be positive, got {top_n}, {rank_n}")
    part_g = index.overall_partition(gender)
    part_o = index.overall_partition(gender.other())
    if part_g.size == 0 or part_o.size == 0:
        raise DataError(f"corpus has no articles for one gender "
                        f"(F={index.overall_partition(Gender.FEMALE).size}, "
                        f"M={index.overall_partition(Gender.MALE).size})")

    warnings: list[str] = []
    scores, skipped = _score_pair(part_g, part_o, policy)
    leaning = [s for s in scores if s.direction is Direction.GROUP1]
    if len(leaning) < top_n:
        warnings.append(f"only {len(leaning)} {gender.value}-leaning terms "
                        f"for a top-{top_n} cut")
    top = sorted(leaning, key=lambda s: (-s.chi2, s.term))[:top_n]

    bh_rejected_count = None
    min_selected = None
    rejected: set[int] = set()
    if top:
        rejected = set(benjamini_hochberg([s.p_value for s in top], alpha))
        bh_rejected_count = len(rejected)
        if rejected:
            min_selected = min(top[i].chi2 for i in rejected)

    entries = [
        _entry_from_score(s, flip=False, bh_rejected=(i in rejected))
        for i, s in enumerate(top)
    ]
    entries.sort(key=lambda e: (-e.term_ratio, -e.score.chi2, e.term))
    entries = entries[:rank_n]

    if report is not None:
        for w in warnings:
            report.warning("terms", w)
        if skipped:
            report.count("degenerate_tables_skipped", skipped)

    return GenderedTermList(
        gender=gender,
        scope=None,
        ordered_by="term_ratio",
        entries=entries,
        bh_alpha=alpha,
        bh_rejected_count=bh_rejected_count,
        min_selected_chi2=min_selected,
        skipped_degenerate=skipped,
        warnings=tuple(warnings),
    )


def per_field_top_terms(index: TermIndex, field: str, k: int = 20,
                        policy: str = "auto", report: RunReport | None = None
                        ) -> dict[Gender, GenderedTermList]:
    """Top-k chi-squared terms per gender within one narrow field."""
    if k < 1:
        raise ConfigError(f"k must be positive, got {k}")
    part_f = index.field_partition(field, Gender.FEMALE)
    part_m = index.field_partition(field, Gender.MALE)
    if part_f.size == 0 or part_m.size == 0:
        raise DataError(
            f"field {field}: single-gender partition "
            f"(F={part_f.size}, M={part_m.size}), cannot score terms"
        )

    scores, skipped = _score_pair(part_f, part_m, policy)
    out: dict[Gender, GenderedTermList] = {}
    for gender, direction, flip in (
        (Gender.FEMALE, Direction.GROUP1, False),
        (Gender.MALE, Direction.GROUP2, True),
    ):
        leaning = sorted(
            (s for s in scores if s.direction is direction),
            key=lambda s: (-s.chi2, s.term),
        )
        warnings: list[str] = []
        if len(leaning) < k:
            warnings.append(f"field {field}: only {len(leaning)} "
                            f"{gender.value}-leaning terms for a top-{k} list")
            if report is not None:
                report.warning("field-terms", warnings[-1])
        out[gender] = GenderedTermList(
            gender=gender,
            scope=field,
            ordered_by="chi2",
            entries=[_entry_from_score(s, flip) for s in leaning[:k]],
            skipped_degenerate=skipped,
            warnings=tuple(warnings),
        )
    if report is not None and skipped:
        report.count("degenerate_tables_skipped", skipped)
    return out


@dataclass(frozen=True)
class TallyRow:
    term: str
    total_fields: int
    f_fields: int
    m_fields: int
    majority_gender: Gender
    majority_share: float


@dataclass(frozen=True)
class TallySignificance:
    model: BinomialModel
    min_doc_freq: int
    per_term_tail: float
    union_bound: float
    adjusted_n: int
    adjusted_t: int
    adjusted_per_term_tail: float
    adjusted_union_bound: float


@dataclass
class CrossFieldTally:
    rows: list[TallyRow]                    # selected terms only
    tallies: dict[str, tuple[int, int]]     # term -> (f fields, m fields), all terms
    min_fields: int
    min_share: float
    top_k: int
    n_fields: int
    significance: TallySignificance | None
    warnings: tuple[str, ...] = ()


def cross_field_tally(per_field: dict[str, dict[Gender, GenderedTermList]],
                      doc_freq: dict[str, int], min_fields: int = 17,
                      min_share: float = 0.70, overlap: float = 2.2,
                      report: RunReport | None = None) -> CrossFieldTally:
    """Terms recurring on many fields' top lists for the same gender.

    A term is selected when it appears on at least `min_fields` fields'
    top-k lists and at least `min_share` of those appearances are for
    one gender. The null model annotation asks how likely any term of
    comparable corpus frequency would reach the threshold if every
    top-k list were drawn at random from the eligible vocabulary.
    """
    if not per_field:
        raise DataError("cross-field tally needs at least one analyzed field")
    if min_share < 0.5:
        raise ConfigError(f"min_share below 0.5 leaves the majority gender "
                          f"undefined, got {min_share}")
    if not 0.5 <= min_share <= 1.0:
        raise ConfigError(f"min_share must lie in [0.5, 1], got {min_share}")
    if min_fields < 1:
        raise ConfigError(f"min_fields must be positive, got {min_fields}")

    top_k = 0
    tallies: dict[str, list[int]] = {}
    for lists in per_field.values():
        for gender, slot in ((Gender.FEMALE, 0), (Gender.MALE, 1)):
            entries = lists[gender].entries
            top_k = max(top_k, len(entries))
            for entry in entries:
                tallies.setdefault(entry.term, [0, 0])[slot] += 1

    rows: list[TallyRow] = []
    for term in sorted(tallies):
        f_fields, m_fields = tallies[term]
        total = f_fields + m_fields
        majority = Gender.FEMALE if f_fields >= m_fields else Gender.MALE
        share = max(f_fields, m_fields) / total
        if total >= min_fields and share >= min_share:
            rows.append(TallyRow(term, total, f_fields, m_fields, majority, share))
    rows.sort(key=lambda r: (-r.total_fields, -r.majority_share, r.term))

    warnings: list[str] = []
    significance = None
    if rows:
        try:
            min_freq = min(doc_freq[r.term] for r in rows)
        except KeyError as missing:
            raise DataError(f"no corpus document frequency for selected term {missing}") from None
        eligible = sum(1 for freq in doc_freq.values() if freq >= min_freq)
        if eligible > top_k:
            model = BinomialModel(
                n=len(per_field),
                p=top_k / eligible,
                t=min_fields,
                vocab_size=eligible,
                overlap=overlap,
            )
            significance = TallySignificance(
                model=model,
                min_doc_freq=min_freq,
                per_term_tail=binomial_tail(model.n, model.p, model.t),
                union_bound=tally_union_bound(model),
                adjusted_n=round(model.n / model.overlap),
                adjusted_t=round(model.t / model.overlap),
                adjusted_per_term_tail=binomial_tail(
                    round(model.n / model.overlap), model.p,
                    round(model.t / model.overlap)),
                adjusted_union_bound=tally_union_bound(model, adjusted=True),
            )
        else:
            warnings.append(f"eligible vocabulary ({eligible}) not larger than "
                            f"top-k ({top_k}); null model skipped")
    if report is not None:
        for w in warnings:
            report.warning("tally", w)

    return CrossFieldTally(
        rows=rows,
        tallies={t: (f, m) for t, (f, m) in sorted(tallies.items())},
        min_fields=min_fields,
        min_share=min_share,
        top_k=top_k,
        n_fields=len(per_field),
        significance=significance,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class KwicSample:
    term: str
    article_id: str
    gender: Gender
    field_codes: tuple[str, ...]
    window: str                        # title, abstract and keywords
    offsets: tuple[tuple[int, int], ...]  # (start, end) spans of the term


def kwic_sample(index: TermIndex, corpus: Corpus, term: str, n: int = 30,
                fields: set[str] | None = None, gender: Gender | None = None,
                seed: int = 0, report: RunReport | None = None) -> list[KwicSample]:
    """A reproducible sample of articles containing `term`, with match spans.

    Candidates are drawn uniformly without replacement using `seed`. The
    window is the article's full title, abstract and keywords; offsets
    mark every token that maps to the term under the index's rules.
    """
    if n < 1:
        raise ConfigError(f"sample size must be positive, got {n}")
    candidates = sorted(index.docs_with_term(term, fields=fields, gender=gender))
    if not candidates:
        scope = "the corpus" if fields is None else f"fields {sorted(fields)}"
        raise NotFoundError(f"term {term!r} does not occur in {scope}")
    if len(candidates) > n:
        rng = random.Random(seed)
        chosen = sorted(rng.sample(candidates, n))
    else:
        chosen = candidates
        if len(candidates) < n and report is not None:
            report.warning("kwic", f"term {term!r}: only {len(candidates)} "
                                   f"matching articles for a sample of {n}")

    by_id = corpus.by_id()
    female_docs = index.overall_partition(Gender.FEMALE).docs
    samples: list[KwicSample] = []
    for article_id in chosen:
        record = by_id[article_id]
        window = compose_text(record)
        offsets = tuple(
            (start, end)
            for token, start, end in tokenize_with_spans(window, index.rules)
            if index.final_term(token) == term
        )
        samples.append(KwicSample(
            term=term,
            article_id=article_id,
            gender=Gender.FEMALE if article_id in female_docs else Gender.MALE,
            field_codes=tuple(sorted(record.field_codes)),
            window=window,
            offsets=offsets,
        ))
    return samples


@dataclass(frozen=True)
class CooccurrenceEntry:
    term: str
    chi2: float
    p_value: float
    with_anchor: int      # co-term articles among anchor articles
    without_anchor: int
    share_with: float
    share_without: float


@dataclass
class CooccurrenceResult:
    anchor: str
    baseline: str
    gender: Gender | None
    anchor_docs: int
    other_docs: int
    entries: list[CooccurrenceEntry]
    skipped_degenerate: int = 0


BASELINE_ALL = "all"
BASELINE_SAME_GENDER = "same-gender"


def cooccurrence_scan(index: TermIndex, anchor: str, baseline: str = BASELINE_ALL,
                      gender: Gender | None = None, policy: str = "auto",
                      limit: int | None = None) -> CooccurrenceResult:
    """Terms overrepresented in articles containing `anchor`.

    Baseline "all" compares anchor articles against every other article;
    "same-gender" restricts both sides to one gender's articles, which
    isolates topical attraction from the gender split itself.
    """
    if baseline not in (BASELINE_ALL, BASELINE_SAME_GENDER):
        raise ConfigError(f"unknown baseline {baseline!r}")
    if baseline == BASELINE_SAME_GENDER:
        if gender not in GENDERED:
            raise ConfigError("same-gender baseline needs a female or male gender")
        universe = set(index.overall_partition(gender).docs)
    else:
        universe = set()
        for g in GENDERED:
            universe.update(index.overall_partition(g).docs)

    merged = index.merged_postings()
    anchor_docs = merged.get(anchor, set()) & universe
    if not anchor_docs:
        raise NotFoundError(f"anchor term {anchor!r} does not occur in the scanned articles")
    n_anchor = len(anchor_docs)
    n_other = len(universe) - n_anchor

    entries: list[CooccurrenceEntry] = []
    skipped = 0
    for term in sorted(merged):
        if term == anchor:
            continue
        # For the all-docs baseline every posting already lies in the universe.
        docs = merged[term] if baseline == BASELINE_ALL else merged[term] & universe
        a = len(docs & anchor_docs)
        c = len(docs) - a
        table = ContingencyTable(a, n_anchor - a, c, n_other - c)
        if table.degenerate:
            skipped += 1
            continue
        score = chi_square_2x2(table, policy, term)
        if score.direction is not Direction.GROUP1:
            continue
        entries.append(CooccurrenceEntry(
            term=term,
            chi2=score.chi2,
            p_value=score.p_value,
            with_anchor=a,
            without_anchor=c,
            share_with=a / n_anchor,
            share_without=c / n_other if n_other else math.nan,
        ))
    entries.sort(key=lambda e: (-e.chi2, e.term))
    if limit is not None:
        entries = entries[:limit]
    return CooccurrenceResult(
        anchor=anchor,
        baseline=baseline,
        gender=gender if baseline == BASELINE_SAME_GENDER else None,
        anchor_docs=n_anchor,
        other_docs=n_other,
        entries=entries,
        skipped_degenerate=skipped,
    )


def biased_fields_for_term(per_field: dict[str, dict[Gender, GenderedTermList]],
                           term: str, gender: Gender) -> set[str]:
    """Narrow fields whose top list for `gender` contains `term`."""
    return {
        code
        for code, lists in per_field.items()
        if any(e.term == term for e in lists[gender].entries)
    }
