"""Formatting helpers and table builders for reports.

Tables render as TSV (tab-separated with a header row), JSON (full
precision, with a display string alongside every ratio so infinite
ratios stay readable), or markdown. Numeric formatting is fixed:
chi-squared to one decimal, ratios to two, shares as whole percents.
"""
from __future__ import annotations

import json
import math

from .analysis import (CooccurrenceResult, CrossFieldTally, FieldParticipation,
                       GenderedTermList, KwicSample, TallySignificance)
from .gender import Gender, author_ratio_from_term_ratio


def fmt_ratio(value: float, numerator: int | None = None,
              denominator: int | None = None) -> str:
    """Two-decimal ratio; an infinite ratio renders from its raw counts."""
    if math.isinf(value):
        if numerator is not None:
            return f"{numerator}/0"
        return "inf"
    if math.isnan(value):
        return "-"
    return f"{value:.2f}"


def fmt_chi2(value: float) -> str:
    return f"{value:.1f}"


def fmt_pct(share: float) -> str:
    return f"{round(share * 100):d}%"


def fmt_p(value: float) -> str:
    return f"{value:.3g}"


def json_num(value: float | None):
    """JSON-safe number: infinities and NaN become null."""
    if value is None or not math.isfinite(value):
        return None
    return value


# -- table builders: (header, rows of strings) -------------------------------

def field_ratio_table(part: FieldParticipation) -> tuple[list[str], list[list[str]]]:
    header = ["level", "name", "broad", "n_fields", "f_articles", "m_articles",
              "fm_ratio", "most_female_subfield", "most_female_ratio",
              "most_male_subfield", "most_male_ratio"]
    rows = []
    for b in part.broad:
        rows.append([
            "broad", b.name, b.name, str(b.n_fields), str(b.f_count), str(b.m_count),
            fmt_ratio(b.ratio, b.f_count), b.most_female.name,
            fmt_ratio(b.most_female.ratio, b.most_female.f_count),
            b.most_male.name, fmt_ratio(b.most_male.ratio, b.most_male.f_count),
        ])
    for n in part.narrow:
        rows.append([
            "narrow", n.name, n.broad_name, "1", str(n.f_count), str(n.m_count),
            fmt_ratio(n.ratio, n.f_count), "", "", "", "",
        ])
    return header, rows


def overall_terms_table(lst: GenderedTermList, overall_fm: float
                        ) -> tuple[list[str], list[list[str]]]:
    header = ["rank", "term", "ratio", "author_ratio", "chi2", "p_value",
              "gender_articles", "gender_pct", "other_articles", "other_pct",
              "fdr_selected"]
    rows = []
    for rank, e in enumerate(lst.entries, start=1):
        if math.isinf(e.term_ratio):
            author = math.inf
        else:
            author = author_ratio_from_term_ratio(e.term_ratio, overall_fm, lst.gender)
        rows.append([
            str(rank), e.term,
            fmt_ratio(e.term_ratio, e.gender_count),
            fmt_ratio(author, e.gender_count),
            fmt_chi2(e.score.chi2), fmt_p(e.score.p_value),
            str(e.gender_count), fmt_pct(e.gender_share),
            str(e.other_count), fmt_pct(e.other_share),
            "yes" if e.bh_rejected else "no",
        ])
    return header, rows


def field_terms_table(lists: dict[Gender, GenderedTermList]
                      ) -> tuple[list[str], list[list[str]]]:
    header = ["gender", "rank", "term", "articles", "pct",
              "other_articles", "other_pct", "chi2"]
    rows = []
    for gender in (Gender.FEMALE, Gender.MALE):
        for rank, e in enumerate(lists[gender].entries, start=1):
            rows.append([
                gender.value, str(rank), e.term,
                str(e.gender_count), fmt_pct(e.gender_share),
                str(e.other_count), fmt_pct(e.other_share),
                fmt_chi2(e.score.chi2),
            ])
    return header, rows


def crossfield_table(tally: CrossFieldTally, gender: Gender
                     ) -> tuple[list[str], list[list[str]]]:
    header = ["term", "fields", "majority_pct", "f_lists", "m_lists"]
    rows = [
        [r.term, str(r.total_fields), fmt_pct(r.majority_share),
         str(r.f_fields), str(r.m_fields)]
        for r in tally.rows if r.majority_gender is gender
    ]
    return header, rows


def kwic_table(samples: list[KwicSample]) -> tuple[list[str], list[list[str]]]:
    header = ["article_id", "gender", "fields", "offsets", "window"]
    rows = []
    for s in samples:
        window = s.window.replace("\t", " ").replace("\n", " / ")
        rows.append([
            s.article_id, s.gender.value, ";".join(s.field_codes),
            ";".join(f"{a}-{b}" for a, b in s.offsets), window,
        ])
    return header, rows


def cooccurrence_table(result: CooccurrenceResult) -> tuple[list[str], list[list[str]]]:
    header = ["term", "chi2", "p_value", "with_anchor", "with_pct",
              "without_anchor", "without_pct"]
    rows = [
        [e.term, fmt_chi2(e.chi2), fmt_p(e.p_value), str(e.with_anchor),
         fmt_pct(e.share_with), str(e.without_anchor), fmt_pct(e.share_without)]
        for e in result.entries
    ]
    return header, rows


# -- renderers ----------------------------------------------------------------

def render_tsv(header: list[str], rows: list[list[str]],
               comment: str | None = None) -> str:
    lines = []
    if comment is not None:
        lines.append("# " + comment)
    lines.append("\t".join(header))
    lines.extend("\t".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def render_markdown(header: list[str], rows: list[list[str]]) -> str:
    def fmt_row(cells):
        return "| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |"

    lines = [fmt_row(header), "| " + " | ".join("---" for _ in header) + " |"]
    lines.extend(fmt_row(row) for row in rows)
    return "\n".join(lines) + "\n"


def render_rows_json(header: list[str], rows: list[list[str]]) -> str:
    return json.dumps([dict(zip(header, row)) for row in rows],
                      sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def render_table(header: list[str], rows: list[list[str]], fmt: str = "tsv",
                 comment: str | None = None) -> str:
    if fmt == "tsv":
        return render_tsv(header, rows, comment)
    if fmt == "markdown":
        return render_markdown(header, rows)
    if fmt == "json":
        return render_rows_json(header, rows)
    raise ValueError(f"unknown output format {fmt!r}")


# -- machine-readable report payloads -----------------------------------------

def participation_json(part: FieldParticipation) -> dict:
    def narrow_json(n):
        return {
            "code": n.code, "name": n.name, "broad": n.broad_name,
            "f_count": n.f_count, "m_count": n.m_count,
            "ratio": json_num(n.ratio), "display": fmt_ratio(n.ratio, n.f_count),
        }

    return {
        "factors": {
            "male_multiplier": part.factors.male_multiplier,
            "female_multiplier": part.factors.female_multiplier,
        },
        "broad": [
            {
                "name": b.name, "n_fields": b.n_fields,
                "f_count": b.f_count, "m_count": b.m_count,
                "ratio": json_num(b.ratio), "display": fmt_ratio(b.ratio, b.f_count),
                "most_female": narrow_json(b.most_female),
                "most_male": narrow_json(b.most_male),
            }
            for b in part.broad
        ],
        "narrow": [narrow_json(n) for n in part.narrow],
    }


def term_entries_json(lst: GenderedTermList, overall_fm: float | None = None) -> list[dict]:
    out = []
    for rank, e in enumerate(lst.entries, start=1):
        entry = {
            "rank": rank,
            "term": e.term,
            "gender_count": e.gender_count,
            "other_count": e.other_count,
            "gender_share": e.gender_share,
            "other_share": e.other_share,
            "term_ratio": json_num(e.term_ratio),
            "ratio_display": fmt_ratio(e.term_ratio, e.gender_count),
            "chi2": e.score.chi2,
            "p_value": e.score.p_value,
            "correction_applied": e.score.correction_applied,
        }
        if overall_fm is not None:
            author = (math.inf if math.isinf(e.term_ratio) else
                      author_ratio_from_term_ratio(e.term_ratio, overall_fm, lst.gender))
            entry["author_ratio"] = json_num(author)
        if e.bh_rejected is not None:
            entry["fdr_selected"] = e.bh_rejected
        out.append(entry)
    return out


def significance_json(sig: TallySignificance | None) -> dict | None:
    if sig is None:
        return None
    return {
        "n_fields": sig.model.n,
        "hit_probability": sig.model.p,
        "threshold": sig.model.t,
        "eligible_vocabulary": sig.model.vocab_size,
        "overlap": sig.model.overlap,
        "min_doc_freq": sig.min_doc_freq,
        "per_term_tail": sig.per_term_tail,
        "union_bound": sig.union_bound,
        "adjusted": {
            "n_fields": sig.adjusted_n,
            "threshold": sig.adjusted_t,
            "per_term_tail": sig.adjusted_per_term_tail,
            "union_bound": sig.adjusted_union_bound,
        },
    }


def crossfield_json(tally: CrossFieldTally, gender: Gender) -> dict:
    sig = tally.significance
    return {
        "gender": gender.value,
        "min_fields": tally.min_fields,
        "min_share": tally.min_share,
        "top_k": tally.top_k,
        "n_fields": tally.n_fields,
        "rows": [
            {
                "term": r.term,
                "total_fields": r.total_fields,
                "f_fields": r.f_fields,
                "m_fields": r.m_fields,
                "majority_share": r.majority_share,
                "per_term_tail": (
                    json_num(sig.per_term_tail) if sig is not None else None
                ),
            }
            for r in tally.rows if r.majority_gender is gender
        ],
        "significance": significance_json(sig),
    }


def kwic_json(samples: list[KwicSample], total_matches: int) -> dict:
    return {
        "term": samples[0].term if samples else None,
        "total_matches": total_matches,
        "samples": [
            {
                "article_id": s.article_id,
                "gender": s.gender.value,
                "fields": list(s.field_codes),
                "window": s.window,
                "offsets": [[a, b] for a, b in s.offsets],
            }
            for s in samples
        ],
    }


def cooccurrence_json(result: CooccurrenceResult) -> dict:
    return {
        "anchor": result.anchor,
        "baseline": result.baseline,
        "gender": result.gender.value if result.gender else None,
        "anchor_docs": result.anchor_docs,
        "other_docs": result.other_docs,
        "entries": [
            {
                "term": e.term,
                "chi2": e.chi2,
                "p_value": e.p_value,
                "with_anchor": e.with_anchor,
                "without_anchor": e.without_anchor,
                "share_with": e.share_with,
                "share_without": json_num(e.share_without),
            }
            for e in result.entries
        ],
    }
