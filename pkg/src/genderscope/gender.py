"""Gender inference from given names, with validation-based correction.

Inference is an exact, case-insensitive lookup of the first given-name
token against a reference table of strongly monogender names. Names that
the table cannot resolve stay Unknown; no fuzzy matching is attempted.
Because unisex names resolve more often for one gender than the other,
a manually coded validation sample yields per-gender multipliers that
correct aggregate counts before ratios are formed.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DataError, EstimationError
from .report import RunReport


class Gender(Enum):
    FEMALE = "F"
    MALE = "M"
    UNKNOWN = "U"

    def other(self) -> "Gender":
        if self is Gender.FEMALE:
            return Gender.MALE
        if self is Gender.MALE:
            return Gender.FEMALE
        return self


GENDERED = (Gender.FEMALE, Gender.MALE)

_GENDER_ALIASES = {
    "f": Gender.FEMALE, "female": Gender.FEMALE,
    "m": Gender.MALE, "male": Gender.MALE,
}


def parse_gender(value: str) -> Gender:
    try:
        return _GENDER_ALIASES[value.strip().casefold()]
    except KeyError:
        raise DataError(f"unknown gender value {value!r}") from None


@dataclass
class NameGenderTable:
    """Reference names mapped to a gender, each at least `threshold` monogender."""

    entries: dict[str, Gender]
    threshold: float = 0.90

    @classmethod
    def load(cls, path, threshold: float = 0.90,
             report: RunReport | None = None) -> "NameGenderTable":
        """Read a name,gender,share CSV, dropping rows below the threshold."""
        entries: dict[str, Gender] = {}
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"name", "gender", "share"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise DataError(f"name table {path}: header must contain {sorted(required)}")
            for row in reader:
                name = (row["name"] or "").strip().casefold()
                if not name:
                    continue
                try:
                    share = float(row["share"])
                except ValueError:
                    raise DataError(
                        f"name table {path} line {reader.line_num}: bad share {row['share']!r}"
                    ) from None
                if share < threshold:
                    if report is not None:
                        report.warning("names", f"dropped {name!r}: share {share} below "
                                                f"threshold {threshold}", reader.line_num)
                    continue
                entries[name] = parse_gender(row["gender"])
        return cls(entries, threshold)

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def _is_initial(token: str) -> bool:
    if len(token) == 1:
        return token.isalpha()
    return len(token) == 2 and token[0].isalpha() and token[1] == "."


def infer_gender(given_name: str, table: NameGenderTable) -> Gender:
    """Label a given name, or Unknown when the table cannot resolve it.

    Only the first whitespace-delimited token counts. Initials are
    Unknown by definition. Hyphenated compounds first try the full
    token, then the segment before the hyphen.
    """
    parts = given_name.split()
    if not parts:
        return Gender.UNKNOWN
    token = parts[0].casefold()
    if _is_initial(token):
        return Gender.UNKNOWN
    hit = table.entries.get(token)
    if hit is not None:
        return hit
    if "-" in token:
        head = token.split("-", 1)[0]
        if head and not _is_initial(head):
            hit = table.entries.get(head)
            if hit is not None:
                return hit
    return Gender.UNKNOWN


@dataclass(frozen=True)
class ValidationRow:
    article_id: str
    manual: Gender  # UNKNOWN means the coder could not resolve it either


@dataclass
class ValidationSample:
    """Manually coded labels paired with the automatic labels for the same articles."""

    rows: list[ValidationRow]
    auto_labels: dict[str, Gender]

    @classmethod
    def load(cls, path, auto_labels: dict[str, Gender]) -> "ValidationSample":
        rows: list[ValidationRow] = []
        with open(path, encoding="utf-8-sig", newline="") as fh:
            reader = csv.DictReader(fh)
            required = {"article_id", "manual_gender"}
            if reader.fieldnames is None or not required.issubset(reader.fieldnames):
                raise DataError(f"validation sample {path}: header must contain {sorted(required)}")
            for row in reader:
                aid = (row["article_id"] or "").strip()
                if not aid:
                    continue
                raw = (row["manual_gender"] or "").strip().casefold()
                if raw in ("", "u", "unknown", "unresolved"):
                    manual = Gender.UNKNOWN
                else:
                    manual = parse_gender(raw)
                rows.append(ValidationRow(aid, manual))
        return cls(rows, auto_labels)


@dataclass(frozen=True)
class CorrectionFactors:
    """Multipliers that align automatic gender shares with manual coding.

    male_multiplier = (manual male share) / (automatic male share), and
    likewise for female. Applying them to automatically gendered counts
    reproduces the manual shares by construction. The underlying counts
    ride along for reporting.
    """

    male_multiplier: float
    female_multiplier: float
    manual_male: int = 0
    manual_female: int = 0
    auto_male: int = 0
    auto_female: int = 0

    def __post_init__(self):
        for m in (self.male_multiplier, self.female_multiplier):
            if not (math.isfinite(m) and m > 0):
                raise EstimationError(f"correction multiplier must be positive and finite, got {m!r}")

    @classmethod
    def unit(cls) -> "CorrectionFactors":
        return cls(1.0, 1.0)

    @classmethod
    def from_counts(cls, manual_male: int, manual_female: int,
                    auto_male: int, auto_female: int) -> "CorrectionFactors":
        if min(manual_male, manual_female) < 1:
            raise EstimationError("need at least one manually resolved article of each gender")
        if min(auto_male, auto_female) < 1:
            raise EstimationError("need at least one automatically labelled article of each gender")
        manual_share = manual_male / (manual_male + manual_female)
        auto_share = auto_male / (auto_male + auto_female)
        return cls(
            male_multiplier=manual_share / auto_share,
            female_multiplier=(1.0 - manual_share) / (1.0 - auto_share),
            manual_male=manual_male,
            manual_female=manual_female,
            auto_male=auto_male,
            auto_female=auto_female,
        )


def estimate_correction_factors(sample: ValidationSample) -> CorrectionFactors:
    """Derive multipliers from a validation sample.

    Manual shares come from the manually resolved rows; automatic shares
    from the automatic labels of the same sampled articles. Unresolved
    and Unknown rows are excluded from their respective shares.
    """
    manual_m = sum(1 for r in sample.rows if r.manual is Gender.MALE)
    manual_f = sum(1 for r in sample.rows if r.manual is Gender.FEMALE)
    auto_m = auto_f = 0
    for r in sample.rows:
        auto = sample.auto_labels.get(r.article_id, Gender.UNKNOWN)
        if auto is Gender.MALE:
            auto_m += 1
        elif auto is Gender.FEMALE:
            auto_f += 1
    return CorrectionFactors.from_counts(manual_m, manual_f, auto_m, auto_f)


def corrected_odds_ratio(f_count: int, m_count: int, factors: CorrectionFactors) -> float:
    """Female-to-male ratio after correction: (f * fm) / (m * mm).

    A zero male count yields an infinite ratio; render it from the raw
    counts (for example "40/0") rather than as a number.
    """
    if f_count < 0 or m_count < 0:
        raise DataError(f"counts must be non-negative, got f={f_count}, m={m_count}")
    if m_count == 0:
        return math.inf if f_count > 0 else math.nan
    return (f_count * factors.female_multiplier) / (m_count * factors.male_multiplier)


def author_ratio_from_term_ratio(term_ratio: float, overall_fm: float,
                                 gender: Gender = Gender.FEMALE) -> float:
    """Convert a share ratio between genders into an author-count ratio.

    The share ratio compares fractions of each gender's articles; scaling
    by the overall female-to-male article ratio turns it into a ratio of
    article counts. Female-list ratios multiply by overall_fm, male-list
    ratios divide by it.
    """
    if not (math.isfinite(overall_fm) and overall_fm > 0):
        raise DataError(f"overall F/M ratio must be positive and finite, got {overall_fm!r}")
    if term_ratio < 0:
        raise DataError(f"term ratio must be non-negative, got {term_ratio!r}")
    if gender is Gender.FEMALE:
        return term_ratio * overall_fm
    if gender is Gender.MALE:
        return term_ratio / overall_fm
    raise DataError("author ratio needs a female or male list gender")
