from __future__ import annotations

import math

import pytest

from genderscope.analysis import (
    BASELINE_ALL,
    BASELINE_SAME_GENDER,
    CrossFieldTally,
    GenderedTermList,
    TermEntry,
    biased_fields_for_term,
    cooccurrence_scan,
    cross_field_tally,
    field_participation,
    kwic_sample,
    overall_gendered_terms,
    per_field_top_terms,
)
from genderscope.errors import ConfigError, DataError, NotFoundError
from genderscope.gender import CorrectionFactors, Gender
from genderscope.ingest import ArticleRecord, Corpus, FieldCatalog
from genderscope.report import RunReport
from genderscope.stats import AssociationScore, ContingencyTable, Direction
from genderscope.textprep import build_index

from conftest import CARE_FIELD, CARE_TERMS, N_CARE_F, N_CARE_M, build_care_corpus


def rec(aid, codes, title, name="Mary"):
    return ArticleRecord(aid, 2016, frozenset(codes), name, "", title, "", ())


def small_catalog(*codes):
    return FieldCatalog({c: (f"Field {c}", "Broad") for c in codes},
                        minimum_gendered_articles=1)


def corpus_of(spec: dict[str, tuple[str, Gender]], code="10"):
    """spec: article id -> (text, gender)."""
    records = []
    labels = {}
    for aid, (text, gender) in spec.items():
        records.append(rec(aid, {code}, text))
        labels[aid] = gender
    return Corpus(tuple(records), "per-field"), labels


class TestFieldParticipation:
    unit = CorrectionFactors.unit()

    def make(self):
        # broad "One": codes 11 (female-heavy), 12 (male-heavy)
        # broad "Two": code 21, balanced; a1 sits in both 11 and 12
        catalog = FieldCatalog({
            "11": ("Alpha", "One"),
            "12": ("Beta", "One"),
            "21": ("Gamma", "Two"),
        }, minimum_gendered_articles=1)
        records = [rec("a1", {"11", "12"}, "t")]
        labels = {"a1": Gender.FEMALE}
        for i in range(3):
            records.append(rec(f"f{i}", {"11"}, "t"))
            labels[f"f{i}"] = Gender.FEMALE
        for i in range(4):
            records.append(rec(f"m{i}", {"12"}, "t"))
            labels[f"m{i}"] = Gender.MALE
        records.append(rec("b1", {"21"}, "t"))
        labels["b1"] = Gender.FEMALE
        records.append(rec("b2", {"21"}, "t"))
        labels["b2"] = Gender.MALE
        return Corpus(tuple(records)), labels, catalog

    def test_narrow_counts_and_ordering(self):
        corpus, labels, catalog = self.make()
        part = field_participation(corpus, labels, self.unit, catalog)
        by_code = {r.code: r for r in part.narrow}
        assert (by_code["11"].f_count, by_code["11"].m_count) == (4, 0)
        assert (by_code["12"].f_count, by_code["12"].m_count) == (1, 4)
        assert by_code["11"].ratio == math.inf
        assert by_code["12"].ratio == 0.25
        # infinite ratios sort first, then descending
        assert [r.code for r in part.narrow] == ["11", "21", "12"]

    def test_broad_counts_article_once(self):
        corpus, labels, catalog = self.make()
        part = field_participation(corpus, labels, self.unit, catalog)
        one = next(r for r in part.broad if r.name == "One")
        # a1 is in both narrow fields of One but counts once
        assert (one.f_count, one.m_count) == (4, 4)
        assert one.ratio == 1.0
        assert one.n_fields == 2
        assert one.most_female.code == "11"
        assert one.most_male.code == "12"

    def test_kept_subset(self):
        corpus, labels, catalog = self.make()
        part = field_participation(corpus, labels, self.unit, catalog,
                                   kept=["11", "21"])
        assert [r.code for r in part.narrow] == ["11", "21"]
        assert all(r.name != "One" or r.n_fields == 1 for r in part.broad)

    def test_correction_shifts_ratio(self):
        corpus, labels, catalog = self.make()
        factors = CorrectionFactors.from_counts(558, 333, 317, 259)
        part = field_participation(corpus, labels, factors, catalog)
        balanced = next(r for r in part.narrow if r.code == "21")
        assert balanced.ratio == pytest.approx(0.730, abs=5e-4)


class TestPerFieldTerms:
    def test_care_field_reproduces_reference_table(self, care_index):
        lists = per_field_top_terms(care_index, CARE_FIELD)
        flist = lists[Gender.FEMALE]
        assert flist.ordered_by == "chi2"
        assert flist.scope == CARE_FIELD
        assert len(flist.entries) == 20
        assert [e.term for e in flist.entries[:3]] == ["nurse", "support", "home"]
        chi2_by_term = {e.term: e.score.chi2 for e in flist.entries}
        for term, f, m, expected in CARE_TERMS:
            assert chi2_by_term[term] == pytest.approx(expected, abs=0.05), term
        by_term = {e.term: e for e in flist.entries}
        nurse = by_term["nurse"]
        assert (nurse.gender_count, nurse.other_count) == (23, 0)
        assert nurse.gender_share == pytest.approx(23 / N_CARE_F)
        assert nurse.term_ratio == math.inf

    def test_single_gender_terms_lists_empty_other_side(self, care_index):
        report = RunReport()
        lists = per_field_top_terms(care_index, CARE_FIELD, report=report)
        assert lists[Gender.MALE].entries == []
        assert any("only 0" in w for w in lists[Gender.MALE].warnings)
        assert any(e.level == "warning" for e in report.events)

    def test_male_entries_count_from_male_side(self):
        spec = {}
        for i in range(10):
            spec[f"f{i}"] = ("base proof" if i == 0 else "base", Gender.FEMALE)
        for i in range(10):
            spec[f"m{i}"] = ("base proof" if i < 8 else "base", Gender.MALE)
        corpus, labels = corpus_of(spec)
        index = build_index(corpus, labels, small_catalog("10"))
        mlist = per_field_top_terms(index, "10", k=5)[Gender.MALE]
        proof = next(e for e in mlist.entries if e.term == "proof")
        assert (proof.gender_count, proof.other_count) == (8, 1)
        assert proof.term_ratio == pytest.approx(8.0)
        assert proof.score.direction is Direction.GROUP2

    def test_unknown_or_single_gender_field_refused(self, care_index):
        with pytest.raises(DataError):
            per_field_top_terms(care_index, "0000")
        spec = {"a1": ("words", Gender.FEMALE)}
        corpus, labels = corpus_of(spec)
        index = build_index(corpus, labels, small_catalog("10"))
        with pytest.raises(DataError):
            per_field_top_terms(index, "10")

    def test_k_validation(self, care_index):
        with pytest.raises(ConfigError):
            per_field_top_terms(care_index, CARE_FIELD, k=0)


class TestOverallTerms:
    def test_care_ranking_by_ratio(self, care_index):
        lst = overall_gendered_terms(care_index, Gender.FEMALE, top_n=50,
                                     rank_n=100, alpha=0.001)
        assert lst.ordered_by == "term_ratio"
        assert lst.scope is None
        assert len(lst.entries) == 20
        # infinite ratios first, ordered by chi2 then term
        assert [e.term for e in lst.entries[:6]] == [
            "nurse", "explored", "palliative", "end-of-life", "hospice", "illness"]
        finite = [e.term_ratio for e in lst.entries[6:]]
        assert finite == sorted(finite, reverse=True)
        assert lst.entries[-1].term == "were"
        assert any("only 20" in w for w in lst.warnings)

    def test_bh_annotates_without_filtering(self, care_index):
        lst = overall_gendered_terms(care_index, Gender.FEMALE, top_n=50,
                                     rank_n=100, alpha=0.001)
        # nothing here survives alpha=0.001 over 20 tests, list stays full
        assert lst.bh_rejected_count == 0
        assert lst.min_selected_chi2 is None
        assert all(e.bh_rejected is False for e in lst.entries)
        assert len(lst.entries) == 20

    def test_bh_selects_planted_term(self):
        spec = {}
        for i in range(30):
            spec[f"f{i}"] = ("base weave" if i < 27 else "base", Gender.FEMALE)
        for i in range(30):
            spec[f"m{i}"] = ("base weave" if i < 3 else "base", Gender.MALE)
        corpus, labels = corpus_of(spec)
        index = build_index(corpus, labels, small_catalog("10"))
        lst = overall_gendered_terms(index, Gender.FEMALE, top_n=10, rank_n=5,
                                     alpha=0.001)
        weave = next(e for e in lst.entries if e.term == "weave")
        assert weave.bh_rejected is True
        assert lst.bh_rejected_count >= 1
        assert lst.min_selected_chi2 is not None
        assert lst.min_selected_chi2 <= weave.score.chi2

    def test_rank_n_truncates_after_ratio_sort(self, care_index):
        lst = overall_gendered_terms(care_index, Gender.FEMALE, top_n=50, rank_n=3)
        assert [e.term for e in lst.entries] == ["nurse", "explored", "palliative"]

    def test_label_swap_mirrors_lists(self, care_index):
        corpus, labels, catalog = build_care_corpus()
        swapped_labels = {aid: g.other() for aid, g in labels.items()}
        swapped = build_index(corpus, swapped_labels, catalog)
        original = overall_gendered_terms(care_index, Gender.FEMALE, top_n=50)
        mirrored = overall_gendered_terms(swapped, Gender.MALE, top_n=50)
        assert [e.term for e in original.entries] == [e.term for e in mirrored.entries]
        for a, b in zip(original.entries, mirrored.entries):
            assert a.score.chi2 == pytest.approx(b.score.chi2)
            assert a.term_ratio == pytest.approx(b.term_ratio) or (
                math.isinf(a.term_ratio) and math.isinf(b.term_ratio))

    def test_duplicating_corpus_doubles_chi2(self):
        spec = {}
        for i in range(6):
            spec[f"f{i}"] = ("base xterm" if i < 4 else "base", Gender.FEMALE)
        for i in range(6):
            spec[f"m{i}"] = ("base xterm" if i < 1 else "base", Gender.MALE)
        corpus, labels = corpus_of(spec)
        doubled_spec = dict(spec)
        for aid, pair in spec.items():
            doubled_spec[f"{aid}-copy"] = pair
        doubled, doubled_labels = corpus_of(doubled_spec)

        base_idx = build_index(corpus, labels, small_catalog("10"))
        doubled_idx = build_index(doubled, doubled_labels, small_catalog("10"))
        base = overall_gendered_terms(base_idx, Gender.FEMALE, top_n=10,
                                      policy="never")
        twice = overall_gendered_terms(doubled_idx, Gender.FEMALE, top_n=10,
                                       policy="never")
        b = next(e for e in base.entries if e.term == "xterm")
        d = next(e for e in twice.entries if e.term == "xterm")
        assert d.score.chi2 == pytest.approx(2 * b.score.chi2, rel=1e-9)
        assert d.term_ratio == pytest.approx(b.term_ratio, rel=1e-9)

    def test_validation(self, care_index):
        with pytest.raises(ConfigError):
            overall_gendered_terms(care_index, Gender.UNKNOWN)
        with pytest.raises(ConfigError):
            overall_gendered_terms(care_index, Gender.FEMALE, top_n=0)

    def test_empty_gender_side_refused(self):
        corpus, labels = corpus_of({"a1": ("words", Gender.FEMALE)})
        index = build_index(corpus, labels, small_catalog("10"))
        with pytest.raises(DataError):
            overall_gendered_terms(index, Gender.FEMALE)


def entry(term: str) -> TermEntry:
    table = ContingencyTable(2, 1, 1, 2)
    score = AssociationScore(term, table, 0.0, Direction.GROUP1, 1.0, False)
    return TermEntry(term, score, 2, 1, 2 / 3, 1 / 3, 2.0)


def termlist(gender: Gender, scope: str, terms: list[str]) -> GenderedTermList:
    return GenderedTermList(gender=gender, scope=scope, ordered_by="chi2",
                            entries=[entry(t) for t in terms])


def fake_per_field(n_fields: int, f_terms, m_terms) -> dict:
    """f_terms/m_terms: term -> number of fields whose list carries it."""
    out = {}
    for i in range(n_fields):
        code = f"F{i:02d}"
        f_list = [t for t, k in f_terms.items() if i < k]
        m_list = [t for t, k in m_terms.items() if i < k]
        out[code] = {
            Gender.FEMALE: termlist(Gender.FEMALE, code, f_list),
            Gender.MALE: termlist(Gender.MALE, code, m_list),
        }
    return out


class TestCrossFieldTally:
    freq = {"net": 400, "sea": 380, "rare": 10}

    def test_selection_thresholds(self):
        per_field = fake_per_field(20, {"net": 18, "sea": 10}, {"net": 2, "sea": 4})
        tally = cross_field_tally(per_field, self.freq, min_fields=17,
                                  min_share=0.70)
        assert [r.term for r in tally.rows] == ["net"]
        row = tally.rows[0]
        assert (row.total_fields, row.f_fields, row.m_fields) == (20, 18, 2)
        assert row.majority_gender is Gender.FEMALE
        assert row.majority_share == pytest.approx(0.9)
        assert tally.tallies["sea"] == (10, 4)
        assert tally.n_fields == 20

    def test_too_few_fields_not_selected(self):
        per_field = fake_per_field(20, {"net": 14}, {"net": 2})
        tally = cross_field_tally(per_field, self.freq, min_fields=17,
                                  min_share=0.70)
        assert tally.rows == []

    def test_weak_majority_not_selected(self):
        per_field = fake_per_field(20, {"net": 11}, {"net": 9})
        tally = cross_field_tally(per_field, self.freq, min_fields=17,
                                  min_share=0.70)
        assert tally.rows == []

    def test_tied_tally_counts_female(self):
        per_field = fake_per_field(4, {"net": 2}, {"net": 2})
        tally = cross_field_tally(per_field, self.freq, min_fields=4,
                                  min_share=0.5)
        assert tally.rows[0].majority_gender is Gender.FEMALE

    def test_raising_min_fields_shrinks_selection(self):
        per_field = fake_per_field(20, {"net": 18, "sea": 16}, {})
        loose = cross_field_tally(per_field, self.freq, min_fields=10,
                                  min_share=0.7)
        strict = cross_field_tally(per_field, self.freq, min_fields=17,
                                   min_share=0.7)
        assert {r.term for r in strict.rows} <= {r.term for r in loose.rows}

    def test_significance_model_shape(self):
        per_field = fake_per_field(20, {"net": 18}, {})
        freq = dict(self.freq)
        freq.update({f"pad{i}": 500 for i in range(30)})
        tally = cross_field_tally(per_field, freq, min_fields=17, min_share=0.7)
        sig = tally.significance
        assert sig is not None
        assert sig.model.n == 20
        assert sig.model.t == 17
        assert sig.min_doc_freq == 400
        # eligible: 30 pads at 500 plus net at 400
        assert sig.model.vocab_size == 31
        assert sig.model.p == pytest.approx(tally.top_k / 31)
        assert 0.0 <= sig.union_bound <= 1.0
        assert sig.adjusted_n == round(20 / 2.2)
        assert sig.adjusted_t == round(17 / 2.2)

    def test_small_eligible_vocabulary_skips_model(self):
        per_field = fake_per_field(3, {"net": 3}, {})
        report = RunReport()
        tally = cross_field_tally(per_field, {"net": 100}, min_fields=3,
                                  min_share=0.7, report=report)
        assert tally.rows and tally.significance is None
        assert any("null model skipped" in w for w in tally.warnings)

    def test_missing_doc_freq_refused(self):
        per_field = fake_per_field(3, {"net": 3}, {})
        with pytest.raises(DataError):
            cross_field_tally(per_field, {"other": 5}, min_fields=3, min_share=0.7)

    def test_validation(self):
        per_field = fake_per_field(3, {"net": 3}, {})
        with pytest.raises(ConfigError):
            cross_field_tally(per_field, self.freq, min_share=0.4)
        with pytest.raises(ConfigError):
            cross_field_tally(per_field, self.freq, min_share=1.5)
        with pytest.raises(ConfigError):
            cross_field_tally(per_field, self.freq, min_fields=0)
        with pytest.raises(DataError):
            cross_field_tally({}, self.freq)

    def test_biased_fields_lookup(self):
        per_field = fake_per_field(5, {"net": 3}, {"net": 1})
        fields = biased_fields_for_term(per_field, "net", Gender.FEMALE)
        assert fields == {"F00", "F01", "F02"}


class TestKwic:
    def test_deterministic_sampling(self, care_index, care_corpus):
        corpus, _, _ = care_corpus
        deduped = corpus  # already one row per article
        one = kwic_sample(care_index, deduped, "nurse", n=5, seed=42)
        two = kwic_sample(care_index, deduped, "nurse", n=5, seed=42)
        assert [s.article_id for s in one] == [s.article_id for s in two]
        other = kwic_sample(care_index, deduped, "nurse", n=5, seed=43)
        assert [s.article_id for s in one] != [s.article_id for s in other]

    def test_small_candidate_pool_returns_all(self, care_index, care_corpus):
        corpus, _, _ = care_corpus
        report = RunReport()
        samples = kwic_sample(care_index, corpus, "hospice", n=30,
                              seed=0, report=report)
        assert len(samples) == 10
        assert any("only 10" in e.message for e in report.events)

    def test_offsets_highlight_term(self, care_index, care_corpus):
        corpus, _, _ = care_corpus
        for sample in kwic_sample(care_index, corpus, "nurse", n=5, seed=0):
            assert sample.offsets
            for start, end in sample.offsets:
                assert sample.window[start:end].lower() == "nurse"

    def test_offsets_cover_plural_variants(self):
        spec = {
            "a1": ("nurse visit", Gender.FEMALE),
            "a2": ("nurses visit", Gender.MALE),
        }
        corpus, labels = corpus_of(spec)
        index = build_index(corpus, labels, small_catalog("10"))
        from genderscope.ingest import dedupe_articles

        samples = kwic_sample(index, dedupe_articles(corpus), "nurse", n=10)
        windows = {s.article_id: s for s in samples}
        assert len(windows) == 2
        s2 = windows["a2"]
        start, end = s2.offsets[0]
        assert s2.window[start:end].lower() == "nurses"
        assert s2.gender is Gender.MALE

    def test_gender_and_field_filters(self, care_index, care_corpus):
        corpus, _, _ = care_corpus
        males = kwic_sample(care_index, corpus, "were", n=50,
                            gender=Gender.MALE)
        assert males and all(s.article_id.startswith("c-m") for s in males)
        assert all(s.gender is Gender.MALE for s in males)
        scoped = kwic_sample(care_index, corpus, "were", n=5,
                             fields={CARE_FIELD}, seed=1)
        assert all(s.field_codes == (CARE_FIELD,) for s in scoped)

    def test_missing_term(self, care_index, care_corpus):
        corpus, _, _ = care_corpus
        with pytest.raises(NotFoundError):
            kwic_sample(care_index, corpus, "zeppelin")
        with pytest.raises(ConfigError):
            kwic_sample(care_index, corpus, "nurse", n=0)


class TestCooccurrence:
    def make(self):
        spec = {}
        for i in range(20):
            words = ["base", "anchorterm"]
            if i < 16:
                words.append("friend")
            if i == 0:
                words.append("loner")
            gender = Gender.FEMALE if i < 10 else Gender.MALE
            spec[f"a{i:02d}"] = (" ".join(words), gender)
        for i in range(20):
            words = ["base"]
            if i < 2:
                words.append("friend")
            if i < 18:
                words.append("loner")
            gender = Gender.FEMALE if i < 10 else Gender.MALE
            spec[f"b{i:02d}"] = (" ".join(words), gender)
        corpus, labels = corpus_of(spec)
        return build_index(corpus, labels, small_catalog("10"))

    def test_attracted_term_found(self):
        index = self.make()
        result = cooccurrence_scan(index, "anchorterm")
        assert result.anchor_docs == 20
        assert result.other_docs == 20
        friend = next(e for e in result.entries if e.term == "friend")
        assert (friend.with_anchor, friend.without_anchor) == (16, 2)
        assert friend.share_with == pytest.approx(0.8)
        assert friend.share_without == pytest.approx(0.1)

    def test_repelled_term_excluded(self):
        index = self.make()
        result = cooccurrence_scan(index, "anchorterm")
        assert all(e.term != "loner" for e in result.entries)

    def test_ubiquitous_term_degenerate(self):
        index = self.make()
        result = cooccurrence_scan(index, "anchorterm")
        # "base" sits in every article: its without-term column is empty
        assert all(e.term != "base" for e in result.entries)
        assert result.skipped_degenerate >= 1

    def test_sorted_by_chi2_and_limited(self):
        index = self.make()
        result = cooccurrence_scan(index, "anchorterm")
        chi2s = [e.chi2 for e in result.entries]
        assert chi2s == sorted(chi2s, reverse=True)
        limited = cooccurrence_scan(index, "anchorterm", limit=1)
        assert len(limited.entries) == 1

    def test_same_gender_baseline(self):
        index = self.make()
        result = cooccurrence_scan(index, "anchorterm",
                                   baseline=BASELINE_SAME_GENDER,
                                   gender=Gender.FEMALE)
        assert result.gender is Gender.FEMALE
        assert result.anchor_docs == 10
        assert result.other_docs == 10
        friend = next(e for e in result.entries if e.term == "friend")
        # every female anchor article has it; two female others do
        assert (friend.with_anchor, friend.without_anchor) == (10, 2)
        assert friend.share_without == pytest.approx(0.2)

    def test_validation(self):
        index = self.make()
        with pytest.raises(ConfigError):
            cooccurrence_scan(index, "anchorterm", baseline="everything")
        with pytest.raises(ConfigError):
            cooccurrence_scan(index, "anchorterm", baseline=BASELINE_SAME_GENDER)
        with pytest.raises(NotFoundError):
            cooccurrence_scan(index, "zeppelin")
        assert cooccurrence_scan(index, "anchorterm",
                                 baseline=BASELINE_ALL).gender is None
