from __future__ import annotations

import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genderscope.errors import DataError
from genderscope.gender import Gender
from genderscope.ingest import ArticleRecord, Corpus, FieldCatalog
from genderscope.textprep import (
    DEFAULT_RULES,
    TermIndex,
    TokenRules,
    build_index,
    compose_text,
    depluralize,
    load_stoplist,
    normalize_text,
    tokenize,
    tokenize_with_spans,
)

from conftest import CARE_TERMS, N_CARE_F, N_CARE_M


class TestTokenize:
    def test_hyphen_joins(self):
        assert tokenize("End-of-life care") == {"end-of-life", "care"}

    def test_apostrophes_join(self):
        assert tokenize("the patient's family") == {"the", "patient's", "family"}
        assert tokenize("women’s health") == {"women’s", "health"}

    def test_edge_joiners_stripped(self):
        assert tokenize("--rock' 'n' roll-") == {"rock", "n", "roll"}

    def test_pure_joiner_run_dropped(self):
        assert tokenize("a -- b") == {"a", "b"}

    def test_underscore_splits(self):
        assert tokenize("alpha_beta") == {"alpha", "beta"}

    def test_digits_kept(self):
        assert tokenize("covid-19 in 2016") == {"covid-19", "in", "2016"}

    def test_case_folding(self):
        assert tokenize("Nurse NURSE nurse") == {"nurse"}

    def test_min_length(self):
        rules = TokenRules(min_length=2)
        assert tokenize("n of 41", rules) == {"of", "41"}

    def test_nfc_normalization(self):
        decomposed = "café"  # e followed by a combining acute
        spans = tokenize_with_spans(decomposed)
        assert [t for t, _, _ in spans] == ["café"]
        token, start, end = spans[0]
        assert normalize_text(decomposed)[start:end] == "café"

    def test_spans_slice_back(self):
        text = "Palliative care at End-of-Life; nurses' views"
        normalized = normalize_text(text)
        for token, start, end in tokenize_with_spans(text):
            assert normalized[start:end].lower() == token

    @given(st.text(max_size=200))
    @settings(deadline=None)
    def test_spans_always_slice_back(self, text):
        normalized = normalize_text(text)
        for token, start, end in tokenize_with_spans(text):
            assert normalized[start:end].lower() == token
            assert token == token.strip(DEFAULT_RULES.intra_chars)

    @given(st.text(max_size=200))
    @settings(deadline=None)
    def test_rejoining_is_stable(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(sorted(tokens))) == tokens


class TestDepluralize:
    vocab = frozenset({"nurse", "nurses", "home", "axe", "axes"})

    def test_conditional_strips_known_stem(self):
        assert depluralize("nurses", self.vocab) == "nurse"
        assert depluralize("axes", self.vocab) == "axe"

    def test_conditional_keeps_unknown_stem(self):
        assert depluralize("babies", self.vocab) == "babies"

    def test_always_strips_unconditionally(self):
        assert depluralize("babies", self.vocab, "always") == "babie"

    def test_off_is_identity(self):
        assert depluralize("nurses", self.vocab, "off") == "nurses"

    def test_short_terms_untouched(self):
        assert depluralize("gas", self.vocab, "always") == "gas"
        assert depluralize("ss", self.vocab, "always") == "ss"

    def test_double_s_untouched(self):
        assert depluralize("illness", self.vocab, "always") == "illness"
        assert depluralize("class", self.vocab, "always") == "class"

    def test_non_plural_untouched(self):
        assert depluralize("home", self.vocab) == "home"

    def test_unknown_mode(self):
        with pytest.raises(DataError):
            depluralize("nurses", self.vocab, "maybe")


def record(aid, codes, title, gender_name="Mary", abstract="", keywords=()):
    return ArticleRecord(aid, 2016, frozenset(codes), gender_name, "",
                         title, abstract, tuple(keywords))


def mini_catalog(*codes):
    return FieldCatalog({c: (f"Field {c}", "Broad") for c in codes},
                        minimum_gendered_articles=1)


class TestComposeText:
    def test_all_parts_searchable(self):
        r = record("a1", {"10"}, "Title words", abstract="Abstract words",
                   keywords=("first keyword", "second"))
        tokens = tokenize(compose_text(r))
        assert {"title", "abstract", "keyword", "second"} <= tokens


class TestBuildIndex:
    def make(self, rows, labels, codes=("10",), **kwargs):
        corpus = Corpus(tuple(rows), "per-field")
        return build_index(corpus, labels, mini_catalog(*codes), **kwargs)

    def test_care_partition_sizes(self, care_index):
        from conftest import CARE_FIELD

        assert care_index.overall_partition(Gender.FEMALE).size == N_CARE_F
        assert care_index.overall_partition(Gender.MALE).size == N_CARE_M
        assert care_index.field_partition(CARE_FIELD, Gender.FEMALE).size == N_CARE_F
        assert care_index.field_codes() == [CARE_FIELD]

    def test_care_postings_match_plan(self, care_index):
        for term, f_count, m_count, _ in CARE_TERMS:
            assert care_index.overall_partition(Gender.FEMALE).doc_count(term) == f_count
            assert care_index.overall_partition(Gender.MALE).doc_count(term) == m_count

    def test_incidence_not_frequency(self):
        idx = self.make(
            [record("a1", {"10"}, "nurse nurse nurse")],
            {"a1": Gender.FEMALE},
        )
        assert idx.overall_partition(Gender.FEMALE).doc_count("nurse") == 1

    def test_deplural_merges_postings(self):
        idx = self.make(
            [record("a1", {"10"}, "nurse"), record("a2", {"10"}, "nurses")],
            {"a1": Gender.FEMALE, "a2": Gender.FEMALE},
        )
        part = idx.overall_partition(Gender.FEMALE)
        assert part.doc_count("nurse") == 2
        assert part.doc_count("nurses") == 0
        assert idx.final_term("nurses") == "nurse"
        assert "nurses" in idx.vocabulary

    def test_stoplist_removes_terms(self):
        idx = self.make(
            [record("a1", {"10"}, "nurse reserved")],
            {"a1": Gender.FEMALE},
            stoplist=frozenset({"reserved"}),
        )
        part = idx.overall_partition(Gender.FEMALE)
        assert part.doc_count("nurse") == 1
        assert part.doc_count("reserved") == 0

    def test_unknown_gender_excluded(self):
        idx = self.make(
            [record("a1", {"10"}, "nurse"), record("a2", {"10"}, "nurse")],
            {"a1": Gender.FEMALE, "a2": Gender.UNKNOWN},
        )
        assert idx.overall_partition(Gender.FEMALE).doc_count("nurse") == 1
        assert idx.overall_partition(Gender.MALE).size == 0

    def test_multi_field_article_in_both_partitions(self):
        idx = self.make(
            [record("a1", {"10", "20"}, "shared term")],
            {"a1": Gender.MALE},
            codes=("10", "20"),
        )
        assert idx.field_partition("10", Gender.MALE).doc_count("shared") == 1
        assert idx.field_partition("20", Gender.MALE).doc_count("shared") == 1
        assert idx.overall_doc_freq("shared") == 1

    def test_unknown_field_code_refused(self):
        with pytest.raises(DataError):
            self.make([record("a1", {"99"}, "nurse")], {"a1": Gender.FEMALE})

    def test_record_order_does_not_matter(self):
        rows = [
            record("a1", {"10"}, "nurse home"),
            record("a2", {"10"}, "nurses support", "John"),
            record("a3", {"20"}, "home visit"),
        ]
        labels = {"a1": Gender.FEMALE, "a2": Gender.MALE, "a3": Gender.FEMALE}
        forward = self.make(rows, labels, codes=("10", "20"))
        backward = self.make(rows[::-1], labels, codes=("10", "20"))
        assert forward.to_json() == backward.to_json()

    def test_docs_with_term_filters(self):
        rows = [
            record("a1", {"10"}, "nurse"),
            record("a2", {"20"}, "nurse", "John"),
            record("a3", {"20"}, "nurse"),
        ]
        labels = {"a1": Gender.FEMALE, "a2": Gender.MALE, "a3": Gender.FEMALE}
        idx = self.make(rows, labels, codes=("10", "20"))
        assert idx.docs_with_term("nurse") == {"a1", "a2", "a3"}
        assert idx.docs_with_term("nurse", fields={"20"}) == {"a2", "a3"}
        assert idx.docs_with_term("nurse", gender=Gender.MALE) == {"a2"}
        assert idx.docs_with_term("nurse", fields={"20"}, gender=Gender.FEMALE) == {"a3"}


class TestSnapshot:
    def test_json_round_trip(self, care_index):
        clone = TermIndex.from_json(care_index.to_json())
        assert clone == care_index

    def test_file_round_trip_is_deterministic(self, care_index, tmp_path):
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        care_index.save(first)
        TermIndex.load(first).save(second)
        assert first.read_bytes() == second.read_bytes()

    def test_version_mismatch_refused(self, care_index):
        data = care_index.to_json()
        data["version"] = 99
        with pytest.raises(DataError):
            TermIndex.from_json(data)


class TestStoplistFile:
    def test_load(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("# layout artifacts\nreserved\nRights\n\nelsevier\n",
                        encoding="utf-8")
        assert load_stoplist(path) == {"reserved", "rights", "elsevier"}
