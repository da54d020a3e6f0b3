from __future__ import annotations

import pytest

from genderscope.gender import Gender
from genderscope.ingest import ArticleRecord, Corpus, FieldCatalog
from genderscope.textprep import build_index

from fixture_gen import (
    CARE_FIELD,
    CARE_TERMS,
    N_CARE_F,
    N_CARE_M,
    write_planted_fixture,
    write_smoke_fixture,
)

__all__ = ["CARE_FIELD", "CARE_TERMS", "N_CARE_F", "N_CARE_M"]


def build_care_corpus() -> tuple[Corpus, dict[str, Gender], FieldCatalog]:
    """The care field as in-memory records: 124 female- and 41
    male-authored articles whose titles hold exactly the tabulated terms."""
    records = []
    labels: dict[str, Gender] = {}
    for i in range(N_CARE_F):
        aid = f"c-f{i:03d}"
        title = " ".join(t for t, f, _, _ in CARE_TERMS if i < f)
        records.append(ArticleRecord(aid, 2016, frozenset({CARE_FIELD}),
                                     "Mary", "", title, "", ()))
        labels[aid] = Gender.FEMALE
    for i in range(N_CARE_M):
        aid = f"c-m{i:03d}"
        title = " ".join(t for t, _, m, _ in CARE_TERMS if i < m)
        records.append(ArticleRecord(aid, 2016, frozenset({CARE_FIELD}),
                                     "John", "", title, "", ()))
        labels[aid] = Gender.MALE
    catalog = FieldCatalog({CARE_FIELD: ("Community and Home Care", "Nursing")},
                           minimum_gendered_articles=50)
    return Corpus(tuple(records), "deduplicated"), labels, catalog


@pytest.fixture(scope="session")
def care_corpus():
    return build_care_corpus()


@pytest.fixture(scope="session")
def care_index(care_corpus):
    corpus, labels, catalog = care_corpus
    return build_index(corpus, labels, catalog)


@pytest.fixture(scope="session")
def smoke_dir(tmp_path_factory):
    dest = tmp_path_factory.mktemp("smoke")
    write_smoke_fixture(dest)
    return dest


@pytest.fixture(scope="session")
def planted_dir(tmp_path_factory):
    dest = tmp_path_factory.mktemp("planted")
    write_planted_fixture(dest)
    return dest


@pytest.fixture(scope="session")
def smoke_run(smoke_dir, tmp_path_factory):
    """One pipeline run over the smoke fixture, shared across tests."""
    from genderscope.pipeline import RunConfig, run_pipeline

    out = tmp_path_factory.mktemp("smoke-out")
    config = RunConfig.load(smoke_dir / "run.ini", output_dir=str(out))
    return run_pipeline(config)
