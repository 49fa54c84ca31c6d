"""The bundled fixture corpora stay ingestible and correctly sized."""

from pathlib import Path

from sentmatch.data import read_dataset

DATA = Path(__file__).resolve().parent.parent / "data"


def test_bundled_classification_fixtures_ingest_completely():
    for name, expected in (("tiny_train.tsv", 64), ("tiny_dev.tsv", 24)):
        path = DATA / name
        assert len(read_dataset(path, "snli")) == expected == len(path.read_text().splitlines())


def test_bundled_ranking_fixture_has_grouped_candidates():
    pairs = read_dataset(DATA / "tiny_rank.tsv", "wikiqa")
    assert len(pairs) == 20
    groups = {p.group_id for p in pairs}
    assert len(groups) == 5
    for gid in groups:
        members = [p for p in pairs if p.group_id == gid]
        assert sum(p.label for p in members) == 1  # exactly one relevant answer
