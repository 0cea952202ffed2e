import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alloyvae import data as D


def write_csv(tmp_path, text, name="ds.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_bundled_dataset():
    records = D.load_dataset(D.bundled_dataset_path())
    assert len(records) == 1373
    assert {r.label for r in records} == {0, 1}


def test_load_paper_row(tmp_path):
    p = write_csv(tmp_path, "formula,label\nFe20Ni20Co20Ti20Cu20,1\n")
    records = D.load_dataset(p)
    assert len(records) == 1
    assert records[0].label == 1
    assert records[0].composition["Fe"] == pytest.approx(0.2)


def test_load_empty_file(tmp_path):
    p = write_csv(tmp_path, "formula,label\n")
    with pytest.raises(D.EmptyDatasetError):
        D.load_dataset(p)


def test_load_duplicates_preserved(tmp_path):
    p = write_csv(tmp_path, "formula,label\nFe50Ni50,1\nFe50Ni50,1\n")
    assert len(D.load_dataset(p)) == 2


def test_load_drops_out_of_vocabulary_rows(tmp_path, caplog):
    p = write_csv(tmp_path, "formula,label\nFe50Ni50,1\nU50Pu50,0\n")
    with caplog.at_level("INFO"):
        records = D.load_dataset(p)
    assert len(records) == 1
    assert any("dropped 1" in m for m in caplog.messages)


def test_load_label_not_binary(tmp_path):
    p = write_csv(tmp_path, "formula,label\nFe50Ni50,2\n")
    with pytest.raises(D.LabelNotBinaryError):
        D.load_dataset(p)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        D.load_dataset(tmp_path / "nope.csv")


def test_load_malformed_row(tmp_path):
    p = write_csv(tmp_path, "formula,label\nFe50***,1\n")
    with pytest.raises(D.ParseRowError):
        D.load_dataset(p)


@pytest.fixture(scope="module")
def records():
    return D.load_dataset(D.bundled_dataset_path())


def test_split_default_sizes(records):
    s = D.split(records, seed=0)
    assert s.sizes() == (864, 296, 75, 138)


def test_split_deterministic_and_disjoint(records):
    a = D.split(records, seed=3)
    b = D.split(records, seed=3)
    for name in ("labelled", "unlabelled", "validation", "test"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    combined = np.concatenate([a.labelled, a.unlabelled, a.validation, a.test])
    assert len(combined) == len(set(combined.tolist())) == len(records)


def test_split_seeds_differ(records):
    a = D.split(records, seed=0)
    b = D.split(records, seed=1)
    assert not np.array_equal(a.labelled, b.labelled)


def test_split_same_test_set_across_size_schemes(records):
    # both schemes exhaust the dataset, so the trailing test block coincides
    a = D.split(records, sizes=(864, 296, 75, 138), seed=2)
    b = D.split(records, sizes=(247, 790, 198, 138), seed=2)
    assert np.array_equal(a.test, b.test)


def test_split_sizes_exceed(records):
    with pytest.raises(D.SizesExceedDatasetError):
        D.split(records, sizes=(2000, 0, 0, 0), seed=0)


def test_split_json_round_trip(records):
    s = D.split(records, seed=5)
    t = D.DataSplits.from_json(s.to_json())
    assert np.array_equal(s.labelled, t.labelled)
    assert np.array_equal(s.test, t.test)
    assert t.seed == 5


def test_accuracy_threshold_and_ties():
    preds = [0.9, 0.4, 0.5, 0.5]
    labels = [1, 0, 1, 0]
    # ties at 0.5 count positive: predictions become 1,0,1,1
    assert D.accuracy(preds, labels) == pytest.approx(3 / 4)


def test_accuracy_all_half_scores_equals_positive_fraction():
    labels = [1, 0, 1, 0, 1, 0]
    assert D.accuracy([0.5] * 6, labels) == pytest.approx(0.5)


def test_roc_perfect_separation():
    curve = D.roc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert curve.auc == pytest.approx(1.0)


def test_roc_derived_example():
    # pairs: (0.9,0.8) ok, (0.9,0.3) ok, (0.4,0.8) wrong, (0.4,0.3) ok -> 3/4
    curve = D.roc([0.9, 0.8, 0.4, 0.3], [1, 0, 1, 0])
    assert curve.auc == pytest.approx(0.75)


def test_roc_curve_monotone_and_endpoints():
    rng = np.random.default_rng(0)
    preds = rng.random(200)
    labels = (rng.random(200) < 0.4).astype(int)
    curve = D.roc(preds, labels)
    assert np.all(np.diff(curve.fpr) >= 0)
    assert np.all(np.diff(curve.tpr) >= 0)
    assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
    assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0


def test_roc_degenerate_labels():
    with pytest.raises(D.DegenerateLabelsError):
        D.roc([0.5, 0.6], [1, 1])


def pair_statistic(preds, labels):
    preds = np.asarray(preds, dtype=float)
    labels = np.asarray(labels)
    pos = preds[labels == 1]
    neg = preds[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


@given(st.lists(st.tuples(st.integers(0, 1), st.floats(0, 1, allow_nan=False)),
                min_size=4, max_size=200))
@settings(max_examples=80, deadline=None)
def test_auc_equals_mann_whitney_pair_statistic(items):
    labels = [lb for lb, _ in items]
    preds = [p for _, p in items]
    if len(set(labels)) < 2:
        return
    curve = D.roc(preds, labels)
    assert curve.auc == pytest.approx(pair_statistic(preds, labels), abs=1e-12)


def test_auc_pair_statistic_with_heavy_ties():
    preds = [0.5, 0.5, 0.5, 0.7, 0.3, 0.5]
    labels = [1, 0, 1, 1, 0, 0]
    curve = D.roc(preds, labels)
    assert curve.auc == pytest.approx(pair_statistic(preds, labels), abs=1e-12)
