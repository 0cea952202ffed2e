"""Dataset ingestion, deterministic seeded splitting and evaluation metrics."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .elements import Composition, UnknownElementError, parse_formula

log = logging.getLogger(__name__)

DEFAULT_SPLIT_SIZES = (864, 296, 75, 138)  # labelled, unlabelled, validation, test


class DatasetError(ValueError):
    pass


class ParseRowError(DatasetError):
    pass


class LabelNotBinaryError(DatasetError):
    pass


class EmptyDatasetError(DatasetError):
    pass


class SizesExceedDatasetError(DatasetError):
    pass


class DegenerateLabelsError(ValueError):
    pass


@dataclass(frozen=True)
class AlloyRecord:
    composition: Composition
    label: int  # 1 = single phase, 0 = multiple phases
    formula: str  # as read from the source file

    def __post_init__(self):
        if self.label not in (0, 1):
            raise LabelNotBinaryError(f"label must be 0 or 1, got {self.label!r}")


def bundled_dataset_path() -> Path:
    return Path(str(resources.files("alloyvae.resources").joinpath("hea_dataset.csv")))


def load_dataset(path) -> list[AlloyRecord]:
    """Read a ``formula,label`` CSV; rows with out-of-vocabulary elements are
    dropped (count logged), anything else malformed raises."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None or not {"formula", "label"} <= set(reader.fieldnames):
        raise ParseRowError(f"{path}: expected a header with formula,label columns")
    records = []
    dropped = 0
    for i, row in enumerate(reader, start=2):
        formula = (row["formula"] or "").strip()
        raw_label = (row["label"] or "").strip()
        if raw_label not in ("0", "1"):
            raise LabelNotBinaryError(f"{path} row {i}: label {raw_label!r} is not 0/1")
        try:
            comp = parse_formula(formula)
        except UnknownElementError:
            dropped += 1
            continue
        except ValueError as exc:
            raise ParseRowError(f"{path} row {i}: {exc}") from exc
        records.append(AlloyRecord(comp, int(raw_label), formula))
    if dropped:
        log.info("dropped %d rows with out-of-vocabulary elements from %s", dropped, path)
    if not records:
        raise EmptyDatasetError(f"{path}: no usable rows")
    return records


@dataclass(frozen=True)
class DataSplits:
    labelled: np.ndarray
    unlabelled: np.ndarray
    validation: np.ndarray
    test: np.ndarray
    seed: int

    def sizes(self) -> tuple[int, int, int, int]:
        return (len(self.labelled), len(self.unlabelled), len(self.validation), len(self.test))

    def to_json(self) -> str:
        return json.dumps(
            {
                "seed": self.seed,
                "labelled": self.labelled.tolist(),
                "unlabelled": self.unlabelled.tolist(),
                "validation": self.validation.tolist(),
                "test": self.test.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "DataSplits":
        d = json.loads(text)
        return cls(
            labelled=np.array(d["labelled"], dtype=np.intp),
            unlabelled=np.array(d["unlabelled"], dtype=np.intp),
            validation=np.array(d["validation"], dtype=np.intp),
            test=np.array(d["test"], dtype=np.intp),
            seed=int(d["seed"]),
        )


def split(records, sizes=DEFAULT_SPLIT_SIZES, seed: int = 0) -> DataSplits:
    """Partition record indices as labelled/unlabelled/validation/test, in that
    order, from one seeded permutation."""
    n_lab, n_unlab, n_val, n_test = sizes
    total = n_lab + n_unlab + n_val + n_test
    if total > len(records):
        raise SizesExceedDatasetError(
            f"split sizes sum to {total} but dataset has {len(records)} records"
        )
    perm = np.random.default_rng(seed).permutation(len(records))
    bounds = np.cumsum([n_lab, n_unlab, n_val, n_test])
    return DataSplits(
        labelled=perm[: bounds[0]],
        unlabelled=perm[bounds[0]: bounds[1]],
        validation=perm[bounds[1]: bounds[2]],
        test=perm[bounds[2]: bounds[3]],
        seed=seed,
    )


def accuracy(predictions, labels, threshold: float = 0.5) -> float:
    """Fraction correct at the threshold; ties count as positive."""
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels)
    if p.shape != y.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {y.shape}")
    return float(((p >= threshold).astype(int) == y).mean())


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def roc(predictions, labels) -> RocCurve:
    """ROC by sweeping every distinct score (predict positive at score >= t);
    AUC by trapezoid, which matches the ties-count-half pair statistic."""
    p = np.asarray(predictions, dtype=np.float64)
    y = np.asarray(labels)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("roc needs at least one positive and one negative")
    order = np.argsort(-p, kind="stable")
    ps, ys = p[order], y[order]
    distinct = np.nonzero(np.diff(ps))[0]
    cut = np.concatenate([distinct, [len(ps) - 1]])
    tp = np.cumsum(ys == 1)[cut]
    fp = np.cumsum(ys == 0)[cut]
    thresholds = np.concatenate([[np.inf], ps[cut]])
    tpr = np.concatenate([[0.0], tp / n_pos])
    fpr = np.concatenate([[0.0], fp / n_neg])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=auc)
