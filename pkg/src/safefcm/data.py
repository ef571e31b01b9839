"""Dataset loading, synthesis, standardization, splitting, and label corruption."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace

import numpy as np

DATA_DIR_ENV = "SAFEFCM_DATA_DIR"

# (rows, features, classes) for every benchmark dataset.
DATASET_SHAPES = {
    "bupa": (345, 5, 2),
    "dermatology": (358, 33, 6),
    "diabetes": (768, 8, 2),
    "gauss50": (1550, 50, 2),
    "gauss50x": (2000, 50, 2),
    "heart": (297, 13, 2),
    "waveform": (5000, 21, 3),
    "wdbc": (568, 30, 2),
}


class DatasetNotFoundError(FileNotFoundError):
    """Raised when a benchmark dataset has no local CSV and no generator."""


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass
class Dataset:
    """Feature matrix with ground-truth classes re-indexed to 1..c."""

    features: np.ndarray  # (n, dim) float64
    ground_truth: np.ndarray  # (n,) int, values in 1..num_classes
    num_classes: int
    name: str = ""

    def __post_init__(self):
        self.features = _readonly(np.asarray(self.features, dtype=float))
        self.ground_truth = _readonly(np.asarray(self.ground_truth, dtype=int))
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d matrix")
        if self.features.shape[0] != self.ground_truth.shape[0]:
            raise ValueError("features and ground_truth length mismatch")
        if not np.all(np.isfinite(self.features)):
            raise ValueError(f"{self.name or 'dataset'}: non-finite feature values")
        present = np.unique(self.ground_truth)
        if self.num_classes < 2:
            raise ValueError("dataset must have at least 2 classes")
        if present[0] < 1 or present[-1] > self.num_classes:
            raise ValueError("class ids must lie in 1..num_classes")
        if len(present) != self.num_classes:
            raise ValueError("every class in 1..num_classes must appear")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]


@dataclass
class SemiSupervisedView:
    """A dataset reordered so the l labeled instances come first.

    ``provided_labels`` are the (possibly corrupted) labels handed to an
    algorithm; ``ground_truth`` is never altered by corruption.
    """

    base: Dataset
    features: np.ndarray  # (n, dim), labeled rows first
    ground_truth: np.ndarray  # (n,), aligned with features
    labeled_indices: np.ndarray  # (l,) row indices into base.features
    unlabeled_indices: np.ndarray  # (n-l,)
    provided_labels: np.ndarray  # (l,)
    mislabel_mask: np.ndarray  # (l,) bool

    def __post_init__(self):
        self.features = _readonly(self.features)
        self.ground_truth = _readonly(self.ground_truth)
        self.labeled_indices = _readonly(np.asarray(self.labeled_indices, dtype=int))
        self.unlabeled_indices = _readonly(np.asarray(self.unlabeled_indices, dtype=int))
        self.provided_labels = _readonly(np.asarray(self.provided_labels, dtype=int))
        self.mislabel_mask = _readonly(np.asarray(self.mislabel_mask, dtype=bool))

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def n_labeled(self):
        return len(self.labeled_indices)

    @property
    def num_classes(self):
        return self.base.num_classes

    def semi_supervised_targets(self):
        """Labels in the reordered frame: provided labels first, -1 for unlabeled."""
        y = np.full(self.n, -1, dtype=int)
        y[: self.n_labeled] = self.provided_labels
        return y


def one_hot_labels(labels, num_classes):
    """(c, len(labels)) one-hot matrix for class ids in 1..c."""
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 1 or labels.max() > num_classes):
        raise ValueError("labels out of range 1..num_classes")
    f = np.zeros((num_classes, len(labels)))
    f[labels - 1, np.arange(len(labels))] = 1.0
    return f


# ---------------------------------------------------------------------------
# CSV loading
# ---------------------------------------------------------------------------

def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows


def _looks_like_header(row):
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _map_labels(raw):
    """Map raw label strings to contiguous ids 1..c (sorted order)."""
    try:
        keys = sorted({int(v) for v in raw})
        lookup = {k: i + 1 for i, k in enumerate(keys)}
        return np.array([lookup[int(v)] for v in raw]), len(keys)
    except ValueError:
        keys = sorted({v.strip() for v in raw})
        lookup = {k: i + 1 for i, k in enumerate(keys)}
        return np.array([lookup[v.strip()] for v in raw]), len(keys)


def load_csv(path, label_column=-1, name=None):
    """Load a dataset from a CSV file (header row optional).

    Feature cells must parse as floats; the label column may hold integers or
    category names, re-indexed to 1..c in sorted order. Row order is preserved.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    rows = _read_rows(path)
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    ncol = len(rows[0])
    lab = label_column if label_column >= 0 else ncol + label_column
    feats, raw_labels = [], []
    for i, row in enumerate(rows):
        if len(row) != ncol:
            raise ValueError(f"{path}: row {i} has {len(row)} cells, expected {ncol}")
        try:
            feats.append([float(v) for j, v in enumerate(row) if j != lab])
        except ValueError as exc:
            raise ValueError(f"{path}: row {i}: {exc}") from None
        raw_labels.append(row[lab])
    labels, c = _map_labels(raw_labels)
    if c < 2:
        raise ValueError(f"{path}: single-class dataset")
    return Dataset(np.array(feats), labels, c, name=name or os.path.basename(path))


def export_csv(ds, path):
    """Write a dataset in the same CSV format load_csv reads (label last)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"f{j + 1}" for j in range(ds.dim)] + ["label"])
        for x, y in zip(ds.features, ds.ground_truth):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


# ---------------------------------------------------------------------------
# Dataset-specific recipes
# ---------------------------------------------------------------------------

def bupa_target(raw_row):
    """Class id from a raw liver-disorders row: drinks (column 6) below 3 or not."""
    row = np.asarray(raw_row, dtype=float)
    if row.shape[0] < 6:
        raise ValueError("row must have at least 6 columns")
    x6 = row[5]
    if not np.isfinite(x6):
        raise ValueError("non-finite drinks value")
    return 1 if x6 < 3 else 2


def load_bupa(path):
    """Liver-disorders data: 5 features, class from the drinks column."""
    rows = _read_rows(path)
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    feats, labels = [], []
    for row in rows:
        vals = [float(v) for v in row]
        feats.append(vals[:5])
        labels.append(bupa_target(vals))
    return Dataset(np.array(feats), np.array(labels), 2, name="bupa")


def load_dermatology(path):
    """Dermatology data: drop rows with missing age, drop the age column."""
    rows = _read_rows(path)
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    feats, labels = [], []
    for row in rows:
        if any(v.strip() == "?" for v in row):
            continue
        vals = [float(v) for v in row]
        feats.append(vals[:33])  # clinical + histopathological, age excluded
        labels.append(int(vals[-1]))
    labels, c = _map_labels([str(v) for v in labels])
    return Dataset(np.array(feats), labels, c, name="dermatology")


def load_heart(path):
    """Cleveland heart data: drop rows with '?', binarize disease presence."""
    rows = _read_rows(path)
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    feats, labels = [], []
    for row in rows:
        if any(v.strip() == "?" for v in row):
            continue
        vals = [float(v) for v in row]
        feats.append(vals[:13])
        labels.append(1 if vals[13] == 0 else 2)
    return Dataset(np.array(feats), np.array(labels), 2, name="heart")


def _load_wdbc_bundled():
    # scikit-learn ships the WDBC data; used when no local CSV is provided.
    from sklearn.datasets import load_breast_cancer

    d = load_breast_cancer()
    return Dataset(d.data, d.target + 1, 2, name="wdbc")


# ---------------------------------------------------------------------------
# Synthetic generators
# ---------------------------------------------------------------------------

def gen_gauss(kind, seed):
    """Two-class 50-d Gaussian benchmarks with class means at +/-0.25.

    ``gauss50``: one unit-covariance normal per class, 775 + 775 points.
    ``gauss50x``: each class a two-component mixture (proportions 0.6/0.4)
    whose components are shifted +/-0.5 along the first 10 features, giving
    overlapping, harder-to-separate classes; 1000 + 1000 points.
    """
    rng = np.random.default_rng(seed)
    dim = 50
    if kind == "gauss50":
        sizes = (775, 775)
        blocks, labels = [], []
        for cls, nc in enumerate(sizes, start=1):
            mean = 0.25 if cls == 1 else -0.25
            blocks.append(rng.standard_normal((nc, dim)) + mean)
            labels.append(np.full(nc, cls))
        return Dataset(np.vstack(blocks), np.concatenate(labels), 2, name="gauss50")
    if kind == "gauss50x":
        sizes = (1000, 1000)
        shift = np.zeros(dim)
        shift[:10] = 0.5
        blocks, labels = [], []
        for cls, nc in enumerate(sizes, start=1):
            base = 0.25 if cls == 1 else -0.25
            n_a = _round_half_up(0.6 * nc)
            for ncomp, sgn in ((n_a, 1.0), (nc - n_a, -1.0)):
                blocks.append(rng.standard_normal((ncomp, dim)) + base + sgn * shift)
            labels.append(np.full(nc, cls))
        return Dataset(np.vstack(blocks), np.concatenate(labels), 2, name="gauss50x")
    raise ValueError(f"unknown gaussian dataset kind: {kind}")


def gen_waveform(seed, n=5000):
    """Three-class waveform data (21 attributes).

    Each sample is a random convex combination of two of three triangular
    base waves, sampled at 21 positions, plus unit Gaussian noise. This is
    the standard generator behind the public waveform benchmark file.
    """
    rng = np.random.default_rng(seed)
    i = np.arange(1, 22)
    h1 = np.maximum(6.0 - np.abs(i - 7), 0.0)
    h2 = np.maximum(6.0 - np.abs(i - 15), 0.0)
    h3 = np.maximum(6.0 - np.abs(i - 11), 0.0)
    pairs = [(h1, h2), (h1, h3), (h2, h3)]
    counts = [n // 3 + (1 if r < n % 3 else 0) for r in range(3)]
    blocks, labels = [], []
    for cls, (nc, (a, b)) in enumerate(zip(counts, pairs), start=1):
        u = rng.uniform(size=(nc, 1))
        blocks.append(u * a + (1 - u) * b + rng.standard_normal((nc, 21)))
        labels.append(np.full(nc, cls))
    return Dataset(np.vstack(blocks), np.concatenate(labels), 3, name="waveform")


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_CSV_CANDIDATES = {
    "bupa": ("bupa.csv", "bupa.data"),
    "dermatology": ("dermatology.csv", "dermatology.data"),
    "diabetes": ("diabetes.csv",),
    "heart": ("heart.csv", "processed.cleveland.data"),
    "wdbc": ("wdbc.csv",),
    "waveform": ("waveform.csv", "waveform-+noise.data"),
    "gauss50": ("gauss50.csv",),
    "gauss50x": ("gauss50x.csv",),
}

_RECIPES = {
    "bupa": load_bupa,
    "dermatology": load_dermatology,
    "heart": load_heart,
    "diabetes": lambda p: replace(load_csv(p, label_column=-1), name="diabetes"),
    "wdbc": lambda p: replace(load_csv(p, label_column=-1), name="wdbc"),
    "waveform": lambda p: replace(load_csv(p, label_column=-1), name="waveform"),
    "gauss50": lambda p: replace(load_csv(p, label_column=-1), name="gauss50"),
    "gauss50x": lambda p: replace(load_csv(p, label_column=-1), name="gauss50x"),
}


def data_dir(explicit=None):
    return explicit or os.environ.get(DATA_DIR_ENV) or "data"


def dataset_csv_path(name, directory=None):
    """Path of a local CSV for the named dataset, or None."""
    d = data_dir(directory)
    for cand in _CSV_CANDIDATES.get(name, (f"{name}.csv",)):
        p = os.path.join(d, cand)
        if os.path.exists(p):
            return p
    return None


def load_dataset(name, directory=None, seed=0):
    """Load a benchmark dataset by name.

    Local CSVs under the data directory take precedence. gauss50, gauss50x
    and waveform fall back to their generators; wdbc falls back to the copy
    bundled with scikit-learn. The remaining benchmarks are real clinical
    datasets and must be provided as CSV files.
    """
    path = dataset_csv_path(name, directory)
    if path is not None:
        return _RECIPES[name](path)
    if name in ("gauss50", "gauss50x"):
        return gen_gauss(name, seed)
    if name == "waveform":
        return gen_waveform(seed)
    if name == "wdbc":
        return _load_wdbc_bundled()
    raise DatasetNotFoundError(
        f"dataset '{name}' not found under '{data_dir(directory)}' "
        f"(expected one of {_CSV_CANDIDATES.get(name, (name + '.csv',))}); "
        f"set ${DATA_DIR_ENV} or pass a directory"
    )


# ---------------------------------------------------------------------------
# Preprocessing / protocol operations
# ---------------------------------------------------------------------------

def standardize(ds):
    """Z-score each feature (population std); constant features map to 0."""
    x = ds.features
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    out = np.where(sd > 0, (x - mu) / np.where(sd > 0, sd, 1.0), 0.0)
    return replace(ds, features=out)


def split_labeled(ds, labeled_fraction, seed):
    """Randomly mark a fraction of instances as labeled, labeled rows first.

    Redraws (up to 1000 attempts under per-attempt child seeds) until every
    class has at least one labeled instance, which center initialization
    from per-class label means requires.
    """
    if not 0 < labeled_fraction < 1:
        raise ValueError("labeled_fraction must lie in (0, 1)")
    n, c = ds.n, ds.num_classes
    l = _round_half_up(labeled_fraction * n)
    if l < c:
        raise ValueError(f"labeled fraction yields {l} < {c} labeled instances")
    children = np.random.SeedSequence(seed).spawn(1000)
    for child in children:
        rng = np.random.default_rng(child)
        chosen = np.sort(rng.choice(n, size=l, replace=False))
        if len(np.unique(ds.ground_truth[chosen])) == c:
            break
    else:
        raise RuntimeError("no labeled split covering all classes in 1000 attempts")
    mask = np.zeros(n, dtype=bool)
    mask[chosen] = True
    unlabeled = np.flatnonzero(~mask)
    order = np.concatenate([chosen, unlabeled])
    return SemiSupervisedView(
        base=ds,
        features=ds.features[order],
        ground_truth=ds.ground_truth[order],
        labeled_indices=chosen,
        unlabeled_indices=unlabeled,
        provided_labels=ds.ground_truth[chosen].copy(),
        mislabel_mask=np.zeros(l, dtype=bool),
    )


def inject_mislabels(view, ratio, seed):
    """Corrupt round(ratio*l) provided labels with uniformly-drawn wrong classes.

    For a fixed seed the corrupted sets are nested across ratios: raising the
    ratio only adds mislabels.
    """
    if not 0 <= ratio <= 1:
        raise ValueError("mislabel ratio must lie in [0, 1]")
    l, c = view.n_labeled, view.num_classes
    m = _round_half_up(ratio * l)
    rng = np.random.default_rng(seed)
    order = rng.permutation(l)
    truth = view.ground_truth[:l]
    # Wrong class per position, drawn up front so nested ratios agree.
    offsets = rng.integers(1, c, size=l)
    wrong = (truth - 1 + offsets) % c + 1
    provided = truth.copy()
    mask = np.zeros(l, dtype=bool)
    flip = order[:m]
    provided[flip] = wrong[flip]
    mask[flip] = True
    return replace(view, provided_labels=provided, mislabel_mask=mask)
