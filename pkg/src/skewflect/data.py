"""Datasets for the regression experiments: synthetic generators, loaders, splits."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

from .geometry import unit_ball

LINREG_TRUTH = np.array([1.0, 1.0])
LINREG_NOISE_VAR = 0.25

TITANIC_FEATURES = ["Pclass", "Sex", "Age", "SibSp", "Parch", "Fare", "Embarked_Q", "Embarked_S"]
TELESCOPE_FEATURES = [
    "fLength", "fWidth", "fSize", "fConc", "fConc1",
    "fAsym", "fM3Long", "fM3Trans", "fAlpha", "fDist",
]


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.labels, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("features must be (n, d) and labels (n,)")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite entries")
        names = list(self.feature_names) or [f"x{i}" for i in range(X.shape[1])]
        if len(names) != X.shape[1]:
            raise ValueError("feature_names length does not match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, idx) -> "Dataset":
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)


def generate_linreg(n: int, seed: int, noise_var: float = LINREG_NOISE_VAR,
                    x_true=LINREG_TRUTH) -> Dataset:
    """``y_j = x_true^T a_j + delta_j`` with ``a_j ~ N(0, I)``, ``delta_j ~ N(0, noise_var)``."""
    if n < 1:
        raise ValueError("n must be positive")
    x_true = np.asarray(x_true, dtype=float)
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, x_true.size))
    delta = math.sqrt(noise_var) * rng.standard_normal(n)
    return Dataset(a, a @ x_true + delta, [f"a{i + 1}" for i in range(x_true.size)])


def generate_logreg(n: int, seed: int, beta_true=None, d: int = 3,
                    feature_var: float = 2.0) -> tuple[Dataset, np.ndarray]:
    """Features ``N(0, feature_var I)``; ``y = 1`` iff ``U(0,1) <= sigmoid(beta^T X)``.

    ``beta_true`` is drawn uniformly from the unit ball when omitted.

    Returns:
        The dataset and the coefficient vector that generated it.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    if beta_true is None:
        beta_true = unit_ball(d).sample_uniform(rng)
    beta_true = np.asarray(beta_true, dtype=float)
    X = math.sqrt(feature_var) * rng.standard_normal((n, beta_true.size))
    p = rng.random(n)
    y = (p <= expit(X @ beta_true)).astype(float)
    return Dataset(X, y, [f"X{i + 1}" for i in range(beta_true.size)]), beta_true


def load_telescope(path) -> Dataset:
    """MAGIC gamma telescope file: ten numeric columns then class ``g``/``h``.

    ``g`` (gamma, signal) maps to 1 and ``h`` (hadron, background) to 0.
    """
    rows, labels = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 11:
                raise ValueError(f"{path}:{lineno}: expected 11 fields, found {len(row)}")
            try:
                rows.append([float(c) for c in row[:10]])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric feature value") from None
            tok = row[10].strip()
            if tok not in ("g", "h"):
                raise ValueError(f"{path}:{lineno}: unknown class token {tok!r}")
            labels.append(1.0 if tok == "g" else 0.0)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels), TELESCOPE_FEATURES)


def preprocess_titanic(path) -> Dataset:
    """Kaggle ``train.csv`` -> eight numeric features, label ``Survived``.

    Drops PassengerId, Name, Ticket and Cabin; Sex is 1 for male; missing
    Age takes the median observed age; Embarked is one-hot with C (and
    missing values) as the baseline.
    """
    required = {"Survived", "Pclass", "Sex", "Age", "SibSp", "Parch", "Fare", "Embarked"}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = required - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing required column(s) {sorted(missing)}")
        records = list(reader)
    if not records:
        raise ValueError(f"{path}: no data rows")

    ages = [float(r["Age"]) for r in records if r["Age"].strip()]
    median_age = float(np.median(ages)) if ages else 0.0
    fares = [float(r["Fare"]) for r in records if r["Fare"].strip()]
    median_fare = float(np.median(fares)) if fares else 0.0

    X, y = [], []
    for r in records:
        emb = r["Embarked"].strip()
        X.append([
            float(r["Pclass"]),
            1.0 if r["Sex"].strip().lower() == "male" else 0.0,
            float(r["Age"]) if r["Age"].strip() else median_age,
            float(r["SibSp"]),
            float(r["Parch"]),
            float(r["Fare"]) if r["Fare"].strip() else median_fare,
            1.0 if emb == "Q" else 0.0,
            1.0 if emb == "S" else 0.0,
        ])
        y.append(float(r["Survived"]))
    return Dataset(np.array(X), np.array(y), TITANIC_FEATURES)


def standardize(ds: Dataset) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """Z-score every column; near-constant columns are only centred."""
    means = ds.features.mean(axis=0)
    stds = ds.features.std(axis=0)
    scale = np.where(stds < 1e-12, 1.0, stds)
    return Dataset((ds.features - means) / scale, ds.labels, ds.feature_names), means, stds


def train_test_split(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded random split with ``ceil(n (1 - test_fraction))`` training rows."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    perm = np.random.default_rng(seed).permutation(ds.n)
    n_train = math.ceil(ds.n * (1.0 - test_fraction))
    # tolerate fractions like 0.2 whose product lands a hair above an integer
    if n_train - ds.n * (1.0 - test_fraction) > 1.0 - 1e-9:
        n_train -= 1
    return ds.subset(np.sort(perm[:n_train])), ds.subset(np.sort(perm[n_train:]))


def write_csv(ds: Dataset, path) -> None:
    """Canonical format: header of feature names plus ``label``, numeric rows."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([*ds.feature_names, "label"])
        for row, lab in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in row] + [repr(float(lab))])


def read_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = [[float(c) for c in row] for row in reader if row]
    arr = np.array(body, dtype=float).reshape(-1, len(header))
    return Dataset(arr[:, :-1], arr[:, -1], header[:-1])
