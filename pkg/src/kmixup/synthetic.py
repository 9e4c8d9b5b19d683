"""Seeded datasets: toy 2-D classification sets, clustered and manifold
distributions for the verification harness, and a plain CSV reader/writer."""
import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EmptyDatasetError,
    NonNumericFeatureError,
    ParameterError,
    PreconditionError,
    RaggedRowError,
    ShapeError,
)

__all__ = [
    "LabeledPoint",
    "Dataset",
    "ClusterSpec",
    "ClusterGeometry",
    "one_hot",
    "gen_one_ring",
    "gen_four_bars",
    "gen_swiss_roll",
    "gen_clusters",
    "gen_manifold",
    "two_cluster_spec",
    "line_cluster_spec",
    "simplex_cluster_spec",
    "random_cluster_spec",
    "sample_clusters",
    "swiss_roll_curve",
    "load_csv",
    "save_csv",
    "train_test_split",
    "GENERATORS",
]

# Toy-set geometry, frozen. Chosen to resemble the reference pictures.
ONE_RING_DEFAULTS = {"disk_radius": 1.0, "ring_inner": 1.6, "ring_outer": 2.2, "noise": 0.15}
FOUR_BARS_DEFAULTS = {"bar_width": 0.5, "gap": 0.5, "height": 4.0, "noise": 0.02}
SWISS_ROLL_DEFAULTS = {"turns": 1.5, "start": 0.25, "noise": 0.05}


@dataclass(frozen=True)
class LabeledPoint:
    features: np.ndarray
    label: np.ndarray


@dataclass
class Dataset:
    """N labelled points. ``labels`` rows are probability vectors (one-hot
    on generation); ``cluster_id`` and ``intrinsic`` are optional metadata."""

    features: np.ndarray
    labels: np.ndarray
    cluster_id: np.ndarray | None = None
    intrinsic: np.ndarray | None = None
    class_names: list = field(default_factory=list)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.atleast_2d(np.asarray(self.labels, dtype=np.float64))
        if self.features.shape[0] != self.labels.shape[0]:
            raise ShapeError(
                f"{self.features.shape[0]} feature rows but {self.labels.shape[0]} label rows"
            )
        if self.cluster_id is not None:
            self.cluster_id = np.asarray(self.cluster_id, dtype=np.int64)
        if not self.class_names:
            self.class_names = [str(j) for j in range(self.c)]

    def __len__(self):
        return self.features.shape[0]

    def __getitem__(self, i):
        return LabeledPoint(self.features[i], self.labels[i])

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def c(self):
        return self.labels.shape[1]

    @property
    def classes(self):
        return np.argmax(self.labels, axis=1)

    def class_counts(self):
        return np.bincount(self.classes, minlength=self.c)

    def subset(self, idx):
        idx = np.asarray(idx)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            None if self.cluster_id is None else self.cluster_id[idx],
            None if self.intrinsic is None else self.intrinsic[idx],
            list(self.class_names),
        )


def one_hot(classes, c):
    classes = np.asarray(classes, dtype=np.int64)
    out = np.zeros((len(classes), c))
    out[np.arange(len(classes)), classes] = 1.0
    return out


def _check_n(n, minimum=1):
    if int(n) != n or n < minimum:
        raise ParameterError(f"n must be an integer >= {minimum}, got {n}")
    return int(n)


def _balanced_classes(n, c, rng):
    """Class index per point, counts differing by at most one, shuffled order."""
    cls = np.arange(n) % c
    return cls[rng.permutation(n)]


def gen_one_ring(n, disk_radius=None, ring_inner=None, ring_outer=None, noise=None, seed=0):
    """Class 0: uniform disk at the origin. Class 1: uniform annulus around it."""
    p = dict(ONE_RING_DEFAULTS)
    for key, val in (("disk_radius", disk_radius), ("ring_inner", ring_inner),
                     ("ring_outer", ring_outer), ("noise", noise)):
        if val is not None:
            p[key] = val
    n = _check_n(n, 2)
    if not 0 < p["disk_radius"] <= p["ring_inner"] < p["ring_outer"]:
        raise ParameterError("need 0 < disk_radius <= ring_inner < ring_outer")
    if p["noise"] < 0:
        raise ParameterError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    cls = _balanced_classes(n, 2, rng)
    theta = rng.uniform(0.0, 2 * np.pi, n)
    u = rng.random(n)
    # area-uniform radii
    r_disk = p["disk_radius"] * np.sqrt(u)
    r_ring = np.sqrt(p["ring_inner"] ** 2 + u * (p["ring_outer"] ** 2 - p["ring_inner"] ** 2))
    r = np.where(cls == 0, r_disk, r_ring)
    x = np.c_[r * np.cos(theta), r * np.sin(theta)]
    x += p["noise"] * rng.standard_normal(x.shape)
    return Dataset(x, one_hot(cls, 2), intrinsic=np.c_[r, theta])


def gen_four_bars(n, bar_width=None, gap=None, height=None, noise=None, seed=0):
    """Four parallel vertical strips side by side, labels alternating 0,1,0,1."""
    p = dict(FOUR_BARS_DEFAULTS)
    for key, val in (("bar_width", bar_width), ("gap", gap), ("height", height), ("noise", noise)):
        if val is not None:
            p[key] = val
    n = _check_n(n, 2)
    if p["bar_width"] <= 0 or p["gap"] < 0 or p["height"] <= 0 or p["noise"] < 0:
        raise ParameterError("invalid four-bars geometry")
    rng = np.random.default_rng(seed)
    bar = np.arange(n) % 4
    bar = bar[rng.permutation(n)]
    left = bar * (p["bar_width"] + p["gap"])
    x = np.c_[left + p["bar_width"] * rng.random(n), p["height"] * rng.random(n)]
    x += p["noise"] * rng.standard_normal(x.shape)
    return Dataset(x, one_hot(bar % 2, 2), cluster_id=bar)


def swiss_roll_curve(t, arm, turns=None, start=None):
    """Point on spiral arm ``arm`` (0 or 1) at curve parameter ``t`` in [0, 1]."""
    turns = SWISS_ROLL_DEFAULTS["turns"] if turns is None else turns
    start = SWISS_ROLL_DEFAULTS["start"] if start is None else start
    t = np.asarray(t, dtype=np.float64)
    angle = 2 * np.pi * turns * t
    radius = start + t
    phase = np.pi * np.asarray(arm)
    return np.stack([radius * np.cos(angle + phase), radius * np.sin(angle + phase)], axis=-1)


def gen_swiss_roll(n, turns=None, start=None, noise=None, seed=0):
    """Two interleaved Archimedean spiral arms, rotated by pi, opposite labels.

    ``intrinsic`` holds (t, arm) so noise-free points can be checked against
    :func:`swiss_roll_curve`.
    """
    turns = SWISS_ROLL_DEFAULTS["turns"] if turns is None else turns
    start = SWISS_ROLL_DEFAULTS["start"] if start is None else start
    noise = SWISS_ROLL_DEFAULTS["noise"] if noise is None else noise
    n = _check_n(n, 2)
    if turns <= 0 or start < 0 or noise < 0:
        raise ParameterError("invalid swiss-roll parameters")
    rng = np.random.default_rng(seed)
    arm = _balanced_classes(n, 2, rng)
    # sqrt makes density roughly uniform in arc length
    t = np.sqrt(rng.random(n))
    x = swiss_roll_curve(t, arm, turns, start)
    x = x + noise * rng.standard_normal(x.shape)
    return Dataset(x, one_hot(arm, 2), intrinsic=np.c_[t, arm])


@dataclass
class ClusterSpec:
    """m balls with centres, radii, mixture weights and a class per ball."""

    centers: np.ndarray
    radii: np.ndarray
    weights: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        self.centers = np.atleast_2d(np.asarray(self.centers, dtype=np.float64))
        m = self.centers.shape[0]
        self.radii = np.broadcast_to(np.asarray(self.radii, dtype=np.float64), (m,)).copy()
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.labels = (np.arange(m) if self.labels is None
                       else np.asarray(self.labels, dtype=np.int64))
        if self.weights.shape != (m,) or self.labels.shape != (m,):
            raise ParameterError("centers, weights and labels must have one entry per cluster")
        if np.any(self.weights < 0) or not np.isclose(self.weights.sum(), 1.0, atol=1e-9):
            raise ParameterError(f"weights must be a probability vector, got {self.weights}")
        if np.any(self.radii < 0):
            raise ParameterError("radii must be non-negative")

    @property
    def m(self):
        return self.centers.shape[0]

    @property
    def dim(self):
        return self.centers.shape[1]

    def center_distances(self):
        diff = self.centers[:, None, :] - self.centers[None, :, :]
        return np.sqrt((diff ** 2).sum(-1))

    def ball_gaps(self):
        """Set distance between every pair of balls (inf on the diagonal)."""
        gaps = self.center_distances() - self.radii[:, None] - self.radii[None, :]
        np.fill_diagonal(gaps, np.inf)
        return gaps

    def is_separated(self):
        """True when every pair of balls is at least 2*max(radius) apart."""
        if self.m == 1:
            return True
        return bool(np.min(self.ball_gaps()) >= 2 * np.max(self.radii))

    def require_separated(self):
        if not self.is_separated():
            raise PreconditionError(
                f"clusters too close: min ball gap {np.min(self.ball_gaps()):.4g} "
                f"< 2*max radius {2 * np.max(self.radii):.4g}"
            )


@dataclass(frozen=True)
class ClusterGeometry:
    """Two-ball geometry: gap ``D`` between the sets and radii ``R_A``, ``R_B``."""

    D: float
    R_A: float
    R_B: float

    @property
    def epsilon(self):
        return max(self.R_A, self.R_B) ** 2 / self.D ** 2

    @classmethod
    def from_spec(cls, spec):
        if spec.m != 2:
            raise ParameterError(f"two-cluster spec required, got m={spec.m}")
        return cls(float(spec.ball_gaps()[0, 1]), float(spec.radii[0]), float(spec.radii[1]))


def two_cluster_spec(D, R_A=1.0, R_B=None, p=0.5, dim=2):
    """Two balls on the first axis whose boundaries are ``D`` apart."""
    R_B = R_A if R_B is None else R_B
    if D <= 0:
        raise ParameterError("D must be positive")
    centers = np.zeros((2, dim))
    centers[1, 0] = R_A + D + R_B
    return ClusterSpec(centers, [R_A, R_B], [p, 1 - p], [0, 1])


def line_cluster_spec(m, separation, radius=1.0, dim=2, weights=None):
    """m equal balls with centres ``separation`` apart along the first axis."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    centers = np.zeros((m, dim))
    centers[:, 0] = separation * np.arange(m)
    weights = np.full(m, 1.0 / m) if weights is None else weights
    return ClusterSpec(centers, radius, weights, np.arange(m) % 2 if m > 1 else [0])


def simplex_cluster_spec(m, separation, radius=1.0, weights=None):
    """m equal balls at the vertices of a regular simplex in R^m.

    Every pair of centres is ``separation`` apart, so no cluster lies
    between two others.
    """
    if m < 1:
        raise ParameterError("m must be >= 1")
    centers = np.eye(m) * (separation / np.sqrt(2.0))
    weights = np.full(m, 1.0 / m) if weights is None else weights
    return ClusterSpec(centers, radius, weights, np.arange(m) % 2 if m > 1 else [0])


def random_cluster_spec(m=10, dim=10, scale=10.0, radius=1.5, seed=123):
    """m equal-weight balls with Gaussian-scattered centres, one class each.

    Defaults give a 10-class, 10-dimensional stand-in for an image dataset's
    class clusters.
    """
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((m, dim)) * scale / np.sqrt(2 * dim)
    return ClusterSpec(centers, radius, np.full(m, 1.0 / m), np.arange(m))


def sample_ball(n, center, radius, rng):
    center = np.asarray(center, dtype=np.float64)
    dim = center.shape[0]
    direction = rng.standard_normal((n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(n) ** (1.0 / dim)
    return center + direction * r[:, None]


def sample_clusters(spec, n, rng):
    """Draw n points i.i.d. from the mixture; returns (points, cluster ids)."""
    ids = rng.choice(spec.m, size=n, p=spec.weights)
    x = np.empty((n, spec.dim))
    for j in range(spec.m):
        mask = ids == j
        x[mask] = sample_ball(int(mask.sum()), spec.centers[j], spec.radii[j], rng)
    return x, ids


def gen_clusters(spec, n, seed=0):
    n = _check_n(n)
    rng = np.random.default_rng(seed)
    x, ids = sample_clusters(spec, n, rng)
    c = int(spec.labels.max()) + 1
    return Dataset(x, one_hot(spec.labels[ids], c), cluster_id=ids)


def gen_manifold(d_intrinsic, ambient_dim, n, seed=0, radius=1.0):
    """Uniform samples on a unit-speed circle (d=1) or flat unit square (d=2),
    embedded in the first two ambient coordinates; the rest are zero."""
    n = _check_n(n)
    if d_intrinsic not in (1, 2):
        raise ParameterError(f"d_intrinsic must be 1 or 2, got {d_intrinsic}")
    if ambient_dim < 2:
        raise ParameterError("both manifolds need ambient_dim >= 2")
    rng = np.random.default_rng(seed)
    x = np.zeros((n, ambient_dim))
    if d_intrinsic == 1:
        theta = rng.uniform(0.0, 2 * np.pi, n)
        x[:, 0] = radius * np.cos(theta)
        x[:, 1] = radius * np.sin(theta)
        intrinsic = theta[:, None]
    else:
        intrinsic = rng.random((n, 2))
        x[:, :2] = intrinsic
    return Dataset(x, np.ones((n, 1)), intrinsic=intrinsic)


GENERATORS = {
    "one_ring": gen_one_ring,
    "four_bars": gen_four_bars,
    "swiss_roll": gen_swiss_roll,
}


def train_test_split(ds, test_fraction=0.2, seed=0):
    """Stratified split: each class contributes round(test_fraction * count)."""
    rng = np.random.default_rng(seed)
    cls = ds.classes
    test = []
    for j in np.unique(cls):
        idx = np.flatnonzero(cls == j)
        idx = idx[rng.permutation(len(idx))]
        test.extend(idx[: int(round(test_fraction * len(idx)))])
    mask = np.zeros(len(ds), dtype=bool)
    mask[np.asarray(test, dtype=np.int64)] = True
    return ds.subset(np.flatnonzero(~mask)), ds.subset(np.flatnonzero(mask))


def load_csv(path):
    """Read a header + rows CSV whose last column is a class label.

    An optional ``cluster_id`` column (as written by :func:`save_csv`) is
    read back into ``Dataset.cluster_id``. Label strings become one-hot
    indices in order of first appearance.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such CSV file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if len(rows) < 2:
        raise EmptyDatasetError(f"{path}: no data rows")
    header, body = rows[0], rows[1:]
    width = len(header)
    if width < 2:
        raise RaggedRowError(f"{path}: header needs at least one feature and a label column")
    cid_col = header.index("cluster_id") if "cluster_id" in header[:-1] else None
    feat_cols = [j for j in range(width - 1) if j != cid_col]

    feats, labels, cids = [], [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != width:
            raise RaggedRowError(f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        try:
            feats.append([float(row[j]) for j in feat_cols])
        except ValueError:
            raise NonNumericFeatureError(f"{path}: non-numeric feature in row {lineno}") from None
        if cid_col is not None:
            cids.append(int(row[cid_col]))
        labels.append(row[-1].strip())

    names = list(dict.fromkeys(labels))
    index = {name: j for j, name in enumerate(names)}
    classes = [index[s] for s in labels]
    return Dataset(
        np.array(feats, dtype=np.float64).reshape(len(body), len(feat_cols)),
        one_hot(classes, len(names)),
        cluster_id=np.array(cids) if cid_col is not None else None,
        class_names=names,
    )


def save_csv(ds, path, feature_names=None):
    """Write ``ds`` in the dialect :func:`load_csv` reads (labels as class names)."""
    names = feature_names or [f"x{j}" for j in range(ds.d)]
    header = list(names) + (["cluster_id"] if ds.cluster_id is not None else []) + ["label"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(len(ds)):
            row = [repr(float(v)) for v in ds.features[i]]
            if ds.cluster_id is not None:
                row.append(str(int(ds.cluster_id[i])))
            row.append(ds.class_names[ds.classes[i]])
            w.writerow(row)
