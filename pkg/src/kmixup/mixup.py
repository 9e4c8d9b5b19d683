"""k-mixup: match two random k-batches by optimal transport, then move every
gamma point a shared fraction of the way toward its matched xi point.

All sampling goes through a ``numpy.random.Generator``. Independent workers
should each get their own stream, e.g. from
``np.random.SeedSequence(seed).spawn(n_workers)``; see :func:`spawn_rngs`.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DatasetTooSmallError, ParameterError, ShapeError
from .transport import Assignment, cost_matrix, solve_assignment

__all__ = [
    "MixupConfig",
    "KBatch",
    "VicinalPoint",
    "VicinalBatch",
    "LocalDistribution",
    "sample_lambda",
    "displacement_interpolate",
    "make_vicinal_step",
    "vicinal_epoch",
    "estimate_local_distribution",
    "spawn_rngs",
]

DEFAULT_LOCAL_SAMPLES = 256


@dataclass(frozen=True)
class MixupConfig:
    k: int = 1
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ParameterError(f"k must be an integer >= 1, got {self.k}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class KBatch:
    """k points viewed as a uniform measure; ``indices`` point into the source dataset."""

    features: np.ndarray
    labels: np.ndarray
    indices: np.ndarray

    def __len__(self):
        return self.features.shape[0]

    @classmethod
    def from_dataset(cls, ds, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return cls(ds.features[idx], ds.labels[idx], idx)


@dataclass(frozen=True)
class VicinalPoint:
    features: np.ndarray
    label: np.ndarray
    lam: float
    parent_gamma_index: int
    parent_xi_index: int


@dataclass(frozen=True)
class VicinalBatch:
    """The k outputs of one displacement interpolation, stored as arrays.

    Row ``i`` mixes ``gamma_index[i]`` with ``xi_index[i]`` using the single
    weight ``lam``. Indexing yields :class:`VicinalPoint` objects.
    """

    features: np.ndarray
    labels: np.ndarray
    lam: float
    gamma_index: np.ndarray
    xi_index: np.ndarray
    assignment: Assignment

    def __len__(self):
        return self.features.shape[0]

    def __getitem__(self, i):
        return VicinalPoint(self.features[i], self.labels[i], self.lam,
                            int(self.gamma_index[i]), int(self.xi_index[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


@dataclass(frozen=True)
class LocalDistribution:
    """Monte Carlo draws of the points that ``anchor_index`` gets matched to."""

    anchor_index: int
    matched_indices: np.ndarray
    matched_points: np.ndarray
    mean: np.ndarray
    label_mean: np.ndarray


def spawn_rngs(seed, n):
    """n statistically independent generators derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def sample_lambda(alpha, rng):
    """One mixing weight from the symmetric Beta(alpha, alpha) law."""
    if not alpha > 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    return float(rng.beta(alpha, alpha))


def displacement_interpolate(batch_g, batch_x, sigma, lam):
    """lam * gamma_i + (1 - lam) * xi_sigma(i) for features and labels alike."""
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must lie in [0, 1], got {lam}")
    s = sigma.sigma if isinstance(sigma, Assignment) else np.asarray(sigma, dtype=np.int64)
    k = len(batch_g)
    if len(batch_x) != k or len(s) != k:
        raise ShapeError(f"batch sizes {k}, {len(batch_x)} and permutation size {len(s)} differ")
    if batch_g.features.shape[1] != batch_x.features.shape[1]:
        raise ShapeError("feature dimensions differ")
    if batch_g.labels.shape[1] != batch_x.labels.shape[1]:
        raise ShapeError("label dimensions differ")
    xf = batch_x.features[s]
    xl = batch_x.labels[s]
    if not isinstance(sigma, Assignment):
        cost = cost_matrix(batch_g, batch_x)
        sigma = Assignment(s, float(cost[np.arange(k), s].sum()))
    return VicinalBatch(
        features=lam * batch_g.features + (1.0 - lam) * xf,
        labels=lam * batch_g.labels + (1.0 - lam) * xl,
        lam=float(lam),
        gamma_index=np.asarray(batch_g.indices),
        xi_index=np.asarray(batch_x.indices)[s],
        assignment=sigma,
    )


def _mix_indices(ds, idx_g, idx_x, alpha, rng):
    g = KBatch.from_dataset(ds, idx_g)
    x = KBatch.from_dataset(ds, idx_x)
    sigma = solve_assignment(cost_matrix(g, x))
    return displacement_interpolate(g, x, sigma, sample_lambda(alpha, rng))


def _check_size(ds, k):
    if len(ds) < 2 * k:
        raise DatasetTooSmallError(f"need N >= 2k = {2 * k} points, dataset has {len(ds)}")


def make_vicinal_step(ds, cfg, rng):
    """Draw 2k distinct points, split into gamma/xi, match and interpolate."""
    _check_size(ds, cfg.k)
    idx = rng.choice(len(ds), size=2 * cfg.k, replace=False)
    return _mix_indices(ds, idx[: cfg.k], idx[cfg.k:], cfg.alpha, rng)


def vicinal_epoch(ds, cfg, rng, steps=None):
    """Yield vicinal batches from one shuffled pass over the data.

    Each step consumes the next 2k points of a fresh permutation, so no point
    repeats within an epoch; the last ``N mod 2k`` points are skipped.
    ``steps`` caps the number of batches (default ``N // 2k``).
    """
    _check_size(ds, cfg.k)
    k = cfg.k
    n_steps = len(ds) // (2 * k)
    if steps is not None:
        n_steps = min(n_steps, steps)
    perm = rng.permutation(len(ds))
    for s in range(n_steps):
        chunk = perm[2 * k * s: 2 * k * (s + 1)]
        yield _mix_indices(ds, chunk[:k], chunk[k:], cfg.alpha, rng)


def estimate_local_distribution(ds, i, cfg, num_samples=DEFAULT_LOCAL_SAMPLES, rng=None):
    """Monte Carlo estimate of where point ``i`` is sent by the OT matchings.

    Each sample draws a k-batch gamma that contains ``i`` and an independent
    k-batch xi from the whole dataset (xi may overlap gamma), matches them and
    records the partner of ``i``.
    """
    if num_samples < 1:
        raise ParameterError("num_samples must be >= 1")
    _check_size(ds, cfg.k)
    if not 0 <= i < len(ds):
        raise ParameterError(f"anchor index {i} out of range")
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    others = np.delete(np.arange(len(ds)), i)
    partners = np.empty(num_samples, dtype=np.int64)
    for t in range(num_samples):
        idx_g = np.concatenate(([i], rng.choice(others, size=cfg.k - 1, replace=False)))
        idx_x = rng.choice(len(ds), size=cfg.k, replace=False)
        sigma = solve_assignment(cost_matrix(ds.features[idx_g], ds.features[idx_x])).sigma
        partners[t] = idx_x[sigma[0]]
    pts = ds.features[partners]
    return LocalDistribution(
        anchor_index=int(i),
        matched_indices=partners,
        matched_points=pts,
        mean=pts.mean(axis=0),
        label_mean=ds.labels[partners].mean(axis=0),
    )
