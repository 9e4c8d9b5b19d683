"""Monte Carlo checks of how OT matchings behave on structured data.

* cross-cluster match counts on separated clusters, and how their share
  shrinks like 1/sqrt(k);
* where cross-cluster matches land (near the facing sides of two clusters);
* decay of W2^2 between two fresh k-samples of a manifold, fitted on log-log
  axes;
* the vicinal deviation metric: squared distance from a mixed point to the
  nearer of its two parents.

Every report dataclass has ``to_dict`` (JSON-ready) and ``csv_rows``.
"""
import csv
import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateDataError, ParameterError
from .mixup import make_vicinal_step
from .synthetic import ClusterGeometry, gen_manifold, sample_clusters
from .transport import match, w2_squared

__all__ = [
    "MatchStats",
    "LocalizationReport",
    "ScalingReport",
    "count_cross_matches",
    "forced_cross_count",
    "cross_cluster_stats",
    "endpoint_localization",
    "manifold_sampler",
    "fit_loglog_slope",
    "w2_scaling",
    "deviation_per_point",
    "vicinal_deviation",
    "write_json",
    "write_csv",
]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class MatchStats:
    k: int
    trials: int
    cross_cluster_fraction: float
    cross_counts: np.ndarray
    forced_counts: np.ndarray
    r_counts: np.ndarray
    s_counts: np.ndarray
    match_lengths: np.ndarray

    @property
    def scaled_fraction(self):
        """fraction * sqrt(k): roughly constant when the 1/sqrt(k) law holds."""
        return self.cross_cluster_fraction * np.sqrt(self.k)

    def forced_exact(self):
        return bool(np.array_equal(self.cross_counts, self.forced_counts))

    def to_dict(self):
        d = _jsonable(asdict(self))
        d["scaled_fraction"] = float(self.scaled_fraction)
        return d

    def csv_rows(self):
        return [{"k": self.k, "trial": t, "cross_count": int(c), "forced_cross_count": int(e)}
                for t, (c, e) in enumerate(zip(self.cross_counts, self.forced_counts))]


@dataclass
class LocalizationReport:
    k: int
    trials: int
    D: float
    R_A: float
    R_B: float
    epsilon: float
    cross_matches: int
    violations: int
    violation_fraction: float

    def to_dict(self):
        return _jsonable(asdict(self))

    def csv_rows(self):
        return [self.to_dict()]


@dataclass
class ScalingReport:
    ks: list
    mean_w2sq: list
    fitted_slope: float
    fit_residual: float
    intercept: float
    trials: int

    def to_dict(self):
        return _jsonable(asdict(self))

    def csv_rows(self):
        return [{"k": k, "mean_w2sq": m} for k, m in zip(self.ks, self.mean_w2sq)]


def count_cross_matches(ids_a, ids_b, sigma):
    """Matches i -> sigma[i] whose endpoints carry different cluster ids."""
    return int(np.sum(np.asarray(ids_a) != np.asarray(ids_b)[np.asarray(sigma)]))


def forced_cross_count(ids_a, ids_b, m):
    """Half the L1 gap between the two batches' per-cluster counts."""
    r = np.bincount(ids_a, minlength=m)
    s = np.bincount(ids_b, minlength=m)
    return int(np.abs(r - s).sum() // 2)


def cross_cluster_stats(spec, k, trials, seed=0):
    """Match pairs of fresh i.i.d. k-batches from ``spec`` and count cluster crossings.

    Raises PreconditionError unless every pair of balls is >= 2*max radius apart.
    """
    spec.require_separated()
    if k < 1 or trials < 1:
        raise ParameterError("k and trials must be >= 1")
    rng = np.random.default_rng(seed)
    cross = np.empty(trials, dtype=np.int64)
    expected = np.empty(trials, dtype=np.int64)
    r_counts = np.empty((trials, spec.m), dtype=np.int64)
    s_counts = np.empty((trials, spec.m), dtype=np.int64)
    lengths = np.empty((trials, k))
    for t in range(trials):
        a, ia = sample_clusters(spec, k, rng)
        b, ib = sample_clusters(spec, k, rng)
        sigma = match(a, b).sigma
        cross[t] = count_cross_matches(ia, ib, sigma)
        expected[t] = forced_cross_count(ia, ib, spec.m)
        r_counts[t] = np.bincount(ia, minlength=spec.m)
        s_counts[t] = np.bincount(ib, minlength=spec.m)
        lengths[t] = np.linalg.norm(a - b[sigma], axis=1)
    return MatchStats(
        k=k,
        trials=trials,
        cross_cluster_fraction=float(cross.sum() / (k * trials)),
        cross_counts=cross,
        forced_counts=expected,
        r_counts=r_counts,
        s_counts=s_counts,
        match_lengths=lengths.ravel(),
    )


def _distance_to_ball(points, center, radius):
    return np.maximum(np.linalg.norm(points - center, axis=-1) - radius, 0.0)


def endpoint_localization(spec, k, trials, seed=0):
    """Share of cross-cluster matches with an endpoint outside A_eps or B_eps.

    A_eps is the part of ball A within D(1+eps) of ball B, eps = max(R)^2/D^2,
    with D the gap between the balls (likewise B_eps). Boundary points count
    as inside.
    """
    geom = ClusterGeometry.from_spec(spec)
    if k < 1 or trials < 1:
        raise ParameterError("k and trials must be >= 1")
    limit = geom.D * (1.0 + geom.epsilon) * (1 + 1e-12)
    c_a, c_b = spec.centers
    rng = np.random.default_rng(seed)
    n_cross = n_bad = 0
    for _ in range(trials):
        a, ia = sample_clusters(spec, k, rng)
        b, ib = sample_clusters(spec, k, rng)
        sigma = match(a, b).sigma
        pb, ib_m = b[sigma], ib[sigma]
        crossing = ia != ib_m
        if not crossing.any():
            continue
        # orient every crossing pair as (point in A, point in B)
        from_a = (ia == 0)[crossing]
        p_a = np.where(from_a[:, None], a[crossing], pb[crossing])
        p_b = np.where(from_a[:, None], pb[crossing], a[crossing])
        bad = ((_distance_to_ball(p_a, c_b, geom.R_B) > limit)
               | (_distance_to_ball(p_b, c_a, geom.R_A) > limit))
        n_cross += int(crossing.sum())
        n_bad += int(bad.sum())
    return LocalizationReport(
        k=k, trials=trials, D=geom.D, R_A=geom.R_A, R_B=geom.R_B, epsilon=geom.epsilon,
        cross_matches=n_cross, violations=n_bad,
        violation_fraction=n_bad / n_cross if n_cross else 0.0,
    )


def manifold_sampler(d_intrinsic, ambient_dim=2):
    """``sampler(n, rng)`` drawing fresh points from :func:`gen_manifold`."""
    def sampler(n, rng):
        seed = int(rng.integers(2 ** 63))
        return gen_manifold(d_intrinsic, ambient_dim, n, seed=seed).features
    return sampler


def fit_loglog_slope(ks, values):
    """OLS line through (log k, log value); returns (slope, intercept, rms residual)."""
    ks = np.asarray(ks, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(ks) < 2:
        raise ParameterError("need at least two k values to fit a slope")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DegenerateDataError(f"cannot take logs of non-positive values: {values.tolist()}")
    lx, ly = np.log(ks), np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))


def w2_scaling(sampler, ks, trials, seed=0):
    """Mean W2^2 between two independent k-samples for each k, plus log-log fit.

    ``sampler(n, rng)`` must return an (n, d) array (or a Dataset).
    Raises DegenerateDataError if any mean is zero.
    """
    ks = [int(k) for k in ks]
    if len(ks) < 2 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ParameterError(f"need at least two increasing k values, got {ks}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    means = []
    for k in ks:
        vals = [w2_squared(getattr(x, "features", x), getattr(y, "features", y))
                for x, y in ((sampler(k, rng), sampler(k, rng)) for _ in range(trials))]
        means.append(float(np.mean(vals)))
    slope, intercept, resid = fit_loglog_slope(ks, means)
    return ScalingReport(ks, means, slope, resid, intercept, trials)


def deviation_per_point(vb, ds):
    """min(|v - gamma parent|^2, |v - xi parent|^2) for each row of a VicinalBatch."""
    d_g = ((vb.features - ds.features[vb.gamma_index]) ** 2).sum(axis=1)
    d_x = ((vb.features - ds.features[vb.xi_index]) ** 2).sum(axis=1)
    return np.minimum(d_g, d_x)


def vicinal_deviation(ds, cfg, steps, seed=0):
    """Average closest squared distance of vicinal points to their matched pair."""
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    rng = np.random.default_rng(seed)
    total = 0.0
    count = 0
    for _ in range(steps):
        dev = deviation_per_point(make_vicinal_step(ds, cfg, rng), ds)
        total += float(dev.sum())
        count += len(dev)
    return total / count


def write_json(report, path):
    doc = report.to_dict() if hasattr(report, "to_dict") else _jsonable(report)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)


def write_csv(rows, path):
    rows = list(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
