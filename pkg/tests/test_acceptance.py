"""Acceptance checks, one per criterion, each printing a single PASS/FAIL line.

Run with pytest, or directly (``python tests/test_acceptance.py``) for the
summary lines alone. Under pytest the lines are repeated in the terminal
summary. Tolerances are fixed here and are not tuned to the
results; criteria 4 and 5(d=1) are known to fail (see README).
"""
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from kmixup.analysis import (  # noqa: E402
    cross_cluster_stats,
    endpoint_localization,
    manifold_sampler,
    vicinal_deviation,
    w2_scaling,
)
from kmixup.mixup import MixupConfig  # noqa: E402
from kmixup.nn import TrainConfig, adversarial_accuracy, init_mlp, loss_and_grads, train  # noqa: E402
from kmixup.synthetic import (  # noqa: E402
    GENERATORS,
    gen_clusters,
    line_cluster_spec,
    random_cluster_spec,
    simplex_cluster_spec,
    train_test_split,
    two_cluster_spec,
)
from kmixup.transport import solve_assignment  # noqa: E402
from oracles import brute_force_assignment, central_difference  # noqa: E402

pytestmark = pytest.mark.slow

TOY_N = 1000
TOY_SEEDS = 5
FGSM_SEEDS = 10
FGSM_EPSILONS = (0.0, 0.01, 0.02, 0.05, 0.1)


REPORT_LINES = []


def _report(num, title, passed, detail, status=None):
    status = status or ("PASS" if passed else "FAIL")
    line = f"CRITERION {num:>2} {status}  {title}: {detail}"
    REPORT_LINES.append(line)
    print(line)
    return passed


def _toy_accuracy(name, k, alpha, seed):
    ds = GENERATORS[name](TOY_N, seed=seed)
    tr, te = train_test_split(ds, 0.2, seed=seed)
    cfg = TrainConfig(mixup=MixupConfig(k=k, alpha=alpha, seed=seed), seed=seed)
    _, hist = train(tr, te, cfg)
    return hist[-1].test_acc


def _mean_acc(name, k, alpha):
    return float(np.mean([_toy_accuracy(name, k, alpha, s) for s in range(TOY_SEEDS)]))


def criterion_1():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    bad = 0
    for k in range(2, 7):
        for _ in range(100):
            c = rng.random((k, k)) * 10
            best, _ = brute_force_assignment(c)
            if solve_assignment(c).total_cost != best:
                bad += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 5.0
    return _report(1, "assignment exactness", ok,
                   f"{bad} mismatches in 500 matrices, {elapsed:.2f}s (limit 5s)")


def criterion_2():
    specs = {"2-cluster": two_cluster_spec(2.0, R_A=1.0),
             "4-cluster simplex": simplex_cluster_spec(4, separation=10.0, radius=1.0)}
    details, ok = [], True
    for name, spec in specs.items():
        st = cross_cluster_stats(spec, 32, 500, seed=2)
        exact = int(np.sum(st.cross_counts == st.forced_counts))
        ok &= exact == 500
        details.append(f"{name} {exact}/500 exact")
    # informational: collinear clusters also meet the gap condition but let
    # matches chain through the middle cluster
    st = cross_cluster_stats(line_cluster_spec(4, 10.0), 32, 500, seed=2)
    details.append(f"(4 collinear clusters: {int(np.sum(st.cross_counts == st.forced_counts))}"
                   "/500 exact, not part of the check)")
    return _report(2, "exact cross-cluster count", ok, "; ".join(details))


def criterion_3():
    t0 = time.perf_counter()
    spec = two_cluster_spec(8.0, R_A=1.0, p=0.5)
    scaled = {k: cross_cluster_stats(spec, k, 500, seed=k).scaled_fraction for k in (64, 128, 256)}
    elapsed = time.perf_counter() - t0
    ok = all(0.45 <= v <= 0.68 for v in scaled.values()) and elapsed < 120
    txt = ", ".join(f"k={k}: {v:.3f}" for k, v in scaled.items())
    return _report(3, "cross-cluster rate", ok,
                   f"fraction*sqrt(k) {txt} (band [0.45, 0.68]); {elapsed:.1f}s")


def criterion_4():
    spec = two_cluster_spec(10.0, R_A=1.0)
    big = endpoint_localization(spec, 256, 200, seed=4)
    small = endpoint_localization(spec, 8, 200, seed=5)
    ok = big.violation_fraction <= 0.05 and big.violation_fraction <= small.violation_fraction
    return _report(4, "endpoint localization", ok,
                   f"violations k=256: {big.violation_fraction:.3f} (limit 0.05), "
                   f"k=8: {small.violation_fraction:.3f}; eps={big.epsilon:.3f}")


def criterion_5():
    t0 = time.perf_counter()
    ks = [8, 16, 32, 64, 128, 256, 512]
    circle = w2_scaling(manifold_sampler(1, 2), ks, 100, seed=5)
    square = w2_scaling(manifold_sampler(2, 2), ks, 100, seed=6)
    elapsed = time.perf_counter() - t0
    ok1 = -2.5 <= circle.fitted_slope <= -1.5
    ok2 = -1.6 <= square.fitted_slope <= -0.6
    ok = ok1 and ok2 and elapsed < 300
    return _report(5, "W2 scaling", ok,
                   f"circle slope {circle.fitted_slope:.3f} (band [-2.5, -1.5]) "
                   f"{'ok' if ok1 else 'out'}; square slope {square.fitted_slope:.3f} "
                   f"(band [-1.6, -0.6]) {'ok' if ok2 else 'out'}; {elapsed:.0f}s")


def criterion_6():
    ring = (_mean_acc("one_ring", 1, 64.0), _mean_acc("one_ring", 16, 64.0))
    bars = (_mean_acc("four_bars", 1, 16.0), _mean_acc("four_bars", 16, 16.0))
    roll = (_mean_acc("swiss_roll", 1, 16.0), _mean_acc("swiss_roll", 16, 16.0))
    a = ring[1] - ring[0] >= 0.04
    b = bars[1] >= 0.95 and bars[0] <= 0.75
    c = roll[1] - roll[0] >= 0.15
    pct = lambda v: f"{100 * v:.2f}"  # noqa: E731
    return _report(6, "toy generalization", a and b and c,
                   f"one_ring k1 {pct(ring[0])} k16 {pct(ring[1])} {'ok' if a else 'out'}; "
                   f"four_bars k1 {pct(bars[0])} k16 {pct(bars[1])} {'ok' if b else 'out'}; "
                   f"swiss_roll k1 {pct(roll[0])} k16 {pct(roll[1])} {'ok' if c else 'out'}")


def criterion_7():
    ds = gen_clusters(random_cluster_spec(), 2000, seed=7)
    ks = [1, 2, 4, 8, 16, 32]
    ok = True
    parts = []
    ratio = None
    for alpha in (1.0, 100.0):
        devs = [vicinal_deviation(ds, MixupConfig(k=k, alpha=alpha), 20000 // k, seed=k)
                for k in ks]
        mono = all(b <= a for a, b in zip(devs, devs[1:]))
        ok &= mono
        parts.append(f"alpha={alpha:g}: " + " ".join(f"{d:.3f}" for d in devs)
                     + (" non-increasing" if mono else " NOT monotone"))
        if alpha == 100.0:
            ratio = devs[-1] / devs[0]
    ok &= ratio < 0.5
    return _report(7, "vicinal deviation", ok, "; ".join(parts) + f"; ratio k32/k1 {ratio:.3f}")


def criterion_8():
    rng = np.random.default_rng(8)
    model = init_mlp([4, 12, 10, 3], rng)
    for b in model.biases:
        b[:] = rng.normal(scale=0.1, size=b.shape)
    assert model.n_params <= 500
    x = rng.normal(size=(6, 4))
    y = rng.dirichlet(np.ones(3), size=6)
    _, grads = loss_and_grads(model, x, y)
    worst = 0.0
    bad = 0
    for l in range(len(model.weights)):
        for param, g in ((model.weights[l], grads[l][0]), (model.biases[l], grads[l][1])):
            num = central_difference(lambda: loss_and_grads(model, x, y)[0], param)
            err = np.abs(g - num)
            tol = np.maximum(1e-4 * np.maximum(np.abs(g), np.abs(num)), 1e-7)
            bad += int(np.sum(err > tol))
            worst = max(worst, float(np.max(err / np.maximum(np.abs(num), 1e-7))))
    return _report(8, "gradient correctness", bad == 0,
                   f"{model.n_params} params, {bad} coordinates out of tolerance, "
                   f"worst scaled error {worst:.2e}")


def criterion_9():
    curves = {1: [], 2: []}
    for k in (1, 2):
        for seed in range(FGSM_SEEDS):
            ds = GENERATORS["one_ring"](TOY_N, seed=seed)
            tr, te = train_test_split(ds, 0.2, seed=seed)
            model, _ = train(tr, te, TrainConfig(mixup=MixupConfig(k=k, alpha=1.0, seed=seed),
                                                 seed=seed))
            curves[k].append([adversarial_accuracy(model, te, e) for e in FGSM_EPSILONS])
    mono = all(all(b <= a for a, b in zip(c, c[1:])) for k in curves for c in curves[k])
    last = {k: float(np.mean([c[-1] for c in curves[k]])) for k in curves}
    ok = mono and last[2] >= last[1]
    return _report(9, "FGSM trend", ok,
                   f"all {2 * FGSM_SEEDS} curves non-increasing: {mono}; mean acc at "
                   f"eps={FGSM_EPSILONS[-1]}: k=1 {last[1]:.4f}, k=2 {last[2]:.4f}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(check):
    assert check()


def test_criterion_10_not_reproducible():
    _report(10, "large-scale image results", True,
            "not reproducible at desk scale; covered structurally by criteria 6 and 7",
            status="N/A ")
    pytest.skip("large-scale image benchmarks are out of scope")


if __name__ == "__main__":
    results = [check() for check in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
