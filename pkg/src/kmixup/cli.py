"""Command-line front end.

Subcommands: gen, train, sweep, verify, attack, couple. Every subcommand
accepts ``--config file.json``; its keys are the subcommand's option names
(dashes or underscores), unknown keys are rejected, and explicit flags win
over file values, which win over built-in defaults.

Exit codes: 0 ok, 1 usage/parameter error, 2 statistical failure,
3 precondition failure.
"""
import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import analysis
from .errors import DatasetTooSmallError, KMixupError, PreconditionError, ShapeError
from .mixup import MixupConfig, make_vicinal_step
from .nn import (
    TrainConfig,
    adversarial_accuracy,
    evaluate,
    load_model,
    save_model,
    train,
    write_metrics_csv,
)
from .synthetic import (
    GENERATORS,
    line_cluster_spec,
    simplex_cluster_spec,
    load_csv,
    save_csv,
    train_test_split,
    two_cluster_spec,
)

EXIT_OK, EXIT_USAGE, EXIT_STAT_FAIL, EXIT_PRECONDITION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip()]


# built-in defaults per subcommand; config-file keys must appear here
DEFAULTS = {
    "gen": {"dataset": None, "n": 1000, "seed": 0, "noise": None, "out": None},
    "train": {"data": "one_ring", "n": 1000, "k": 1, "alpha": 1.0, "epochs": 200,
              "lr": 0.1, "milestones": [100, 150], "momentum": 0.9, "weight_decay": 1e-4,
              "batch_size": 32, "hidden": [130, 120], "seed": 0,
              "out": "model.json", "metrics": None},
    "sweep": {"data": "one_ring", "n": 1000, "ks": [1, 16], "alphas": [1.0, 64.0], "seeds": 5,
              "epochs": 200, "milestones": None, "batch_size": 32, "hidden": [130, 120],
              "deviation_points": 4096, "workers": 1, "out": "sweep.csv"},
    "verify": {"theorem": None, "params": {}, "seed": 0, "out": None},
    "attack": {"model": None, "data": None, "epsilons": [0.0, 0.01, 0.02, 0.05, 0.1],
               "out": "attack.csv"},
    "couple": {"data": None, "n": 512, "k": 32, "alpha": 1.0, "seed": 0, "steps": 16,
               "out": "coupling.svg"},
}
LIST_KEYS = {"milestones": _int_list, "hidden": _int_list, "ks": _int_list,
             "alphas": _float_list, "epsilons": _float_list}


def _resolve(command, args):
    """Merge built-in defaults, config file and explicit flags."""
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in file_cfg.items():
            key = key.replace("-", "_")
            if key not in cfg:
                raise UsageError(f"unknown config key for '{command}': {key}")
            cfg[key] = val
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key, conv in LIST_KEYS.items():
        if key in cfg and isinstance(cfg[key], str):
            cfg[key] = conv(cfg[key])
    if isinstance(cfg.get("params"), str):
        try:
            cfg["params"] = json.loads(cfg["params"])
        except json.JSONDecodeError as exc:
            raise UsageError(f"--params is not valid JSON: {exc}") from None
    _check_types(command, cfg)
    return cfg


def _check_types(command, cfg):
    """Reject values whose type differs from the built-in default's."""
    for key, default in DEFAULTS[command].items():
        val = cfg[key]
        if val is None or default is None:
            continue
        if isinstance(default, bool) or isinstance(default, str):
            ok = isinstance(val, type(default))
        elif isinstance(default, int):
            ok = isinstance(val, int) and not isinstance(val, bool)
        elif isinstance(default, float):
            ok = isinstance(val, (int, float)) and not isinstance(val, bool)
        elif isinstance(default, list):
            ok = isinstance(val, list) and all(isinstance(v, (int, float)) for v in val)
        else:
            ok = isinstance(val, type(default))
        if not ok:
            raise UsageError(f"{key} for '{command}' must look like {default!r}, got {val!r}")


def _load_data(spec, n, seed):
    """A CSV path or a generator name."""
    if spec in GENERATORS:
        return GENERATORS[spec](n, seed=seed)
    if os.path.exists(spec):
        return load_csv(spec)
    raise UsageError(f"'{spec}' is neither a generator ({', '.join(GENERATORS)}) nor a file")


def _summary(ds):
    lo, hi = ds.features.min(axis=0), ds.features.max(axis=0)
    ranges = ", ".join(f"[{a:.3g}, {b:.3g}]" for a, b in zip(lo, hi))
    counts = ", ".join(f"{name}: {c}" for name, c in zip(ds.class_names, ds.class_counts()))
    return f"N={len(ds)} d={ds.d} c={ds.c} classes {{{counts}}} feature ranges {ranges}"


# ---------------------------------------------------------------- gen

def cmd_gen(cfg):
    if cfg["dataset"] not in GENERATORS:
        raise UsageError(f"unknown dataset {cfg['dataset']!r}; choose from {', '.join(GENERATORS)}")
    if not cfg["out"]:
        raise UsageError("--out is required")
    kwargs = {} if cfg["noise"] is None else {"noise": cfg["noise"]}
    ds = GENERATORS[cfg["dataset"]](cfg["n"], seed=cfg["seed"], **kwargs)
    try:
        save_csv(ds, cfg["out"])
    except OSError as exc:
        raise UsageError(f"cannot write {cfg['out']}: {exc}") from None
    print(_summary(ds))
    return EXIT_OK


# ---------------------------------------------------------------- train / sweep

def _train_config(k, alpha, seed, epochs, milestones, batch_size, hidden,
                  lr=0.1, momentum=0.9, weight_decay=1e-4):
    if milestones is None:
        milestones = sorted({m for m in (epochs // 2, 3 * epochs // 4) if m > 0})
    return TrainConfig(learning_rate=lr, milestones=milestones, momentum=momentum,
                       weight_decay=weight_decay, epochs=epochs,
                       mixup=MixupConfig(k=k, alpha=alpha, seed=seed),
                       batch_size=batch_size, hidden=hidden, seed=seed)


def cmd_train(cfg):
    ds = _load_data(cfg["data"], cfg["n"], cfg["seed"])
    tr, te = train_test_split(ds, seed=cfg["seed"])
    tc = _train_config(cfg["k"], cfg["alpha"], cfg["seed"], cfg["epochs"], cfg["milestones"],
                       cfg["batch_size"], cfg["hidden"], cfg["lr"], cfg["momentum"],
                       cfg["weight_decay"])
    model, history = train(tr, te, tc)
    save_model(model, cfg["out"])
    if cfg["metrics"]:
        write_metrics_csv(history, cfg["metrics"])
    print(f"train_acc={evaluate(model, tr):.4f} test_acc={history[-1].test_acc:.4f}")
    return EXIT_OK


SWEEP_FIELDS = ["k", "alpha", "seed", "test_acc", "train_acc", "vicinal_deviation",
                "wall_time", "status"]


def _sweep_cell(job):
    """One (k, alpha, seed) training run; never raises on divergence."""
    data, n, k, alpha, seed, epochs, milestones, batch_size, hidden, dev_points = job
    t0 = time.perf_counter()
    row = {"k": k, "alpha": alpha, "seed": seed}
    ds = _load_data(data, n, seed)
    tr, te = train_test_split(ds, seed=seed)
    try:
        model, history = train(tr, te, _train_config(k, alpha, seed, epochs, milestones,
                                                     batch_size, hidden))
        row.update(test_acc=history[-1].test_acc, train_acc=evaluate(model, tr), status="ok")
    except KMixupError as exc:
        row.update(test_acc=float("nan"), train_acc=float("nan"), status=f"failed: {exc}")
    steps = max(1, math.ceil(dev_points / k))
    try:
        row["vicinal_deviation"] = analysis.vicinal_deviation(tr, MixupConfig(k, alpha, seed),
                                                              steps, seed=seed)
    except KMixupError:
        row["vicinal_deviation"] = float("nan")
    row["wall_time"] = time.perf_counter() - t0
    return row


def sweep_matrix(rows):
    """k x alpha table of mean test accuracy, recomputed from sweep rows."""
    ks = sorted({int(r["k"]) for r in rows})
    alphas = sorted({float(r["alpha"]) for r in rows})
    mat = np.full((len(ks), len(alphas)), np.nan)
    for i, k in enumerate(ks):
        for j, a in enumerate(alphas):
            vals = [float(r["test_acc"]) for r in rows
                    if int(r["k"]) == k and float(r["alpha"]) == a]
            vals = [v for v in vals if not math.isnan(v)]
            if vals:
                mat[i, j] = np.mean(vals)
    return ks, alphas, mat


def format_matrix(ks, alphas, mat):
    lines = ["k \\ alpha " + "".join(f"{a:>10g}" for a in alphas)]
    for k, row in zip(ks, mat):
        lines.append(f"{k:>9d} " + "".join(f"{100 * v:>10.3f}" for v in row))
    return "\n".join(lines)


def cmd_sweep(cfg):
    if not cfg["ks"] or not cfg["alphas"] or cfg["seeds"] < 1:
        raise UsageError("need non-empty --ks, --alphas and --seeds >= 1")
    if cfg["data"] not in GENERATORS and not os.path.exists(cfg["data"]):
        raise UsageError(f"unknown data source {cfg['data']!r}")
    jobs = [(cfg["data"], cfg["n"], k, float(a), s, cfg["epochs"], cfg["milestones"],
             cfg["batch_size"], cfg["hidden"], cfg["deviation_points"])
            for k in cfg["ks"] for a in cfg["alphas"] for s in range(cfg["seeds"])]
    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    with open(cfg["out"], "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(format_matrix(*sweep_matrix(rows)))
    failed = [r for r in rows if r["status"] != "ok"]
    if failed:
        print(f"{len(failed)} cell(s) failed; see status column", file=sys.stderr)
        return EXIT_STAT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------- verify

VERIFY_DEFAULTS = {
    "lemma1": {"m": 2, "separation": 10.0, "radius": 1.0, "dim": 2, "layout": "simplex",
               "k": 32, "trials": 500},
    "thm2": {"p": 0.5, "D": 8.0, "radius": 1.0, "dim": 2, "ks": [64, 128, 256],
             "trials": 500, "band": [0.45, 0.68]},
    "thm3": {"D": 10.0, "radius": 1.0, "dim": 2, "k": 256, "k_small": 8, "trials": 200,
             "max_violation": 0.05},
    "prop1": {"d_intrinsic": 1, "ambient_dim": 2, "ks": [8, 16, 32, 64, 128, 256, 512],
              "trials": 100, "band": None},
}
SLOPE_BANDS = {1: [-2.5, -1.5], 2: [-1.6, -0.6]}


def _verify_params(theorem, given):
    params = dict(VERIFY_DEFAULTS[theorem])
    for key, val in given.items():
        if key not in params:
            raise UsageError(f"unknown parameter for {theorem}: {key}")
        params[key] = val
    return params


def run_verification(theorem, params, seed):
    """Run one check; returns (passed, report dict). May raise PreconditionError."""
    if theorem == "lemma1":
        if params["layout"] == "simplex":
            # centres live in R^m; "dim" applies to the line layout only
            spec = simplex_cluster_spec(params["m"], params["separation"], params["radius"])
        elif params["layout"] == "line":
            spec = line_cluster_spec(params["m"], params["separation"], params["radius"],
                                     params["dim"])
        else:
            raise UsageError(f"layout must be 'simplex' or 'line', got {params['layout']!r}")
        stats = analysis.cross_cluster_stats(spec, params["k"], params["trials"], seed)
        mismatches = int(np.sum(stats.cross_counts != stats.forced_counts))
        report = {"exact_trials": params["trials"] - mismatches, "mismatched_trials": mismatches,
                  "stats": stats.to_dict()}
        return mismatches == 0, report
    if theorem == "thm2":
        spec = two_cluster_spec(params["D"], params["radius"], p=params["p"], dim=params["dim"])
        lo, hi = params["band"]
        per_k = []
        for i, k in enumerate(params["ks"]):
            st = analysis.cross_cluster_stats(spec, k, params["trials"], seed + i)
            per_k.append({"k": k, "cross_cluster_fraction": st.cross_cluster_fraction,
                          "scaled_fraction": float(st.scaled_fraction),
                          "forced_exact": st.forced_exact()})
        ok = all(lo <= r["scaled_fraction"] <= hi for r in per_k)
        return ok, {"band": [lo, hi], "per_k": per_k}
    if theorem == "thm3":
        spec = two_cluster_spec(params["D"], params["radius"], dim=params["dim"])
        big = analysis.endpoint_localization(spec, params["k"], params["trials"], seed)
        small = analysis.endpoint_localization(spec, params["k_small"], params["trials"], seed + 1)
        ok = (big.violation_fraction <= params["max_violation"]
              and big.violation_fraction <= small.violation_fraction)
        return ok, {"large_k": big.to_dict(), "small_k": small.to_dict(),
                    "max_violation": params["max_violation"]}
    if theorem == "prop1":
        d = params["d_intrinsic"]
        band = params["band"] or SLOPE_BANDS.get(d)
        rep = analysis.w2_scaling(analysis.manifold_sampler(d, params["ambient_dim"]),
                                  params["ks"], params["trials"], seed)
        ok = band[0] <= rep.fitted_slope <= band[1]
        return ok, {"band": band, "theory_slope": -2.0 / d, "scaling": rep.to_dict()}
    raise UsageError(f"unknown theorem {theorem!r}")


def cmd_verify(cfg):
    theorem = cfg["theorem"]
    if theorem not in VERIFY_DEFAULTS:
        raise UsageError(f"--theorem must be one of {', '.join(VERIFY_DEFAULTS)}")
    params = _verify_params(theorem, cfg["params"] or {})
    doc = {"theorem": theorem, "params": params, "seed": cfg["seed"]}
    try:
        passed, report = run_verification(theorem, params, cfg["seed"])
    except PreconditionError as exc:
        doc.update(status="precondition_failed", passed=False, reason=str(exc))
        _write_doc(doc, cfg["out"])
        print(f"{theorem}: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    doc.update(status="pass" if passed else "fail", passed=passed, report=report)
    _write_doc(doc, cfg["out"])
    print(f"{theorem}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_STAT_FAIL


def _write_doc(doc, path):
    text = json.dumps(analysis._jsonable(doc), indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text)


# ---------------------------------------------------------------- attack

def cmd_attack(cfg):
    if not cfg["model"] or not cfg["data"]:
        raise UsageError("--model and --data are required")
    model = load_model(cfg["model"])
    ds = load_csv(cfg["data"])
    if model.layer_sizes[0] != ds.d or model.layer_sizes[-1] != ds.c:
        raise PreconditionError(f"checkpoint expects d={model.layer_sizes[0]}, "
                                f"c={model.layer_sizes[-1]}; data has d={ds.d}, c={ds.c}")
    eps = cfg["epsilons"]
    if any(e < 0 for e in eps):
        raise UsageError("epsilons must be >= 0")
    rows = [{"epsilon": e, "adversarial_accuracy": adversarial_accuracy(model, ds, e)}
            for e in eps]
    analysis.write_csv(rows, cfg["out"])
    for r in rows:
        print(f"eps={r['epsilon']:<8g} acc={r['adversarial_accuracy']:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------- couple

def coupling_svg(ds, batches, size=480, margin=20):
    """SVG 1.1 scatter: data (grey), matched segments, vicinal points (red)."""
    pts = ds.features[:, :2] if ds.d >= 2 else np.c_[ds.features[:, 0], np.zeros(len(ds))]
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(np.max(hi - lo)) or 1.0
    scale = (size - 2 * margin) / span

    def xy(p):
        p = np.asarray(p)[:2] if len(p) >= 2 else np.array([p[0], 0.0])
        return margin + (p[0] - lo[0]) * scale, size - margin - (p[1] - lo[1]) * scale

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
           f'height="{size}" viewBox="0 0 {size} {size}">',
           '<rect width="100%" height="100%" fill="white"/>',
           '<g fill="#999999">']
    colors = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd"]
    for p, cls in zip(ds.features, ds.classes):
        x, y = xy(p)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.5" fill="{colors[cls % 4]}"/>')
    out.append('</g><g stroke="#444444" stroke-width="0.6" stroke-opacity="0.6">')
    for vb in batches:
        for gi, xi in zip(vb.gamma_index, vb.xi_index):
            (x1, y1), (x2, y2) = xy(ds.features[gi]), xy(ds.features[xi])
            out.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}"/>')
    out.append('</g><g fill="#d62728">')
    for vb in batches:
        for v in vb.features:
            x, y = xy(v)
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2"/>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n"


def cmd_couple(cfg):
    if not cfg["data"]:
        raise UsageError("--data is required")
    ds = _load_data(cfg["data"], cfg["n"], cfg["seed"])
    mc = MixupConfig(cfg["k"], cfg["alpha"], cfg["seed"])
    if cfg["steps"] < 0:
        raise UsageError("--steps must be >= 0")
    rng = np.random.default_rng(cfg["seed"])
    batches = [make_vicinal_step(ds, mc, rng) for _ in range(cfg["steps"])]
    if not batches:
        print("warning: zero steps requested; coupling plot is empty", file=sys.stderr)
    svg_path = cfg["out"]
    stem = svg_path[:-4] if svg_path.lower().endswith(".svg") else svg_path
    csv_path = stem + ".csv"
    svg_path = stem + ".svg"
    fields = (["step", "lambda", "gamma_index", "xi_index"]
              + [f"xg{j}" for j in range(ds.d)] + [f"xx{j}" for j in range(ds.d)]
              + [f"v{j}" for j in range(ds.d)])
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for s, vb in enumerate(batches):
            for gi, xi, v in zip(vb.gamma_index, vb.xi_index, vb.features):
                w.writerow([s, repr(vb.lam), int(gi), int(xi)]
                           + [repr(float(t)) for t in ds.features[gi]]
                           + [repr(float(t)) for t in ds.features[xi]]
                           + [repr(float(t)) for t in v])
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(coupling_svg(ds, batches))
    if batches:
        cross = np.mean(np.concatenate([ds.classes[vb.gamma_index] != ds.classes[vb.xi_index]
                                        for vb in batches]))
        print(f"{sum(len(b) for b in batches)} matched pairs, cross-class share {cross:.3f}")
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    p = _Parser(prog="kmixup", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="JSON file with option values")
        return sp

    g = add("gen", "generate a toy dataset as CSV")
    g.add_argument("--dataset", choices=sorted(GENERATORS))
    g.add_argument("--n", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--noise", type=float)
    g.add_argument("--out")

    t = add("train", "train one model and write a JSON checkpoint")
    t.add_argument("--data", help="CSV path or generator name")
    t.add_argument("--n", type=int)
    t.add_argument("--k", type=int)
    t.add_argument("--alpha", type=float)
    t.add_argument("--epochs", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--milestones", type=_int_list)
    t.add_argument("--momentum", type=float)
    t.add_argument("--weight-decay", dest="weight_decay", type=float)
    t.add_argument("--batch-size", dest="batch_size", type=int)
    t.add_argument("--hidden", type=_int_list)
    t.add_argument("--seed", type=int)
    t.add_argument("--out")
    t.add_argument("--metrics", help="per-epoch metrics CSV")

    s = add("sweep", "train over a k x alpha x seed grid")
    s.add_argument("--data", help="CSV path or generator name")
    s.add_argument("--n", type=int)
    s.add_argument("--ks", type=_int_list)
    s.add_argument("--alphas", type=_float_list)
    s.add_argument("--seeds", type=int, help="number of seeds (0..seeds-1)")
    s.add_argument("--epochs", type=int)
    s.add_argument("--milestones", type=_int_list)
    s.add_argument("--batch-size", dest="batch_size", type=int)
    s.add_argument("--hidden", type=_int_list)
    s.add_argument("--deviation-points", dest="deviation_points", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out")

    v = add("verify", "Monte Carlo check of a structural claim")
    v.add_argument("--theorem", choices=sorted(VERIFY_DEFAULTS))
    v.add_argument("--params", help="JSON object overriding the check's parameters")
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="report JSON (stdout if omitted)")

    a = add("attack", "FGSM robustness curve for a checkpoint")
    a.add_argument("--model")
    a.add_argument("--data")
    a.add_argument("--epsilons", type=_float_list)
    a.add_argument("--out")

    c = add("couple", "plot OT couplings and vicinal samples")
    c.add_argument("--data", help="CSV path or generator name")
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--steps", type=int)
    c.add_argument("--out", help="SVG path; the CSV goes next to it")
    return p


COMMANDS = {"gen": cmd_gen, "train": cmd_train, "sweep": cmd_sweep, "verify": cmd_verify,
            "attack": cmd_attack, "couple": cmd_couple}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"kmixup {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"kmixup {args.command}: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ShapeError, DatasetTooSmallError) as exc:
        print(f"kmixup {args.command}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (KMixupError, FileNotFoundError) as exc:
        print(f"kmixup {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
