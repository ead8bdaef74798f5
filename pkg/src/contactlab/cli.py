"""Command-line front-end for reproducible contact-surrogate experiments.

Five subcommands cover the whole workflow: `gen` simulates a scene and
writes the labeled dataset, `train-nfis` and `train-som` fit the two
classifiers, `eval` prints their check-split metrics, and `scan` runs the
window fusion over a scene snapshot.  Every command is deterministic under
a fixed config and seed, and writes its outputs only after all of them are
computed, so a failing run leaves no partial files.

Seed precedence: --seed flag, then the config file, then the
CONTACTLAB_SEED environment variable, then the built-in default.
"""

import argparse
import copy
import json
import os
import sys

import numpy as np

from .anfis import compute_standardization, load_model, save_model, train_hybrid
from .errors import ContactLabError
from .pipeline import (
    build_dataset,
    default_scene,
    domain_bounds,
    evaluate,
    gravity_from_features,
    load_dataset,
    load_scene,
    nfis_predictor,
    random_windows,
    samples_from_series,
    save_dataset,
    save_trace,
    save_window_report,
    scan_grid,
    scan_windows,
    simulate,
    som_predictor,
)
from .som import (
    SomSchedule,
    initialize_grid,
    label_neurons,
    load_grid,
    save_grid,
    train_som,
    winner_histogram,
)
from .subclust import SubclustParams, calibrate_radius, rules_from_clusters, subtractive_cluster

DEFAULT_SEED = 4

DEFAULT_CONFIG = {
    "scene": None,
    "seed": DEFAULT_SEED,
    "dataset": {"n_train": 100, "n_check": 50},
    "subclust": {"radius": 0.8, "squash": 1.25, "accept_ratio": 0.5, "reject_ratio": 0.15},
    "anfis": {"epochs": 8, "lr": 0.01},
    "som": {
        "nx": 3,
        "ny": 3,
        "epochs": 300,
        "lr0": 0.5,
        "lr_end": 0.01,
        "radius0": 1.5,
        "radius_end": 0.35,
    },
    "scan": {"count": 20, "width": 3.0, "height": 3.0, "step": 100, "grid": [20, 20]},
}


def _deep_update(base: dict, extra: dict) -> dict:
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value
    return base


def _load_config(path):
    """Returns (effective config, raw user config)."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    user = {}
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        _deep_update(cfg, user)
    return cfg, user


def _resolve_seed(args, user_cfg) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in user_cfg:
        return int(user_cfg["seed"])
    env = os.environ.get("CONTACTLAB_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _resolve_scene(cfg):
    if cfg["scene"] is None:
        return default_scene()
    return load_scene(cfg["scene"])


def _dataset_arrays(dataset):
    x = np.array([s.features for s in dataset.train])
    y = np.array([float(s.label) for s in dataset.train])
    return x, y


def _gravity_matrix(samples) -> np.ndarray:
    return np.array([gravity_from_features(s.features) for s in samples])


def _som_scaler(dataset):
    """Standardizer for gravity features, fitted on the train split.

    The grid file stores no scaler, so every consumer recomputes this from
    the dataset; the dataset file is the canonical artifact.
    """
    means, stds = compute_standardization(_gravity_matrix(dataset.train))
    return lambda g: (g - means) / stds


def _subclust_params(cfg, radius=None) -> SubclustParams:
    sc = cfg["subclust"]
    return SubclustParams(
        radius=sc["radius"] if radius is None else radius,
        squash=sc["squash"],
        accept_ratio=sc["accept_ratio"],
        reject_ratio=sc["reject_ratio"],
    )


def cmd_gen(args) -> int:
    cfg, user = _load_config(args.config)
    seed = _resolve_seed(args, user)
    scene = _resolve_scene(cfg)
    series = simulate(scene)
    samples = samples_from_series(series)
    dataset = build_dataset(
        samples, cfg["dataset"]["n_train"], cfg["dataset"]["n_check"], seed=seed
    )
    os.makedirs(args.out, exist_ok=True)
    save_dataset(dataset, os.path.join(args.out, "dataset.csv"))
    save_trace(samples, scene.dt, os.path.join(args.out, "trace.csv"))
    print(
        f"wrote {len(dataset.train)}+{len(dataset.check)} samples over "
        f"{len(samples)} steps to {args.out}"
    )
    return 0


def cmd_train_nfis(args) -> int:
    cfg, user = _load_config(args.config)
    seed = _resolve_seed(args, user)
    dataset = load_dataset(
        os.path.join(args.out, "dataset.csv"), cfg["dataset"]["n_train"]
    )
    x, y = _dataset_arrays(dataset)
    scaler = compute_standardization(x)
    z = (x - scaler[0]) / scaler[1]
    if args.rules == "auto":
        radius = cfg["subclust"]["radius"]
        centers = subtractive_cluster(z, _subclust_params(cfg))
    else:
        radius, centers = calibrate_radius(z, int(args.rules), _subclust_params(cfg))
    model = rules_from_clusters(centers, x, y, radius, standardization=scaler)
    model, trace = train_hybrid(
        model, x, y, epochs=cfg["anfis"]["epochs"], lr=cfg["anfis"]["lr"]
    )
    accuracy, confusion = evaluate(nfis_predictor(model), dataset.check)
    metrics = {
        "rules": model.m,
        "radius": radius,
        "seed": seed,
        "train_rmse_trace": trace,
        "check_accuracy": accuracy,
        "confusion": confusion.tolist(),
    }
    os.makedirs(args.out, exist_ok=True)
    tag = args.rules
    save_model(model, os.path.join(args.out, f"nfis-{tag}.json"))
    with open(os.path.join(args.out, f"nfis-{tag}-metrics.json"), "w") as fh:
        json.dump(metrics, fh, indent=2)
        fh.write("\n")
    print(f"trained {model.m} rules, check accuracy {accuracy:.3f}")
    return 0


def cmd_train_som(args) -> int:
    cfg, user = _load_config(args.config)
    seed = _resolve_seed(args, user)
    dataset = load_dataset(
        os.path.join(args.out, "dataset.csv"), cfg["dataset"]["n_train"]
    )
    som_cfg = cfg["som"]
    epochs = som_cfg["epochs"] if args.epochs is None else args.epochs
    gravity = _gravity_matrix(dataset.train)
    means, stds = compute_standardization(gravity)
    z = (gravity - means) / stds
    labels = np.array([int(s.label) for s in dataset.train])
    grid = initialize_grid(som_cfg["nx"], som_cfg["ny"], z, seed + 1)
    schedule = SomSchedule(
        epochs=epochs,
        lr0=som_cfg["lr0"],
        lr_end=som_cfg["lr_end"],
        radius0=som_cfg["radius0"],
        radius_end=som_cfg["radius_end"],
    )
    grid = train_som(grid, z, schedule, seed + 2)
    grid = label_neurons(grid, z, labels)
    wins = winner_histogram(grid, z)
    os.makedirs(args.out, exist_ok=True)
    save_grid(grid, os.path.join(args.out, "som-grid.json"))
    with open(os.path.join(args.out, "som-labels.csv"), "w") as fh:
        fh.write("i,j,label,win_count\n")
        for q in range(grid.nx * grid.ny):
            i, j = grid.position(q)
            fh.write(f"{i},{j},{int(grid.labels[q])},{int(wins[q])}\n")
    print(f"trained {grid.nx}x{grid.ny} map for {epochs} epochs")
    return 0


def cmd_eval(args) -> int:
    cfg, _ = _load_config(args.config)
    dataset = load_dataset(
        os.path.join(args.out, "dataset.csv"), cfg["dataset"]["n_train"]
    )
    report = {}
    for path in args.nfis or []:
        model = load_model(path)
        accuracy, confusion = evaluate(nfis_predictor(model), dataset.check)
        report[os.path.basename(path)] = {
            "accuracy": accuracy,
            "confusion": confusion.tolist(),
        }
    if args.som is not None:
        grid = load_grid(args.som)
        predictor = som_predictor(grid, _som_scaler(dataset))
        accuracy, confusion = evaluate(predictor, dataset.check)
        report[os.path.basename(args.som)] = {
            "accuracy": accuracy,
            "confusion": confusion.tolist(),
        }
    if args.oracle:
        # Sanity mode: a lookup classifier that answers with the stored
        # label must score 1.0 with a diagonal confusion matrix.
        truth = {s.features.tobytes(): int(s.label) for s in dataset.check}
        accuracy, confusion = evaluate(
            lambda f: truth[np.asarray(f, dtype=float).tobytes()], dataset.check
        )
        report["oracle"] = {"accuracy": accuracy, "confusion": confusion.tolist()}
    print(json.dumps(report, indent=2))
    return 0


def cmd_scan(args) -> int:
    cfg, user = _load_config(args.config)
    seed = _resolve_seed(args, user)
    dataset = load_dataset(
        os.path.join(args.out, "dataset.csv"), cfg["dataset"]["n_train"]
    )
    model = load_model(args.nfis or os.path.join(args.out, "nfis-13.json"))
    grid = load_grid(args.som or os.path.join(args.out, "som-grid.json"))
    scaler = _som_scaler(dataset)
    scene = _resolve_scene(cfg)
    scan_cfg = cfg["scan"]
    step = scan_cfg["step"]
    if not 0 <= step <= scene.steps:
        raise ValueError(f"scan step {step} outside the scene's 0..{scene.steps}")
    snapshot = simulate(scene)[step].blocks
    domain = domain_bounds(snapshot)
    windows = random_windows(
        domain, scan_cfg["count"], (scan_cfg["width"], scan_cfg["height"]), seed + 3
    )
    reports = scan_windows(domain, windows, grid, model, snapshot, scaler)
    map_rows = scan_grid(
        domain,
        (scan_cfg["width"], scan_cfg["height"]),
        tuple(scan_cfg["grid"]),
        grid,
        model,
        snapshot,
        scaler,
    )
    os.makedirs(args.out, exist_ok=True)
    save_window_report(reports, os.path.join(args.out, "windows.csv"))
    map_path = os.path.join(args.out, "contact-map.dat")
    with open(map_path, "w") as fh:
        fh.write("# x y code\n")
        last_x = None
        for x, y, code in map_rows:
            if last_x is not None and x != last_x:
                fh.write("\n")
            fh.write(f"{repr(x)} {repr(y)} {code}\n")
            last_x = x
    disagreements = sum(r.disagree for r in reports)
    print(f"scanned {len(reports)} windows, {disagreements} disagreements")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contactlab",
        description="Contact-state surrogate experiments: generate, train, evaluate, scan.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default="out", help="artifact directory (default: out)")

    p = sub.add_parser("gen", help="simulate the scene and write dataset + trace")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train-nfis", help="fit the fuzzy classifier")
    common(p)
    p.add_argument(
        "--rules",
        choices=["13", "39", "auto"],
        default="auto",
        help="calibrate the cluster radius to this rule count, or use the configured radius",
    )
    p.set_defaults(func=cmd_train_nfis)

    p = sub.add_parser("train-som", help="fit and label the feature map")
    common(p)
    p.add_argument("--epochs", type=int, default=None, help="override the configured epochs")
    p.set_defaults(func=cmd_train_som)

    p = sub.add_parser("eval", help="print check-split metrics for trained artifacts")
    common(p)
    p.add_argument("--nfis", action="append", help="fuzzy model JSON (repeatable)")
    p.add_argument("--som", default=None, help="grid JSON")
    p.add_argument(
        "--oracle",
        action="store_true",
        help="sanity mode: score the dataset labels against themselves",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scan", help="fuse both classifiers over random windows")
    common(p)
    p.add_argument("--nfis", default=None, help="fuzzy model JSON (default: out/nfis-13.json)")
    p.add_argument("--som", default=None, help="grid JSON (default: out/som-grid.json)")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContactLabError as exc:
        print(f"error: {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
