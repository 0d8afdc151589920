"""Command-line entry points: extract, train, evaluate, compare-tables.

Every run requires a seed and echoes its fully resolved configuration
into each output file as leading comment lines, so outputs are
reproducible byte-for-byte from their own headers. Exit status is 0
only when every requested output was written.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import parse_config
from .errors import CodelError, ParameterError
from .evaluation import METRIC_NAMES
from .hrv import extract_features
from .io import (
    read_features_csv,
    read_rr_csv,
    read_signal_csv,
    read_table,
    write_features_csv,
    write_table,
    write_weights_csv,
)
from .local_search import METHODS
from .signal import RrSeries, Signal, signal_to_rr
from .training import VARIANT_NAMES, build_comparison, evaluate_grid, train_variant

__all__ = ["main"]

WTL_TIE_TOL = 1e-9


def _knob_overrides(args):
    knobs = (
        "population_size", "nfe_max", "scale_factor", "crossover_rate",
        "jumping_rate", "clustering_period", "lower", "upper", "folds",
        "method", "hidden", "epochs", "patience", "learning_rate",
        "momentum", "jobs",
    )
    return {k: getattr(args, k) for k in knobs if getattr(args, k, None) is not None}


def _resolve_config(args):
    return parse_config(args.config, seed=args.seed, **_knob_overrides(args))


def _out_path(args, name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def cmd_extract(args) -> None:
    config = parse_config(args.config, seed=args.seed)
    if not args.signal_csv and not args.rr_csv:
        raise ParameterError("extract needs --signal-csv or --rr-csv input files")
    if args.signal_csv and args.fs is None:
        raise ParameterError("raw signal input needs --fs")

    records = []
    inputs = []
    for path in args.signal_csv or ():
        samples = read_signal_csv(path)
        rr = signal_to_rr(Signal(samples, args.fs))
        records.append(extract_features(rr))
        inputs.append(str(path))
    for path in args.rr_csv or ():
        rr = RrSeries(read_rr_csv(path))
        records.append(extract_features(rr))
        inputs.append(str(path))

    comments = [
        "command=extract",
        f"inputs={';'.join(inputs)}",
        f"fs={args.fs}",
        f"label={args.label}",
    ] + config.manifest_lines()
    out = Path(args.out_csv)
    if not out.is_absolute():
        out = _out_path(args, str(out))
    write_features_csv(out, records, [args.label] * len(records), comments)


def cmd_train(args) -> None:
    config = _resolve_config(args)
    dataset = read_features_csv(args.features_csv)
    model = train_variant(
        dataset, config.seed, config.hidden, config.codel_config(),
        config.local_search_config(), boosted=True,
    )
    comments = [
        "command=train",
        f"input={args.features_csv}",
    ] + config.manifest_lines()

    write_weights_csv(_out_path(args, "weights.csv"), model.params,
                      model.topology, comments)
    write_table(
        _out_path(args, "search_history.csv"),
        ["iteration", "nfe", "best_fitness"],
        [
            [i + 1, int(model.search_nfe[i]), float(model.search_history[i])]
            for i in range(len(model.search_history))
        ],
        comments,
    )
    write_table(
        _out_path(args, "refine_history.csv"),
        ["epoch", "mse", "classification_error"],
        [
            [i + 1, float(model.refine_loss[i]), float(model.refine_error[i])]
            for i in range(len(model.refine_loss))
        ],
        comments,
    )
    manifest_rows = [line.split("=", 1) for line in config.manifest_lines()]
    manifest_rows.append(["nfe_used", model.nfe_used])
    manifest_rows.append(["final_train_error", float(model.train_error)])
    write_table(_out_path(args, "manifest.csv"), ["key", "value"],
                manifest_rows, comments)


def _pair_outcomes(comparison):
    """Map boosted variant name -> 'win'/'tie'/'loss' per metric index."""
    outcomes = {}
    row = {name: i for i, name in enumerate(comparison.names)}
    for base, boosted in comparison.pairs:
        per_metric = []
        for j in range(len(METRIC_NAMES)):
            diff = comparison.means_pct[row[boosted], j] - comparison.means_pct[row[base], j]
            if diff > WTL_TIE_TOL:
                per_metric.append("win")
            elif abs(diff) <= WTL_TIE_TOL:
                per_metric.append("tie")
            else:
                per_metric.append("loss")
        outcomes[boosted] = per_metric
    return outcomes


def _write_comparison(args, comparison, comments) -> None:
    outcomes = _pair_outcomes(comparison)

    write_table(
        _out_path(args, "mean_rank.csv"),
        ["algorithm", "mean_rank"],
        [
            [name, float(comparison.mean_ranks[i])]
            for i, name in enumerate(comparison.names)
        ],
        comments,
    )
    write_table(
        _out_path(args, "wtl.csv"),
        ["metric", "wins", "ties", "losses"],
        [
            [metric, *comparison.wtl_per_metric[metric]]
            for metric in METRIC_NAMES
        ],
        comments,
    )
    write_table(
        _out_path(args, "ee.csv"),
        ["algorithm", *METRIC_NAMES],
        [
            [boosted] + [float(v) for v in comparison.ee_table[p]]
            for p, (_, boosted) in enumerate(comparison.pairs)
        ],
        comments,
    )
    write_table(
        _out_path(args, "ranks.csv"),
        ["algorithm", *[f"rank_{m}" for m in METRIC_NAMES], "mean_rank"],
        [
            [name]
            + [float(comparison.ranks[i, j]) for j in range(len(METRIC_NAMES))]
            + [float(comparison.mean_ranks[i])]
            for i, name in enumerate(comparison.names)
        ],
        comments,
    )
    return outcomes


def cmd_evaluate(args) -> None:
    config = _resolve_config(args)
    dataset = read_features_csv(args.features_csv)
    results = evaluate_grid(
        dataset, config.folds, config.seed, config.hidden,
        config.codel_config(), config.local_search_config(),
        jobs=config.jobs,
    )
    means_pct = np.array([
        [results[name].summaries[m].mean * 100.0 for m in METRIC_NAMES]
        for name in VARIANT_NAMES
    ])
    comparison = build_comparison(VARIANT_NAMES, means_pct)
    comments = [
        "command=evaluate",
        f"input={args.features_csv}",
    ] + config.manifest_lines()

    outcomes = _write_comparison(args, comparison, comments)
    for j, metric in enumerate(METRIC_NAMES):
        w, t, l = comparison.wtl_per_metric[metric]
        rows = []
        for i, name in enumerate(VARIANT_NAMES):
            s = results[name].summaries[metric]
            rows.append([
                name,
                s.mean * 100.0, s.std * 100.0, s.min * 100.0,
                s.max * 100.0, s.median * 100.0,
                float(comparison.ranks[i, j]),
                outcomes[name][j] if name in outcomes else "",
            ])
        write_table(
            _out_path(args, f"{metric}.csv"),
            ["algorithm", "mean", "std", "min", "max", "median", "rank", "wtl"],
            rows,
            comments + [f"wtl={w}/{t}/{l}"],
        )


def cmd_compare_tables(args) -> None:
    config = parse_config(args.config, seed=args.seed)
    header, rows, _ = read_table(args.means_csv)
    if header != ["algorithm", *METRIC_NAMES]:
        raise ParameterError(
            f"{args.means_csv}: expected header algorithm,{','.join(METRIC_NAMES)}"
        )
    if not rows:
        raise ParameterError(f"{args.means_csv} contains no data rows")
    names = [r[0] for r in rows]
    try:
        means_pct = np.array([[float(c) for c in r[1:]] for r in rows])
    except ValueError as exc:
        raise ParameterError(f"{args.means_csv}: non-numeric value ({exc})") from None
    comparison = build_comparison(names, means_pct)
    comments = [
        "command=compare-tables",
        f"input={args.means_csv}",
    ] + config.manifest_lines()
    _write_comparison(args, comparison, comments)


def _add_common(parser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="root random seed (required)")
    parser.add_argument("--config", default=None,
                        help="key = value settings file")
    parser.add_argument("--out-dir", default=".",
                        help="directory receiving output files")


def _add_knobs(parser) -> None:
    parser.add_argument("--population-size", "--np", dest="population_size", type=int)
    parser.add_argument("--nfe", "--nfe-max", dest="nfe_max", type=int)
    parser.add_argument("--scale-factor", "--f", dest="scale_factor", type=float)
    parser.add_argument("--crossover-rate", "--cr", dest="crossover_rate", type=float)
    parser.add_argument("--jumping-rate", "--jr", dest="jumping_rate", type=float)
    parser.add_argument("--clustering-period", "--cp", dest="clustering_period", type=int)
    parser.add_argument("--lower", type=float)
    parser.add_argument("--upper", type=float)
    parser.add_argument("--method", choices=list(METHODS))
    parser.add_argument("--hidden", help="comma-separated hidden layer sizes")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--patience", type=int)
    parser.add_argument("--learning-rate", "--lr", dest="learning_rate", type=float)
    parser.add_argument("--momentum", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codel",
        description="Evolutionary MLP training on heart-rate-variability features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="compute feature rows from signals or RR files")
    p.add_argument("--signal-csv", action="append", default=None,
                   help="raw signal file (one `sample` column); repeatable")
    p.add_argument("--rr-csv", action="append", default=None,
                   help="RR interval file (one `rr_ms` column); repeatable")
    p.add_argument("--fs", type=float, default=None,
                   help="sampling rate in Hz for raw signal input")
    p.add_argument("--label", type=int, default=0, choices=(0, 1),
                   help="class label attached to every extracted row")
    p.add_argument("--out-csv", default="features.csv")
    _add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="global search plus refinement on a feature file")
    p.add_argument("--features-csv", required=True)
    _add_common(p)
    _add_knobs(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate",
                       help="cross-validate all twelve training variants")
    p.add_argument("--features-csv", required=True)
    p.add_argument("--folds", "-k", dest="folds", type=int)
    p.add_argument("--jobs", type=int, help="worker processes for the fold grid")
    _add_common(p)
    _add_knobs(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare-tables",
                       help="ranks, W/T/L, and error enhancement from a means table")
    p.add_argument("--means-csv", required=True,
                   help="CSV: algorithm plus the six metric means in percent")
    _add_common(p)
    p.set_defaults(func=cmd_compare_tables)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CodelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
