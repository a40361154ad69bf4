"""Command-line interface.

Subcommands: simulate, evaluate, benchmark, rank, compare, stationarity,
embed. Every flag can also be supplied through ``--config FILE`` holding
flat ``key=value`` lines (flag name with dashes replaced by underscores);
explicit flags override the file. Exit codes: 0 on success, 1 on fatal
errors, 2 when some problems or methods failed but the run completed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .embedding import embed as embed_rows
from .embedding import estimate_embedding_dimension
from .harness import (
    ExperimentConfig,
    compare_to_baseline,
    rank_table_to_csv,
    read_results_csv,
    reproduce_synthetic,
    results_rank_table,
    results_to_csv,
    run_experiment,
)
from .learners import LearnerSpec
from .series import TimeSeries, load_csv, write_csv
from .splitters import METHODS
from .stationarity import ndiffs, wavelet_stationarity_test
from .synthetic import DGPSpec, monte_carlo
from .stationarity import KPSS_CRITICAL_5PCT  # noqa: F401  (re-export convenience)

logger = logging.getLogger("tseval")


def _column(text: str):
    text = str(text)
    return int(text) if text.lstrip("+-").isdigit() else text


def _dimension(text: str):
    text = str(text)
    return "auto" if text == "auto" else int(text)


def _methods(text: str) -> tuple:
    names = tuple(m.strip() for m in str(text).split(",") if m.strip())
    return names or METHODS


def _optional_float(text: str):
    text = str(text)
    return None if text in ("", "none", "None", "auto") else float(text)


def read_config(path) -> dict[str, str]:
    """Flat key=value file; blank lines and #-comments are ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno} is not key=value")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _learner_from_args(args) -> LearnerSpec:
    return LearnerSpec(kind=args.learner, lam=args.lam, k=args.knn_k)


def _add_learner_flags(sub) -> None:
    sub.add_argument("--learner", choices=("lasso", "knn"), default="lasso")
    sub.add_argument("--lam", type=_optional_float, default=None,
                     help="lasso penalty; default picks 0.01 * lambda_max per fold")
    sub.add_argument("--knn-k", type=int, default=5)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file mirroring the flags")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="tseval",
        description="Performance estimation for time-series forecasting models",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    sim = subparsers.add_parser("simulate", parents=[common],
                                help="draw synthetic series and write them as CSV")
    sim.add_argument("--dgp", choices=("s1", "s2", "s3"), required=True)
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument("--length", type=int, default=200)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--root-bound", type=float, default=5.0)
    sim.add_argument("--burn-in", type=int, default=200)
    sim.add_argument("--innovation-sd", type=float, default=1.0)
    sim.add_argument("--out-dir", help="write one CSV per trial here")
    sim.add_argument("--long-csv", help="write a single trial,t,value CSV")
    registry["simulate"] = sim

    ev = subparsers.add_parser("evaluate", parents=[common],
                               help="estimate forecasting loss on your own series")
    ev.add_argument("--csv", action="append", default=None, required=True,
                    help="input series file; repeatable")
    ev.add_argument("--column", type=_column, default=0)
    ev.add_argument("--p", type=_dimension, default="auto",
                    help="embedding dimension, or 'auto' for FNN selection")
    ev.add_argument("--d-max", type=int, default=30)
    ev.add_argument("--fnn-tolerance", type=float, default=0.01)
    ev.add_argument("--fraction", type=float, default=0.7,
                    help="estimation part of the series")
    ev.add_argument("--methods", type=_methods, default=METHODS,
                    help="comma-separated subset of the 11 method names")
    ev.add_argument("--K", type=int, default=10)
    ev.add_argument("--nreps", type=int, default=10)
    ev.add_argument("--seed", type=int, default=1)
    _add_learner_flags(ev)
    ev.add_argument("--out", required=True, help="results CSV path")
    ev.add_argument("--ranks", help="optional rank-table CSV path")
    registry["evaluate"] = ev

    bm = subparsers.add_parser("benchmark", parents=[common],
                               help="synthetic estimator-accuracy study")
    bm.add_argument("--dgp", choices=("s1", "s2", "s3"), required=True)
    bm.add_argument("--trials", type=int, default=200)
    bm.add_argument("--length", type=int, default=200)
    bm.add_argument("--seed", type=int, default=1)
    bm.add_argument("--methods", type=_methods, default=METHODS)
    bm.add_argument("--K", type=int, default=10)
    bm.add_argument("--nreps", type=int, default=10)
    _add_learner_flags(bm)
    bm.add_argument("--baseline", default="Rep-Holdout")
    bm.add_argument("--rope", type=float, default=2.5,
                    help="half-width of the practical-equivalence region, in percent")
    bm.add_argument("--bayes-samples", type=int, default=100_000)
    bm.add_argument("--no-compare", action="store_true")
    bm.add_argument("--out", required=True, help="results CSV path")
    bm.add_argument("--ranks", help="optional rank-table CSV path")
    registry["benchmark"] = bm

    rk = subparsers.add_parser("rank", parents=[common],
                               help="rank table from a results CSV")
    rk.add_argument("--results", required=True)
    rk.add_argument("--out", help="rank-table CSV path; stdout when omitted")
    registry["rank"] = rk

    cp = subparsers.add_parser("compare", parents=[common],
                               help="Bayes sign test of methods against a baseline")
    cp.add_argument("--results", required=True)
    cp.add_argument("--baseline", default="Rep-Holdout")
    cp.add_argument("--rope", type=float, default=2.5)
    cp.add_argument("--samples", type=int, default=100_000)
    cp.add_argument("--prior-strength", type=float, default=1.0)
    cp.add_argument("--normalization", choices=("loss", "none"), default="loss")
    cp.add_argument("--seed", type=int, default=1)
    cp.add_argument("--out", help="CSV path; stdout when omitted")
    registry["compare"] = cp

    st = subparsers.add_parser("stationarity", parents=[common],
                               help="differencing order and stationarity verdicts")
    st.add_argument("--csv", action="append", default=None, required=True)
    st.add_argument("--column", type=_column, default=0)
    st.add_argument("--alpha", type=float, default=0.05)
    st.add_argument("--max-d", type=int, default=2)
    st.add_argument("--correction", choices=("bonferroni", "fdr"), default="bonferroni")
    registry["stationarity"] = st

    em = subparsers.add_parser("embed", parents=[common],
                               help="choose an embedding dimension and export rows")
    em.add_argument("--csv", required=True)
    em.add_argument("--column", type=_column, default=0)
    em.add_argument("--p", type=_dimension, default="auto")
    em.add_argument("--d-max", type=int, default=30)
    em.add_argument("--fnn-tolerance", type=float, default=0.01)
    em.add_argument("--out", help="write target_time,x1..xp,y rows here")
    registry["embed"] = em

    return parser, registry


def _apply_config(argv, registry) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    namespace = argparse.Namespace()
    if not known.config:
        return namespace
    command = next((a for a in argv if not a.startswith("-")), None)
    sub = registry.get(command)
    if sub is None:
        raise ValueError(f"--config requires a recognised subcommand, got {command!r}")
    actions = {a.dest: a for a in sub._actions}
    for key, raw in read_config(known.config).items():
        if key in ("config", "verbose"):
            continue
        action = actions.get(key)
        if action is None:
            raise ValueError(f"config key {key!r} is not a flag of {command!r}")
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif isinstance(action, argparse._AppendAction):
            value = [part.strip() for part in raw.split(",") if part.strip()]
        elif action.choices is not None and raw not in action.choices:
            raise ValueError(f"config key {key!r}: {raw!r} not in {action.choices}")
        else:
            value = action.type(raw) if action.type else raw
        setattr(namespace, key, value)
    return namespace


def _cmd_simulate(args) -> int:
    if not args.out_dir and not args.long_csv:
        raise ValueError("simulate needs --out-dir or --long-csv")
    spec = DGPSpec(
        kind=args.dgp,
        r=args.root_bound,
        length=args.length,
        burn_in=args.burn_in,
        innovation_sd=args.innovation_sd,
    )
    stream = list(monte_carlo(spec, args.trials, args.seed))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for series in stream:
            write_csv(series, out / f"{series.name}.csv")
        logger.info("wrote %d series to %s", len(stream), out)
    if args.long_csv:
        with Path(args.long_csv).open("w", encoding="utf-8") as fh:
            fh.write("trial,t,value\n")
            for trial, series in enumerate(stream):
                for t, value in enumerate(series.values):
                    fh.write(f"{trial},{t},{value!r}\n")
    return 0


def _finish_experiment(outcome, args) -> int:
    results_to_csv(outcome.results, args.out)
    if getattr(args, "ranks", None) and outcome.rank_table is not None:
        rank_table_to_csv(outcome.rank_table, args.ranks)
    if outcome.rank_table is not None:
        print("method,mean_rank,sd_rank")
        for method, mean, sd in outcome.rank_table.sorted_methods():
            print(f"{method},{mean!r},{sd!r}")
    if outcome.failures:
        logger.warning("%d (problem, method) pairs failed", len(outcome.failures))
        return 2 if outcome.results else 1
    return 0


def _cmd_evaluate(args) -> int:
    config = ExperimentConfig(
        csv_paths=tuple(args.csv),
        csv_column=args.column,
        dgp=None,
        estimation_fraction=args.fraction,
        embedding=args.p,
        d_max=args.d_max,
        fnn_tolerance=args.fnn_tolerance,
        learner=_learner_from_args(args),
        methods=args.methods,
        K=args.K,
        nreps=args.nreps,
        base_seed=args.seed,
    )
    return _finish_experiment(run_experiment(config), args)


def _cmd_benchmark(args) -> int:
    outcome, comparisons = reproduce_synthetic(
        args.dgp,
        trials=args.trials,
        base_seed=args.seed,
        length=args.length,
        learner=_learner_from_args(args),
        methods=args.methods,
        K=args.K,
        nreps=args.nreps,
        baseline="" if args.no_compare else args.baseline,
        rope=(-args.rope, args.rope),
        bayes_samples=args.bayes_samples,
    )
    code = _finish_experiment(outcome, args)
    if comparisons:
        print("method,baseline,p_left,p_rope,p_right")
        for c in comparisons:
            o = c.outcome
            print(f"{c.method},{c.baseline},{o.p_left!r},{o.p_rope!r},{o.p_right!r}")
    return code


def _cmd_rank(args) -> int:
    results = read_results_csv(args.results)
    methods = []
    for r in results:
        if r.method not in methods:
            methods.append(r.method)
    table = results_rank_table(results, methods)
    if table is None:
        raise ValueError("no problem has results for every method")
    if args.out:
        rank_table_to_csv(table, args.out)
    else:
        print("method,mean_rank,sd_rank")
        for method, mean, sd in table.sorted_methods():
            print(f"{method},{mean!r},{sd!r}")
    return 0


def _cmd_compare(args) -> int:
    results = read_results_csv(args.results)
    comparisons = compare_to_baseline(
        results,
        baseline=args.baseline,
        rope=(-args.rope, args.rope),
        samples=args.samples,
        prior_strength=args.prior_strength,
        base_seed=args.seed,
        normalization=args.normalization,
    )
    lines = ["method,baseline,p_left,p_rope,p_right"]
    for c in comparisons:
        o = c.outcome
        lines.append(f"{c.method},{c.baseline},{o.p_left!r},{o.p_rope!r},{o.p_right!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_stationarity(args) -> int:
    print("name,I,S,rejections")
    code = 0
    for path in args.csv:
        try:
            series = load_csv(path, args.column)
            order = ndiffs(series, args.max_d)
            verdict = wavelet_stationarity_test(series, args.alpha, args.correction)
        except Exception as exc:  # noqa: BLE001 - keep scanning other files
            logger.warning("stationarity on %s failed: %s", path, exc)
            code = 2
            continue
        triples = ";".join(
            f"{r.periodogram_level}:{r.coefficient_scale}:{r.position}"
            for r in verdict.rejections
        )
        print(f"{series.name},{order},{int(verdict.stationary)},{triples}")
    return code


def _cmd_embed(args) -> int:
    series = load_csv(args.csv, args.column)
    if args.p == "auto":
        p = estimate_embedding_dimension(
            series, d_max=args.d_max, tolerance=args.fnn_tolerance
        )
    else:
        p = int(args.p)
    print(f"p={p}")
    if args.out:
        dataset = embed_rows(series, p)
        with Path(args.out).open("w", encoding="utf-8") as fh:
            headers = ["target_time"] + [f"x{i + 1}" for i in range(p)] + ["y"]
            fh.write(",".join(headers) + "\n")
            for row, target, tt in zip(
                dataset.predictors, dataset.targets, dataset.target_time
            ):
                cells = [str(int(tt))] + [repr(float(v)) for v in row] + [repr(float(target))]
                fh.write(",".join(cells) + "\n")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "evaluate": _cmd_evaluate,
    "benchmark": _cmd_benchmark,
    "rank": _cmd_rank,
    "compare": _cmd_compare,
    "stationarity": _cmd_stationarity,
    "embed": _cmd_embed,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    try:
        namespace = _apply_config(argv, registry)
        args = parser.parse_args(argv, namespace)
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - single fatal-error funnel
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
