"""Command-line entry point.

    cubemix mixing exact-pocket [--threshold F] [--out PATH]
    cubemix unlink stats|curve --model corners|rubiks-all --trials N --seed S [--tmax T]
    cubemix bound heuristic --model M --trials N --seed S [--threshold F]
    cubemix pairgraph one --a0 K --b0 K [--semantics chain|paper] [--method exact|iterate]
    cubemix pairgraph scan [--semantics chain|paper] [--method exact|iterate] [--epsilon F]
    cubemix pairgraph mc --a0 K --b0 K --trials N --seed S
    cubemix verify group

Exit status: 0 on success, 2 on usage errors, 1 when a computation fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path


from . import canonical_index, cube_model, distribution_engine, pair_graph, unlink_time

log = logging.getLogger("cubemix")


class ComputationError(RuntimeError):
    pass


# --- argument types ---------------------------------------------------------


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1], got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _corner(text: str) -> int:
    if text.upper() in cube_model.CORNER_NAMES:
        return cube_model.CORNER_NAMES.index(text.upper())
    v = int(text)
    if not 0 <= v < 8:
        raise argparse.ArgumentTypeError(f"corner slot must be 0..7 or a name like DFR, got {text}")
    return v


def _model(text: str) -> str:
    try:
        return unlink_time.UnlinkModel(text).name
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="write results here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache-dir", type=Path, default=Path(".cache"))
    common.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    common.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--model", type=_model, default="corners")
    sim.add_argument("--trials", type=_positive_int, default=100_000)
    sim.add_argument("--seed", type=_nonneg_int, default=1)

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--semantics", choices=pair_graph.SEMANTICS, default="chain")
    graph.add_argument("--method", choices=pair_graph.METHODS, default="exact")
    graph.add_argument("--epsilon", type=_positive_float, default=1e-9)
    graph.add_argument("--max-iters", type=_positive_int, default=10_000)

    parser = argparse.ArgumentParser(prog="cubemix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    mixing = sub.add_parser("mixing", help="exact distance to uniform").add_subparsers(
        dest="action", required=True
    )
    p = mixing.add_parser("exact-pocket", parents=[common])
    p.add_argument("--threshold", type=_probability, default=0.25)

    unlink = sub.add_parser("unlink", help="stopping time T").add_subparsers(
        dest="action", required=True
    )
    unlink.add_parser("stats", parents=[common, sim])
    p = unlink.add_parser("curve", parents=[common, sim])
    p.add_argument("--tmax", type=_nonneg_int, default=100)

    bound = sub.add_parser("bound", help="heuristic mixing bound").add_subparsers(
        dest="action", required=True
    )
    p = bound.add_parser("heuristic", parents=[common, sim])
    p.add_argument("--threshold", type=_probability, default=0.25)

    pg = sub.add_parser("pairgraph", help="corner order at T").add_subparsers(
        dest="action", required=True
    )
    p = pg.add_parser("one", parents=[common, graph])
    p.add_argument("--a0", type=_corner, required=True)
    p.add_argument("--b0", type=_corner, required=True)
    pg.add_parser("scan", parents=[common, graph])
    p = pg.add_parser("mc", parents=[common])
    p.add_argument("--a0", type=_corner, required=True)
    p.add_argument("--b0", type=_corner, required=True)
    p.add_argument("--trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=_nonneg_int, default=1)

    verify = sub.add_parser("verify", help="group checks").add_subparsers(
        dest="action", required=True
    )
    verify.add_parser("group", parents=[common])
    return parser


# --- output helpers -----------------------------------------------------------


@contextmanager
def _sink(path: Path | None):
    if path is None:
        yield sys.stdout
        return
    buf = io.StringIO()
    yield buf
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def _write_csv(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _write_json(out, obj):
    json.dump(obj, out, indent=2, sort_keys=False)
    out.write("\n")


# --- subcommands --------------------------------------------------------------


def _cmd_mixing(args, out):
    tables = canonical_index.load_or_build_tables(args.cache_dir)
    report = distribution_engine.mixing_time(tables, args.threshold)
    if args.format == "json":
        _write_json(
            out,
            {
                "threshold": args.threshold,
                "tau": report.tau,
                "trace": [{"t": t, "tv_distance": float(f"{d:.12g}")} for t, d in report.trace],
            },
        )
    else:
        _write_csv(out, ["t", "tv_distance"], [(t, f"{d:.12g}") for t, d in report.trace])
    log.info("# tau=%d", report.tau)


def _cmd_unlink(args, out):
    if args.action == "stats":
        stats = unlink_time.unlink_stats(args.model, args.trials, args.seed, args.jobs)
        _write_json(out, stats.as_dict())
        return
    curve = unlink_time.survival_curve(args.model, args.trials, args.seed, args.tmax, args.jobs)
    rows = list(curve.rows())
    if args.format == "json":
        keys = ("t", "p_t_less_T", "stderr", "trials")
        _write_json(out, [dict(zip(keys, r)) for r in rows])
    else:
        _write_csv(out, ["t", "p_t_less_T", "stderr", "trials"], rows)


def _cmd_bound(args, out):
    T = unlink_time.simulate_T_many(args.model, args.trials, args.seed, args.jobs)
    curve = unlink_time.SurvivalCurve.from_times(T, int(T.max()))
    _write_json(
        out,
        {
            "model": args.model,
            "trials": args.trials,
            "seed": args.seed,
            "threshold": args.threshold,
            "mean_T": float(T.mean()),
            "heuristic_bound": unlink_time.heuristic_mixing_bound(curve, args.threshold),
            "note": "heuristic only: T is not a strong uniform time",
        },
    )


_PAIR_HEADER = ["a0", "b0", "semantics", "method", "z", "p_before", "deviation", "ci_low", "ci_high"]


def _cmd_pairgraph(args, out):
    if args.action == "mc":
        if args.a0 == args.b0:
            raise argparse.ArgumentTypeError("--a0 and --b0 must differ")
        mc = pair_graph.monte_carlo_order_check(args.a0, args.b0, args.trials, args.seed, args.jobs)
        _write_json(out, dict(mc.__dict__))
        return
    if args.action == "one":
        if args.a0 == args.b0:
            raise argparse.ArgumentTypeError("--a0 and --b0 must differ")
        g = pair_graph.build_pair_graph(args.a0, args.b0, args.semantics)
        results = [pair_graph.order_probability(g, args.method, args.epsilon, args.max_iters)]
    else:
        results = pair_graph.scan_all_pairs(
            args.semantics, args.method, args.epsilon, args.jobs, args.max_iters
        ).results
    max_dev = max(r.deviation for r in results)
    if args.format == "json":
        _write_json(out, {"max_deviation": max_dev, "rows": [r.row() for r in results]})
    else:
        _write_csv(out, _PAIR_HEADER, [[r.row()[k] for k in _PAIR_HEADER] for r in results])
    log.info("# max_deviation=%.12g", max_dev)


def _cmd_verify(args, out):
    from . import verify

    report = verify.verify_group(args.cache_dir)
    _write_json(out, report)
    if not report["ok"]:
        raise ComputationError("group verification failed")


_COMMANDS = {
    "mixing": _cmd_mixing,
    "unlink": _cmd_unlink,
    "bound": _cmd_bound,
    "pairgraph": _cmd_pairgraph,
    "verify": _cmd_verify,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s",
        force=True,
    )
    try:
        with _sink(args.out) as out:
            _COMMANDS[args.command](args, out)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (RuntimeError, unlink_time.NoCrossing, canonical_index.CorruptStateError) as exc:
        print(f"cubemix: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
