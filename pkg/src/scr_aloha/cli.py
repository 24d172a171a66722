"""Command-line front end: design tables, curves, simulation runs, codebooks.

Exit codes are a stable contract for CI: 0 success, 1 usage error (bad
arguments, malformed config, unwritable path), 2 numeric or verification
failure (codebook invariant violation, failed search, trace that fails its
own replay check, overflow-aborted run).

Every output embeds metadata (seed, parameter set, tool version): CSV files
as leading '#' comment lines, JSON files as a "meta" object.  Files are
written atomically (temp file + rename).  The environment variable
SCR_ALOHA_SEED supplies the default seed wherever one is accepted.

CSV floats carry 6 significant digits; JSON carries full precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import __version__
from .alpha_solver import design_csv_lines, design_table, solve_alpha
from .analytics import expected_throughput, outcome_probabilities, throughput_lower_bound
from .signatures import (
    ConstructionError,
    benchmark_length_bits,
    codebook_from_dict,
    codebook_to_dict,
    construct_codebook,
    verify_codebook,
)
from .sim import (
    SimConfigError,
    SimulationOverflowError,
    config_to_dict,
    load_config,
    read_trace_csv,
    replay_ok,
    run_simulation,
    sweep_lambda,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

_SEED_ENV = "SCR_ALOHA_SEED"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default, which collides with the
    # verification-failure code; remap to 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp.", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _meta_lines(command: str, params: dict, seed: object = "n/a (deterministic)") -> list[str]:
    return [
        f"# tool: scr-aloha {__version__}",
        f"# command: {command}",
        "# parameters: " + " ".join(f"{k}={v}" for k, v in params.items()),
        f"# seed: {seed}",
    ]


def _meta_obj(command: str, params: dict, seed: object = None) -> dict:
    return {
        "tool": "scr-aloha",
        "version": __version__,
        "command": command,
        "parameters": params,
        "seed": seed,
    }


def _env_seed() -> int | None:
    raw = os.environ.get(_SEED_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise SimConfigError(_SEED_ENV, f"must be an integer, got {raw!r}")


def _sig6(x: float) -> str:
    return f"{x:.6g}"


def _lambda_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty lambda list")
    if any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("arrival rates must be >= 0")
    return values


def cmd_alpha_table(args) -> int:
    rows = design_table(args.k_max)
    lines = _meta_lines("alpha-table", {"k_max": args.k_max}) + design_csv_lines(rows)
    _atomic_write(args.out, "\n".join(lines) + "\n")
    if args.plot:
        from .plotting import plot_alpha_table

        plot_alpha_table(rows, args.plot)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_throughput_curve(args) -> int:
    ks = list(range(1, args.k_max + 1))
    ets = [expected_throughput(k, solve_alpha(k)) for k in ks]
    params = {"k_max": args.k_max}
    if args.delta is not None:
        if not 0.0 < args.delta < 1.0:
            raise SimConfigError("delta", f"must be in (0, 1), got {args.delta!r}")
        params["delta"] = args.delta
        bounds = [throughput_lower_bound(k, args.delta) for k in ks]
        header = "K,E_T,lower_bound"
        rows = [f"{k},{_sig6(et)},{_sig6(b)}" for k, et, b in zip(ks, ets, bounds)]
    else:
        bounds = None
        header = "K,E_T"
        rows = [f"{k},{_sig6(et)}" for k, et in zip(ks, ets)]
    lines = _meta_lines("throughput-curve", params) + [header] + rows
    _atomic_write(args.out, "\n".join(lines) + "\n")
    if args.plot:
        from .plotting import plot_throughput_curve

        bound = (args.delta, bounds) if bounds is not None else None
        plot_throughput_curve(ks, ets, args.plot, bound=bound)
    print(f"wrote {len(ks)} rows to {args.out}")
    return EXIT_OK


def cmd_outcome_table(args) -> int:
    rows = design_table(args.k_max)
    header = "K,alpha,P_idle,P_resolved,P_unresolvable"
    body = []
    for r in rows:
        p_idle, p_resolved, p_unres = outcome_probabilities(r.K, r.alpha)
        body.append(
            f"{r.K},{_sig6(r.alpha)},{_sig6(p_idle)},{_sig6(p_resolved)},{_sig6(p_unres)}"
        )
    lines = _meta_lines("outcome-table", {"k_max": args.k_max}) + [header] + body
    _atomic_write(args.out, "\n".join(lines) + "\n")
    if args.plot:
        from .plotting import plot_outcome_table

        plot_outcome_table(rows, args.plot)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _summary_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".summary.json"


def cmd_simulate(args) -> int:
    config = load_config(args.config, default_seed=_env_seed())
    code = EXIT_OK
    try:
        trace = run_simulation(config)
    except SimulationOverflowError as exc:
        trace = exc.trace
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_VERIFY

    comments = [
        f"tool: scr-aloha {__version__}",
        "command: simulate",
        "config: " + json.dumps(config_to_dict(config)),
        f"seed: {config.seed}",
    ]
    write_trace_csv(trace, args.out, comments=comments)

    columns = read_trace_csv(args.out)
    if not replay_ok(columns, config.K, config.n0, trace.final_backlog):
        print("error: written trace failed its replay check", file=sys.stderr)
        return EXIT_VERIFY

    summary = trace.summary()
    summary["meta"] = _meta_obj("simulate", {"config": args.config}, seed=config.seed)
    _atomic_write(_summary_path(args.out), json.dumps(summary, indent=2) + "\n")
    if args.plot:
        from .plotting import plot_trace

        plot_trace(trace, args.plot)
    print(
        f"simulated {len(trace)} slots: resolved/second="
        f"{summary['resolved_per_second']:.6g}, final backlog={trace.final_backlog}"
    )
    return code


def cmd_sweep(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    if seed is None:
        seed = 0
    points = sweep_lambda(args.k, args.lambdas, args.horizon, seed)
    header = (
        "lambda,mean_backlog,resolved_per_slot,throughput_per_second,"
        "fraction_unresolvable,drift_detected,drift_p_value,truncated"
    )
    body = [
        ",".join(
            [
                _sig6(p.lam),
                _sig6(p.mean_backlog),
                _sig6(p.resolved_per_slot),
                _sig6(p.throughput_per_second),
                _sig6(p.fraction_unresolvable),
                str(int(p.drift_detected)),
                _sig6(p.drift_p_value),
                str(int(p.truncated)),
            ]
        )
        for p in points
    ]
    params = {"k": args.k, "horizon": args.horizon, "lambdas": ",".join(map(str, args.lambdas))}
    lines = _meta_lines("sweep", params, seed=seed) + [header] + body
    _atomic_write(args.out, "\n".join(lines) + "\n")
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(points, args.plot)
    flagged = sum(p.drift_detected for p in points)
    print(f"wrote {len(points)} sweep points to {args.out} ({flagged} flagged unstable)")
    return EXIT_OK


def cmd_codebook(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    book = construct_codebook(args.m, args.k, args.q, seed=seed)
    benchmark = benchmark_length_bits(args.m, args.k)
    meta = _meta_obj(
        "codebook",
        {"m": args.m, "k": args.k, "q": args.q},
        seed=book.search_seed,
    )
    meta["achieved_symbols"] = book.L
    meta["achieved_bits"] = book.achieved_bits()
    meta["benchmark_bits"] = benchmark
    _atomic_write(args.out, json.dumps(codebook_to_dict(book, meta=meta), indent=2) + "\n")
    bench_text = f"{benchmark:.6g}" if benchmark is not None else "n/a"
    print(
        f"codebook M={book.M} K={book.K} q={book.q}: L={book.L} symbols "
        f"({book.achieved_bits():.6g} bits; benchmark {bench_text} bits) -> {args.out}"
    )
    return EXIT_OK


def cmd_verify_codebook(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            print(f"error: not valid JSON: {exc}", file=sys.stderr)
            return EXIT_VERIFY
    try:
        book = codebook_from_dict(data)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    problems = verify_codebook(book)
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"codebook ok: M={book.M} K={book.K} q={book.q} L={book.L}")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="scr-aloha", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"scr-aloha {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha-table", help="optimal access parameter table as CSV")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_alpha_table)

    p = sub.add_parser("throughput-curve", help="throughput vs K as CSV")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--delta", type=float, help="also emit the fixed-load bound column")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_throughput_curve)

    p = sub.add_parser("outcome-table", help="slot-outcome probabilities as CSV")
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_outcome_table)

    p = sub.add_parser("simulate", help="closed-loop run from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="trace CSV path; summary JSON lands beside it")
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="arrival-rate sweep with drift detection")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambdas", type=_lambda_list, required=True, metavar="CSV-LIST")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", help="also render a figure to this path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("codebook", help="construct a signature codebook as JSON")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_codebook)

    p = sub.add_parser("verify-codebook", help="check a codebook JSON's invariants")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify_codebook)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SimConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
