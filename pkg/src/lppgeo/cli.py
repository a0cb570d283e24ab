"""Command-line front end: field simulation, increment-field exports,
graph and figure generation, direction scans, statistical checks.

Subcommands:

  simulate    sample a weight field over a window, save the binary format
  busemann    exact-law or coupled-horizon increment fields as .npz
  graphs      bracket geodesic graphs and the instability graph as TSV
              edge lists, optionally rendered to SVG
  scan-jumps  jump directions of one edge increment over an alpha range,
              JSON sorted by alpha
  stats       one named statistical check, report printed as JSON
  verify      the acceptance suite; exit 1 when any check fails

Configuration comes from key=value files (``#`` comments allowed) named
with --config; command-line flags override file values.  LPPGEO_THREADS
sets the default worker count for replica maps.  All file outputs are
written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from .field import LatticeWindow, derive_seed, sample_weight_field, save_field
from .lpp import Direction
from .busemann import Sign, find_jump_directions, horizon_busemann_field, \
    stationary_busemann_field
from .graphs import geodesic_graph, instability_graph, write_edges_tsv
from .render import render_svg
from .stats import StatsError
from .acceptance import ACCEPTANCE_TESTS, DEFAULT_MASTER_SEED, acceptance_suite

# criteria cheap enough for an edit-run loop; the slow three are replica
# farms taking minutes each
FAST_TESTS = tuple(
    name for name, _ in ACCEPTANCE_TESTS
    if name not in ("jump-count-mass", "coalescence-window", "cif-vs-scan")
)


def _write_text_atomic(path: str, text: str) -> None:
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_bytes_atomic(path: str, blob: bytes) -> None:
    tmp = f"{os.fspath(path)}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)


def _parse_window(text: str) -> LatticeWindow:
    try:
        x0, x1, y0, y1 = (int(v) for v in text.split(","))
        return LatticeWindow(x0, x1, y0, y1)
    except Exception as exc:
        raise argparse.ArgumentTypeError(
            f"window must be x_min,x_max,y_min,y_max with x_min<=x_max, "
            f"y_min<=y_max; got {text!r} ({exc})"
        )


def _parse_edge(text: str):
    try:
        a, b = text.split(":")
        x = tuple(int(v) for v in a.split(","))
        y = tuple(int(v) for v in b.split(","))
        if len(x) != 2 or len(y) != 2:
            raise ValueError("need two coordinates per endpoint")
        return x, y
    except Exception as exc:
        raise argparse.ArgumentTypeError(
            f"edge must be x,y:x,y naming a unit lattice edge; got {text!r} ({exc})"
        )


def _parse_alpha_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except Exception:
        raise argparse.ArgumentTypeError(
            f"alpha range must be lo:hi, got {text!r}"
        )
    if not (0.0 < lo < hi < 1.0):
        raise argparse.ArgumentTypeError(
            f"alpha range must satisfy 0 < lo < hi < 1, got {text!r}"
        )
    return lo, hi


def _parse_sign(text: str) -> Sign:
    try:
        return Sign[text.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"sign must be one of none, minus, plus; got {text!r}"
        )


def _load_config(path: str) -> dict[str, str]:
    """key=value lines; blank lines and # comments skipped."""
    values: dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise StatsError(
                        f"{path}:{lineno}: expected key=value, got {line!r}"
                    )
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise StatsError(f"cannot read config {path}: {exc}")
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lppgeo",
        description="Last-passage percolation simulator and verification tool.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    by_command = {}

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default LPPGEO_THREADS or 1)")

    p = by_command["simulate"] = sub.add_parser(
        "simulate", help="sample and save a weight field")
    common(p)
    p.add_argument("--window", type=_parse_window, metavar="X0,X1,Y0,Y1")
    p.add_argument("--out", help="output path (binary field)")

    p = by_command["busemann"] = sub.add_parser(
        "busemann", help="increment fields on a window")
    common(p)
    p.add_argument("--window", type=_parse_window, metavar="X0,X1,Y0,Y1")
    p.add_argument("--alpha", type=float, nargs="+",
                   help="direction parameter(s) in (0,1)")
    p.add_argument("--sign", type=_parse_sign, nargs="*", default=None,
                   help="one-sided limit marker per alpha (default none)")
    p.add_argument("--mode", choices=("exact", "horizon"), default="horizon")
    p.add_argument("--horizon", type=int, default=4096,
                   help="target level for horizon mode")
    p.add_argument("--out", help="output path (.npz)")

    p = by_command["graphs"] = sub.add_parser(
        "graphs", help="bracket geodesic + instability graphs")
    common(p)
    p.add_argument("--window", type=_parse_window, metavar="X0,X1,Y0,Y1")
    p.add_argument("--alpha-lo", type=float)
    p.add_argument("--alpha-hi", type=float)
    p.add_argument("--horizon", type=int, default=4096)
    p.add_argument("--out-prefix",
                   help="writes PREFIX.geodesic-lo.tsv, PREFIX.geodesic-hi.tsv, "
                        "PREFIX.instability.tsv")
    p.add_argument("--svg", default=None, help="also render a figure here")

    p = by_command["scan-jumps"] = sub.add_parser(
        "scan-jumps", help="jump directions of one edge increment")
    common(p)
    p.add_argument("--edge", type=_parse_edge, metavar="X,Y:X,Y")
    p.add_argument("--alpha", type=_parse_alpha_range, metavar="LO:HI")
    p.add_argument("--horizon", type=int, default=4096)
    p.add_argument("--out", default=None, help="JSON output (default stdout)")

    p = by_command["stats"] = sub.add_parser(
        "stats", help="run one named statistical check")
    common(p)
    p.add_argument("--test",
                   help="check name; see `verify --suite default` output")
    p.add_argument("--n-samples", type=int, default=None,
                   help="override the check's sample count")
    p.add_argument("--out", default=None, help="JSON output (default stdout)")

    p = by_command["verify"] = sub.add_parser(
        "verify", help="run the acceptance suite")
    common(p)
    p.add_argument("--suite", default="default",
                   help="default, fast, or a comma-separated list of checks")
    p.add_argument("--out", default=None, help="JSON summary output path")

    return parser, by_command


# required settings are checked after the config merge, so a config file
# can stand in for any flag
_REQUIRED = {
    "simulate": ("window", "out"),
    "busemann": ("window", "alpha", "out"),
    "graphs": ("window", "alpha_lo", "alpha_hi", "out_prefix"),
    "scan-jumps": ("edge", "alpha"),
    "stats": ("test",),
    "verify": (),
}

# config keys are the argparse dests of the chosen subcommand; parse any
# string through the same converters the flags use
_CONFIG_PARSERS = {
    "window": _parse_window,
    "edge": _parse_edge,
    "alpha_range": _parse_alpha_range,
    "seed": int,
    "threads": int,
    "horizon": int,
    "n_samples": int,
    "alpha_lo": float,
    "alpha_hi": float,
}


def _apply_config(args: argparse.Namespace, command_parser) -> None:
    if not getattr(args, "config", None):
        return
    values = _load_config(args.config)
    known = set(vars(args))
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if dest not in known or dest == "config":
            raise StatsError(
                f"unknown config key {key!r} for command {args.command!r}"
            )
        if dest == "alpha" and args.command == "scan-jumps":
            dest_parser = _parse_alpha_range
        elif dest == "alpha":
            dest_parser = lambda s: [float(v) for v in s.split(",")]
        elif dest == "sign":
            dest_parser = lambda s: [_parse_sign(v) for v in s.split(",")]
        else:
            dest_parser = _CONFIG_PARSERS.get(dest, str)
        # flags override config: only fill dests still at their default
        if command_parser.get_default(dest) == getattr(args, dest):
            try:
                setattr(args, dest, dest_parser(raw))
            except argparse.ArgumentTypeError as exc:
                raise StatsError(f"config key {key!r}: {exc}")


def _cmd_simulate(args) -> int:
    field = sample_weight_field(args.window, args.seed)
    save_field(field, args.out)
    print(f"wrote {args.out}: window {args.window}, seed {args.seed}")
    return 0


def _cmd_busemann(args) -> int:
    alphas = list(args.alpha)
    signs = list(args.sign) if args.sign else [Sign.NONE] * len(alphas)
    if len(signs) != len(alphas):
        raise StatsError(
            f"{len(alphas)} alphas but {len(signs)} signs; give one sign per alpha"
        )
    if args.mode == "exact":
        if len(alphas) != 1:
            raise StatsError("exact mode computes one direction at a time")
        field = sample_weight_field(args.window, args.seed)
        fields = [stationary_busemann_field(
            args.window, alphas[0], field, derive_seed(args.seed, 1))]
        horizon = -1
    else:
        directions = [(Direction(a), s) for a, s in zip(alphas, signs)]
        fields = horizon_busemann_field(
            args.window, directions, args.horizon, args.seed)
        horizon = args.horizon
    w = args.window
    buf = io.BytesIO()
    np.savez(
        buf,
        window=np.array([w.x_min, w.x_max, w.y_min, w.y_max]),
        alphas=np.array(alphas),
        signs=np.array([s.name for s in signs]),
        horizon=np.array(horizon),
        seed=np.array(args.seed, dtype=np.uint64),
        U=np.stack([b.U for b in fields]),
        V=np.stack([b.V for b in fields]),
    )
    _write_bytes_atomic(args.out, buf.getvalue())
    print(f"wrote {args.out}: {len(fields)} increment field(s) on {w}")
    return 0


def _cmd_graphs(args) -> int:
    lo, hi = args.alpha_lo, args.alpha_hi
    if not 0.0 < lo <= hi < 1.0:
        raise StatsError(f"need 0 < alpha-lo <= alpha-hi < 1, got {lo}, {hi}")
    # a degenerate interval needs the one-sided limits to disagree
    signs = (Sign.MINUS, Sign.PLUS) if lo == hi else (Sign.NONE, Sign.NONE)
    b_lo, b_hi = horizon_busemann_field(
        args.window,
        [(Direction(lo), signs[0]), (Direction(hi), signs[1])],
        args.horizon,
        args.seed,
    )
    g_lo, g_hi = geodesic_graph(b_lo), geodesic_graph(b_hi)
    inst = instability_graph(b_lo, b_hi)
    for graph, tag in ((g_lo, "geodesic-lo"), (g_hi, "geodesic-hi"),
                       (inst, "instability")):
        write_edges_tsv(graph, f"{args.out_prefix}.{tag}.tsv")
    if args.svg:
        _write_text_atomic(args.svg, render_svg((g_lo, g_hi), inst))
    print(
        f"wrote {args.out_prefix}.{{geodesic-lo,geodesic-hi,instability}}.tsv: "
        f"{inst.n_edges} instability edges, mass {inst.total_mass:.6g}"
        + (f"; figure {args.svg}" if args.svg else "")
    )
    return 0


def _cmd_scan_jumps(args) -> int:
    field = sample_weight_field(LatticeWindow(0, 0, 0, 0), args.seed)
    scan = find_jump_directions(args.edge, field, args.alpha, args.horizon)
    doc = {
        "edge": [list(scan.edge[0]), list(scan.edge[1])],
        "alpha_range": list(scan.requested),
        "coverage": list(scan.coverage) if scan.coverage else None,
        "horizon": scan.horizon,
        "n_targets": scan.n_targets,
        "records": [
            {"alpha": r.alpha_star, "gap": r.gap, "bracket": list(r.bracket)}
            for r in sorted(scan, key=lambda r: r.alpha_star)
        ],
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _write_text_atomic(args.out, text)
        print(f"wrote {args.out}: {len(scan)} jump records")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_stats(args) -> int:
    names = [n for n, _ in ACCEPTANCE_TESTS]
    if args.test not in names:
        raise StatsError(
            f"unknown test name {args.test!r}; valid names: {', '.join(names)}"
        )
    overrides = {}
    if args.n_samples is not None:
        overrides[args.test] = {"n_samples": args.n_samples}
    run = acceptance_suite(
        config={"tests": [args.test], **overrides}, master_seed=args.seed)
    report = run.reports[0]
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_text_atomic(args.out, text)
        print(f"{report.verdict} {report.test_name}: wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    if args.suite == "default":
        tests = None
    elif args.suite == "fast":
        tests = list(FAST_TESTS)
    else:
        tests = [t.strip() for t in args.suite.split(",") if t.strip()]
    config = None if tests is None else {"tests": tests}
    run = acceptance_suite(config=config, master_seed=args.seed)
    for r in run.reports:
        # deterministic verdict lines; timings go to stderr
        print(f"{r.verdict} {r.test_name}: statistic={r.statistic:.6g} "
              f"threshold={r.threshold:.6g}")
    print(f"{run.n_pass}/{len(run.reports)} passed")
    total = sum(run.runtimes.values())
    print(f"suite runtime {total:.1f} s", file=sys.stderr)
    if args.out:
        _write_text_atomic(args.out, run.summary_json())
    return 0 if run.n_fail == 0 else 1


_COMMANDS = {
    "simulate": _cmd_simulate,
    "busemann": _cmd_busemann,
    "graphs": _cmd_graphs,
    "scan-jumps": _cmd_scan_jumps,
    "stats": _cmd_stats,
    "verify": _cmd_verify,
}


def run(argv=None) -> int:
    """Parse argv and dispatch; 0 success, 1 verify failure, 2 usage error."""
    parser, by_command = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        _apply_config(args, by_command[args.command])
        missing = [d for d in _REQUIRED[args.command]
                   if getattr(args, d) is None]
        if missing:
            flags = ", ".join("--" + d.replace("_", "-") for d in missing)
            raise StatsError(f"missing required setting(s): {flags}")
        if getattr(args, "threads", None) is not None:
            if args.threads < 1:
                raise StatsError(f"--threads must be >= 1, got {args.threads}")
            os.environ["LPPGEO_THREADS"] = str(args.threads)
        return _COMMANDS[args.command](args)
    except (StatsError, ValueError, OSError) as exc:
        print(f"lppgeo {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
