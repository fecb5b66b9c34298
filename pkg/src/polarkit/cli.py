"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 mathematical
precondition violated (singular kernel, non-symmetric channel), 3 resource
cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .bec import bec_levels, polarization_fraction, rate_statistic
from .channel import (
    BinaryChannel,
    CapacityError,
    ChannelError,
    make_bec,
    make_bsc,
)
from .codec import CodeError, PolarCode, construct, encode, sc_decode, simulate_fer
from .gf2 import (
    KernelError,
    is_invertible,
    is_polarizing,
    last_reduction_weight,
    load_kernel,
    unit_diagonalize,
)
from .split import recursive_polarize, split_all
from .svg import histogram_panels
from .tree import ensemble_stats, sample_paths

CSV_HEADER = "# polarkit-csv v1"
GENERAL_LEVEL_LIMIT = 3
EXIT_USAGE, EXIT_MATH, EXIT_CAP = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv_text(header, rows, preamble=()) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for line in preamble:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_kernel_file(path):
    # singular kernels parse fine; only malformed or unreadable files are usage errors
    try:
        return load_kernel(path, require_invertible=False)
    except OSError as exc:
        raise UsageError(f"cannot read kernel file {path}: {exc}") from exc
    except KernelError as exc:
        raise UsageError(f"malformed kernel file {path}: {exc}") from exc


def _read_kernels(args) -> list:
    paths = args.kernel or []
    if not paths:
        raise UsageError("--kernel is required")
    kernels = []
    for p in paths:
        kernels.append(_parse_kernel_file(p))
    for p, G in zip(paths, kernels):
        if not is_invertible(G):
            raise KernelError(f"kernel {p} is singular over GF(2)")
    return kernels


def _level_kernels(args) -> list:
    kernels = _read_kernels(args)
    levels = getattr(args, "levels", None)
    if len(kernels) == 1 and levels is not None:
        return kernels * levels
    if levels is not None and levels != len(kernels):
        raise UsageError("--levels disagrees with the number of --kernel files")
    return kernels


def _read_channel(args, required=True):
    given = [x for x in (args.channel, args.bec, args.bsc) if x is not None]
    if len(given) > 1:
        raise UsageError("give only one of --channel, --bec, --bsc")
    if args.bec is not None:
        return make_bec(args.bec)
    if args.bsc is not None:
        return make_bsc(args.bsc)
    if args.channel is not None:
        try:
            return BinaryChannel.from_json(Path(args.channel).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read channel file {args.channel}: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, ChannelError):
                raise UsageError(str(exc)) from exc
            raise UsageError(f"bad channel JSON: {exc}") from exc
    if required:
        raise UsageError("a channel is required (--channel, --bec or --bsc)")
    return None


def _require_symmetric(W: BinaryChannel) -> None:
    if W.symmetry_perm is None:
        raise ChannelError("channel is not marked symmetric; add a 'symmetry' permutation")


def _load_code(path) -> PolarCode:
    try:
        return PolarCode.from_json(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read code descriptor {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad code descriptor JSON: {exc}") from exc
    except CodeError as exc:
        raise UsageError(str(exc)) from exc


def _parse_bits(text: str, n: int, what: str) -> np.ndarray:
    text = "".join(text.split())
    if len(text) != n or set(text) - {"0", "1"}:
        raise UsageError(f"{what} must be {n} characters over 0/1")
    return np.array([int(c) for c in text], dtype=np.uint8)


def _bits(arr) -> str:
    return "".join(str(int(b)) for b in arr)


def _add_channel_args(p):
    p.add_argument("--channel", help="channel JSON file")
    p.add_argument("--bec", type=float, help="binary erasure channel with this erasure probability")
    p.add_argument("--bsc", type=float, help="binary symmetric channel with this crossover probability")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze_kernel(args) -> int:
    path = args.kernel[0] if args.kernel else None
    if path is None:
        raise UsageError("--kernel is required")
    G = _parse_kernel_file(path)
    print(f"kernel: {G.rows}x{G.cols}")
    if not is_invertible(G):
        print("invertible: no")
        raise KernelError("kernel is singular over GF(2)")
    sigma = unit_diagonalize(G)
    print("invertible: yes")
    print("unit-diagonal permutation: " + " ".join(str(s) for s in sigma))
    if is_polarizing(G):
        i, k = last_reduction_weight(G)
        print(f"polarizing: yes, i={i}, k={k}")
    else:
        print("polarizing: no")
    W = _read_channel(args, required=False)
    if W is not None:
        _require_symmetric(W)
        res = split_all(W, G)
        rows = [(i + 1, _fmt(p.mutual_info), _fmt(p.bhattacharyya)) for i, p in enumerate(res.info)]
        _write_text(args.out, _csv_text(("i", "I", "Z"), rows))
    return 0


def _polarize_bec(args, kernels) -> int:
    vectors = bec_levels(kernels, args.bec)
    polarizing = any(is_polarizing(K) for K in kernels)
    leaf = vectors[-1]
    rows = []
    for k, e in enumerate(leaf.eps):
        digits = "".join(str(d) for d in leaf.path_digits(k))
        rows.append((k, digits, _fmt(e), _fmt(1.0 - e), _fmt(e)))
    summary = []
    for v in vectors:
        summary.append(
            (v.level, _fmt(polarization_fraction(v, args.delta)), _fmt(rate_statistic(v, args.beta)), _fmt(float(np.mean(v.eps))))
        )
    text = _csv_text(
        ("leaf_index", "path_digits", "eps", "I", "Z"),
        rows,
        preamble=[f"kernels={'|'.join(','.join(K.row_strings()) for K in kernels)}", f"bec={args.bec}",
                  f"delta={args.delta}", f"beta={args.beta}", "polarizing" if polarizing else "non-polarizing"],
    )
    buf = io.StringIO()
    buf.write("\n# summary\n")
    csv.writer(buf, lineterminator="\n").writerows([("level", "fraction_mid", "rate_stat", "mean_eps")] + summary)
    _write_text(args.out, text + buf.getvalue())
    if args.out not in (None, "-"):
        print("level,fraction_mid,rate_stat,mean_eps")
        for row in summary:
            print(",".join(str(c) for c in row))
        if not polarizing:
            print("non-polarizing: the leaf distribution stays at the channel's erasure probability")
    if args.svg:
        title = f"leaf I per level, BEC({args.bec})" + ("" if polarizing else " [non-polarizing]")
        panels = [(f"n={v.level}", 1.0 - v.eps) for v in vectors]
        Path(args.svg).write_text(histogram_panels(panels, title=title))
    return 0


def cmd_polarize(args) -> int:
    kernels = _level_kernels(args)
    if args.bec is not None:
        if args.channel is not None or args.bsc is not None:
            raise UsageError("give only one of --channel, --bec, --bsc")
        return _polarize_bec(args, kernels)
    W = _read_channel(args)
    _require_symmetric(W)
    if len(kernels) > GENERAL_LEVEL_LIMIT:
        raise CapacityError(
            f"{len(kernels)} levels on a general channel exceeds the exact-splitting limit of "
            f"{GENERAL_LEVEL_LIMIT}; use --bec for deep evolution"
        )
    leaves = recursive_polarize(W, kernels)
    sizes = [K.rows for K in kernels]
    rows = []
    for k, p in enumerate(leaves):
        digits, rem = [], k
        for ell in reversed(sizes):
            rem, d = divmod(rem, ell)
            digits.append(str(d))
        rows.append((k, "".join(reversed(digits)), "", _fmt(p.mutual_info), _fmt(p.bhattacharyya)))
    _write_text(args.out, _csv_text(("leaf_index", "path_digits", "eps", "I", "Z"), rows))
    if args.svg:
        Path(args.svg).write_text(
            histogram_panels([(f"n={len(kernels)}", [p.mutual_info for p in leaves])], title="leaf I")
        )
    return 0


def cmd_tree(args) -> int:
    kernels = _level_kernels(args)
    W = _read_channel(args)
    _require_symmetric(W)
    traces = sample_paths(W, kernels, None, args.paths, args.seed)
    rows = []
    for p, tr in enumerate(traces):
        for t, pair in enumerate(tr.info_trace):
            branch = tr.branches[t - 1] if t else ""
            rows.append((p, t, branch, _fmt(pair.mutual_info), _fmt(pair.bhattacharyya)))
    _write_text(args.out, _csv_text(("path", "t", "branch", "I", "Z"), rows))
    summary = ensemble_stats(W, kernels, None, args.paths, args.seed, args.delta)
    if args.summary:
        Path(args.summary).write_text(_json_text(summary))
    else:
        sys.stderr.write(_json_text(summary))
    return 0


def cmd_construct(args) -> int:
    kernels = _level_kernels(args)
    if args.z_file is not None:
        if args.bec is not None:
            raise UsageError("give --bec or --z-file, not both")
        try:
            design = json.loads(Path(args.z_file).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read design vector: {exc}") from exc
    elif args.bec is not None:
        design = args.bec
    else:
        raise UsageError("a design is required (--bec or --z-file)")
    if args.K is None:
        raise UsageError("--K is required")
    try:
        code = construct(kernels, design, args.K)
    except CodeError as exc:
        raise UsageError(str(exc)) from exc
    _write_text(args.out, code.to_json() + "\n")
    return 0


def cmd_encode(args) -> int:
    code = _load_code(args.code)
    if args.message is None:
        raise UsageError("--message is required")
    msg = _parse_bits(args.message, code.K, "message")
    _write_text(args.out, _bits(encode(code, msg)) + "\n")
    return 0


def _read_likelihoods(path, N):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read likelihoods: {exc}") from exc
    try:
        if text.lstrip().startswith("["):
            L = np.array(json.loads(text), dtype=float)
        else:
            lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
            L = np.array([[float(v) for v in ln.split(",")] for ln in lines])
    except ValueError as exc:
        raise UsageError(f"bad likelihood data: {exc}") from exc
    if L.shape != (N, 2):
        raise UsageError(f"expected {N} likelihood pairs, got shape {L.shape}")
    return L


def cmd_decode(args) -> int:
    code = _load_code(args.code)
    if (args.likelihoods is None) == (args.received is None):
        raise UsageError("give exactly one of --likelihoods or --received")
    if args.likelihoods is not None:
        L = _read_likelihoods(args.likelihoods, code.N)
    else:
        r = "".join(args.received.split())
        if len(r) != code.N or set(r) - {"0", "1", "?"}:
            raise UsageError(f"--received must be {code.N} characters over 0/1/?")
        table = {"0": (1.0, 0.0), "1": (0.0, 1.0), "?": (0.5, 0.5)}
        L = np.array([table[c] for c in r])
    try:
        res = sc_decode(code, L)
    except CodeError as exc:
        raise UsageError(str(exc)) from exc
    _write_text(args.out, _bits(res.message) + "\n")
    return 0


def cmd_simulate(args) -> int:
    code = _load_code(args.code)
    W = _read_channel(args)
    res = simulate_fer(code, W, args.trials, args.seed, genie=args.genie)
    rows = [(t, int(e)) for t, e in enumerate(res.per_trial_errors)]
    _write_text(args.out, _csv_text(("trial", "errors"), rows))
    summary = res.summary()
    if args.summary:
        Path(args.summary).write_text(_json_text(summary))
    print(f"fer ≤ union_bound + 3σ: {summary['union_bound_check']}")
    return 0


REPORT_KERNELS = {
    "G2": ["10", "11"],
    "G3": ["100", "110", "101"],
}


def cmd_report(args) -> int:
    """Desk-scale polarization figures for a few reference kernels."""
    from .gf2 import BitMatrix

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = {}
    for name, rows in REPORT_KERNELS.items():
        G = BitMatrix.from_rows(rows)
        levels = args.levels if G.rows == 2 else max(1, int(round(args.levels * 0.63)))
        vectors = bec_levels([G] * levels, args.bec)
        summary = [
            {
                "level": v.level,
                "fraction_mid": polarization_fraction(v, args.delta),
                "rate_stat": rate_statistic(v, args.beta),
                "mean_eps": float(np.mean(v.eps)),
            }
            for v in vectors
        ]
        rows_csv = [(s["level"], _fmt(s["fraction_mid"]), _fmt(s["rate_stat"]), _fmt(s["mean_eps"])) for s in summary]
        (out / f"{name}_summary.csv").write_text(
            _csv_text(("level", "fraction_mid", "rate_stat", "mean_eps"), rows_csv)
        )
        (out / f"{name}_hist.svg").write_text(
            histogram_panels([(f"n={v.level}", 1.0 - v.eps) for v in vectors], title=f"{name} on BEC({args.bec})")
        )
        index[name] = {"rows": rows, "levels": levels, "summary": summary}
    (out / "report.json").write_text(_json_text({"bec": args.bec, "delta": args.delta, "beta": args.beta, "kernels": index}))
    print(f"wrote report to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polarkit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults; flags override it")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("analyze-kernel", help="invertibility, polarizing verdict and one-level split")
    p.add_argument("--kernel", action="append")
    _add_channel_args(p)
    p.add_argument("--out", help="CSV of (i, I, Z); stdout by default")
    p.set_defaults(func=cmd_analyze_kernel)

    p = sub.add_parser("polarize", help="leaf evolution over n levels")
    p.add_argument("--kernel", action="append", help="kernel file; repeat for mixed kernels")
    p.add_argument("--levels", type=int)
    _add_channel_args(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.25)
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("tree", help="sample the random tree process")
    p.add_argument("--kernel", action="append")
    p.add_argument("--levels", type=int)
    _add_channel_args(p)
    p.add_argument("--paths", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--out")
    p.add_argument("--summary", help="JSON summary path; stderr by default")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("construct", help="build a code descriptor")
    p.add_argument("--kernel", action="append")
    p.add_argument("--levels", type=int)
    p.add_argument("--bec", type=float, help="design erasure probability")
    p.add_argument("--z-file", help="JSON list of per-index design Z values")
    p.add_argument("--K", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode a message")
    p.add_argument("--code", required=True)
    p.add_argument("--message")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="successive-cancellation decode")
    p.add_argument("--code", required=True)
    p.add_argument("--likelihoods", help="JSON list or CSV of (P(y|0), P(y|1)) pairs")
    p.add_argument("--received", help="erasure-channel output over 0/1/?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo frame error rate")
    p.add_argument("--code", required=True)
    _add_channel_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--genie", action="store_true")
    p.add_argument("--out")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="write desk-scale polarization figures")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--levels", type=int, default=10)
    p.add_argument("--bec", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.25)
    p.set_defaults(func=cmd_report)
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults from ``--config`` so explicit flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        config = json.loads(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise UsageError("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    config = {k.replace("-", "_"): v for k, v in config.items()}
    if "kernel" in config and isinstance(config["kernel"], str):
        config["kernel"] = [config["kernel"]]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(config) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    sub.set_defaults(**config)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"polarkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KernelError, ChannelError) as exc:
        print(f"polarkit: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (CapacityError, OverflowError) as exc:
        print(f"polarkit: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
