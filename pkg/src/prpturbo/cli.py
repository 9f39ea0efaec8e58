"""Command-line interface: pattern generation, analytic bound tables,
oracle validation and BER simulation.

Every run with --out also writes a JSON manifest capturing the resolved
parameters; feeding a simulate manifest back through --config replays
the run byte-for-byte. Exit codes: 0 success, 2 validation error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .analysis import BudgetError, compare_error_floors, oracle_weight2_spectrum, \
    parent_bound_summary, parent_dmin, prp_bound_summary, prp_event_count, \
    punctured_dmin, zmin
from .codec import TurboCodeSpec, random_interleaver
from .puncture import build_prp_pattern, pattern_rate
from .rsc import feedback_period, parse_generator_pair
from .sim import BerCurvePoint, SimConfig, flag_anomalies, run_ber

_EXIT_VALIDATION = 2
_EXIT_BUDGET = 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prpturbo",
        description="Turbo codes with pseudo-random puncturing: patterns, "
                    "error-floor bounds, oracle checks and BER simulation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(required=True)

    p = sub.add_parser("pattern", help="print the pseudo-random pattern")
    _add_code_args(p)
    p.add_argument("--out", help="write the pattern text here")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("analyze", help="bound summaries and floor ordering")
    _add_code_args(p)
    p.add_argument("--n", type=int, required=True, help="interleaver size")
    p.add_argument("--ebno", default="0,1,2,3,4,5,6",
                   help="comma-separated Eb/N0 grid in dB")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write the table here (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("oracle", help="enumeration counts vs closed forms")
    _add_code_args(p)
    p.add_argument("--n", type=int, required=True, help="block length")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write the table here (default stdout)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Monte Carlo BER run")
    p.add_argument("--config", help="JSON config or manifest to (re)play")
    _add_code_args(p, required=False)
    p.add_argument("--n", type=int, help="interleaver size")
    p.add_argument("--seed", type=int, help="interleaver seed")
    p.add_argument("--punctured", action="store_true", default=None,
                   help="simulate the rate-1/2 PRP code")
    p.add_argument("--ebno", help="comma-separated Eb/N0 grid in dB")
    p.add_argument("--iterations", type=int)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--frames-max", type=int)
    p.add_argument("--target-errors", type=int)
    p.add_argument("--new-interleaver-per-frame", action="store_true",
                   default=None)
    p.add_argument("--frames-per-batch", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write BER data here (default stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def _add_code_args(p, required=True):
    p.add_argument("--gf", required=required, help="feedforward octal, e.g. 5")
    p.add_argument("--gr", required=required, help="feedback octal, e.g. 7")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_manifest(subcommand: str, params: dict, out: str | None) -> None:
    if not out:
        return
    manifest = {
        "tool": "prpturbo",
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
        "outputs": {"data": out},
    }
    with open(out + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def cmd_pattern(args) -> int:
    gp = parse_generator_pair(args.gf, args.gr)
    pattern = build_prp_pattern(gp)
    rate = pattern_rate(pattern)
    text = pattern.to_text() + f"\nrate: {rate}\n"
    _emit(text, args.out)
    _write_manifest("pattern", {"g_f": args.gf, "g_r": args.gr}, args.out)
    return 0


def cmd_analyze(args) -> int:
    gp = parse_generator_pair(args.gf, args.gr)
    grid = _parse_grid(args.ebno)
    parent = parent_bound_summary(gp, args.n, grid)
    prp = prp_bound_summary(gp, args.n, grid)
    if not prp.exact_multiple:
        print(f"warning: N={args.n} is not a multiple of the period "
              f"L={prp.period}; PRP coefficient uses the general "
              "per-column counts", file=sys.stderr)
    cert = compare_error_floors(parent, prp)

    if args.format == "csv":
        lines = ["code,R,nu,L,N,d_f,B2df_num,B2df_den,ebno_db,p2"]
        for s in (parent, prp):
            for ebno_db, p2 in s.bound_points:
                lines.append(
                    f"{s.code},{s.rate},{s.gp.nu},{s.period},{s.n},{s.d_f},"
                    f"{s.b2df.numerator},{s.b2df.denominator},"
                    f"{ebno_db!r},{p2!r}")
        text = "\n".join(lines) + f"\n# verdict: {cert.verdict}\n"
    else:
        text = json.dumps({
            "parent": _summary_dict(parent),
            "prp": _summary_dict(prp),
            "comparison": cert.to_dict(),
        }, indent=2) + "\n"
    _emit(text, args.out)
    _write_manifest("analyze", {"g_f": args.gf, "g_r": args.gr, "N": args.n,
                                "ebno_db": grid, "format": args.format},
                    args.out)
    return 0


def _summary_dict(s) -> dict:
    return {
        "code": s.code,
        "generators": s.gp.octal_display,
        "rate": str(s.rate),
        "nu": s.gp.nu,
        "L": s.period,
        "N": s.n,
        "d_f": s.d_f,
        "B2df": f"{s.b2df.numerator}/{s.b2df.denominator}",
        "exact_multiple": s.exact_multiple,
        "bound_points": [{"ebno_db": e, "p2": p} for e, p in s.bound_points],
    }


def cmd_oracle(args) -> int:
    gp = parse_generator_pair(args.gf, args.gr)
    n = args.n
    period = feedback_period(gp)
    pattern = build_prp_pattern(gp)

    parity = oracle_weight2_spectrum(gp, n, pattern=None, stream="parity")
    codeword = oracle_weight2_spectrum(gp, n, pattern=None, stream="codeword")
    punctured = oracle_weight2_spectrum(gp, n, pattern=pattern,
                                        stream="codeword")
    rows = [
        ("parity_weight_zmin_count", parity.count_at(zmin(gp.nu)),
         n - period),
        ("codeword_weight_dmin_count", codeword.count_at(parent_dmin(gp.nu)),
         n - period),
        ("punctured_weight_dmin_count",
         punctured.count_at(punctured_dmin(gp.nu)), prp_event_count(n, period)),
    ]
    ok = all(a == b for _, a, b in rows)

    if args.format == "csv":
        lines = ["quantity,oracle,formula,pass"]
        lines += [f"{q},{a},{b},{str(a == b).lower()}" for q, a, b in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({
            "generators": gp.octal_display, "N": n, "L": period,
            "rows": [{"quantity": q, "oracle": a, "formula": b,
                      "pass": a == b} for q, a, b in rows],
        }, indent=2) + "\n"
    _emit(text, args.out)
    _write_manifest("oracle", {"g_f": args.gf, "g_r": args.gr, "N": n,
                               "format": args.format}, args.out)
    return 0 if ok else 1


def _parse_grid(text) -> list[float]:
    try:
        grid = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"bad Eb/N0 grid: {text!r}") from None
    if not grid:
        raise ValueError("empty Eb/N0 grid")
    return grid


_SIM_DEFAULTS = {
    "g_f": None, "g_r": None, "N": None, "seed": 0, "punctured": False,
    "ebno_db": None, "iterations": 8, "master_seed": 0,
    "max_frames": 100_000, "target_errors": 100,
    "new_interleaver_per_frame": False, "frames_per_batch": 256, "workers": 1,
}


def _resolve_sim_params(args) -> dict:
    params = dict(_SIM_DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if "params" in loaded and "subcommand" in loaded:  # a manifest
            loaded = loaded["params"]
        unknown = set(loaded) - set(params)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        params.update(loaded)
    overrides = {
        "g_f": args.gf, "g_r": args.gr, "N": args.n, "seed": args.seed,
        "punctured": args.punctured, "iterations": args.iterations,
        "master_seed": args.master_seed, "max_frames": args.frames_max,
        "target_errors": args.target_errors,
        "new_interleaver_per_frame": args.new_interleaver_per_frame,
        "frames_per_batch": args.frames_per_batch, "workers": args.workers,
    }
    if args.ebno is not None:
        overrides["ebno_db"] = _parse_grid(args.ebno)
    params.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("g_f", "g_r", "N", "ebno_db"):
        if params[key] is None:
            raise ValueError(f"missing required parameter {key}")
    return params


def cmd_simulate(args) -> int:
    params = _resolve_sim_params(args)
    gp = parse_generator_pair(params["g_f"], params["g_r"])
    interleaver = random_interleaver(params["N"], params["seed"])
    pattern = build_prp_pattern(gp) if params["punctured"] else None
    spec = TurboCodeSpec(gp=gp, interleaver=interleaver, pattern=pattern)
    config = SimConfig(
        spec=spec, ebno_db_grid=tuple(params["ebno_db"]),
        iterations=params["iterations"], master_seed=params["master_seed"],
        max_frames=params["max_frames"],
        target_bit_errors=params["target_errors"],
        new_interleaver_per_frame=params["new_interleaver_per_frame"],
        frames_per_batch=params["frames_per_batch"],
        workers=params["workers"])

    points = run_ber(config)
    for flag in flag_anomalies(points):
        print(f"flag: {flag}", file=sys.stderr)

    if args.format == "csv":
        text = _points_csv(points)
    else:
        text = json.dumps([vars(p) for p in points], indent=2) + "\n"
    _emit(text, args.out)
    _write_manifest("simulate", params, args.out)
    return 0


def _points_csv(points: list[BerCurvePoint]) -> str:
    lines = ["ebno_db,iteration,frames,bits,bit_errors,ber"]
    for p in points:
        lines.append(f"{p.ebno_db!r},{p.iteration},{p.frames},{p.bits},"
                     f"{p.bit_errors},{p.ber!r}")
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sys.exit(main())
