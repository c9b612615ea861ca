"""Command-line entry point.

Subcommands: race (exact prime race + density), hypo (hypothetical
construction: main-term sign and Omega densities), fejer (sublevel-measure
sweeps), explicit (explicit formula vs. true counts over a zeros file).

Reports embed the fully-resolved configuration and the package version;
identical configuration and seed produce byte-identical output for any
worker count, except for the single generated_at line. Exit codes:
0 success, 2 usage/validation, 3 I/O, 4 precision failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .characters import build_character_table, select_race_character
from .density import (
    exact_race_density,
    hypothetical_sign_density,
    omega_density,
    omega_window,
    sign_measures,
)
from .errors import DomainError, ParseError, PrecisionError
from .explicit_formula import (
    FormulaConfig,
    delta_explicit,
    delta_main_hypothetical,
)
from .fejer import FejerParams, omega_membership, sublevel_measure
from .sieve import race_series
from .zeros import HypotheticalConstruction, build_B, load_zeros

_GLOBAL_KEYS = ("output", "format", "seed", "workers", "max_precision_bits", "config")


def _build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    top = argparse.ArgumentParser(prog="primerace", description=__doc__)
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)
    parsers: dict[str, argparse.ArgumentParser] = {}

    def add_common(p):
        p.add_argument("--config", help="key = value config file; flags override it")
        p.add_argument("--output", help="output path (default: stdout)")
        p.add_argument("--format", choices=["json", "csv"], help="report format")
        p.add_argument("--seed", type=int, help="RNG seed for sampled commands")
        p.add_argument("--workers", type=int, help="parallel workers (default 1)")
        p.add_argument(
            "--max-precision-bits",
            type=int,
            help="cap for extended-precision phase reduction (default 4096)",
        )

    p = parsers["race"] = sub.add_parser("race", help="exact race density")
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--x", type=float, help="upper limit X")
    p.add_argument("--dump-breakpoints", help="also write the breakpoint CSV here")
    add_common(p)

    p = parsers["hypo"] = sub.add_parser("hypo", help="hypothetical construction demo")
    p.add_argument("--xi", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--A", type=float)
    p.add_argument("--j-min", type=int)
    p.add_argument("--j-max", type=int)
    p.add_argument("--x-log", type=float, help="log X (upper height)")
    p.add_argument("--n-samples", type=int)
    p.add_argument(
        "--scale-mode",
        nargs=2,
        type=float,
        metavar=("C", "P"),
        help="replace the j^8 growth law by c*j^p (non-paper desk-scale demo)",
    )
    p.add_argument("--per-sample", help="write per-sample CSV here")
    add_common(p)

    p = parsers["fejer"] = sub.add_parser("fejer", help="sublevel-measure sweep")
    p.add_argument("--gamma", type=float)
    p.add_argument("--x", type=float, help="range end X")
    p.add_argument("--l-sweep", help="comma-separated L values")
    p.add_argument(
        "--threshold",
        help='numeric threshold, or "quarter" for -L/4 (default)',
    )
    p.add_argument(
        "--method",
        choices=["analytic-intervals", "adaptive-grid", "both"],
    )
    add_common(p)

    p = parsers["explicit"] = sub.add_parser(
        "explicit", help="explicit formula vs true counts"
    )
    p.add_argument("--q", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--zeros-file")
    p.add_argument("--x-list", help="comma-separated evaluation points")
    add_common(p)

    return top, parsers


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from the config file; reject unknown keys."""
    if not args.config:
        return
    cp = configparser.ConfigParser()
    if not cp.read(args.config):
        raise OSError(f"cannot read config file {args.config}")
    dests = {
        a.dest: a
        for a in parser._actions
        if isinstance(a, (argparse._StoreAction, argparse._StoreTrueAction))
    }
    for section in cp.sections():
        if section not in ("global", args.command):
            raise DomainError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            dest = key.replace("-", "_")
            if dest not in dests or (section == "global" and dest not in _GLOBAL_KEYS):
                raise DomainError(f"unknown config key {key!r} in [{section}]")
            if getattr(args, dest) is None:
                action = dests[dest]
                if action.nargs == 2:
                    value = [action.type(v) for v in raw.split()]
                elif action.type is not None:
                    value = action.type(raw)
                else:
                    value = raw
                setattr(args, dest, value)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_report(command: str, config: dict, results: dict) -> str:
    report = {
        "command": command,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "config": config,
        "results": results,
    }
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _require(args, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise DomainError(f"missing required parameter(s): {', '.join(missing)}")


def _resolved(args, keys: list[str]) -> dict:
    out = {}
    for k in keys + ["seed", "workers", "max_precision_bits", "format"]:
        v = getattr(args, k.replace("-", "_"), None)
        if v is not None:
            out[k] = v
    return out


def cmd_race(args) -> int:
    _require(args, ["q", "a", "b", "x"])
    X = int(args.x)
    workers = args.workers or 1
    table = build_character_table(args.q)
    race = select_race_character(table, args.a, args.b)
    rs = race_series(args.q, args.a, args.b, X, workers=workers)
    result = exact_race_density(rs)
    pos, zero, neg = sign_measures(rs)
    if args.dump_breakpoints:
        rs.to_csv(args.dump_breakpoints)
    first_neg = next((int(x) for x, d in rs.breakpoints if d < 0), None)
    results = {
        "q": args.q,
        "a": args.a,
        "b": args.b,
        "X": X,
        "kind": result.kind,
        "density": result.density,
        "measure": result.measure,
        "measure_positive": pos,
        "measure_tied": zero,
        "measure_negative": neg,
        "breakpoints": len(rs.xs),
        "final_diff": rs.final_diff(),
        "first_negative_x": first_neg,
        "race_phase": {"chi_index": race.chi_index, "xi": race.xi, "magnitude": race.magnitude},
    }
    if (args.format or "json") == "csv":
        _emit(
            _csv_text(
                ["q", "a", "b", "X", "density", "measure"],
                [[args.q, args.a, args.b, X, repr(result.density), result.measure]],
            ),
            args.output,
        )
    else:
        _emit(_json_report("race", _resolved(args, ["q", "a", "b", "x"]), results), args.output)
    return 0


def cmd_hypo(args) -> int:
    _require(args, ["xi", "sigma", "delta", "A", "j-min", "j-max", "x-log", "n-samples"])
    workers = args.workers or 1
    seed = args.seed if args.seed is not None else 0
    max_bits = args.max_precision_bits or 4096
    c = HypotheticalConstruction(
        xi=args.xi,
        sigma=args.sigma,
        delta=args.delta,
        A=args.A,
        j_min=args.j_min,
        j_max=args.j_max,
        scale_mode=tuple(args.scale_mode) if args.scale_mode else None,
    )
    B = build_B(c)
    # the race drives only the positive prefactor 2|chi(a)-chi(b)|; the xi of
    # the construction is the phase the race would supply
    race = _race_for_xi(c.xi)
    sign_res = hypothetical_sign_density(
        c, race, args.x_log, args.n_samples, seed, workers=workers, max_bits=max_bits
    )
    om_res = omega_density(
        c, args.x_log, args.n_samples, seed, workers=workers, max_bits=max_bits
    )
    main_at_X = delta_main_hypothetical(args.x_log, c, race, max_bits)
    results = {
        "construction": {
            "xi": c.xi,
            "sigma": c.sigma,
            "delta": c.delta,
            "A": c.A,
            "j_min": c.j_min,
            "j_max": c.j_max,
            "scale_mode": list(c.scale_mode) if c.scale_mode else None,
            "paper_exact": c.is_paper_exact,
            "provenance": c.provenance(),
        },
        "zero_multiset": {
            "distinct_zeros": len(B),
            "total_multiplicity": B.total_multiplicity(),
        },
        "X_log": args.x_log,
        "race_stand_in": {
            "xi": race.xi,
            "magnitude": race.magnitude,
            "note": "sign and omega densities are invariant to the positive magnitude",
        },
        "main_term_at_X": {
            "log_magnitude": main_at_X.value.log_magnitude,
            "sign": main_at_X.value.sign,
            "J": main_at_X.J,
        },
        "sign_density": _density_dict(sign_res),
        "omega_density": _density_dict(om_res),
        "assumed_hypotheses": [
            "construction zeros attached to the race character only",
            "all other characters zero-free in the region",
        ],
    }
    if args.per_sample:
        _write_hypo_samples(args.per_sample, c, race, args.x_log, args.n_samples, seed, max_bits)
    keys = ["xi", "sigma", "delta", "A", "j-min", "j-max", "x-log", "n-samples"]
    if (args.format or "json") == "csv":
        _emit(
            _csv_text(
                ["kind", "density", "confidence_radius", "n"],
                [
                    [sign_res.kind, repr(sign_res.density), repr(sign_res.confidence_radius), sign_res.sample_count],
                    [om_res.kind, repr(om_res.density), repr(om_res.confidence_radius), om_res.sample_count],
                ],
            ),
            args.output,
        )
    else:
        _emit(_json_report("hypo", _resolved(args, keys), results), args.output)
    return 0


def _race_for_xi(xi: float):
    """A unit-magnitude, phase-xi stand-in race for construction-only runs."""
    from .characters import RacePhase

    return RacePhase(q=4, a=3, b=1, chi_index=1, xi=xi, magnitude=2.0)


def _density_dict(r) -> dict:
    return {
        "kind": r.kind,
        "X_log": r.X_log,
        "density": r.density,
        "measure": r.measure,
        "sample_count": r.sample_count,
        "confidence_radius": r.confidence_radius,
        "seed": r.seed,
    }


def _write_hypo_samples(path, c, race, X_log, n_samples, seed, max_bits) -> None:
    from .density import _draw_samples

    window = omega_window(c, X_log)
    x_logs, log_w = _draw_samples(X_log, n_samples, seed)
    rows = []
    for xl, lw in zip(x_logs, log_w):
        main = delta_main_hypothetical(float(xl), c, race, max_bits)
        rows.append(
            [
                repr(float(xl)),
                main.value.sign,
                repr(main.value.log_magnitude),
                int(omega_membership(c, float(xl), window, max_bits)),
                repr(float(lw)),
            ]
        )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_log", "sign", "log_magnitude", "omega", "log_weight"])
        w.writerows(rows)


def cmd_fejer(args) -> int:
    _require(args, ["gamma", "x", "l-sweep"])
    try:
        l_values = [int(s) for s in str(args.l_sweep).split(",") if s.strip()]
    except ValueError as exc:
        raise DomainError(f"bad L sweep: {exc}") from exc
    if not l_values:
        raise DomainError("empty L sweep")
    method = args.method or "analytic-intervals"
    reports = []
    for L in l_values:
        p = FejerParams(gamma=args.gamma, L=L)  # validates L >= 4, gamma >= 1
        if args.threshold in (None, "quarter"):
            threshold = -L / 4.0
        else:
            threshold = float(args.threshold)
        reports.append(sublevel_measure(p, args.x, threshold, method=method))
    if (args.format or "csv") == "json":
        results = [
            {
                "L": r.L,
                "gamma": r.gamma,
                "X": r.X,
                "threshold": r.threshold,
                "measure": r.measure,
                "density": r.density,
                "method": r.method,
                "error_bound": r.error_bound,
            }
            for r in reports
        ]
        _emit(
            _json_report("fejer", _resolved(args, ["gamma", "x", "l-sweep", "threshold", "method"]), {"sweep": results}),
            args.output,
        )
    else:
        rows = [
            [r.L, r.gamma, r.X, repr(r.density), r.method, repr(r.error_bound)]
            for r in reports
        ]
        _emit(_csv_text(["L", "gamma", "X", "density", "method", "err"], rows), args.output)
    return 0


def cmd_explicit(args) -> int:
    _require(args, ["q", "a", "b", "zeros-file", "x-list"])
    try:
        xs = [float(s) for s in str(args.x_list).split(",") if s.strip()]
    except ValueError as exc:
        raise DomainError(f"bad x list: {exc}") from exc
    if not xs:
        raise DomainError("empty x list")
    if min(xs) < 4:
        raise DomainError(f"x values must be >= 4, got {min(xs)}")
    zs = load_zeros(args.zeros_file)
    table = build_character_table(args.q)
    race = select_race_character(table, args.a, args.b)
    cfg = FormulaConfig(max_precision_bits=args.max_precision_bits or 4096)
    X = int(max(xs))
    rs = race_series(args.q, args.a, args.b, X, workers=args.workers or 1)
    phi = table.phi
    records = []
    hypotheses: tuple[str, ...] = ()
    for x in sorted(xs):
        de = delta_explicit(x, race, zs, cfg, table=table)
        hypotheses = de.assumed_hypotheses
        true_delta = phi * rs.value_at(x)
        agree = ((de.value > 0) == (true_delta > 0)) if true_delta != 0 else None
        records.append((x, de.value, true_delta, agree))
    if (args.format or "csv") == "json":
        results = {
            "rows": [
                {"x": x, "delta_explicit": v, "true_delta": t, "sign_agree": a}
                for x, v, t, a in records
            ],
            "assumed_hypotheses": list(hypotheses),
        }
        _emit(_json_report("explicit", _resolved(args, ["q", "a", "b", "zeros-file", "x-list"]), results), args.output)
    else:
        rows = [
            [repr(x), repr(v), t, "" if a is None else int(a)]
            for x, v, t, a in records
        ]
        _emit(
            _csv_text(["x", "delta_explicit", "true_delta", "sign_agree"], rows),
            args.output,
        )
    return 0


_COMMANDS = {
    "race": cmd_race,
    "hypo": cmd_hypo,
    "fejer": cmd_fejer,
    "explicit": cmd_explicit,
}


def main(argv: list[str] | None = None) -> int:
    top, parsers = _build_parser()
    args = top.parse_args(argv)
    try:
        _apply_config(args, parsers[args.command])
        return _COMMANDS[args.command](args)
    except (DomainError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PrecisionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
