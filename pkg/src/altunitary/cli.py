"""Command-line entry point.

Exit status: 0 success, 1 usage or configuration error, 2 numerical failure
(non-converged propagation or a failed verification property).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import adiabatic, alternating, bench, verify
from .linalg import populations, shannon_entropy

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2

TABLE1_CONFIG = {
    "model": {"kind": "pspin", "N": 100, "p": 3, "J": 1.0, "Gamma": 1.0},
    "adiabatic": {"policy": "none"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="sweep config (JSON)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config entry (repeatable)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--variant", choices=alternating.VARIANTS)
    common.add_argument("--midpoint", action="store_true",
                        help="evaluate H and grad H at slice midpoints")
    common.add_argument("-v", "--verbose", action="store_true", help="log one line per point")

    p = _Parser(prog="altunitary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)
    sub.add_parser("two-level", parents=[common], help="two-level spin-flip sweep")
    sub.add_parser("pspin", parents=[common], help="p-spin annealing sweep")
    sub.add_parser("table1", parents=[common], help="p=3, N=100 sweep and top-20 report")
    sub.add_parser("agp-verify", parents=[common], help="AGP limit/property suite")
    pop = sub.add_parser("populations", parents=[common],
                         help="rerun one grid point with per-slice populations")
    pop.add_argument("--point", required=True, metavar="J,K,L", help="grid point, e.g. 1,5,6")
    return p


def _config(args, default: dict | None = None) -> dict:
    if args.config is not None:
        config = bench.load_config(args.config, args.overrides)
    elif default is not None:
        config = bench.complete_config(default, args.overrides)
    else:
        raise bench.ConfigError("--config is required for this command")
    if args.variant:
        config["variant"] = args.variant
    if args.midpoint:
        config["midpoint"] = True
    return config


def _out_dir(args, config: dict) -> Path | None:
    out = args.out
    if out is None:
        return None
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
    return out


def _run_sweep(args, config: dict, kind: str | None) -> int:
    spec = bench.spec_from_config(config)
    if kind is not None and spec.model["kind"] != kind:
        raise bench.ConfigError(f"config model kind {spec.model['kind']!r} does not match '{kind}'")
    records = bench.run_sweep(spec, workers=max(1, args.workers))
    top = bench.top_k(records, int(config["output"].get("top", 20)))
    report = bench.format_table(top)
    out = _out_dir(args, config)
    if out is not None:
        pops = out / config["output"]["populations"] if spec.record_populations else None
        bench.write_records(records, out / config["output"]["records"], pops)
        (out / config["output"]["report"]).write_text(report)
    sys.stdout.write(report)
    bad = [r for r in records if not r.converged]
    if bad:
        print(f"{len(bad)} adiabatic point(s) did not converge", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _agp_verify(args) -> int:
    family = lam = None
    if args.config is not None:
        config = bench.load_config(args.config, args.overrides)
        family, _ = bench.build_model(config["model"])
    checks = verify.agp_suite(family, lam)
    for c in checks:
        print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERICAL


def _populations(args) -> int:
    config = _config(args)
    spec = bench.spec_from_config(config)
    try:
        j, k, L = (int(x) for x in args.point.split(","))
    except ValueError:
        raise bench.ConfigError(f"--point must be J,K,L integers, got {args.point!r}") from None
    spec = dataclasses.replace(spec, j_values=(j,), k_values=(k,), L_values=(L,))
    (point,) = bench.resolve_grid(spec)
    family, schedule = bench.build_model(spec)
    schedule = schedule.with_slices(L)
    params = alternating.AlternatingParams(point.eta, point.M, L, spec.variant)
    alt = alternating.run_transfer(family, schedule, params, midpoint=spec.midpoint)
    adia = adiabatic.evolve_adiabatic(
        family, schedule,
        adiabatic.PropagationConfig(alt.effective_time, spec.adiabatic_initial_steps,
                                    spec.adiabatic_tolerance, spec.adiabatic_max_doublings),
    )
    decs = [family.decompose(schedule(l / L)) for l in range(L + 1)]
    rows = []
    print(f"j={j} k={k} L={L} eta={point.eta:.8f} M={point.M} T={alt.effective_time:.2f}")
    print(f"{'slice':>5}  {'method':<12} {'P_ground':>9} {'argmax':>6} {'entropy':>8}")
    for method, res in (("alternating", alt), ("adiabatic", adia)):
        for l, (d, s) in enumerate(zip(decs, res.slice_states)):
            pop = populations(d, s)
            print(f"{l:>5}  {method:<12} {pop[0]:>9.4f} {int(np.argmax(pop)):>6} {shannon_entropy(pop):>8.4f}")
            rows.extend((method, l, l / L, i, d.eigenvalues[i], pop[i]) for i in range(len(pop)))
    out = _out_dir(args, config)
    if out is not None:
        with (out / f"populations_j{j}_k{k}_L{L}.csv").open("w") as fh:
            fh.write("method,slice,s,index,energy,population\n")
            for m, l, s, i, e, p in rows:
                fh.write(f"{m},{l},{s!r},{i},{float(e)!r},{float(p)!r}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "two-level":
            return _run_sweep(args, _config(args), "two-level")
        if args.command == "pspin":
            return _run_sweep(args, _config(args), "pspin")
        if args.command == "table1":
            return _run_sweep(args, _config(args, TABLE1_CONFIG), "pspin")
        if args.command == "agp-verify":
            return _agp_verify(args)
        if args.command == "populations":
            return _populations(args)
    except bench.ConfigError as exc:
        print(f"altunitary: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except adiabatic.ConvergenceError as exc:
        print(f"altunitary: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    parser.error(f"unknown command {args.command!r}")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
