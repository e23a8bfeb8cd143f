"""Command-line front end.

Subcommands: solve-wave, index, sweep, spectrum, dump-operator, self-check.
Flags override values from an optional JSON config file (--config), which
overrides defaults.  Output files are written atomically with
shortest-round-trip float formatting, so identical configurations produce
byte-identical files.

Exit codes: 0 success, 1 numerical failure, 2 accuracy warning,
3 theory-consistency failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import operators as op
from . import spectra as spc
from . import spectral as sp
from . import verdicts as vd
from . import waves as wv
from .errors import (ConvergenceError, FredholmViolationError,
                     TheoryConsistencyError)
from .io_utils import write_csv, write_json

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_ACCURACY = 2
EXIT_THEORY = 3
EXIT_USAGE = 64

SCHRODINGER = "schrodinger"

SWEEP_HEADER = ["s", "p", "c", "model", "n_L", "slope", "K_formula",
                "k_r", "k_c", "k_i_minus", "verdict", "status"]
SPECTRUM_HEADER = ["re", "im", "class", "krein_form_value"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    model: str = wv.FKDV
    s: float | None = None
    p: float | None = None
    c: float | None = None
    n: int | None = None
    half_length: float | None = None
    tol: float | None = None
    out: str = "."
    format: str = "csv"
    axis: str | None = None
    start: float | None = None
    stop: float | None = None
    steps: int | None = None
    case: str | None = None

    def numerics(self) -> vd.NumericsConfig:
        return vd.NumericsConfig(n=self.n, half_length=self.half_length,
                                 solver_tol=self.tol)

    def grid(self) -> sp.SpectralGrid:
        n, l = vd.default_grid(self.s if self.s is not None else 2.0)
        return sp.make_grid(self.n or n, self.half_length or l)


def build_parser() -> _Parser:
    parser = _Parser(prog="hkindex",
                     description="Hamiltonian-Krein index toolkit for "
                                 "fractional KdV/BBM solitary waves")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=[wv.FKDV, wv.FBBM, SCHRODINGER])
    common.add_argument("--s", type=float, help="dispersion exponent in (0, 2]")
    common.add_argument("--p", type=float, help="nonlinearity exponent")
    common.add_argument("--c", type=float, help="wave speed")
    common.add_argument("--n", type=int, help="grid points (even)")
    common.add_argument("--half-length", type=float, dest="half_length",
                        help="half box length")
    common.add_argument("--tol", type=float, help="wave solver tolerance")
    common.add_argument("--out", help="output directory (default '.')")
    common.add_argument("--config", help="JSON config file; flags override it")
    common.add_argument("--format", choices=["csv", "json"],
                        help="tabular output format (default csv)")

    sub.add_parser("solve-wave", parents=[common],
                   help="compute a solitary-wave profile and write CSV+JSON")
    sub.add_parser("index", parents=[common],
                   help="run the full index pipeline, write the result JSON")
    sweep_p = sub.add_parser("sweep", parents=[common],
                             help="run verdicts along one parameter axis")
    sweep_p.add_argument("--axis", choices=["p", "c", "s"])
    sweep_p.add_argument("--from", type=float, dest="start")
    sweep_p.add_argument("--to", type=float, dest="stop")
    sweep_p.add_argument("--steps", type=int)
    sub.add_parser("spectrum", parents=[common],
                   help="export the classified Hamiltonian spectrum")
    sub.add_parser("dump-operator", parents=[common],
                   help="dump the assembled operator matrix (binary + header)")
    check_p = sub.add_parser("self-check", parents=[common],
                             help="run packaged theory-consistency assertions")
    check_p.add_argument("--case", help="named case, e.g. gkdv-p2")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over the JSON config file over defaults."""
    file_values = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path) as fh:
                file_values = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}")
    cfg = RunConfig(command=args.command)
    for key in ("model", "s", "p", "c", "n", "half_length", "tol", "out",
                "format", "axis", "start", "stop", "steps", "case"):
        value = getattr(args, key, None)
        if value is None:
            value = file_values.get(key)
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def _require(cfg: RunConfig, *names) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise UsageError(f"missing required parameter --{name.replace('_', '-')}")


def validate_wave_params(cfg: RunConfig) -> None:
    """Verdict preconditions, checked up front (exit 1 on violation)."""
    _require(cfg, "s", "p")
    wv._check_exponents(cfg.s, cfg.p)
    if cfg.c is None:
        cfg.c = 1.0 if cfg.model == wv.FKDV else 2.0
    if cfg.model == wv.FKDV and not cfg.c > 0:
        raise ValueError(f"fKdV waves need c > 0, got {cfg.c}")
    if cfg.model == wv.FBBM and not cfg.c > 1:
        raise ValueError(f"fBBM waves need c > 1, got {cfg.c}")


def _solve_wave(cfg: RunConfig) -> wv.WaveProfile:
    grid = cfg.grid()
    opts = wv.SolverOptions(tol=cfg.tol)
    Q = wv.solve_ground_state(cfg.s, cfg.p, grid, opts)
    if cfg.model == wv.FKDV:
        return wv.kdv_wave(Q, cfg.c)
    return wv.bbm_wave(Q, cfg.c)


def cmd_solve_wave(cfg: RunConfig) -> int:
    validate_wave_params(cfg)
    profile = _solve_wave(cfg)
    csv_path, json_path = wv.save_profile(
        profile, os.path.join(cfg.out, "wave.csv"))
    print(f"wrote {csv_path} and {json_path} "
          f"(residual {profile.residual_norm:.3e})")
    return EXIT_ACCURACY if profile.truncation_warning else EXIT_OK


def _run_verdict(cfg: RunConfig) -> vd.PipelineData:
    if cfg.model == SCHRODINGER:
        raise UsageError("this command supports --model fkdv or fbbm")
    validate_wave_params(cfg)
    runner = vd.kdv_verdict if cfg.model == wv.FKDV else vd.bbm_verdict
    return runner(cfg.s, cfg.p, cfg.c, cfg.numerics(), keep_pipeline=True)


def cmd_index(cfg: RunConfig) -> int:
    data = _run_verdict(cfg)
    res = data.result
    payload = asdict(res)
    payload["diagnostics"] = list(res.diagnostics)
    write_json(os.path.join(cfg.out, "index.json"), payload)
    print(f"K_Ham={res.K_direct} verdict={res.verdict}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    _require(cfg, "axis", "start", "stop", "steps")
    if cfg.model == SCHRODINGER:
        raise UsageError("sweep supports --model fkdv or fbbm")
    fixed = {"s": cfg.s, "p": cfg.p, "c": cfg.c}
    if fixed["c"] is None and cfg.axis != "c":
        fixed["c"] = 1.0 if cfg.model == wv.FKDV else 2.0
    for name in ("s", "p", "c"):
        if name != cfg.axis and fixed[name] is None:
            raise UsageError(f"missing required parameter --{name}")
    fixed[cfg.axis] = 0.0  # overwritten per sweep point
    result = vd.sweep(cfg.axis, cfg.start, cfg.stop, cfg.steps,
                      s=fixed["s"], p=fixed["p"], c=fixed["c"],
                      model=cfg.model, numerics=cfg.numerics())
    rows = []
    for pt in result.points:
        if pt.result is not None:
            r = pt.result
            rows.append((pt.s, pt.p, pt.c, r.model, r.n_L, r.slope,
                         r.K_formula, r.k_r, r.k_c, r.k_i_minus, r.verdict,
                         "ok"))
        else:
            rows.append((pt.s, pt.p, pt.c, cfg.model, -1, float("nan"), -1,
                         -1, -1, -1, "ERROR", pt.error.replace(",", ";")))
    if cfg.format == "json":
        payload = [dict(zip(SWEEP_HEADER, row)) for row in rows]
        path = write_json(os.path.join(cfg.out, "sweep.json"), payload)
    else:
        path = write_csv(os.path.join(cfg.out, "sweep.csv"), SWEEP_HEADER, rows)
    if result.flip_bracket is not None:
        lo, hi = result.flip_bracket
        print(f"flip in ({lo:g}, {hi:g})")
    else:
        print("no verdict flip in range")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    data = _run_verdict(cfg)
    rows = spc.spectrum_rows(data.eigensystem, data.classification)
    if cfg.format == "json":
        payload = [dict(zip(SPECTRUM_HEADER, row)) for row in rows]
        path = write_json(os.path.join(cfg.out, "spectrum.json"), payload)
    else:
        path = write_csv(os.path.join(cfg.out, "spectrum.csv"),
                         SPECTRUM_HEADER, rows)
    print(f"K_Ham={data.result.K_direct} verdict={data.result.verdict}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_dump_operator(cfg: RunConfig) -> int:
    if cfg.model == SCHRODINGER:
        if cfg.c is None:
            cfg.c = 0.5
        if cfg.s is None:
            cfg.s = 2.0
        grid = cfg.grid()
        V = sp.RealField(grid, 2.0 / np.cosh(grid.nodes) ** 2)
        operator = op.schrodinger_operator(V, cfg.c)
    else:
        validate_wave_params(cfg)
        profile = _solve_wave(cfg)
        if cfg.model == wv.FKDV:
            operator = op.kdv_linearization(profile)
        else:
            operator = op.bbm_linearization(profile)
    matrix = op.assemble(operator)
    bin_path, json_path = op.save_matrix(
        matrix, os.path.join(cfg.out, "operator.bin"))
    print(f"wrote {bin_path} and {json_path} (order {matrix.order})")
    return EXIT_OK


def cmd_self_check(cfg: RunConfig) -> int:
    if cfg.case is None:
        raise UsageError("missing required parameter --case")
    try:
        report = vd.self_check(cfg.case)
    except KeyError as exc:
        raise UsageError(str(exc.args[0]))
    width = max(len(e.name) for e in report.entries)
    print(f"self-check case {report.case!r}")
    for entry in report.entries:
        status = "PASS" if entry.passed else "FAIL"
        print(f"  [{status}] {entry.name.ljust(width)}  {entry.detail}")
    print(f"{sum(e.passed for e in report.entries)}/{len(report.entries)} "
          f"assertions passed")
    return EXIT_OK if report.passed else EXIT_NUMERICAL


COMMANDS = {
    "solve-wave": cmd_solve_wave,
    "index": cmd_index,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "dump-operator": cmd_dump_operator,
    "self-check": cmd_self_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TheoryConsistencyError as exc:
        print(f"theory-consistency failure: {exc}", file=sys.stderr)
        return EXIT_THEORY
    except (ValueError, ConvergenceError, FredholmViolationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
