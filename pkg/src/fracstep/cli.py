"""Command-line front end: ``fracstep solve|sweep|verify``.

Flags use the experiment parameter names (alpha, r, c, sigma, nx, nt) so the
mapping from a table row to a command stays legible.  An optional config
file supplies flat ``key=value`` defaults; explicit flags override it.

Exit codes: 0 success, 2 config error, 3 domain/precondition error,
4 property-suite failure.
"""

import argparse
import json
import sys

import numpy as np

from . import assembly, fem1d, harness, solver
from .errors import FracstepError
from .fracops import TemporalGrid
from .properties import DEFAULT_SEED, run_property_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_PROPERTIES = 4

_EXPERIMENT_ALIASES = {
    "exp1": assembly.TAG_EXPERIMENT1,
    "exp2": assembly.TAG_EXPERIMENT2,
    "exp3": assembly.TAG_EXPERIMENT3,
    "experiment1": assembly.TAG_EXPERIMENT1,
    "experiment2": assembly.TAG_EXPERIMENT2,
    "experiment3": assembly.TAG_EXPERIMENT3,
    "manufactured": assembly.TAG_MANUFACTURED,
    "spectral": assembly.TAG_SPECTRAL,
}


class ConfigError(Exception):
    pass


def _fmt(x) -> str:
    return f"{x:.17g}"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstep",
        description="Space-time Galerkin solver for time-fractional diffusion")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value file with flag defaults")
        p.add_argument("--experiment", help="exp1|exp2|exp3|manufactured|spectral")
        p.add_argument("--alpha", type=float, help="fractional order in (0,1)")
        p.add_argument("--r", type=float, help="spatial power exponent")
        p.add_argument("--c", type=float, help="initial-data scale (experiment 2)")
        p.add_argument("--sigma", type=float, help="temporal exponent t^-sigma")
        p.add_argument("--mode", type=int, help="sine mode (spectral test)")
        p.add_argument("--nx", type=int, help="number of mesh cells")
        p.add_argument("--nt", type=int, help="number of time steps")
        p.add_argument("--output", help="output file path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), dest="fmt",
                       help="output format (default csv)")

    psolve = sub.add_parser("solve", help="single solve with diagnostics")
    add_common(psolve)

    psweep = sub.add_parser("sweep", help="refinement sweep and table")
    add_common(psweep)
    psweep.add_argument("--axis", choices=("space", "time"),
                        help="refined axis (default space)")
    psweep.add_argument("--levels", type=int, help="number of dyadic levels")
    psweep.add_argument("--ref-nx", type=int, dest="ref_nx",
                        help="reference mesh cells")
    psweep.add_argument("--ref-nt", type=int, dest="ref_nt",
                        help="reference time steps")
    psweep.add_argument("--cache-dir", dest="cache_dir",
                        help="reference cache directory "
                             "(default $FRACSTEP_CACHE_DIR)")

    pverify = sub.add_parser("verify", help="run the property suite")
    pverify.add_argument("--config", help="flat key=value file with flag defaults")
    pverify.add_argument("--seed", type=int, help="property-suite seed")
    return parser


def _apply_config_file(args: argparse.Namespace) -> None:
    if getattr(args, "config", None) is None:
        return
    try:
        with open(args.config, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno} is not key=value: {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        attr = key.replace("-", "_")
        if not hasattr(args, attr) or attr in ("config", "command"):
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, attr) is None:  # flags override the file
            caster = {"alpha": float, "r": float, "c": float, "sigma": float,
                      "mode": int, "nx": int, "nt": int, "levels": int,
                      "ref_nx": int, "ref_nt": int, "seed": int}.get(attr, str)
            try:
                setattr(args, attr, caster(value))
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from exc


def _require(args, name):
    value = getattr(args, name)
    if value is None:
        raise ConfigError(f"--{name.replace('_', '-')} is required")
    return value


def _experiment_tag(args) -> str:
    name = _require(args, "experiment")
    try:
        return _EXPERIMENT_ALIASES[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}") from None


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _experiment_params(tag: str, args) -> dict:
    params = {}
    if tag == assembly.TAG_EXPERIMENT1:
        params["r"] = _require(args, "r")
        if args.sigma is not None:
            params["sigma"] = args.sigma
    elif tag == assembly.TAG_EXPERIMENT2:
        if args.c is not None:
            params["c"] = args.c
    return params


def _write_output(args, text: str) -> None:
    if args.output is None:
        sys.stdout.write(text)
        return
    try:
        with open(args.output, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output: {exc}") from exc


def _run_solve(args) -> int:
    tag = _experiment_tag(args)
    alpha = _check_alpha(_require(args, "alpha"))
    nx = _require(args, "nx")
    nt = _require(args, "nt")
    if nx < 2 or nt < 1:
        raise ConfigError("need nx >= 2 and nt >= 1")
    mesh = fem1d.Mesh1D(nx)
    grid = TemporalGrid.uniform(nt, 1.0)
    if tag == assembly.TAG_SPECTRAL:
        mode = _require(args, "mode")
        spec = assembly.spectral_test_problem(mode, mesh, alpha)
    else:
        spec = harness.experiment_problem(tag, alpha, **_experiment_params(tag, args))
    field, report = solver.solve(spec, grid, mesh)

    errors = None
    if spec.exact is not None:
        e1, e2 = spec.exact.error_norms(grid, mesh, field.values)
        errors = {"E1": e1, "E2": e2}

    print(f"solved {tag}: alpha={_fmt(alpha)} nx={nx} nt={nt}")
    print(f"steps={report.steps} wall_s={report.wall_time:.3f} "
          f"max_residual={np.max(report.residual_norms):.3e} "
          f"energy_gap={report.energy_gap:.3e}")
    if errors is not None:
        print(f"E1={_fmt(errors['E1'])} E2={_fmt(errors['E2'])}")

    x = np.concatenate([[0.0], mesh.interior_nodes, [1.0]])
    u = np.concatenate([[0.0], field.values[-1], [0.0]])
    if (args.fmt or "csv") == "csv":
        lines = ["x,u_final"]
        lines += [f"{_fmt(xi)},{_fmt(ui)}" for xi, ui in zip(x, u)]
        if errors is not None:  # diagnostics ride along as comment lines
            lines += [f"# E1={_fmt(errors['E1'])}", f"# E2={_fmt(errors['E2'])}"]
        text = "\n".join(lines) + "\n"
    else:
        obj = {
            "meta": {"experiment": tag, "alpha": alpha, "nx": nx, "nt": nt,
                     "params": _experiment_params(tag, args)},
            "final_time_values": {"x": x.tolist(), "u": u.tolist()},
            "errors": errors,
            "report": {"steps": report.steps,
                       "max_residual": float(np.max(report.residual_norms)),
                       "energy_gap": report.energy_gap,
                       "wall_time_s": report.wall_time},
        }
        text = json.dumps(obj, indent=2) + "\n"
    if args.output is not None:
        _write_output(args, text)
    return EXIT_OK


def _run_sweep(args) -> int:
    tag = _experiment_tag(args)
    axis = args.axis or "space"
    if args.alpha is not None:
        _check_alpha(args.alpha)
    for name in ("nx", "nt", "ref_nx", "ref_nt"):
        value = getattr(args, name)
        if value is not None and (value < 4 or not _is_pow2(value)):
            raise ConfigError(f"--{name.replace('_', '-')} must be a power of "
                              f"two >= 4, got {value}")
    reference = None
    if args.ref_nx is not None or args.ref_nt is not None:
        if args.ref_nx is None or args.ref_nt is None:
            raise ConfigError("--ref-nx and --ref-nt must be given together")
        reference = (args.ref_nx, args.ref_nt)
    plan = harness.default_plan(
        tag, axis, alpha=args.alpha, params=_experiment_params(tag, args),
        nx=args.nx, nt=args.nt, count=args.levels, reference=reference)
    table = harness.run_sweep(plan, cache_dir=args.cache_dir)
    if (args.fmt or "csv") == "csv":
        text = table.to_csv_text()
    else:
        text = json.dumps(table.to_json_obj(), indent=2) + "\n"
    _write_output(args, text)
    return EXIT_OK


def _run_verify(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    results = run_property_suite(seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name:<{width}} {r.detail}")
    failed = sum(1 for r in results if not r.passed)
    print(f"{len(results) - failed}/{len(results)} properties passed (seed {seed})")
    return EXIT_OK if failed == 0 else EXIT_PROPERTIES


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the config-error code
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        _apply_config_file(args)
        if args.command == "solve":
            return _run_solve(args)
        if args.command == "sweep":
            return _run_sweep(args)
        return _run_verify(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FracstepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
