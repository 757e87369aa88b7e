"""Command-line entry point: ``prhartree <subcommand>``.

Exit codes: 0 success, 1 configuration error, 2 non-convergence (the report is
still written).
"""

from __future__ import annotations

import argparse
import copy
import logging
import sys
from pathlib import Path

import numpy as np

from . import diagnostics, io
from .config import ConfigError, RunConfig, build_problem, load_config
from .extension import validate_operator
from .functional import HypothesisError, hartree_term
from .nehari import limit_report
from .solver import SolveError, solve_ground_state, sweep

log = logging.getLogger("prhartree")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2


def _emit(obj, out: Path | None, name: str, schema: str):
    io.validate_json(obj, schema)
    text = io.to_json(obj)
    if out is None:
        print(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text + "\n")
        print(out / name)


def _solve_and_write(run: RunConfig, out: Path) -> int:
    cfg = run.raw
    try:
        report = solve_ground_state(run.problem, run.solve)
        code = EXIT_OK
    except SolveError as exc:
        report = exc.report
        if report is None:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NONCONVERGED
        print(f"warning: {exc}", file=sys.stderr)
        code = EXIT_NONCONVERGED
    if (cfg.get("solve") or {}).get("compare_to_limit") and run.problem.v_inf is not None:
        try:
            lim = limit_report(run.problem.v_inf, run.problem, run.solve)
            margin = diagnostics.compare_to_limit(report, lim)
            report.limit_level_E_inf = lim.energy
            report.comparison_margin = margin.margin
        except SolveError as exc:
            print(f"warning: limit problem: {exc}", file=sys.stderr)
    out.mkdir(parents=True, exist_ok=True)
    field_path = io.write_field(out / "groundstate.prhf", report.field)
    doc = report.to_dict(field_path=field_path.name)
    doc["config"] = cfg
    io.validate_json(doc, "report")
    io.write_json(out / "report.json", doc)
    print(out / "report.json")
    return code


def cmd_solve(args) -> int:
    run = load_config(args.config, args.override_hypotheses, args.seed, args.out)
    return _solve_and_write(run, run.outputs)


def cmd_limit_level(args) -> int:
    run = load_config(args.config, args.override_hypotheses, args.seed)
    spec = run.problem
    alpha = args.alpha if args.alpha is not None else spec.v_inf
    if alpha is None:
        raise ConfigError(f"{args.config}: limit-level needs --alpha or problem.potential.V_inf")
    code = EXIT_OK
    try:
        rep = limit_report(alpha, spec, run.solve)
    except SolveError as exc:
        rep, code = exc.report, EXIT_NONCONVERGED
        print(f"warning: {exc}", file=sys.stderr)
        if rep is None:
            return code
    theta = spec.theta
    on_manifold = (theta - 1) / (2 * theta) * hartree_term(rep.spec, rep.field)
    doc = {
        "alpha": alpha,
        "E_alpha": rep.energy,
        "E_from_hartree": on_manifold,
        "status": rep.status,
        "grad_residual": rep.grad_residual,
        "nehari_residual": rep.nehari_residual,
        "iterations": rep.iterations,
        "symmetry_deviation": rep.symmetry_deviation,
        "min_value": rep.min_value,
        "decay": rep.decay.to_dict() if rep.decay else None,
        "seed": run.seed,
        "problem": rep.spec.to_dict(),
    }
    _emit(doc, args.out, "limit_level.json", "limit_level")
    return code


def cmd_validate_operator(args) -> int:
    run = load_config(args.config, override_hypotheses=True, seed=args.seed)
    spec = run.problem
    doc = validate_operator(spec.lattice, spec.m, layers=tuple(args.layers), depth=args.depth, seed=run.seed)
    _emit(doc, args.out, "validate_operator.json", "validate_operator")
    return EXIT_OK


def cmd_decay_fit(args) -> int:
    try:
        u = io.read_field(args.field)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"{args.field}: {exc}") from None
    window = args.window or (2.0, u.lattice.extent / 4)
    ref = diagnostics.reference_decay_rate(args.m, args.alpha)
    try:
        fit = diagnostics.fit_decay_rate(u, window, ref, center=diagnostics.center_of_mass(u))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    doc = {"field": str(args.field), "m": args.m, "alpha": args.alpha, **fit.to_dict()}
    _emit(doc, args.out, "decay_fit.json", "decay_fit")
    return EXIT_OK


def _set_path(d: dict, dotted: str, value):
    keys = dotted.split(".")
    for k in keys[:-1]:
        d = d.setdefault(k, {})
    d[keys[-1]] = value


def cmd_sweep(args) -> int:
    run = load_config(args.config, args.override_hypotheses, args.seed)
    sw = run.raw.get("sweep")
    if not isinstance(sw, dict) or "parameter" not in sw or not sw.get("values"):
        raise ConfigError(f"{args.config}: sweep section needs 'parameter' and a nonempty 'values' list")
    param = str(sw["parameter"])
    specs = []
    for i, val in enumerate(sw["values"]):
        raw = copy.deepcopy(run.raw)
        _set_path(raw, param, val)
        try:
            specs.append(build_problem(raw["problem"], base_dir=Path(args.config).parent))
        except ConfigError as exc:
            raise ConfigError(f"{args.config}: sweep.values[{i}]: {exc}") from None
    results = sweep(specs, run.solve, workers=args.threads)
    rows = []
    code = EXIT_OK
    for val, res in zip(sw["values"], results):
        if isinstance(res, Exception):
            code = EXIT_NONCONVERGED
            rep = getattr(res, "report", None)
            rows.append(
                {
                    "value": val,
                    "status": rep.status if rep is not None else "error",
                    "energy": rep.energy if rep is not None else None,
                    "grad_residual": rep.grad_residual if rep is not None else None,
                    "iterations": rep.iterations if rep is not None else None,
                    "error": str(res),
                }
            )
        else:
            rows.append(
                {
                    "value": val,
                    "status": res.status,
                    "energy": res.energy,
                    "grad_residual": res.grad_residual,
                    "iterations": res.iterations,
                    "error": None,
                }
            )
    energies = [r["energy"] for r in rows]
    monotone = None
    if all(e is not None for e in energies):
        order = np.argsort(np.asarray(sw["values"], dtype=float), kind="stable")
        e_sorted = np.asarray(energies)[order]
        monotone = bool(np.all(np.diff(e_sorted) >= 0))
    doc = {"parameter": param, "seed": run.seed, "rows": rows, "energy_nondecreasing": monotone}
    _emit(doc, args.out, "sweep.json", "sweep")
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prhartree", description="Ground states of the pseudo-relativistic Hartree equation")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, type=Path, help="YAML run configuration")
        sp.add_argument("--out", type=Path, default=None, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed (overrides the config)")
        sp.add_argument("--override-hypotheses", action="store_true", help="run even if V1/V2/W fail")
        sp.add_argument("--threads", type=int, default=1, help="parallel workers (sweep only)")

    sp = sub.add_parser("solve", help="compute a ground state; writes report.json and groundstate.prhf")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("limit-level", help="ground-state level of the constant-potential problem")
    common(sp)
    sp.add_argument("--alpha", type=float, default=None, help="constant potential (default V_inf)")
    sp.set_defaults(func=cmd_limit_level)

    sp = sub.add_parser("validate-operator", help="compare the extension DtN map with the spectral operator")
    common(sp)
    sp.add_argument("--layers", type=int, nargs="+", default=[64, 128])
    sp.add_argument("--depth", type=float, default=None, help="slab depth X (default 8/m)")
    sp.set_defaults(func=cmd_validate_operator)

    sp = sub.add_parser("decay-fit", help="fit the radial decay rate of a PRHF field")
    common(sp, config=False)
    sp.add_argument("field", type=Path)
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=None, help="constant potential for the reference rate")
    sp.add_argument("--window", type=float, nargs=2, default=None)
    sp.set_defaults(func=cmd_decay_fit)

    sp = sub.add_parser("sweep", help="solve over a parameter grid given in the config's sweep section")
    common(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, HypothesisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
