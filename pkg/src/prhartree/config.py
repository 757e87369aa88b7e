"""Run configuration: YAML documents describing a problem and a solve.

Example::

    problem:
      dim: 3
      n: 32
      extent: 16.0
      m: 1.0
      theta: 2.0
      kernel: {kind: yukawa, mu: 1.0}
      potential: {kind: well, V_inf: 1.0, k: 0.5, amplitude: 1.0}
    solve:
      grad_tol: 1.0e-7
    seed: 0

Errors are raised as :class:`ConfigError` naming the offending field and,
when known, its line in the file.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .functional import ProblemSpec, constant_potential, well_potential
from .io import read_field
from .kernels import kernel_from_dict
from .lattice import Lattice
from .solver import SolveConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "build_problem", "build_solve_config"]

_SOLVE_KEYS = {
    "max_iters": int,
    "grad_tol": float,
    "nehari_tol": float,
    "step_init": float,
    "backtrack_factor": float,
    "armijo_c": float,
    "precondition_shift": float,
    "enforce_positivity": bool,
    "init_width": float,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    raw: dict
    problem: ProblemSpec
    solve: SolveConfig
    outputs: Path
    seed: int
    source: str = "<config>"
    lines: dict = field(default_factory=dict)


def _line_map(node, prefix="", out=None) -> dict:
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[path] = k.start_mark.line + 1
            _line_map(v, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _line_map(v, f"{prefix}[{i}]", out)
    return out


class _Ctx:
    def __init__(self, source, lines):
        self.source = source
        self.lines = lines

    def error(self, path, msg):
        parts = path.split(".")
        line = None
        while parts and line is None:
            line = self.lines.get(".".join(parts))
            parts.pop()
        where = f"{self.source}:{line}" if line else self.source
        return ConfigError(f"{where}: {path}: {msg}")

    def get(self, d, key, path, typ=float, required=True, default=None):
        if not isinstance(d, dict):
            raise self.error(path, "expected a mapping")
        if key not in d or d[key] is None:
            if required:
                return_path = f"{path}.{key}" if path else key
                raise self.error(return_path, "missing required field")
            return default
        val = d[key]
        try:
            if typ is bool:
                if not isinstance(val, bool):
                    raise TypeError
                return val
            if typ is int and isinstance(val, float) and not val.is_integer():
                raise TypeError
            return typ(val)
        except (TypeError, ValueError):
            raise self.error(f"{path}.{key}" if path else key, f"expected {typ.__name__}, got {val!r}") from None


def load_config(path, override_hypotheses: bool = False, seed: int | None = None, outputs=None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, str(path), override_hypotheses, seed, outputs, base_dir=path.parent)


def parse_config(text, source="<config>", override_hypotheses=False, seed=None, outputs=None, base_dir=None) -> RunConfig:
    try:
        node = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark else source
        raise ConfigError(f"{where}: invalid YAML: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    ctx = _Ctx(source, _line_map(node) if node is not None else {})
    raw = copy.deepcopy(raw)
    if seed is not None:
        raw["seed"] = int(seed)
    if override_hypotheses:
        raw.setdefault("problem", {})["override_hypotheses"] = True
    run_seed = ctx.get(raw, "seed", "", int, required=False, default=0)
    if not 0 <= run_seed < 2**64:
        raise ctx.error("seed", "must be an unsigned 64-bit integer")
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    problem = build_problem(raw.get("problem"), ctx, base_dir)
    solve = build_solve_config(raw.get("solve") or {}, ctx, run_seed, problem, base_dir)
    out = outputs if outputs is not None else raw.get("outputs", "out")
    return RunConfig(raw, problem, solve, Path(out), run_seed, source, ctx.lines)


def _resolve(base_dir, p):
    p = Path(p)
    return p if p.is_absolute() else base_dir / p


def build_problem(d, ctx: _Ctx | None = None, base_dir=None) -> ProblemSpec:
    ctx = ctx or _Ctx("<config>", {})
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    if d is None:
        raise ctx.error("problem", "missing required section")
    try:
        lat = Lattice(ctx.get(d, "dim", "problem", int), ctx.get(d, "n", "problem", int), ctx.get(d, "extent", "problem"))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ctx.error("problem", str(exc)) from None
    m = ctx.get(d, "m", "problem")
    theta = ctx.get(d, "theta", "problem")
    if not m > 0:
        raise ctx.error("problem.m", "mass must be positive")
    if theta < 2:
        raise ctx.error("problem.theta", "theta must be >= 2")
    kd = d.get("kernel")
    if not isinstance(kd, dict):
        raise ctx.error("problem.kernel", "missing kernel specification")
    try:
        kernel = kernel_from_dict(kd, lat, load_field=lambda p: read_field(_resolve(base_dir, p)))
        kernel.validate(lat.dim)
    except KeyError as exc:
        raise ctx.error(f"problem.kernel.{exc.args[0]}", "missing kernel parameter") from None
    except (ValueError, OSError) as exc:
        raise ctx.error("problem.kernel", str(exc)) from None

    pd = d.get("potential")
    if not isinstance(pd, dict):
        raise ctx.error("problem.potential", "missing potential specification")
    kind = str(pd.get("kind", "")).lower()
    v_inf = ctx.get(pd, "V_inf", "problem.potential", required=False)
    v2 = None
    if kind == "constant":
        potential = ctx.get(pd, "alpha", "problem.potential")
        v_inf = potential if v_inf is None else v_inf
    elif kind == "well":
        v_inf = ctx.get(pd, "V_inf", "problem.potential")
        k = ctx.get(pd, "k", "problem.potential")
        amp = ctx.get(pd, "amplitude", "problem.potential", required=False, default=1.0)
        potential = well_potential(lat, v_inf, k, amp)
        v2 = (k, ctx.get(pd, "R", "problem.potential", required=False, default=1.0))
    elif kind == "tabulated":
        path = pd.get("path")
        if path is None:
            raise ctx.error("problem.potential.path", "missing required field")
        try:
            f = read_field(_resolve(base_dir, path))
        except (OSError, ValueError) as exc:
            raise ctx.error("problem.potential.path", str(exc)) from None
        if f.lattice != lat:
            raise ctx.error("problem.potential.path", f"potential lattice {f.lattice} does not match {lat}")
        potential = f.values
    else:
        raise ctx.error("problem.potential.kind", f"unknown potential kind {pd.get('kind')!r}; expected constant, well or tabulated")

    if isinstance(d.get("V2"), dict):
        v2 = (ctx.get(d["V2"], "k", "problem.V2"), ctx.get(d["V2"], "R", "problem.V2"))
    v0 = ctx.get(d, "V0", "problem", required=False)
    override = ctx.get(d, "override_hypotheses", "problem", bool, required=False, default=False)
    spec = ProblemSpec(lat, m, theta, potential, kernel, v0=v0, v_inf=v_inf, v2=v2, override_hypotheses=override)
    hyp = spec.check_hypotheses()
    if not hyp.accepted:
        msgs = hyp.messages + [m for m in hyp.w.messages if "exploratory" not in m and "vanish" not in m]
        field_path = "problem.theta" if not hyp.w.theta_admissible else "problem"
        raise ctx.error(field_path, "; ".join(msgs) + " (use --override-hypotheses to run anyway)")
    return spec


def build_solve_config(d, ctx: _Ctx | None = None, seed: int = 0, problem: ProblemSpec | None = None, base_dir=None) -> SolveConfig:
    ctx = ctx or _Ctx("<config>", {})
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    if not isinstance(d, dict):
        raise ctx.error("solve", "expected a mapping")
    kw = {}
    for key, typ in _SOLVE_KEYS.items():
        val = ctx.get(d, key, "solve", typ, required=False)
        if val is not None:
            kw[key] = val
    init = d.get("init", "gaussian")
    if init not in ("gaussian", "random"):
        try:
            f = read_field(_resolve(base_dir, init))
        except (OSError, ValueError) as exc:
            raise ctx.error("solve.init", f"expected gaussian, random or a PRHF path ({exc})") from None
        if problem is not None and f.lattice != problem.lattice:
            raise ctx.error("solve.init", "initial field lattice does not match the problem")
        init = f
    if "decay_window" in d and d["decay_window"] is not None:
        w = d["decay_window"]
        if not (isinstance(w, list) and len(w) == 2):
            raise ctx.error("solve.decay_window", "expected [r_min, r_max]")
        kw["decay_window"] = (float(w[0]), float(w[1]))
    unknown = set(d) - set(_SOLVE_KEYS) - {"init", "decay_window", "compare_to_limit"}
    if unknown:
        raise ctx.error(f"solve.{sorted(unknown)[0]}", "unknown solve option")
    try:
        return SolveConfig(init=init, seed=seed, **kw)
    except ValueError as exc:
        raise ctx.error("solve", str(exc)) from None
