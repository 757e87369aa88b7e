"""Ground states by Nehari-projected, preconditioned gradient descent.

Each iteration takes ``w = u - eta * P grad I(u)`` with ``P`` the inverse of
``sqrt(-Delta+m^2) + c``, replaces ``w`` by ``|w|`` when positivity is
enforced, and rescales ``w`` onto the Nehari manifold.  ``eta`` is chosen by
Armijo backtracking on the energy of the projected iterate.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics, spectral
from .functional import (
    HypothesisError,
    ProblemSpec,
    RayCoefficients,
    _odd_power,
    _power,
    energy,
    gradient,
    ray_coefficients,
)
from .lattice import Field, irfft, rfft

__all__ = [
    "SolveConfig",
    "SolveReport",
    "SolveError",
    "NonConvergence",
    "DegenerateInit",
    "LineSearchStall",
    "initial_field",
    "solve_ground_state",
    "sweep",
]

log = logging.getLogger(__name__)

MIN_STEP = 1e-14


class SolveError(RuntimeError):
    report = None


class NonConvergence(SolveError):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


class LineSearchStall(SolveError):
    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


class DegenerateInit(SolveError):
    pass


@dataclass
class SolveConfig:
    max_iters: int = 2000
    grad_tol: float = 1e-7
    nehari_tol: float = 1e-10
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    precondition_shift: float = 1.0
    enforce_positivity: bool = False
    init: str | Field = "gaussian"
    init_width: float | None = None
    seed: int = 0
    decay_window: tuple | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not (self.grad_tol > 0 and self.nehari_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not self.precondition_shift >= 0:
            raise ValueError("precondition_shift must be >= 0")
        if not self.step_init > 0:
            raise ValueError("step_init must be positive")
        if isinstance(self.init, str) and self.init not in ("gaussian", "random"):
            raise ValueError(f"init must be 'gaussian', 'random' or a Field, got {self.init!r}")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "init"}
        d["init"] = self.init if isinstance(self.init, str) else "custom"
        d["decay_window"] = list(self.decay_window) if self.decay_window else None
        return d


@dataclass
class SolveReport:
    field: Field
    energy: float
    grad_residual: float
    nehari_residual: float
    iterations: int
    trace: list
    status: str
    spec: ProblemSpec
    config: SolveConfig
    center_of_mass: np.ndarray
    min_value: float
    symmetry_deviation: float
    decay: diagnostics.DecayFit | None
    decay_error: str | None = None
    hypotheses: dict = field(default_factory=dict)
    limit_level_E_inf: float | None = None
    comparison_margin: float | None = None
    elapsed: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def seed(self) -> int:
        return self.config.seed

    def to_dict(self, field_path: str | None = None) -> dict:
        lat = self.spec.lattice
        return {
            "status": self.status,
            "converged": self.converged,
            "energy": self.energy,
            "grad_residual": self.grad_residual,
            "nehari_residual": self.nehari_residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "trace": [list(t) for t in self.trace],
            "limit_level_E_inf": self.limit_level_E_inf,
            "comparison_margin": self.comparison_margin,
            "field_path": field_path,
            "diagnostics": {
                "min_value": self.min_value,
                "max_value": self.field.max(),
                "symmetry_deviation": self.symmetry_deviation,
                "center_of_mass": [float(c) for c in self.center_of_mass],
                "decay": self.decay.to_dict() if self.decay else None,
                "decay_error": self.decay_error,
                "dimension_flag": None if lat.dim >= 3 else f"N = {lat.dim} < 3: outside the N >= 3 theory; results are exploratory",
                "newton_zero_mode": (
                    "Newton kernel uses a zero k = 0 multiplier (mean-zero convention)"
                    if self.spec.kernel.kind == "newton"
                    else None
                ),
            },
            "hypotheses": self.hypotheses,
            "problem": self.spec.to_dict(),
            "solve": self.config.to_dict(),
            "elapsed_seconds": self.elapsed,
        }


class _Eval:
    """Everything needed to score and, if accepted, continue from a field ``w``."""

    __slots__ = ("w", "tw", "p", "conv", "coeffs")

    def __init__(self, spec: ProblemSpec, w: np.ndarray, rho: np.ndarray, kern: np.ndarray):
        lat = spec.lattice
        h = lat.cell_volume
        self.w = w
        self.tw = irfft(rho * rfft(w, lat), lat)
        self.p = _power(w, spec.theta)
        self.conv = irfft(kern * rfft(self.p, lat), lat)
        if spec.is_constant_potential:
            pot = spec.potential * float(np.vdot(w, w))
        else:
            pot = float(np.sum(spec.potential * w * w))
        A = h * (float(np.vdot(w, self.tw)) + pot)
        B = h * float(np.vdot(self.conv, self.p))
        self.coeffs = RayCoefficients(A, B)

    def scale(self, theta: float) -> float:
        c = self.coeffs
        return (c.A / c.B) ** (1.0 / (2 * theta - 2))

    def projected_energy(self, theta: float) -> float:
        t = self.scale(theta)
        return (theta - 1) / (2 * theta) * self.coeffs.A * t * t


def initial_field(spec: ProblemSpec, config: SolveConfig) -> Field:
    lat = spec.lattice
    if isinstance(config.init, Field):
        if config.init.lattice != lat:
            raise ValueError("custom initial field lives on a different lattice")
        return config.init.copy()
    width = config.init_width or lat.extent / 8
    if config.init == "gaussian":
        return Field(lat, np.exp(-0.5 * (lat.radius / width) ** 2))
    rng = np.random.default_rng(config.seed)
    noise = rng.standard_normal(lat.shape)
    smooth = irfft(rfft(noise, lat) * np.exp(-0.5 * lat.k_squared_half * width**2), lat)
    return Field(lat, np.abs(smooth) if config.enforce_positivity else smooth)


def _build_report(spec, config, u, status, iterations, trace, hyp, t0) -> SolveReport:
    lat = spec.lattice
    e = energy(spec, u)
    g = gradient(spec, u).values
    tu = spectral.apply_sqrt_op(u, spec.m)
    gres = float(np.linalg.norm(g) / np.linalg.norm(tu.values))
    c = ray_coefficients(spec, u)
    nres = abs(c.A - c.B) / max(abs(c.A), abs(c.B))
    com = diagnostics.center_of_mass(u)
    alpha = spec.alpha if spec.is_constant_potential else spec.v_inf
    window = config.decay_window or (2.0, lat.extent / 4)
    decay, decay_err = None, None
    try:
        decay = diagnostics.fit_decay_rate(u, window, diagnostics.reference_decay_rate(spec.m, alpha), center=com)
    except ValueError as exc:
        decay_err = str(exc)
    try:
        sym = diagnostics.symmetry_deviation(u)
    except ValueError:
        sym = float("nan")
    return SolveReport(
        field=u,
        energy=e,
        grad_residual=gres,
        nehari_residual=float(nres),
        iterations=iterations,
        trace=trace,
        status=status,
        spec=spec,
        config=config,
        center_of_mass=com,
        min_value=u.min(),
        symmetry_deviation=sym,
        decay=decay,
        decay_error=decay_err,
        hypotheses=hyp,
        elapsed=time.perf_counter() - t0,
    )


def solve_ground_state(spec: ProblemSpec, config: SolveConfig | None = None) -> SolveReport:
    """Find a positive critical point of the energy at the Nehari level.

    Raises :class:`HypothesisError` if the problem violates the standing
    assumptions without ``spec.override_hypotheses``, :class:`DegenerateInit`
    if the initial field has a nonpositive Hartree term,
    :class:`LineSearchStall` if no Armijo step above ``1e-14`` exists and
    :class:`NonConvergence` after ``max_iters`` (both carry the best report).
    """
    config = config or SolveConfig()
    t0 = time.perf_counter()
    hyp = spec.check_hypotheses()
    if not hyp.accepted:
        raise HypothesisError("; ".join(hyp.messages + hyp.w.messages))

    lat = spec.lattice
    h = lat.cell_volume
    theta = spec.theta
    rho = spectral.multiplier(lat, spec.m, half=True)
    kern = spec.kernel.multiplier(lat, half=True)
    pre = 1.0 / (rho + config.precondition_shift)
    pot = spec.potential

    u0 = initial_field(spec, config).values
    if config.enforce_positivity:
        u0 = np.abs(u0)
    if not np.any(u0):
        raise DegenerateInit("initial field is zero")
    ev = _Eval(spec, u0, rho, kern)
    if not ev.coeffs.B > 0:
        raise DegenerateInit(f"Hartree term of the initial field is {ev.coeffs.B:.3e}")

    def accept(ev):
        t = ev.scale(theta)
        u = t * ev.w
        tu = t * ev.tw
        conv = t**theta * ev.conv
        g = tu + pot * u - conv * _odd_power(u, theta)
        c = ev.coeffs
        e = 0.5 * c.A * t * t - c.B * t ** (2 * theta) / (2 * theta)
        return u, g, tu, e

    u, g, tu, e = accept(ev)
    trace = []
    status = "max_iters"
    it = 0
    rel_eps = 64 * np.finfo(float).eps
    while True:
        gres = float(np.linalg.norm(g) / np.linalg.norm(tu))
        trace.append((it, float(e), gres))
        if gres <= config.grad_tol:
            status = "converged"
            break
        if it >= config.max_iters:
            break
        d = irfft(pre * rfft(g, lat), lat)
        slope = h * float(np.vdot(g, d))
        eta = config.step_init
        while True:
            w = u - eta * d
            if config.enforce_positivity:
                w = np.abs(w)
            trial = _Eval(spec, w, rho, kern) if np.any(w) else None
            if trial is not None and trial.coeffs.B > 0:
                e_new = trial.projected_energy(theta)
                if e_new <= e - config.armijo_c * eta * slope + rel_eps * abs(e):
                    break
            eta *= config.backtrack_factor
            if eta < MIN_STEP:
                report = _build_report(spec, config, Field(lat, u), "line_search_stall", it, trace, hyp.to_dict(), t0)
                raise LineSearchStall(f"no Armijo step above {MIN_STEP:g} at iteration {it}", report)
        u, g, tu, e = accept(trial)
        it += 1

    report = _build_report(spec, config, Field(lat, u), status, it, trace, hyp.to_dict(), t0)
    if status != "converged":
        raise NonConvergence(f"not converged after {config.max_iters} iterations (grad residual {gres:.3e})", report)
    if report.nehari_residual > config.nehari_tol:
        report.status = "nehari_residual"
        raise NonConvergence(f"Nehari residual {report.nehari_residual:.3e} above tolerance", report)
    log.info("converged in %d iterations, I = %.12g", it, report.energy)
    return report


def _solve_entry(args):
    spec, config = args
    try:
        return solve_ground_state(spec, config)
    except (SolveError, HypothesisError, ValueError) as exc:
        return exc


def sweep(specs, config: SolveConfig | None = None, workers: int = 1) -> list:
    """Solve each spec; entries are ``SolveReport`` or the exception raised for that spec.

    Order follows ``specs``.  Solves are independent, so serial and parallel
    runs give identical results.
    """
    specs = list(specs)
    if not specs:
        raise ValueError("sweep needs at least one problem")
    config = config or SolveConfig()
    jobs = [(s, config) for s in specs]
    if workers <= 1 or len(specs) == 1:
        return [_solve_entry(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_entry, jobs))
