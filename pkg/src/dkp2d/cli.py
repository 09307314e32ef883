"""Command-line interface.

Every subcommand builds a RunConfig and hands it to run(), which returns the
exit status and the rendered table.  Exit codes: 0 success, 1 domain error
(an error record is written to stderr as JSON), 2 usage error.
"""

from __future__ import annotations

import enum
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import click
import numpy as np

from . import __version__
from .algebra import beta_matrices, monomial_span_rank, verify_dkp_algebra
from .lieb import LiebError, LiebParams, band_structure, k_path, pi_even, pi_odd
from .spectrum import (Branch, OscillatorParams, QuantumNumbers, SpectrumError, candidate_levels,
                       grid_quantum_numbers, solve_spectrum, sweep)
from .states import (StateError, bound_state, charge_density_and_normalize, first_order_residuals,
                     radial_nodes, residual_second_order, sample_state, state_grid)
from .tables import SCHEMAS, to_csv, to_json


class Command(str, enum.Enum):
    ALGEBRA_VERIFY = "algebra verify"
    SPECTRUM_SOLVE = "spectrum solve"
    SPECTRUM_SWEEP = "spectrum sweep"
    STATE_EVAL = "state eval"
    STATE_CHECK = "state check"
    LIEB_BANDS = "lieb bands"
    LIEB_POLARIZATION = "lieb polarization"


REQUIRED = {
    Command.ALGEBRA_VERIFY: ("rep",),
    Command.SPECTRUM_SOLVE: ("mass", "omega", "omega_tilde", "l", "nr"),
    Command.SPECTRUM_SWEEP: ("mass", "omega", "omega_tilde", "l", "nr_max", "axis",
                             "range_min", "range_max", "steps"),
    Command.STATE_EVAL: ("mass", "omega", "omega_tilde", "l", "nr", "branch"),
    Command.STATE_CHECK: ("mass", "omega", "omega_tilde", "l", "nr", "branch"),
    Command.LIEB_BANDS: ("vf", "mass", "axis", "range_min", "range_max", "steps"),
    Command.LIEB_POLARIZATION: ("sign_m",),
}


class ConfigError(ValueError):
    code = "config_error"


@dataclass
class RunConfig:
    command: Command
    params: dict[str, Any] = field(default_factory=dict)
    output: str = "-"
    format: str = "csv"

    def validate(self) -> None:
        missing = [k for k in REQUIRED[self.command] if self.params.get(k) is None]
        if missing:
            raise ConfigError(f"{self.command.value}: missing {', '.join(missing)}")
        for k, v in self.params.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{k} must be finite")
        if self.command.value.split()[0] in ("spectrum", "state") and self.params["mass"] <= 0:
            raise ConfigError("mass must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")


@dataclass
class RunResult:
    status: int
    text: str
    schema: str | None = None
    extra: dict[str, str] = field(default_factory=dict)   # path -> text for side tables
    error: dict | None = None
    summary: str | None = None


def _oscillator(p: dict) -> OscillatorParams:
    return OscillatorParams(p["mass"], p["omega"], p["omega_tilde"])


def _algebra(p: dict):
    bs = beta_matrices(int(p["rep"]))
    rep = verify_dkp_algebra(bs)
    span = monomial_span_rank(bs, int(p.get("max_word_length") or 6))
    row = (bs.dim, rep.triples_checked, rep.max_deviation, len(rep.failing), span.rank,
           span.identity_in_span)
    return "algebra", [row], {}


def _solve(p: dict):
    params = _oscillator(p)
    q = QuantumNumbers(p["nr"], p["l"])
    tol = p.get("tol") or 1e-10
    levels = candidate_levels(params, q, tol) if p.get("include_rejected") else solve_spectrum(params, q, tol)
    rows = [(params.m, params.omega, params.omega_tilde, q.l, q.n_r, lv.E, lv.branch.value,
             lv.admissible, lv.residual, lv.alpha2_positive, lv.kappa2_positive, lv.not_pm_m,
             lv.window_ok) for lv in levels]
    return "levels", rows, {}


def _sweep(p: dict):
    qnums = grid_quantum_numbers(p["l"], int(p["nr_max"]))
    res = sweep(_oscillator(p), qnums, p["axis"], p["range_min"], p["range_max"], int(p["steps"]),
                tol=p.get("tol") or 1e-10, include_rejected=bool(p.get("include_rejected")))
    rows = [(r.axis_value, r.l, r.n_r, r.E, r.branch, r.admissible, r.residual) for r in res.rows]
    extra = {}
    if p.get("curves_output"):
        curve_rows = [(c.axis_value, c.l, c.eps_plus, c.eps_minus) for c in res.curves]
        extra[p["curves_output"]] = ("curves", curve_rows)
    return "spectrum", rows, extra


def _state(p: dict):
    st = bound_state(_oscillator(p), QuantumNumbers(p["nr"], p["l"]), p["branch"])
    if p.get("normalize", True):
        st = charge_density_and_normalize(st).state
    grid = state_grid(st, int(p.get("r_points") or 50), int(p.get("phi_points") or 8),
                      kind="uniform", r_max=p.get("r_max"))
    cols = sample_state(st, grid)
    names = SCHEMAS["state"].names
    rows = list(zip(*(cols[n] for n in names)))
    return "state", rows, {}


def _state_check(p: dict):
    st = bound_state(_oscillator(p), QuantumNumbers(p["nr"], p["l"]), p["branch"])
    charge = charge_density_and_normalize(st)
    st = charge.state
    n = int(p.get("r_points") or 2000)
    second = residual_second_order(st, radial_nodes(st, n))
    first = first_order_residuals(st, state_grid(st, 250, 8))
    renorm = charge_density_and_normalize(st)
    rows = [
        ("energy", st.E, math.nan, True),
        ("alpha", st.alpha, math.nan, True),
        ("kappa2", st.kappa2, math.nan, True),
        ("kummer_a_plus_nr", st.kummer_a + st.qnums.n_r, 1e-9, abs(st.kummer_a + st.qnums.n_r) <= 1e-9),
        ("second_order_residual", second, 1e-6, second <= 1e-6),
        ("first_order_eq1", first.eq1, 1e-8, first.eq1 <= 1e-8),
        ("first_order_eq2", first.eq2, 1e-8, first.eq2 <= 1e-8),
        ("first_order_eq3", first.eq3, 1e-8, first.eq3 <= 1e-8),
        ("norm", st.norm, math.nan, True),
        ("charge_after_normalize", renorm.total, 1e-8, abs(abs(renorm.total) - 1) <= 1e-8),
        ("charge_sign_matches_branch", float(charge.sign_matches_branch), math.nan,
         charge.sign_matches_branch),
        ("charge_ratio_six_to_three", charge.ratio_to_three, math.nan, True),
    ]
    return "check", rows, {}


def _bands(p: dict):
    lp = LiebParams(p["vf"], p["mass"])
    pts = k_path(p["axis"], p["range_min"], p["range_max"], int(p["steps"]))
    rows = [tuple(r) for r in band_structure(pts, lp)]
    rows.sort(key=lambda r: (r[0], r[1]))
    return "bands", rows, {}


def _polarization(p: dict):
    sign_m = int(p["sign_m"])
    if p.get("ptilde2_over_m2") is not None:
        values = [float(p["ptilde2_over_m2"])]
    elif None not in (p.get("range_min"), p.get("range_max"), p.get("steps")):
        values = np.linspace(p["range_min"], p["range_max"], int(p["steps"]))
    else:
        raise ConfigError("give --ptilde2-over-m2 or a --range-min/--range-max/--steps scan")
    rows = [(s, pi_even(s), pi_odd(s, sign_m)) for s in sorted(float(v) for v in values)]
    return "polarization", rows, {}


HANDLERS = {
    Command.ALGEBRA_VERIFY: _algebra,
    Command.SPECTRUM_SOLVE: _solve,
    Command.SPECTRUM_SWEEP: _sweep,
    Command.STATE_EVAL: _state,
    Command.STATE_CHECK: _state_check,
    Command.LIEB_BANDS: _bands,
    Command.LIEB_POLARIZATION: _polarization,
}

DOMAIN_ERRORS = (SpectrumError, StateError, LiebError)


def _render(schema_name: str, rows, config: RunConfig) -> str:
    schema = SCHEMAS[schema_name]
    if config.format == "json":
        meta = {"tool": "dkp2d", "version": __version__, "command": config.command.value,
                "config": {k: v for k, v in sorted(config.params.items()) if v is not None}}
        return to_json(schema, rows, meta)
    return to_csv(schema, rows)


def run(config: RunConfig) -> RunResult:
    """Validate, dispatch and render; never raises for domain errors."""
    try:
        config.validate()
        schema_name, rows, extra = HANDLERS[config.command](config.params)
    except ConfigError as exc:
        return RunResult(2, "", error={"error": exc.code, "message": str(exc)})
    except DOMAIN_ERRORS as exc:
        return RunResult(1, "", error={"error": getattr(exc, "code", "domain_error"), "message": str(exc)})
    except ValueError as exc:
        return RunResult(1, "", error={"error": "invalid_value", "message": str(exc)})
    rendered_extra = {path: _render(name, r, config) for path, (name, r) in extra.items()}
    summary = None
    if schema_name == "algebra":
        summary = f"max_deviation = {rows[0][2]:g}; triples_checked = {rows[0][1]}"
    return RunResult(0, _render(schema_name, rows, config), schema_name, rendered_extra,
                     summary=summary)


def _emit(result: RunResult, output: str) -> None:
    if result.error is not None:
        click.echo(json.dumps(result.error, sort_keys=True), err=True)
        sys.exit(result.status)
    if output in (None, "-"):
        click.echo(result.text, nl=False)
    else:
        with open(output, "w", newline="") as fh:
            fh.write(result.text)
    for path, text in result.extra.items():
        with open(path, "w", newline="") as fh:
            fh.write(text)
    if result.summary:
        click.echo(result.summary, err=True)


def _execute(command: Command, fmt: str, output: str, **params) -> None:
    _emit(run(RunConfig(command, params, output, fmt)), output)


# --- click surface -----------------------------------------------------------

def _common(fn):
    fn = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                      show_default=True, help="Output format.")(fn)
    fn = click.option("--output", default="-", show_default=True,
                      help="Output path, '-' for stdout.")(fn)
    return fn


def _oscillator_opts(fn):
    fn = click.option("--omega-tilde", type=float, default=0.0, show_default=True,
                      help="Cyclotron-like frequency qB/(2m).")(fn)
    fn = click.option("--omega", type=float, default=0.0, show_default=True,
                      help="Oscillator frequency.")(fn)
    fn = click.option("--mass", type=float, required=True, help="Rest mass m > 0.")(fn)
    return fn


def _state_opts(fn):
    fn = click.option("--branch", type=click.Choice([b.value for b in Branch]),
                      default=Branch.PARTICLE.value, show_default=True)(fn)
    fn = click.option("--nr", type=click.IntRange(min=0), required=True, help="Radial quantum number.")(fn)
    fn = click.option("--l", "l", type=int, required=True, help="Angular momentum.")(fn)
    return _oscillator_opts(fn)


@click.group()
@click.version_option(__version__, prog_name="dkp2d")
def main():
    """Spin-1 DKP oscillator in (2+1) dimensions: algebra, spectra, states, Lieb lattice."""


@main.group()
def algebra():
    """Beta-matrix algebra checks."""


@algebra.command("verify")
@click.option("--rep", type=click.Choice(["3", "6"]), required=True, help="Representation dimension.")
@click.option("--max-word-length", type=click.IntRange(min=1), default=6, show_default=True)
@_common
def algebra_verify(rep, max_word_length, fmt, output):
    """Check the trilinear algebra over all 27 index triples."""
    _execute(Command.ALGEBRA_VERIFY, fmt, output, rep=int(rep), max_word_length=max_word_length)


@main.group()
def spectrum():
    """Bound-state energies."""


@spectrum.command("solve")
@click.option("--l", "l", type=int, required=True, help="Angular momentum.")
@click.option("--nr", type=click.IntRange(min=0), required=True, help="Radial quantum number.")
@_oscillator_opts
@click.option("--tol", type=float, default=1e-10, show_default=True, help="Residual tolerance.")
@click.option("--include-rejected", is_flag=True, help="Also list rejected quartic roots.")
@_common
def spectrum_solve(l, nr, mass, omega, omega_tilde, tol, include_rejected, fmt, output):
    """Admissible energies for one (n_r, l)."""
    _execute(Command.SPECTRUM_SOLVE, fmt, output, mass=mass, omega=omega, omega_tilde=omega_tilde,
             l=l, nr=nr, tol=tol, include_rejected=include_rejected)


@spectrum.command("sweep")
@_oscillator_opts
@click.option("--l", "l", type=int, multiple=True, default=(0,), show_default=True,
              help="Angular momentum (repeatable).")
@click.option("--nr-max", type=click.IntRange(min=0), default=3, show_default=True)
@click.option("--axis", type=click.Choice(["omega", "omega_tilde"]), required=True)
@click.option("--range-min", type=float, required=True)
@click.option("--range-max", type=float, required=True)
@click.option("--steps", type=click.IntRange(min=2), default=200, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.option("--include-rejected", is_flag=True, help="Also emit rejected quartic roots.")
@click.option("--curves-output", default=None, help="Write the eps+/eps- constraint curves here.")
@_common
def spectrum_sweep(mass, omega, omega_tilde, l, nr_max, axis, range_min, range_max, steps, tol,
                   include_rejected, curves_output, fmt, output):
    """Energies along omega or omega_tilde (plot-ready data)."""
    _execute(Command.SPECTRUM_SWEEP, fmt, output, mass=mass, omega=omega, omega_tilde=omega_tilde,
             l=list(l), nr_max=nr_max, axis=axis, range_min=range_min, range_max=range_max,
             steps=steps, tol=tol, include_rejected=include_rejected, curves_output=curves_output)


@main.group()
def state():
    """Bound-state spinors."""


@state.command("eval")
@_state_opts
@click.option("--r-points", type=click.IntRange(min=2), default=50, show_default=True)
@click.option("--phi-points", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--r-max", type=float, default=None, help="Outer radius (default: past the last lobe).")
@click.option("--normalize/--no-normalize", default=True, show_default=True)
@_common
def state_eval(mass, omega, omega_tilde, l, nr, branch, r_points, phi_points, r_max, normalize, fmt, output):
    """Sample Phi1..Phi3 and J0 on a polar grid."""
    _execute(Command.STATE_EVAL, fmt, output, mass=mass, omega=omega, omega_tilde=omega_tilde, l=l,
             nr=nr, branch=branch, r_points=r_points, phi_points=phi_points, r_max=r_max,
             normalize=normalize)


@state.command("check")
@_state_opts
@click.option("--r-points", type=click.IntRange(min=9), default=2000, show_default=True)
@_common
def state_check(mass, omega, omega_tilde, l, nr, branch, r_points, fmt, output):
    """Equation-of-motion residuals and normalization."""
    _execute(Command.STATE_CHECK, fmt, output, mass=mass, omega=omega, omega_tilde=omega_tilde, l=l,
             nr=nr, branch=branch, r_points=r_points)


@main.group()
def lieb():
    """Lieb-lattice bands and polarization."""


@lieb.command("bands")
@click.option("--vf", type=float, default=1.0, show_default=True, help="Fermi velocity.")
@click.option("--mass", type=float, default=1.0, show_default=True, help="Bandgap m.")
@click.option("--axis", type=click.Choice(["k1", "k2", "diagonal"]), default="k1", show_default=True)
@click.option("--range-min", type=float, default=-2.0, show_default=True)
@click.option("--range-max", type=float, default=2.0, show_default=True)
@click.option("--steps", type=click.IntRange(min=2), default=101, show_default=True)
@_common
def lieb_bands(vf, mass, axis, range_min, range_max, steps, fmt, output):
    """Three-band dispersion along a line in k-space."""
    _execute(Command.LIEB_BANDS, fmt, output, vf=vf, mass=mass, axis=axis, range_min=range_min,
             range_max=range_max, steps=steps)


@lieb.command("polarization")
@click.option("--ptilde2-over-m2", type=float, default=None, help="Single evaluation point.")
@click.option("--sign-m", type=click.Choice(["1", "-1"]), default="1", show_default=True)
@click.option("--range-min", type=float, default=None)
@click.option("--range-max", type=float, default=None)
@click.option("--steps", type=click.IntRange(min=2), default=None)
@_common
def lieb_polarization(ptilde2_over_m2, sign_m, range_min, range_max, steps, fmt, output):
    """Even/odd polarization scalars."""
    _execute(Command.LIEB_POLARIZATION, fmt, output, ptilde2_over_m2=ptilde2_over_m2,
             sign_m=int(sign_m), range_min=range_min, range_max=range_max, steps=steps)


if __name__ == "__main__":
    main()
