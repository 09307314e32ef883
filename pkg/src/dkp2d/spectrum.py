"""Bound-state energies of the spin-1 DKP oscillator in a uniform magnetic field.

Natural units (hbar = c = 1).  Energies solve

    2 sqrt(alpha2(E)) (2 n_r + 1 + |l|) = 2 w (E l + m) + 2 wt (E + m l) + E^2 - m^2

with alpha2(E) = m^2 (w^2 + wt^2) + 2 E m w wt, w the oscillator frequency and
wt = qB/(2m) the cyclotron-like frequency.  The right-hand side equals the
radial parameter kappa^2.  Squaring gives a quartic whose real roots are then
filtered against the validity constraints.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .roots import cluster, newton_polish, polynomial_roots, real_candidates

DEFAULT_TOL = 1e-10
MASS_WINDOW = 1e-9  # relative width of the excluded E = +-m neighbourhood


class SpectrumError(ValueError):
    code = "spectrum_error"


class NonPositiveAlpha2(SpectrumError):
    code = "non_positive_alpha2"


class DegenerateProblem(SpectrumError):
    code = "degenerate_problem"


class Branch(str, enum.Enum):
    PARTICLE = "particle"
    ANTIPARTICLE = "antiparticle"

    @classmethod
    def of(cls, energy: float) -> "Branch":
        return cls.PARTICLE if energy > 0 else cls.ANTIPARTICLE

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PARTICLE else -1


def _sgn(x: float) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class OscillatorParams:
    m: float
    omega: float = 0.0
    omega_tilde: float = 0.0
    charge: float | None = None
    field: float | None = None

    def __post_init__(self):
        for name in ("m", "omega", "omega_tilde"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.m <= 0:
            raise ValueError("mass must be positive")
        if (self.charge is None) != (self.field is None):
            raise ValueError("charge and field must be given together")
        if self.charge is not None:
            expected = self.charge * self.field / (2 * self.m)
            if not math.isclose(self.omega_tilde, expected, rel_tol=1e-15, abs_tol=1e-300):
                raise ValueError(f"omega_tilde={self.omega_tilde} != qB/(2m)={expected}")

    @classmethod
    def from_field(cls, m: float, omega: float, charge: float, field: float) -> "OscillatorParams":
        return cls(m, omega, charge * field / (2 * m), charge, field)

    def replace(self, **changes) -> "OscillatorParams":
        data = dict(m=self.m, omega=self.omega, omega_tilde=self.omega_tilde)
        data.update(changes)
        return OscillatorParams(**data)

    @property
    def degenerate(self) -> bool:
        return self.omega == 0 and self.omega_tilde == 0


@dataclass(frozen=True, order=True)
class QuantumNumbers:
    n_r: int
    l: int

    def __post_init__(self):
        if int(self.n_r) != self.n_r or int(self.l) != self.l:
            raise ValueError("quantum numbers must be integers")
        if self.n_r < 0:
            raise ValueError("n_r must be non-negative")
        object.__setattr__(self, "n_r", int(self.n_r))
        object.__setattr__(self, "l", int(self.l))

    @property
    def principal(self) -> int:
        """2 n_r + 1 + |l|."""
        return 2 * self.n_r + 1 + abs(self.l)


@dataclass(frozen=True)
class SpectralCoefficients:
    alpha2: float
    beta_c: float
    gamma_c: float
    kappa2: float

    @classmethod
    def at(cls, energy: float, p: OscillatorParams, l: int) -> "SpectralCoefficients":
        m, w, wt = p.m, p.omega, p.omega_tilde
        beta_c = energy * wt + m * w
        gamma_c = energy * w + m * wt
        return cls(alpha2(energy, p), beta_c, gamma_c,
                   2 * beta_c + energy ** 2 - m ** 2 + 2 * l * gamma_c)


def alpha2(energy: float, p: OscillatorParams) -> float:
    m, w, wt = p.m, p.omega, p.omega_tilde
    return m * m * (w * w + wt * wt) + 2 * energy * m * w * wt


def kappa2(energy: float, p: OscillatorParams, l: int) -> float:
    """Right-hand side of the quantization condition (equals kappa^2)."""
    m, w, wt = p.m, p.omega, p.omega_tilde
    return 2 * w * (energy * l + m) + 2 * wt * (energy + m * l) + energy ** 2 - m ** 2


def quantization_residual(energy: float, p: OscillatorParams, q: QuantumNumbers) -> float:
    a2 = alpha2(energy, p)
    if not a2 > 0:
        raise NonPositiveAlpha2(f"alpha^2({energy}) = {a2} <= 0")
    return 2 * math.sqrt(a2) * q.principal - kappa2(energy, p, q.l)


# --- constraint window -------------------------------------------------------

@dataclass(frozen=True)
class AllowedEnergySet:
    """{E : alpha2 > 0} n {E > eps+ or E < eps-} n {E != +-m}.

    eps_plus/eps_minus are None when mu^2 + m^2 - nu < 0 (kappa^2 > 0 for all E).
    The alpha^2 half-line is E > alpha2_bound when alpha2_side is +1, E <
    alpha2_bound when -1, and unrestricted when 0.
    """

    m: float
    mu: float
    nu: float
    discriminant: float
    eps_plus: float | None
    eps_minus: float | None
    alpha2_side: int
    alpha2_bound: float | None

    @property
    def unrestricted_kappa(self) -> bool:
        return self.eps_plus is None

    def kappa_ok(self, energy: float) -> bool:
        if self.unrestricted_kappa:
            return True
        return energy > self.eps_plus or energy < self.eps_minus

    def alpha_ok(self, energy: float) -> bool:
        if self.alpha2_side == 0:
            return True
        if self.alpha2_side > 0:
            return energy > self.alpha2_bound
        return energy < self.alpha2_bound

    def mass_ok(self, energy: float, rel: float = MASS_WINDOW) -> bool:
        return abs(energy - self.m) > rel * self.m and abs(energy + self.m) > rel * self.m

    def contains(self, energy: float) -> bool:
        return self.kappa_ok(energy) and self.alpha_ok(energy) and self.mass_ok(energy)


def constraint_window(p: OscillatorParams, l: int) -> AllowedEnergySet:
    m, w, wt = p.m, p.omega, p.omega_tilde
    mu = w * l + wt
    nu = 2 * m * (wt * l + w)
    disc = mu * mu + m * m - nu
    if disc >= 0:
        root = math.sqrt(disc)
        eps_plus, eps_minus = -mu + root, -mu - root
    else:
        eps_plus = eps_minus = None
    prod = w * wt
    if prod == 0:
        side, bound = 0, None
    else:
        side, bound = _sgn(prod), -m * (w * w + wt * wt) / (2 * prod)
    return AllowedEnergySet(m, mu, nu, disc, eps_plus, eps_minus, side, bound)


# --- levels ------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyLevel:
    E: float
    branch: Branch
    residual: float
    alpha2_positive: bool
    kappa2_positive: bool
    not_pm_m: bool
    window_ok: bool
    tol: float = DEFAULT_TOL

    @property
    def flags(self) -> dict[str, bool]:
        return dict(alpha2_positive=self.alpha2_positive, kappa2_positive=self.kappa2_positive,
                    not_pm_m=self.not_pm_m, window_ok=self.window_ok)

    @property
    def admissible(self) -> bool:
        return all(self.flags.values()) and self.residual <= self.tol


def classify(energy: float, p: OscillatorParams, q: QuantumNumbers,
             tol: float = DEFAULT_TOL) -> EnergyLevel:
    """Evaluate every validity flag of a candidate energy."""
    win = constraint_window(p, q.l)
    a2 = alpha2(energy, p)
    k2 = kappa2(energy, p, q.l)
    residual = abs(quantization_residual(energy, p, q)) if a2 > 0 else math.inf
    return EnergyLevel(
        E=float(energy),
        branch=Branch.of(energy),
        residual=residual,
        alpha2_positive=a2 > 0,
        kappa2_positive=k2 > 0,
        not_pm_m=win.mass_ok(energy),
        window_ok=win.kappa_ok(energy) and win.alpha_ok(energy),
        tol=tol,
    )


def quartic_coefficients(p: OscillatorParams, q: QuantumNumbers) -> np.ndarray:
    """Coefficients (highest first) of kappa2(E)^2 - 4 N^2 alpha2(E)."""
    m, w, wt, l = p.m, p.omega, p.omega_tilde, q.l
    n2 = q.principal ** 2
    rhs = np.polynomial.Polynomial([2 * w * m + 2 * wt * m * l - m * m, 2 * w * l + 2 * wt, 1.0])
    a2 = np.polynomial.Polynomial([m * m * (w * w + wt * wt), 2 * m * w * wt])
    quartic = rhs ** 2 - 4 * n2 * a2
    return quartic.coef[::-1].copy()


def _polish(e0: float, p: OscillatorParams, q: QuantumNumbers) -> float:
    """Newton on the branch of the unsquared condition the root actually satisfies."""
    if not alpha2(e0, p) > 0:
        return e0
    sign = 1.0 if kappa2(e0, p, q.l) >= 0 else -1.0
    n = q.principal
    m, w, wt, l = p.m, p.omega, p.omega_tilde, q.l

    def f(e):
        a2 = alpha2(e, p)
        if not a2 > 0:
            raise ValueError
        return 2 * n * math.sqrt(a2) - sign * kappa2(e, p, l)

    def df(e):
        a2 = alpha2(e, p)
        da2 = 2 * m * w * wt
        dk = 2 * w * l + 2 * wt + 2 * e
        return n * da2 / math.sqrt(a2) - sign * dk

    return newton_polish(f, df, e0)


def candidate_levels(p: OscillatorParams, q: QuantumNumbers,
                     tol: float = DEFAULT_TOL) -> list[EnergyLevel]:
    """Every real root of the squared condition, classified (admissible or not)."""
    if p.degenerate:
        raise DegenerateProblem("omega = omega_tilde = 0: no confining interaction")
    raw = real_candidates(polynomial_roots(quartic_coefficients(p, q)))
    levels = [classify(_polish(e, p, q), p, q, tol) for e in raw]
    levels.sort(key=lambda lv: lv.E)
    merged: list[EnergyLevel] = []
    for lv in levels:
        if merged and abs(lv.E - merged[-1].E) <= 1e-8 * max(1.0, abs(lv.E)):
            if lv.residual < merged[-1].residual:
                merged[-1] = lv
            continue
        merged.append(lv)
    return merged


def solve_spectrum(p: OscillatorParams, q: QuantumNumbers,
                   tol: float = DEFAULT_TOL) -> list[EnergyLevel]:
    """Admissible energies for (n_r, l), ascending."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return [lv for lv in candidate_levels(p, q, tol) if lv.admissible]


# --- closed forms ------------------------------------------------------------

def closed_form_dkpo(p: OscillatorParams, q: QuantumNumbers,
                     tol: float = DEFAULT_TOL) -> tuple[EnergyLevel, EnergyLevel]:
    """Pure oscillator (omega_tilde = 0): (E+, E-) with flags."""
    if p.omega == 0 or p.omega_tilde != 0:
        raise ValueError("closed_form_dkpo needs omega != 0 and omega_tilde = 0")
    m, w, l, n = p.m, p.omega, q.l, q.n_r
    root = math.sqrt((abs(w * l) + m) ** 2 + 2 * m * abs(w) * (2 * n + 1 - _sgn(w)))
    return classify(-w * l + root, p, q, tol), classify(-w * l - root, p, q, tol)


def closed_form_magnetic(p: OscillatorParams, q: QuantumNumbers,
                         tol: float = DEFAULT_TOL) -> tuple[EnergyLevel, EnergyLevel]:
    """Pure magnetic field (omega = 0): (E+, E-) with flags."""
    if p.omega_tilde == 0 or p.omega != 0:
        raise ValueError("closed_form_magnetic needs omega_tilde != 0 and omega = 0")
    m, wt, l, n = p.m, p.omega_tilde, q.l, q.n_r
    bracket = 2 * n + abs(l) * (1 - _sgn(wt) * _sgn(l))
    root = math.sqrt((abs(wt) + m) ** 2 + 2 * m * abs(wt) * bracket)
    return classify(-wt + root, p, q, tol), classify(-wt - root, p, q, tol)


def _raw_pair(case: str, m: float, freq: float, n: int, l: int) -> tuple[float, float]:
    if case == "dkpo":
        lv = closed_form_dkpo(OscillatorParams(m, omega=freq), QuantumNumbers(n, l))
    else:
        lv = closed_form_magnetic(OscillatorParams(m, omega_tilde=freq), QuantumNumbers(n, l))
    return lv[0].E, lv[1].E


def _symmetry(case: str, m: float, freq_abs: float, n_minus: int, l: int,
              n_plus: int | None, shift: float, tol: float) -> bool:
    freq_abs = abs(freq_abs)
    if n_plus is None:
        n_plus = n_minus + (1 if case == "dkpo" else l)
    if n_plus < 0 or n_minus < 0:
        return False
    e_pos = _raw_pair(case, m, freq_abs, n_plus, l)
    e_neg = _raw_pair(case, m, -freq_abs, n_minus, l)
    return all(abs(abs(a + shift) - abs(b - shift)) <= tol * max(1.0, abs(a), abs(b))
               for a, b in zip(e_pos, e_neg))


def symmetry_check_dkpo(m: float, omega_abs: float, n_minus: int, l: int,
                        n_plus: int | None = None, tol: float = 1e-10) -> bool:
    """|E+ + |w| l| = |E- - |w| l| between w > 0 (n_plus) and w < 0 (n_minus).

    n_plus defaults to n_minus + 1, the only offset for which it holds.
    """
    return _symmetry("dkpo", m, omega_abs, n_minus, l, n_plus, abs(omega_abs) * l, tol)


def symmetry_check_magnetic(m: float, omega_tilde_abs: float, n_minus: int, l: int,
                            n_plus: int | None = None, tol: float = 1e-10) -> bool:
    """|E+ + |wt|| = |E- - |wt|| between wt > 0 (n_plus) and wt < 0 (n_minus).

    n_plus defaults to n_minus + l.
    """
    return _symmetry("magnetic", m, omega_tilde_abs, n_minus, l, n_plus, abs(omega_tilde_abs), tol)


# --- non-relativistic limit --------------------------------------------------

def _case_frequency(p: OscillatorParams, case: str) -> float:
    if case == "dkpo":
        if p.omega_tilde != 0:
            raise ValueError("dkpo limit needs omega_tilde = 0")
        return p.omega
    if case == "magnetic":
        if p.omega != 0:
            raise ValueError("magnetic limit needs omega = 0")
        return p.omega_tilde
    raise ValueError(f"unknown case {case!r}")


def nonrel_limit(p: OscillatorParams, q: QuantumNumbers, case: str) -> float:
    """Leading non-relativistic energy E - m for the pure cases."""
    w = _case_frequency(p, case)
    s, sl = _sgn(w), _sgn(q.l)
    return abs(w) * (2 * q.n_r + 1 - s + abs(q.l) * (1 - s * sl))


def nonrel_deviation(p: OscillatorParams, q: QuantumNumbers, case: str) -> float:
    """|(E+ - m) - eps| / |eps|, or the absolute deviation when eps = 0."""
    eps = nonrel_limit(p, q, case)
    pair = closed_form_dkpo(p, q) if case == "dkpo" else closed_form_magnetic(p, q)
    dev = abs((pair[0].E - p.m) - eps)
    return dev / abs(eps) if eps != 0 else dev


# --- parameter sweeps --------------------------------------------------------

class Axis(str, enum.Enum):
    OMEGA = "omega"
    OMEGA_TILDE = "omega_tilde"


@dataclass(frozen=True, order=True)
class SweepRow:
    axis_value: float
    l: int
    n_r: int
    E: float
    branch: str = field(compare=False)
    admissible: bool = field(compare=False)
    residual: float = field(compare=False)


@dataclass(frozen=True, order=True)
class CurveRow:
    axis_value: float
    l: int
    eps_plus: float
    eps_minus: float


@dataclass
class SweepResult:
    axis: Axis
    rows: list[SweepRow]
    curves: list[CurveRow]


def sweep_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    """Cell-centred grid: `steps` points, half a step in from each end."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ValueError("range must be finite with lo < hi")
    h = (hi - lo) / steps
    return lo + h * (np.arange(steps) + 0.5)


def sweep(template: OscillatorParams, qnums: Sequence[QuantumNumbers], axis: Axis | str,
          lo: float, hi: float, steps: int, tol: float = DEFAULT_TOL,
          include_rejected: bool = False) -> SweepResult:
    """Evaluate the spectrum along omega or omega_tilde with the other fixed."""
    axis = Axis(axis)
    rows: list[SweepRow] = []
    curves: list[CurveRow] = []
    ls = sorted({q.l for q in qnums})
    for value in sweep_grid(lo, hi, steps):
        value = float(value)
        p = template.replace(**{axis.value: value})
        for l in ls:
            win = constraint_window(p, l)
            curves.append(CurveRow(value, l,
                                   math.nan if win.eps_plus is None else win.eps_plus,
                                   math.nan if win.eps_minus is None else win.eps_minus))
        if p.degenerate:
            continue
        for q in qnums:
            levels = candidate_levels(p, q, tol) if include_rejected else solve_spectrum(p, q, tol)
            rows.extend(SweepRow(value, q.l, q.n_r, lv.E, lv.branch.value, lv.admissible,
                                 lv.residual) for lv in levels)
    rows.sort()
    curves.sort()
    return SweepResult(axis, rows, curves)


def grid_quantum_numbers(l_values: Iterable[int], nr_max: int) -> list[QuantumNumbers]:
    return [QuantumNumbers(n, l) for l in l_values for n in range(nr_max + 1)]
