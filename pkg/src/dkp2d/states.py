"""Bound-state spinors, charge density, and equation-of-motion residuals.

Phi1(r, phi) = e^{i l phi} phi1(r) / sqrt(r) with

    phi1(r) = N r^{|l|+1/2} exp(-alpha r^2 / 2) L_{n_r}^{(|l|)}(alpha r^2).

Phi2 and Phi3 follow from the first-order system,

    Phi2 = (i E pi+_x - m pi+_y) Phi1 / (E^2 - m^2)
    Phi3 = (i E pi+_y + m pi+_x) Phi1 / (E^2 - m^2)

with p = -i grad and

    pi+-_x = p_x -+ i m w x + m wt y,   pi+-_y = p_y -+ i m w y - m wt x.

Internally Phi1 is written as N (x +- i y)^{|l|} G(r^2), which is smooth at
the origin, so analytic gradients need no 1/r factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .algebra import SpinorSix, SpinorThree, beta_matrices, eta0, lift_three_to_six
from .laguerre import genlaguerre, genlaguerre_deriv
from .spectrum import (Branch, EnergyLevel, OscillatorParams, QuantumNumbers, SpectralCoefficients,
                       alpha2, solve_spectrum)


class StateError(ValueError):
    code = "state_error"


class QuantizationMismatch(StateError):
    code = "quantization_mismatch"


class EnergyAtMass(StateError):
    code = "energy_at_mass"


class NullCharge(StateError):
    code = "null_charge"


class GridTooCoarse(StateError):
    code = "grid_too_coarse"


@dataclass(frozen=True)
class BoundState:
    params: OscillatorParams
    qnums: QuantumNumbers
    E: float
    alpha: float
    kappa2: float
    kummer_a: float
    kummer_b: int
    norm: float = 1.0

    @property
    def branch(self) -> Branch:
        return Branch.of(self.E)

    @property
    def length(self) -> float:
        """Oscillator length 1/sqrt(alpha)."""
        return 1.0 / math.sqrt(self.alpha)

    def with_norm(self, norm: float) -> "BoundState":
        return replace(self, norm=float(norm))


@dataclass(frozen=True)
class FieldGrid:
    r_nodes: np.ndarray
    phi_nodes: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r_nodes, dtype=float)
        phi = np.asarray(self.phi_nodes, dtype=float)
        if r.ndim != 1 or phi.ndim != 1 or r.size == 0 or phi.size == 0:
            raise ValueError("grid nodes must be non-empty 1-D arrays")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("r_nodes must be positive and strictly increasing")
        if np.any(np.diff(phi) <= 0) or phi[0] < 0 or phi[-1] >= 2 * np.pi:
            raise ValueError("phi_nodes must be strictly increasing within [0, 2pi)")
        object.__setattr__(self, "r_nodes", r)
        object.__setattr__(self, "phi_nodes", phi)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.r_nodes.size, self.phi_nodes.size)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Cartesian (x, y), each shaped (n_r, n_phi)."""
        r, phi = np.meshgrid(self.r_nodes, self.phi_nodes, indexing="ij")
        return r * np.cos(phi), r * np.sin(phi)


def radial_nodes(state: BoundState, n: int = 2000, kind: str = "geometric",
                 r_min: float | None = None, r_max: float | None = None) -> np.ndarray:
    """Radial sample points starting at 0.01 oscillator lengths by default."""
    r_min = 0.01 * state.length if r_min is None else r_min
    r_max = cutoff_radius(state) if r_max is None else r_max
    if kind == "geometric":
        return np.geomspace(r_min, r_max, n)
    if kind == "uniform":
        return np.linspace(r_min, r_max, n)
    raise ValueError(f"unknown grid kind {kind!r}")


def state_grid(state: BoundState, n_r: int = 250, n_phi: int = 8, kind: str = "geometric",
               r_max: float | None = None) -> FieldGrid:
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    r_max = r_max if r_max is not None else 1.5 * turning_radius(state)
    return FieldGrid(radial_nodes(state, n_r, kind, r_max=r_max), phi)


def turning_radius(state: BoundState) -> float:
    """A radius a few oscillator lengths past the outermost lobe."""
    return math.sqrt((4 * state.qnums.n_r + 2 * abs(state.qnums.l) + 2) / state.alpha) + 3 * state.length


def cutoff_radius(state: BoundState, eps: float = 1e-18) -> float:
    """R with exp(-alpha R^2/2) < eps, pushed out for high-lying states."""
    gauss = math.sqrt(2 * math.log(1 / eps) / state.alpha)
    return max(gauss, 2 * turning_radius(state))


# --- construction ------------------------------------------------------------

def build_state(p: OscillatorParams, q: QuantumNumbers, level: EnergyLevel | float,
                tol: float = 1e-6) -> BoundState:
    energy = level.E if isinstance(level, EnergyLevel) else float(level)
    coeffs = SpectralCoefficients.at(energy, p, q.l)
    if not coeffs.alpha2 > 0:
        raise QuantizationMismatch(f"alpha^2 = {coeffs.alpha2} <= 0 at E = {energy}")
    alpha = math.sqrt(coeffs.alpha2)
    a = 0.5 * (abs(q.l) + 1 - coeffs.kappa2 / (2 * alpha))
    if abs(a + q.n_r) > tol:
        raise QuantizationMismatch(f"Kummer a = {a}, expected {-q.n_r}")
    return BoundState(p, q, energy, alpha, coeffs.kappa2, a, abs(q.l) + 1)


def bound_state(p: OscillatorParams, q: QuantumNumbers, branch: Branch | str = Branch.PARTICLE,
                tol: float = 1e-10) -> BoundState:
    """Solve the spectrum and build the (unnormalized) state on one branch."""
    branch = Branch(branch)
    levels = [lv for lv in solve_spectrum(p, q, tol) if lv.branch is branch]
    if not levels:
        raise QuantizationMismatch(f"no admissible {branch.value} level for {q}")
    return build_state(p, q, levels[0])


# --- radial function ---------------------------------------------------------

def radial_phi1(state: BoundState, r):
    """phi1(r) = N r^{|l|+1/2} e^{-alpha r^2/2} L_{n_r}^{(|l|)}(alpha r^2)."""
    r = np.asarray(r, dtype=float)
    al, n, a = state.alpha, state.qnums.n_r, abs(state.qnums.l)
    return state.norm * r ** (a + 0.5) * np.exp(-al * r * r / 2) * genlaguerre(n, a, al * r * r)


def radial_phi1_d2(state: BoundState, r):
    """Analytic second derivative of radial_phi1."""
    r = np.asarray(r, dtype=float)
    al, n, a = state.alpha, state.qnums.n_r, abs(state.qnums.l)
    s = al * r * r
    lag = genlaguerre(n, a, s)
    d1 = genlaguerre_deriv(n, a, s)
    d2 = genlaguerre(n - 2, a + 2, s)
    # phi1 = r^p e^{-s/2} L(s), p = a + 1/2; differentiate with s' = 2 al r.
    p = a + 0.5
    u = r ** p * np.exp(-s / 2)
    du = u * (p / r - al * r)
    d2u = u * ((p / r - al * r) ** 2 - p / r ** 2 - al)
    dl = 2 * al * r * d1
    d2l = 2 * al * d1 + (2 * al * r) ** 2 * d2
    return state.norm * (d2u * lag + 2 * du * dl + u * d2l)


def _w_power(x, y, l: int):
    w = x + 1j * y if l >= 0 else x - 1j * y
    return w, (1 if l >= 0 else -1)


def _gauss_laguerre(state: BoundState, s):
    """G(s) = e^{-alpha s/2} L(alpha s) and dG/ds."""
    al, n, a = state.alpha, state.qnums.n_r, abs(state.qnums.l)
    e = np.exp(-al * s / 2)
    lag = genlaguerre(n, a, al * s)
    g = e * lag
    dg = e * (-0.5 * al * lag + al * genlaguerre_deriv(n, a, al * s))
    return g, dg


def phi1_field(state: BoundState, x, y):
    """Phi1 at Cartesian points."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = abs(state.qnums.l)
    w, _ = _w_power(x, y, state.qnums.l)
    g, _ = _gauss_laguerre(state, x * x + y * y)
    return state.norm * w ** a * g


def phi1_gradient(state: BoundState, x, y):
    """(Phi1, dPhi1/dx, dPhi1/dy) analytically."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = abs(state.qnums.l)
    w, chir = _w_power(x, y, state.qnums.l)
    g, dg = _gauss_laguerre(state, x * x + y * y)
    wa = w ** a
    dwa = a * w ** (a - 1) if a > 0 else np.zeros_like(w)
    f = state.norm * wa * g
    fx = state.norm * (dwa * g + wa * 2 * x * dg)
    fy = state.norm * (dwa * (1j * chir) * g + wa * 2 * y * dg)
    return f, fx, fy


def _pi_plus(state: BoundState, x, y, f, fx, fy):
    m, w, wt = state.params.m, state.params.omega, state.params.omega_tilde
    pix = -1j * fx - 1j * m * w * x * f + m * wt * y * f
    piy = -1j * fy - 1j * m * w * y * f - m * wt * x * f
    return pix, piy


def _check_mass(state: BoundState) -> float:
    m = state.params.m
    den = state.E ** 2 - m ** 2
    if abs(den) <= 1e-9 * m * m:
        raise EnergyAtMass(f"E^2 - m^2 = {den} too close to zero")
    return den


def field_components(state: BoundState, x, y) -> SpinorThree:
    """(Phi1, Phi2, Phi3) at Cartesian points."""
    den = _check_mass(state)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    f, fx, fy = phi1_gradient(state, x, y)
    pix, piy = _pi_plus(state, x, y, f, fx, fy)
    m, energy = state.params.m, state.E
    phi2 = (1j * energy * pix - m * piy) / den
    phi3 = (1j * energy * piy + m * pix) / den
    return SpinorThree(f, phi2, phi3)


def components_phi23(state: BoundState, grid: FieldGrid) -> tuple[np.ndarray, np.ndarray]:
    x, y = grid.mesh()
    sp = field_components(state, x, y)
    return sp.phi2, sp.phi3


def lift_to_six(components: SpinorThree) -> SpinorSix:
    return lift_three_to_six(components)


# --- charge and normalization --------------------------------------------------

_B6 = beta_matrices(6)
_B3 = beta_matrices(3)
_Q6 = eta0(_B6) @ _B6.complex(0)
_Q3 = eta0(_B3) @ _B3.complex(0)


def charge_density(six: SpinorSix) -> np.ndarray:
    """J0 = (1/2) psi^dagger eta0 beta0 psi in the 6x6 representation."""
    psi = six.stack()
    val = 0.5 * np.einsum("i...,ij,j...->...", psi.conj(), _Q6, psi)
    return val.real


def charge_density_three(phi: SpinorThree) -> np.ndarray:
    """Same bilinear built from the 3x3 matrices (diagnostic only)."""
    psi = phi.stack()
    return (0.5 * np.einsum("i...,ij,j...->...", psi.conj(), _Q3, psi)).real


def charge_density_imag(six: SpinorSix) -> np.ndarray:
    psi = six.stack()
    return (0.5 * np.einsum("i...,ij,j...->...", psi.conj(), _Q6, psi)).imag


@dataclass(frozen=True)
class ChargeResult:
    total: float             # integral of J0 before rescaling
    norm: float              # normalization constant for phi1
    state: BoundState        # state carrying that constant
    sign_matches_branch: bool
    ratio_to_three: float    # integral(J0, 6x6) / integral(J0, 3x3)


def _quadrature(state: BoundState, n_radial: int, n_phi: int):
    r_max = cutoff_radius(state)
    xg, wg = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * r_max * (xg + 1)
    wr = 0.5 * r_max * wg
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    weights = np.outer(wr * r, np.full(n_phi, 2 * np.pi / n_phi))
    return rr * np.cos(pp), rr * np.sin(pp), weights


def total_charge(state: BoundState, n_radial: int = 300, n_phi: int = 16) -> tuple[float, float]:
    """(integral J0 with 6x6 current, integral with the 3x3 analogue) over the plane."""
    x, y, wts = _quadrature(state, n_radial, n_phi)
    comps = field_components(state, x, y)
    q6 = float(np.sum(charge_density(lift_to_six(comps)) * wts))
    q3 = float(np.sum(charge_density_three(comps) * wts))
    return q6, q3


def charge_density_and_normalize(state: BoundState, n_radial: int = 300,
                                 n_phi: int = 16) -> ChargeResult:
    """Rescale phi1 so that |integral of J0 over the plane| = 1.

    The sign of the integral is fixed by the state; it is reported against
    the branch (particle +1, antiparticle -1) rather than forced.
    """
    q6, q3 = total_charge(state, n_radial, n_phi)
    if abs(q6) < 1e-12 * state.norm ** 2:
        raise NullCharge(f"integral of J0 = {q6}")
    scale = 1.0 / math.sqrt(abs(q6))
    new = state.with_norm(state.norm * scale)
    return ChargeResult(q6, new.norm, new, np.sign(q6) == state.branch.sign, q6 / q3)


def normalize(state: BoundState, **kw) -> BoundState:
    return charge_density_and_normalize(state, **kw).state


# --- residuals -----------------------------------------------------------------

def _index_derivs(f: np.ndarray):
    """4th-order central first/second differences w.r.t. node index (interior only)."""
    d1 = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / 12.0
    d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / 12.0
    return d1, d2


def fd_second_derivative(f: np.ndarray, r: np.ndarray) -> np.ndarray:
    """d^2 f/dr^2 at r[2:-2] on a smoothly mapped grid.

    Nodes are treated as r(s) at integer s, so uniform and geometric grids
    both get a 4th-order stencil.
    """
    fs, fss = _index_derivs(np.asarray(f))
    rs, rss = _index_derivs(np.asarray(r, dtype=float))
    return (fss - rss * fs / rs) / rs ** 2


def second_order_residual_profile(state: BoundState, r_nodes, kappa2: float | None = None):
    """(r, residual) of phi1'' - alpha^2 r^2 phi1 - (l^2 - 1/4)/r^2 phi1 + kappa^2 phi1."""
    r = np.asarray(r_nodes, dtype=float)
    if r.size < 9:
        raise GridTooCoarse(f"need at least 9 radial nodes, got {r.size}")
    if np.any(r <= 0) or np.any(np.diff(r) <= 0):
        raise ValueError("radial nodes must be positive and increasing")
    k2 = state.kappa2 if kappa2 is None else kappa2
    l = state.qnums.l
    f = radial_phi1(state, r)
    d2 = fd_second_derivative(f, r)
    ri, fi = r[2:-2], f[2:-2]
    res = d2 - state.alpha ** 2 * ri ** 2 * fi - (l * l - 0.25) / ri ** 2 * fi + k2 * fi
    return ri, res


def residual_second_order(state: BoundState, grid: FieldGrid | np.ndarray,
                          kappa2: float | None = None) -> float:
    """max |radial residual| / max |kappa^2 phi1| on the grid's radial nodes.

    The scale always uses the state's own kappa^2, so an override shows up
    as a plateau of size |kappa2 - state.kappa2| / state.kappa2.
    """
    r = grid.r_nodes if isinstance(grid, FieldGrid) else np.asarray(grid, dtype=float)
    _, res = second_order_residual_profile(state, r, kappa2)
    scale = np.max(np.abs(state.kappa2 * radial_phi1(state, r)))
    return float(np.max(np.abs(res)) / scale)


_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_FD8_2 = np.array([-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560])


def _fd_partial(fn, x, y, h: float, axis: int, stencil=_FD8, order: int = 1):
    acc = 0.0
    for k, c in zip(range(-4, 5), stencil):
        if c == 0.0:
            continue
        if axis == 0:
            acc = acc + c * fn(x + k * h, y)
        else:
            acc = acc + c * fn(x, y + k * h)
    return acc / h ** order


@dataclass(frozen=True)
class FirstOrderResiduals:
    eq1: float  # m Phi1 + pi-_y Phi2 - pi-_x Phi3
    eq2: float  # m Phi2 - i E Phi3 - pi+_y Phi1
    eq3: float  # m Phi3 + i E Phi2 + pi+_x Phi1

    @property
    def worst(self) -> float:
        return max(self.eq1, self.eq2, self.eq3)


def first_order_residuals(state: BoundState, grid: FieldGrid, h: float | None = None) -> FirstOrderResiduals:
    """Closure of the three first-order equations, derivatives by 8th-order finite differences.

    Each residual is max |.| / (m max |Phi|) over the grid.
    """
    h = 0.02 * state.length if h is None else h
    m, w, wt, energy = state.params.m, state.params.omega, state.params.omega_tilde, state.E
    x, y = grid.mesh()
    comps = field_components(state, x, y)
    f1, f2, f3 = comps.phi1, comps.phi2, comps.phi3

    def c1(a, b):
        return phi1_field(state, a, b)

    def c2(a, b):
        return field_components(state, a, b).phi2

    def c3(a, b):
        return field_components(state, a, b).phi3

    # pi- on Phi2, Phi3 and pi+ on Phi1, all through finite differences.
    piy_m_2 = -1j * _fd_partial(c2, x, y, h, 1) + 1j * m * w * y * f2 - m * wt * x * f2
    pix_m_3 = -1j * _fd_partial(c3, x, y, h, 0) + 1j * m * w * x * f3 + m * wt * y * f3
    pix_p_1 = -1j * _fd_partial(c1, x, y, h, 0) - 1j * m * w * x * f1 + m * wt * y * f1
    piy_p_1 = -1j * _fd_partial(c1, x, y, h, 1) - 1j * m * w * y * f1 - m * wt * x * f1

    scale = m * max(np.max(np.abs(f1)), np.max(np.abs(f2)), np.max(np.abs(f3)))
    r1 = m * f1 + piy_m_2 - pix_m_3
    r2 = m * f2 - 1j * energy * f3 - piy_p_1
    r3 = m * f3 + 1j * energy * f2 + pix_p_1
    return FirstOrderResiduals(*(float(np.max(np.abs(r)) / scale) for r in (r1, r2, r3)))


def residual_cartesian(state: BoundState, grid: FieldGrid, kappa2_shift: float = 0.0,
                       h: float | None = None) -> float:
    """(p^2 + alpha^2 r^2 - 2 gamma L_z - 2 beta - E^2 + m^2) Phi1 on the plane.

    Relative to max |kappa^2 Phi1|.  kappa2_shift adds a constant to the
    operator, the planar counterpart of perturbing kappa^2 in the radial form.
    """
    h = 0.02 * state.length if h is None else h
    p, energy, l = state.params, state.E, state.qnums.l
    coeffs = SpectralCoefficients.at(energy, p, l)
    x, y = grid.mesh()

    def fn(a, b):
        return phi1_field(state, a, b)

    f = fn(x, y)
    lap = (_fd_partial(fn, x, y, h, 0, _FD8_2, 2) + _fd_partial(fn, x, y, h, 1, _FD8_2, 2))
    fx = _fd_partial(fn, x, y, h, 0)
    fy = _fd_partial(fn, x, y, h, 1)
    lz = -1j * (x * fy - y * fx)
    op = (-lap + coeffs.alpha2 * (x * x + y * y) * f - 2 * coeffs.gamma_c * lz
          - (2 * coeffs.beta_c + energy ** 2 - p.m ** 2 + kappa2_shift) * f)
    return float(np.max(np.abs(op)) / np.max(np.abs(coeffs.kappa2 * f)))


def sample_state(state: BoundState, grid: FieldGrid) -> dict[str, np.ndarray]:
    """Sampled Phi components and J0 on the grid, flattened in (r, phi) order."""
    x, y = grid.mesh()
    comps = field_components(state, x, y)
    j0 = charge_density(lift_to_six(comps))
    rr, pp = np.meshgrid(grid.r_nodes, grid.phi_nodes, indexing="ij")
    out = {"r": rr.ravel(), "phi": pp.ravel()}
    for k, c in enumerate(comps.as_tuple(), start=1):
        out[f"re_phi{k}"] = np.real(c).ravel()
        out[f"im_phi{k}"] = np.imag(c).ravel()
    out["J0"] = j0.ravel()
    return out


def alpha_of(state: BoundState) -> float:
    return math.sqrt(alpha2(state.E, state.params))
