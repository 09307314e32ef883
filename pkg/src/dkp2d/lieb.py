"""Low-energy Lieb-lattice model built on the 3x3 beta-matrices.

H(k) = v_F [b0, b1] k1 + v_F [b0, b2] k2 + m b0, three bands with a flat
zero-energy middle band, plus the one-loop polarization scalars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .algebra import GaussMatrix, beta_matrices

PAIR_THRESHOLD = 4.0  # ptilde^2 / m^2 at the pair-creation branch point


class LiebError(ValueError):
    code = "lieb_error"


class AboveThreshold(LiebError):
    code = "above_threshold"


class ZeroGap(LiebError):
    code = "zero_gap"


@dataclass(frozen=True)
class LiebParams:
    v_F: float = 1.0
    m: float = 1.0
    e_charge: float = 1.0

    def __post_init__(self):
        if not self.v_F > 0:
            raise ValueError("v_F must be positive")
        if not all(math.isfinite(v) for v in (self.v_F, self.m, self.e_charge)):
            raise ValueError("parameters must be finite")

    @property
    def sign_m(self) -> int:
        return (self.m > 0) - (self.m < 0)


_B = beta_matrices(3)
_B0 = _B.complex(0)
_B1 = _B.complex(1)
_B2 = _B.complex(2)
_B00 = (_B.beta[0] @ _B.beta[0]).to_complex()


def _commutator(a: GaussMatrix, b: GaussMatrix) -> np.ndarray:
    return (a @ b - b @ a).to_complex()


_C1 = _commutator(_B.beta[0], _B.beta[1])
_C2 = _commutator(_B.beta[0], _B.beta[2])


def hamiltonian_k(k1: float, k2: float, lp: LiebParams) -> np.ndarray:
    h = lp.v_F * (_C1 * k1 + _C2 * k2) + lp.m * _B0
    if not np.array_equal(h, h.conj().T):
        raise AssertionError("Hamiltonian lost Hermiticity")
    return h


def dispersion(k1: float, k2: float, lp: LiebParams) -> np.ndarray:
    """Band energies, ascending."""
    return np.linalg.eigvalsh(hamiltonian_k(k1, k2, lp))


def analytic_bands(k1: float, k2: float, lp: LiebParams) -> np.ndarray:
    """Roots of -lambda^3 + lambda (m^2 + v_F^2 |k|^2)."""
    e = math.sqrt(lp.m ** 2 + lp.v_F ** 2 * (k1 * k1 + k2 * k2))
    return np.array([-e, 0.0, e])


def eigenstates(k1: float, k2: float, lp: LiebParams) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(hamiltonian_k(k1, k2, lp))


def constraint_residual(k1: float, k2: float, lp: LiebParams, eigvec) -> float:
    """Relative violation of v_F b^i b0 b0 p_i Phi = m (1 - b0 b0) Phi.

    Covariant components: p_i = -k^i with metric (+, -, -).
    """
    phi = np.asarray(eigvec, dtype=complex)
    p1, p2 = -k1, -k2
    lhs = lp.v_F * (_B1 @ _B00 * p1 + _B2 @ _B00 * p2) @ phi
    rhs = lp.m * (np.eye(3) - _B00) @ phi
    scale = np.linalg.norm(phi) * max(abs(lp.m), lp.v_F * math.hypot(k1, k2))
    return float(np.linalg.norm(lhs - rhs) / scale)


def k_path(axis: str, lo: float, hi: float, steps: int) -> np.ndarray:
    """Points (k1, k2) along k1, k2 or the diagonal; endpoints included."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t = np.linspace(lo, hi, steps)
    zero = np.zeros_like(t)
    if axis == "k1":
        return np.column_stack([t, zero])
    if axis == "k2":
        return np.column_stack([zero, t])
    if axis == "diagonal":
        return np.column_stack([t, t]) / math.sqrt(2)
    raise ValueError(f"unknown k axis {axis!r}")


def band_structure(points, lp: LiebParams) -> np.ndarray:
    """Rows (k1, k2, E1, E2, E3)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    bands = np.array([dispersion(k1, k2, lp) for k1, k2 in pts])
    return np.column_stack([pts, bands])


# --- polarization ------------------------------------------------------------

def _check_threshold(s: float) -> None:
    if not math.isfinite(s):
        raise ValueError("ptilde2_over_m2 must be finite")
    if s > PAIR_THRESHOLD:
        raise AboveThreshold(f"ptilde^2/m^2 = {s} exceeds the pair-creation threshold 4")


def _fold(fn, epsabs: float) -> tuple[float, float]:
    # Both integrands are symmetric about x = 1/2.
    val, err = integrate.quad(fn, 0.0, 0.5, epsabs=epsabs / 2, epsrel=1e-13, limit=200)
    return 2 * val, 2 * err


def pi_even_with_error(s: float, epsabs: float = 1e-12) -> tuple[float, float]:
    _check_threshold(s)
    pref = 1.0 - 0.25 * s
    if pref == 0.0:
        return 0.0, 0.0

    def fn(x):
        u = x * (1 - x)
        return u * pref / math.sqrt(1 - u * s)

    return _fold(fn, epsabs)


def pi_odd_with_error(s: float, sign_m: int = 1, epsabs: float = 1e-12) -> tuple[float, float]:
    _check_threshold(s)
    if sign_m not in (1, -1):
        raise ValueError("sign_m must be +1 or -1")

    def fn(x):
        return math.sqrt(max(0.0, 1 - x * (1 - x) * s))

    val, err = _fold(fn, epsabs)
    return sign_m * val, err


def pi_even(s: float, epsabs: float = 1e-12) -> float:
    """Even polarization scalar at s = ptilde^2 / m^2 (s <= 4)."""
    return pi_even_with_error(s, epsabs)[0]


def pi_odd(s: float, sign_m: int = 1, epsabs: float = 1e-12) -> float:
    """Odd polarization scalar, carrying sign(m)."""
    return pi_odd_with_error(s, sign_m, epsabs)[0]


def ptilde2(p0: float, p1: float, p2: float, v_F: float) -> float:
    """p0^2 - v_F^2 (p1^2 + p2^2); the one place this convention lives."""
    return p0 * p0 - v_F * v_F * (p1 * p1 + p2 * p2)


def levi_civita_ij0(i: int, j: int) -> int:
    """epsilon^{ij0} for spatial i, j in {1, 2}, with epsilon^{120} = +1."""
    if (i, j) == (1, 2):
        return 1
    if (i, j) == (2, 1):
        return -1
    return 0


@dataclass(frozen=True)
class PolarizationPoint:
    p0: float
    p1: float
    p2: float
    ptilde2_over_m2: float
    pi_even: float
    pi_odd: float
    pi00: complex
    pi12: complex
    pi21: complex

    def even_part(self, i: int, j: int, lp: LiebParams) -> complex:
        p = {1: self.p1, 2: self.p2}
        return (lp.e_charge ** 2 / (2 * math.pi)) * lp.v_F ** 2 * p[i] * p[j] / abs(lp.m) * self.pi_even

    def odd_part(self, i: int, j: int, lp: LiebParams) -> complex:
        return (lp.e_charge ** 2 / (2 * math.pi)) * (-1j) * levi_civita_ij0(i, j) * self.p0 * self.pi_odd


def polarization_tensor(p0: float, p1: float, p2: float, lp: LiebParams) -> PolarizationPoint:
    """Pi^00 and the off-diagonal spatial Pi^{ij} from the even/odd scalars."""
    if lp.m == 0:
        raise ZeroGap("bandgap m = 0")
    s = ptilde2(p0, p1, p2, lp.v_F) / lp.m ** 2
    pe = pi_even(s)
    po = pi_odd(s, lp.sign_m)
    pref = lp.e_charge ** 2 / (2 * math.pi)
    # Lower spatial indices flip sign in pairs, so p_1 p_2 = p^1 p^2.
    even = pref * lp.v_F ** 2 * p1 * p2 / abs(lp.m) * pe
    odd12 = pref * (-1j) * levi_civita_ij0(1, 2) * p0 * po
    pi00 = pref * (p1 * p1 + p2 * p2) / abs(lp.m) * pe
    return PolarizationPoint(p0, p1, p2, s, pe, po, complex(pi00), complex(even + odd12),
                             complex(even - odd12))


def polarization_scan(values, sign_m: int = 1) -> np.ndarray:
    """Rows (ptilde2_over_m2, pi_even, pi_odd)."""
    return np.array([[s, pi_even(s), pi_odd(s, sign_m)] for s in values])
