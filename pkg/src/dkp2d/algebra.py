"""Beta-matrix representations of the (2+1)-dimensional DKP algebra.

Both canonical representations have Gaussian-integer entries, so every
structural identity here is checked with integer arithmetic: a matrix is
stored as a pair of int64 arrays (real part, imaginary part).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

METRIC = np.diag([1, -1, -1]).astype(np.int64)


class RepKind(enum.Enum):
    THREE = 3
    SIX = 6

    @classmethod
    def from_dim(cls, dim: int) -> "RepKind":
        try:
            return cls(int(dim))
        except ValueError:
            raise ValueError(f"no canonical representation of dimension {dim}") from None


@dataclass(frozen=True)
class GaussMatrix:
    """Square matrix over the Gaussian integers."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        re = np.asarray(self.re, dtype=np.int64)
        im = np.asarray(self.im, dtype=np.int64)
        if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
            raise ValueError(f"not a square matrix pair: {re.shape}, {im.shape}")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, a) -> "GaussMatrix":
        a = np.asarray(a, dtype=complex)
        re, im = np.rint(a.real), np.rint(a.imag)
        if not (np.array_equal(re, a.real) and np.array_equal(im, a.imag)):
            raise ValueError("entries are not Gaussian integers")
        return cls(re.astype(np.int64), im.astype(np.int64))

    @classmethod
    def identity(cls, dim: int) -> "GaussMatrix":
        return cls(np.eye(dim, dtype=np.int64), np.zeros((dim, dim), dtype=np.int64))

    @property
    def dim(self) -> int:
        return self.re.shape[0]

    def __matmul__(self, other: "GaussMatrix") -> "GaussMatrix":
        return GaussMatrix(self.re @ other.re - self.im @ other.im,
                           self.re @ other.im + self.im @ other.re)

    def __add__(self, other: "GaussMatrix") -> "GaussMatrix":
        return GaussMatrix(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussMatrix") -> "GaussMatrix":
        return GaussMatrix(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussMatrix":
        return GaussMatrix(-self.re, -self.im)

    def scale(self, k: int) -> "GaussMatrix":
        return GaussMatrix(k * self.re, k * self.im)

    def dagger(self) -> "GaussMatrix":
        return GaussMatrix(self.re.T, -self.im.T)

    def max_abs(self) -> float:
        """Largest entry modulus (exact for the small integers involved)."""
        sq = self.re ** 2 + self.im ** 2
        return float(np.sqrt(sq.max())) if sq.size else 0.0

    def is_zero(self) -> bool:
        return not (self.re.any() or self.im.any())

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussMatrix):
            return NotImplemented
        return np.array_equal(self.re, other.re) and np.array_equal(self.im, other.im)

    __hash__ = None


@dataclass(frozen=True)
class BetaSet:
    rep_kind: RepKind
    beta: tuple[GaussMatrix, GaussMatrix, GaussMatrix]
    metric: np.ndarray = field(default_factory=lambda: METRIC.copy())

    def __post_init__(self):
        if len(self.beta) != 3:
            raise ValueError("a BetaSet holds exactly three matrices")
        dims = {b.dim for b in self.beta}
        if dims != {self.rep_kind.value}:
            raise ValueError(f"matrix dimensions {sorted(dims)} do not match {self.rep_kind}")

    @property
    def dim(self) -> int:
        return self.rep_kind.value

    def complex(self, mu: int) -> np.ndarray:
        return self.beta[mu].to_complex()

    def with_entry(self, mu: int, row: int, col: int, value: complex) -> "BetaSet":
        """Copy with one entry of beta^mu replaced (0-based indices)."""
        a = self.beta[mu].to_complex()
        a[row, col] = value
        beta = list(self.beta)
        beta[mu] = GaussMatrix.from_complex(a)
        return BetaSet(self.rep_kind, tuple(beta), self.metric)


_RHO = (
    np.array([[-1, 0, 0], [0, -1, 0], [0, 0, 0]]),
    np.array([[0, 0, 1], [0, 0, 0], [0, 1, 0]]),
    np.array([[0, 0, 0], [0, 0, 1], [-1, 0, 0]]),
)

_BETA3 = (
    np.array([[0, 0, 0], [0, 0, 1j], [0, -1j, 0]]),
    np.array([[0, 0, -1], [0, 0, 0], [1, 0, 0]]),
    np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]),
)


def _six(mu: int) -> np.ndarray:
    rho = _RHO[mu]
    zero = np.zeros((3, 3), dtype=int)
    lower = rho if mu == 0 else -rho.T
    return np.block([[zero, rho], [lower, zero]])


def beta_matrices(rep_kind: RepKind | int) -> BetaSet:
    """Canonical beta-matrices: the 3x3 irreducible set or the 6x6 twin sum."""
    if not isinstance(rep_kind, RepKind):
        rep_kind = RepKind.from_dim(rep_kind)
    if rep_kind is RepKind.THREE:
        mats = tuple(GaussMatrix.from_complex(b) for b in _BETA3)
    else:
        mats = tuple(GaussMatrix.from_complex(_six(mu)) for mu in range(3))
    return BetaSet(rep_kind, mats)


@dataclass(frozen=True)
class AlgebraReport:
    max_deviation: float
    failing: list[tuple[int, int, int]]
    triples_checked: int

    @property
    def ok(self) -> bool:
        return not self.failing


def verify_dkp_algebra(bs: BetaSet) -> AlgebraReport:
    """Check b^mu b^nu b^eta + b^eta b^nu b^mu = g^{mu nu} b^eta + g^{eta nu} b^mu."""
    b = bs.beta
    g = np.asarray(bs.metric, dtype=np.int64)
    failing = []
    worst = 0.0
    triples = list(itertools.product(range(3), repeat=3))
    for mu, nu, eta in triples:
        lhs = b[mu] @ b[nu] @ b[eta] + b[eta] @ b[nu] @ b[mu]
        rhs = b[eta].scale(int(g[mu, nu])) + b[mu].scale(int(g[eta, nu]))
        dev = lhs - rhs
        if not dev.is_zero():
            failing.append((mu, nu, eta))
            worst = max(worst, dev.max_abs())
    return AlgebraReport(worst, failing, len(triples))


def hermiticity_pattern(bs: BetaSet) -> tuple[bool, bool, bool]:
    """beta^0 Hermitian, beta^1 and beta^2 anti-Hermitian."""
    b = bs.beta
    return (b[0].dagger() == b[0], b[1].dagger() == -b[1], b[2].dagger() == -b[2])


def eta0_exact(bs: BetaSet) -> GaussMatrix:
    b0 = bs.beta[0]
    return (b0 @ b0).scale(2) - GaussMatrix.identity(bs.dim)


def eta0(bs: BetaSet) -> np.ndarray:
    """2 beta^0 beta^0 - 1."""
    return eta0_exact(bs).to_complex()


def _projector_exact(mu: int, bs: BetaSet) -> GaussMatrix:
    b = bs.beta
    g00 = int(bs.metric[mu, 0])
    ident = GaussMatrix.identity(bs.dim)
    return b[1] @ b[1] @ b[2] @ b[2] @ (b[mu] @ b[0] - ident.scale(g00))


def projector(mu: int, bs: BetaSet) -> np.ndarray:
    """R^mu = (b^1)^2 (b^2)^2 (b^mu b^0 - g^{mu 0})."""
    return _projector_exact(mu, bs).to_complex()


def projector_pair_exact(mu: int, nu: int, bs: BetaSet) -> GaussMatrix:
    return _projector_exact(mu, bs) @ bs.beta[nu]


def projector_pair(mu: int, nu: int, bs: BetaSet) -> np.ndarray:
    """R^{mu nu} = R^mu b^nu."""
    return projector_pair_exact(mu, nu, bs).to_complex()


# --- spinors -----------------------------------------------------------------

SIX_LABELS = ("a1", "a2", "b", "d1", "d2", "e")


@dataclass(frozen=True)
class SpinorSix:
    """Six-spinor (a1, a2, b, d1, d2, e); entries may be scalars or arrays."""

    a1: object
    a2: object
    b: object
    d1: object
    d2: object
    e: object

    @classmethod
    def from_sequence(cls, seq) -> "SpinorSix":
        seq = list(seq)
        if len(seq) != 6:
            raise ValueError(f"six-spinor needs 6 components, got {len(seq)}")
        return cls(*seq)

    def as_tuple(self) -> tuple:
        return (self.a1, self.a2, self.b, self.d1, self.d2, self.e)

    def stack(self) -> np.ndarray:
        """Components stacked on a leading axis of length 6."""
        return np.stack([np.asarray(c, dtype=complex) for c in self.as_tuple()])


@dataclass(frozen=True)
class SpinorThree:
    phi1: object
    phi2: object
    phi3: object

    def as_tuple(self) -> tuple:
        return (self.phi1, self.phi2, self.phi3)

    def stack(self) -> np.ndarray:
        return np.stack([np.asarray(c, dtype=complex) for c in self.as_tuple()])


def pairing_residual(psi: SpinorSix) -> float:
    """How far psi is from a1 = -i d2, a2 = i d1, b = -i e."""
    c = [np.asarray(v, dtype=complex) for v in psi.as_tuple()]
    a1, a2, b, d1, d2, e = c
    parts = (np.abs(a1 + 1j * d2), np.abs(a2 - 1j * d1), np.abs(b + 1j * e))
    return float(max(np.max(p) for p in parts))


def reduce_six_to_three(psi: SpinorSix) -> tuple[SpinorThree, float]:
    """Map a six-spinor onto (Phi1, Phi2, Phi3) = (i b, -a2, a1).

    The pairing relations are applied as definitions; the returned residual
    says how badly psi violates them.
    """
    b = np.asarray(psi.b, dtype=complex)
    phi = SpinorThree(1j * b, -np.asarray(psi.a2, dtype=complex),
                      np.asarray(psi.a1, dtype=complex))
    return phi, pairing_residual(psi)


def lift_three_to_six(phi: SpinorThree) -> SpinorSix:
    p1, p2, p3 = (np.asarray(v, dtype=complex) for v in phi.as_tuple())
    return SpinorSix(p3, -p2, -1j * p1, 1j * p2, 1j * p3, p1)


# --- span of beta words ------------------------------------------------------

@dataclass(frozen=True)
class SpanRank:
    rank: int
    saturated: bool
    ranks_by_length: tuple[int, ...]
    identity_in_span: bool


def _rank(rows: list[np.ndarray]) -> int:
    # Complex span; Gaussian-integer entries of modest size keep the SVD rank exact.
    return int(np.linalg.matrix_rank(np.array(rows, dtype=complex)))


def monomial_span_rank(bs: BetaSet, max_word_length: int) -> SpanRank:
    """Rank of the linear span of all beta-words of length 1..max_word_length."""
    if max_word_length < 1:
        raise ValueError("max_word_length must be >= 1")
    rows: list[np.ndarray] = []
    ranks = []
    layer = [GaussMatrix.identity(bs.dim)]
    for _ in range(max_word_length):
        layer = [w @ b for w in layer for b in bs.beta]
        # Deduplicate identical words before growing the next layer.
        uniq: dict[bytes, GaussMatrix] = {}
        for w in layer:
            uniq.setdefault(w.re.tobytes() + w.im.tobytes(), w)
        layer = list(uniq.values())
        rows.extend(w.to_complex().ravel() for w in layer)
        ranks.append(_rank(rows))
    ident = GaussMatrix.identity(bs.dim)
    id_row = ident.to_complex().ravel()
    in_span = _rank(rows + [id_row]) == ranks[-1]
    saturated = len(ranks) > 1 and ranks[-1] == ranks[-2]
    return SpanRank(ranks[-1], saturated, tuple(ranks), in_span)
