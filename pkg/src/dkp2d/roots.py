"""Real roots of low-degree polynomials via companion-matrix eigenvalues."""

from __future__ import annotations

from typing import Callable

import numpy as np


def companion(coeffs) -> np.ndarray:
    """Companion matrix of a polynomial given highest-degree-first.

    The polynomial is made monic first; a zero leading coefficient is an error.
    """
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "f")
    if c.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    c = c / c[0]
    n = c.size - 1
    mat = np.zeros((n, n))
    mat[0, :] = -c[1:]
    mat[1:, :-1] = np.eye(n - 1)
    return mat


def polynomial_roots(coeffs) -> np.ndarray:
    """All complex roots, highest-degree-first coefficients."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if c.size < 2:
        return np.empty(0, dtype=complex)
    if c.size == 2:
        return np.array([-c[1] / c[0]], dtype=complex)
    return np.linalg.eigvals(companion(c)).astype(complex)


def real_candidates(roots: np.ndarray, imag_tol: float = 1e-6) -> np.ndarray:
    """Real parts of roots whose imaginary part is small relative to their size."""
    roots = np.asarray(roots, dtype=complex)
    keep = np.abs(roots.imag) <= imag_tol * np.maximum(1.0, np.abs(roots))
    return np.sort(roots[keep].real)


def newton_polish(f: Callable[[float], float], df: Callable[[float], float],
                  x0: float, maxiter: int = 50, xtol: float = 1e-15) -> float:
    """Newton iterations that only accept steps reducing |f|."""
    x = float(x0)
    try:
        fx = f(x)
    except ValueError:
        return x
    for _ in range(maxiter):
        d = df(x)
        if d == 0 or not np.isfinite(d):
            break
        step = fx / d
        x_new = x - step
        try:
            f_new = f(x_new)
        except ValueError:
            break
        if not np.isfinite(f_new) or abs(f_new) > abs(fx):
            break
        x, fx = x_new, f_new
        if abs(step) <= xtol * max(1.0, abs(x)) or fx == 0:
            break
    return x


def cluster(values, rel: float = 1e-8) -> list[float]:
    """Merge sorted values closer than rel * max(1, |v|)."""
    out: list[float] = []
    for v in sorted(values):
        if out and abs(v - out[-1]) <= rel * max(1.0, abs(v)):
            continue
        out.append(float(v))
    return out
