"""Generalized Laguerre polynomials by upward three-term recurrence."""

from __future__ import annotations

import numpy as np


def genlaguerre(n: int, a: float, x):
    """L_n^{(a)}(x) for integer n >= 0 (n < 0 returns zeros)."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        return np.zeros_like(x)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur


def genlaguerre_deriv(n: int, a: float, x):
    """d/dx L_n^{(a)}(x) = -L_{n-1}^{(a+1)}(x)."""
    return -genlaguerre(n - 1, a + 1, x)
