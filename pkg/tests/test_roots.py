import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dkp2d.roots import cluster, companion, newton_polish, polynomial_roots, real_candidates

coef = st.floats(-10, 10)


@given(st.floats(0.1, 10), coef, coef, coef, coef)
def test_roots_match_numpy(a, b, c, d, e):
    ours = np.sort_complex(polynomial_roots([a, b, c, d, e]))
    ref = np.sort_complex(np.roots([a, b, c, d, e]))
    # compare as multisets via the polynomial they rebuild
    assert np.allclose(np.poly(ours), np.poly(ref), atol=1e-8 * max(1, np.max(np.abs(np.poly(ref)))))


def test_companion_eigenvalues():
    mat = companion([2, -6, 4])  # 2 (x - 1)(x - 2)
    assert np.allclose(np.sort(np.linalg.eigvals(mat).real), [1, 2])


def test_degenerate_inputs():
    assert polynomial_roots([0, 0, 3]).size == 0
    assert polynomial_roots([0, 2, -4]) == pytest.approx([2])
    with pytest.raises(ValueError):
        companion([5])


def test_real_candidates_filters_complex():
    roots = np.array([1 + 1e-9j, 2 + 0.5j, -3.0])
    assert list(real_candidates(roots)) == pytest.approx([-3.0, 1.0])


def test_newton_polish_sqrt2():
    x = newton_polish(lambda x: x * x - 2, lambda x: 2 * x, 1.4)
    assert x == pytest.approx(math.sqrt(2), rel=1e-15)


def test_newton_polish_stops_on_domain_error():
    def f(x):
        if x < 0:
            raise ValueError
        return math.sqrt(x) - 0.5

    assert newton_polish(f, lambda x: 0.5 / math.sqrt(x), 0.2) == pytest.approx(0.25, rel=1e-12)
    assert newton_polish(f, lambda x: 1.0, -1.0) == -1.0


def test_cluster():
    assert cluster([1.0, 1.0 + 1e-12, 2.0, 2.0 + 1e-3]) == [1.0, 2.0, 2.001]
