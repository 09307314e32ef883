import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import brentq

from dkp2d.spectrum import (Branch, DegenerateProblem, NonPositiveAlpha2, OscillatorParams,
                            QuantumNumbers, SpectralCoefficients, alpha2, candidate_levels,
                            closed_form_dkpo, closed_form_magnetic, constraint_window, kappa2,
                            nonrel_deviation, nonrel_limit, quantization_residual, solve_spectrum,
                            sweep, sweep_grid, symmetry_check_dkpo, symmetry_check_magnetic)

masses = st.floats(0.3, 5.0)
freqs = st.floats(-3.0, 3.0).filter(lambda w: abs(w) > 1e-3)
ls = st.integers(-4, 4)
nrs = st.integers(0, 4)


def energies(levels):
    return [lv.E for lv in levels]


def _scan_roots(p, q, n=40001):
    """Roots of the unsquared condition by sign changes + brentq (no quartic)."""
    N = 2 * q.n_r + 1 + abs(q.l)
    span = 20 * (p.m + (abs(p.omega) + abs(p.omega_tilde)) * (N + abs(q.l) + 2))
    lo, hi = -span, span
    w, wt, m = p.omega, p.omega_tilde, p.m
    if w * wt != 0:
        # alpha^2 is linear in E; keep to the side where it is positive
        edge = -m * (w * w + wt * wt) / (2 * w * wt)
        if w * wt > 0:
            lo = max(lo, edge + 1e-9)
        else:
            hi = min(hi, edge - 1e-9)
    grid = np.linspace(lo, hi, n)

    def f(e):
        return quantization_residual(e, p, q)

    vals = np.array([f(e) for e in grid])
    roots = []
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-14, rtol=1e-15))
    return roots


# --- coefficients and residual ---------------------------------------------

@given(st.floats(-10, 10), masses, freqs, freqs, ls)
def test_coefficient_identities(e, m, w, wt, l):
    p = OscillatorParams(m, w, wt)
    c = SpectralCoefficients.at(e, p, l)
    assert c.kappa2 == pytest.approx(2 * c.beta_c + e * e - m * m + 2 * l * c.gamma_c, abs=1e-9)
    assert c.alpha2 == pytest.approx(m * m * (w * w + wt * wt) + 2 * e * m * w * wt, abs=1e-9)
    assert kappa2(e, p, l) == pytest.approx(2 * w * (e * l + m) + 2 * wt * (e + m * l) + e * e - m * m,
                                            abs=1e-9)


def test_residual_zero_at_sqrt5():
    p = OscillatorParams(1, 1, 0)
    assert abs(quantization_residual(math.sqrt(5), p, QuantumNumbers(1, 0))) < 1e-12


def test_residual_brackets_general_root():
    p, q = OscillatorParams(1, 0.3, 0.4), QuantumNumbers(1, 0)
    assert quantization_residual(1.95, p, q) * quantization_residual(2.0, p, q) < 0


def test_residual_raises_on_nonpositive_alpha2():
    p = OscillatorParams(1, 1, -1)
    assert alpha2(1.0, p) == 0
    with pytest.raises(NonPositiveAlpha2):
        quantization_residual(1.0, p, QuantumNumbers(0, 0))


# --- solver examples ---------------------------------------------------------

def test_general_example():
    p, q = OscillatorParams(1, 0.3, 0.4), QuantumNumbers(1, 0)
    levels = solve_spectrum(p, q)
    assert len(levels) == 1
    assert levels[0].E == pytest.approx(1.9813076179623235, rel=1e-12)
    assert levels[0].branch is Branch.PARTICLE
    oracle = _scan_roots(p, q)
    assert oracle == pytest.approx([levels[0].E], rel=1e-10)
    rejected = [lv for lv in candidate_levels(p, q) if not lv.admissible]
    assert rejected and all(lv.E < 0 for lv in rejected)


def test_magnetic_rest_mass_candidate_rejected():
    p, q = OscillatorParams(1, 0, 0.5), QuantumNumbers(0, 1)
    cands = {round(lv.E, 9): lv for lv in candidate_levels(p, q)}
    assert not cands[1.0].admissible and not cands[1.0].not_pm_m
    assert energies(solve_spectrum(p, q)) == [-2.0]


def test_dkpo_mirror_example():
    levels = solve_spectrum(OscillatorParams(1, 1, 0), QuantumNumbers(1, 0))
    assert energies(levels) == pytest.approx([-math.sqrt(5), math.sqrt(5)], rel=1e-12)


def test_degenerate_problem():
    with pytest.raises(DegenerateProblem):
        solve_spectrum(OscillatorParams(1, 0, 0), QuantumNumbers(0, 0))


@pytest.mark.parametrize("kwargs", [dict(m=0), dict(m=-1), dict(m=float("nan"))])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        OscillatorParams(**kwargs)


def test_quantum_numbers_validation():
    with pytest.raises(ValueError):
        QuantumNumbers(-1, 0)


def test_from_field():
    p = OscillatorParams.from_field(2.0, 0.1, charge=3.0, field=0.8)
    assert p.omega_tilde == pytest.approx(3.0 * 0.8 / 4.0, rel=1e-15)


# --- closed forms ----------------------------------------------------------

def test_closed_form_dkpo_values():
    ep, em = closed_form_dkpo(OscillatorParams(1, 0.5, 0), QuantumNumbers(1, 1))
    assert ep.E == pytest.approx(1.5615528128088303, rel=1e-12)
    assert em.E == pytest.approx(-2.5615528128088303, rel=1e-12)
    assert ep.admissible and em.admissible


@pytest.mark.parametrize("w", [0.2, 1.0, 2.5])
def test_closed_form_dkpo_nr0_l0_positive_omega(w):
    pair = closed_form_dkpo(OscillatorParams(1, w, 0), QuantumNumbers(0, 0))
    assert [lv.E for lv in pair] == pytest.approx([1.0, -1.0])
    assert not any(lv.admissible for lv in pair)


def test_closed_form_dkpo_negative_omega():
    pair = closed_form_dkpo(OscillatorParams(1, -1, 0), QuantumNumbers(0, 0))
    assert [lv.E for lv in pair] == pytest.approx([math.sqrt(5), -math.sqrt(5)], rel=1e-12)
    assert all(lv.admissible for lv in pair)


def test_closed_form_magnetic_values():
    ep, em = closed_form_magnetic(OscillatorParams(1, 0, 0.5), QuantumNumbers(1, 1))
    assert ep.E == pytest.approx(-0.5 + math.sqrt(4.25), rel=1e-12)
    assert em.E == pytest.approx(-0.5 - math.sqrt(4.25), rel=1e-12)
    ep, em = closed_form_magnetic(OscillatorParams(1, 0, 0.5), QuantumNumbers(0, 1))
    assert ep.E == pytest.approx(1.0) and not ep.admissible
    assert em.E == pytest.approx(-2.0) and em.admissible


def test_closed_form_preconditions():
    with pytest.raises(ValueError):
        closed_form_dkpo(OscillatorParams(1, 0.5, 0.1), QuantumNumbers(0, 0))
    with pytest.raises(ValueError):
        closed_form_magnetic(OscillatorParams(1, 0.5, 0.1), QuantumNumbers(0, 0))


# --- windows ---------------------------------------------------------------

def test_window_unrestricted_dkpo():
    win = constraint_window(OscillatorParams(1, 1, 0), 0)
    assert win.unrestricted_kappa
    assert win.contains(0.3) and not win.contains(1.0) and not win.contains(-1.0)


def test_window_magnetic_l1():
    win = constraint_window(OscillatorParams(1, 0, 0.5), 1)
    assert win.eps_plus == pytest.approx(0.0, abs=1e-15)
    assert win.eps_minus == pytest.approx(-1.0)
    assert win.contains(0.5) and win.contains(-1.5) and not win.contains(-0.5)


@given(masses, freqs, st.floats(-20, 20))
def test_alpha_constraint_trivial_in_pure_cases(m, w, e):
    assert constraint_window(OscillatorParams(m, w, 0), 0).alpha_ok(e)
    assert constraint_window(OscillatorParams(m, 0, w), 0).alpha_ok(e)


# --- properties --------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(masses, freqs, freqs, ls, nrs)
def test_filter_soundness(m, w, wt, l, n):
    p, q = OscillatorParams(m, w, wt), QuantumNumbers(n, l)
    for lv in solve_spectrum(p, q):
        e = lv.E
        assert alpha2(e, p) > 0
        assert kappa2(e, p, l) > 0
        assert abs(e - m) > 1e-9 * m and abs(e + m) > 1e-9 * m
        assert abs(quantization_residual(e, p, q)) <= 1e-10


@settings(max_examples=150, deadline=None)
@given(masses, freqs, freqs, ls, nrs)
def test_rejected_roots_fail_a_check(m, w, wt, l, n):
    p, q = OscillatorParams(m, w, wt), QuantumNumbers(n, l)
    for lv in candidate_levels(p, q):
        if lv.admissible:
            continue
        e = lv.E
        a2, k2 = alpha2(e, p), kappa2(e, p, l)
        near_mass = min(abs(e - m), abs(e + m)) <= 1e-9 * m
        bad_residual = a2 > 0 and abs(quantization_residual(e, p, q)) > 1e-10
        assert a2 <= 0 or k2 <= 0 or near_mass or bad_residual or not lv.window_ok


@settings(max_examples=60, deadline=None)
@given(masses, st.floats(-2, 2), st.floats(-2, 2), st.integers(-3, 3), st.integers(0, 3))
def test_solver_matches_scan_oracle(m, w, wt, l, n):
    assume(abs(w) > 1e-2 or abs(wt) > 1e-2)
    p, q = OscillatorParams(m, w, wt), QuantumNumbers(n, l)
    solved = energies(solve_spectrum(p, q))
    oracle = [e for e in _scan_roots(p, q) if min(abs(e - m), abs(e + m)) > 1e-6 * m]
    # the scan can miss tangential double roots; every root it does find must be solved
    for e in oracle:
        assert any(abs(e - s) <= 1e-8 * max(1, abs(e)) for s in solved), (e, solved)
    for s in solved:
        assert abs(quantization_residual(s, p, q)) <= 1e-10


@settings(max_examples=150, deadline=None)
@given(masses, freqs, ls, nrs)
def test_dkpo_sign_symmetry(m, w, l, n):
    a = energies(solve_spectrum(OscillatorParams(m, w, 0), QuantumNumbers(n, l)))
    b = energies(solve_spectrum(OscillatorParams(m, w, 0), QuantumNumbers(n, -l)))
    assert sorted(-e for e in b) == pytest.approx(a, rel=1e-10)


@settings(max_examples=150, deadline=None)
@given(masses, freqs, ls, nrs)
def test_magnetic_sign_symmetry(m, wt, l, n):
    a = energies(solve_spectrum(OscillatorParams(m, 0, wt), QuantumNumbers(n, l)))
    b = energies(solve_spectrum(OscillatorParams(m, 0, -wt), QuantumNumbers(n, -l)))
    assert sorted(-e for e in b) == pytest.approx(a, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(masses, freqs, freqs, ls, nrs)
def test_general_sign_symmetry(m, w, wt, l, n):
    # kappa^2 and alpha^2 are both invariant under (l, omega_tilde, E) -> (-l, -omega_tilde, -E)
    a = energies(solve_spectrum(OscillatorParams(m, w, wt), QuantumNumbers(n, l)))
    b = energies(solve_spectrum(OscillatorParams(m, w, -wt), QuantumNumbers(n, -l)))
    assert sorted(-e for e in b) == pytest.approx(a, rel=1e-9, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(masses, freqs, ls, nrs)
def test_dkpo_levels_outside_mass_gap(m, w, l, n):
    for lv in solve_spectrum(OscillatorParams(m, w, 0), QuantumNumbers(n, l)):
        assert abs(lv.E) > m


@settings(max_examples=150, deadline=None)
@given(masses, freqs, ls, nrs, st.booleans())
def test_closed_form_agreement(m, w, l, n, magnetic):
    p = OscillatorParams(m, 0, w) if magnetic else OscillatorParams(m, w, 0)
    q = QuantumNumbers(n, l)
    pair = closed_form_magnetic(p, q) if magnetic else closed_form_dkpo(p, q)
    solved = energies(solve_spectrum(p, q))
    closed = sorted(lv.E for lv in pair if lv.admissible)
    assert solved == pytest.approx(closed, rel=1e-10)


# --- symmetry relations and limits ----------------------------------------

def test_symmetry_examples():
    assert symmetry_check_dkpo(1, 0.7, 0, 2)
    assert not symmetry_check_dkpo(1, 0.7, 0, 2, n_plus=0)
    assert symmetry_check_magnetic(1, 0.4, 0, 3)
    assert not symmetry_check_magnetic(1, 0.4, 0, 3, n_plus=2)


@given(masses, st.floats(0.05, 3), st.integers(0, 5), st.integers(1, 4), st.integers(-3, 3))
def test_symmetry_iff(m, f, n, l, offset):
    assert symmetry_check_dkpo(m, f, n, l, n_plus=n + 1 + offset) == (offset == 0)
    assert symmetry_check_magnetic(m, f, n, l, n_plus=n + l + offset) == (offset == 0)


def test_nonrel_examples():
    assert nonrel_limit(OscillatorParams(100, 0.1, 0), QuantumNumbers(1, 1), "dkpo") == pytest.approx(0.2)
    assert nonrel_limit(OscillatorParams(100, 0, -0.1), QuantumNumbers(0, 1), "magnetic") == pytest.approx(0.4)


def test_nonrel_zero_limit_reports_absolute():
    p, q = OscillatorParams(10, 0.1, 0), QuantumNumbers(0, 0)
    assert nonrel_limit(p, q, "dkpo") == 0
    assert nonrel_deviation(p, q, "dkpo") == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("case,p", [("dkpo", lambda m: OscillatorParams(m, 0.1, 0)),
                                    ("magnetic", lambda m: OscillatorParams(m, 0, -0.1))])
def test_nonrel_convergence(case, p):
    q = QuantumNumbers(1, 1)
    devs = [nonrel_deviation(p(m), q, case) for m in (10, 100, 1000)]
    assert devs[0] > devs[1] > devs[2]
    for m, d in zip((10, 100, 1000), devs):
        assert d <= 5 * (0.1 / m)


# --- sweeps --------------------------------------------------------------

def test_sweep_grid_avoids_zero():
    g = sweep_grid(-2, 2, 40)
    assert len(g) == 40 and not np.any(g == 0)
    assert np.allclose(np.diff(g), 0.1)


def test_sweep_grid_validation():
    with pytest.raises(ValueError):
        sweep_grid(0, 1, 1)
    with pytest.raises(ValueError):
        sweep_grid(1, 0, 5)


def test_sweep_skips_degenerate_point():
    # cell centres of [-1, 3] in two steps are 0 and 2
    res = sweep(OscillatorParams(1), [QuantumNumbers(1, 0)], "omega", -1, 3, 2)
    assert {r.axis_value for r in res.rows} == {2.0}
    assert {c.axis_value for c in res.curves} == {0.0, 2.0}


def test_sweep_rows_sorted_and_curves_emitted():
    qn = [QuantumNumbers(n, l) for l in (0, 1) for n in range(4)]
    res = sweep(OscillatorParams(1), qn, "omega", -2, 2, 20)
    keys = [(r.axis_value, r.l, r.n_r, r.E) for r in res.rows]
    assert keys == sorted(keys)
    assert len(res.curves) == 20 * 2
    # at l=0 the discriminant is m^2 - 2 m omega: no window once omega > m/2
    for c in res.curves:
        if c.l == 0:
            assert math.isnan(c.eps_plus) == (c.axis_value > 0.5)


def test_sweep_include_rejected_superset():
    qn = [QuantumNumbers(0, 0)]
    a = sweep(OscillatorParams(1), qn, "omega", -1, 1, 10)
    b = sweep(OscillatorParams(1), qn, "omega", -1, 1, 10, include_rejected=True)
    assert len(b.rows) > len(a.rows)
    assert all(r.admissible for r in a.rows)


def test_open_question_nr0_positive_omega_l1():
    # The l=0 series is empty for omega > 0, but l > 0 keeps an antiparticle level
    # E = -m - 2 omega l that passes every filter, including the unsquared residual.
    p = OscillatorParams(1, 0.3, 0)
    assert solve_spectrum(p, QuantumNumbers(0, 0)) == []
    levels = solve_spectrum(p, QuantumNumbers(0, 1))
    assert energies(levels) == pytest.approx([-1.6], rel=1e-12)
    assert levels[0].residual <= 1e-12 and levels[0].branch is Branch.ANTIPARTICLE
