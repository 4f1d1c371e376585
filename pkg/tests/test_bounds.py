import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from treespec.bounds import (REPORT_COLUMNS, BoundViolation, bound_average, bound_diameter,
                             bound_kkmm, bound_lmax, check_all, equality_k, gd_equality_index,
                             has_independent_pair, monotonicity_check, rationally_independent,
                             report_csv, strictness_expected)
from treespec.exact import SQRT2, QSqrt2
from treespec.graph import (LengthModel, Spectrum, attach_pendant, loop_graph, path_graph,
                            random_tree, star_graph)
from treespec.secular import eigenvalues

PI2 = math.pi ** 2


def report(g, k=6, **kw):
    return check_all(g, k, eigenvalues(g, k + 1), **kw)


def test_bound_formulas():
    assert bound_average(2, 3, 3) == pytest.approx(PI2)
    assert bound_diameter(3, 2) == pytest.approx(9 * PI2 / 4)
    assert bound_lmax(1, 2) == pytest.approx(PI2 / 4)
    assert bound_kkmm(2, 1) == pytest.approx(4 * PI2)
    with pytest.raises(ValueError):
        bound_average(1, 1, 1)
    with pytest.raises(ValueError):
        bound_diameter(1, 0)


def test_independence():
    assert rationally_independent(QSqrt2(1), SQRT2)
    assert not rationally_independent(QSqrt2(Fraction(1, 2)), QSqrt2(3))
    assert has_independent_pair(star_graph([1, 1, SQRT2]))
    assert not has_independent_pair(star_graph([SQRT2, 2 * SQRT2]))


def test_gd_index():
    idx = gd_equality_index(path_graph([Fraction(1, 2), Fraction(3, 2)]))
    assert (idx.x, idx.k) == (2, 4)
    idx = gd_equality_index(star_graph([Fraction(2, 3), Fraction(4, 9), 2]))
    assert (idx.x, idx.k) == (Fraction(9, 2), 14)
    with pytest.raises(ValueError):
        gd_equality_index(path_graph([1, SQRT2]))
    assert equality_k(path_graph([SQRT2, 3 * SQRT2])) == 4


def test_equilateral_star_attains_every_tree_bound():
    r = report(star_graph([1, 1, 1]), 3)
    row = r.row(1)
    assert row.eq_avg and row.eq_diam
    assert not r.row(2).eq_avg


def test_star_with_sqrt2_strict():
    r = report(star_graph([1, 1, SQRT2]), 5)
    assert r.strict_expected
    assert not any(row.eq_dirichlet for row in r.rows)
    assert all(row.lambda_kD - row.lam > 1e-6 for row in r.rows)


def test_rational_tree_equality_index():
    r = report(path_graph([Fraction(1, 2), Fraction(3, 2)]), 5)
    assert r.equality_k == 4
    assert r.row(4).eq_dirichlet
    assert r.row(4).lam == pytest.approx(4 * PI2, rel=1e-9)


def test_loop_has_no_tree_bounds():
    r = report(loop_graph(1), 2)
    row = r.row(1)
    assert row.bound_avg is None and row.bound_diam is None and row.bound_lmax is None
    assert row.sat_dirichlet is None
    assert row.sat_kkmm and row.eq_kkmm
    assert r.row(2).bound_kkmm is None


def test_loop_violates_lmax_estimate():
    # lambda_2 = 4 pi^2 / L^2 exceeds pi^2 / L^2 on a loop
    lam2 = eigenvalues(loop_graph(1), 2).nth(2)
    assert lam2 > bound_lmax(1, 1)


def test_single_edge_tree():
    r = report(path_graph([2]), 4)
    assert r.row(1).bound_avg is None
    assert r.row(1).eq_diam and r.row(1).eq_lmax


def test_wrong_spectrum_raises():
    g = star_graph([1, 1, 1])
    fake = Spectrum((0.0, 3.0, 3.0), "secular")
    with pytest.raises(BoundViolation):
        check_all(g, 2, fake)
    assert check_all(g, 2, fake, strict=False).violations()


def test_csv_columns():
    text = report_csv([report(star_graph([1, 1, 1]), 2, graph_id="s3")])
    lines = text.splitlines()
    assert lines[0].split(",") == list(REPORT_COLUMNS)
    assert lines[1].startswith("s3,1,")
    assert len(lines) == 3


def test_neumann_identity_and_interlacing():
    r = report(star_graph([1, Fraction(1, 3), SQRT2]), 6)
    for row in r.rows:
        assert row.lambda_Nk1 <= row.lam * (1 + 1e-9) + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1))
def test_bounds_hold_on_random_trees(n, seed):
    g = random_tree(n, LengthModel(with_sqrt2=True), seed)
    r = report(g, 8, strict=False)
    assert r.violations() == []
    if r.strict_expected:
        assert not any(row.eq_dirichlet for row in r.rows)
    if r.equality_k is not None and r.equality_k <= 8:
        assert r.row(r.equality_k).eq_dirichlet


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**32 - 1), st.sampled_from([Fraction(1, 3), 2, 5]))
def test_bound_flags_scale_invariant(n, seed, c):
    g = random_tree(n, seed=seed)
    a = report(g, 5)
    b = report(g.scaled(c), 5)
    for ra, rb in zip(a.rows, b.rows):
        for flag in ("eq_avg", "eq_diam", "eq_lmax", "eq_dirichlet", "sat_avg", "sat_dirichlet"):
            assert getattr(ra, flag) == getattr(rb, flag)
        assert rb.bound_diam * float(c) ** 2 == pytest.approx(ra.bound_diam)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_equilateral_stars_flagged(m):
    assert report(star_graph([Fraction(3, 2)] * m), 1).row(1).eq_avg


def test_two_edge_paths_attain_average_bound():
    # lambda_{k+1} = k^2 pi^2 / L^2 equals the average bound for |E| = 2 at every k
    r = report(path_graph([1, 2]), 3)
    assert all(row.eq_avg for row in r.rows)


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 9), st.integers(0, 2**32 - 1))
def test_average_equality_only_for_equilateral_stars(n, seed):
    g = random_tree(n, LengthModel(max_numerator=3, max_denominator=2), seed)
    r = report(g, 1)
    assert r.row(1).eq_avg == r.equilateral_star


def test_monotonicity_path_host_strict():
    host = path_graph([1, Fraction(1, 2)])
    ext = attach_pendant(host, "v2", path_graph([Fraction(1, 3)]), "v0")
    assert strictness_expected(host, ext)
    rec = monotonicity_check(host, ext, 6)
    assert min(rec.margins[1:]) > 1e-6


def test_monotonicity_interior_attachment_not_strict():
    host = path_graph([1, 1])
    ext = attach_pendant(host, "v1", path_graph([1]), "v0")
    assert not strictness_expected(host, ext)
    rec = monotonicity_check(host, ext, 4)
    # the antisymmetric path mode vanishes at the midpoint and survives
    assert min(rec.margins) == pytest.approx(0.0, abs=1e-8)


def test_monotonicity_detects_bad_spectra():
    host = path_graph([1])
    ext = attach_pendant(host, "v1", path_graph([1]), "v0")
    hs = Spectrum((0.0, 1.0), "secular")
    es = Spectrum((0.0, 2.0), "secular")
    with pytest.raises(BoundViolation):
        monotonicity_check(host, ext, 2, hs, es)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 7), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_monotonicity_random(nh, np_, seed):
    host = random_tree(nh, LengthModel(with_sqrt2=True), seed)
    pend = random_tree(np_, seed=seed + 1)
    ext = attach_pendant(host, host.vertices[seed % nh], pend, pend.vertices[0])
    rec = monotonicity_check(host, ext, 6)
    assert all(m >= -1e-8 for m in rec.margins)
