import math

import numpy as np
import pytest

from proxilift.core_spaces import LinearMap, Norm, Space, Subspace, norm, operator_norm
from proxilift.function_space import (
    ClosedSet1D,
    GridFunction,
    GridFunction2D,
    UnalignedGrid,
    aligned_grid_for,
    annulus_predicate,
    componentwise_selection,
    d_mask,
    product_distance,
    product_norm_value,
    ray_segments,
    read_grid2d_csv,
    read_grid_csv,
    star_selection_1d,
    star_selection_2d,
    vanishing_ideal_distance,
    write_grid2d_csv,
    write_grid_csv,
)
from proxilift.metric_projection import distance
from proxilift.selection_engine import find_linear_selection, verify_selection

D_PAIR = ClosedSet1D.parse("[0.2,0.4];[0.6,0.8]")


def test_closed_set_parse_and_merge():
    d = ClosedSet1D.parse("[0.5,0.7];[0.1,0.2]")
    assert d.intervals == ((0.1, 0.2), (0.5, 0.7))
    touching = ClosedSet1D(((0.1, 0.3), (0.3, 0.5)))
    assert touching.intervals == ((0.1, 0.5),)
    point = ClosedSet1D(((0.25, 0.25),))
    assert point.intervals == ((0.25, 0.25),)
    with pytest.raises(ValueError):
        ClosedSet1D(())
    with pytest.raises(ValueError):
        ClosedSet1D(((-0.1, 0.5),))
    roundtrip = ClosedSet1D.parse(d.format())
    assert roundtrip.intervals == d.intervals


def test_aligned_grid_refinement():
    # endpoints at multiples of 1/4 fit the default grid as-is
    quarter = ClosedSet1D(((0.25, 0.5),))
    assert aligned_grid_for(quarter, 1025) == 1025
    # 0.2-style endpoints force refinement until the snap shift is < 1e-6
    assert aligned_grid_for(D_PAIR, 1025) == 2**19 + 1


def test_star_selection_requires_alignment():
    f = GridFunction(np.zeros(64))  # 0.2 is not a multiple of 1/63
    with pytest.raises(UnalignedGrid):
        star_selection_1d(f, D_PAIR)


def test_star_selection_identity_formula():
    n = aligned_grid_for(D_PAIR, 1025)
    f = GridFunction.from_callable(lambda x: x, n)
    f1 = star_selection_1d(f, D_PAIR)
    xs = f.grid()
    mask = d_mask(D_PAIR, n)
    # exact zeros on D
    assert float(np.max(np.abs(f1.values[mask]))) == 0.0
    # pointwise oracle: direct evaluation of the defining formula
    lo1 = xs[mask][0]
    hi2 = xs[mask][-1]
    inner = ~mask & (xs > lo1) & (xs < hi2)
    gap_lo = 0.4006  # inside the gap, away from snapped endpoints
    gap_hi = 0.5994
    sel = inner & (xs > gap_lo) & (xs < gap_hi)
    t2 = xs[mask & (xs < 0.5)][-1]
    t3 = xs[mask & (xs > 0.5)][0]
    lam = (xs[sel] - t2) / (t3 - t2)
    oracle = xs[sel] - t2 + lam * (t2 - t3)
    assert np.allclose(f1.values[sel], oracle, atol=1e-12)
    # outside: shifted by the boundary value
    left = xs < lo1
    assert np.allclose(f1.values[left], xs[left] - lo1, atol=1e-12)
    right = xs > hi2
    assert np.allclose(f1.values[right], xs[right] - hi2, atol=1e-12)
    # distance attained
    resid = np.max(np.abs(f.values - f1.values))
    assert resid == pytest.approx(vanishing_ideal_distance(f, D_PAIR), abs=1e-12)
    assert resid == pytest.approx(0.8, abs=1e-6)


def test_star_selection_fixes_the_ideal():
    n = aligned_grid_for(D_PAIR, 257)
    mask = d_mask(D_PAIR, n)
    rng = np.random.default_rng(3)
    vals = rng.standard_normal(n)
    vals[mask] = 0.0
    f = GridFunction(vals)
    f1 = star_selection_1d(f, D_PAIR)
    assert float(np.max(np.abs(f1.values - f.values))) == 0.0


def test_star_selection_constants():
    n = aligned_grid_for(D_PAIR, 1025)
    c = GridFunction.from_callable(lambda x: np.full_like(x, -2.3), n)
    c1 = star_selection_1d(c, D_PAIR)
    assert c1.sup_norm() == 0.0
    assert float(np.max(np.abs(c.values - c1.values))) == pytest.approx(2.3)
    assert vanishing_ideal_distance(c, D_PAIR) == pytest.approx(2.3)


def test_star_selection_linearity_exact():
    n = aligned_grid_for(D_PAIR, 257)
    rng = np.random.default_rng(11)
    for _ in range(10):
        a, b = rng.uniform(-3, 3, 2)
        f = GridFunction(rng.standard_normal(n))
        g = GridFunction(rng.standard_normal(n))
        combo = GridFunction(a * f.values + b * g.values)
        lhs = star_selection_1d(combo, D_PAIR).values
        rhs = a * star_selection_1d(f, D_PAIR).values + b * star_selection_1d(g, D_PAIR).values
        assert float(np.max(np.abs(lhs - rhs))) <= 1e-12


def test_single_point_component():
    d = ClosedSet1D(((0.5, 0.5),))
    n = aligned_grid_for(d, 65)
    f = GridFunction.from_callable(lambda x: np.sin(3 * x), n)
    f1 = star_selection_1d(f, d)
    mid = (n - 1) // 2
    assert f1.values[mid] == 0.0
    resid = np.max(np.abs(f.values - f1.values))
    assert resid == pytest.approx(abs(math.sin(1.5)), abs=1e-9)


def test_star_2d_constants_vanish():
    f = GridFunction2D.from_callable(lambda x, y: np.full_like(x, 4.0), 33)
    res = star_selection_2d(f, annulus_predicate(0.4, 0.6))
    covered = ~res.uncovered
    assert float(np.max(np.abs(res.f1.values[covered]))) <= 1e-12
    assert int(res.uncovered.sum()) == 0


def test_star_2d_fixes_radial_ideal():
    # f vanishes on a band strictly containing D, so every anchor value is 0
    def f_fn(x, y):
        r = np.hypot(x, y)
        return np.where((r > 0.35) & (r < 0.65), 0.0, (r - 0.5) ** 2)

    f = GridFunction2D.from_callable(f_fn, 49)
    res = star_selection_2d(f, annulus_predicate(0.4, 0.6))
    assert float(np.max(np.abs(res.f1.values - f.values))) <= 1e-12


def test_star_2d_matches_per_ray_rule():
    n = 41
    pred = lambda x, y: (np.hypot(x, y) >= 0.3) & (np.hypot(x, y) <= 0.45) | (
        np.hypot(x, y) >= 0.7
    ) & (np.hypot(x, y) <= 0.8)
    f = GridFunction2D.from_callable(lambda x, y: np.hypot(x, y), n)
    res = star_selection_2d(f, pred)
    h = 1.0 / (n - 1)
    # check a few primitive rays against a scalar reimplementation
    for direction in ((1, 0), (1, 1), (2, 1), (1, 3)):
        segs = ray_segments(pred, direction, n)
        assert segs, "rays through the square meet the annuli"
        dx, dy = direction
        ln = math.hypot(dx, dy)
        m = 1
        while dx * m < n and dy * m < n:
            ix, iy = dx * m, dy * m
            r = math.hypot(ix * h, iy * h)
            val = f.values[ix, iy]
            if pred(np.array([ix * h]), np.array([iy * h]))[0]:
                expect = 0.0
            elif r < segs[0][0]:
                expect = val - segs[0][0]  # f is the radius itself
            elif r > segs[-1][1]:
                expect = val - segs[-1][1]
            else:
                expect = None
                for (lo, hi) in segs:
                    if lo - 1e-12 <= r <= hi + 1e-12:
                        expect = 0.0
                        break
                if expect is None:
                    for (_, hi), (nlo, _) in zip(segs, segs[1:]):
                        if hi < r < nlo:
                            lam = (r - hi) / (nlo - hi)
                            expect = val - hi + lam * (hi - nlo)
                            break
            assert expect is not None
            # anchors are bilinear samples of the exact radius, accurate to
            # the interpolation error of |x| on the grid
            assert res.f1.values[ix, iy] == pytest.approx(expect, abs=5e-4)
            m += 1


def test_star_2d_reports_uncovered():
    # the band is narrower than the march step and avoids its multiples, so
    # rays pass through undetected and the points are reported
    pred = annulus_predicate(0.91, 0.93)
    f = GridFunction2D.from_callable(lambda x, y: x + y, 17)
    res = star_selection_2d(f, pred)
    assert int(res.uncovered.sum()) > 0
    assert np.isfinite(res.max_adjacent_jump)


def test_componentwise_selection_and_product_distance():
    sp = Space(2, Norm.SUP)
    j = Subspace(sp, [[1.0], [0.0]])
    cert = find_linear_selection(sp, j)
    comps = [np.array([1.0, 2.0]), np.array([-3.0, 0.5]), np.array([0.0, -1.0])]
    out = componentwise_selection(cert, comps, Norm.SUP)
    assert np.allclose(out[0], [1.0, 0.0])
    assert np.allclose(out[1], [-3.0, 0.0])
    # product distance = max of |second coordinates| and it is attained
    dist = product_distance(sp, j, comps, Norm.SUP)
    assert dist == pytest.approx(2.0)
    attained = max(norm(sp, c - o) for c, o in zip(comps, out))
    assert attained == pytest.approx(dist, abs=1e-12)
    # components already in J are untouched
    inside = [np.array([4.0, 0.0]), np.array([-1.0, 0.0])]
    assert np.allclose(componentwise_selection(cert, inside, Norm.SUM), inside)


def test_componentwise_factor_two_bound():
    sp = Space(3, Norm.SUP)
    j = Subspace(sp, [[1.0], [1.0], [0.0]])
    cert = find_linear_selection(sp, j)
    rng = np.random.default_rng(5)
    for kind in (Norm.SUP, Norm.SUM):
        comps = [rng.uniform(-2, 2, 3) for _ in range(4)]
        out = componentwise_selection(cert, comps, kind)
        assert product_norm_value(sp, out, kind) <= 2 * product_norm_value(
            sp, comps, kind
        ) + 1e-9
        # the aggregate distance is attained componentwise
        dist = product_distance(sp, j, comps, kind)
        resid = [c - o for c, o in zip(comps, out)]
        agg = product_norm_value(sp, resid, kind)
        assert agg == pytest.approx(dist, abs=1e-9)


def test_componentwise_operator_space_case():
    # maps from a 2-dim sum-norm space are two columns; applying the
    # selection per column selects a nearest map into L(Y, J)
    sp = Space(2, Norm.SUP)
    j = Subspace(sp, [[1.0], [0.0]])
    cert = find_linear_selection(sp, j)
    y = Space(2, Norm.SUM)
    t = LinearMap(np.array([[1.0, -2.0], [3.0, 0.5]]), y, sp)
    cols = [t.matrix[:, i] for i in range(2)]
    out = componentwise_selection(cert, cols, Norm.SUP)
    tj = LinearMap(np.column_stack(out), y, sp)
    gap = operator_norm(LinearMap(t.matrix - tj.matrix, y, sp))
    best = product_distance(sp, j, cols, Norm.SUP)
    assert gap == pytest.approx(best, abs=1e-9)


def test_componentwise_rejects_uncertified():
    sp = Space(3, Norm.SUP)
    j = Subspace(sp, [[1.0], [1.0], [1.0]])
    bad = verify_selection(sp, j, np.full((3, 3), 1 / 3))
    with pytest.raises(ValueError):
        componentwise_selection(bad, [np.zeros(3)], Norm.SUP)


def test_csv_roundtrips(tmp_path):
    f = GridFunction(np.linspace(-1, 1, 33) ** 2)
    path = tmp_path / "f.csv"
    write_grid_csv(path, f)
    back = read_grid_csv(path)
    assert np.array_equal(back.values, f.values)
    f2 = GridFunction2D.from_callable(lambda x, y: x * y, 9)
    path2 = tmp_path / "f2.csv"
    write_grid2d_csv(path2, f2)
    back2 = read_grid2d_csv(path2)
    assert np.array_equal(back2.values, f2.values)


def test_grid_csv_rejects_nonuniform(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,value\n0,1\n0.3,2\n1,3\n")
    with pytest.raises(ValueError):
        read_grid_csv(path)


def test_vanishing_distance_matches_subspace_distance():
    """On a small grid the ideal is a plain coordinate subspace, so the
    general engine provides an independent check of the shortcut."""
    d = ClosedSet1D(((0.25, 0.5),))
    n = 9
    mask = d_mask(d, n)
    space = Space(n, Norm.SUP)
    basis = np.eye(n)[:, ~mask]
    j = Subspace(space, basis)
    rng = np.random.default_rng(7)
    for _ in range(10):
        f = GridFunction(np.round(rng.uniform(-2, 2, n), 3))
        assert vanishing_ideal_distance(f, d) == pytest.approx(
            distance(space, j, f.values), abs=1e-9
        )
