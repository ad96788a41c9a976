import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdim.errors import DomainError, InvalidSpecError
from fracdim.experiments import CATALOG
from fracdim.surfaces import (
    Rect,
    SampledSurface,
    Surface,
    SurfaceKind,
    SurfaceSpec,
    block_ranges,
    make_surface,
    parse_surface_spec,
    range_over_cell,
    read_grid_csv,
    sample_surface,
    write_grid_csv,
)


def test_rect_validation():
    with pytest.raises(DomainError):
        Rect(1, 0, 0, 1)
    with pytest.raises(DomainError):
        Rect(-0.1, 1, 0, 1)
    r = Rect(0.1, 1, 0.2, 0.7)
    assert r.width == pytest.approx(0.9) and r.height == pytest.approx(0.5)
    assert r.contains(0.1, 0.7) and not r.contains(0.05, 0.5)


def test_catalog_values():
    sine = make_surface(SurfaceSpec(SurfaceKind.SINE_PRODUCT, (2, 2)))
    assert sine(0.25, 0.25) == pytest.approx(2.0, abs=1e-15)
    assert sine(0.25, 0.75) == pytest.approx(0.0, abs=1e-15)
    assert sine(0.5, 0.3) == pytest.approx(1.0, abs=1e-15)
    bil = make_surface(SurfaceSpec(SurfaceKind.BILINEAR, (1, 1, 0)))
    assert bil(0.3, 0.4) == pytest.approx(0.7)
    osc = make_surface(SurfaceSpec(SurfaceKind.OSCILLATORY))
    assert osc(0.0, 0.5) == 1.0
    assert osc(0.5, 0.5) == pytest.approx(1 + (0.5 * math.sin(2)) ** 2)
    const = make_surface(SurfaceSpec(SurfaceKind.CONSTANT, (3.0,)))
    assert np.all(const(np.zeros(4), 0.5) == 3.0)


def test_weierstrass_and_takagi_definitions():
    w = make_surface(SurfaceSpec(SurfaceKind.WEIERSTRASS, (2.0, 0.5, 3.0)))
    x, y = 0.3, 0.7
    terms = [2 ** (-0.5 * k) * math.sin(math.pi * 2**k * x) * math.sin(math.pi * 2**k * y)
             for k in range(4)]
    shift = sum(2 ** (-0.5 * k) for k in range(4))
    assert w(x, y) == pytest.approx(shift + sum(terms), rel=1e-14)
    t = make_surface(SurfaceSpec(SurfaceKind.TAKAGI, (0.5, 2.0)))
    tri = lambda u: abs(u - round(u))  # noqa: E731
    expected = sum(0.5**k * tri(2**k * x) * tri(2**k * y) for k in range(3))
    assert t(x, y) == pytest.approx(expected, rel=1e-14)


def test_catalog_is_nonnegative(catalog):
    xs = np.linspace(0, 1, 301)
    for f in catalog:
        assert np.all(f(xs[None, :], xs[:, None]) >= 0)


def test_low_rank_matches_pointwise(catalog):
    xs = np.linspace(0, 1, 37)
    ys = np.linspace(0, 1, 29) ** 2
    for f in catalog:
        grid = f.low_rank.evaluate_grid(xs, ys)
        np.testing.assert_allclose(grid, f(xs[None, :], ys[:, None]), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("text, kind, params", [
    ("sine:2,2", SurfaceKind.SINE_PRODUCT, (2.0, 2.0)),
    ("Oscillatory", SurfaceKind.OSCILLATORY, ()),
    ("weierstrass:2,0.5,20", SurfaceKind.WEIERSTRASS, (2.0, 0.5, 20.0)),
])
def test_parse_surface_spec(text, kind, params):
    spec = parse_surface_spec(text)
    assert spec.kind is kind and spec.params == params


@pytest.mark.parametrize("text", ["nope:1", "sine:2", "sine:a,b", "weierstrass:0.5,0.5,3",
                                  "takagi:0.4,5", "grid", "constant:nan"])
def test_parse_surface_spec_errors(text):
    with pytest.raises(InvalidSpecError):
        parse_surface_spec(text)


def test_labels():
    assert SurfaceSpec(SurfaceKind.SINE_PRODUCT, (2.0, 2.0)).label == "sine:2,2"
    assert SurfaceSpec(SurfaceKind.OSCILLATORY).label == "oscillatory"


def test_sampling_shape_and_values():
    f = make_surface(SurfaceSpec(SurfaceKind.BILINEAR, (1, 1, 0)))
    s = sample_surface(f, 4, oversample=2)
    assert s.values.shape == (9, 9)
    assert s.values[0, 0] == 0.0 and s.values[-1, -1] == pytest.approx(2.0)
    assert s.values[2, 6] == pytest.approx(0.75 + 0.25)
    with pytest.raises(ValueError):
        s.values[0, 0] = 1.0
    with pytest.raises(DomainError):
        sample_surface(f, 0)


def test_constant_has_zero_range():
    s = sample_surface(make_surface(SurfaceSpec(SurfaceKind.CONSTANT, (1.0,))), 8)
    assert all(range_over_cell(s, i, j) == 0.0 for i in range(8) for j in range(8))


def test_bilinear_cell_range():
    s = sample_surface(make_surface(SurfaceSpec(SurfaceKind.BILINEAR, (1, 1, 0))), 4)
    assert range_over_cell(s, 0, 0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(IndexError):
        range_over_cell(s, 4, 0)


def test_block_ranges_match_cellwise_loop(catalog):
    for f in catalog:
        s = sample_surface(f, 16, 4)
        blocks = block_ranges(s.values, 4)
        loop = np.array([[range_over_cell(s, i, j) for i in range(16)] for j in range(16)])
        np.testing.assert_array_equal(blocks, loop)


def test_refinement_never_decreases_the_range(catalog):
    for f in catalog:
        coarse = sample_surface(f, 8, 4)
        fine = sample_surface(f, 8, 8)
        for i, j in [(0, 0), (3, 5), (7, 7), (2, 6)]:
            # the finer sample set contains the coarser one
            assert range_over_cell(fine, i, j) >= range_over_cell(coarse, i, j)


def test_parent_range_bounds_children(catalog):
    for f in catalog:
        s = sample_surface(f, 16, 4)
        child = block_ranges(s.values, 4)
        parent = block_ranges(s.values, 8)
        for j in range(8):
            for i in range(8):
                kids = child[2 * j:2 * j + 2, 2 * i:2 * i + 2]
                assert parent[j, i] >= kids.max()
                assert parent[j, i] <= kids.sum() + 1e-12


@settings(max_examples=40, deadline=None)
@given(shift=st.floats(-100, 100, allow_nan=False), n=st.sampled_from([4, 8, 16]))
def test_ranges_are_shift_invariant(shift, n):
    f = make_surface(SurfaceSpec(SurfaceKind.TAKAGI, (0.6, 8.0)))
    g = Surface(f.rect, lambda x, y: f(x, y) + shift, "shifted")
    a, b = sample_surface(f, n), sample_surface(g, n)
    np.testing.assert_allclose(block_ranges(a.values, 4), block_ranges(b.values, 4),
                               rtol=0, atol=1e-12 * (1 + abs(shift)))


def test_grid_csv_round_trip(tmp_path, rng):
    data = rng.normal(size=(5, 7))
    path = tmp_path / "g.csv"
    write_grid_csv(path, data)
    np.testing.assert_array_equal(read_grid_csv(path), data)


def test_grid_csv_with_named_header(tmp_path):
    path = tmp_path / "g.csv"
    path.write_text("x_count,y_count\n3,2\n0,1,2\n3,4,5\n")
    np.testing.assert_array_equal(read_grid_csv(path), [[0, 1, 2], [3, 4, 5]])


@pytest.mark.parametrize("body", ["", "3,2\n0,1,2\n", "3,2\n0,1\n3,4\n", "a,b\n1,2\n"])
def test_grid_csv_errors(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(InvalidSpecError):
        read_grid_csv(path)


def test_grid_surface_interpolates_bilinearly(tmp_path):
    # samples of x + 2y on a 3x2 grid reproduce the function exactly
    xs, ys = np.linspace(0, 1, 3), np.linspace(0, 1, 2)
    data = xs[None, :] + 2 * ys[:, None]
    path = tmp_path / "g.csv"
    write_grid_csv(path, data)
    f = make_surface(parse_surface_spec(f"grid:{path}"))
    assert f.label == "grid:3x2"
    pts = np.array([0.1, 0.37, 0.5, 0.99])
    np.testing.assert_allclose(f(pts, pts[::-1]), pts + 2 * pts[::-1], rtol=1e-14)
    grid = f.low_rank.evaluate_grid(pts, pts)
    np.testing.assert_allclose(grid, pts[None, :] + 2 * pts[:, None], rtol=1e-14)


def test_sampled_surface_validation():
    rect = Rect(0, 1, 0, 1)
    with pytest.raises(DomainError):
        SampledSurface(rect, 2, 2, np.zeros((4, 4)))
    with pytest.raises(DomainError):
        SampledSurface(rect, 1, 1, np.array([[0.0, np.nan], [0.0, 0.0]]))


def test_catalog_specs_are_distinct():
    assert len({s.label for s in CATALOG}) == len(CATALOG)
