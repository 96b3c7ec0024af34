import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isohazard.gcm import (
    CusumDiagram,
    DomainError,
    InvalidDiagramError,
    PiecewiseLinearFn,
    gcm,
    gcm_slopes_as_isotonic,
    isotonic_slopes_per_gap,
    left_derivative,
    right_derivative,
)
from isohazard.oracles import gcm_bruteforce, isotonic_chord_slopes

from conftest import random_diagram


def diagram(points):
    return CusumDiagram.from_points(points)


class TestDiagram:
    def test_needs_two_points(self):
        with pytest.raises(InvalidDiagramError, match="at least 2"):
            diagram([(0, 0)])

    @pytest.mark.parametrize("pts", [
        [(0, 0), (0, 1)],
        [(0, 0), (2, 1), (1, 3)],
    ])
    def test_rejects_non_increasing_x(self, pts):
        with pytest.raises(InvalidDiagramError):
            diagram(pts)

    def test_rejects_nonfinite(self):
        with pytest.raises(InvalidDiagramError):
            diagram([(0, 0), (1, np.inf)])

    def test_is_immutable(self):
        d = diagram([(0, 0), (1, 1)])
        with pytest.raises(ValueError):
            d.x[0] = 5.0


class TestGcm:
    def test_pooled_middle_point(self):
        # (1, 2) lies above the hull; (2, 2) is collinear with (0, 0)-(3, 3)
        f = gcm(diagram([(0, 0), (1, 2), (2, 2), (3, 3)]))
        assert f.knots == [(0.0, 0.0), (3.0, 3.0)]
        ref = PiecewiseLinearFn([0, 2, 3], [0, 2, 3])
        xs = np.linspace(0, 3, 31)
        np.testing.assert_allclose(f(xs), ref(xs), atol=1e-15)

    def test_convex_input_unchanged(self):
        pts = [(0, 0), (1, 1), (2, 3)]
        assert gcm(diagram(pts)).knots == [(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)]

    def test_two_points(self):
        assert gcm(diagram([(0, 0), (5, 1)])).knots == [(0.0, 0.0), (5.0, 1.0)]

    def test_accepts_point_list(self):
        assert gcm([(0, 0), (1, -1), (2, 0)]).knots == [(0.0, 0.0), (1.0, -1.0), (2.0, 0.0)]

    def test_near_collinear_knot_dropped(self):
        f = gcm(diagram([(0, 0), (1, 1 - 1e-15), (2, 2)]))
        assert len(f.knots) == 2

    def test_random_against_bruteforce(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 60))
            x, y = random_diagram(rng, n)
            f = gcm(CusumDiagram(x, y))
            np.testing.assert_allclose(f(x), gcm_bruteforce(x, y), atol=1e-12, rtol=0)

    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=40))
    def test_properties(self, ys):
        x = np.arange(len(ys), dtype=float)
        y = np.asarray(ys)
        f = gcm(CusumDiagram(x, y))
        # first and last points are knots, knots are input points
        assert f.knots_x[0] == x[0] and f.knots_x[-1] == x[-1]
        assert set(f.knots_x).issubset(set(x))
        assert np.all(f(x) <= y + 1e-9 * (1 + np.abs(y)))
        assert np.all(np.diff(f.slopes) >= -1e-9 * (1 + np.abs(f.slopes[1:])))

    def test_idempotent(self, rng):
        x, y = random_diagram(rng, 50)
        f = gcm(CusumDiagram(x, y))
        g = gcm(CusumDiagram(f.knots_x, f.knots_y))
        assert g.knots == f.knots


class TestDerivatives:
    f = PiecewiseLinearFn([0, 2, 3], [0, 2, 3])
    g = PiecewiseLinearFn([0, 1, 2], [0, 0, 2])

    @pytest.mark.parametrize("x, want", [(1, 1), (2, 1), (3, 1)])
    def test_left(self, x, want):
        assert left_derivative(self.f, x) == want

    def test_sides_at_kink(self):
        assert left_derivative(self.g, 1.0) == 0.0
        assert right_derivative(self.g, 1.0) == 2.0

    @pytest.mark.parametrize("fn, x", [(left_derivative, 0.0), (right_derivative, 2.0),
                                       (left_derivative, 2.5), (right_derivative, -1.0)])
    def test_domain(self, fn, x):
        with pytest.raises(DomainError):
            fn(self.g, x)

    def test_evaluation_outside_domain(self):
        with pytest.raises(DomainError):
            self.g(2.1)

    def test_inverse(self):
        assert self.g.inverse(0.0) == 0.0  # generalized inverse: leftmost point
        assert self.g.inverse(1.0) == 1.5
        np.testing.assert_allclose(self.f.inverse(self.f(np.linspace(0, 3, 7))), np.linspace(0, 3, 7))


class TestIsotonic:
    def test_pooled_pair(self):
        assert gcm_slopes_as_isotonic(diagram([(0, 0), (1, 2), (2, 2)])) == [((0.0, 2.0), 1.0)]

    def test_convex_gives_chord_slopes(self):
        pieces = gcm_slopes_as_isotonic(diagram([(0, 0), (1, 0), (2, 0.693)]))
        assert [s for _, s in pieces] == pytest.approx([0.0, 0.693])

    def test_random_against_pava(self, rng):
        for _ in range(200):
            x, y = random_diagram(rng, int(rng.integers(2, 80)))
            d = CusumDiagram(x, y)
            np.testing.assert_allclose(
                isotonic_slopes_per_gap(d), isotonic_chord_slopes(x, y), atol=1e-10, rtol=1e-12)
