import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from koopkit.errors import DivergenceError, InvalidInputError, SingularityError
from koopkit.io import read_csv
from koopkit.newton import (
    CUBIC_W,
    QuadraticConjugacy,
    analytic_eigenfunction,
    cauchy_density,
    closed_form_real_iterate,
    closed_form_trajectory,
    cubic_coefficients,
    eigenvalue,
    fractal_iteration_grid,
    newton_map,
    newton_map_array,
    pixel_centers,
    real_trajectory,
)

finite = st.floats(-3, 3, allow_nan=False)


class TestNewtonMap:
    def test_examples(self):
        assert newton_map(1.0, 1.0) == 0
        assert newton_map(1.0, 2.0) == pytest.approx(0.75)
        assert newton_map(1.0, 1j) == pytest.approx(1j)
        assert newton_map(4.0, 2j) == pytest.approx(2j)

    def test_pole(self):
        with pytest.raises(SingularityError):
            newton_map(1.0, 0.0)

    def test_array(self):
        out = newton_map_array(1.0, [0.0, 2.0, 1j])
        assert np.isnan(out[0])
        np.testing.assert_allclose(out[1:], [0.75, 1j])

    def test_converges_off_real_line(self):
        z = 0.3 + 0.2j
        for _ in range(60):
            z = newton_map(1.0, z)
        assert z == pytest.approx(1j, abs=1e-12)
        z = 0.3 - 0.2j
        for _ in range(60):
            z = newton_map(1.0, z)
        assert z == pytest.approx(-1j, abs=1e-12)

    def test_real_line_sensitivity(self):
        a = real_trajectory(0.5, 61)
        b = real_trajectory(0.5 + 1e-12, 61)
        assert abs(a[1] - b[1]) < 1e-10
        assert np.max(np.abs(a - b)) > 0.1


class TestEigenfunctions:
    @given(st.integers(-2, 3), finite, finite.filter(lambda v: abs(v) > 1e-3))
    def test_eigen_equation(self, k, x, y):
        z = complex(x, y)
        if abs(z - 1j) < 1e-2 or abs(z + 1j) < 1e-2:
            return
        lhs = analytic_eigenfunction(1.0, k, newton_map(1.0, z))
        rhs = eigenvalue(k) * analytic_eigenfunction(1.0, k, z)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)

    def test_general_c(self):
        c = 2.0 + 1.0j
        z = np.array([0.4 + 0.9j, -1.2 + 0.3j])
        lhs = analytic_eigenfunction(c, 2, newton_map_array(c, z))
        np.testing.assert_allclose(lhs, 4 * analytic_eigenfunction(c, 2, z), rtol=1e-10)

    def test_vanishes_on_real_line(self):
        assert analytic_eigenfunction(1.0, 1, 0.7) == pytest.approx(0.0, abs=1e-15)

    def test_diverges_at_roots(self):
        with pytest.raises(DivergenceError):
            analytic_eigenfunction(1.0, 1, 1j)

    def test_eigenvalues(self):
        assert [eigenvalue(k) for k in (-2, -1, 1, 2)] == [0.25, 0.5, 2.0, 4.0]


class TestConjugacy:
    @given(st.floats(-2, 2).filter(lambda v: abs(v) > 0.1), finite, finite, finite, finite)
    def test_random_coefficients(self, a, b, d, x, y):
        q = QuadraticConjugacy(a, b, d)
        assert q.residual(complex(x, y)) < 1e-9 * (1 + abs(complex(x, y))) ** 2 * (1 + abs(a)) ** 3

    def test_complex_coefficients(self, rng):
        q = QuadraticConjugacy(1 + 2j, -0.5j, 3.0)
        z = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        assert np.max(q.residual(z)) < 1e-10

    def test_c_value(self):
        assert QuadraticConjugacy(1.0, 0.0, 1.0).c == 1.0
        assert QuadraticConjugacy(2.0, 2.0, 1.0).c == pytest.approx(2 + 1 - 1)

    def test_zero_leading(self):
        with pytest.raises(InvalidInputError):
            QuadraticConjugacy(0.0, 1.0, 1.0)

    def test_moebius_squares(self):
        q = QuadraticConjugacy(1.0, 0.0, 1.0)
        z = 0.3 + 0.8j
        assert q.h0(newton_map(q.c, z)) == pytest.approx(q.h0(z) ** 2)


class TestRealLine:
    def test_closed_form_one(self):
        assert closed_form_real_iterate(1.0, 0) == pytest.approx(1.0)
        assert closed_form_real_iterate(1.0, 1) == pytest.approx(0.0, abs=1e-15)
        with pytest.raises(SingularityError):
            closed_form_real_iterate(1.0, 2)
        with pytest.raises(SingularityError):
            real_trajectory(1.0, 3)

    def test_singular_start(self):
        with pytest.raises(SingularityError):
            closed_form_real_iterate(0.0, 3)
        with pytest.raises(SingularityError):
            closed_form_trajectory(0.0, 3)

    def test_negative_n(self):
        with pytest.raises(InvalidInputError):
            closed_form_real_iterate(0.5, -1)

    @pytest.mark.parametrize("z0", [0.5, -1.7, 3.2])
    def test_matches_direct_iteration(self, z0):
        direct = real_trajectory(z0, 21)
        closed = closed_form_trajectory(z0, 21)
        np.testing.assert_array_less(np.abs(direct - closed), 1e-8 * (1 + direct**2))
        assert closed_form_real_iterate(z0, 20) == pytest.approx(closed[20], rel=1e-12)

    def test_cauchy_normalized(self):
        from scipy.integrate import quad

        assert quad(cauchy_density, -np.inf, np.inf)[0] == pytest.approx(1.0)
        assert cauchy_density(0.0) == pytest.approx(1 / np.pi)


class TestFractal:
    def test_quadratic_half_planes(self):
        g = fractal_iteration_grid([1, 0, -1], resolution=40, tol=1e-10, max_iter=200)
        X, _ = g.points()
        expected = np.where(X > 0, int(np.argmin(np.abs(g.roots - 1))), int(np.argmin(np.abs(g.roots + 1))))
        np.testing.assert_array_equal(g.root_index, expected)
        np.testing.assert_allclose(g.basin_fractions(), [0.5, 0.5])

    def test_start_on_root(self):
        g = fractal_iteration_grid([1, 0, -1], points=np.array([1.0 + 0j, -1.0 + 0j]))
        np.testing.assert_array_equal(g.iterations, [0, 0])
        assert set(g.root_index.tolist()) == {0, 1}

    def test_singular_start_fails(self):
        g = fractal_iteration_grid([1, 0, -1], points=np.array([0.0 + 0j]))
        assert g.root_index[0] == -1

    def test_cubic_fractions(self):
        g = fractal_iteration_grid(cubic_coefficients(), resolution=100)
        np.testing.assert_allclose(np.sort(np.abs(g.roots)), np.sort([abs(CUBIC_W), abs(CUBIC_W), 1.0]))
        fr = g.basin_fractions()
        assert fr.sum() <= 1.0 + 1e-12
        assert fr.sum() > 0.95
        assert np.all(g.iterations <= 100)

    def test_pixel_centers(self):
        xs, ys = pixel_centers((-1, 1, 0, 2), 4)
        np.testing.assert_allclose(xs, [-0.75, -0.25, 0.25, 0.75])
        np.testing.assert_allclose(ys, [0.25, 0.75, 1.25, 1.75])

    def test_resolution(self):
        with pytest.raises(InvalidInputError):
            fractal_iteration_grid([1, 0, -1], resolution=0)

    def test_exports(self, tmp_path):
        g = fractal_iteration_grid(cubic_coefficients(), resolution=12)
        g.to_pgm(tmp_path / "a.pgm")
        g.to_ppm(tmp_path / "a.ppm")
        g.to_csv(tmp_path / "a.csv")
        pgm = (tmp_path / "a.pgm").read_bytes()
        assert pgm.startswith(b"P5\n12 12\n255\n") and len(pgm) == len(b"P5\n12 12\n255\n") + 144
        ppm = (tmp_path / "a.ppm").read_bytes()
        assert ppm.startswith(b"P6\n12 12\n255\n") and len(ppm) == len(b"P6\n12 12\n255\n") + 432
        names, rows = read_csv(tmp_path / "a.csv")
        assert names == ["x", "y", "iterations", "root_index"]
        assert rows.shape == (144, 4)
        np.testing.assert_array_equal(rows[:, 2], g.iterations.ravel())
