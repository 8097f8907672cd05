import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from koopkit.dictionary import (
    DEFAULT_DELTA,
    Dictionary,
    MonomialDictionary,
    build_dictionary,
    evaluate_matrix,
    load_dictionary,
    thin_plate_eval,
)
from koopkit.errors import InvalidInputError
from koopkit.numerics import kmeans
from koopkit.systems import random_orthogonal


class TestThinPlate:
    def test_at_center(self):
        assert thin_plate_eval([1.0, 2.0], 1e-3, [1.0, 2.0]) == 0.0

    def test_unit_distance(self):
        assert thin_plate_eval([0.0], 1e-3, [1.0]) == pytest.approx(np.log(1.001), rel=1e-14)
        assert thin_plate_eval([0.0], 1e-3, [1.0]) == pytest.approx(9.995e-4, rel=1e-4)

    def test_log_term_one(self):
        r = np.e - 1e-3
        assert thin_plate_eval([0.0, 0.0], 1e-3, [r, 0.0]) == pytest.approx(r * r, rel=1e-14)
        assert r * r == pytest.approx(7.384, abs=1e-3)

    def test_delta_positive(self):
        with pytest.raises(InvalidInputError):
            thin_plate_eval([0.0], 0.0, [1.0])


class TestDictionary:
    def test_sizes(self, rng):
        data = rng.uniform(-4, 4, (800, 2))
        assert build_dictionary(data, 500, seed=0).size == 503
        data3 = rng.uniform(-1, 1, (400, 3))
        assert build_dictionary(data3, 125, seed=0).size == 129

    def test_size_100d(self, rng):
        d = Dictionary(rng.standard_normal((625, 100)))
        assert d.size == 726 and len(d.names) == 726

    def test_order(self, rng):
        d = Dictionary(rng.standard_normal((3, 2)))
        assert d.names == ["rbf_0", "rbf_1", "rbf_2", "x_1", "x_2", "1"]
        np.testing.assert_array_equal(d.coordinate_columns, [3, 4])
        assert d.constant_column == 5

    def test_centers_are_kmeans_centers(self, rng):
        data = rng.standard_normal((200, 2))
        d = build_dictionary(data, 10, seed=4)
        np.testing.assert_array_equal(d.centers, kmeans(data, 10, 4)[0])

    def test_const_only(self, rng):
        d = Dictionary(np.empty((0, 2)), include_coords=False, dim=2)
        np.testing.assert_array_equal(evaluate_matrix(d, rng.standard_normal((3, 2))), np.ones((3, 1)))

    def test_coords_only(self):
        d = Dictionary(np.empty((0, 2)), include_const=False, dim=2)
        np.testing.assert_array_equal(evaluate_matrix(d, np.eye(2)), np.eye(2))

    def test_missing_dim(self):
        with pytest.raises(InvalidInputError):
            Dictionary(np.empty((0, 0)))

    def test_elementwise_oracle(self, rng):
        data = rng.uniform(-4, 4, (600, 2))
        d = build_dictionary(data, 500, seed=1)
        pts = rng.uniform(-4, 4, (10, 2))
        g = evaluate_matrix(d, pts)
        assert g.shape == (10, 503)
        for i in range(10):
            for j in range(0, 500, 37):
                assert g[i, j] == pytest.approx(thin_plate_eval(d.centers[j], DEFAULT_DELTA, pts[i]),
                                                rel=1e-9, abs=1e-12)
            np.testing.assert_array_equal(g[i, 500:502], pts[i])
            assert g[i, 502] == 1.0

    def test_rows_match_observables(self, rng):
        d = Dictionary(rng.standard_normal((8, 3)))
        pts = rng.standard_normal((100, 3))
        g = d.evaluate(pts)
        for j in (0, 5, 8, 11):
            f = d.observable(j)
            np.testing.assert_allclose(g[:, j], [f(p) for p in pts])

    def test_dimension_mismatch(self, rng):
        d = Dictionary(rng.standard_normal((4, 2)))
        with pytest.raises(InvalidInputError):
            d.evaluate(np.ones((3, 3)))

    @given(st.integers(0, 10_000))
    def test_rigid_motion_invariance(self, seed):
        rng = np.random.default_rng(seed)
        centers = rng.standard_normal((6, 3))
        pts = rng.standard_normal((5, 3))
        q = random_orthogonal(3, seed)
        t = rng.standard_normal(3)
        a = Dictionary(centers, include_coords=False, include_const=False).evaluate(pts)
        b = Dictionary(centers @ q.T + t, include_coords=False, include_const=False).evaluate(pts @ q.T + t)
        np.testing.assert_allclose(a, b, atol=1e-10)

    def test_save_load(self, tmp_path, rng):
        d = build_dictionary(rng.standard_normal((50, 2)), 5, seed=2)
        d.save(tmp_path)
        back = load_dictionary(tmp_path)
        pts = rng.standard_normal((7, 2))
        np.testing.assert_array_equal(back.evaluate(pts), d.evaluate(pts))
        assert back.config() == d.config()


class TestMonomials:
    def test_order_1d(self):
        d = MonomialDictionary(1, 3)
        np.testing.assert_allclose(d.evaluate(np.array([[2.0]])), [[1, 2, 4, 8]])
        assert d.names == ["1", "x_1", "x_1^2", "x_1^3"]

    def test_order_2d(self):
        d = MonomialDictionary(2, 2)
        assert d.names == ["1", "x_1", "x_2", "x_1^2", "x_1*x_2", "x_2^2"]
        np.testing.assert_array_equal(d.coordinate_columns, [1, 2])

    @given(st.floats(-3, 3), st.floats(-3, 3))
    def test_matches_direct_powers(self, a, b):
        d = MonomialDictionary(2, 3)
        row = d.evaluate(np.array([[a, b]]))[0]
        for e, v in zip(d.exponents, row):
            assert v == pytest.approx(a ** e[0] * b ** e[1], abs=1e-12)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            MonomialDictionary(0, 2)

    def test_save_load(self, tmp_path):
        MonomialDictionary(2, 3).save(tmp_path)
        assert load_dictionary(tmp_path).size == 10
