import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import majorsphere.configurations as cf
from majorsphere.configurations import DistanceFunctional, SphericalConfiguration
from majorsphere.errors import DimensionError, MajorsphereError, ParameterRangeError, SingularityError


def brute_pairs(P, fn):
    """Double loop over unordered pairs; independent of the vectorised code."""
    return sorted(fn(P[i], P[j]) for i, j in combinations(range(len(P)), 2))


def random_config(rng, m, n):
    X = rng.standard_normal((m, n))
    return SphericalConfiguration(X, normalize=True)


class TestSphericalConfiguration:
    def test_rejects_off_sphere(self):
        with pytest.raises(MajorsphereError, match="point 1"):
            SphericalConfiguration([[1.0, 0.0], [1.0, 1.0]])

    def test_normalize(self):
        X = SphericalConfiguration([[3.0, 4.0]], normalize=True)
        np.testing.assert_allclose(X.points, [[0.6, 0.8]])

    def test_zero_vector(self):
        with pytest.raises(MajorsphereError):
            SphericalConfiguration([[0.0, 0.0]], normalize=True)

    def test_bad_shape(self):
        with pytest.raises(DimensionError):
            SphericalConfiguration(np.ones((2, 2, 2)))

    def test_readonly(self):
        X = cf.polygon(3)
        with pytest.raises(ValueError):
            X.points[0, 0] = 2.0

    def test_gram_symmetric_unit_diagonal(self):
        X = random_config(np.random.default_rng(0), 7, 4)
        g = X.gram()
        np.testing.assert_array_equal(g, g.T)
        np.testing.assert_allclose(np.diag(g), 1.0, atol=1e-15)


class TestDistanceFunctional:
    @pytest.mark.parametrize("text,kind", [("r", "r"), ("r2", "r2"), ("phi", "phi"), ("s:2.5", "s")])
    def test_parse(self, text, kind):
        assert DistanceFunctional.parse(text).kind.value == kind

    def test_parse_bad(self):
        for bad in ("x", "s:", "s:abc", "s:1:2"):
            with pytest.raises(MajorsphereError):
                DistanceFunctional.parse(bad)

    def test_profiles_match_brute_force(self):
        X = random_config(np.random.default_rng(1), 6, 3).points
        S = SphericalConfiguration(X)
        oracles = {
            "r": lambda p, q: float(np.sqrt(np.sum((p - q) ** 2))),
            "r2": lambda p, q: float(np.sum((p - q) ** 2)),
            "phi": lambda p, q: float(np.arccos(np.clip(p @ q, -1, 1))),
            "s:1.5": lambda p, q: float(np.sum((p - q) ** 2)) ** 0.75,
            "s:-1": lambda p, q: -1.0 / float(np.sqrt(np.sum((p - q) ** 2))),
        }
        for text, fn in oracles.items():
            got = cf.distance_profile(S, DistanceFunctional.parse(text)).sorted_view()
            np.testing.assert_allclose(got, brute_pairs(X, fn), rtol=1e-12, err_msg=text)

    def test_log_scale(self):
        X = cf.polygon(4)
        got = cf.distance_profile(X, DistanceFunctional.scale(0)).sorted_view()
        np.testing.assert_allclose(got, sorted([math.log(math.sqrt(2))] * 4 + [math.log(2)] * 2))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 9), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_chord_angle_relations(self, m, n, seed):
        X = random_config(np.random.default_rng(seed), m, n)
        r = cf.distance_profile(X, DistanceFunctional.euclidean()).values
        r2 = cf.distance_profile(X, DistanceFunctional.squared()).values
        phi = cf.distance_profile(X, DistanceFunctional.angular()).values
        t = X.gram()[cf.pair_indices(m)]
        assert len(r) == m * (m - 1) // 2
        np.testing.assert_allclose(r, 2 * np.sin(phi / 2), atol=1e-12)
        np.testing.assert_allclose(r2, 2 - 2 * t, atol=1e-12)

    def test_singular_profile_names_pair(self):
        X = SphericalConfiguration([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(SingularityError) as info:
            cf.distance_profile(X, DistanceFunctional.scale(-1))
        assert info.value.pair == (0, 2)
        # non-singular functionals are fine with coincident points
        assert cf.distance_profile(X, DistanceFunctional.squared()).sorted_view()[0] == 0.0

    def test_profile_needs_two_points(self):
        with pytest.raises(MajorsphereError):
            cf.distance_profile(cf.polygon(1), DistanceFunctional.euclidean())


class TestSpectra:
    def test_tbp(self):
        s = cf.gram_spectrum(cf.triangular_bipyramid())
        np.testing.assert_allclose(s.values, [0.0, -0.5, -1.0], atol=1e-12)
        assert s.multiplicities == (6, 3, 1)

    def test_24cell(self):
        s = cf.gram_spectrum(cf.cell24())
        np.testing.assert_allclose(s.values, [0.5, 0.0, -0.5, -1.0], atol=1e-12)
        assert s.multiplicities == (96, 72, 96, 12)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_simplex(self, n):
        X = cf.regular_simplex(n)
        assert (X.m, X.dimension) == (n + 1, n)
        s = cf.gram_spectrum(X)
        np.testing.assert_allclose(s.values, [-1.0 / n], atol=1e-12)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_cross_polytope(self, n):
        X = cf.cross_polytope(n)
        np.testing.assert_array_equal(X.points[0], np.eye(n)[-1])
        vals = cf.gram_spectrum(X).values
        expected = [-1.0] if n == 1 else [0.0, -1.0]
        np.testing.assert_allclose(vals, expected, atol=1e-15)

    @pytest.mark.parametrize("m", range(3, 10))
    def test_polygon_angles(self, m):
        phi = cf.distance_profile(cf.polygon(m), DistanceFunctional.angular()).sorted_view()
        oracle = sorted(min(k, m - k) * 2 * math.pi / m for i, j in combinations(range(m), 2) for k in [j - i])
        np.testing.assert_allclose(phi, oracle, atol=1e-12)

    def test_cluster_values(self):
        reps, counts = cf.cluster_values([0.0, 1e-9, 0.5, -0.3], 1e-6)
        assert counts == (1, 2, 1)
        assert reps[0] == 0.5


class TestGenerators:
    @pytest.mark.parametrize("n", range(3, 13))
    def test_lambda_n(self, n):
        X = cf.lambda_n(n)
        assert (X.m, X.dimension) == (n * (n + 1) // 2, n)
        a, b = cf.gram_spectrum(X).values
        assert abs(a - (n - 3) / (2 * (n - 1))) < 1e-12
        assert abs(b + 2 / (n - 1)) < 1e-12

    def test_lambda_8_values(self):
        a, b = cf.gram_spectrum(cf.lambda_n(8)).values
        assert a == pytest.approx(5 / 14, abs=1e-12)
        assert b == pytest.approx(-2 / 7, abs=1e-12)

    def test_delta_tetra_regular(self):
        X = cf.delta_tetrahedron(1 / math.sqrt(3), math.pi / 2)
        np.testing.assert_allclose(cf.gram_spectrum(X).values, [-1 / 3], atol=1e-12)

    def test_delta_tetra_square(self):
        X = cf.delta_tetrahedron(0.0, math.pi / 2)
        r2 = cf.distance_profile(X, DistanceFunctional.squared()).sorted_view()
        np.testing.assert_allclose(r2, [2, 2, 2, 2, 4, 4], atol=1e-12)

    def test_delta_tetra_equal_opposite_edges(self):
        X = cf.delta_tetrahedron(0.3, 1.1).points
        assert np.linalg.norm(X[0] - X[2]) == pytest.approx(np.linalg.norm(X[1] - X[3]))
        assert np.linalg.norm(X[0] - X[1]) == pytest.approx(np.linalg.norm(X[2] - X[3]))

    def test_isosceles_and_quadrilateral(self):
        alpha = 2.2
        phi = cf.distance_profile(cf.isosceles_triangle(alpha), DistanceFunctional.angular()).sorted_view()
        np.testing.assert_allclose(phi, sorted([alpha, alpha, 2 * math.pi - 2 * alpha]), atol=1e-12)
        q = cf.quadrilateral(math.pi / 2)
        np.testing.assert_allclose(cf.gram_spectrum(q).values, [0.0, -1.0], atol=1e-12)
        with pytest.raises(ParameterRangeError):
            cf.isosceles_triangle(4.0)
        with pytest.raises(ParameterRangeError):
            cf.quadrilateral(2.2)

    def test_simplex_product(self):
        X = cf.simplex_product([1, 3])
        assert (X.m, X.dimension) == (6, 4)
        s = cf.gram_spectrum(X)
        np.testing.assert_allclose(s.values, [0.0, -1 / 3, -1.0], atol=1e-12)

    def test_generate_dispatch(self):
        assert cf.generate("24-cell").m == 24
        assert cf.generate("lambda", n=7).m == 28
        assert cf.generate("delta-tetra", a=0.0, theta=1.0).m == 4
        with pytest.raises(ParameterRangeError, match="needs"):
            cf.generate("polygon")
        with pytest.raises(ParameterRangeError, match="does not take"):
            cf.generate("tbp", n=3)
        with pytest.raises(ParameterRangeError, match="unknown"):
            cf.generate("dodecahedron")


class TestStructure:
    def test_omega(self):
        X = cf.cross_polytope(3)
        assert cf.min_pair_distance(X) == pytest.approx(math.sqrt(2))
        assert cf.omega_member(X, math.sqrt(2))
        assert not cf.omega_member(X, 1.5)

    @pytest.mark.parametrize("dims", [(1, 3), (2, 2), (1, 1, 2), (1, 1, 1, 1)])
    def test_kuperberg_products(self, dims):
        X = cf.simplex_product(dims)
        part = cf.kuperberg_decompose(X)
        assert part.is_valid, part.failures
        assert sorted(part.dims) == sorted(dims)
        assert part.max_cross_inner_product < 1e-9
        assert part.min_distance >= math.sqrt(2) - 1e-12

    def test_kuperberg_rotated(self):
        Q, _ = np.linalg.qr(np.random.default_rng(5).standard_normal((4, 4)))
        X = SphericalConfiguration(cf.simplex_product([2, 2]).points @ Q.T)
        part = cf.kuperberg_decompose(X)
        assert part.is_valid and part.dims == (2, 2)

    def test_kuperberg_single_cluster(self):
        part = cf.kuperberg_decompose(cf.regular_simplex(3))
        assert not part.is_valid
        assert any("single cluster" in f for f in part.failures)

    def test_kuperberg_wrong_size(self):
        # two antipodal pairs plus a third orthogonal direction used once
        X = SphericalConfiguration([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, 0, 1]])
        part = cf.kuperberg_decompose(X)
        assert not part.is_valid
