import math

import numpy as np
import pytest

from armoga.problems import Dtlz1, Dtlz2, Dtlz4, Wfg1, get_problem, PROBLEM_NAMES


def dtlz1_reference(x):
    """Literal scalar transcription of the DTLZ1 formulas."""
    g = 100.0 * (5.0 + sum((xi - 0.5) ** 2 - math.cos(20.0 * math.pi * (xi - 0.5))
                           for xi in x[2:]))
    return [
        0.5 * x[0] * x[1] * (1.0 + g),
        0.5 * x[0] * (1.0 - x[1]) * (1.0 + g),
        0.5 * (1.0 - x[0]) * (1.0 + g),
    ]


def wfg1_reference(x):
    """Literal scalar transcription of the WFG1 chain (poly exponent 0.2)."""
    n, k = 24, 4
    y = [x[i] / (2.0 * (i + 1)) for i in range(n)]
    for i in range(k, n):
        y[i] = abs(y[i] - 0.35) / abs(math.floor(0.35 - y[i]) + 0.35)
    a, b, c = 0.8, 0.75, 0.85
    for i in range(k, n):
        v = (a + min(0.0, math.floor(y[i] - b)) * (a * (b - y[i]) / b)
             - min(0.0, math.floor(c - y[i])) * ((1.0 - a) * (y[i] - c) / (1.0 - c)))
        y[i] = min(1.0, max(0.0, v))
    y = [v ** 0.2 for v in y]
    w = [2.0 * (i + 1) for i in range(n)]

    def rsum(indices):
        return sum(w[i] * y[i] for i in indices) / sum(w[i] for i in indices)

    z1, z2 = rsum(range(0, 2)), rsum(range(2, 4))
    dist = rsum(range(k, n))
    u = max(dist, 1.0)
    p1 = u * (z1 - 0.5) + 0.5
    p2 = u * (z2 - 0.5) + 0.5
    h1 = (1.0 - math.cos(p1 * math.pi / 2)) * (1.0 - math.cos(p2 * math.pi / 2))
    h2 = (1.0 - math.cos(p1 * math.pi / 2)) * (1.0 - math.sin(p2 * math.pi / 2))
    h3 = 1.0 - p1 - math.cos(10.0 * math.pi * p1 + math.pi / 2) / (10.0 * math.pi)
    return [dist + 2.0 * h1, dist + 4.0 * h2, dist + 6.0 * h3]


class TestDtlz1:
    def test_midpoint(self):
        f = Dtlz1().evaluate(np.full(7, 0.5))
        np.testing.assert_allclose(f, [0.125, 0.125, 0.25], atol=1e-14)

    def test_sum_identity_on_front(self):
        rng = np.random.default_rng(1)
        p = Dtlz1()
        for _ in range(50):
            x = np.concatenate([rng.random(2), np.full(5, 0.5)])
            assert p.evaluate(x).sum() == pytest.approx(0.5, abs=1e-12)

    def test_matches_independent_transcription(self):
        rng = np.random.default_rng(2)
        p = Dtlz1()
        for _ in range(100):
            x = rng.random(7)
            np.testing.assert_allclose(p.evaluate(x), dtlz1_reference(x), rtol=1e-12)

    def test_out_of_box_rejected(self):
        with pytest.raises(ValueError):
            Dtlz1().evaluate(np.full(7, 1.5))
        with pytest.raises(ValueError):
            Dtlz1().evaluate(np.full(7, -0.1))

    def test_projection_interior(self):
        p, d = Dtlz1().project_to_front(np.array([0.5, 0.5, 0.5]))
        np.testing.assert_allclose(p, [1 / 6, 1 / 6, 1 / 6], atol=1e-14)
        assert d == pytest.approx(1 / math.sqrt(3), abs=1e-14)

    def test_projection_is_closest_simplex_point(self):
        rng = np.random.default_rng(3)
        prob = Dtlz1()
        raw = -np.log(rng.random((4000, 3)))
        samples = 0.5 * raw / raw.sum(axis=1, keepdims=True)
        for _ in range(50):
            f = rng.normal(scale=2.0, size=3)
            point, d = prob.project_to_front(f)
            assert point.min() >= -1e-15
            assert point.sum() == pytest.approx(0.5, abs=1e-12)
            sample_best = np.sqrt(((samples - f) ** 2).sum(axis=1)).min()
            assert d <= sample_best + 1e-12


class TestDtlz2:
    def test_axis_points(self):
        p = Dtlz2()
        x = np.concatenate([[0.0, 0.0], np.full(10, 0.5)])
        np.testing.assert_allclose(p.evaluate(x), [1, 0, 0], atol=1e-14)
        x = np.concatenate([[1.0, 0.3], np.full(10, 0.5)])
        np.testing.assert_allclose(p.evaluate(x), [0, 0, 1], atol=1e-14)

    def test_unit_norm_on_front(self):
        rng = np.random.default_rng(4)
        p = Dtlz2()
        for _ in range(50):
            x = np.concatenate([rng.random(2), np.full(10, 0.5)])
            assert np.linalg.norm(p.evaluate(x)) == pytest.approx(1.0, abs=1e-12)

    def test_projection_radial(self):
        p, d = Dtlz2().project_to_front(np.array([2.0, 0.0, 0.0]))
        np.testing.assert_allclose(p, [1, 0, 0], atol=1e-14)
        assert d == pytest.approx(1.0, abs=1e-14)

    def test_projection_is_closest_octant_point(self):
        rng = np.random.default_rng(5)
        prob = Dtlz2()
        raw = np.abs(rng.normal(size=(4000, 3)))
        samples = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        for _ in range(50):
            f = rng.normal(scale=1.5, size=3)
            point, d = prob.project_to_front(f)
            assert np.linalg.norm(point) == pytest.approx(1.0, abs=1e-12)
            assert point.min() >= 0.0
            sample_best = np.sqrt(((samples - f) ** 2).sum(axis=1)).min()
            assert d <= sample_best + 1e-12


class TestDtlz4:
    def test_bias_example(self):
        x = np.concatenate([[0.9, 0.9], np.full(10, 0.5)])
        f = Dtlz4().evaluate(x)
        angle = 0.9 ** 100 * math.pi / 2
        np.testing.assert_allclose(
            f,
            [math.cos(angle) ** 2, math.cos(angle) * math.sin(angle), math.sin(angle)],
            rtol=1e-12,
        )
        assert f[0] == pytest.approx(1.0, abs=1e-6)
        assert f[1] == pytest.approx(4.17e-5, rel=1e-2)
        assert f[2] == pytest.approx(4.17e-5, rel=1e-2)

    def test_corner(self):
        x = np.concatenate([[1.0, 1.0], np.full(10, 0.5)])
        np.testing.assert_allclose(Dtlz4().evaluate(x), [0, 0, 1], atol=1e-14)

    def test_unit_norm_on_front(self):
        rng = np.random.default_rng(6)
        p = Dtlz4()
        for _ in range(50):
            x = np.concatenate([rng.random(2), np.full(10, 0.5)])
            assert np.linalg.norm(p.evaluate(x)) == pytest.approx(1.0, abs=1e-12)


class TestWfg1:
    def test_front_corner(self):
        f = Wfg1().front_point(0.0, 0.0)
        np.testing.assert_allclose(f, [0.0, 0.0, 6.0], atol=1e-12)

    def test_front_f3_vanishes_at_z1_one(self):
        f = Wfg1().front_point(1.0, 0.5)
        assert f[2] == pytest.approx(0.0, abs=1e-12)

    def test_matches_independent_transcription(self):
        rng = np.random.default_rng(7)
        p = Wfg1()
        for _ in range(100):
            x = rng.random(24) * p.upper
            np.testing.assert_allclose(p.evaluate(x), wfg1_reference(x), atol=1e-10)

    def test_optimal_distance_variables_reach_front(self):
        # Distance-related variables at 0.35 of their range zero the
        # underlying distance parameter.  The 0.2-power bias amplifies the
        # last-ulp division error at 0.35 to ~1e-4, so the evaluated image
        # sits near, not exactly on, the parametrized front.
        p = Wfg1()
        rng = np.random.default_rng(8)
        for _ in range(20):
            x = np.concatenate([rng.random(4) * p.upper[:4], 0.35 * p.upper[4:]])
            f = p.evaluate(x)
            _, d = p.project_to_front(f)
            assert d < 1e-3

    def test_on_front_samples_project_to_themselves(self):
        p = Wfg1()
        rng = np.random.default_rng(9)
        for _ in range(40):
            f = p.front_point(rng.random(), rng.random())
            _, d = p.project_to_front(f)
            assert d <= 1e-6

    def test_out_of_box_rejected(self):
        p = Wfg1()
        with pytest.raises(ValueError):
            p.evaluate(np.full(24, -0.5))
        with pytest.raises(ValueError):
            p.evaluate(p.upper * 1.01)


class TestRegistry:
    def test_known_names(self):
        assert PROBLEM_NAMES == ("dtlz1", "dtlz2", "dtlz4", "wfg1")
        for name in PROBLEM_NAMES:
            prob = get_problem(name)
            assert prob.name == name
            assert prob.n_obj == 3

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown problem"):
            get_problem("zdt1")

    def test_evaluation_is_pure(self):
        rng = np.random.default_rng(10)
        for name in PROBLEM_NAMES:
            p = get_problem(name)
            x = p.lower + rng.random(p.n_var) * (p.upper - p.lower)
            f1, f2 = p.evaluate(x), p.evaluate(x.copy())
            np.testing.assert_array_equal(f1, f2)

    def test_batch_matches_single(self):
        rng = np.random.default_rng(11)
        for name in PROBLEM_NAMES:
            p = get_problem(name)
            X = p.lower + rng.random((5, p.n_var)) * (p.upper - p.lower)
            batch = p.evaluate_batch(X)
            for i in range(5):
                np.testing.assert_array_equal(batch[i], p.evaluate(X[i]))
