import math

import numpy as np
import pytest
from conftest import box_scan
from hypothesis import given
from hypothesis import strategies as st

from detsum import RadiusTooLarge, build_lattice, builtin, enumerate_ball, fit_growth, norm_power_sum, shell_counts
from detsum.enumeration import ball_statistics, fold_ball, iter_ball


def ball_set(L, M):
    out = []
    for zb, _ in iter_ball(L, M):
        out.extend(tuple(int(v) for v in z) for z in zb)
    return out


class TestCounts:
    def test_gaussian_five(self):
        assert enumerate_ball(builtin("gaussian"), 5) == 80

    def test_gaussian_shells(self):
        tab = shell_counts(builtin("gaussian"), [5, 10])
        assert tab.counts == (80, 316)

    def test_rank_one(self):
        L = build_lattice([np.eye(1)])
        assert shell_counts(L, [3.5]).counts == (6,)

    def test_below_shortest_vector(self, any_code):
        assert enumerate_ball(any_code, 0.5) == 0

    def test_alamouti_unit_shell(self):
        pts = ball_set(builtin("alamouti"), 1.5)
        assert len(pts) == 8
        assert all(sum(abs(v) for v in z) == 1 for z in pts)

    def test_boundary_points_included(self):
        # radius exactly 5 hits (3, 4) and (5, 0)
        pts = set(ball_set(builtin("gaussian"), 5.0))
        assert (3, 4) in pts and (0, -5) in pts
        assert (4, 4) not in pts

    def test_csv(self):
        tab = shell_counts(builtin("gaussian"), [5, 9.99999999])
        assert tab.to_csv() == "M,count\n5,80\n10,304\n"

    def test_radii_must_increase(self):
        with pytest.raises(ValueError):
            shell_counts(builtin("gaussian"), [5, 5])


class TestOracle:
    @pytest.mark.parametrize("M", [1.0, 2.5, 4.0, 6.0, 8.0])
    def test_box_scan(self, small_code, M):
        got = ball_set(small_code, M)
        assert len(got) == len(set(got))
        assert set(got) == box_scan(small_code, M)

    def test_float_lattice_box_scan(self):
        rng = np.random.default_rng(3)
        B = rng.normal(size=(3, 2, 2)) + 1j * rng.normal(size=(3, 2, 2))
        L = build_lattice(list(B))
        assert set(ball_set(L, 4.0)) == box_scan(L, 4.0)

    def test_lexicographic_order(self):
        L = builtin("l2")
        pts = ball_set(L, 6.0)
        key = [tuple(reversed(z)) for z in pts]
        assert key == sorted(key)

    def test_deterministic(self):
        L = builtin("nf-sqrt5")
        assert ball_set(L, 7.0) == ball_set(L, 7.0)

    @given(st.floats(0.5, 6.0), st.floats(0.0, 4.0))
    def test_monotone(self, m1, dm):
        L = builtin("l1")
        a = set(ball_set(L, m1))
        b = set(ball_set(L, m1 + dm))
        assert a <= b

    def test_visitor_sees_points(self):
        seen = []
        n = enumerate_ball(builtin("gaussian"), 2.0, seen.append)
        assert n == len(seen) == 12
        assert all(p.frobenius <= 2.0 * (1 + 1e-9) and any(p.coeffs) for p in seen)


class TestBudget:
    def test_radius_too_large(self):
        with pytest.raises(RadiusTooLarge):
            enumerate_ball(builtin("golden-order"), 100.0)

    def test_custom_budget(self):
        with pytest.raises(RadiusTooLarge):
            enumerate_ball(builtin("gaussian"), 100.0, node_budget=1000)


class TestFolds:
    def test_fold_matches_threads(self):
        L = builtin("l1")

        def step(acc, zb, qb):
            return acc + [float(np.sum(qb))]

        one = fold_ball(L, 12.0, list, step, lambda a, b: a + b, threads=1)
        four = fold_ball(L, 12.0, list, step, lambda a, b: a + b, threads=4)
        assert one == four

    def test_statistics_thread_invariant(self):
        L = builtin("nf-sqrt5")
        a = ball_statistics(L, [5, 10, 20], m=4, s=-2, threads=1)
        b = ball_statistics(L, [5, 10, 20], m=4, s=-2, threads=3)
        assert a == b

    def test_exact_and_float_det_agree(self):
        L = builtin("l2")
        a = ball_statistics(L, [6, 12], m=2, det="exact")
        b = ball_statistics(L, [6, 12], m=2, det="float")
        assert a.counts == b.counts
        np.testing.assert_allclose(a.inv_det_sum, b.inv_det_sum, rtol=1e-9)
        assert a.units == b.units

    def test_batches_do_not_matter(self):
        L = builtin("alamouti")
        a = ball_statistics(L, [4, 8], m=2, batch=7)
        b = ball_statistics(L, [4, 8], m=2)
        assert a == b

    def test_hadamard_holds(self, small_code):
        st_ = ball_statistics(small_code, [10.0], m=2)
        assert st_.hadamard_violations == 0


class TestNormPowerSum:
    def test_s_zero_is_count(self):
        L = builtin("alamouti")
        assert norm_power_sum(L, 0, 6.0) == enumerate_ball(L, 6.0)

    def test_gaussian_minus_four(self):
        # sum over Z[i]\0 of |z|^-4 = 4 zeta_{Q(i)}(2)
        limit = 4 * (math.pi**2 / 6) * 0.915965594177219015
        assert norm_power_sum(builtin("gaussian"), -4, 300) == pytest.approx(limit, rel=1e-3)

    def test_stabilizes(self):
        L = builtin("gaussian")
        a, b = norm_power_sum(L, -4, 100), norm_power_sum(L, -4, 200)
        assert b / a < 1.01

    def test_alamouti_log_band(self):
        radii = np.geomspace(8, 128, 8)
        st_ = ball_statistics(builtin("alamouti"), radii, s=-4, det="none")
        ratio = np.array(st_.norm_power_sum) / np.log(radii)
        assert ratio.max() / ratio.min() <= 3


class TestShellGrowth:
    @pytest.mark.parametrize(
        "name,lo,hi",
        [("gaussian", 20, 400), ("nf-sqrt5", 8, 96), ("nf-sqrt2", 8, 96), ("alamouti", 8, 96),
         ("l1", 8, 96), ("l2", 8, 96), ("golden-order", 1.2, 12)],
    )
    def test_slope_equals_rank(self, name, lo, hi):
        L = builtin(name)
        radii = np.geomspace(lo, hi, 10)
        tab = shell_counts(L, radii)
        assert fit_growth(radii, tab.counts).slope == pytest.approx(L.k, abs=0.25)

    def test_alamouti_slope_four(self):
        radii = np.geomspace(4, 64, 10)
        tab = shell_counts(builtin("alamouti"), radii)
        assert fit_growth(radii, tab.counts).slope == pytest.approx(4, abs=0.2)

    def test_counts_nondecreasing(self):
        tab = shell_counts(builtin("l1"), np.linspace(1, 20, 30))
        assert all(a <= b for a, b in zip(tab.counts, tab.counts[1:]))
