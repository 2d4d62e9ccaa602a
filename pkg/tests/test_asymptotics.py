from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from detsum import (
    InsufficientRange,
    OutOfRegime,
    builtin,
    code_dmt_segment,
    dmt_sum_lower_exponent,
    fit_growth,
    inverse_det_sum,
    optimal_dmt,
    predicted_exponent,
    union_bound_eval,
)
from detsum.asymptotics import (
    COMPLEX_CENTER,
    INCONCLUSIVE,
    MATCHES,
    MISMATCH,
    NUMBER_FIELD,
    Q_RAMIFIED,
    Q_UNRAMIFIED,
    DmtCurve,
    Prediction,
    Regime,
    _ols,
    regime_of,
    verdict,
)


class TestFit:
    def test_exact_power(self):
        M = np.geomspace(2, 200, 12)
        f = fit_growth(M, M**4)
        assert f.slope == pytest.approx(4.0, abs=1e-12)
        assert f.stderr < 1e-10

    def test_constant(self):
        M = np.geomspace(2, 200, 12)
        assert fit_growth(M, np.full(12, 7.0)).slope == pytest.approx(0.0, abs=1e-12)

    def test_trim_drops_smallest(self):
        M = np.geomspace(1, 1000, 12)
        f = fit_growth(M, M**2)
        assert len(f.points_used) == 9
        assert min(p[0] for p in f.points_used) > 0

    def test_zeros_excluded(self):
        M = np.geomspace(1, 1000, 12)
        v = M**3
        v[-1] = 0
        f = fit_growth(M, v, trim=0)
        assert f.excluded_zero == 1
        assert f.slope == pytest.approx(3)

    def test_window(self):
        M = np.geomspace(1, 1000, 20)
        v = np.where(M < 30, M, M**2 / 30)
        assert fit_growth(M, v, window=(30, 1000), trim=0).slope == pytest.approx(2, abs=1e-9)

    def test_pairs_input(self):
        rows = [(m, m**1.5) for m in np.geomspace(1, 100, 8)]
        assert fit_growth(rows).slope == pytest.approx(1.5)

    def test_too_few_points(self):
        with pytest.raises(InsufficientRange):
            fit_growth([1, 2, 3, 4], [1, 2, 3, 4], trim=0.5)

    def test_too_narrow(self):
        M = np.linspace(10, 20, 10)
        with pytest.raises(InsufficientRange):
            fit_growth(M, M)

    @given(st.floats(-3, 6), st.floats(0.1, 100))
    def test_recompute_from_points(self, a, c):
        M = np.geomspace(3, 300, 9)
        v = c * M**a * (1 + 0.01 * np.sin(M))
        f = fit_growth(M, v)
        x, y = np.array(f.points_used).T
        assert _ols(x, y)[0] == pytest.approx(f.slope, abs=1e-12)


class TestRegimes:
    @pytest.mark.parametrize(
        "name,kind",
        [("gaussian", NUMBER_FIELD), ("nf-sqrt5", NUMBER_FIELD), ("alamouti", Q_RAMIFIED), ("l1", Q_UNRAMIFIED),
         ("l2", Q_RAMIFIED), ("golden-order", COMPLEX_CENTER)],
    )
    def test_regime_of(self, name, kind):
        assert regime_of(builtin(name)).kind == kind
        assert regime_of(name).kind == kind

    def test_trivial_label(self):
        assert regime_of(builtin("gaussian")).label == "number field (trivial)"

    def test_no_descriptor(self):
        from detsum import build_lattice

        with pytest.raises(OutOfRegime):
            regime_of(build_lattice([np.eye(1)]))


class TestPredictions:
    def test_l1(self):
        p = predicted_exponent(builtin("l1"), 1)
        assert p.exponent == 2 and p.tag

    def test_l2(self):
        assert predicted_exponent(builtin("l2"), 1).exponent == 0

    def test_golden(self):
        assert predicted_exponent(builtin("golden-order"), 2).exponent == 4

    def test_golden_needs_two_antennas(self):
        with pytest.raises(OutOfRegime):
            predicted_exponent(builtin("golden-order"), 1)

    def test_number_field_polylog(self):
        p = predicted_exponent(builtin("nf-sqrt5"), 2)
        assert p.polylog and p.exponent == 0

    def test_formula_by_regime(self):
        for n in range(2, 7):
            assert predicted_exponent(Regime(COMPLEX_CENTER, n), n).exponent == 2 * n * n - 2 * n
            assert predicted_exponent(Regime(Q_UNRAMIFIED, n), n).exponent == n * n - n
            if n % 2 == 0:
                assert predicted_exponent(Regime(Q_RAMIFIED, n), n).exponent == n * n - 2 * n

    def test_ramified_odd(self):
        with pytest.raises(OutOfRegime):
            predicted_exponent(Regime(Q_RAMIFIED, 3), 3)


class TestLowerExponent:
    @pytest.mark.parametrize("args,want", [((2, 8, 1), 4), ((2, 4, 1), 0), ((2, 8, 2), 4)])
    def test_values(self, args, want):
        assert dmt_sum_lower_exponent(*args) == want

    def test_exact_type(self):
        assert isinstance(dmt_sum_lower_exponent(3, 5, 1), Fraction)
        assert dmt_sum_lower_exponent(3, 5, 1) == Fraction(5, 3) + 5 - Fraction(5, 3) - 6

    def test_domain(self):
        with pytest.raises(ValueError):
            dmt_sum_lower_exponent(2, 9, 1)
        with pytest.raises(ValueError):
            dmt_sum_lower_exponent(2, 4, 0)

    @pytest.mark.parametrize("name", ["alamouti", "l1", "l2", "golden-order"])
    def test_prediction_above_lower_bound(self, name):
        L = builtin(name)
        for n_r in range(1, 7):
            try:
                p = predicted_exponent(L, n_r)
            except OutOfRegime:
                continue
            assert p.exponent >= dmt_sum_lower_exponent(L.n, L.k, n_r)


class TestDmt:
    def test_optimal(self):
        assert optimal_dmt(3, 3).vertices == ((0, 9), (1, 4), (2, 1), (3, 0))
        assert optimal_dmt(1, 1).vertices == ((0, 1), (1, 0))
        assert optimal_dmt(2, 1).vertices == ((0, 2), (1, 0))

    @given(st.integers(1, 8), st.integers(1, 8))
    def test_optimal_at_integers(self, nt, nr):
        c = optimal_dmt(nt, nr)
        for r, d in c.vertices:
            assert d == (nt - r) * (nr - r)
            assert c(r) == d

    def test_ramified_segment(self):
        c = code_dmt_segment(Regime(Q_RAMIFIED, 2), 1)
        assert c.vertices == ((0, 2), (1, 0)) and c.meets_optimal

    def test_complex_segment(self):
        c = code_dmt_segment(builtin("golden-order"), 2)
        assert c.vertices == ((0, 4), (1, 1)) and c.meets_optimal

    def test_unramified_clipped(self):
        c = code_dmt_segment(builtin("l1"), 1)
        assert c.unclipped == ((0, 2), (1, -1))
        assert c.vertices[-1] == (1, 0) and all(d >= 0 for _, d in c.vertices)
        assert c(Fraction(2, 3)) == 0
        assert not c.meets_optimal

    def test_complex_meets_optimal_everywhere(self):
        for n in range(1, 7):
            for n_r in range(n, 7):
                c = code_dmt_segment(Regime(COMPLEX_CENTER, n), n_r)
                o = optimal_dmt(n, n_r)
                assert c.unclipped == ((0, o(0)), (1, o(1)))
                assert c.meets_optimal

    def test_ramified_meets_iff(self):
        for n in range(2, 7, 2):
            for n_r in range(1, 7):
                if 2 * n_r < n:
                    continue
                c = code_dmt_segment(Regime(Q_RAMIFIED, n), n_r)
                assert c.meets_optimal == (n == 2 and n_r == 1)

    def test_number_field_segment(self):
        c = code_dmt_segment(builtin("nf-sqrt5"), 1)
        assert c.unclipped == ((0, 2), (1, 0))

    def test_curve_validation(self):
        with pytest.raises(ValueError):
            DmtCurve(((0, 1), (0, 0)))
        with pytest.raises(ValueError):
            DmtCurve(((0, 0), (1, 1)))
        with pytest.raises(ValueError):
            DmtCurve(((0, -1), (1, -2)))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            optimal_dmt(2, 2)(3)


@pytest.fixture(scope="module")
def table():
    return inverse_det_sum(builtin("l2"), 2, np.geomspace(2, 96, 16))


class TestUnionBound:
    def test_r_zero(self, table):
        rows = union_bound_eval(table, 2, 4, 1, [10, 100], 0)
        s2 = table.column("sum")[np.argmin(np.abs(np.log(table.radii) - np.log(2)))]
        for row in rows:
            assert row.radius_target == 2
            assert row.bound == pytest.approx(row.rho**-2 * s2)

    def test_extrapolation_flag(self, table):
        (row,) = union_bound_eval(table, 2, 4, 1, [1e-3], 0.5)
        assert row.extrapolated and row.radius_used == table.radii[0]

    def test_decay_slopes(self, table):
        # exponent n n_r (1 - 2 n r / k) of the prefactor: 0 at r = 1, 1 at r = 1/2
        rho = np.geomspace(10, 1e4, 12)
        for r, want in ((1.0, 0.0), (0.5, -1.0)):
            rows = union_bound_eval(table, 2, 4, 1, rho, r)
            inside = [x for x in rows if not x.extrapolated]
            x = np.log([p.rho for p in inside])
            y = np.log([p.bound for p in inside])
            assert np.polyfit(x, y, 1)[0] == pytest.approx(want, abs=0.3)


class TestVerdict:
    def test_matches(self):
        p = Prediction(Fraction(2), "t", Regime(Q_UNRAMIFIED, 2))
        assert verdict(2.2, p) == MATCHES
        assert verdict(2.5, p) == MISMATCH

    def test_flat(self):
        p = Prediction(Fraction(0), "t", Regime(Q_RAMIFIED, 2))
        assert verdict(0.1, p) == MATCHES
        assert verdict(0.3, p) == MISMATCH

    def test_polylog(self):
        p = Prediction(Fraction(0), "t", Regime(NUMBER_FIELD, 2), polylog=True)
        assert verdict(0.19, p) == MATCHES

    def test_unclaimed(self):
        assert verdict(None, None) == INCONCLUSIVE
        assert verdict(1.0, None) == INCONCLUSIVE
