import math

import numpy as np
import pytest

from heatlab import errors
from heatlab.asymptotics import (
    CorrectorAttractor,
    DipoleAttractor,
    ErrorSeries,
    GaussianAttractor,
    GaussianCentered,
    GaussianTimeShift,
    attractor_error,
    build_counterexample,
    corrector_attractor,
    dipole_error,
    fit_rate,
    mixing_error,
    moment_table,
    multi_indices,
    scaling_experiment,
    sign_change_front,
    tail_profile,
)
from heatlab.grid import NormKind, make_grid, sample
from heatlab.kernels import GaussianSolution, gaussian, gaussian_derivative
from heatlab.semigroup import (
    CatalogData,
    GridSamples,
    HeatSolution,
    OneSidedExponential,
    PointMasses,
    realize,
)

DESK = make_grid(1, 40.0, 4096)
RATES_GRID = make_grid(1, 80.0, 8192)


def box_data(grid, half=1.0, mass=1.0):
    f = sample(grid, lambda x: np.where(np.abs(x) < half, 1.0, 0.0))
    from heatlab.grid import quadrature
    return GridSamples(f.with_values(f.values * (mass / quadrature(f))))


def shifted_gaussian(h=1.0, t0=1.0):
    return CatalogData(GaussianSolution(center=h, time_shift=t0))


class TestAttractorError:
    def test_gaussian_data_errors_decrease(self):
        series = attractor_error(CatalogData(GaussianSolution(time_shift=1.0)),
                                 GaussianAttractor(1.0), NormKind.sup(),
                                 [4.0, 16.0, 64.0], DESK)
        assert series.renormalized[0] > series.renormalized[1] > series.renormalized[2]

    def test_exact_attractor_gives_zero(self):
        series = attractor_error(CatalogData(GaussianSolution(time_shift=1.0)),
                                 GaussianTimeShift(1.0, 1.0), NormKind.sup(),
                                 [2.0, 4.0, 8.0], DESK)
        assert max(series.raw) < 1e-12

    def test_mass_mismatch(self):
        with pytest.raises(errors.MassMismatch):
            attractor_error(box_data(DESK, mass=2.0), GaussianAttractor(1.0),
                            NormKind.l1(), [4.0, 8.0, 16.0], DESK)

    def test_shifted_gaussian_sup_rate(self):
        series = attractor_error(shifted_gaussian(1.0), GaussianAttractor(1.0),
                                 NormKind.sup(), np.geomspace(4, 256, 8),
                                 RATES_GRID)
        fit = fit_rate(series)
        assert fit.slope == pytest.approx(-0.5, abs=0.05)

    def test_centered_attractor_beats_plain(self):
        data = shifted_gaussian(1.0)
        plain = attractor_error(data, GaussianAttractor(1.0), NormKind.sup(),
                                [16.0, 64.0], DESK)
        centered = attractor_error(data, GaussianCentered(1.0, 1.0),
                                   NormKind.sup(), [16.0, 64.0], DESK)
        assert centered.renormalized[-1] < plain.renormalized[-1]

    def test_interpolation_inequality(self):
        # renormalized L2 error <= sqrt(renorm L1 * renorm sup)
        data = box_data(DESK)
        times = [4.0, 16.0, 64.0]
        e1 = attractor_error(data, GaussianAttractor(1.0), NormKind.l1(), times, DESK)
        e2 = attractor_error(data, GaussianAttractor(1.0), NormKind.lp(2), times, DESK)
        esup = attractor_error(data, GaussianAttractor(1.0), NormKind.sup(), times, DESK)
        for a, b, c in zip(e2.renormalized, e1.renormalized, esup.renormalized):
            assert a <= math.sqrt(b * c) * (1 + 1e-9)


class TestCorrector:
    def test_order_zero_matches_gaussian_attractor(self):
        u0 = realize(shifted_gaussian(0.5), DESK)
        table = moment_table(u0, 2)
        corr = corrector_attractor(table, 0)
        g = GaussianAttractor(dict(table)[(0,)])
        assert np.max(np.abs(corr.evaluate(DESK, 4.0) - g.evaluate(DESK, 4.0))) < 1e-15

    def test_order_one_sign_convention(self):
        # M G_t - sum_i N1_i d_i G_t
        u0 = realize(shifted_gaussian(1.0), DESK)
        table = dict(moment_table(u0, 1))
        corr = corrector_attractor(tuple(table.items()), 1)
        x = DESK.meshes()
        expected = (table[(0,)] * gaussian(x, 4.0)
                    - table[(1,)] * gaussian_derivative(x, 4.0, (1,)))
        assert np.max(np.abs(corr.evaluate(DESK, 4.0) - expected)) < 1e-15

    def test_zero_first_moment_reduces_to_order_zero(self):
        u0 = realize(box_data(DESK), DESK)
        table = moment_table(u0, 1)
        e0 = corrector_attractor(table, 0).evaluate(DESK, 8.0)
        e1 = corrector_attractor(table, 1).evaluate(DESK, 8.0)
        assert np.max(np.abs(e0 - e1)) < 1e-12

    def test_first_moment_corrected_rate(self):
        u0 = realize(shifted_gaussian(1.0), RATES_GRID)
        corr = corrector_attractor(moment_table(u0, 1), 1)
        series = attractor_error(GridSamples(u0), corr, NormKind.sup(),
                                 np.geomspace(4, 256, 8), RATES_GRID)
        assert fit_rate(series).slope == pytest.approx(-1.0, abs=0.1)

    def test_second_order_corrector_rate(self):
        # residual after the k=2 expansion decays like t^(-3/2), renormalized
        u0 = realize(shifted_gaussian(1.0), RATES_GRID)
        corr = corrector_attractor(moment_table(u0, 2), 2)
        series = attractor_error(GridSamples(u0), corr, NormKind.sup(),
                                 np.geomspace(4, 256, 8), RATES_GRID)
        assert fit_rate(series).slope == pytest.approx(-1.5, abs=0.1)


class TestFitRate:
    def test_pure_power_law(self):
        t = np.geomspace(1, 100, 8)
        series = ErrorSeries(tuple(t), tuple(t ** -0.5), tuple(t ** -0.5), "l1", "x")
        fit = fit_rate(series)
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_noisy_power_law(self):
        # generate-and-fit oracle
        t = np.geomspace(1, 1000, 24)
        e = 5.0 * t ** -1.0 * (1 + 0.01 * np.sin(np.log(t)))
        series = ErrorSeries(tuple(t), tuple(e), tuple(e), "sup", "x")
        fit = fit_rate(series)
        assert fit.slope == pytest.approx(-1.0, abs=0.01)
        assert fit.slope_stderr < 0.01

    def test_too_few_points(self):
        series = ErrorSeries((1.0, 2.0), (1.0, 0.5), (1.0, 0.5), "l1", "x")
        with pytest.raises(errors.TooFewPoints):
            fit_rate(series)

    def test_zero_entries_dropped_then_degenerate(self):
        series = ErrorSeries((1.0, 2.0, 4.0, 8.0), (0.0, 0.0, 1.0, 0.5),
                             (0.0, 0.0, 1.0, 0.5), "l1", "x")
        with pytest.warns(UserWarning):
            with pytest.raises(errors.ZeroErrorEntry):
                fit_rate(series)

    def test_window(self):
        t = np.geomspace(1, 256, 9)
        e = t ** -1.0
        e = np.where(t < 4, 10.0, e)  # polluted early entries
        series = ErrorSeries(tuple(t), tuple(e), tuple(e), "l1", "x")
        fit = fit_rate(series, window=(4.0, 256.0))
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)


class TestMixing:
    def test_identical_data_zero(self):
        series = mixing_error(box_data(DESK), box_data(DESK), [4.0, 16.0], DESK)
        assert max(series.raw) < 1e-14

    def test_box_vs_gaussian_decreases(self):
        series = mixing_error(box_data(DESK),
                              CatalogData(GaussianSolution(time_shift=1.0)),
                              [4.0, 16.0, 64.0], DESK)
        assert series.raw[-1] < series.raw[0]

    def test_mass_mismatch(self):
        with pytest.raises(errors.MassMismatch):
            mixing_error(box_data(DESK, mass=1.0), box_data(DESK, mass=2.0),
                         [4.0], DESK)


class TestCounterexample:
    def test_selection_rule_arithmetic(self):
        rep = build_counterexample(lambda t: t ** -0.5, 1)
        assert rep.masses == (0.5,)
        assert rep.times == (16.0,)

    def test_radius_inequality(self):
        rep = build_counterexample(lambda t: t ** -0.5, 3)
        for r, t in zip(rep.radii, rep.times):
            assert math.exp(-r * r / (4 * t)) < 0.5
            # r > 2 sqrt(t ln 2) is exactly the threshold
            assert r > 2.0 * math.sqrt(t * math.log(2.0))

    def test_witness_inequality_holds(self):
        rep = build_counterexample(lambda t: t ** -0.5, 3)
        assert rep.holds
        for v, b in zip(rep.witness_values, rep.witness_bounds):
            assert v >= b

    def test_slow_rate(self):
        rep = build_counterexample(lambda t: 1.0 / math.log(t + 2.0), 2)
        assert rep.holds

    def test_increasing_rate_rejected(self):
        with pytest.raises(errors.RateNotDecreasing):
            build_counterexample(lambda t: t, 2)

    def test_times_spread_out(self):
        rep = build_counterexample(lambda t: t ** -0.5, 3)
        assert all(b >= 4 * a for a, b in zip(rep.times, rep.times[1:]))


class TestTails:
    def box_field(self, t=1.0):
        sol = HeatSolution(box_data(DESK), DESK)
        return sol.field(t, method="direct")

    def test_box_data_inside_bracket(self):
        rep = tail_profile(self.box_field(), 1.0, 0.0, 1.0, (5.0, 15.0))
        assert rep.inside_bracket

    def test_kernel_ratio_converges(self):
        f = sample(DESK, lambda x: gaussian(x, 1.0), time=1.0)
        rep = tail_profile(f, 1.0, 0.0, 1e-9, (10.0, 20.0))
        # log-prefactor correction is O(log|x| / |x|^2)
        assert rep.sup_ratio_deviation < math.log(4 * math.pi) / (2 * 15.0 ** 2)

    def test_one_sided_exponential_slope(self):
        # -log u grows linearly, not quadratically: the tail is not universal
        sol = HeatSolution(OneSidedExponential(1.0), DESK)
        pts = np.linspace(10.0, 20.0, 21)
        u = sol.eval_points(pts, 1.0)
        slope = np.polyfit(pts, -np.log(u), 1)[0]
        assert slope == pytest.approx(1.0, abs=0.05)

    def test_nonpositive_raises(self):
        f = sample(DESK, lambda x: np.where(np.abs(x) < 1, 1.0, 0.0), time=1.0)
        with pytest.raises(errors.NonPositiveField):
            tail_profile(f, 1.0, 0.0, 1.0, (5.0, 15.0))


class TestFront:
    def test_equal_masses_stay_at_half(self):
        rep = sign_change_front(1.0, 1.0, [1.0, 2.0, 4.0], DESK)
        for r in rep.positions:
            assert r == pytest.approx(0.5, abs=DESK.spacing)

    @pytest.mark.parametrize("eps", [math.exp(-1), 0.1])
    def test_crossing_matches_closed_form(self, eps):
        rep = sign_change_front(eps, 1.0, [1.0, 2.0, 4.0], DESK)
        for r, pred in zip(rep.positions, rep.predicted):
            assert abs(r - pred) <= DESK.spacing

    def test_fitted_slope(self):
        eps = math.exp(-1)
        rep = sign_change_front(eps, 1.0, [1.0, 2.0, 4.0], DESK)
        assert rep.slope == pytest.approx(rep.expected_slope, rel=0.05)

    def test_box_too_small(self):
        small = make_grid(1, 5.0, 256)
        with pytest.raises(errors.NoSignChangeOnGrid):
            sign_change_front(0.001, 1.0, [4.0], small)


class TestDipoleError:
    def test_exact_dipole_data_zero_error(self):
        # restriction of the exact dipole evolution is a fixed point
        x = DESK.axis_nodes()
        vals = np.where(x > 0, -gaussian_derivative(x, 1.0, (1,)), 0.0)
        data = GridSamples(sample(DESK, lambda x: np.interp(x, DESK.axis_nodes(), vals)))
        series = dipole_error(data, [1.0, 2.0, 4.0], NormKind.l1(), DESK)
        assert max(series.raw) < 1e-8

    def test_compact_bump_superconvergence(self):
        # odd reflection kills the even moment: compact data decay at -3/2
        data = PointMasses(((1.0, 1.0),))
        series = dipole_error(data, np.geomspace(4, 64, 6), NormKind.l1(), DESK)
        assert fit_rate(series).slope == pytest.approx(-1.5, abs=0.1)

    def test_sup_renormalization_power(self):
        data = PointMasses(((1.0, 1.0),))
        series = dipole_error(data, [1.0, 2.0, 4.0], NormKind.sup(), DESK)
        assert series.renorm_power == 0.5


class TestScaling:
    def test_kernel_data_fixed_point(self):
        rep = scaling_experiment(PointMasses(((0.0, 1.0),)), [1.0, 2.0], DESK)
        assert max(rep.sup_distances) < (2 * DESK.spacing) ** 2

    def test_box_data_decreasing(self):
        rep = scaling_experiment(box_data(DESK), [1.0, 2.0, 4.0, 8.0], DESK)
        assert rep.strictly_decreasing

    def test_consistency_with_renormalized_error(self):
        rep = scaling_experiment(box_data(DESK), [1.0, 2.0, 4.0, 8.0], DESK)
        for d, e in zip(rep.sup_distances, rep.renorm_sup_errors):
            assert abs(d - e) < 1e-10
        for d, e in zip(rep.l1_distances, rep.renorm_l1_errors):
            assert abs(d - e) < 1e-10


def test_multi_indices_count_2d():
    assert len(multi_indices(2, 2)) == 6
    assert multi_indices(1, 3) == [(0,), (1,), (2,), (3,)]
