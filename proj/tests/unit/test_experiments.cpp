#include "pdiss/errors.hpp"
#include "pdiss/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace pdiss;
using namespace pdiss::experiments;
using units::from_GHz;
using units::from_MHz;
using units::to_MHz;

namespace {

double resonance(const model::DeviceParams& p) { return std::abs(p.omega_diss - p.omega_c); }

std::vector<double> power_axis(double max, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(max * std::sqrt(double(i) / (n - 1)));
    return g;
}

}  // namespace

TEST(Ringdown, ZeroDriveGivesBareCavityRate) {
    const model::DeviceParams p;
    const auto pt = ringdown_point(p, resonance(p), 0.0);
    ASSERT_TRUE(pt.ok) << pt.message;
    EXPECT_NEAR(pt.rate, 3.0, 0.05 * 3.0);
    EXPECT_GT(pt.r2, 0.999);
}

TEST(Ringdown, OffResonanceLeavesCavityRate) {
    const model::DeviceParams p;
    const auto pt = ringdown_point(p, resonance(p) + from_MHz(150), from_MHz(5));
    ASSERT_TRUE(pt.ok) << pt.message;
    EXPECT_NEAR(pt.rate, p.kappa_c, 0.2 * p.kappa_c);
}

TEST(Ringdown, OnResonanceStrongEnhancement) {
    const model::DeviceParams p;
    const auto pt = ringdown_point(p, resonance(p), from_MHz(11));
    ASSERT_TRUE(pt.ok) << pt.message;
    EXPECT_GE(pt.rate, 45.0);
    EXPECT_LE(pt.rate, 65.0);
    const double closed_form = analytics::effective_loss(from_MHz(11), p.kappa_diss).rate + p.kappa_c;
    EXPECT_NEAR(pt.rate, closed_form, 0.05 * closed_form);
}

TEST(Ringdown, InducedLossAddsToCavityLoss) {
    model::DeviceParams p;
    const double g = from_MHz(6);
    auto induced = [&](double kappa_c) {
        p.kappa_c = kappa_c;
        return ringdown_point(p, resonance(p), g).rate - ringdown_point(p, resonance(p), 0.0).rate;
    };
    const double bare = induced(0.3);
    const double device = induced(3.0);
    EXPECT_NEAR(device, bare, 0.05 * bare);
    // Non-additivity is of order kappa_c / kappa_diss: the hybrid decay rate
    // depends on kappa_diss - kappa_c.
    auto two_mode = [&](double kappa_c) {
        const double dk = p.kappa_diss - kappa_c;
        return 0.5 * dk * (1.0 - std::sqrt(1.0 - 16.0 * g * g / (dk * dk)));
    };
    const double lossy = induced(30.0);
    EXPECT_NEAR(lossy / device, two_mode(30.0) / two_mode(3.0), 0.02);
}

TEST(Ringdown, SweepKeepsIndexOrderAndRecordsFailures) {
    const model::DeviceParams p;
    SweepGrid grid;
    grid.axes = {{"omega_p", "GHz", {resonance(p) - from_MHz(40), resonance(p)}},
                 {"g_p", "MHz", {0.0, from_MHz(4)}}};
    const auto r = ringdown_spectroscopy(p, grid);
    ASSERT_EQ(r.points.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(r.points[k].index, k);
    EXPECT_GT(r.points[3].rate, r.points[1].rate);
    EXPECT_NEAR(r.points[0].rate, r.points[2].rate, 1e-6 * r.points[0].rate);
}

TEST(Ringdown, DefaultGridShape) {
    const model::DeviceParams p;
    const auto grid = default_ringdown_grid(p);
    ASSERT_EQ(grid.axes.size(), 2u);
    EXPECT_EQ(grid.axes[0].values.size(), 21u);
    EXPECT_EQ(grid.axes[1].values.size(), 11u);
    EXPECT_EQ(grid.size(), 231u);
    EXPECT_DOUBLE_EQ(grid.axes[1].values.front(), 0.0);
    EXPECT_NEAR(to_MHz(grid.axes[1].values.back()), 11.0, 1e-12);
    const auto& w = grid.axes[0].values;
    EXPECT_NE(std::find_if(w.begin(), w.end(), [&](double v) { return std::abs(v - resonance(p)) < 1e-9; }), w.end());
    EXPECT_EQ(grid.unflatten(23), (std::pair<std::size_t, std::size_t>{2, 1}));
}

TEST(SweepGrid, Validation) {
    SweepGrid empty;
    EXPECT_THROW(empty.validate(), InvalidArgument);
    SweepGrid nan;
    nan.axes = {{"g_p", "MHz", {0.0, std::nan("")}}};
    EXPECT_THROW(nan.validate(), InvalidArgument);
    SweepGrid blank;
    blank.axes = {{"g_p", "MHz", {}}};
    EXPECT_THROW(blank.validate(), InvalidArgument);
}

TEST(Reset, DrivenRecoversWithinTwoHundredNanoseconds) {
    const model::DeviceParams p;
    ResetSpec spec;
    spec.kappa_eff = exchange_rate(from_MHz(10), p.kappa_diss);
    const auto tau = dynamics::linspace(0.0, 3.0, 601);
    const auto r = reset_experiment(p, spec, tau);
    EXPECT_NEAR(r.gamma_cav, 51.0, 0.15 * 51.0);
    EXPECT_NEAR(r.recovery_time, 0.170, 0.2 * 0.170);
}

TEST(Reset, UndrivenRecoveryAndSpeedup) {
    const model::DeviceParams p;
    const auto tau = dynamics::linspace(0.0, 3.0, 601);
    ResetSpec spec;
    const auto slow = reset_experiment(p, spec, tau);
    EXPECT_NEAR(slow.gamma_cav, 3.0, 0.05 * 3.0);
    EXPECT_NEAR(slow.recovery_time, 2.2, 0.25 * 2.2);
    spec.kappa_eff = exchange_rate(from_MHz(10), p.kappa_diss);
    EXPECT_GT(slow.recovery_time / reset_experiment(p, spec, tau).recovery_time, 10.0);
}

TEST(Reset, CurveMonotoneAndBounded) {
    const model::DeviceParams p;
    ResetSpec spec;
    const auto r = reset_experiment(p, spec, dynamics::linspace(0.0, 3.0, 301));
    for (std::size_t i = 1; i < r.gamma_2.size(); ++i) {
        EXPECT_LE(r.gamma_2[i], r.gamma_2[i - 1]);
        EXPECT_GE(r.gamma_2[i], spec.gamma_2_0);
    }
}

TEST(Reset, EmptyCavityIsFlat) {
    const model::DeviceParams p;
    ResetSpec spec;
    spec.n_bar0 = 0.0;
    const auto r = reset_experiment(p, spec, dynamics::linspace(0.0, 1.0, 11));
    for (double g : r.gamma_2) EXPECT_DOUBLE_EQ(g, spec.gamma_2_0);
    EXPECT_DOUBLE_EQ(r.recovery_time, 0.0);
}

TEST(Reset, NeverRecoveringIsInfinite) {
    const model::DeviceParams p;
    ResetSpec spec;
    const auto r = reset_experiment(p, spec, dynamics::linspace(0.0, 0.5, 11));
    EXPECT_TRUE(std::isinf(r.recovery_time));
}

TEST(ExchangeRate, Regimes) {
    const double kd = from_MHz(60);
    EXPECT_DOUBLE_EQ(exchange_rate(0.0, kd), 0.0);
    EXPECT_DOUBLE_EQ(exchange_rate(kd, kd), kd);
    EXPECT_DOUBLE_EQ(exchange_rate(from_MHz(10), kd), analytics::effective_loss(from_MHz(10), kd).rate);
}

class Refrigeration : public ::testing::Test {
protected:
    RefrigerationResult run(double gamma_2_0 = 0.124) {
        RefrigerationSpec spec;
        spec.g_p = power_axis(from_MHz(11), 12);
        spec.g_p.push_back(from_MHz(60));
        spec.injected_n = {0.0, 0.14, 0.35, 1.10};
        spec.gamma_2_0 = gamma_2_0;
        return refrigeration_experiment(model::DeviceParams{}, spec);
    }
};

TEST_F(Refrigeration, MonotoneInPowerPerRow) {
    const auto r = run();
    ASSERT_EQ(r.points.size(), 4 * r.n_power);
    for (std::size_t row = 0; row < 4; ++row) {
        for (std::size_t i = 1; i < r.n_power; ++i) {
            EXPECT_LE(r.points[row * r.n_power + i].gamma_2e, r.points[row * r.n_power + i - 1].gamma_2e + 1e-12);
        }
    }
}

TEST_F(Refrigeration, ZeroPowerMatchesMeasuredRates) {
    const auto r = run();
    const double expected[] = {0.274, 0.425, 0.980};
    for (std::size_t row = 1; row < 4; ++row) {
        EXPECT_NEAR(r.points[row * r.n_power].gamma_2e, expected[row - 1], 0.2 * expected[row - 1]) << "row " << row;
    }
}

TEST_F(Refrigeration, BareThermalDephasing) {
    const auto r = run();
    EXPECT_NEAR(r.points[0].gamma_2e, 0.172, 0.1 * 0.172);
    EXPECT_NEAR(r.points[0].n_thermal, 0.107, 0.01 * 0.107);
    EXPECT_DOUBLE_EQ(r.points[0].n_coherent, 0.0);
}

TEST_F(Refrigeration, HighPowerAsymptote) {
    const auto r = run();
    EXPECT_NEAR(r.points[r.n_power - 1].gamma_2e, 0.124, 0.1 * 0.124);
}

TEST(RefrigerationErrors, RejectsEmptyAndNegative) {
    RefrigerationSpec spec;
    EXPECT_THROW(refrigeration_experiment(model::DeviceParams{}, spec), InvalidArgument);
    spec.g_p = {0.0};
    spec.injected_n = {-1.0};
    EXPECT_THROW(refrigeration_experiment(model::DeviceParams{}, spec), InvalidArgument);
}

TEST(Spectroscopy, WeakCouplingSitsOnBareModes) {
    model::DeviceParams p;
    p.g_c *= 0.05;
    p.g_f *= 0.05;
    const SpectroscopyOptions opts;
    for (double phi : {0.0, 0.25}) {
        const auto w = single_excitation_frequencies(p, opts, phi);
        std::vector<double> bare{p.omega_c, p.omega_f, model::dissipator_frequency(p, {phi})};
        std::sort(bare.begin(), bare.end());
        ASSERT_EQ(w.size(), 3);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(to_MHz(w(k)), to_MHz(bare[k]), 1.0) << "phi " << phi;
    }
}

TEST(Spectroscopy, FarFromCrossingsShiftIsDispersive) {
    // The device couplings are too strong for a 1 MHz decoupled limit anywhere
    // in the flux range; away from crossings the cavity branch must instead sit
    // at the second-order shifted frequency.
    const model::DeviceParams p;
    SpectroscopyOptions opts;
    opts.include_filter = false;
    const double phi = 0.0;
    const double wd = model::dissipator_frequency(p, {phi});
    const double g = model::coupling_flux_correction(p.g_c, p.omega_diss, wd, p.alpha_diss);
    const auto w = single_excitation_frequencies(p, opts, phi);
    const double dispersive = p.omega_c - g * g / (wd - p.omega_c);
    EXPECT_NEAR(to_MHz(w(0)), to_MHz(dispersive), 1.0);
}

TEST(Spectroscopy, CrossingGapsAreTwiceTheCoupling) {
    const model::DeviceParams p;
    const SpectroscopyOptions opts;
    const auto cav = find_crossing_gap(p, opts, p.omega_c);
    EXPECT_NEAR(to_MHz(cav.gap), 2 * 118.0, 0.02 * 2 * 118.0);
    const auto filt = find_crossing_gap(p, opts, p.omega_f, 0.1);
    EXPECT_NEAR(to_MHz(filt.gap), 2 * 535.0, 0.02 * 2 * 535.0);
}

TEST(Spectroscopy, BranchesAreContinuous) {
    const model::DeviceParams p;
    const auto phi = dynamics::linspace(0.0, 0.5, 201);
    const auto r = flux_spectroscopy(p, phi);
    ASSERT_EQ(r.branches.size(), 3u);
    ASSERT_EQ(r.labels.size(), 3u);
    for (const auto& b : r.branches) {
        ASSERT_EQ(b.size(), phi.size());
        for (std::size_t i = 1; i < b.size(); ++i) {
            // Bounded by the steepest bare slope times the step.
            EXPECT_LT(std::abs(b[i] - b[i - 1]), from_GHz(0.25)) << i;
        }
    }
    // Branches never cross.
    for (std::size_t i = 0; i < phi.size(); ++i) {
        EXPECT_LT(r.branches[0][i], r.branches[1][i]);
        EXPECT_LT(r.branches[1][i], r.branches[2][i]);
    }
}
