#include "pdiss/analytics.hpp"
#include "pdiss/calibration.hpp"
#include "pdiss/dynamics.hpp"
#include "pdiss/errors.hpp"
#include "pdiss/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pdiss;
using namespace pdiss::dynamics;
using quantum::Complex;
using quantum::DensityMatrix;
using quantum::ModeKind;
using quantum::Operator;
using units::from_MHz;

namespace {

quantum::SpacePtr single_mode(std::size_t cutoff) { return quantum::make_space({{"a", ModeKind::bosonic, cutoff}}); }

LindbladSystem lossy_mode(const quantum::SpacePtr& s, double kappa, double n_th = 0.0) {
    const Operator a = quantum::annihilation(s, "a");
    LindbladSystem sys{Operator::zero(s), {}, {Complex(std::sqrt(kappa * (1 + n_th))) * a}};
    if (n_th > 0.0) sys.collapse.push_back(Complex(std::sqrt(kappa * n_th)) * a.adjoint());
    return sys;
}

double fitted_rate(const std::vector<double>& t, const std::vector<double>& n, double lo, double hi) {
    std::vector<double> tt;
    std::vector<double> yy;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (n[i] <= lo && n[i] >= hi) {
            tt.push_back(t[i]);
            yy.push_back(n[i]);
        }
    }
    return calibration::fit_exponential(tt, yy).value("rate");
}

}  // namespace

TEST(Evolve, FreeSystemIsStatic) {
    const auto s = single_mode(3);
    Eigen::VectorXcd psi(3);
    psi << 0.6, Complex(0, 0.6), 0.529150262212918;
    const auto rho0 = DensityMatrix::pure(s, psi);
    const LindbladSystem sys{Operator::zero(s), {}, {}};
    std::vector<quantum::Matrix> seen;
    EvolveOptions opts;
    opts.observer = [&](double, const quantum::Matrix& rho) { seen.push_back(rho); };
    evolve(sys, rho0, linspace(0, 5, 6), {}, opts);
    ASSERT_EQ(seen.size(), 6u);
    for (const auto& rho : seen) EXPECT_LT((rho - rho0.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Evolve, SingleModeDecayIsExponential) {
    const auto s = single_mode(3);
    const double kappa = 3.0;
    const auto t = linspace(0.0, 1.0, 51);
    const auto trace = evolve(lossy_mode(s, kappa), DensityMatrix::basis_state(s, {1}), t,
                              {{"n", quantum::number(s, "a")}});
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(trace.values("n")[i], std::exp(-kappa * t[i]), 1e-6);
}

TEST(Evolve, ThermalRelaxationApproachesOccupation) {
    const auto s = single_mode(8);
    const auto t = linspace(0.0, 6.0, 31);
    const auto trace = evolve(lossy_mode(s, 2.0, 0.2), DensityMatrix::basis_state(s, {0}), t,
                              {{"n", quantum::number(s, "a")}});
    // <n>(t) = n_th (1 - e^{-k t}) for a linear mode.
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(trace.values("n")[i], 0.2 * (1 - std::exp(-2.0 * t[i])), 2e-4);
    }
}

TEST(Evolve, RejectsBadGrid) {
    const auto s = single_mode(2);
    const auto sys = lossy_mode(s, 1.0);
    const auto rho0 = DensityMatrix::basis_state(s, {1});
    const std::vector<double> back{0.0, 1.0, 0.5};
    EXPECT_THROW(evolve(sys, rho0, back, {}), InvalidArgument);
    EXPECT_THROW(evolve(sys, rho0, std::vector<double>{}, {}), InvalidArgument);
}

TEST(Evolve, RejectsSpaceMismatch) {
    const auto sys = lossy_mode(single_mode(3), 1.0);
    EXPECT_THROW(evolve(sys, DensityMatrix::basis_state(single_mode(4), {1}), linspace(0, 1, 3), {}),
                 InvalidArgument);
}

TEST(Evolve, StepRuleRespectsDrivePeriod) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({2, 2});
    model::DriveSpec drive;
    drive.epsilon_p = from_MHz(50);
    drive.omega_p = std::abs(p.omega_diss - p.omega_c);
    LindbladSystem sys{model::build_jc_hamiltonian(space, p, p.omega_diss), {model::build_parametric_drive(space, drive)},
                       model::collapse_operators(space, p, false)};
    EvolveStats stats;
    evolve(sys, DensityMatrix::basis_state(space, {1, 0}), linspace(0, 0.002, 3), {}, {}, &stats);
    const double period = 2 * std::numbers::pi / drive.omega_p;
    EXPECT_LE(stats.step_size, period / 40 * (1 + 1e-12));
    EXPECT_GT(stats.steps, 0u);
}

TEST(Evolve, StructuralInvariantsOverTenMicroseconds) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({4, 2});
    LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, from_MHz(5.0), from_MHz(3.0)), {},
                       model::collapse_operators(space, p, true)};
    double worst_herm = 0.0;
    double worst_eig = 0.0;
    EvolveOptions opts;
    opts.observer = [&](double, const quantum::Matrix& rho) {
        worst_herm = std::max(worst_herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        worst_eig = std::min(worst_eig, quantum::hermitian_eigenvalues(rho).minCoeff());
    };
    EvolveStats stats;
    // A single 10 us interval: no renormalization between start and end.
    const std::vector<double> t{0.0, 10.0};
    evolve(sys, DensityMatrix::basis_state(space, {2, 0}), t, {}, opts, &stats);
    EXPECT_LT(stats.max_trace_drift, 1e-8);
    EXPECT_LT(worst_herm, 1e-9);
    EXPECT_GE(worst_eig, -1e-7);
}

TEST(Evolve, OverdampedSwapMatchesEffectiveLoss) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({3, 2});
    for (double g_mhz : {10.0, 11.0}) {
        const double g = from_MHz(g_mhz);
        LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, g, 0.0), {},
                           model::collapse_operators(space, p, false)};
        const auto t = linspace(0.0, 0.15, 1501);
        const auto tr = evolve(sys, DensityMatrix::basis_state(space, {1, 0}), t, {{"n", quantum::number(space, "cavity")}});
        const double rate = fitted_rate(t, tr.values("n"), std::exp(-1.0), std::exp(-5.0));
        const double expected = analytics::effective_loss(g, p.kappa_diss).rate + p.kappa_c;
        EXPECT_NEAR(rate, expected, 0.05 * expected) << g_mhz;
    }
}

TEST(Evolve, TenMegahertzDriveGivesFiftyOnePerMicrosecond) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({3, 2});
    LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, from_MHz(10.0), 0.0), {},
                       model::collapse_operators(space, p, false)};
    const auto t = linspace(0.0, 0.15, 1501);
    const auto tr = evolve(sys, DensityMatrix::basis_state(space, {1, 0}), t, {{"n", quantum::number(space, "cavity")}});
    EXPECT_NEAR(fitted_rate(t, tr.values("n"), std::exp(-1.0), std::exp(-5.0)), 51.0, 0.15 * 51.0);
}

TEST(SteadyState, LossyModeGoesToVacuum) {
    const auto s = single_mode(4);
    SteadyStateInfo info;
    const auto rho = steady_state(lossy_mode(s, 1.0), &info);
    EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0, 1e-10);
    EXPECT_EQ(info.null_dimension, 1u);
    EXPECT_LT(info.residual, 1e-9);
}

TEST(SteadyState, ThermalOccupation) {
    const auto s = single_mode(12);
    const auto rho = steady_state(lossy_mode(s, 2.997, 0.107));
    EXPECT_NEAR(quantum::expectation(rho, quantum::number(s, "a")).real(), 0.107, 1e-6);
}

TEST(SteadyState, DegenerateNullSpaceThrows) {
    const auto s = single_mode(3);
    const LindbladSystem closed{quantum::number(s, "a"), {}, {}};
    EXPECT_THROW(steady_state(closed), NumericalError);
}

TEST(SteadyState, TimeDependentRejected) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({2, 2});
    model::DriveSpec drive;
    drive.epsilon_p = 1.0;
    drive.omega_p = 1.0;
    LindbladSystem sys{model::build_jc_hamiltonian(space, p, p.omega_diss), {model::build_parametric_drive(space, drive)},
                       model::collapse_operators(space, p, false)};
    EXPECT_THROW(liouvillian(sys), InvalidArgument);
}

TEST(SteadyState, AgreesWithLongEvolution) {
    model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({4, 2});
    LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, from_MHz(4.0), 0.0), {},
                       model::collapse_operators(space, p, true)};
    const auto ss = steady_state(sys);
    const auto n = quantum::number(space, "cavity");
    const auto tr = evolve(sys, DensityMatrix::basis_state(space, {0, 0}), linspace(0, 4.0, 5), {{"n", n}});
    EXPECT_NEAR(tr.values("n").back(), quantum::expectation(ss, n).real(), 1e-6);
}

TEST(CoherentRingdown, Examples) {
    const std::vector<double> t{0.0, 0.0174, 1.0 / 3.0};
    const auto slow = coherent_ringdown(39.0, 3.0, t);
    EXPECT_DOUBLE_EQ(slow.values("n")[0], 39.0);
    EXPECT_NEAR(slow.values("n")[2], 39.0 / std::exp(1.0), 1e-12);
    EXPECT_NEAR(slow.values("amplitude")[2], std::sqrt(39.0) * std::exp(-0.5), 1e-12);
    const auto fast = coherent_ringdown(39.0, 57.4, t);
    EXPECT_NEAR(fast.values("n")[1], 39.0 / std::exp(1.0), 0.005 * 39.0 / std::exp(1.0));
    const auto flat = coherent_ringdown(5.0, 0.0, t);
    for (double v : flat.values("n")) EXPECT_DOUBLE_EQ(v, 5.0);
    EXPECT_THROW(coherent_ringdown(-1.0, 1.0, t), InvalidArgument);
}

TEST(CoherentRingdown, MatchesLindbladForLinearCavity) {
    const auto s = single_mode(30);
    const auto psi = quantum::coherent_amplitudes(Complex(std::sqrt(3.0), 0.0), 30);
    const auto t = linspace(0.0, 0.5, 11);
    const auto full = evolve(lossy_mode(s, 3.0), DensityMatrix::pure(s, psi), t, {{"n", quantum::number(s, "a")}});
    const auto fast = coherent_ringdown(3.0, 3.0, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(full.values("n")[i], fast.values("n")[i], 1e-6);
}

TEST(ExpectationTrace, Validation) {
    EXPECT_THROW(ExpectationTrace({0.0, 0.0}, {}), InvalidArgument);
    EXPECT_THROW(ExpectationTrace({0.0, 1.0}, {{"x", {1.0}}}), InvalidArgument);
    const ExpectationTrace ok({0.0, 1.0}, {{"x", {1.0, 2.0}}});
    EXPECT_THROW(ok.values("y"), InvalidArgument);
    EXPECT_EQ(ok.values("x")[1], 2.0);
}

TEST(Linspace, Endpoints) {
    const auto v = linspace(1.0, 2.0, 5);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v.front(), 1.0);
    EXPECT_DOUBLE_EQ(v.back(), 2.0);
    EXPECT_DOUBLE_EQ(v[2], 1.5);
}
