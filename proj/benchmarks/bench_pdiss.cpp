#include "pdiss/calibration.hpp"
#include "pdiss/dynamics.hpp"
#include "pdiss/experiments.hpp"
#include "pdiss/model.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace pdiss;

static void BM_EvolveRotatingFrame(benchmark::State& state) {
    const model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({std::size_t(state.range(0)), 2});
    const dynamics::LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, units::from_MHz(10), 0.0), {},
                                       model::collapse_operators(space, p, false)};
    const auto rho0 = quantum::DensityMatrix::basis_state(space, {1, 0});
    const auto t = dynamics::linspace(0.0, 0.1, 101);
    const std::vector<dynamics::NamedObservable> obs{{"n", quantum::number(space, model::kCavity)}};
    for (auto _ : state) benchmark::DoNotOptimize(dynamics::evolve(sys, rho0, t, obs));
}
BENCHMARK(BM_EvolveRotatingFrame)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_EvolveLabFrame(benchmark::State& state) {
    const model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({3, 2});
    const auto drive = model::drive_for_coupling(p, units::from_MHz(7), std::abs(p.omega_diss - p.omega_c));
    const dynamics::LindbladSystem sys{model::build_jc_hamiltonian(space, p, p.omega_diss),
                                       {model::build_parametric_drive(space, drive)},
                                       model::collapse_operators(space, p, false)};
    const auto rho0 = quantum::DensityMatrix::basis_state(space, {1, 0});
    const auto t = dynamics::linspace(0.0, 0.01, 11);
    for (auto _ : state) benchmark::DoNotOptimize(dynamics::evolve(sys, rho0, t, {}));
}
BENCHMARK(BM_EvolveLabFrame)->Unit(benchmark::kMillisecond);

static void BM_SteadyState(benchmark::State& state) {
    const model::DeviceParams p;
    const auto space = model::cavity_dissipator_space({std::size_t(state.range(0)), 2});
    const dynamics::LindbladSystem sys{model::rotating_frame_hamiltonian(space, p, units::from_MHz(10), 0.0), {},
                                       model::collapse_operators(space, p, true)};
    for (auto _ : state) benchmark::DoNotOptimize(dynamics::steady_state(sys));
}
BENCHMARK(BM_SteadyState)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_RingdownPoint(benchmark::State& state) {
    const model::DeviceParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            experiments::ringdown_point(p, std::abs(p.omega_diss - p.omega_c), units::from_MHz(10)));
    }
}
BENCHMARK(BM_RingdownPoint)->Unit(benchmark::kMillisecond);

static void BM_FitExponential(benchmark::State& state) {
    const auto t = dynamics::linspace(0.0, 0.1, std::size_t(state.range(0)));
    std::vector<double> y;
    for (double v : t) y.push_back(39.0 * std::exp(-57.4 * v) + 0.3 + 1e-3 * std::sin(1e3 * v));
    for (auto _ : state) benchmark::DoNotOptimize(calibration::fit_exponential(t, y));
}
BENCHMARK(BM_FitExponential)->Arg(200)->Arg(2000);

static void BM_FluxSpectroscopy(benchmark::State& state) {
    const model::DeviceParams p;
    const auto phi = dynamics::linspace(0.0, 0.5, 201);
    for (auto _ : state) benchmark::DoNotOptimize(experiments::flux_spectroscopy(p, phi));
}
BENCHMARK(BM_FluxSpectroscopy);
BENCHMARK_MAIN();
