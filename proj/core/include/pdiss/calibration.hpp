#pragma once

// Nonlinear least squares (damped Gauss-Newton with Marquardt scaling) and the
// fitters built on it: exponential ringdowns, Lorentzian lines, avoided
// crossings and the SQUID flux curve.

#include "pdiss/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdiss::calibration {

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> sigmas;  // 1-sigma, residual-variance scaled
    double residual_norm = 0.0;
    double r2 = 0.0;
    double gradient_norm = 0.0;
    bool converged = false;
    bool degenerate = false;
    int iterations = 0;
    std::vector<std::string> warnings;

    double value(const std::string& name) const;
    double sigma(const std::string& name) const;
    bool flagged() const { return degenerate || !warnings.empty(); }
};

struct LmOptions {
    int max_iterations = 200;
    double relative_tolerance = 1e-10;
    // Scale-free gradient test: max_j |J_j . r| / (|J_j| |r|).
    double gradient_tolerance = 1e-6;
    // Converged when the Gauss-Newton step predicts a relative cost decrease
    // below this, i.e. the optimum is located to ~sqrt(tol (m - n)) sigma.
    double cost_tolerance = 1e-8;
    double initial_damping = 1e-3;
};

// residual(p) returns model - data. Central-difference Jacobian with step
// max(1e-7 |p_j|, 1e-9).
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

FitResult least_squares(const ResidualFn& residual, const Eigen::VectorXd& p0, std::vector<std::string> names,
                        std::span<const double> data, const LmOptions& options = {});

// y = A e^{-gamma t} + c. Parameters: amplitude, rate, offset.
FitResult fit_exponential(std::span<const double> t, std::span<const double> y, const LmOptions& options = {});
// Offset pinned to zero. Parameters: amplitude, rate.
FitResult fit_exponential_no_offset(std::span<const double> t, std::span<const double> y,
                                    const LmOptions& options = {});

// p = floor + height / (1 + (2 (f - center) / fwhm)^2).
FitResult fit_lorentzian(std::span<const double> f, std::span<const double> power, const LmOptions& options = {});

// Eigenvalues of [[w1(phi), g], [g, w2]] fitted to a lower and upper branch.
// Parameters: g, omega_bare (= w2).
FitResult fit_avoided_crossing(std::span<const double> phi, std::span<const double> lower,
                               std::span<const double> upper, const std::function<double(double)>& omega_1,
                               const LmOptions& options = {});
FitResult fit_avoided_crossing(std::span<const double> phi, std::span<const double> lower,
                               std::span<const double> upper, const model::FluxCurve& curve,
                               const LmOptions& options = {});

struct FluxFitOptions {
    bool free_alpha = false;
    double alpha = units::from_MHz(-350.0);  // pinned value, or start value when free
    double omega_max_guess = 0.0;            // 0: from the data
    double d_guess = 0.1;
    LmOptions lm;
};

// Fit of w(phi) = (w_max - alpha)(cos^2 pi phi + d^2 sin^2 pi phi)^(1/4) + alpha.
// Parameters: omega_max, d and, when free, alpha.
FitResult fit_flux_curve(std::span<const double> phi, std::span<const double> omega, const FluxFitOptions& options = {});

enum class ChiConvention {
    full_shift,  // chi = 2 g^2 alpha / (Delta (Delta + alpha)), cavity pull between qubit states
    half_shift,  // chi = g^2 alpha / (Delta (Delta + alpha))
};

enum class ChiSign {
    magnitude,  // use |chi Delta (Delta + alpha) / alpha|
    signed_,    // error when the signs are inconsistent
};

// Delta = omega_q - omega_c.
double infer_coupling_from_chi(double chi, double omega_q, double omega_c, double alpha_q,
                               ChiConvention convention = ChiConvention::full_shift,
                               ChiSign sign = ChiSign::magnitude);

// Angular frequency of the strongest spectral peak of y on a uniform grid.
// Mean removed, zero-padded x8, parabolic peak interpolation. Bins below
// `min_frequency` are skipped (e.g. the lobe of a decaying baseline).
double dominant_frequency(std::span<const double> t, std::span<const double> y, double min_frequency = 0.0);

// Decay rate of the local maxima of an oscillating signal, from a linear fit
// of their logarithm. Parameters: amplitude, rate.
FitResult fit_peak_envelope(std::span<const double> t, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_sigma = 0.0;
};

LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

}  // namespace pdiss::calibration
