#include "pdiss/calibration.hpp"

#include "pdiss/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace pdiss::calibration {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double FitResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    throw InvalidArgument("FitResult: no parameter '" + name + "'");
}

double FitResult::sigma(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return sigmas[i];
    }
    throw InvalidArgument("FitResult: no parameter '" + name + "'");
}

namespace {

MatrixXd numeric_jacobian(const ResidualFn& f, const VectorXd& p, Eigen::Index m) {
    MatrixXd jac(m, p.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double h = std::max(1e-7 * std::abs(p(j)), 1e-9);
        VectorXd plus = p;
        VectorXd minus = p;
        plus(j) += h;
        minus(j) -= h;
        jac.col(j) = (f(plus) - f(minus)) / (2.0 * h);
    }
    return jac;
}

double gradient_cosine(const MatrixXd& jac, const VectorXd& r) {
    const double rn = r.norm();
    if (rn == 0.0) return 0.0;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < jac.cols(); ++j) {
        const double cn = jac.col(j).norm();
        if (cn == 0.0) continue;
        worst = std::max(worst, std::abs(jac.col(j).dot(r)) / (cn * rn));
    }
    return worst;
}

// Relative cost decrease promised by the undamped Gauss-Newton step:
// g^T A^+ g / |r|^2, the squared cosine between r and the Jacobian's range.
double predicted_decrease(const MatrixXd& a, const VectorXd& g, double cost) {
    if (cost <= 0.0) return 0.0;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
    const double v = g.dot(cod.solve(g)) / cost;
    return std::isfinite(v) ? std::abs(v) : INFINITY;
}

void require_same_length(std::span<const double> a, std::span<const double> b, const char* context) {
    if (a.size() != b.size()) throw InvalidArgument(std::string(context) + ": array lengths differ");
}

void require_finite(std::span<const double> a, const char* context) {
    for (double v : a) {
        if (!std::isfinite(v)) throw InvalidArgument(std::string(context) + ": non-finite input");
    }
}

void require_increasing(std::span<const double> t, const char* context) {
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw InvalidArgument(std::string(context) + ": abscissa must be increasing");
    }
}

double data_range(std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return *hi - *lo;
}

double mean_of(std::span<const double> y) { return std::accumulate(y.begin(), y.end(), 0.0) / y.size(); }

bool is_flat(std::span<const double> y) {
    const double scale = std::max(1.0, std::abs(mean_of(y)));
    return data_range(y) <= 1e-12 * scale;
}

FitResult flat_result(std::vector<std::string> names, std::vector<double> values) {
    FitResult out;
    out.names = std::move(names);
    out.values = std::move(values);
    out.sigmas.assign(out.values.size(), 0.0);
    out.converged = true;
    out.degenerate = true;
    out.r2 = 0.0;
    out.warnings.push_back("data are constant; model parameters unidentifiable");
    return out;
}

// Weighted least squares of log z against t, weights z^2.
std::pair<double, double> log_linear_guess(std::span<const double> t, const std::vector<double>& z) {
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0)) continue;
        const double w = z[i] * z[i];
        const double ly = std::log(z[i]);
        sw += w;
        sx += w * t[i];
        sy += w * ly;
        sxx += w * t[i] * t[i];
        sxy += w * t[i] * ly;
    }
    const double den = sw * sxx - sx * sx;
    if (sw == 0.0 || den == 0.0) return {0.0, 0.0};
    const double slope = (sw * sxy - sx * sy) / den;
    const double intercept = (sy - slope * sx) / sw;
    return {intercept, slope};
}

}  // namespace

FitResult least_squares(const ResidualFn& residual, const VectorXd& p0, std::vector<std::string> names,
                        std::span<const double> data, const LmOptions& options) {
    if (static_cast<Eigen::Index>(names.size()) != p0.size()) {
        throw InvalidArgument("least_squares: names and parameters differ in length");
    }
    VectorXd p = p0;
    VectorXd r = residual(p);
    const Eigen::Index m = r.size();
    const Eigen::Index n = p.size();
    if (m < n) throw InvalidArgument("least_squares: fewer residuals than parameters");
    if (!r.allFinite()) throw NumericalError("least_squares: non-finite residual at the initial guess");

    double cost = r.squaredNorm();
    double lambda = options.initial_damping;
    FitResult out;
    out.names = std::move(names);
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        const MatrixXd jac = numeric_jacobian(residual, p, m);
        if (gradient_cosine(jac, r) <= options.gradient_tolerance) break;
        const MatrixXd a = jac.transpose() * jac;
        const VectorXd g = jac.transpose() * r;
        if (predicted_decrease(a, g, cost) <= options.cost_tolerance) break;
        bool accepted = false;
        VectorXd step;
        while (lambda < 1e16) {
            MatrixXd damped = a;
            for (Eigen::Index j = 0; j < n; ++j) damped(j, j) += lambda * std::max(a(j, j), 1e-300);
            step = damped.ldlt().solve(-g);
            const VectorXd trial = p + step;
            const VectorXd r_trial = residual(trial);
            const double c_trial = r_trial.squaredNorm();
            if (step.allFinite() && r_trial.allFinite() && c_trial < cost) {
                p = trial;
                r = r_trial;
                cost = c_trial;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
        if (step.norm() <= options.relative_tolerance * (p.norm() + options.relative_tolerance)) {
            ++iter;
            break;
        }
    }

    const MatrixXd jac = numeric_jacobian(residual, p, m);
    const double cosine = gradient_cosine(jac, r);
    out.gradient_norm = (jac.transpose() * r).lpNorm<Eigen::Infinity>();
    out.iterations = iter;
    out.residual_norm = r.norm();

    double data_scale = 0.0;
    for (double v : data) data_scale = std::max(data_scale, std::abs(v));
    const bool exact = out.residual_norm <= 1e-12 * std::max(data_scale, 1e-300) * std::sqrt(double(m));
    const double predicted = predicted_decrease(jac.transpose() * jac, jac.transpose() * r, cost);
    out.converged = cosine <= options.gradient_tolerance || predicted <= options.cost_tolerance || exact;
    if (!out.converged) out.warnings.push_back("did not converge");

    const MatrixXd a = jac.transpose() * jac;
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(a);
    cod.setThreshold(1e-12);
    if (cod.rank() < n) {
        out.degenerate = true;
        out.warnings.push_back("Jacobian is rank deficient");
    }
    const MatrixXd cov_unit = cod.pseudoInverse();
    const double s2 = m > n ? cost / static_cast<double>(m - n) : 0.0;
    out.values.assign(p.data(), p.data() + n);
    out.sigmas.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) out.sigmas[j] = std::sqrt(std::max(0.0, cov_unit(j, j) * s2));

    if (!data.empty()) {
        const double mu = mean_of(data);
        double tss = 0.0;
        for (double v : data) tss += (v - mu) * (v - mu);
        out.r2 = tss > 0.0 ? 1.0 - cost / tss : (cost == 0.0 ? 1.0 : 0.0);
    }
    return out;
}

FitResult fit_exponential(std::span<const double> t, std::span<const double> y, const LmOptions& options) {
    require_same_length(t, y, "fit_exponential");
    if (t.size() < 5) throw InvalidArgument("fit_exponential: need at least 5 points");
    require_finite(t, "fit_exponential");
    require_finite(y, "fit_exponential");
    require_increasing(t, "fit_exponential");
    if (is_flat(y)) return flat_result({"amplitude", "rate", "offset"}, {0.0, 0.0, mean_of(y)});

    const double range = data_range(y);
    const double sign = y.front() >= y.back() ? 1.0 : -1.0;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double c0 = sign > 0 ? *lo - 0.01 * range : *hi + 0.01 * range;
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = sign * (y[i] - c0);
    const auto [intercept, slope] = log_linear_guess(t, z);

    VectorXd p0(3);
    p0 << sign * std::exp(intercept), -slope, c0;
    const std::vector<double> tv(t.begin(), t.end());
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    auto residual = [&tv, &yv](const VectorXd& p) {
        VectorXd r(yv.size());
        for (Eigen::Index i = 0; i < yv.size(); ++i) r(i) = p(0) * std::exp(-p(1) * tv[i]) + p(2) - yv(i);
        return r;
    };
    FitResult out = least_squares(residual, p0, {"amplitude", "rate", "offset"}, y, options);
    if (out.value("rate") < 0.0) out.warnings.push_back("negative rate at optimum");
    return out;
}

FitResult fit_exponential_no_offset(std::span<const double> t, std::span<const double> y, const LmOptions& options) {
    require_same_length(t, y, "fit_exponential_no_offset");
    if (t.size() < 5) throw InvalidArgument("fit_exponential_no_offset: need at least 5 points");
    require_finite(t, "fit_exponential_no_offset");
    require_finite(y, "fit_exponential_no_offset");
    require_increasing(t, "fit_exponential_no_offset");
    if (is_flat(y)) {
        FitResult out = flat_result({"amplitude", "rate"}, {mean_of(y), 0.0});
        return out;
    }
    const double sign = y.front() >= 0.0 ? 1.0 : -1.0;
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = sign * y[i];
    const auto [intercept, slope] = log_linear_guess(t, z);
    VectorXd p0(2);
    p0 << sign * std::exp(intercept), -slope;
    const std::vector<double> tv(t.begin(), t.end());
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    auto residual = [&tv, &yv](const VectorXd& p) {
        VectorXd r(yv.size());
        for (Eigen::Index i = 0; i < yv.size(); ++i) r(i) = p(0) * std::exp(-p(1) * tv[i]) - yv(i);
        return r;
    };
    FitResult out = least_squares(residual, p0, {"amplitude", "rate"}, y, options);
    if (out.value("rate") < 0.0) out.warnings.push_back("negative rate at optimum");
    return out;
}

FitResult fit_lorentzian(std::span<const double> f, std::span<const double> power, const LmOptions& options) {
    require_same_length(f, power, "fit_lorentzian");
    if (f.size() < 7) throw InvalidArgument("fit_lorentzian: need at least 7 points");
    require_finite(f, "fit_lorentzian");
    require_finite(power, "fit_lorentzian");
    require_increasing(f, "fit_lorentzian");
    if (is_flat(power)) return flat_result({"center", "fwhm", "height", "floor"}, {mean_of(f), 0.0, 0.0, mean_of(power)});

    // Work in normalized coordinates so all parameters are O(1).
    const double xc = 0.5 * (f.front() + f.back());
    const double xs = 0.5 * (f.back() - f.front());
    double ys = 0.0;
    for (double v : power) ys = std::max(ys, std::abs(v));
    std::vector<double> u(f.size());
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        u[i] = (f[i] - xc) / xs;
        v[i] = power[i] / ys;
    }

    std::vector<double> sorted = v;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const bool peak = (*hi - median) >= (median - *lo);
    const std::size_t ext = static_cast<std::size_t>((peak ? hi : lo) - v.begin());
    const double floor0 = peak ? *lo : *hi;
    const double height0 = v[ext] - floor0;
    const double half = floor0 + 0.5 * height0;
    std::size_t left = ext;
    std::size_t right = ext;
    auto above = [&](std::size_t i) { return peak ? v[i] >= half : v[i] <= half; };
    while (left > 0 && above(left - 1)) --left;
    while (right + 1 < v.size() && above(right + 1)) ++right;
    const double spacing = 2.0 / static_cast<double>(v.size() - 1);
    const double fwhm0 = std::max(u[right] - u[left], spacing);

    VectorXd p0(4);
    p0 << u[ext], fwhm0, height0, floor0;
    auto residual = [&u, &v](const VectorXd& p) {
        VectorXd r(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = 2.0 * (u[i] - p(0)) / p(1);
            r(static_cast<Eigen::Index>(i)) = p(3) + p(2) / (1.0 + x * x) - v[i];
        }
        return r;
    };
    FitResult fit = least_squares(residual, p0, {"center", "fwhm", "height", "floor"}, v, options);
    fit.values = {xc + xs * fit.values[0], xs * std::abs(fit.values[1]), ys * fit.values[2], ys * fit.values[3]};
    fit.sigmas = {xs * fit.sigmas[0], xs * fit.sigmas[1], ys * fit.sigmas[2], ys * fit.sigmas[3]};
    fit.residual_norm *= ys;
    fit.gradient_norm *= ys * ys;
    if (fit.r2 < 0.99) fit.warnings.push_back("single-line model underfits the data");
    return fit;
}

FitResult fit_avoided_crossing(std::span<const double> phi, std::span<const double> lower,
                               std::span<const double> upper, const std::function<double(double)>& omega_1,
                               const LmOptions& options) {
    require_same_length(phi, lower, "fit_avoided_crossing");
    require_same_length(phi, upper, "fit_avoided_crossing");
    if (phi.size() < 2) throw InvalidArgument("fit_avoided_crossing: need at least 2 points");
    require_finite(lower, "fit_avoided_crossing");
    require_finite(upper, "fit_avoided_crossing");

    const std::size_t n = phi.size();
    std::vector<double> w1(n);
    for (std::size_t i = 0; i < n; ++i) w1[i] = omega_1(phi[i]);
    std::vector<double> data(2 * n);
    std::copy(lower.begin(), lower.end(), data.begin());
    std::copy(upper.begin(), upper.end(), data.begin() + static_cast<std::ptrdiff_t>(n));

    // The bare mode must sit between the two branches somewhere on the grid.
    bool bracketed = false;
    std::size_t i_min = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (upper[i] < lower[i]) throw InvalidArgument("fit_avoided_crossing: upper branch below lower branch");
        if (upper[i] - lower[i] < upper[i_min] - lower[i_min]) i_min = i;
        const double sign_here = w1[i] - 0.5 * (lower[i] + upper[i]);
        const double sign_first = w1[0] - 0.5 * (lower[0] + upper[0]);
        if (sign_here * sign_first <= 0.0) bracketed = true;
    }
    if (!bracketed) throw InvalidArgument("fit_avoided_crossing: branches do not bracket the crossing");

    const double w2_0 = 0.5 * (lower[i_min] + upper[i_min]);
    const double scale = std::max(std::abs(w2_0), 1.0);
    const double g0 = std::max(0.5 * (upper[i_min] - lower[i_min]), 1e-3 * scale);
    VectorXd p0(2);
    p0 << g0, w2_0;
    auto residual = [&](const VectorXd& p) {
        VectorXd r(static_cast<Eigen::Index>(2 * n));
        for (std::size_t i = 0; i < n; ++i) {
            const double mean = 0.5 * (w1[i] + p(1));
            const double half = 0.5 * (w1[i] - p(1));
            const double root = std::sqrt(half * half + p(0) * p(0));
            r(static_cast<Eigen::Index>(i)) = mean - root - lower[i];
            r(static_cast<Eigen::Index>(n + i)) = mean + root - upper[i];
        }
        return r;
    };
    FitResult fit = least_squares(residual, p0, {"g", "omega_bare"}, data, options);
    fit.values[0] = std::abs(fit.values[0]);
    const double g = fit.values[0];
    if (g <= 3.0 * fit.sigmas[0] || g < 1e-6 * std::abs(fit.values[1])) {
        fit.degenerate = true;
        fit.warnings.push_back("branches do not anticross (g consistent with zero)");
    }
    return fit;
}

FitResult fit_avoided_crossing(std::span<const double> phi, std::span<const double> lower,
                               std::span<const double> upper, const model::FluxCurve& curve,
                               const LmOptions& options) {
    return fit_avoided_crossing(
        phi, lower, upper, [curve](double x) { return model::dissipator_frequency(curve, model::FluxPoint{x}); },
        options);
}

FitResult fit_flux_curve(std::span<const double> phi, std::span<const double> omega, const FluxFitOptions& options) {
    require_same_length(phi, omega, "fit_flux_curve");
    require_finite(phi, "fit_flux_curve");
    require_finite(omega, "fit_flux_curve");
    const std::size_t free = options.free_alpha ? 3 : 2;
    if (phi.size() < std::max<std::size_t>(3, free + 1)) {
        throw InvalidArgument("fit_flux_curve: need at least " + std::to_string(std::max<std::size_t>(3, free + 1)) +
                              " points for " + std::to_string(free) + " free parameters");
    }

    const double alpha0 = options.alpha;
    const double d0 = options.d_guess;
    double wmax0 = options.omega_max_guess;
    if (wmax0 == 0.0) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double c = std::cos(std::numbers::pi * phi[i]);
            const double s = std::sin(std::numbers::pi * phi[i]);
            const double a = std::pow(c * c + d0 * d0 * s * s, 0.25);
            wmax0 += (omega[i] - alpha0) / a + alpha0;
        }
        wmax0 /= static_cast<double>(phi.size());
    }

    const std::vector<double> ph(phi.begin(), phi.end());
    const std::vector<double> om(omega.begin(), omega.end());
    const bool free_alpha = options.free_alpha;
    auto residual = [&ph, &om, free_alpha, alpha0](const VectorXd& p) {
        const model::FluxCurve curve{p(0), free_alpha ? p(2) : alpha0, p(1)};
        VectorXd r(static_cast<Eigen::Index>(ph.size()));
        for (std::size_t i = 0; i < ph.size(); ++i) {
            r(static_cast<Eigen::Index>(i)) = model::dissipator_frequency(curve, model::FluxPoint{ph[i]}) - om[i];
        }
        return r;
    };
    VectorXd p0(static_cast<Eigen::Index>(free));
    std::vector<std::string> names{"omega_max", "d"};
    if (free_alpha) {
        p0 << wmax0, d0, alpha0;
        names.push_back("alpha");
    } else {
        p0 << wmax0, d0;
    }
    FitResult fit = least_squares(residual, p0, std::move(names), omega, options.lm);
    fit.values[1] = std::abs(fit.values[1]);
    return fit;
}

double infer_coupling_from_chi(double chi, double omega_q, double omega_c, double alpha_q, ChiConvention convention,
                               ChiSign sign) {
    const double delta = omega_q - omega_c;
    const double denom = delta * (delta + alpha_q);
    if (denom == 0.0) throw InvalidArgument("infer_coupling_from_chi: Delta (Delta + alpha) is zero");
    if (alpha_q == 0.0) throw InvalidArgument("infer_coupling_from_chi: alpha must be nonzero");
    const double factor = convention == ChiConvention::full_shift ? 2.0 : 1.0;
    const double g2 = chi * denom / (factor * alpha_q);
    if (sign == ChiSign::signed_ && g2 < 0.0) {
        throw InvalidArgument("infer_coupling_from_chi: sign of chi inconsistent with Delta and alpha");
    }
    return std::sqrt(std::abs(g2));
}

double dominant_frequency(std::span<const double> t, std::span<const double> y, double min_frequency) {
    require_same_length(t, y, "dominant_frequency");
    if (t.size() < 8) throw InvalidArgument("dominant_frequency: need at least 8 points");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (std::abs(t[i] - t[i - 1] - dt) > 1e-6 * dt) throw InvalidArgument("dominant_frequency: grid not uniform");
    }
    std::size_t m = 1;
    while (m < 8 * t.size()) m <<= 1;
    const double mu = mean_of(y);
    std::vector<double> padded(m, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) padded[i] = y[i] - mu;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, padded);

    const double bin = units::kTwoPi / (static_cast<double>(m) * dt);
    std::size_t k_start = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(min_frequency / bin)));
    std::size_t best = k_start;
    for (std::size_t k = k_start; k < m / 2; ++k) {
        if (std::abs(spectrum[k]) > std::abs(spectrum[best])) best = k;
    }
    double offset = 0.0;
    if (best > 0 && best + 1 < m / 2) {
        const double a = std::abs(spectrum[best - 1]);
        const double b = std::abs(spectrum[best]);
        const double c = std::abs(spectrum[best + 1]);
        const double den = a - 2.0 * b + c;
        if (den != 0.0) offset = 0.5 * (a - c) / den;
    }
    return (static_cast<double>(best) + offset) * bin;
}

FitResult fit_peak_envelope(std::span<const double> t, std::span<const double> y) {
    require_same_length(t, y, "fit_peak_envelope");
    std::vector<double> pt;
    std::vector<double> py;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > 0.0) {
            // Parabola through the three samples around the maximum.
            const double a = y[i - 1], b = y[i], c = y[i + 1];
            const double den = a - 2.0 * b + c;
            const double off = den != 0.0 ? 0.5 * (a - c) / den : 0.0;
            const double h = t[i + 1] - t[i];
            pt.push_back(t[i] + off * h);
            py.push_back(std::log(b - 0.25 * (a - c) * off));
        }
    }
    if (pt.size() < 3) throw NumericalError("fit_peak_envelope: fewer than 3 local maxima");
    const LinearFit lin = linear_regression(pt, py);
    FitResult out;
    out.names = {"amplitude", "rate"};
    out.values = {std::exp(lin.intercept), -lin.slope};
    out.sigmas = {0.0, lin.slope_sigma};
    out.r2 = lin.r2;
    out.converged = true;
    out.iterations = 1;
    return out;
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
    require_same_length(x, y, "linear_regression");
    if (x.size() < 2) throw InvalidArgument("linear_regression: need at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("linear_regression: x values are all equal");
    LinearFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    const double rss = std::max(0.0, syy - out.slope * sxy);
    out.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
    out.slope_sigma = n > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
    return out;
}

}  // namespace pdiss::calibration
