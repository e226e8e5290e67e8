#include "derham/cone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derham {

Rational critical_exponent(const Rational& alpha, std::size_t m, std::size_t k) {
    if (k == 0) throw std::invalid_argument("critical_exponent: k must be positive");
    return (alpha * Rational(static_cast<long>(m)) + 1) /
           (Rational(static_cast<long>(k)) * alpha);
}

double power_integral(double q, double eps) {
    if (std::abs(q + 1) < 1e-14) return std::log(1.0 / eps);
    return (1.0 - std::pow(eps, q + 1)) / (q + 1);
}

namespace {

// Product trapezoid on the unit torus: uniform grid, periodic, so plain
// averaging at 64^min(m,2) points.
double torus_integral(const std::function<double(const std::vector<double>&)>& f, std::size_t m,
                      double p) {
    if (!f) return 1.0;  // |omega|_M == 1 convention
    std::size_t dims = std::min<std::size_t>(m, 2);
    const std::size_t n = 64;
    double acc = 0;
    std::vector<double> x(m, 0.0);
    if (dims == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            x[0] = static_cast<double>(i) / n;
            acc += std::pow(std::abs(f(x)), p);
        }
        return acc / n;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            x[0] = static_cast<double>(i) / n;
            x[1] = static_cast<double>(j) / n;
            acc += std::pow(std::abs(f(x)), p);
        }
    }
    return acc / (n * n);
}

// Composite 8-point Gauss-Legendre over the dyadic pieces of (eps, 1).
double dyadic_quadrature(const std::function<double(double)>& f, double eps) {
    static const double node[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                   0.9602898564975363};
    static const double weight[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                     0.1012285362903763};
    double acc = 0;
    double hi = 1.0;
    while (hi > eps) {
        double lo = std::max(eps, hi / 2);
        double c = (hi + lo) / 2, h = (hi - lo) / 2;
        for (int i = 0; i < 4; ++i)
            acc += weight[i] * h * (f(c + h * node[i]) + f(c - h * node[i]));
        hi = lo;
    }
    return acc;
}

double radial_exponent(const RadialForm& omega, const ConeMetric& g, double p) {
    double alpha = to_double(g.alpha);
    if (omega.has_dr) return -omega.profile_beta * p + alpha * g.m;
    return -alpha * static_cast<double>(omega.degree) * p + alpha * g.m;
}

}  // namespace

double lp_norm_truncated(const RadialForm& omega, const ConeMetric& g, double p, double eps) {
    if (p < 1 || eps <= 0 || eps >= 1)
        throw std::invalid_argument("lp_norm_truncated: need p >= 1 and eps in (0,1)");
    double base = omega.has_dr ? 1.0 : torus_integral(omega.base_norm, g.m, p);
    if (base == 0) return 0;
    return std::pow(power_integral(radial_exponent(omega, g, p), eps) * base, 1.0 / p);
}

DivergenceVerdict detect_divergence(const RadialForm& omega, const ConeMetric& g, double p,
                                    const TruncationSchedule& schedule, double slope_tol) {
    if (schedule.j_max < schedule.j_min + 3)
        throw std::invalid_argument("detect_divergence: schedule too short to fit");
    DivergenceVerdict out;
    double base = omega.has_dr ? 1.0 : torus_integral(omega.base_norm, g.m, p);
    if (base == 0) return out;  // identically zero: converges
    double q = radial_exponent(omega, g, p);

    // Least squares of log(I_j - I_{j-1}) against log(1/eps_j) for the
    // p-th power integral I.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    double cap_hit = 0;
    for (std::size_t j = schedule.j_min; j <= schedule.j_max; ++j) {
        double eps_j = std::ldexp(1.0, -static_cast<int>(j));
        double prev = std::ldexp(1.0, -static_cast<int>(j - 1));
        double inc = (power_integral(q, eps_j) - power_integral(q, prev)) * base;
        cap_hit = std::max(cap_hit, power_integral(q, eps_j) * base);
        if (inc <= 0) continue;
        double x = std::log(1.0 / eps_j), y = std::log(inc);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.diverges = out.slope > slope_tol || cap_hit > 1e12;
    return out;
}

double homotopy_bound_constant(double p, double lambda, double mu, std::size_t k, double eps) {
    double growth = 1.0 + (static_cast<double>(k) - 1.0) * lambda;
    double threshold = mu / growth;
    if (!(p > threshold))
        throw std::invalid_argument("homotopy_bound_constant: p must exceed mu/(1+(k-1)lambda) = " +
                                    std::to_string(threshold));
    double exponent = -mu / p + (static_cast<double>(k) - 1.0) * lambda + 1.0;
    double eps_term = eps == 0 ? 0.0 : std::pow(eps, exponent);
    return p / (p * growth - mu) * (1.0 - eps_term);
}

RetractionExperiment retraction_operator_experiment(const RadialForm& omega, const ConeMetric& g,
                                                    double p, double eps) {
    if (!omega.has_dr || omega.degree != 1)
        throw std::invalid_argument(
            "retraction_operator_experiment: model path handles degree-1 radial profiles");
    RetractionExperiment out;
    double alpha = to_double(g.alpha);
    double am = alpha * g.m;
    double beta = omega.profile_beta;

    // R_eps omega = s^{1-beta} * int_eps^1 t^{-beta} dt for the profile
    // s^{-beta} ds under r_t(y,s) = (y, ts).
    double G = power_integral(-beta, eps);

    auto norm_of = [&](double point_exp, double scale) {
        double integral = dyadic_quadrature(
            [&](double s) { return std::pow(s, point_exp * p + am); }, eps);
        return scale * std::pow(integral, 1.0 / p);
    };
    out.omega_norm = norm_of(-beta, 1.0);
    if (out.omega_norm == 0) return out;
    double r_norm = norm_of(1.0 - beta, std::abs(G));
    out.ratio = r_norm / out.omega_norm;
    // r_eps^* omega = eps^{1-beta} s^{-beta} ds.
    out.pullback_norm = std::pow(eps, 1.0 - beta) * out.omega_norm;
    return out;
}

}  // namespace derham
