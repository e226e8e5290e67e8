#pragma once

#include "derham/rational.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace derham {

// Warped cone metric dr^2 + r^{2*alpha} g_M on M x (0,1], M the flat unit
// m-torus (total volume 1).
struct ConeMetric {
    Rational alpha{1};
    std::size_t m = 1;
};

// Degree-k form on the cone. Two shapes are supported:
//  - radially constant base forms (no dr term), described by |omega|_M;
//  - radial profiles s^{-beta} ds ^ (unit base form), marked has_dr.
struct RadialForm {
    std::size_t degree = 1;
    std::function<double(const std::vector<double>&)> base_norm;  // |omega|_M on [0,1)^m
    bool radially_constant = true;
    bool has_dr = false;
    double profile_beta = 0;  // omega = s^{-beta} ds ^ eta when has_dr
};

struct TruncationSchedule {
    std::size_t j_min = 4;
    std::size_t j_max = 20;  // eps_j = 2^{-j}
};

// (alpha*m + 1)/(k*alpha), the sharp integrability threshold.
Rational critical_exponent(const Rational& alpha, std::size_t m, std::size_t k);

// (int_eps^1 r^q dr * int_M |omega|_M^p dV)^{1/p}; the r-integral in closed
// form (log at exponent -1), the M-integral by product trapezoid quadrature.
double lp_norm_truncated(const RadialForm& omega, const ConeMetric& g, double p, double eps);

struct DivergenceVerdict {
    bool diverges = false;
    double slope = 0;  // fitted log-increment slope, ~ alpha*k*(p - p*)
};

// Fits the growth of the truncated p-th-power integral across the dyadic
// schedule. The slope of log(I(eps_j) - I(eps_{j-1})) against log(1/eps_j)
// equals q+1 = alpha*k*(p - p*) for the closed-form integrand, so the
// verdict flips within slope_tol/(alpha*k) of the critical exponent.
DivergenceVerdict detect_divergence(const RadialForm& omega, const ConeMetric& g, double p,
                                    const TruncationSchedule& schedule, double slope_tol = 0.01);

// p/(p(1+(k-1)lambda) - mu) * (1 - eps^{-mu/p + (k-1)lambda + 1});
// throws below the threshold mu/(1+(k-1)lambda), naming it.
double homotopy_bound_constant(double p, double lambda, double mu, std::size_t k, double eps);

struct RetractionExperiment {
    double ratio = 0;          // ||R_eps omega||_p / ||omega||_p
    double pullback_norm = 0;  // ||r_eps^* omega||_p
    double omega_norm = 0;
};

// Model retraction r_t(y, s) = (y, t s): R_eps by explicit t-integration for
// profile forms, both norms by dyadic Gauss-Legendre quadrature truncated at
// eps.
RetractionExperiment retraction_operator_experiment(const RadialForm& omega, const ConeMetric& g,
                                                    double p, double eps);

// int_eps^1 s^q ds, closed form (oracle for the quadrature path).
double power_integral(double q, double eps);

}  // namespace derham
