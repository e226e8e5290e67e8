#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "derham/cone.hpp"

#include <cmath>
#include <random>

using namespace derham;

namespace {

RadialForm unit_base_form(std::size_t k) {
    RadialForm f;
    f.degree = k;
    f.base_norm = nullptr;  // |omega|_M == 1
    return f;
}

RadialForm profile_form(double beta) {
    RadialForm f;
    f.degree = 1;
    f.has_dr = true;
    f.profile_beta = beta;
    return f;
}

// One verdict flip across a p-grid; returns the midpoint of the bracket.
double scan_bracket(const RadialForm& f, const ConeMetric& g, double p_min, double p_max,
                    double step) {
    TruncationSchedule sched;
    bool prev = detect_divergence(f, g, p_min, sched).diverges;
    REQUIRE_FALSE(prev);
    int flips = 0;
    double flip_at = 0;
    for (double p = p_min + step; p <= p_max + 1e-9; p += step) {
        bool cur = detect_divergence(f, g, p, sched).diverges;
        if (cur != prev) {
            ++flips;
            flip_at = p - step / 2;
        }
        prev = cur;
    }
    CHECK(flips == 1);
    return flip_at;
}

}  // namespace

TEST_CASE("critical exponent") {
    CHECK(critical_exponent(Rational(1), 1, 1) == Rational(2));
    CHECK(critical_exponent(Rational(2), 1, 1) == Rational(3, 2));
    CHECK(critical_exponent(Rational(2), 3, 1) == Rational(7, 2));
    CHECK_THROWS(critical_exponent(Rational(1), 1, 0));
}

TEST_CASE("truncated norms") {
    ConeMetric g;  // alpha = 1, m = 1
    RadialForm f = unit_base_form(1);
    for (double eps : {0.5, 0.125, 1e-3}) {
        // p = 1: exponent 0, value (1 - eps) * Vol(M).
        CHECK(lp_norm_truncated(f, g, 1.0, eps) == doctest::Approx(1.0 - eps));
        // p = 2: logarithmic case.
        CHECK(lp_norm_truncated(f, g, 2.0, eps) ==
              doctest::Approx(std::sqrt(std::log(1.0 / eps))));
    }
    RadialForm zero = unit_base_form(1);
    zero.base_norm = [](const std::vector<double>&) { return 0.0; };
    CHECK(lp_norm_truncated(zero, g, 2.0, 0.25) == 0.0);

    // Monotone in eps; grows with p toward divergence.
    CHECK(lp_norm_truncated(f, g, 2.0, 0.01) > lp_norm_truncated(f, g, 2.0, 0.1));
    CHECK(lp_norm_truncated(f, g, 2.5, 1e-4) > lp_norm_truncated(f, g, 2.0, 1e-4));
}

TEST_CASE("divergence verdicts") {
    ConeMetric g;
    RadialForm f = unit_base_form(1);
    TruncationSchedule sched;
    CHECK_FALSE(detect_divergence(f, g, 1.5, sched).diverges);
    CHECK(detect_divergence(f, g, 2.5, sched).diverges);
    TruncationSchedule tiny{4, 5};
    CHECK_THROWS(detect_divergence(f, g, 2.0, tiny));
}

TEST_CASE("threshold brackets across the catalog") {
    struct Case {
        long alpha;
        std::size_t m, k;
    };
    for (Case c : {Case{1, 1, 1}, Case{2, 1, 1}, Case{1, 2, 1}, Case{2, 2, 2}}) {
        ConeMetric g{Rational(c.alpha), c.m};
        RadialForm f = unit_base_form(c.k);
        double p_star = to_double(critical_exponent(g.alpha, c.m, c.k));
        double mid = scan_bracket(f, g, 1.0, p_star + 1.0, 0.05);
        CHECK(std::abs(mid - p_star) <= 0.05);
    }
}

TEST_CASE("homotopy bound constant") {
    // k = 1, mu = 0: collapses to 1 - eps.
    for (double eps : {0.0, 0.25, 0.5})
        CHECK(homotopy_bound_constant(3.0, 0.7, 0.0, 1, eps) == doctest::Approx(1.0 - eps));

    // Blow-up toward the threshold mu/(1+(k-1)lambda) = 2.
    double prev = 0;
    for (double p : {6.0, 4.0, 3.0, 2.5, 2.1, 2.01}) {
        double c = homotopy_bound_constant(p, 1.0, 2.0, 1, 0.0);
        CHECK(c > prev);
        prev = c;
    }
    CHECK(prev > 100.0);
    CHECK_THROWS(homotopy_bound_constant(1.9, 1.0, 2.0, 1, 0.0));

    // eps = 0, large p: prefactor only.
    CHECK(homotopy_bound_constant(50.0, 2.0, 3.0, 2, 0.0) ==
          doctest::Approx(50.0 / (50.0 * 3.0 - 3.0)));
}

TEST_CASE("retraction experiment matches the closed forms") {
    ConeMetric g;  // alpha = 1, m = 1, so the volume weight is s ds
    double eps = std::ldexp(1.0, -20);
    RadialForm omega = profile_form(2.0);

    for (double p : {2.5, 3.0, 4.0, 8.0}) {
        RetractionExperiment r = retraction_operator_experiment(omega, g, p, eps);
        // Oracle assembled from the exact power integrals.
        double G = power_integral(-2.0, eps);
        double oracle = G * std::pow(power_integral(-p + 1, eps) / power_integral(-2 * p + 1, eps),
                                     1.0 / p);
        CHECK(r.ratio == doctest::Approx(oracle).epsilon(1e-6));
        // Asymptotic form (2p-2)/(p-2) up to the eps-small corrections.
        double asym = std::pow((2 * p - 2) / (p - 2), 1.0 / p);
        CHECK(r.ratio == doctest::Approx(asym).epsilon(2e-2));
        // Theorem-style bound with the model exponents lambda=1, mu=2.
        CHECK(r.ratio <= homotopy_bound_constant(p, 1.0, 2.0, 1, eps) * 1.05);
    }
}

TEST_CASE("pullback norms decay") {
    ConeMetric g;
    RadialForm omega = profile_form(0.0);  // omega = ds
    double p = 3.0;
    double ref = retraction_operator_experiment(omega, g, p, 0.5).pullback_norm;
    double prev = ref;
    for (int j = 2; j <= 20; ++j) {
        double eps = std::ldexp(1.0, -j);
        double cur = retraction_operator_experiment(omega, g, p, eps).pullback_norm;
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev / ref < 1e-3);
}

TEST_CASE("chart comparison stays inside the distortion envelope") {
    // Chart phi(x,y) = (x + 0.3y, 1.2y), bi-Lipschitz with L = 1.5. The
    // image integral (computed through the change of variables with the
    // true Jacobian) and the plain pulled-back integral must agree within
    // the distortion envelope [L^-2, L^2] on sampled integrands.
    const double L = 1.5;
    const double det = 1.2;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        double a = 1 + u(rng), b = u(rng);
        auto f = [&](double x, double y) { return a + b * x * x + 0.5 * y; };
        const int n = 200;
        double image_integral = 0, pulled = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double x = (i + 0.5) / n, y = (j + 0.5) / n;
                double fx = f(x + 0.3 * y, 1.2 * y);
                image_integral += fx * det;  // int_{phi(D)} f dA
                pulled += fx;                // int_D f(phi(x)) dx
            }
        }
        double ratio = image_integral / pulled;
        CHECK(ratio >= 1.0 / (L * L));
        CHECK(ratio <= L * L);
    }
}
