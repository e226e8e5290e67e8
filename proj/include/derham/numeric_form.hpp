#pragma once

#include "derham/form.hpp"

#include <functional>
#include <map>
#include <vector>

namespace derham {

// Form given by a black-box evaluator: point -> coefficient table over
// strictly increasing index sets. Carrier for non-polynomial examples
// (winding form etc.).
struct NumericForm {
    std::size_t n_vars = 0;
    std::size_t degree = 0;
    std::function<std::map<IndexSet, double>(const std::vector<double>&)> evaluator;

    static NumericForm from_poly(const PolyForm& omega);
};

double pointwise_norm(const NumericForm& omega, const std::vector<double>& x,
                      const ComassOptions& opts = {});

// Comass of a coefficient table in R^n: exact for k in {0, 1, n}, sampled
// orthonormal k-frames otherwise.
double comass_from_table(const std::map<IndexSet, double>& table, std::size_t n, std::size_t k,
                         const ComassOptions& opts);

// Parametrized curve on [s0, s1]; velocity falls back to central differences
// with step 1e-6 when not supplied.
struct Curve {
    std::function<std::vector<double>(double)> point;
    std::function<std::vector<double>(double)> velocity;  // optional
    double s0 = 0.0;
    double s1 = 1.0;
};

// Adaptive Simpson integration of omega(gamma(s); gamma'(s)) ds.
// Throws std::runtime_error when the tolerance is not met within the
// subdivision budget.
double line_integral(const NumericForm& omega, const Curve& path, double tol = 1e-10,
                     std::size_t max_intervals = 1 << 20);

}  // namespace derham
