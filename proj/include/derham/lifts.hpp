#pragma once

#include "derham/polynomial.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace derham {

// Evaluable scalar function on R^arity with a declared Lipschitz constant
// (valid on the region of use; trusted, then spot-checked by sampling).
struct FuncDesc {
    std::size_t arity = 0;
    double lipschitz = 0;
    std::function<double(const std::vector<double>&)> eval;

    double operator()(const std::vector<double>& x) const { return eval(x); }
};

// Expression grammar: polynomials, constants, abs, min, max, composition.
// Combinators propagate Lipschitz constants the obvious way.
FuncDesc desc_poly(Polynomial p, std::size_t arity, double lipschitz);
FuncDesc desc_const(double c, std::size_t arity);
FuncDesc desc_coord(std::size_t i, std::size_t arity);
FuncDesc desc_abs(FuncDesc f);
FuncDesc desc_min(FuncDesc a, FuncDesc b);
FuncDesc desc_max(FuncDesc a, FuncDesc b);
FuncDesc desc_compose(FuncDesc outer, std::vector<FuncDesc> inner);

// Recursive cell: an interval (or point) in R^1, or a graph / open band over
// a lower cell.
struct CellTower {
    enum class Kind { Interval, Graph, Band };
    Kind kind = Kind::Interval;
    double a = 0, b = 0;  // interval endpoints (a == b: point)
    std::shared_ptr<const CellTower> base;
    FuncDesc theta;           // graph level
    FuncDesc theta1, theta2;  // band level, theta1 < theta2 over the open base

    std::size_t dim() const;  // ambient dimension

    static CellTower interval(double a, double b);
    static CellTower point(double a);
    static CellTower graph_over(CellTower base, FuncDesc theta);
    static CellTower band_over(CellTower base, FuncDesc theta1, FuncDesc theta2);
};

// Uniform sample from the cell; band fibers are shrunk by a relative margin
// of 1e-6 to stay clear of degenerate/boundary fibers.
std::vector<double> sample_cell(const CellTower& tower, std::mt19937& rng);

// Checks theta1 < theta2 over the open base and the declared Lipschitz
// constants, on `samples` random points / pairs. Returns an empty string on
// success, else a description of the first violation found.
std::string check_tower(const CellTower& tower, std::size_t samples, std::mt19937& rng);

using Matrix = std::vector<std::vector<double>>;

// Family of maps r_t with r_1 = id and r_0 = apex; lifted retractions keep
// their level structure so Jacobian determinants use the triangular form.
struct Retraction {
    std::size_t dim = 0;
    std::function<std::vector<double>(const std::vector<double>&, double)> map;
    std::function<Matrix(const std::vector<double>&, double)> analytic_jacobian;  // optional

    // set by standard_lift
    enum class Level { None, Graph, Band } level = Level::None;
    std::shared_ptr<const Retraction> base;
    FuncDesc theta, theta1, theta2;

    std::vector<double> operator()(const std::vector<double>& q, double t) const {
        return map(q, t);
    }
};

// r_t(x)_i = t^{w_i} x_i with analytic Jacobian.
Retraction diagonal_retraction(std::vector<double> weights);

// Lift of r_base through the top level of `tower`:
//   graph:  r_t(x, y) = (r'_t(x), theta(r'_t(x)))
//   band:   tau(q) = (y - theta1(x)) / (theta2(x) - theta1(x)) is preserved.
// Throws on a degenerate band fiber (theta2 == theta1 at the base point).
Retraction standard_lift(const Retraction& r_base, const CellTower& tower);

// Fiber coordinate of a band point; throws on degenerate fibers.
double band_tau(const CellTower& tower, const std::vector<double>& q);

struct JacobianResult {
    Matrix D;
    double det = 0;
};

// Spatial Jacobian D_q r_t. Analytic where supplied; lifted maps recurse into
// the base and multiply in the per-level fiber derivative (the matrix is
// lower triangular level by level); otherwise central differences, h = 1e-6.
JacobianResult jacobian(const Retraction& r, const std::vector<double>& q, double t);

struct SampleSpec {
    std::size_t cloud = 400;
    unsigned seed = 1;
    std::vector<std::pair<double, double>> box;             // per-coordinate sampling range
    std::function<std::vector<double>(std::mt19937&)> sampler;  // overrides box if set
    std::vector<double> t_grid;  // defaults to 2^{-j}, j = 1..10
    // adversarial curves t -> x(t), scanned along the t-grid
    std::vector<std::function<std::vector<double>(double)>> curves;
};

struct CriterionResult {
    double sup_ratio = 0;
    std::vector<double> witness_x;
    double witness_t = 0;
};

// sup over samples of |th2(r'_t x) - th3(r'_t x)| / |th2(x) - th3(x)|, the
// testable direction of the graph/band Lipschitz criterion. Points where the
// denominator is below 1e-300 are skipped; throws if every sample is.
CriterionResult lipschitz_criterion(const FuncDesc& th2, const FuncDesc& th3,
                                    const Retraction& r_base, const SampleSpec& spec);

struct GrowthFit {
    double lambda_hat = 0;  // slope fit of log sup_q ||Dr_t||_max vs log t
    double mu_hat = 0;      // slope fit of log inf_q |det Dr_t| vs log t
    double lambda_residual = 0, mu_residual = 0;  // RMS residuals of the fits
    bool power_law = true;                        // false when a residual exceeds 0.1
    std::vector<double> t_grid, sup_norm, inf_det;
};

// Sampled envelopes of ||Dr_t|| (max-norm over entries) and |det Dr_t| on a
// log t-grid, with log-log least-squares slopes. Estimates, not proofs.
GrowthFit fit_growth_exponents(const Retraction& r, const SampleSpec& spec);

}  // namespace derham
