#pragma once

#include "derham/polynomial.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace derham {

// Strictly increasing 1-based coordinate indices; index n_vars+1 denotes dt
// on forms that carry the deformation parameter.
using IndexSet = std::vector<int>;

// Exterior differential form with exact rational polynomial coefficients.
//
// Coefficient polynomials live in n_vars variables, plus one trailing
// variable t when has_param_t is set. Components with zero coefficient are
// never stored.
class PolyForm {
public:
    PolyForm() : n_vars_(0), degree_(0), has_t_(false) {}
    PolyForm(std::size_t n_vars, std::size_t degree, bool has_param_t = false);

    // 0-form from a function.
    static PolyForm scalar(const Polynomial& f, bool has_param_t = false);
    // Coordinate differential dx_index (1-based; n_vars+1 = dt when has_t).
    static PolyForm d_coordinate(std::size_t n_vars, int index, bool has_param_t = false);

    std::size_t n_vars() const { return n_vars_; }
    std::size_t degree() const { return degree_; }
    bool has_param_t() const { return has_t_; }
    bool is_zero() const { return components_.empty(); }
    const std::map<IndexSet, Polynomial>& components() const { return components_; }

    std::size_t poly_vars() const { return n_vars_ + (has_t_ ? 1 : 0); }
    int dt_index() const { return static_cast<int>(n_vars_) + 1; }

    // Accumulates coeff * dx_I; I may be unsorted or contain repeats
    // (repeats contribute nothing, unsorted order contributes its sign).
    void add_component(IndexSet I, const Polynomial& coeff);

    const Polynomial& component(const IndexSet& I) const;  // zero if absent

    PolyForm operator-() const;
    PolyForm& operator+=(const PolyForm& rhs);
    PolyForm& operator-=(const PolyForm& rhs);
    friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
    friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
    PolyForm& operator*=(const Rational& c);
    friend PolyForm operator*(PolyForm a, const Rational& c) { return a *= c; }
    friend PolyForm operator*(const Rational& c, PolyForm a) { return a *= c; }
    bool operator==(const PolyForm& rhs) const;

    std::string str() const;

private:
    std::size_t n_vars_;
    std::size_t degree_;
    bool has_t_;
    std::map<IndexSet, Polynomial> components_;
};

// Polynomial map between Euclidean spaces, optionally depending on the
// parameter t (source variables x_1..x_m, t).
struct PolyMap {
    std::size_t source_dim = 0;  // not counting t
    std::size_t target_dim = 0;
    bool has_param_t = false;
    std::vector<Polynomial> components;  // target_dim polynomials in source vars (+t)

    static PolyMap identity(std::size_t dim);
    // x |-> base + t*(x - base), a map of (x, t) into R^dim.
    static PolyMap radial_contraction(const std::vector<Rational>& base);
    // x |-> base + eps*(x - base) at frozen parameter value eps.
    static PolyMap radial_contraction_at(const std::vector<Rational>& base, const Rational& eps);
};

// Sign of the permutation sorting `I`; 0 when an index repeats.
int sort_sign(IndexSet& I);

PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm exterior_derivative(const PolyForm& omega);
PolyForm pullback(const PolyForm& omega, const PolyMap& phi);

// omega = first + dt ^ second, neither containing dt.
std::pair<PolyForm, PolyForm> split_dt(const PolyForm& omega);

// The homotopy operator of the radial retraction from `base`: pulls omega
// back under r_t(x) = base + t(x - base), keeps the dt part and integrates
// t from eps to 1 in exact arithmetic.
PolyForm radial_homotopy(const PolyForm& omega, const std::vector<Rational>& base,
                         const Rational& eps = Rational(0));

struct ComassOptions {
    std::size_t frame_budget = 10000;
    unsigned seed = 1;
};

// Pointwise comass |omega(x)|. Exact for degree 0, 1 and n; for intermediate
// degrees a sampled lower bound over random orthonormal k-frames.
double pointwise_norm(const PolyForm& omega, const std::vector<double>& x,
                      const ComassOptions& opts = {});

// Evaluation of omega(x; v_1..v_k) for a coefficient table over index sets.
double evaluate_on_frame(const std::map<IndexSet, double>& table, std::size_t k,
                         const std::vector<std::vector<double>>& frame);

std::string serialize_form(const PolyForm& omega);           // deterministic JSON
PolyForm deserialize_form(const std::string& json_text);

}  // namespace derham
