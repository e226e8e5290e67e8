#pragma once

#include "derham/rational.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace derham {

// Exponent multi-index, one entry per variable.
using Monomial = std::vector<unsigned>;

// Multivariate polynomial with exact rational coefficients.
// Terms with zero coefficient are never stored; the term map is ordered
// lexicographically on the exponent vector, which makes printing and
// serialization deterministic.
class Polynomial {
public:
    Polynomial() : n_vars_(0) {}
    explicit Polynomial(std::size_t n_vars) : n_vars_(n_vars) {}
    Polynomial(std::size_t n_vars, const Rational& c);

    static Polynomial variable(std::size_t n_vars, std::size_t index);
    static Polynomial constant(std::size_t n_vars, const Rational& c) {
        return Polynomial(n_vars, c);
    }

    std::size_t n_vars() const { return n_vars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Monomial, Rational>& terms() const { return terms_; }

    // Zero-coefficient entries are dropped; exponent vectors are padded or
    // validated against n_vars.
    void add_term(const Monomial& m, const Rational& c);

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial& operator*=(const Polynomial& b) { return *this = *this * b; }
    Polynomial& operator*=(const Rational& c);
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }

    bool operator==(const Polynomial& rhs) const {
        return n_vars_ == rhs.n_vars_ && terms_ == rhs.terms_;
    }

    Polynomial derivative(std::size_t var) const;

    // Antiderivative in `var` evaluated between rational bounds lo..hi; the
    // result no longer depends on `var` (its exponent is forced to zero).
    Polynomial integrate(std::size_t var, const Rational& lo, const Rational& hi) const;

    Rational evaluate(const std::vector<Rational>& point) const;
    double evaluate(const std::vector<double>& point) const;

    // Substitution x_i := args[i]; all args must share a variable count.
    Polynomial compose(const std::vector<Polynomial>& args) const;

    // Reinterpret in a larger variable space (appended variables unused).
    Polynomial extended(std::size_t new_n_vars) const;

    unsigned degree_in(std::size_t var) const;
    unsigned total_degree() const;

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    std::size_t n_vars_;
    std::map<Monomial, Rational> terms_;
};

}  // namespace derham
