#include "derham/polynomial.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace derham {

namespace {

Monomial normalized(const Monomial& m, std::size_t n_vars) {
    if (m.size() > n_vars) {
        for (std::size_t i = n_vars; i < m.size(); ++i)
            if (m[i] != 0) throw std::invalid_argument("monomial exceeds variable count");
    }
    Monomial out(n_vars, 0);
    for (std::size_t i = 0; i < m.size() && i < n_vars; ++i) out[i] = m[i];
    return out;
}

}  // namespace

Polynomial::Polynomial(std::size_t n_vars, const Rational& c) : n_vars_(n_vars) {
    if (c != 0) terms_[Monomial(n_vars, 0)] = c;
}

Polynomial Polynomial::variable(std::size_t n_vars, std::size_t index) {
    if (index >= n_vars) throw std::invalid_argument("variable index out of range");
    Polynomial p(n_vars);
    Monomial m(n_vars, 0);
    m[index] = 1;
    p.terms_[m] = 1;
    return p;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    Monomial key = normalized(m, n_vars_);
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial out(n_vars_);
    for (const auto& [m, c] : terms_) out.terms_[m] = -c;
    return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (n_vars_ != rhs.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
    for (const auto& [m, c] : rhs.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (n_vars_ != rhs.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
    for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.n_vars_ != b.n_vars_) throw std::invalid_argument("polynomial variable count mismatch");
    Polynomial out(a.n_vars_);
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m(a.n_vars_);
            for (std::size_t i = 0; i < a.n_vars_; ++i) m[i] = ma[i] + mb[i];
            out.add_term(m, ca * cb);
        }
    }
    return out;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, coef] : terms_) coef *= c;
    return *this;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    Polynomial out(n_vars_);
    for (const auto& [m, c] : terms_) {
        if (m[var] == 0) continue;
        Monomial d = m;
        --d[var];
        out.add_term(d, c * Rational(m[var]));
    }
    return out;
}

Polynomial Polynomial::integrate(std::size_t var, const Rational& lo, const Rational& hi) const {
    Polynomial out(n_vars_);
    for (const auto& [m, c] : terms_) {
        unsigned e = m[var];
        Rational factor = (rational_pow(hi, e + 1) - rational_pow(lo, e + 1)) / Rational(e + 1);
        Monomial rest = m;
        rest[var] = 0;
        out.add_term(rest, c * factor);
    }
    return out;
}

Rational Polynomial::evaluate(const std::vector<Rational>& point) const {
    if (point.size() != n_vars_) throw std::invalid_argument("evaluation point size mismatch");
    Rational acc(0);
    for (const auto& [m, c] : terms_) {
        Rational term = c;
        for (std::size_t i = 0; i < n_vars_; ++i)
            if (m[i]) term *= rational_pow(point[i], m[i]);
        acc += term;
    }
    return acc;
}

double Polynomial::evaluate(const std::vector<double>& point) const {
    if (point.size() != n_vars_) throw std::invalid_argument("evaluation point size mismatch");
    double acc = 0;
    for (const auto& [m, c] : terms_) {
        double term = to_double(c);
        for (std::size_t i = 0; i < n_vars_; ++i)
            if (m[i]) term *= std::pow(point[i], static_cast<int>(m[i]));
        acc += term;
    }
    return acc;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& args) const {
    if (args.size() != n_vars_) throw std::invalid_argument("compose: argument count mismatch");
    std::size_t target_vars = args.empty() ? 0 : args[0].n_vars();
    for (const auto& a : args)
        if (a.n_vars() != target_vars) throw std::invalid_argument("compose: mixed variable counts");

    // Cache powers of each argument as needed.
    std::vector<std::vector<Polynomial>> powers(n_vars_);
    auto power = [&](std::size_t i, unsigned e) -> const Polynomial& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(Polynomial(target_vars, Rational(1)));
        while (cache.size() <= e) cache.push_back(cache.back() * args[i]);
        return cache[e];
    };

    Polynomial out(target_vars);
    for (const auto& [m, c] : terms_) {
        Polynomial term(target_vars, c);
        for (std::size_t i = 0; i < n_vars_; ++i)
            if (m[i]) term *= power(i, m[i]);
        out += term;
    }
    return out;
}

Polynomial Polynomial::extended(std::size_t new_n_vars) const {
    if (new_n_vars < n_vars_) throw std::invalid_argument("extended: shrinking not allowed");
    Polynomial out(new_n_vars);
    for (const auto& [m, c] : terms_) out.add_term(m, c);
    return out;
}

unsigned Polynomial::degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
}

unsigned Polynomial::total_degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) {
        unsigned s = 0;
        for (unsigned e : m) s += e;
        d = std::max(d, s);
    }
    return d;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        for (std::size_t i = 0; i < n_vars_; ++i) {
            if (!m[i]) continue;
            os << "*";
            if (i < names.size())
                os << names[i];
            else
                os << "x" << (i + 1);
            if (m[i] > 1) os << "^" << m[i];
        }
    }
    return os.str();
}

}  // namespace derham
