#include "derham/form.hpp"
#include "derham/numeric_form.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace derham {

int sort_sign(IndexSet& I) {
    int sign = 1;
    for (std::size_t i = 1; i < I.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && I[j - 1] > I[j]) {
            std::swap(I[j - 1], I[j]);
            sign = -sign;
            --j;
        }
    }
    for (std::size_t i = 1; i < I.size(); ++i)
        if (I[i - 1] == I[i]) return 0;
    return sign;
}

PolyForm::PolyForm(std::size_t n_vars, std::size_t degree, bool has_param_t)
    : n_vars_(n_vars), degree_(degree), has_t_(has_param_t) {
    // Degrees above poly_vars() are allowed and identically zero (any index
    // set of that size repeats an index), which lets d act on top-degree
    // forms without a special case.
}

PolyForm PolyForm::scalar(const Polynomial& f, bool has_param_t) {
    std::size_t n = f.n_vars() - (has_param_t ? 1 : 0);
    PolyForm out(n, 0, has_param_t);
    out.add_component({}, f);
    return out;
}

PolyForm PolyForm::d_coordinate(std::size_t n_vars, int index, bool has_param_t) {
    PolyForm out(n_vars, 1, has_param_t);
    out.add_component({index}, Polynomial(out.poly_vars(), Rational(1)));
    return out;
}

void PolyForm::add_component(IndexSet I, const Polynomial& coeff) {
    if (I.size() != degree_) throw std::invalid_argument("index set size != form degree");
    if (coeff.n_vars() != poly_vars())
        throw std::invalid_argument("coefficient variable count mismatch");
    int max_index = dt_index();
    for (int i : I)
        if (i < 1 || i > max_index || (i == max_index && !has_t_))
            throw std::invalid_argument("coordinate index out of range");
    int sign = sort_sign(I);
    if (sign == 0 || coeff.is_zero()) return;
    Polynomial value = sign == 1 ? coeff : -coeff;
    auto it = components_.find(I);
    if (it == components_.end()) {
        components_.emplace(std::move(I), std::move(value));
    } else {
        it->second += value;
        if (it->second.is_zero()) components_.erase(it);
    }
}

const Polynomial& PolyForm::component(const IndexSet& I) const {
    auto it = components_.find(I);
    if (it == components_.end()) {
        static thread_local Polynomial zero;
        zero = Polynomial(poly_vars());
        return zero;
    }
    return it->second;
}

PolyForm PolyForm::operator-() const {
    PolyForm out(n_vars_, degree_, has_t_);
    for (const auto& [I, c] : components_) out.components_[I] = -c;
    return out;
}

PolyForm& PolyForm::operator+=(const PolyForm& rhs) {
    // The zero form is shape-agnostic (e.g. d of a zero primitive).
    if (rhs.is_zero()) return *this;
    if (is_zero()) return *this = rhs;
    if (n_vars_ != rhs.n_vars_ || degree_ != rhs.degree_ || has_t_ != rhs.has_t_)
        throw std::invalid_argument("form shape mismatch in addition");
    for (const auto& [I, c] : rhs.components_) add_component(I, c);
    return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& rhs) {
    if (rhs.is_zero()) return *this;
    if (is_zero()) return *this = -rhs;
    if (n_vars_ != rhs.n_vars_ || degree_ != rhs.degree_ || has_t_ != rhs.has_t_)
        throw std::invalid_argument("form shape mismatch in subtraction");
    for (const auto& [I, c] : rhs.components_) add_component(I, -c);
    return *this;
}

PolyForm& PolyForm::operator*=(const Rational& c) {
    if (c == 0) {
        *this = PolyForm(n_vars_, degree_, has_t_);
        return *this;
    }
    for (auto& [I, coeff] : components_) coeff *= c;
    return *this;
}

bool PolyForm::operator==(const PolyForm& rhs) const {
    if (is_zero() && rhs.is_zero()) return true;
    return n_vars_ == rhs.n_vars_ && degree_ == rhs.degree_ && has_t_ == rhs.has_t_ &&
           components_ == rhs.components_;
}

std::string PolyForm::str() const {
    if (components_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [I, c] : components_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (int i : I) {
            if (has_t_ && i == dt_index())
                os << " dt";
            else
                os << " dx" << i;
        }
    }
    return os.str();
}

PolyMap PolyMap::identity(std::size_t dim) {
    PolyMap m;
    m.source_dim = m.target_dim = dim;
    for (std::size_t i = 0; i < dim; ++i) m.components.push_back(Polynomial::variable(dim, i));
    return m;
}

PolyMap PolyMap::radial_contraction(const std::vector<Rational>& base) {
    std::size_t n = base.size();
    PolyMap m;
    m.source_dim = m.target_dim = n;
    m.has_param_t = true;
    Polynomial t = Polynomial::variable(n + 1, n);
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial xi = Polynomial::variable(n + 1, i);
        Polynomial bi = Polynomial::constant(n + 1, base[i]);
        m.components.push_back(bi + t * (xi - bi));
    }
    return m;
}

PolyMap PolyMap::radial_contraction_at(const std::vector<Rational>& base, const Rational& eps) {
    std::size_t n = base.size();
    PolyMap m;
    m.source_dim = m.target_dim = n;
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial xi = Polynomial::variable(n, i);
        Polynomial bi = Polynomial::constant(n, base[i]);
        m.components.push_back(bi + eps * (xi - bi));
    }
    return m;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.n_vars() != b.n_vars() || a.has_param_t() != b.has_param_t())
        throw std::invalid_argument("wedge: form shape mismatch");
    PolyForm out(a.n_vars(), a.degree() + b.degree(), a.has_param_t());
    for (const auto& [I, ca] : a.components()) {
        for (const auto& [J, cb] : b.components()) {
            IndexSet K = I;
            K.insert(K.end(), J.begin(), J.end());
            out.add_component(std::move(K), ca * cb);
        }
    }
    return out;
}

PolyForm exterior_derivative(const PolyForm& omega) {
    PolyForm out(omega.n_vars(), omega.degree() + 1, omega.has_param_t());
    std::size_t nv = omega.poly_vars();
    for (const auto& [I, c] : omega.components()) {
        for (std::size_t v = 0; v < nv; ++v) {
            Polynomial dc = c.derivative(v);
            if (dc.is_zero()) continue;
            IndexSet J;
            J.reserve(I.size() + 1);
            J.push_back(static_cast<int>(v) + 1);
            J.insert(J.end(), I.begin(), I.end());
            out.add_component(std::move(J), dc);
        }
    }
    return out;
}

PolyForm pullback(const PolyForm& omega, const PolyMap& phi) {
    if (omega.has_param_t())
        throw std::invalid_argument("pullback: source form may not carry the parameter t");
    if (phi.target_dim != omega.n_vars())
        throw std::invalid_argument("pullback: map target dimension != form dimension");
    std::size_t src_vars = phi.source_dim + (phi.has_param_t ? 1 : 0);
    for (const auto& comp : phi.components)
        if (comp.n_vars() != src_vars)
            throw std::invalid_argument("pullback: map component variable count mismatch");

    // phi^* dz_j as degree-1 forms on the source.
    std::vector<PolyForm> dphi;
    dphi.reserve(phi.target_dim);
    for (std::size_t j = 0; j < phi.target_dim; ++j) {
        PolyForm f(phi.source_dim, 1, phi.has_param_t);
        for (std::size_t s = 0; s < src_vars; ++s) {
            Polynomial d = phi.components[j].derivative(s);
            if (!d.is_zero()) f.add_component({static_cast<int>(s) + 1}, d);
        }
        dphi.push_back(std::move(f));
    }

    PolyForm out(phi.source_dim, omega.degree(), phi.has_param_t);
    for (const auto& [I, c] : omega.components()) {
        PolyForm term = PolyForm::scalar(c.compose(phi.components), phi.has_param_t);
        for (int idx : I) term = wedge(term, dphi[static_cast<std::size_t>(idx) - 1]);
        out += term;
    }
    return out;
}

std::pair<PolyForm, PolyForm> split_dt(const PolyForm& omega) {
    if (!omega.has_param_t()) throw std::invalid_argument("split_dt: form has no parameter t");
    int dt = omega.dt_index();
    PolyForm part0(omega.n_vars(), omega.degree(), true);
    PolyForm part1(omega.n_vars(), omega.degree() == 0 ? 0 : omega.degree() - 1, true);
    for (const auto& [I, c] : omega.components()) {
        if (!I.empty() && I.back() == dt) {
            IndexSet J(I.begin(), I.end() - 1);
            // dx_J ^ dt = (-1)^{|J|} dt ^ dx_J
            Polynomial coeff = (J.size() % 2 == 0) ? c : -c;
            part1.add_component(std::move(J), coeff);
        } else {
            part0.add_component(I, c);
        }
    }
    return {std::move(part0), std::move(part1)};
}

PolyForm radial_homotopy(const PolyForm& omega, const std::vector<Rational>& base,
                         const Rational& eps) {
    if (omega.has_param_t())
        throw std::invalid_argument("radial_homotopy: form may not carry the parameter t");
    if (base.size() != omega.n_vars())
        throw std::invalid_argument("radial_homotopy: base point dimension mismatch");
    if (eps < 0 || eps >= 1) throw std::invalid_argument("radial_homotopy: eps must lie in [0,1)");
    std::size_t n = omega.n_vars();
    if (omega.degree() == 0) return PolyForm(n, 0);

    PolyForm pulled = pullback(omega, PolyMap::radial_contraction(base));
    auto [part0, part1] = split_dt(pulled);

    PolyForm out(n, omega.degree() - 1);
    for (const auto& [I, c] : part1.components()) {
        Polynomial integrated = c.integrate(n, eps, Rational(1));
        // Drop the now-unused t slot.
        Polynomial squeezed(n);
        for (const auto& [m, coef] : integrated.terms()) {
            Monomial mm(m.begin(), m.begin() + static_cast<long>(n));
            squeezed.add_term(mm, coef);
        }
        out.add_component(I, squeezed);
    }
    return out;
}

double evaluate_on_frame(const std::map<IndexSet, double>& table, std::size_t k,
                         const std::vector<std::vector<double>>& frame) {
    // frame: k vectors in R^n; value = sum_I c_I det(rows I of [v_1..v_k]).
    auto minor_det = [&](const IndexSet& I) {
        std::size_t m = I.size();
        std::vector<double> a(m * m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c)
                a[r * m + c] = frame[c][static_cast<std::size_t>(I[r]) - 1];
        double det = 1.0;
        for (std::size_t col = 0; col < m; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < m; ++r)
                if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
            if (std::abs(a[piv * m + col]) < 1e-300) return 0.0;
            if (piv != col) {
                for (std::size_t c = 0; c < m; ++c) std::swap(a[piv * m + c], a[col * m + c]);
                det = -det;
            }
            det *= a[col * m + col];
            for (std::size_t r = col + 1; r < m; ++r) {
                double f = a[r * m + col] / a[col * m + col];
                for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
            }
        }
        return det;
    };
    double acc = 0;
    for (const auto& [I, c] : table) acc += c * minor_det(I);
    (void)k;
    return acc;
}

double pointwise_norm(const PolyForm& omega, const std::vector<double>& x,
                      const ComassOptions& opts) {
    if (omega.has_param_t())
        throw std::invalid_argument("pointwise_norm: parameter forms not supported");
    std::map<IndexSet, double> table;
    for (const auto& [I, c] : omega.components()) table[I] = c.evaluate(x);
    return comass_from_table(table, omega.n_vars(), omega.degree(), opts);
}

namespace {

void rational_to_json_pair(const Rational& r, nlohmann::json& obj) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    auto fits = [](const BigInt& v) {
        return v >= std::numeric_limits<std::int64_t>::min() &&
               v <= std::numeric_limits<std::int64_t>::max();
    };
    if (fits(num))
        obj["num"] = num.convert_to<std::int64_t>();
    else
        obj["num"] = num.str();
    if (fits(den))
        obj["den"] = den.convert_to<std::int64_t>();
    else
        obj["den"] = den.str();
}

Rational rational_from_json(const nlohmann::json& num, const nlohmann::json& den) {
    auto parse = [](const nlohmann::json& v) {
        if (v.is_string()) return BigInt(v.get<std::string>());
        return BigInt(v.get<std::int64_t>());
    };
    return Rational(parse(num), parse(den));
}

}  // namespace

std::string serialize_form(const PolyForm& omega) {
    nlohmann::json j;
    j["n"] = omega.n_vars();
    j["k"] = omega.degree();
    j["has_t"] = omega.has_param_t();
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& [I, c] : omega.components()) {
        nlohmann::json comp;
        comp["I"] = I;
        nlohmann::json poly = nlohmann::json::array();
        for (const auto& [m, coef] : c.terms()) {
            nlohmann::json term;
            term["exps"] = m;
            rational_to_json_pair(coef, term);
            poly.push_back(term);
        }
        comp["poly"] = poly;
        comps.push_back(comp);
    }
    j["components"] = comps;
    return j.dump();
}

PolyForm deserialize_form(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    PolyForm out(j.at("n").get<std::size_t>(), j.at("k").get<std::size_t>(),
                 j.at("has_t").get<bool>());
    for (const auto& comp : j.at("components")) {
        IndexSet I = comp.at("I").get<IndexSet>();
        Polynomial p(out.poly_vars());
        for (const auto& term : comp.at("poly")) {
            Monomial m = term.at("exps").get<Monomial>();
            p.add_term(m, rational_from_json(term.at("num"), term.at("den")));
        }
        out.add_component(std::move(I), p);
    }
    return out;
}

}  // namespace derham
