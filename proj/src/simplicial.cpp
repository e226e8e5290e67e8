#include "derham/simplicial.hpp"

#include "derham/form.hpp"  // sort_sign

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace derham {

SimplicialComplex SimplicialComplex::build(std::vector<std::vector<Rational>> vertices,
                                           const std::vector<Simplex>& maximal) {
    SimplicialComplex K;
    K.vertices = std::move(vertices);
    for (Simplex s : maximal) {
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("simplex with repeated vertex");
        for (int v : s)
            if (v < 0 || static_cast<std::size_t>(v) >= K.vertices.size())
                throw std::invalid_argument("vertex index out of range");
        // All faces via subset masks.
        std::size_t l = s.size();
        for (unsigned mask = 1; mask < (1u << l); ++mask) {
            Simplex face;
            for (std::size_t i = 0; i < l; ++i)
                if (mask & (1u << i)) face.push_back(s[i]);
            K.simplices.insert(std::move(face));
        }
    }
    return K;
}

bool SimplicialComplex::has_simplex(Simplex s) const {
    std::sort(s.begin(), s.end());
    return simplices.count(s) > 0;
}

std::size_t SimplicialComplex::dim() const {
    std::size_t d = 0;
    for (const auto& s : simplices) d = std::max(d, s.size());
    return d == 0 ? 0 : d - 1;
}

std::vector<Simplex> SimplicialComplex::simplices_of_dim(std::size_t k) const {
    std::vector<Simplex> out;
    for (const auto& s : simplices)
        if (s.size() == k + 1) out.push_back(s);
    return out;
}

std::vector<Rational> SimplicialComplex::barycenter(const Simplex& s) const {
    if (s.empty()) throw std::invalid_argument("barycenter of empty simplex");
    std::vector<Rational> c(ambient_dim(), Rational(0));
    for (int v : s)
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += vertices[static_cast<std::size_t>(v)][i];
    for (auto& x : c) x /= Rational(static_cast<long>(s.size()));
    return c;
}

void Chain::add(Simplex s, const Rational& c) {
    if (c == 0) return;
    int sign = sort_sign(s);
    if (sign == 0) return;
    Rational value = sign == 1 ? c : -c;
    auto it = terms_.find(s);
    if (it == terms_.end()) {
        terms_.emplace(std::move(s), std::move(value));
    } else {
        it->second += value;
        if (it->second == 0) terms_.erase(it);
    }
}

Rational Chain::coefficient(Simplex s) const {
    int sign = sort_sign(s);
    if (sign == 0) return Rational(0);
    auto it = terms_.find(s);
    if (it == terms_.end()) return Rational(0);
    return sign == 1 ? it->second : -it->second;
}

Chain Chain::operator-() const {
    Chain out;
    for (const auto& [s, c] : terms_) out.terms_[s] = -c;
    return out;
}

Chain& Chain::operator+=(const Chain& rhs) {
    for (const auto& [s, c] : rhs.terms_) add(s, c);
    return *this;
}

Chain& Chain::operator-=(const Chain& rhs) {
    for (const auto& [s, c] : rhs.terms_) add(s, -c);
    return *this;
}

Chain& Chain::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [s, coef] : terms_) coef *= c;
    return *this;
}

std::string Chain::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [s, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.str() << "*[";
        for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
        os << "]";
    }
    return os.str();
}

Chain boundary(const Chain& chain) {
    Chain out;
    for (const auto& [s, c] : chain.terms()) {
        if (s.size() <= 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            Simplex face;
            face.reserve(s.size() - 1);
            for (std::size_t i = 0; i < s.size(); ++i)
                if (i != j) face.push_back(s[i]);
            out.add(std::move(face), (j % 2 == 0) ? c : -c);
        }
    }
    return out;
}

bool Cover::pieces_intersect(const std::vector<int>& piece_ids) const {
    for (const auto& sigma : complex->simplices) {
        bool all = true;
        for (int pid : piece_ids) {
            bool hit = false;
            for (int center : piece_stars[static_cast<std::size_t>(pid)]) {
                if (std::binary_search(sigma.begin(), sigma.end(), center)) {
                    hit = true;
                    break;
                }
            }
            if (!hit) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

Cover star_cover(const SimplicialComplex& K) {
    if (K.simplices.empty()) throw std::invalid_argument("star_cover: empty complex");
    Cover cover;
    cover.complex = &K;
    for (std::size_t v = 0; v < K.vertices.size(); ++v) {
        cover.piece_stars.push_back({static_cast<int>(v)});
        cover.base_points.push_back(K.vertices[v]);
    }
    return cover;
}

SimplicialComplex nerve(const Cover& cover) {
    std::size_t n = cover.piece_stars.size();
    if (n > 25) throw std::invalid_argument("nerve: too many cover pieces for enumeration");
    SimplicialComplex N;
    N.vertices = cover.base_points;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> ids;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) ids.push_back(static_cast<int>(i));
        // Face-closure makes subsets redundant, but the test is monotone
        // anyway; just record every intersecting tuple.
        if (cover.pieces_intersect(ids)) N.simplices.insert(Simplex(ids.begin(), ids.end()));
    }
    return N;
}

namespace {

using Vec = std::vector<Rational>;

// Row space with incremental exact elimination.
struct RowSpace {
    std::vector<Vec> rows;           // echelon rows, pivot normalized to 1
    std::vector<std::size_t> pivots;

    Vec reduce(Vec v) const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const Rational& f = v[pivots[i]];
            if (f == 0) continue;
            Rational factor = f;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= factor * rows[i][j];
        }
        return v;
    }

    bool insert(Vec v) {
        v = reduce(std::move(v));
        std::size_t piv = v.size();
        for (std::size_t j = 0; j < v.size(); ++j)
            if (v[j] != 0) {
                piv = j;
                break;
            }
        if (piv == v.size()) return false;
        Rational lead = v[piv];
        for (auto& x : v) x /= lead;
        rows.push_back(std::move(v));
        pivots.push_back(piv);
        return true;
    }
};

// Kernel basis of the matrix (rows x cols) by exact elimination.
std::vector<Vec> kernel_basis(std::vector<Vec> M, std::size_t n_cols) {
    std::size_t n_rows = M.size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n_cols && r < n_rows; ++c) {
        std::size_t piv = n_rows;
        for (std::size_t i = r; i < n_rows; ++i)
            if (M[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == n_rows) continue;
        std::swap(M[r], M[piv]);
        Rational lead = M[r][c];
        for (auto& x : M[r]) x /= lead;
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (i == r || M[i][c] == 0) continue;
            Rational f = M[i][c];
            for (std::size_t j = 0; j < n_cols; ++j) M[i][j] -= f * M[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(n_cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    std::vector<Vec> basis;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (is_pivot[c]) continue;
        Vec v(n_cols, Rational(0));
        v[c] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -M[i][c];
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

HomologyResult homology(const SimplicialComplex& K, std::size_t degree) {
    std::vector<Simplex> Sk = K.simplices_of_dim(degree);
    HomologyResult out;
    if (Sk.empty()) return out;
    std::map<Simplex, std::size_t> col_of;
    for (std::size_t i = 0; i < Sk.size(); ++i) col_of[Sk[i]] = i;

    auto chain_to_vec = [&](const Chain& ch) {
        Vec v(Sk.size(), Rational(0));
        for (const auto& [s, c] : ch.terms()) v[col_of.at(s)] = c;
        return v;
    };

    // Kernel of the boundary in this degree.
    std::vector<Vec> kernel;
    if (degree == 0) {
        for (std::size_t i = 0; i < Sk.size(); ++i) {
            Vec v(Sk.size(), Rational(0));
            v[i] = 1;
            kernel.push_back(std::move(v));
        }
    } else {
        std::vector<Simplex> faces = K.simplices_of_dim(degree - 1);
        std::map<Simplex, std::size_t> row_of;
        for (std::size_t i = 0; i < faces.size(); ++i) row_of[faces[i]] = i;
        std::vector<Vec> M(faces.size(), Vec(Sk.size(), Rational(0)));
        for (std::size_t c = 0; c < Sk.size(); ++c) {
            Chain ch;
            ch.add(Sk[c], Rational(1));
            Chain bd = boundary(ch);
            for (const auto& [f, coef] : bd.terms()) M[row_of.at(f)][c] = coef;
        }
        kernel = kernel_basis(std::move(M), Sk.size());
    }

    // Image of the boundary from one degree up.
    RowSpace image;
    for (const auto& s : K.simplices_of_dim(degree + 1)) {
        Chain ch;
        ch.add(s, Rational(1));
        image.insert(chain_to_vec(boundary(ch)));
    }

    RowSpace quotient = image;  // grows with chosen representatives
    for (const auto& v : kernel) {
        if (quotient.insert(v)) {
            Chain rep;
            for (std::size_t i = 0; i < Sk.size(); ++i)
                if (v[i] != 0) rep.add(Sk[i], v[i]);
            out.cycle_basis.push_back(std::move(rep));
        }
    }
    out.betti = out.cycle_basis.size();
    return out;
}

namespace {

std::vector<std::vector<Rational>> int_points(std::vector<std::vector<long>> pts) {
    std::vector<std::vector<Rational>> out;
    for (auto& p : pts) {
        std::vector<Rational> q;
        for (long x : p) q.push_back(Rational(x));
        out.push_back(std::move(q));
    }
    return out;
}

}  // namespace

SimplicialComplex complex_point() { return SimplicialComplex::build(int_points({{0}}), {{0}}); }

SimplicialComplex complex_interval() {
    return SimplicialComplex::build(int_points({{0}, {1}}), {{0, 1}});
}

SimplicialComplex complex_circle() {
    return SimplicialComplex::build(int_points({{0, 0}, {1, 0}, {0, 1}}),
                                    {{0, 1}, {1, 2}, {0, 2}});
}

SimplicialComplex complex_disk() {
    return SimplicialComplex::build(int_points({{0, 0}, {1, 0}, {0, 1}}), {{0, 1, 2}});
}

SimplicialComplex complex_tetrahedron_boundary() {
    return SimplicialComplex::build(int_points({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}),
                                    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

SimplicialComplex complex_cylinder() {
    return SimplicialComplex::build(
        int_points({{1, 0, 0}, {0, 1, 0}, {-1, -1, 0}, {1, 0, 1}, {0, 1, 1}, {-1, -1, 1}}),
        {{0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}});
}

SimplicialComplex complex_square_annulus() {
    // Outer square corners 0..3, inner square corners 4..7, both
    // counterclockwise starting at the lower-left.
    return SimplicialComplex::build(
        int_points({{-2, -2}, {2, -2}, {2, 2}, {-2, 2}, {-1, -1}, {1, -1}, {1, 1}, {-1, 1}}),
        {{0, 1, 4}, {1, 5, 4}, {1, 2, 5}, {2, 6, 5}, {2, 3, 6}, {3, 7, 6}, {3, 0, 7}, {0, 4, 7}});
}

namespace {

nlohmann::json rational_to_json(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1 && num >= std::numeric_limits<std::int64_t>::min() &&
        num <= std::numeric_limits<std::int64_t>::max())
        return num.convert_to<std::int64_t>();
    return num.str() + "/" + den.str();
}

Rational rational_from_json(const nlohmann::json& v) {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    }
    if (v.is_number_float()) {
        // Doubles are dyadic rationals; convert exactly.
        double x = v.get<double>();
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite coordinate");
        Rational r(x);
        return r;
    }
    throw std::invalid_argument("unsupported rational encoding");
}

}  // namespace

std::string serialize_complex(const SimplicialComplex& K) {
    nlohmann::json j;
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : K.vertices) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& x : v) row.push_back(rational_to_json(x));
        verts.push_back(row);
    }
    j["vertices"] = verts;
    nlohmann::json simps = nlohmann::json::array();
    for (const auto& s : K.simplices) simps.push_back(s);
    j["simplices"] = simps;
    return j.dump();
}

SimplicialComplex deserialize_complex(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    std::vector<std::vector<Rational>> verts;
    for (const auto& row : j.at("vertices")) {
        std::vector<Rational> v;
        for (const auto& x : row) v.push_back(rational_from_json(x));
        verts.push_back(std::move(v));
    }
    std::vector<Simplex> maximal;
    for (const auto& s : j.at("simplices")) maximal.push_back(s.get<Simplex>());
    return SimplicialComplex::build(std::move(verts), maximal);
}

}  // namespace derham
