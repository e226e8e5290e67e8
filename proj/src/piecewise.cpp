#include "derham/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derham {

PiecewiseForm PiecewiseForm::zero(const SimplicialComplex& K) {
    PiecewiseForm out;
    out.K = &K;
    return out;
}

PiecewiseForm PiecewiseForm::global(const SimplicialComplex& K, const PolyForm& omega) {
    PiecewiseForm out;
    out.K = &K;
    if (omega.is_zero()) return out;
    for (const auto& top : K.simplices_of_dim(K.dim())) out.pieces[top] = omega;
    return out;
}

bool PiecewiseForm::is_zero() const {
    for (const auto& [s, f] : pieces)
        if (!f.is_zero()) return false;
    return true;
}

const PolyForm& PiecewiseForm::piece(const Simplex& top) const {
    static const PolyForm zero_form;
    auto it = pieces.find(top);
    return it == pieces.end() ? zero_form : it->second;
}

void PiecewiseForm::set_piece(const Simplex& top, PolyForm value) {
    if (value.is_zero())
        pieces.erase(top);
    else
        pieces[top] = std::move(value);
}

PiecewiseForm PiecewiseForm::operator-() const {
    PiecewiseForm out;
    out.K = K;
    for (const auto& [s, f] : pieces) out.pieces[s] = -f;
    return out;
}

PiecewiseForm& PiecewiseForm::operator+=(const PiecewiseForm& rhs) {
    if (!K) K = rhs.K;
    for (const auto& [s, f] : rhs.pieces) {
        auto it = pieces.find(s);
        if (it == pieces.end()) {
            pieces[s] = f;
        } else {
            it->second += f;
            if (it->second.is_zero()) pieces.erase(it);
        }
    }
    return *this;
}

PiecewiseForm& PiecewiseForm::operator-=(const PiecewiseForm& rhs) { return *this += -rhs; }

PiecewiseForm& PiecewiseForm::operator*=(const Rational& c) {
    if (c == 0) {
        pieces.clear();
        return *this;
    }
    for (auto& [s, f] : pieces) f *= c;
    return *this;
}

bool PiecewiseForm::operator==(const PiecewiseForm& rhs) const {
    for (const auto& [s, f] : pieces)
        if (!(f == rhs.piece(s))) return false;
    for (const auto& [s, f] : rhs.pieces)
        if (pieces.find(s) == pieces.end() && !f.is_zero()) return false;
    return true;
}

PiecewiseForm exterior_derivative(const PiecewiseForm& omega) {
    PiecewiseForm out;
    out.K = omega.K;
    for (const auto& [s, f] : omega.pieces) out.set_piece(s, exterior_derivative(f));
    return out;
}

PiecewiseForm wedge(const PiecewiseForm& a, const PiecewiseForm& b) {
    PiecewiseForm out;
    out.K = a.K ? a.K : b.K;
    for (const auto& [s, f] : a.pieces) {
        const PolyForm& g = b.piece(s);
        if (!g.is_zero()) out.set_piece(s, wedge(f, g));
    }
    return out;
}

std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> A,
                                                  std::vector<Rational> b) {
    std::size_t rows = A.size();
    std::size_t cols = rows ? A[0].size() : 0;
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = rows;
        for (std::size_t i = r; i < rows; ++i)
            if (A[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        std::swap(A[r], A[piv]);
        std::swap(b[r], b[piv]);
        Rational lead = A[r][c];
        for (auto& x : A[r]) x /= lead;
        b[r] /= lead;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (std::size_t j = 0; j < cols; ++j) A[i][j] -= f * A[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<Rational> x(cols, Rational(0));
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

PiecewiseForm hat_function(const SimplicialComplex& K, int vertex) {
    std::size_t d = K.ambient_dim();
    PiecewiseForm out;
    out.K = &K;
    for (const auto& top : K.simplices_of_dim(K.dim())) {
        if (top.size() != d + 1)
            throw std::invalid_argument("hat_function: complex not full-dimensional");
        if (!std::binary_search(top.begin(), top.end(), vertex)) continue;
        // Affine a0 + a.x matching 1 at `vertex`, 0 at the other vertices.
        std::vector<std::vector<Rational>> A;
        std::vector<Rational> rhs;
        for (int v : top) {
            std::vector<Rational> row{Rational(1)};
            for (const auto& x : K.vertices[static_cast<std::size_t>(v)]) row.push_back(x);
            A.push_back(std::move(row));
            rhs.push_back(v == vertex ? Rational(1) : Rational(0));
        }
        auto sol = solve_linear(std::move(A), std::move(rhs));
        if (!sol) throw std::invalid_argument("hat_function: degenerate top simplex");
        Polynomial f(d, (*sol)[0]);
        for (std::size_t i = 0; i < d; ++i)
            f += (*sol)[i + 1] * Polynomial::variable(d, i);
        out.set_piece(top, PolyForm::scalar(f));
    }
    return out;
}

double lp_norm(const PiecewiseForm& omega, double p, std::size_t refine) {
    if (!omega.K) return 0.0;
    const SimplicialComplex& K = *omega.K;
    if (K.ambient_dim() != 2 || K.dim() != 2)
        throw std::invalid_argument("lp_norm: 2-dimensional complexes only");
    double total = 0;
    std::size_t m = std::size_t{1} << refine;  // subdivision per edge
    for (const auto& top : K.simplices_of_dim(2)) {
        const PolyForm& f = omega.piece(top);
        std::vector<double> a(2), b(2), c(2);
        for (int i = 0; i < 2; ++i) {
            a[i] = to_double(K.vertices[static_cast<std::size_t>(top[0])][i]);
            b[i] = to_double(K.vertices[static_cast<std::size_t>(top[1])][i]);
            c[i] = to_double(K.vertices[static_cast<std::size_t>(top[2])][i]);
        }
        double area = 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
        double cell = area / (m * m);
        if (f.is_zero()) continue;
        // Midpoints of a uniform barycentric grid: upward and downward cells.
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j + i < m; ++j) {
                auto eval_at = [&](double u, double v) {
                    std::vector<double> x{a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
                                          a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1])};
                    return pointwise_norm(f, x);
                };
                double u0 = (i + 1.0 / 3) / m, v0 = (j + 1.0 / 3) / m;
                total += std::pow(eval_at(u0, v0), p) * cell;
                if (j + i + 1 < m) {
                    double u1 = (i + 2.0 / 3) / m, v1 = (j + 2.0 / 3) / m;
                    total += std::pow(eval_at(u1, v1), p) * cell;
                }
            }
        }
    }
    return std::pow(total, 1.0 / p);
}

}  // namespace derham
