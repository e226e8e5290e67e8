#include "derham/cech.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace derham {

CechComplex CechComplex::over_star_cover(SimplicialComplex K) {
    CechComplex C;
    C.owner = std::make_shared<const SimplicialComplex>(std::move(K));
    C.K = C.owner.get();
    C.cover = star_cover(*C.K);
    C.nerve_complex = nerve(C.cover);
    return C;
}

std::vector<Rational> CechComplex::tuple_base(const Simplex& I) const {
    if (I.size() == 1) return cover.base_points[static_cast<std::size_t>(I[0])];
    // Star-cover pieces are stars of vertices; the intersection U_I is
    // star-shaped from any interior point of the simplex spanned by I.
    Simplex span;
    for (int pid : I) {
        const auto& centers = cover.piece_stars[static_cast<std::size_t>(pid)];
        if (centers.size() != 1)
            throw std::invalid_argument("tuple_base: star covers only");
        span.push_back(centers[0]);
    }
    std::sort(span.begin(), span.end());
    if (!K->has_simplex(span)) throw std::invalid_argument("tuple_base: empty intersection");
    return K->barycenter(span);
}

namespace {

PolyForm restrict_to_tuple(PolyForm f, const Simplex&, const CechComplex&) { return f; }

PiecewiseForm restrict_to_tuple(PiecewiseForm f, const Simplex& J, const CechComplex& C) {
    // U_J meets the interior of a top simplex iff the top contains every
    // star center of J.
    for (auto it = f.pieces.begin(); it != f.pieces.end();) {
        bool keep = true;
        for (int pid : J) {
            int center = C.cover.piece_stars[static_cast<std::size_t>(pid)][0];
            if (!std::binary_search(it->first.begin(), it->first.end(), center)) {
                keep = false;
                break;
            }
        }
        it = keep ? std::next(it) : f.pieces.erase(it);
    }
    return f;
}

template <class F>
CechCochain<F> delta_impl(const CechCochain<F>& phi, const CechComplex& C) {
    CechCochain<F> out;
    out.cech_degree = phi.cech_degree + 1;
    out.form_degree = phi.form_degree;
    for (const auto& J : C.nerve_complex.simplices_of_dim(out.cech_degree)) {
        F acc{};
        for (std::size_t m = 0; m < J.size(); ++m) {
            Simplex sub;
            for (std::size_t i = 0; i < J.size(); ++i)
                if (i != m) sub.push_back(J[i]);
            F v = phi.value(sub);
            if (v.is_zero()) continue;
            if (m % 2 == 1) v = -v;
            acc += v;
        }
        if (!acc.is_zero()) out.set(J, restrict_to_tuple(std::move(acc), J, C));
    }
    return out;
}

template <class F>
void add_into(CechCochain<F>& dst, const CechCochain<F>& src) {
    for (const auto& [I, v] : src.values) {
        F sum = dst.value(I);
        sum += v;
        dst.set(I, std::move(sum));
    }
}

}  // namespace

PolyCochain cech_delta(const PolyCochain& phi, const CechComplex& C) {
    return delta_impl(phi, C);
}
PiecewiseCochain cech_delta(const PiecewiseCochain& phi, const CechComplex& C) {
    return delta_impl(phi, C);
}

TotalElement total_differential(const TotalElement& e, const CechComplex& C) {
    TotalElement out;
    out.total_degree = e.total_degree + 1;
    for (const auto& [l, phi] : e.parts) {
        // (-1)^l d part stays at Čech degree l. The sign must ride on d
        // (not on delta) for D to square to zero, since d and delta commute.
        PolyCochain dphi;
        dphi.cech_degree = l;
        dphi.form_degree = phi.form_degree + 1;
        for (const auto& [I, f] : phi.values) {
            PolyForm df = exterior_derivative(f);
            dphi.set(I, l % 2 == 0 ? df : -df);
        }
        auto it = out.parts.find(l);
        if (it == out.parts.end())
            out.parts[l] = std::move(dphi);
        else
            add_into(it->second, dphi);

        // delta part moves to Čech degree l+1.
        PolyCochain dl = cech_delta(phi, C);
        auto jt = out.parts.find(l + 1);
        if (jt == out.parts.end())
            out.parts[l + 1] = std::move(dl);
        else
            add_into(jt->second, dl);
    }
    for (auto it = out.parts.begin(); it != out.parts.end();)
        it = it->second.is_zero() ? out.parts.erase(it) : std::next(it);
    return out;
}

PolyCochain localize(const PolyForm& omega, const CechComplex& C) {
    if (omega.degree() == 0) throw std::invalid_argument("localize: need degree >= 1");
    if (!exterior_derivative(omega).is_zero())
        throw std::invalid_argument("localize: form is not closed");
    PolyCochain xi;
    xi.cech_degree = 0;
    xi.form_degree = omega.degree() - 1;
    for (std::size_t i = 0; i < C.cover.piece_stars.size(); ++i) {
        Simplex I{static_cast<int>(i)};
        xi.set(I, radial_homotopy(omega, C.tuple_base(I)));
    }
    return xi;
}

namespace {

PolyForm random_gauge_form(std::mt19937& rng, std::size_t n, std::size_t degree) {
    // A random closed form to shift a rung by: d of a random form for
    // positive degree, a random constant for degree 0.
    std::uniform_int_distribution<int> coeff(-3, 3);
    if (degree == 0) return PolyForm::scalar(Polynomial(n, Rational(coeff(rng))));
    PolyForm pre(n, degree - 1);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != degree - 1) continue;
        IndexSet I;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) I.push_back(static_cast<int>(i) + 1);
        Polynomial p(n);
        Monomial m(n, 0);
        if (n) m[rng() % n] = 1 + rng() % 2;
        p.add_term(m, Rational(coeff(rng)));
        pre.add_component(I, p);
    }
    return exterior_derivative(pre);
}

Rational constant_value(const Polynomial& p) {
    if (p.is_zero()) return Rational(0);
    if (p.total_degree() != 0)
        throw std::logic_error("expected a constant polynomial");
    return p.terms().begin()->second;
}

}  // namespace

ZigzagState zigzag(const PolyForm& omega, const CechComplex& C, const ZigzagOptions& opts) {
    std::size_t k = omega.degree();
    if (k == 0) throw std::invalid_argument("zigzag: need degree >= 1");
    std::size_t n = omega.n_vars();

    ZigzagState state;
    state.rungs.push_back(localize(omega, C));
    if (opts.gauge_rng) {
        for (auto& [I, f] : state.rungs[0].values)
            f += random_gauge_form(*opts.gauge_rng, n, k - 1);
    }
    for (std::size_t s = 0; s + 1 < k; ++s) {
        PolyCochain g = cech_delta(state.rungs[s], C);
        PolyCochain next;
        next.cech_degree = s + 1;
        next.form_degree = k - 2 - s;
        for (const auto& I : C.nerve_complex.simplices_of_dim(s + 1)) {
            PolyForm gi = g.value(I);
            if (gi.is_zero()) continue;
            PolyForm v = radial_homotopy(gi, C.tuple_base(I));
            if (opts.gauge_rng) v += random_gauge_form(*opts.gauge_rng, n, next.form_degree);
            next.set(I, std::move(v));
        }
        state.rungs.push_back(std::move(next));
    }

    PolyCochain gamma = cech_delta(state.rungs.back(), C);
    for (const auto& I : C.nerve_complex.simplices_of_dim(k)) {
        PolyForm v = gamma.value(I);
        Rational c = v.is_zero() ? Rational(0) : constant_value(v.component({}));
        if (c != 0) state.constants[I] = c;
    }
    return state;
}

Rational integrate_over_cycle(const PolyForm& omega, const Chain& cycle, const CechComplex& C,
                              const ZigzagOptions& opts) {
    if (!boundary(cycle).is_zero())
        throw std::invalid_argument("integrate_over_cycle: chain is not a cycle");
    std::size_t k = omega.degree();
    ZigzagState state = zigzag(omega, C, opts);
    Rational acc(0);
    for (const auto& [I, a] : cycle.terms()) {
        auto it = state.constants.find(I);
        if (it != state.constants.end()) acc += a * it->second;
    }
    if ((k / 2) % 2 == 1) acc = -acc;
    return acc;
}

ConstantSolveResult solve_constants(const std::map<Simplex, Rational>& g, std::size_t degree,
                                    const CechComplex& C) {
    ConstantSolveResult out;
    std::vector<Simplex> rows = C.nerve_complex.simplices_of_dim(degree);
    std::vector<Simplex> cols = C.nerve_complex.simplices_of_dim(degree - 1);
    std::map<Simplex, std::size_t> col_of;
    for (std::size_t i = 0; i < cols.size(); ++i) col_of[cols[i]] = i;

    std::size_t R = rows.size(), Cn = cols.size();
    // Augmented elimination carrying the row-combination bookkeeping, so an
    // inconsistent row yields a certificate cycle.
    std::vector<std::vector<Rational>> A(R, std::vector<Rational>(Cn, Rational(0)));
    std::vector<Rational> b(R, Rational(0));
    std::vector<std::vector<Rational>> comb(R, std::vector<Rational>(R, Rational(0)));
    for (std::size_t r = 0; r < R; ++r) {
        comb[r][r] = 1;
        const Simplex& I = rows[r];
        for (std::size_t m = 0; m < I.size(); ++m) {
            Simplex sub;
            for (std::size_t i = 0; i < I.size(); ++i)
                if (i != m) sub.push_back(I[i]);
            A[r][col_of.at(sub)] += (m % 2 == 0) ? Rational(1) : Rational(-1);
        }
        auto it = g.find(I);
        if (it != g.end()) b[r] = it->second;
    }

    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < Cn && r < R; ++c) {
        std::size_t piv = R;
        for (std::size_t i = r; i < R; ++i)
            if (A[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == R) continue;
        std::swap(A[r], A[piv]);
        std::swap(b[r], b[piv]);
        std::swap(comb[r], comb[piv]);
        Rational lead = A[r][c];
        for (auto& x : A[r]) x /= lead;
        b[r] /= lead;
        for (auto& x : comb[r]) x /= lead;
        for (std::size_t i = 0; i < R; ++i) {
            if (i == r || A[i][c] == 0) continue;
            Rational f = A[i][c];
            for (std::size_t j = 0; j < Cn; ++j) A[i][j] -= f * A[r][j];
            b[i] -= f * b[r];
            for (std::size_t j = 0; j < R; ++j) comb[i][j] -= f * comb[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < R; ++i) {
        if (b[i] == 0) continue;
        // comb[i] * A = 0 with comb[i] * b != 0: the corresponding chain is
        // a cycle pairing nonzero with g.
        for (std::size_t j = 0; j < R; ++j)
            if (comb[i][j] != 0) out.certificate.add(rows[j], comb[i][j]);
        out.period = b[i];
        return out;
    }

    std::map<Simplex, Rational> x;
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        if (b[i] != 0) x[cols[pivot_col[i]]] = b[i];

    if (degree == 1) {
        // Gauge: shift by a constant per nerve component so the lowest
        // vertex of each component reads 0.
        std::size_t nv = C.nerve_complex.vertices.size();
        std::vector<std::size_t> comp(nv);
        std::iota(comp.begin(), comp.end(), std::size_t{0});
        std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
            while (comp[v] != v) v = comp[v] = comp[comp[v]];
            return v;
        };
        for (const auto& e : C.nerve_complex.simplices_of_dim(1))
            comp[find(static_cast<std::size_t>(e[0]))] = find(static_cast<std::size_t>(e[1]));
        std::map<std::size_t, Rational> anchor;
        for (std::size_t v = 0; v < nv; ++v) {
            std::size_t root = find(v);
            if (!anchor.count(root)) {
                auto it = x.find(Simplex{static_cast<int>(v)});
                anchor[root] = it == x.end() ? Rational(0) : it->second;
            }
        }
        std::map<Simplex, Rational> gauged;
        for (std::size_t v = 0; v < nv; ++v) {
            auto it = x.find(Simplex{static_cast<int>(v)});
            Rational val = (it == x.end() ? Rational(0) : it->second) - anchor[find(v)];
            if (val != 0) gauged[Simplex{static_cast<int>(v)}] = val;
        }
        x = std::move(gauged);
    }

    out.ok = true;
    out.solution = std::move(x);
    return out;
}

namespace {

// (h psi)_J = sum_j hat_j * psi_{(j,J)}, the standard homotopy for delta.
PiecewiseCochain contract(const PiecewiseCochain& psi, const CechComplex& C,
                          const std::vector<PiecewiseForm>& hats) {
    PiecewiseCochain out;
    out.cech_degree = psi.cech_degree - 1;
    out.form_degree = psi.form_degree;
    std::size_t n_pieces = C.cover.piece_stars.size();
    for (const auto& J : C.nerve_complex.simplices_of_dim(out.cech_degree)) {
        PiecewiseForm acc;
        acc.K = C.K;
        for (std::size_t j = 0; j < n_pieces; ++j) {
            Simplex jJ{static_cast<int>(j)};
            jJ.insert(jJ.end(), J.begin(), J.end());
            Simplex sorted = jJ;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
            if (!C.nerve_complex.simplices.count(sorted)) continue;
            PiecewiseForm v = psi.value(jJ);
            if (v.is_zero()) continue;
            acc += wedge(hats[j], v);
        }
        if (!acc.is_zero()) out.set(J, restrict_to_tuple(std::move(acc), J, C));
    }
    return out;
}

PiecewiseForm as_piecewise(const PolyForm& f, const Simplex& J, const CechComplex& C) {
    return restrict_to_tuple(PiecewiseForm::global(*C.K, f), J, C);
}

}  // namespace

PrimitiveResult global_primitive(const PolyForm& omega, const CechComplex& C, double p) {
    PrimitiveResult out;
    std::size_t k = omega.degree();
    if (k == 0) throw std::invalid_argument("global_primitive: need degree >= 1");

    ZigzagState state = zigzag(omega, C);
    ConstantSolveResult cs = solve_constants(state.constants, k, C);
    if (!cs.ok) {
        out.offending_cycle = cs.certificate;
        out.period = cs.period;
        if ((k / 2) % 2 == 1) out.period = -out.period;
        return out;
    }

    // Hats for the partition of unity subordinate to the star cover.
    std::vector<PiecewiseForm> hats;
    for (std::size_t j = 0; j < C.cover.piece_stars.size(); ++j)
        hats.push_back(hat_function(*C.K, C.cover.piece_stars[j][0]));

    // eta^{k-1} = xi^{k-1} - C', then descend: x^s = h(eta^s),
    // eta^{s-1} = xi^{s-1} - d x^s, each eta delta-closed.
    PiecewiseCochain eta;
    eta.cech_degree = k - 1;
    eta.form_degree = 0;
    for (const auto& J : C.nerve_complex.simplices_of_dim(k - 1)) {
        PiecewiseForm v = as_piecewise(state.rungs[k - 1].value(J), J, C);
        auto it = cs.solution.find(J);
        if (it != cs.solution.end()) {
            PolyForm c0 = PolyForm::scalar(Polynomial(omega.n_vars(), it->second));
            v -= as_piecewise(c0, J, C);
        }
        if (!v.is_zero()) eta.set(J, std::move(v));
    }

    for (std::size_t s = k - 1; s >= 1; --s) {
        PiecewiseCochain x = contract(eta, C, hats);
        PiecewiseCochain next;
        next.cech_degree = s - 1;
        next.form_degree = k - s;
        for (const auto& J : C.nerve_complex.simplices_of_dim(s - 1)) {
            PiecewiseForm v = as_piecewise(state.rungs[s - 1].value(J), J, C);
            v -= exterior_derivative(x.value(J));
            if (!v.is_zero()) next.set(J, std::move(v));
        }
        eta = std::move(next);
    }

    // delta eta^0 = 0: the local pieces agree on overlaps; glue.
    PiecewiseForm glued;
    glued.K = C.K;
    for (const auto& top : C.K->simplices_of_dim(C.K->dim())) {
        bool have = false;
        PolyForm chosen;
        for (int v : top) {
            const PiecewiseForm pf = eta.value(Simplex{v});
            const PolyForm& cand = pf.piece(top);
            if (!have) {
                chosen = cand;
                have = true;
            } else if (!(chosen == cand)) {
                throw std::logic_error("global_primitive: pieces disagree on an overlap");
            }
        }
        glued.set_piece(top, chosen);
    }

    // d xi = omega on every top simplex, exactly.
    PiecewiseForm residual = exterior_derivative(glued) - PiecewiseForm::global(*C.K, omega);
    if (!residual.is_zero())
        throw std::logic_error("global_primitive: primitive residual nonzero");

    out.ok = true;
    out.primitive = glued;
    if (p > 0) {
        double denom = lp_norm(PiecewiseForm::global(*C.K, omega), p);
        if (denom > 0) out.norm_ratio = lp_norm(glued, p) / denom;
    }
    return out;
}

double integrate_over_cycle_numeric(const NumericForm& omega, const Chain& cycle,
                                    const CechComplex& C, double tol, std::mt19937* gauge_rng) {
    if (omega.degree != 1)
        throw std::invalid_argument("integrate_over_cycle_numeric: degree-1 forms only");
    if (!boundary(cycle).is_zero())
        throw std::invalid_argument("integrate_over_cycle_numeric: chain is not a cycle");

    auto base_of = [&](int piece) {
        std::vector<double> b;
        for (const auto& x : C.cover.base_points[static_cast<std::size_t>(piece)])
            b.push_back(to_double(x));
        return b;
    };
    // Primitive value at x of the piece-i local primitive: integral along
    // the straight segment from the base point (stars are star-shaped).
    auto primitive_at = [&](int piece, const std::vector<double>& x) {
        std::vector<double> b = base_of(piece);
        Curve seg;
        seg.point = [b, x](double s) {
            std::vector<double> p(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) p[i] = b[i] + s * (x[i] - b[i]);
            return p;
        };
        seg.velocity = [b, x](double) {
            std::vector<double> v(b.size());
            for (std::size_t i = 0; i < b.size(); ++i) v[i] = x[i] - b[i];
            return v;
        };
        return line_integral(omega, seg, tol);
    };

    std::map<int, double> gauge;
    if (gauge_rng) {
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (std::size_t i = 0; i < C.cover.piece_stars.size(); ++i)
            gauge[static_cast<int>(i)] = u(*gauge_rng);
    }
    auto offset = [&](int piece) {
        auto it = gauge.find(piece);
        return it == gauge.end() ? 0.0 : it->second;
    };

    double acc = 0;
    for (const auto& [I, a] : cycle.terms()) {
        if (I.size() != 2) throw std::invalid_argument("numeric path: 1-cycles only");
        std::vector<double> b0 = base_of(I[0]);
        std::vector<double> b1 = base_of(I[1]);
        std::vector<double> mid(b0.size());
        for (std::size_t i = 0; i < b0.size(); ++i) mid[i] = (b0[i] + b1[i]) / 2;
        double g = (primitive_at(I[1], mid) + offset(I[1])) -
                   (primitive_at(I[0], mid) + offset(I[0]));
        acc += to_double(a) * g;
    }
    return acc;
}

NumericPeriodCheck check_periods_numeric(const NumericForm& omega, const CechComplex& C,
                                         double tol) {
    NumericPeriodCheck out;
    HomologyResult h1 = homology(C.nerve_complex, 1);
    for (const auto& cycle : h1.cycle_basis) {
        double value = integrate_over_cycle_numeric(omega, cycle, C, tol * 1e-3);
        if (std::abs(value) > tol) {
            out.ok = false;
            out.offending_cycle = cycle;
            out.period = value;
            return out;
        }
    }
    return out;
}

}  // namespace derham
