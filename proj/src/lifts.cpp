#include "derham/lifts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace derham {

FuncDesc desc_poly(Polynomial p, std::size_t arity, double lipschitz) {
    FuncDesc f;
    f.arity = arity;
    f.lipschitz = lipschitz;
    f.eval = [p = std::move(p)](const std::vector<double>& x) { return p.evaluate(x); };
    return f;
}

FuncDesc desc_const(double c, std::size_t arity) {
    FuncDesc f;
    f.arity = arity;
    f.lipschitz = 0;
    f.eval = [c](const std::vector<double>&) { return c; };
    return f;
}

FuncDesc desc_coord(std::size_t i, std::size_t arity) {
    FuncDesc f;
    f.arity = arity;
    f.lipschitz = 1;
    f.eval = [i](const std::vector<double>& x) { return x.at(i); };
    return f;
}

FuncDesc desc_abs(FuncDesc f) {
    FuncDesc out;
    out.arity = f.arity;
    out.lipschitz = f.lipschitz;
    out.eval = [g = std::move(f.eval)](const std::vector<double>& x) { return std::abs(g(x)); };
    return out;
}

namespace {

FuncDesc minmax(FuncDesc a, FuncDesc b, bool take_min) {
    if (a.arity != b.arity) throw std::invalid_argument("min/max: arity mismatch");
    FuncDesc out;
    out.arity = a.arity;
    out.lipschitz = std::max(a.lipschitz, b.lipschitz);
    out.eval = [fa = std::move(a.eval), fb = std::move(b.eval),
                take_min](const std::vector<double>& x) {
        return take_min ? std::min(fa(x), fb(x)) : std::max(fa(x), fb(x));
    };
    return out;
}

}  // namespace

FuncDesc desc_min(FuncDesc a, FuncDesc b) { return minmax(std::move(a), std::move(b), true); }
FuncDesc desc_max(FuncDesc a, FuncDesc b) { return minmax(std::move(a), std::move(b), false); }

FuncDesc desc_compose(FuncDesc outer, std::vector<FuncDesc> inner) {
    if (outer.arity != inner.size()) throw std::invalid_argument("compose: arity mismatch");
    FuncDesc out;
    out.arity = inner.empty() ? 0 : inner.front().arity;
    double inner_lip = 0;
    for (const FuncDesc& g : inner) {
        if (g.arity != out.arity) throw std::invalid_argument("compose: arity mismatch");
        inner_lip = std::max(inner_lip, g.lipschitz);
    }
    out.lipschitz = outer.lipschitz * inner_lip;
    out.eval = [f = std::move(outer.eval), inner = std::move(inner)](const std::vector<double>& x) {
        std::vector<double> y(inner.size());
        for (std::size_t i = 0; i < inner.size(); ++i) y[i] = inner[i].eval(x);
        return f(y);
    };
    return out;
}

std::size_t CellTower::dim() const {
    return kind == Kind::Interval ? 1 : base->dim() + 1;
}

CellTower CellTower::interval(double a, double b) {
    CellTower t;
    t.a = a;
    t.b = b;
    return t;
}

CellTower CellTower::point(double a) { return interval(a, a); }

CellTower CellTower::graph_over(CellTower base, FuncDesc theta) {
    CellTower t;
    t.kind = Kind::Graph;
    t.base = std::make_shared<const CellTower>(std::move(base));
    t.theta = std::move(theta);
    return t;
}

CellTower CellTower::band_over(CellTower base, FuncDesc theta1, FuncDesc theta2) {
    CellTower t;
    t.kind = Kind::Band;
    t.base = std::make_shared<const CellTower>(std::move(base));
    t.theta1 = std::move(theta1);
    t.theta2 = std::move(theta2);
    return t;
}

std::vector<double> sample_cell(const CellTower& tower, std::mt19937& rng) {
    if (tower.kind == CellTower::Kind::Interval) {
        if (tower.a == tower.b) return {tower.a};
        return {std::uniform_real_distribution<double>(tower.a, tower.b)(rng)};
    }
    std::vector<double> x = sample_cell(*tower.base, rng);
    if (tower.kind == CellTower::Kind::Graph) {
        x.push_back(tower.theta(x));
        return x;
    }
    const double margin = 1e-6;
    double lo = tower.theta1(x), hi = tower.theta2(x);
    double u = std::uniform_real_distribution<double>(margin, 1.0 - margin)(rng);
    x.push_back(lo + u * (hi - lo));
    return x;
}

namespace {

double max_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::string check_descriptor(const FuncDesc& f, const CellTower& base, const char* name,
                             std::size_t samples, std::mt19937& rng) {
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> x = sample_cell(base, rng), y = sample_cell(base, rng);
        double d = max_norm_diff(x, y);
        if (d == 0) continue;
        double jump = std::abs(f(x) - f(y));
        if (jump > f.lipschitz * d * (1 + 1e-9) + 1e-12)
            return std::string(name) + ": declared Lipschitz constant violated, ratio " +
                   std::to_string(jump / d);
    }
    return "";
}

}  // namespace

std::string check_tower(const CellTower& tower, std::size_t samples, std::mt19937& rng) {
    if (tower.kind == CellTower::Kind::Interval) {
        if (tower.a > tower.b) return "interval: a > b";
        return "";
    }
    std::string err = check_tower(*tower.base, samples, rng);
    if (!err.empty()) return err;
    if (tower.kind == CellTower::Kind::Graph)
        return check_descriptor(tower.theta, *tower.base, "theta", samples, rng);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> x = sample_cell(*tower.base, rng);
        if (!(tower.theta1(x) < tower.theta2(x)))
            return "band: theta1 < theta2 fails at a sampled base point";
    }
    err = check_descriptor(tower.theta1, *tower.base, "theta1", samples, rng);
    if (!err.empty()) return err;
    return check_descriptor(tower.theta2, *tower.base, "theta2", samples, rng);
}

Retraction diagonal_retraction(std::vector<double> weights) {
    Retraction r;
    r.dim = weights.size();
    auto w = std::make_shared<const std::vector<double>>(std::move(weights));
    r.map = [w](const std::vector<double>& q, double t) {
        std::vector<double> out(q);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::pow(t, (*w)[i]);
        return out;
    };
    r.analytic_jacobian = [w](const std::vector<double>& q, double t) {
        Matrix D(q.size(), std::vector<double>(q.size(), 0.0));
        for (std::size_t i = 0; i < q.size(); ++i) D[i][i] = std::pow(t, (*w)[i]);
        return D;
    };
    return r;
}

double band_tau(const CellTower& tower, const std::vector<double>& q) {
    if (tower.kind != CellTower::Kind::Band) throw std::invalid_argument("band_tau: not a band");
    std::vector<double> x(q.begin(), q.end() - 1);
    double lo = tower.theta1(x), hi = tower.theta2(x);
    if (std::abs(hi - lo) < 1e-300) throw std::runtime_error("band_tau: degenerate fiber");
    return (q.back() - lo) / (hi - lo);
}

Retraction standard_lift(const Retraction& r_base, const CellTower& tower) {
    if (tower.kind == CellTower::Kind::Interval)
        throw std::invalid_argument("standard_lift: tower has no level to lift through");
    if (r_base.dim + 1 != tower.dim())
        throw std::invalid_argument("standard_lift: base retraction dimension mismatch");
    Retraction out;
    out.dim = tower.dim();
    out.base = std::make_shared<const Retraction>(r_base);
    std::size_t bd = r_base.dim;
    if (tower.kind == CellTower::Kind::Graph) {
        out.level = Retraction::Level::Graph;
        out.theta = tower.theta;
        out.map = [base = out.base, th = tower.theta, bd](const std::vector<double>& q, double t) {
            std::vector<double> rx = base->map(std::vector<double>(q.begin(), q.begin() + bd), t);
            rx.push_back(th(rx));
            return rx;
        };
        return out;
    }
    out.level = Retraction::Level::Band;
    out.theta1 = tower.theta1;
    out.theta2 = tower.theta2;
    out.map = [base = out.base, t1 = tower.theta1, t2 = tower.theta2,
               bd](const std::vector<double>& q, double t) {
        std::vector<double> x(q.begin(), q.begin() + bd);
        double lo = t1(x), hi = t2(x);
        if (std::abs(hi - lo) < 1e-300)
            throw std::runtime_error("standard_lift: degenerate fiber (theta1 == theta2)");
        double tau = (q[bd] - lo) / (hi - lo);
        std::vector<double> rx = base->map(x, t);
        rx.push_back((1 - tau) * t1(rx) + tau * t2(rx));
        return rx;
    };
    return out;
}

namespace {

double det_by_elimination(Matrix a) {
    double det = 1;
    std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

constexpr double kDiffStep = 1e-6;

// d/dq_i of output coordinate `out` of r(., t), central differences.
double central_diff(const Retraction& r, const std::vector<double>& q, double t, std::size_t i,
                    std::size_t out) {
    std::vector<double> hi(q), lo(q);
    hi[i] += kDiffStep;
    lo[i] -= kDiffStep;
    return (r.map(hi, t)[out] - r.map(lo, t)[out]) / (2 * kDiffStep);
}

}  // namespace

JacobianResult jacobian(const Retraction& r, const std::vector<double>& q, double t) {
    JacobianResult out;
    if (r.analytic_jacobian) {
        out.D = r.analytic_jacobian(q, t);
        out.det = det_by_elimination(out.D);
        return out;
    }
    if (r.level != Retraction::Level::None) {
        std::size_t bd = r.base->dim;
        std::vector<double> x(q.begin(), q.begin() + bd);
        JacobianResult base = jacobian(*r.base, x, t);
        out.D.assign(r.dim, std::vector<double>(r.dim, 0.0));
        for (std::size_t i = 0; i < bd; ++i)
            for (std::size_t j = 0; j < bd; ++j) out.D[i][j] = base.D[i][j];
        for (std::size_t j = 0; j < r.dim; ++j) out.D[bd][j] = central_diff(r, q, t, j, bd);
        if (r.level == Retraction::Level::Band) {
            // fiber derivative in closed form: the lift is affine in y with
            // slope (theta2 - theta1)(r'x) / (theta2 - theta1)(x)
            double lo = r.theta1(x), hi = r.theta2(x);
            if (std::abs(hi - lo) < 1e-300)
                throw std::runtime_error("jacobian: degenerate fiber");
            std::vector<double> rx = r.base->map(x, t);
            double fd = (r.theta2(rx) - r.theta1(rx)) / (hi - lo);
            out.D[bd][bd] = fd;
            out.det = base.det * fd;
        } else {
            // graph level: no fiber direction; the tangent map of the cell is
            // determined by the base, so the determinant is intrinsic
            out.det = base.det;
        }
        return out;
    }
    out.D.assign(r.dim, std::vector<double>(r.dim, 0.0));
    for (std::size_t i = 0; i < r.dim; ++i)
        for (std::size_t j = 0; j < r.dim; ++j) out.D[i][j] = central_diff(r, q, t, j, i);
    out.det = det_by_elimination(out.D);
    return out;
}

namespace {

std::vector<double> default_t_grid() {
    std::vector<double> g;
    for (int j = 1; j <= 10; ++j) g.push_back(std::ldexp(1.0, -j));
    return g;
}

std::vector<double> draw_point(const SampleSpec& spec, std::mt19937& rng) {
    if (spec.sampler) return spec.sampler(rng);
    if (spec.box.empty()) throw std::invalid_argument("sample spec: no box and no sampler");
    std::vector<double> x(spec.box.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::uniform_real_distribution<double>(spec.box[i].first, spec.box[i].second)(rng);
    return x;
}

// slope + RMS residual of the least-squares line through (xs, ys)
std::pair<double, double> fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - slope * xs[i] - intercept;
        rss += e * e;
    }
    return {slope, std::sqrt(rss / n)};
}

}  // namespace

CriterionResult lipschitz_criterion(const FuncDesc& th2, const FuncDesc& th3,
                                    const Retraction& r_base, const SampleSpec& spec) {
    std::vector<double> t_grid = spec.t_grid.empty() ? default_t_grid() : spec.t_grid;
    std::mt19937 rng(spec.seed);
    CriterionResult best;
    std::size_t valid = 0;
    auto consider = [&](const std::vector<double>& x, double t) {
        double den = std::abs(th2(x) - th3(x));
        if (den < 1e-300) return;
        std::vector<double> rx = r_base.map(x, t);
        double ratio = std::abs(th2(rx) - th3(rx)) / den;
        ++valid;
        if (ratio > best.sup_ratio) {
            best.sup_ratio = ratio;
            best.witness_x = x;
            best.witness_t = t;
        }
    };
    std::vector<std::vector<double>> cloud(spec.cloud);
    for (auto& x : cloud) x = draw_point(spec, rng);
    for (double t : t_grid) {
        for (const auto& x : cloud) consider(x, t);
        for (const auto& curve : spec.curves) consider(curve(t), t);
    }
    if (valid == 0)
        throw std::runtime_error("lipschitz_criterion: degenerate input (theta2 == theta3)");
    return best;
}

GrowthFit fit_growth_exponents(const Retraction& r, const SampleSpec& spec) {
    GrowthFit fit;
    fit.t_grid = spec.t_grid.empty() ? default_t_grid() : spec.t_grid;
    std::mt19937 rng(spec.seed);
    std::vector<std::vector<double>> cloud(spec.cloud);
    for (auto& x : cloud) x = draw_point(spec, rng);

    std::vector<double> log_t, log_sup, log_inf;
    for (double t : fit.t_grid) {
        double sup = 0, inf = std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        for (const auto& q : cloud) {
            JacobianResult J;
            try {
                J = jacobian(r, q, t);
            } catch (const std::runtime_error&) {
                continue;  // non-smooth locus hit; skip the sample
            }
            double norm = 0;
            for (const auto& row : J.D)
                for (double v : row) norm = std::max(norm, std::abs(v));
            sup = std::max(sup, norm);
            inf = std::min(inf, std::abs(J.det));
            ++used;
        }
        if (used == 0) throw std::runtime_error("fit_growth_exponents: every sample degenerate");
        fit.sup_norm.push_back(sup);
        fit.inf_det.push_back(inf);
        if (sup > 0 && inf > 0) {
            log_t.push_back(std::log(t));
            log_sup.push_back(std::log(sup));
            log_inf.push_back(std::log(inf));
        }
    }
    if (log_t.size() < 2) throw std::runtime_error("fit_growth_exponents: too few usable grid points");
    auto [lam, lam_res] = fit_line(log_t, log_sup);
    auto [mu, mu_res] = fit_line(log_t, log_inf);
    fit.lambda_hat = lam;
    fit.lambda_residual = lam_res;
    fit.mu_hat = mu;
    fit.mu_residual = mu_res;
    fit.power_law = lam_res <= 0.1 && mu_res <= 0.1;
    return fit;
}

}  // namespace derham
