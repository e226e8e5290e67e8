#include "derham/numeric_form.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace derham {

NumericForm NumericForm::from_poly(const PolyForm& omega) {
    if (omega.has_param_t())
        throw std::invalid_argument("NumericForm: parameter forms not supported");
    NumericForm out;
    out.n_vars = omega.n_vars();
    out.degree = omega.degree();
    out.evaluator = [omega](const std::vector<double>& x) {
        std::map<IndexSet, double> table;
        for (const auto& [I, c] : omega.components()) table[I] = c.evaluate(x);
        return table;
    };
    return out;
}

double pointwise_norm(const NumericForm& omega, const std::vector<double>& x,
                      const ComassOptions& opts) {
    return comass_from_table(omega.evaluator(x), omega.n_vars, omega.degree, opts);
}

double comass_from_table(const std::map<IndexSet, double>& table, std::size_t n, std::size_t k,
                         const ComassOptions& opts) {
    if (k == 0) {
        auto it = table.find(IndexSet{});
        return it == table.end() ? 0.0 : std::abs(it->second);
    }
    if (k == 1) {
        double s = 0;
        for (const auto& [I, v] : table) s += v * v;
        return std::sqrt(s);
    }
    if (k == n) {
        IndexSet top(n);
        for (std::size_t i = 0; i < n; ++i) top[i] = static_cast<int>(i) + 1;
        auto it = table.find(top);
        return it == table.end() ? 0.0 : std::abs(it->second);
    }
    std::mt19937 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = 0;
    for (std::size_t iter = 0; iter < opts.frame_budget; ++iter) {
        std::vector<std::vector<double>> frame(k, std::vector<double>(n));
        bool degenerate = false;
        for (std::size_t c = 0; c < k && !degenerate; ++c) {
            for (std::size_t r = 0; r < n; ++r) frame[c][r] = gauss(rng);
            for (std::size_t p = 0; p < c; ++p) {
                double dot = 0;
                for (std::size_t r = 0; r < n; ++r) dot += frame[c][r] * frame[p][r];
                for (std::size_t r = 0; r < n; ++r) frame[c][r] -= dot * frame[p][r];
            }
            double norm = 0;
            for (std::size_t r = 0; r < n; ++r) norm += frame[c][r] * frame[c][r];
            norm = std::sqrt(norm);
            if (norm < 1e-12) {
                degenerate = true;
                break;
            }
            for (std::size_t r = 0; r < n; ++r) frame[c][r] /= norm;
        }
        if (degenerate) continue;
        best = std::max(best, std::abs(evaluate_on_frame(table, k, frame)));
    }
    return best;
}

namespace {

struct Integrand {
    const NumericForm& omega;
    const Curve& path;

    std::vector<double> velocity(double s) const {
        if (path.velocity) return path.velocity(s);
        const double h = 1e-6;
        std::vector<double> a = path.point(s - h);
        std::vector<double> b = path.point(s + h);
        std::vector<double> v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = (b[i] - a[i]) / (2 * h);
        return v;
    }

    double operator()(double s) const {
        std::vector<double> x = path.point(s);
        std::vector<double> v = velocity(s);
        std::map<IndexSet, double> table = omega.evaluator(x);
        double acc = 0;
        for (const auto& [I, c] : table) acc += c * v[static_cast<std::size_t>(I[0]) - 1];
        return acc;
    }
};

double simpson(double fa, double fm, double fb, double h) { return h * (fa + 4 * fm + fb) / 6; }

}  // namespace

double line_integral(const NumericForm& omega, const Curve& path, double tol,
                     std::size_t max_intervals) {
    if (omega.degree != 1) throw std::invalid_argument("line_integral: degree-1 forms only");
    Integrand f{omega, path};

    struct Segment {
        double a, b, fa, fm, fb, whole;
        std::size_t depth;
    };
    double a = path.s0, b = path.s1;
    double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    std::vector<Segment> stack{{a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), 0}};
    double total = 0;
    std::size_t used = 1;
    const std::size_t max_depth = 48;
    while (!stack.empty()) {
        Segment s = stack.back();
        stack.pop_back();
        double m = (s.a + s.b) / 2;
        double lm = (s.a + m) / 2, rm = (m + s.b) / 2;
        double flm = f(lm), frm = f(rm);
        double left = simpson(s.fa, flm, s.fm, m - s.a);
        double right = simpson(s.fm, frm, s.fb, s.b - m);
        double err = left + right - s.whole;
        // Local tolerance scaled by interval fraction of the whole range.
        double local_tol = tol * (s.b - s.a) / (b - a);
        if (std::abs(err) <= 15 * local_tol || s.depth >= max_depth) {
            if (s.depth >= max_depth && std::abs(err) > 15 * local_tol)
                throw std::runtime_error("line_integral: tolerance not reached (depth limit)");
            total += left + right + err / 15;
            continue;
        }
        used += 2;
        if (used > max_intervals)
            throw std::runtime_error("line_integral: tolerance not reached within budget");
        stack.push_back({s.a, m, s.fa, flm, s.fm, left, s.depth + 1});
        stack.push_back({m, s.b, s.fm, frm, s.fb, right, s.depth + 1});
    }
    return total;
}

}  // namespace derham
