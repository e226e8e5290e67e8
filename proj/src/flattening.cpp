#include "derham/flattening.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derham {

namespace {

constexpr double kRegionTol = 1e-9;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// q - (q . lambda) lambda
std::vector<double> project_out(const std::vector<double>& q, const std::vector<double>& lambda) {
    double s = dot(q, lambda);
    std::vector<double> out(q);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= s * lambda[i];
    return out;
}

std::vector<double> axpy(std::vector<double> x, double a, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += a * y[i];
    return x;
}

void require_unit(const std::vector<double>& lambda, const char* who) {
    if (std::abs(norm(lambda) - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": direction is not unit");
}

// deterministic orthonormal basis of lambda^perp (Gram-Schmidt over e_i)
std::vector<std::vector<double>> perp_basis(const std::vector<double>& lambda) {
    std::size_t n = lambda.size();
    std::vector<std::vector<double>> vecs{lambda};
    for (std::size_t i = 0; i < n && vecs.size() < n; ++i) {
        std::vector<double> v(n, 0.0);
        v[i] = 1.0;
        for (const auto& u : vecs) v = axpy(std::move(v), -dot(v, u), u);
        double len = norm(v);
        if (len < 1e-8) continue;
        for (double& c : v) c /= len;
        vecs.push_back(std::move(v));
    }
    vecs.erase(vecs.begin());
    return vecs;
}

}  // namespace

bool cone_membership(const std::vector<double>& q, const Cone& cone) {
    double len = norm(q);
    if (len == 0) return true;  // apex
    return dot(q, cone.lambda) >= cone.M * len;
}

std::vector<double> sample_cone(const Cone& cone, std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    for (;;) {
        std::vector<double> q(cone.lambda.size());
        for (double& c : q) c = gauss(rng);
        if (!cone_membership(q, cone)) continue;
        double scale = radius(rng);
        if (scale == 0) continue;
        double len = norm(q);
        if (len == 0) continue;
        for (double& c : q) c *= scale / len;
        return q;
    }
}

FlatteningMap::FlatteningMap(RegularFamily family) : family_(std::move(family)) {
    if (family_.ambient < 2) throw std::invalid_argument("flattening: ambient dimension < 2");
    if (family_.last_lambda.size() != family_.ambient)
        throw std::invalid_argument("flattening: lambda dimension mismatch");
    require_unit(family_.last_lambda, "flattening");
    for (const FamilyStage& s : family_.stages) {
        if (s.lambda.size() != family_.ambient)
            throw std::invalid_argument("flattening: lambda dimension mismatch");
        require_unit(s.lambda, "flattening");
    }
    first_lambda_ = family_.stages.empty() ? family_.last_lambda : family_.stages.front().lambda;
    basis_ = perp_basis(first_lambda_);
}

std::size_t FlatteningMap::stage_count() const { return family_.stages.size() + 1; }

// base-stage isometry q -> (basis coordinates of pi(q); q . lambda_1)
std::vector<double> FlatteningMap::below_map(const std::vector<double>& q) const {
    std::vector<double> out;
    out.reserve(q.size());
    for (const auto& b : basis_) out.push_back(dot(b, q));
    out.push_back(dot(first_lambda_, q));
    return out;
}

std::size_t FlatteningMap::stage_of(const std::vector<double>& q) const {
    const FuncDesc& zeta1 =
        family_.stages.empty() ? family_.last_xi : family_.stages.front().zeta;
    const std::vector<double>& l1 = first_lambda_;
    if (dot(q, l1) <= zeta1(project_out(q, l1)) + kRegionTol) return 0;
    for (std::size_t k = 0; k < family_.stages.size(); ++k) {
        const FamilyStage& s = family_.stages[k];
        if (dot(q, s.lambda) <= s.zeta_prime(project_out(q, s.lambda)) + kRegionTol) return k + 1;
    }
    return stage_count();
}

std::vector<double> FlatteningMap::forward(const std::vector<double>& q) const {
    std::vector<double> cur = q;
    std::size_t stage = stage_of(cur);
    double carried = 0;  // shear offsets accumulated along the last target coordinate
    while (stage > 0) {
        const std::vector<double>& lambda =
            stage <= family_.stages.size() ? family_.stages[stage - 1].lambda : family_.last_lambda;
        const FuncDesc& graph_fn =
            stage <= family_.stages.size() ? family_.stages[stage - 1].zeta : family_.last_xi;
        std::vector<double> x = project_out(cur, lambda);
        double z = graph_fn(x);
        carried += dot(cur, lambda) - z;
        cur = axpy(std::move(x), z, lambda);
        std::size_t next = stage_of(cur);
        if (next >= stage)
            throw std::runtime_error("flattening: region membership inconsistent at a boundary");
        stage = next;
    }
    std::vector<double> image = below_map(cur);
    image.back() += carried;
    return image;
}

double FlatteningMap::eta(std::size_t k, const std::vector<double>& x_prime) const {
    if (k == 0 || k > stage_count()) throw std::invalid_argument("eta: stage out of range");
    // point of the target hyperplane with the requested leading coordinates
    std::vector<double> q(family_.ambient, 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i) q = axpy(std::move(q), x_prime[i], basis_[i]);
    const FuncDesc& zeta1 =
        family_.stages.empty() ? family_.last_xi : family_.stages.front().zeta;
    double height = zeta1(q);  // q is already in lambda_1^perp
    std::vector<double> foot = axpy(std::move(q), height, first_lambda_);
    for (std::size_t j = 1; j < k; ++j) {
        const FamilyStage& s = family_.stages[j - 1];
        std::vector<double> x = project_out(foot, s.lambda);
        double gap = s.zeta_prime(x) - s.zeta(x);
        height += gap;
        foot = axpy(std::move(x), dot(foot, s.lambda) + gap, s.lambda);
    }
    return height;
}

std::vector<double> FlatteningMap::inverse(const std::vector<double>& p) const {
    std::vector<double> x_prime(p.begin(), p.end() - 1);
    double y = p.back();

    // walk the feet of the image graphs over x_prime until y is passed
    std::vector<double> q(family_.ambient, 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i) q = axpy(std::move(q), x_prime[i], basis_[i]);
    const FuncDesc& zeta1 =
        family_.stages.empty() ? family_.last_xi : family_.stages.front().zeta;
    double height = zeta1(q);
    if (y <= height + kRegionTol) {
        // base stage: inverse of the isometry
        return axpy(std::move(q), y, first_lambda_);
    }
    std::vector<double> foot = axpy(std::move(q), height, first_lambda_);
    for (const FamilyStage& s : family_.stages) {
        std::vector<double> x = project_out(foot, s.lambda);
        double lo = dot(foot, s.lambda);
        double gap = s.zeta_prime(x) - s.zeta(x);
        if (y <= height + gap + kRegionTol) return axpy(std::move(x), lo + (y - height), s.lambda);
        height += gap;
        foot = axpy(std::move(x), lo + gap, s.lambda);
    }
    std::vector<double> x = project_out(foot, family_.last_lambda);
    return axpy(std::move(x), dot(foot, family_.last_lambda) + (y - height), family_.last_lambda);
}

FlatteningMap build_flattening(RegularFamily family) { return FlatteningMap(std::move(family)); }

ConeCheckReport graph_cone_bound(const FuncDesc& xi, const Cone& cone, std::size_t samples,
                                 unsigned seed) {
    require_unit(cone.lambda, "graph_cone_bound");
    ConeCheckReport report;
    report.m_prime = cone.M / (1.0 + xi.lipschitz);
    report.axis.assign(cone.lambda.size() + 1, 0.0);
    for (std::size_t i = 0; i < cone.lambda.size(); ++i) report.axis[i] = cone.lambda[i];
    Cone target{report.axis, report.m_prime};
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> x = sample_cone(cone, rng);
        std::vector<double> graph_point(x);
        graph_point.push_back(xi(x));
        ++report.samples;
        if (!cone_membership(graph_point, target)) {
            ++report.violations;
            if (report.witness.empty()) report.witness = graph_point;
        }
    }
    return report;
}

ConeCheckReport tilted_cone_bound(const std::vector<double>& lambda, double M,
                                  std::size_t samples, unsigned seed) {
    require_unit(lambda, "tilted_cone_bound");
    std::size_t n = lambda.size();
    double tilt = lambda[n - 1];
    if (tilt <= 0) throw std::invalid_argument("tilted_cone_bound: lambda . e_last must be positive");
    double eps = 1.0 - tilt;
    double A = -lambda[0] / tilt;
    std::vector<double> v(n, 0.0);
    v[0] = 1.0;
    v[n - 1] = A;
    double vlen = norm(v);

    ConeCheckReport report;
    report.m_prime = eps == 0 ? M : (M - std::sqrt(2 * eps) / (1.0 - eps)) / vlen;
    for (double& c : v) c /= vlen;
    report.axis = v;
    if (report.m_prime <= 0) {
        report.vacuous = true;  // inclusion holds but carries no information
        return report;
    }
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    Cone source{e1, M}, target{report.axis, report.m_prime};
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> q = sample_cone(source, rng);
        ++report.samples;
        if (!cone_membership(q, target)) {
            ++report.violations;
            if (report.witness.empty()) report.witness = q;
        }
    }
    return report;
}

BiLipschitzEstimate bilipschitz_estimate(const FlatteningMap& h,
                                         const std::vector<std::pair<double, double>>& box,
                                         std::size_t pairs, unsigned seed) {
    std::mt19937 rng(seed);
    auto draw = [&]() {
        std::vector<double> q(box.size());
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] = std::uniform_real_distribution<double>(box[i].first, box[i].second)(rng);
        return q;
    };
    BiLipschitzEstimate est;
    est.c1 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pairs; ++i) {
        std::vector<double> p = draw(), q = draw();
        std::vector<double> d(p.size());
        for (std::size_t j = 0; j < p.size(); ++j) d[j] = p[j] - q[j];
        double den = norm(d);
        if (den < 1e-12) continue;
        std::vector<double> hp = h.forward(p), hq = h.forward(q);
        for (std::size_t j = 0; j < p.size(); ++j) d[j] = hp[j] - hq[j];
        double ratio = norm(d) / den;
        est.c1 = std::min(est.c1, ratio);
        est.c2 = std::max(est.c2, ratio);
    }
    est.degenerate = est.c1 < 1e-9;
    return est;
}

ConeCheckReport flatten_cone_check(const FlatteningMap& h,
                                   const std::function<std::vector<double>(std::mt19937&)>& sampler,
                                   const Cone& cone, std::size_t samples, unsigned seed) {
    const RegularFamily& fam = h.family();
    ConeCheckReport report;
    // consume the tilt + graph constants stage by stage, then the final
    // change of direction and the image-graph Lipschitz budget
    double m = cone.M;
    double eta_lipschitz = fam.last_xi.lipschitz;
    for (const FamilyStage& s : fam.stages) {
        m = tilted_cone_bound(s.lambda, m, 0, seed).m_prime;
        m /= 1.0 + s.zeta.lipschitz;
        eta_lipschitz += s.zeta.lipschitz + s.zeta_prime.lipschitz;
    }
    m = tilted_cone_bound(fam.last_lambda, m, 0, seed).m_prime;
    m /= 1.0 + eta_lipschitz;
    report.m_prime = m;
    report.axis.assign(fam.ambient, 0.0);
    report.axis[0] = 1.0;
    if (m <= 0) {
        report.vacuous = true;
        return report;
    }
    Cone target{report.axis, m};
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        std::vector<double> q = sampler(rng);
        if (!cone_membership(q, cone))
            throw std::invalid_argument("flatten_cone_check: sample outside the input cone");
        ++report.samples;
        if (!cone_membership(h.forward(q), target)) {
            ++report.violations;
            if (report.witness.empty()) {
                report.witness = q;
                report.witness_stage = h.stage_of(q);
            }
        }
    }
    return report;
}

bool vertical_line_test(std::vector<std::vector<double>> points, double xy_tol, double z_tol) {
    std::sort(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (points[j][0] - points[i][0] > xy_tol) break;
            bool same_base = true;
            for (std::size_t c = 0; c + 1 < points[i].size() && same_base; ++c)
                same_base = std::abs(points[i][c] - points[j][c]) <= xy_tol;
            if (same_base && std::abs(points[i].back() - points[j].back()) > z_tol) return false;
        }
    }
    return true;
}

}  // namespace derham
