#pragma once

#include "derham/lifts.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace derham {

// C_n(lambda, M) = {q : q . lambda >= M |q|}; the apex q = 0 is a member.
struct Cone {
    std::vector<double> lambda;  // unit axis
    double M = 0;                // aperture cosine, in [0, 1)
};

bool cone_membership(const std::vector<double>& q, const Cone& cone);

// Gaussian-direction rejection sampler; radius uniform in (0, 1].
std::vector<double> sample_cone(const Cone& cone, std::mt19937& rng);

// Ordered family of hypersurfaces in R^{ambient}: stage k records the
// consecutive pair (H_k, H_{k+1}) as graphs relative to the same unit
// direction lambda_k of zeta <= zeta_prime. The last hypersurface H_b is the
// graph of last_xi relative to last_lambda. The zeta's are ambient-arity
// descriptors evaluated on points of the hyperplane lambda^perp.
struct FamilyStage {
    std::vector<double> lambda;
    FuncDesc zeta, zeta_prime;
};

struct RegularFamily {
    std::size_t ambient = 0;
    std::vector<FamilyStage> stages;  // b - 1 entries, may be empty
    std::vector<double> last_lambda;  // lambda_b
    FuncDesc last_xi;                 // H_b relative to lambda_b
};

// Stagewise piecewise map straightening every H_k to a graph over the last
// coordinate; each stage is a shear along a known direction, so the inverse
// is evaluated stagewise in closed form. Region membership at piece
// boundaries uses a 1e-9 band, ties resolved toward the lower stage.
class FlatteningMap {
public:
    explicit FlatteningMap(RegularFamily family);

    std::vector<double> forward(const std::vector<double>& q) const;
    std::vector<double> inverse(const std::vector<double>& p) const;

    // 0 = below H_1, k in 1..b-1 = between H_k and H_{k+1}, b = above H_b
    std::size_t stage_of(const std::vector<double>& q) const;

    // height of the image graph F_k = h(H_k) over the first ambient-1 target
    // coordinates, k in 1..b
    double eta(std::size_t k, const std::vector<double>& x_prime) const;

    std::size_t stage_count() const;  // b
    const RegularFamily& family() const { return family_; }

private:
    std::vector<double> below_map(const std::vector<double>& q) const;

    RegularFamily family_;
    std::vector<std::vector<double>> basis_;  // orthonormal basis of lambda_1^perp
    std::vector<double> first_lambda_;
};

FlatteningMap build_flattening(RegularFamily family);

struct ConeCheckReport {
    double m_prime = 0;
    bool vacuous = false;  // m_prime <= 0: inclusion carries no information
    std::size_t samples = 0, violations = 0;
    std::vector<double> witness;  // first violating sample, if any
    std::size_t witness_stage = 0;
    std::vector<double> axis;  // target cone axis
};

// Graph lemma: xi Lipschitz with constant L and xi(0) = 0 maps the cone
// C_n(e1, M) into C_{n+1}(e1, M/(1+L)); verified on seeded samples.
ConeCheckReport graph_cone_bound(const FuncDesc& xi, const Cone& cone, std::size_t samples,
                                 unsigned seed);

// Tilt lemma: for unit lambda with lambda . e_last >= 1 - eps, the direction
// v = e1 + A e_last, A = -(e1.lambda)/(e_last.lambda), spans lambda^perp over
// e1 and C(e1, M) is contained in C(v/|v|, M') with
// M' = (M - sqrt(2 eps)/(1 - eps)) / |v|.
ConeCheckReport tilted_cone_bound(const std::vector<double>& lambda, double M,
                                  std::size_t samples, unsigned seed);

struct BiLipschitzEstimate {
    double c1 = 0, c2 = 0;  // min/max of |h(p)-h(q)|/|p-q| over sampled pairs
    bool degenerate = false;  // c1 below 1e-9
};

BiLipschitzEstimate bilipschitz_estimate(const FlatteningMap& h,
                                         const std::vector<std::pair<double, double>>& box,
                                         std::size_t pairs, unsigned seed);

// Chains the tilt and graph constants across the stages to an explicit
// aperture M' with h(A) expected inside C(e1, M'), then verifies it on
// samples of A drawn from `sampler`.
ConeCheckReport flatten_cone_check(const FlatteningMap& h,
                                   const std::function<std::vector<double>(std::mt19937&)>& sampler,
                                   const Cone& cone, std::size_t samples, unsigned seed);

// No two points share their leading coordinates (within xy_tol) while
// differing in the last one by more than z_tol.
bool vertical_line_test(std::vector<std::vector<double>> points, double xy_tol, double z_tol);

}  // namespace derham
