#pragma once

#include "derham/numeric_form.hpp"
#include "derham/piecewise.hpp"
#include "derham/simplicial.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>

namespace derham {

// A cover together with its nerve and star-shaped base points for every
// intersection, the setting of the double-complex machinery.
struct CechComplex {
    std::shared_ptr<const SimplicialComplex> owner;  // keeps K alive
    const SimplicialComplex* K = nullptr;
    Cover cover;
    SimplicialComplex nerve_complex;

    static CechComplex over_star_cover(SimplicialComplex K);

    // Star-shaped base point of U_I (interior barycenter of the spanned
    // simplex; the vertex itself for singletons).
    std::vector<Rational> tuple_base(const Simplex& I) const;
};

// Čech cochain with values in F (PolyForm in ambient coordinates, or
// PiecewiseForm during descent). Values stored on sorted nerve tuples;
// unsorted access picks up the permutation sign.
template <class F>
struct CechCochain {
    std::size_t cech_degree = 0;  // l: values on (l+1)-tuples
    std::size_t form_degree = 0;
    std::map<Simplex, F> values;

    void set(Simplex I, F v) {
        int sign = sort_sign(I);
        if (sign == 0) return;
        if (sign == -1) v = -v;
        if (v.is_zero())
            values.erase(I);
        else
            values[I] = std::move(v);
    }

    F value(Simplex I) const {
        int sign = sort_sign(I);
        if (sign == 0) return F{};
        auto it = values.find(I);
        if (it == values.end()) return F{};
        return sign == 1 ? it->second : -it->second;
    }

    bool is_zero() const {
        for (const auto& [I, v] : values)
            if (!v.is_zero()) return false;
        return true;
    }
};

using PolyCochain = CechCochain<PolyForm>;
using PiecewiseCochain = CechCochain<PiecewiseForm>;

PolyCochain cech_delta(const PolyCochain& phi, const CechComplex& C);
PiecewiseCochain cech_delta(const PiecewiseCochain& phi, const CechComplex& C);

// Element of the total complex, graded by Čech degree l; the form degree of
// the part at l is total_degree - l.
struct TotalElement {
    std::size_t total_degree = 0;
    std::map<std::size_t, PolyCochain> parts;
};

// D = d + (-1)^l delta.
TotalElement total_differential(const TotalElement& e, const CechComplex& C);

// xi^0 with d xi^0_i = omega on U_i, by radial integration from each base
// point. Throws when omega is not closed.
PolyCochain localize(const PolyForm& omega, const CechComplex& C);

struct ZigzagOptions {
    // When set, each rung value is shifted by a random valid gauge term
    // (an exact form, or constants at the last rung).
    std::mt19937* gauge_rng = nullptr;
};

struct ZigzagState {
    std::vector<PolyCochain> rungs;        // xi^0 .. xi^{k-1}
    std::map<Simplex, Rational> constants; // final delta xi^{k-1}, Čech degree k
};

ZigzagState zigzag(const PolyForm& omega, const CechComplex& C, const ZigzagOptions& opts = {});

// Pairing of the final constant cochain with a nerve cycle, Remark-style
// sign (-1)^{floor(k/2)}.
Rational integrate_over_cycle(const PolyForm& omega, const Chain& cycle, const CechComplex& C,
                              const ZigzagOptions& opts = {});

struct ConstantSolveResult {
    bool ok = false;
    std::map<Simplex, Rational> solution;  // cochain one Čech degree down
    Chain certificate;                     // nerve cycle with nonzero period
    Rational period;
};

// Solve delta c = g for constant cochains on the nerve, g of Čech degree
// `degree`. For degree 1 the solution is gauge-fixed to 0 at the lowest
// vertex of each nerve component.
ConstantSolveResult solve_constants(const std::map<Simplex, Rational>& g, std::size_t degree,
                                    const CechComplex& C);

struct PrimitiveResult {
    bool ok = false;
    PiecewiseForm primitive;
    Chain offending_cycle;  // when a period obstructs
    Rational period;
    double norm_ratio = 0;  // ||xi||_p / ||omega||_p when requested
};

// Descends the zig-zag ladder with the hat partition of unity, producing a
// global primitive when all periods vanish. p <= 0 skips the norm report.
PrimitiveResult global_primitive(const PolyForm& omega, const CechComplex& C, double p = 0);

// Numeric degree-1 path: primitives by straight-segment quadrature from the
// base points, overlap constants read off at edge barycenters. A gauge rng
// shifts each local primitive by a random constant (the cycle pairing is
// insensitive to it).
double integrate_over_cycle_numeric(const NumericForm& omega, const Chain& cycle,
                                    const CechComplex& C, double tol = 1e-10,
                                    std::mt19937* gauge_rng = nullptr);

struct NumericPeriodCheck {
    bool ok = true;
    Chain offending_cycle;
    double period = 0;
};

// Periods over a homology basis of nerve 1-cycles; refuses (with the
// offending generator) when any exceeds tol in magnitude.
NumericPeriodCheck check_periods_numeric(const NumericForm& omega, const CechComplex& C,
                                         double tol = 1e-6);

}  // namespace derham
