#pragma once

#include "derham/form.hpp"
#include "derham/simplicial.hpp"

#include <map>
#include <optional>

namespace derham {

// Form given per top-dimensional simplex of a fixed complex; missing pieces
// are zero. Carrier for partition-of-unity products, which are only
// piecewise polynomial.
struct PiecewiseForm {
    const SimplicialComplex* K = nullptr;
    std::map<Simplex, PolyForm> pieces;  // key: top simplex (sorted)

    static PiecewiseForm zero(const SimplicialComplex& K);
    // The same polynomial form on every top simplex.
    static PiecewiseForm global(const SimplicialComplex& K, const PolyForm& omega);

    bool is_zero() const;
    const PolyForm& piece(const Simplex& top) const;  // zero if absent
    void set_piece(const Simplex& top, PolyForm value);

    PiecewiseForm operator-() const;
    PiecewiseForm& operator+=(const PiecewiseForm& rhs);
    PiecewiseForm& operator-=(const PiecewiseForm& rhs);
    friend PiecewiseForm operator+(PiecewiseForm a, const PiecewiseForm& b) { return a += b; }
    friend PiecewiseForm operator-(PiecewiseForm a, const PiecewiseForm& b) { return a -= b; }
    PiecewiseForm& operator*=(const Rational& c);
    bool operator==(const PiecewiseForm& rhs) const;
};

PiecewiseForm exterior_derivative(const PiecewiseForm& omega);
PiecewiseForm wedge(const PiecewiseForm& a, const PiecewiseForm& b);

// Barycentric hat function of a vertex: 1 at the vertex, 0 at the others,
// affine on each top simplex. Requires top simplices of full ambient
// dimension.
PiecewiseForm hat_function(const SimplicialComplex& K, int vertex);

// Exact solve A x = b over the rationals; nullopt when inconsistent.
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> A,
                                                  std::vector<Rational> b);

// L^p norm over the realization (full-dimensional 2-complexes): midpoint
// quadrature on a uniform refinement of each triangle.
double lp_norm(const PiecewiseForm& omega, double p, std::size_t refine = 4);

}  // namespace derham
