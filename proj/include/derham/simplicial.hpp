#pragma once

#include "derham/rational.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace derham {

// Sorted vertex-index tuple; orientation carried separately as a sign.
using Simplex = std::vector<int>;

// Finite oriented simplicial complex with a rational geometric realization.
struct SimplicialComplex {
    std::vector<std::vector<Rational>> vertices;  // coordinates per vertex
    std::set<Simplex> simplices;                  // face-closed, sorted tuples

    // Builds from maximal simplices, closing under faces. Accepts unsorted
    // vertex tuples.
    static SimplicialComplex build(std::vector<std::vector<Rational>> vertices,
                                   const std::vector<Simplex>& maximal);

    bool has_simplex(Simplex s) const;  // sorts the input
    std::size_t dim() const;
    std::vector<Simplex> simplices_of_dim(std::size_t k) const;
    std::vector<Rational> barycenter(const Simplex& s) const;
    std::size_t ambient_dim() const { return vertices.empty() ? 0 : vertices[0].size(); }
};

// Formal rational combination of oriented simplices; tuples stored sorted,
// arbitrary input order contributes its permutation sign.
class Chain {
public:
    Chain() = default;

    void add(Simplex s, const Rational& c);
    const std::map<Simplex, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Rational coefficient(Simplex s) const;  // signed; sorts the input

    Chain operator-() const;
    Chain& operator+=(const Chain& rhs);
    Chain& operator-=(const Chain& rhs);
    friend Chain operator+(Chain a, const Chain& b) { return a += b; }
    friend Chain operator-(Chain a, const Chain& b) { return a -= b; }
    Chain& operator*=(const Rational& c);
    friend Chain operator*(const Rational& c, Chain a) { return a *= c; }
    bool operator==(const Chain& rhs) const { return terms_ == rhs.terms_; }

    std::string str() const;

private:
    std::map<Simplex, Rational> terms_;
};

Chain boundary(const Chain& c);

// Open cover by unions of open vertex stars, each piece with a star-shaped
// base point.
struct Cover {
    const SimplicialComplex* complex = nullptr;
    std::vector<std::vector<int>> piece_stars;        // star centers per piece
    std::vector<std::vector<Rational>> base_points;   // one per piece

    // Nonempty-intersection test for a set of piece indices, decided
    // combinatorially through shared open simplices.
    bool pieces_intersect(const std::vector<int>& piece_ids) const;
};

// One piece per vertex: the open star of that vertex, based at the vertex.
Cover star_cover(const SimplicialComplex& K);

// Nerve of the cover as a simplicial complex realized at the base points.
SimplicialComplex nerve(const Cover& cover);

struct HomologyResult {
    std::size_t betti = 0;
    std::vector<Chain> cycle_basis;  // representatives of a homology basis
};

// Rank of ker d_k / im d_{k+1} over the rationals, by exact elimination.
HomologyResult homology(const SimplicialComplex& K, std::size_t degree);

// Catalog complexes used across the test suites. All coordinates rational.
SimplicialComplex complex_point();
SimplicialComplex complex_interval();
SimplicialComplex complex_circle();               // triangle boundary
SimplicialComplex complex_disk();                 // full 2-simplex
SimplicialComplex complex_tetrahedron_boundary();
SimplicialComplex complex_cylinder();
SimplicialComplex complex_square_annulus();       // outer +-2, inner +-1 box ring

std::string serialize_complex(const SimplicialComplex& K);
SimplicialComplex deserialize_complex(const std::string& json_text);

}  // namespace derham
