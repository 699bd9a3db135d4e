#pragma once

// Realization of tangle cubes as linear maps, signed total complexes,
// bigraded/filtered homology, polynomials, Euler characteristics, spectral
// sequence pages, and the independent link oracles.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "th/algebra.hpp"
#include "th/tangle.hpp"

namespace th::complex {

using algebra::AxiomReport;
using algebra::FrobeniusData;
using algebra::GradingMode;
using algebra::TangleAlgebra;
using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rat;

struct GradedSpace {
    FieldSpec field;
    std::vector<int> degrees; // internal degree per generator (doubled)
    std::vector<std::string> labels;
    std::size_t dim() const { return degrees.size(); }
};

// terms[i] sits in cohomological degree r_min + i;
// diffs[i] : terms[i] -> terms[i+1].
struct FilteredChainComplex {
    FieldSpec field;
    GradingMode mode = GradingMode::graded;
    int r_min = 0;
    std::vector<GradedSpace> terms;
    std::vector<Matrix> diffs;

    int r_max() const { return r_min + (int)terms.size() - 1; }
    const GradedSpace* term_at(int r) const;
    Matrix diff_at(int r) const; // zero map when out of range
};

struct BigradedDims {
    std::map<std::pair<int, int>, std::size_t> ranks; // (k, r) -> rank
    bool operator==(const BigradedDims&) const = default;
    std::size_t at(int k, int r) const;
    std::size_t total() const;
    std::string table() const; // human-readable rank table
};

// Sum of c * t^r * A^k terms.
struct Polynomial2 {
    std::map<std::pair<int, int>, long long> coeff; // (r, k) -> c, nonzero
    bool operator==(const Polynomial2&) const = default;
    std::string str() const; // canonical string
};

using LaurentA = std::map<int, long long>; // A-exponent -> coefficient
std::string laurent_str(const LaurentA& p);

struct RealizedCube {
    tangle::TangleCube cube;
    TangleAlgebra alg;           // with A replaced by A^op when epsilon = -1
    GradingMode mode = GradingMode::graded;
    std::vector<GradedSpace> vertex_spaces;      // per alpha, shift 2|alpha|
    std::vector<std::vector<Matrix>> edge_maps;  // parallel to cube.edges_from
};

RealizedCube realize_cube(const tangle::TangleCube& cube,
                          const TangleAlgebra& alg, bool parallel = false);

// check_squares: verify unsigned cube faces commute (NonCommutingSquare).
FilteredChainComplex total_complex(const RealizedCube& rc,
                                   bool check_squares = false);

// build_cube + realize_cube + total_complex.
FilteredChainComplex tangle_complex(const tangle::TangleDiagram& t,
                                    const TangleAlgebra& alg, int epsilon,
                                    bool parallel = false);

AxiomReport verify_complex(const FilteredChainComplex& c);

BigradedDims homology_bigraded(const FilteredChainComplex& c,
                               bool parallel = false);

Polynomial2 poincare_polynomial(const BigradedDims& dims);

LaurentA graded_euler_characteristic(const FilteredChainComplex& c);

// Kauffman bracket of a link diagram in the variable A (q = A^2), via an
// independent sweep-based circle counter.
LaurentA kauffman_bracket(const tangle::TangleDiagram& t);

struct SpectralPage {
    int r = 0;
    BigradedDims dims;                                // (k, cohom degree)
    std::map<std::pair<int, int>, std::size_t> d_ranks; // rank of d_r out of (k, rc)
};

SpectralPage spectral_page(const FilteredChainComplex& c, int r,
                           bool parallel = false);

// Keep only the degree-preserving part of each differential (the E_0 page
// as a graded complex).
FilteredChainComplex degreewise_truncation(const FilteredChainComplex& c);

// Second, independent pipeline for link diagrams over a commutative
// Frobenius algebra (merge/split bookkeeping via a sweep, not union-find).
BigradedDims khovanov_link_oracle(const tangle::TangleDiagram& t,
                                  const FrobeniusData& c);

} // namespace th::complex
