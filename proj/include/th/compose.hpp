#pragma once

// Local tangle calculus for strongly separable algebras: bimodule-complex
// building blocks for arcs and crossings, coequalizer gluing (tensor over
// A), cell-by-cell composition along the slice grid, and verification
// against the global tangle complex.

#include <string>
#include <vector>

#include "th/complex.hpp"

namespace th::compose {

using algebra::FrobeniusData;
using algebra::KnowledgeableFrobenius;
using complex::FilteredChainComplex;
using linalg::Matrix;
using linalg::Rat;

// One A-action per boundary point.  '-' points carry left actions, '+'
// points right ones.  act[i] maps A (x) C^i -> C^i as a matrix of shape
// dim_i x (dim_A * dim_i) with column index a*dim_i + v; for right actions
// the stored map is rho composed with the flip, i.e. column (a, v)
// represents rho(v (x) a).
struct BoundaryAction {
    tangle::Point point;
    bool is_plus = false;
    std::vector<Matrix> act; // aligned with the complex terms
};

// Cube of resolutions kept in "model form": every vertex is a tensor
// product of one A-factor per arc component and one C-factor per circle
// component, with the crossing grading shifts folded into a per-vertex
// shift.  Gluing in model form transports the coequalizers through the
// strip-map isomorphisms (iterated multiplication on chains of arcs, the
// window-normalized trace on circles), which keeps the internal degrees of
// every glued complex aligned with the global pipeline.
struct ModelFactor {
    bool is_circle = false;
    tangle::Point minus_end, plus_end; // arc factors only
};

struct ModelVertex {
    std::vector<ModelFactor> factors;
    int shift = 0; // accumulated crossing grading shift (doubled degrees)
};

struct ModelContext {
    FrobeniusData a;     // the acting algebra (A^op when epsilon = -1)
    FrobeniusData c;     // the circle algebra
    Matrix iota, iota_star;
    bool valid = false;
};

struct ModelCube {
    ModelContext ctx;
    std::vector<int> signs;          // crossing signs, in slice order
    std::vector<ModelVertex> verts;  // indexed by the alpha bitmask
    // edges[j][alpha]: vert alpha -> vert alpha | 1<<j (bit j clear)
    std::vector<std::vector<Matrix>> edges;
    bool valid = false;
};

struct BimoduleComplex {
    FilteredChainComplex cx;
    std::vector<BoundaryAction> boundary;
    std::size_t dim_a = 0; // dimension of the acting algebra
    ModelCube model;       // carried by blocks and composed complexes
};

enum class CellKind { arc, crossing };

// An arc cell, or the crossing cell of diagram crossing `crossing_index`.
// Arc endpoints and their signs are supplied by the caller.
BimoduleComplex arc_block(const FrobeniusData& a, tangle::Point minus_pt,
                          tangle::Point plus_pt);

BimoduleComplex crossing_block(const FrobeniusData& a, const tangle::Crossing& c,
                               int epsilon);

// Tensor product of complexes with Koszul signs; boundary lists concatenate.
BimoduleComplex tensor_bimodule(const BimoduleComplex& x, const BimoduleComplex& y);

// Quotient by the span of rho_plus(m (x) a) - lambda_minus(a (x) m); the two
// glued points disappear.  Throws on sign mismatch; ill-defined induced maps
// are internal errors.
BimoduleComplex coequalize(const BimoduleComplex& c, std::size_t plus_index,
                           std::size_t minus_index);

// The unit for tensor_bimodule: one-dimensional complex in degree 0.
BimoduleComplex unit_bimodule(linalg::FieldSpec field);

// Cell-by-cell composition along the slice grid; requires A strongly
// separable (throws compute_error("NotStronglySeparable") otherwise).
BimoduleComplex compose_tangle(const tangle::TangleDiagram& t, int epsilon,
                               const KnowledgeableFrobenius& k);

// Term dimensions per (cohomological degree, internal degree) and bigraded
// homology rank tables agree with the global pipeline.
bool verify_composition(const tangle::TangleDiagram& t, int epsilon,
                        const KnowledgeableFrobenius& k,
                        std::string* detail = nullptr);

// Tensor of the two complexes followed by one coequalizer per matched pair
// of boundary points; each pair must carry opposite signs (SignMismatch).
// When both inputs carry a valid model cube the gluing is performed on the
// cubes and re-totalized, so internal degrees match the global pipeline.
BimoduleComplex glue_tangles(
    const BimoduleComplex& c1, const BimoduleComplex& c2,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching);

} // namespace th::compose
