#pragma once

// Frobenius and knowledgeable Frobenius algebras given by structure
// constants, axiom verification, window elements, idempotents, the state-sum
// construction, and the built-in example catalog.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "th/linalg.hpp"

namespace th::algebra {

using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rat;

enum class GradingMode { graded, filtered, none };

// Structure constants of a Frobenius algebra (A, mu, eta, Delta, eps).
//   mu[i][j][k]:    e_i * e_j = sum_k mu[i][j][k] e_k
//   delta[i][j][k]: Delta(e_i) = sum_{j,k} delta[i][j][k] e_j (x) e_k
// Internal degrees use the doubled convention throughout.
struct FrobeniusData {
    std::size_t dim = 0;
    std::vector<std::string> basis;
    std::vector<std::vector<std::vector<Rat>>> mu;
    std::vector<Rat> eta;
    std::vector<std::vector<std::vector<Rat>>> delta;
    std::vector<Rat> eps;
    std::vector<int> degrees;
    GradingMode grading = GradingMode::none;
    FieldSpec field;

    // canonicalize all coefficients into the field (residues for F_p)
    void normalize();

    Matrix mu_matrix() const;    // dim x dim^2, column index i*dim+j
    Matrix delta_matrix() const; // dim^2 x dim
    Matrix eta_matrix() const;   // dim x 1
    Matrix eps_matrix() const;   // 1 x dim
    Matrix left_mult(const std::vector<Rat>& a) const;  // x -> a*x
    Matrix right_mult(const std::vector<Rat>& a) const; // x -> x*a
    std::vector<Rat> basis_vector(std::size_t i) const;

    bool is_commutative() const;
    bool is_symmetric() const; // eps(xy) = eps(yx)
};

// (A, C, iota, iota_star): A symmetric, C commutative, iota: C -> A,
// iota_star: A -> C, subject to knowledge, duality and Cardy.
struct KnowledgeableFrobenius {
    FrobeniusData A;
    FrobeniusData C;
    Matrix iota;      // dim(A) x dim(C)
    Matrix iota_star; // dim(C) x dim(A)
};

struct AxiomCheck {
    std::string name;
    bool ok = true;
    std::string detail; // first failing tensor index when !ok
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    bool ok() const;
    const AxiomCheck* find(const std::string& name) const;
    std::string summary() const;
};

AxiomReport validate_frobenius(const FrobeniusData& f);
AxiomReport validate_knowledgeable(const KnowledgeableFrobenius& k);

struct BarNatanFlags {
    bool S = false, T = false, fourTu = false;
};
BarNatanFlags check_barnatan(const FrobeniusData& c);

struct Window {
    std::vector<Rat> a;
    std::optional<std::vector<Rat>> inverse;
};
Window window(const FrobeniusData& f);

bool is_strongly_separable(const FrobeniusData& f);

// The central idempotent p = (a^{-1} .) mu tau Delta as a dim x dim matrix.
Matrix central_idempotent(const FrobeniusData& f);

KnowledgeableFrobenius state_sum_kfrob(const FrobeniusData& f);

// P_{jl} and Q_{jl}: A^{(x)l} -> A^{(x)j} (Prop 2.9 of the construction).
std::pair<Matrix, Matrix> idempotents_PQ(const FrobeniusData& f, int j, int l);

AxiomReport check_euler_degrees(const KnowledgeableFrobenius& k);
AxiomReport check_euler_degrees_single(const FrobeniusData& f,
                                       const std::string& prefix, int scale);

KnowledgeableFrobenius associated_graded(const KnowledgeableFrobenius& k);
FrobeniusData opposite(const FrobeniusData& f);

// What the tangle pipeline consumes: circles always use C; arcs need the
// full knowledgeable structure.
struct TangleAlgebra {
    std::optional<FrobeniusData> A;
    FrobeniusData C;
    std::optional<Matrix> iota, iota_star;
    bool knowledgeable() const { return A.has_value(); }
};
TangleAlgebra to_tangle_algebra(const KnowledgeableFrobenius& k);
TangleAlgebra to_tangle_algebra(const FrobeniusData& c_only);

using Builtin = std::variant<FrobeniusData, KnowledgeableFrobenius>;

struct BuiltinParams {
    Rat h = Rat(0), t = Rat(0), alpha = Rat(1);
    long long m = 2; // matrix-algebra size
};

// name in {c_ht, khovanov_pair, truncated_poly, modp_X, barnatan_pair,
// lee_pair, matrix, quaternion, m2k_plus_k, hk_plus_k}.  With enforce=true
// (the default) a characteristic outside an example's stated constraint is
// an input_error; enforce=false builds the raw structure constants anyway
// so axiom failures can be demonstrated (e.g. Cardy in odd characteristic).
Builtin builtin(const std::string& name, FieldSpec field,
                const BuiltinParams& params = {}, bool enforce = true);
std::vector<std::string> builtin_names();

// Versioned JSON import/export of FrobeniusData (rationals as "n/d" strings
// for characteristic 0, residues as integers for F_p).
std::string frobenius_to_json(const FrobeniusData& f);
FrobeniusData frobenius_from_json(const std::string& text);

} // namespace th::algebra
