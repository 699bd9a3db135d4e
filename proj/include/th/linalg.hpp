#pragma once

// Exact dense linear algebra over prime fields F_p and the rationals.
// Homology ranks are integers, so all arithmetic is exact: machine-word
// residues for F_p and arbitrary-precision rationals for characteristic 0.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "th/common.hpp"

namespace th::linalg {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;

// characteristic 0 means the rationals; otherwise a prime.
struct FieldSpec {
    long long ch = 0;
    bool operator==(const FieldSpec&) const = default;
};

bool is_prime(long long n);
void validate_field(const FieldSpec& f); // throws input_error unless ch==0 or prime

// Residue of an exact rational in F_p (throws compute_error if the
// denominator vanishes mod p).
long long residue(const Rat& x, long long p);
long long mod_inverse(long long a, long long p);

// Canonical in-field form: for F_p an integer in [0,p) (as a Rat with
// denominator 1), for Q the reduced rational itself.
Rat to_field(const FieldSpec& f, const Rat& x);

// Dense matrix with field-tagged exact entries.  Values are immutable in
// spirit: all mutating members are used only during construction; every
// query is pure and safe to call concurrently.
class Matrix {
  public:
    Matrix() = default;
    Matrix(FieldSpec f, std::size_t rows, std::size_t cols);
    static Matrix identity(FieldSpec f, std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const FieldSpec& field() const { return field_; }

    Rat at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, const Rat& v);
    void add_at(std::size_t r, std::size_t c, const Rat& v);
    bool entry_nonzero(std::size_t r, std::size_t c) const;

    Matrix operator*(const Matrix& rhs) const;
    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix scaled(const Rat& c) const;
    bool operator==(const Matrix& rhs) const;
    bool is_zero() const;
    std::size_t nnz() const;

    Matrix transpose() const;
    Matrix hcat(const Matrix& rhs) const;               // [this | rhs]
    Matrix vcat(const Matrix& rhs) const;               // [this ; rhs]
    Matrix columns(const std::vector<std::size_t>& idx) const;
    Matrix rowsel(const std::vector<std::size_t>& idx) const;
    Matrix kron(const Matrix& rhs) const;               // Kronecker product
    std::vector<Rat> apply(const std::vector<Rat>& v) const;

    // Full row reduction (RREF) in place.  Pivot order is deterministic:
    // columns left to right, first nonzero row from the top.  Returns the
    // pivot column indices.  `parallel` enables the OpenMP elimination
    // kernel; results are bitwise identical either way (exact arithmetic,
    // row updates are independent).
    std::vector<std::size_t> rref_inplace(bool parallel = false);

    std::size_t rank(bool parallel = false) const;
    Matrix kernel(bool parallel = false) const; // columns form a kernel basis

    // One solution X of this*X = B, or nullopt if inconsistent.
    std::optional<Matrix> solve(const Matrix& b, bool parallel = false) const;

    std::string str() const; // small-matrix debugging aid

  private:
    FieldSpec field_{};
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<long long> dp_; // entries when ch > 0
    std::vector<Rat> dq_;       // entries when ch == 0
};

// dim(span_a + span_b) - dim(span_b), both given by generator columns.
// This is the rank of span_a's image in the quotient by span_b.
std::size_t image_membership_rank(const Matrix& span_a, const Matrix& span_b,
                                  bool parallel = false);

} // namespace th::linalg
