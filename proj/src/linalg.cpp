#include "th/linalg.hpp"

#include <algorithm>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace th::linalg {

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void validate_field(const FieldSpec& f) {
    if (f.ch == 0 || is_prime(f.ch)) return;
    throw input_error("field characteristic must be 0 or a prime, got " +
                      std::to_string(f.ch));
}

long long mod_inverse(long long a, long long p) {
    // extended Euclid
    long long t = 0, newt = 1, r = p, newr = ((a % p) + p) % p;
    while (newr != 0) {
        long long q = r / newr;
        long long tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) throw compute_error("element not invertible mod " + std::to_string(p));
    return ((t % p) + p) % p;
}

namespace {

long long mod_of_int(const Int& n, long long p) {
    Int m = n % p;
    if (m < 0) m += p;
    return static_cast<long long>(m);
}

long long mulmod(long long a, long long b, long long p) {
    return static_cast<long long>((__int128)a * b % p);
}

} // namespace

long long residue(const Rat& x, long long p) {
    long long num = mod_of_int(x.numerator(), p);
    long long den = mod_of_int(x.denominator(), p);
    if (den == 0)
        throw compute_error("rational with denominator divisible by " + std::to_string(p));
    return mulmod(num, mod_inverse(den, p), p);
}

Rat to_field(const FieldSpec& f, const Rat& x) {
    if (f.ch == 0) return x;
    return Rat(Int(residue(x, f.ch)));
}

Matrix::Matrix(FieldSpec f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols) {
    validate_field(f);
    if (f.ch > 0)
        dp_.assign(rows * cols, 0);
    else
        dq_.assign(rows * cols, Rat(0));
}

Matrix Matrix::identity(FieldSpec f, std::size_t n) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, Rat(1));
    return m;
}

Rat Matrix::at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw internal_error("matrix index out of range");
    if (field_.ch > 0) return Rat(Int(dp_[r * cols_ + c]));
    return dq_[r * cols_ + c];
}

void Matrix::set(std::size_t r, std::size_t c, const Rat& v) {
    if (r >= rows_ || c >= cols_) throw internal_error("matrix index out of range");
    if (field_.ch > 0)
        dp_[r * cols_ + c] = residue(v, field_.ch);
    else
        dq_[r * cols_ + c] = v;
}

void Matrix::add_at(std::size_t r, std::size_t c, const Rat& v) {
    if (r >= rows_ || c >= cols_) throw internal_error("matrix index out of range");
    if (field_.ch > 0) {
        long long& e = dp_[r * cols_ + c];
        e = (e + residue(v, field_.ch)) % field_.ch;
    } else {
        dq_[r * cols_ + c] += v;
    }
}

bool Matrix::entry_nonzero(std::size_t r, std::size_t c) const {
    if (field_.ch > 0) return dp_[r * cols_ + c] != 0;
    return dq_[r * cols_ + c].numerator() != 0;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_ || !(field_ == rhs.field_))
        throw internal_error("matrix product shape/field mismatch");
    Matrix out(field_, rows_, rhs.cols_);
    // i-k-j order, skipping zero left entries: differentials are sparse.
    if (field_.ch > 0) {
        const long long p = field_.ch;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                long long a = dp_[i * cols_ + k];
                if (a == 0) continue;
                const long long* brow = &rhs.dp_[k * rhs.cols_];
                long long* orow = &out.dp_[i * rhs.cols_];
                for (std::size_t j = 0; j < rhs.cols_; ++j)
                    if (brow[j] != 0) orow[j] = (orow[j] + mulmod(a, brow[j], p)) % p;
            }
    } else {
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rat& a = dq_[i * cols_ + k];
                if (a.numerator() == 0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) {
                    const Rat& b = rhs.dq_[k * rhs.cols_ + j];
                    if (b.numerator() != 0) out.dq_[i * rhs.cols_ + j] += a * b;
                }
            }
    }
    return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_ || !(field_ == rhs.field_))
        throw internal_error("matrix sum shape/field mismatch");
    Matrix out = *this;
    if (field_.ch > 0) {
        for (std::size_t i = 0; i < dp_.size(); ++i)
            out.dp_[i] = (dp_[i] + rhs.dp_[i]) % field_.ch;
    } else {
        for (std::size_t i = 0; i < dq_.size(); ++i) out.dq_[i] = dq_[i] + rhs.dq_[i];
    }
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    return *this + rhs.scaled(Rat(-1));
}

Matrix Matrix::scaled(const Rat& c) const {
    Matrix out = *this;
    if (field_.ch > 0) {
        long long s = residue(c, field_.ch);
        for (auto& e : out.dp_) e = mulmod(e, s, field_.ch);
    } else {
        for (auto& e : out.dq_) e *= c;
    }
    return out;
}

bool Matrix::operator==(const Matrix& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && field_ == rhs.field_ &&
           dp_ == rhs.dp_ && dq_ == rhs.dq_;
}

bool Matrix::is_zero() const {
    if (field_.ch > 0)
        return std::all_of(dp_.begin(), dp_.end(), [](long long e) { return e == 0; });
    return std::all_of(dq_.begin(), dq_.end(),
                       [](const Rat& e) { return e.numerator() == 0; });
}

std::size_t Matrix::nnz() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < rows_ * cols_; ++i)
        n += field_.ch > 0 ? (dp_[i] != 0) : (dq_[i].numerator() != 0);
    return n;
}

Matrix Matrix::transpose() const {
    Matrix out(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (entry_nonzero(i, j)) out.set(j, i, at(i, j));
    return out;
}

Matrix Matrix::hcat(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || !(field_ == rhs.field_))
        throw internal_error("hcat shape/field mismatch");
    Matrix out(field_, rows_, cols_ + rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j)
            if (entry_nonzero(i, j)) out.set(i, j, at(i, j));
        for (std::size_t j = 0; j < rhs.cols_; ++j)
            if (rhs.entry_nonzero(i, j)) out.set(i, cols_ + j, rhs.at(i, j));
    }
    return out;
}

Matrix Matrix::vcat(const Matrix& rhs) const {
    if (cols_ != rhs.cols_ || !(field_ == rhs.field_))
        throw internal_error("vcat shape/field mismatch");
    Matrix out(field_, rows_ + rhs.rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (entry_nonzero(i, j)) out.set(i, j, at(i, j));
    for (std::size_t i = 0; i < rhs.rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (rhs.entry_nonzero(i, j)) out.set(rows_ + i, j, rhs.at(i, j));
    return out;
}

Matrix Matrix::columns(const std::vector<std::size_t>& idx) const {
    Matrix out(field_, rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] >= cols_) throw internal_error("column index out of range");
        for (std::size_t i = 0; i < rows_; ++i)
            if (entry_nonzero(i, idx[j])) out.set(i, j, at(i, idx[j]));
    }
    return out;
}

Matrix Matrix::rowsel(const std::vector<std::size_t>& idx) const {
    Matrix out(field_, idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= rows_) throw internal_error("row index out of range");
        for (std::size_t j = 0; j < cols_; ++j)
            if (entry_nonzero(idx[i], j)) out.set(i, j, at(idx[i], j));
    }
    return out;
}

Matrix Matrix::kron(const Matrix& rhs) const {
    if (!(field_ == rhs.field_)) throw internal_error("kron field mismatch");
    Matrix out(field_, rows_ * rhs.rows_, cols_ * rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            if (!entry_nonzero(i, j)) continue;
            Rat a = at(i, j);
            for (std::size_t k = 0; k < rhs.rows_; ++k)
                for (std::size_t l = 0; l < rhs.cols_; ++l)
                    if (rhs.entry_nonzero(k, l))
                        out.set(i * rhs.rows_ + k, j * rhs.cols_ + l, a * rhs.at(k, l));
        }
    return out;
}

std::vector<Rat> Matrix::apply(const std::vector<Rat>& v) const {
    if (v.size() != cols_) throw internal_error("apply: vector length mismatch");
    Matrix col(field_, cols_, 1);
    for (std::size_t i = 0; i < cols_; ++i) col.set(i, 0, v[i]);
    Matrix r = *this * col;
    std::vector<Rat> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = r.at(i, 0);
    return out;
}

std::vector<std::size_t> Matrix::rref_inplace(bool parallel) {
    (void)parallel; // consumed only by the OpenMP pragmas below
    std::vector<std::size_t> pivots;
    std::size_t prow = 0;
    for (std::size_t col = 0; col < cols_ && prow < rows_; ++col) {
        // deterministic pivot: first row with a nonzero entry in this column
        std::size_t sel = rows_;
        for (std::size_t i = prow; i < rows_; ++i)
            if (entry_nonzero(i, col)) {
                sel = i;
                break;
            }
        if (sel == rows_) continue;
        if (field_.ch > 0) {
            const long long p = field_.ch;
            if (sel != prow)
                std::swap_ranges(dp_.begin() + sel * cols_, dp_.begin() + (sel + 1) * cols_,
                                 dp_.begin() + prow * cols_);
            long long inv = mod_inverse(dp_[prow * cols_ + col], p);
            long long* prowp = &dp_[prow * cols_];
            for (std::size_t j = col; j < cols_; ++j) prowp[j] = mulmod(prowp[j], inv, p);
            long long* base = dp_.data();
            const std::size_t nc = cols_, nr = rows_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && nr > 64)
#endif
            for (long long i = 0; i < (long long)nr; ++i) {
                if ((std::size_t)i == prow) continue;
                long long f = base[i * nc + col];
                if (f == 0) continue;
                long long* row = &base[i * nc];
                for (std::size_t j = col; j < nc; ++j)
                    if (prowp[j] != 0)
                        row[j] = ((row[j] - mulmod(f, prowp[j], p)) % p + p) % p;
            }
        } else {
            if (sel != prow)
                std::swap_ranges(dq_.begin() + sel * cols_, dq_.begin() + (sel + 1) * cols_,
                                 dq_.begin() + prow * cols_);
            Rat inv = Rat(1) / dq_[prow * cols_ + col];
            Rat* prowp = &dq_[prow * cols_];
            for (std::size_t j = col; j < cols_; ++j) prowp[j] *= inv;
            Rat* base = dq_.data();
            const std::size_t nc = cols_, nr = rows_;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && nr > 64)
#endif
            for (long long i = 0; i < (long long)nr; ++i) {
                if ((std::size_t)i == prow) continue;
                Rat f = base[i * nc + col];
                if (f.numerator() == 0) continue;
                Rat* row = &base[i * nc];
                for (std::size_t j = col; j < nc; ++j)
                    if (prowp[j].numerator() != 0) row[j] -= f * prowp[j];
            }
        }
        pivots.push_back(col);
        ++prow;
    }
    return pivots;
}

std::size_t Matrix::rank(bool parallel) const {
    Matrix m = *this;
    return m.rref_inplace(parallel).size();
}

Matrix Matrix::kernel(bool parallel) const {
    Matrix m = *this;
    std::vector<std::size_t> pivots = m.rref_inplace(parallel);
    std::vector<bool> is_pivot(cols_, false);
    for (std::size_t c : pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols_; ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    Matrix out(field_, cols_, free_cols.size());
    for (std::size_t j = 0; j < free_cols.size(); ++j) {
        std::size_t fc = free_cols[j];
        out.set(fc, j, Rat(1));
        for (std::size_t i = 0; i < pivots.size(); ++i)
            if (m.entry_nonzero(i, fc)) out.set(pivots[i], j, -m.at(i, fc));
    }
    return out;
}

std::optional<Matrix> Matrix::solve(const Matrix& b, bool parallel) const {
    if (b.rows_ != rows_ || !(field_ == b.field_))
        throw internal_error("solve shape/field mismatch");
    Matrix aug = hcat(b);
    std::vector<std::size_t> pivots = aug.rref_inplace(parallel);
    // any pivot in the augmented block means inconsistency
    for (std::size_t c : pivots)
        if (c >= cols_) return std::nullopt;
    Matrix x(field_, cols_, b.cols_);
    for (std::size_t i = 0; i < pivots.size(); ++i)
        for (std::size_t j = 0; j < b.cols_; ++j)
            if (aug.entry_nonzero(i, cols_ + j)) x.set(pivots[i], j, aug.at(i, cols_ + j));
    return x;
}

std::string Matrix::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            Rat v = at(i, j);
            os << v.numerator();
            if (v.denominator() != 1) os << "/" << v.denominator();
            os << (j + 1 == cols_ ? "" : " ");
        }
        os << "\n";
    }
    return os.str();
}

std::size_t image_membership_rank(const Matrix& span_a, const Matrix& span_b,
                                  bool parallel) {
    if (span_a.rows() != span_b.rows())
        throw internal_error("image_membership_rank: vector length mismatch");
    return span_b.hcat(span_a).rank(parallel) - span_b.rank(parallel);
}

} // namespace th::linalg
