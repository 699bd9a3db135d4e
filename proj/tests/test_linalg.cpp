#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "th/linalg.hpp"

using namespace th;
using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rat;

namespace {

Matrix from_rows(FieldSpec f, const std::vector<std::vector<long long>>& rows) {
    Matrix m(f, rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.set(i, j, Rat(rows[i][j]));
    return m;
}

Matrix random_matrix(FieldSpec f, std::size_t r, std::size_t c,
                     std::mt19937_64& rng) {
    Matrix m(f, r, c);
    long long p = f.ch == 0 ? 7 : f.ch;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.set(i, j, Rat((long long)(rng() % (unsigned long long)p) -
                            (f.ch == 0 ? 3 : 0)));
    return m;
}

} // namespace

TEST_CASE("field validation") {
    CHECK_NOTHROW(linalg::validate_field({0}));
    CHECK_NOTHROW(linalg::validate_field({2}));
    CHECK_NOTHROW(linalg::validate_field({101}));
    CHECK_THROWS_AS(linalg::validate_field({4}), input_error);
    CHECK_THROWS_AS(linalg::validate_field({1}), input_error);
    CHECK_THROWS_AS(linalg::validate_field({-2}), input_error);
}

TEST_CASE("residues and inverses") {
    CHECK(linalg::residue(Rat(7), 5) == 2);
    CHECK(linalg::residue(Rat(-1), 5) == 4);
    CHECK(linalg::residue(Rat(1, 2), 5) == 3); // 2*3 = 1 mod 5
    CHECK_THROWS_AS(linalg::residue(Rat(1, 5), 5), compute_error);
    for (long long a = 1; a < 7; ++a)
        CHECK((a * linalg::mod_inverse(a, 7)) % 7 == 1);
}

TEST_CASE("rank, kernel, rref over F_2 and Q") {
    for (long long ch : {0LL, 2LL, 5LL}) {
        FieldSpec f{ch};
        auto m = from_rows(f, {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
        // rows sum to zero over F_2 only
        CHECK(m.rank() == (ch == 2 ? 2 : 3));
        auto k = m.kernel();
        CHECK(k.cols() == m.cols() - m.rank());
        CHECK((m * k).is_zero());
    }
    auto id = Matrix::identity({3}, 4);
    CHECK(id.rank() == 4);
    CHECK(id.kernel().cols() == 0);
}

TEST_CASE("rref pivots are deterministic and reduced") {
    auto m = from_rows({5}, {{0, 2, 1, 3}, {0, 4, 2, 1}, {1, 1, 1, 1}});
    // row 2 is pivoted to the top; the second row is then a multiple of the
    // first data row mod 5, so only columns 0 and 1 carry pivots
    auto pivots = m.rref_inplace();
    CHECK(pivots == std::vector<std::size_t>{0, 1});
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        CHECK(m.at(r, pivots[r]) == Rat(1));
        for (std::size_t r2 = 0; r2 < m.rows(); ++r2)
            if (r2 != r) CHECK(m.at(r2, pivots[r]) == Rat(0));
    }
}

TEST_CASE("solve: consistent and inconsistent systems") {
    auto a = from_rows({0}, {{1, 2}, {3, 4}});
    auto b = from_rows({0}, {{5}, {6}});
    auto x = a.solve(b);
    REQUIRE(x.has_value());
    CHECK(a * *x == b);

    auto sing = from_rows({2}, {{1, 1}, {1, 1}});
    auto rhs = from_rows({2}, {{1}, {0}});
    CHECK_FALSE(sing.solve(rhs).has_value());
}

TEST_CASE("kron and block operations") {
    auto a = from_rows({7}, {{1, 2}, {3, 4}});
    auto b = from_rows({7}, {{0, 1}, {1, 0}});
    auto k = a.kron(b);
    CHECK(k.rows() == 4);
    CHECK(k.at(0, 1) == Rat(1));
    CHECK(k.at(1, 0) == Rat(1));
    CHECK(k.at(2, 3) == Rat(4)); // a[1][1] * b[0][1]
    // (A kron B)(x kron y) = Ax kron By on basis vectors
    auto hc = a.hcat(b);
    CHECK(hc.cols() == 4);
    CHECK(hc.at(0, 2) == Rat(0));
    auto vc = a.vcat(b);
    CHECK(vc.rows() == 4);
    CHECK(vc.columns({1}).at(3, 0) == Rat(0));
    CHECK(vc.rowsel({2, 3}) == b);
}

TEST_CASE("image membership rank") {
    // span_b = <e1>, span_a = <e1 + e2, e1> -> one new direction
    auto a = from_rows({5}, {{1, 1}, {1, 0}, {0, 0}});
    auto b = from_rows({5}, {{1}, {0}, {0}});
    CHECK(linalg::image_membership_rank(a, b) == 1);
    CHECK(linalg::image_membership_rank(b, a) == 0);
}

TEST_CASE("parallel kernel agrees with serial on random matrices") {
    std::mt19937_64 rng(11);
    for (long long ch : {2LL, 5LL, 0LL}) {
        for (int trial = 0; trial < 5; ++trial) {
            auto m = random_matrix({ch}, 40, 55, rng);
            CHECK(m.rank(false) == m.rank(true));
            auto ks = m.kernel(false), kp = m.kernel(true);
            CHECK(ks == kp);
            auto a = random_matrix({ch}, 30, 6, rng);
            auto b = random_matrix({ch}, 30, 9, rng);
            CHECK(linalg::image_membership_rank(a, b, false) ==
                  linalg::image_membership_rank(a, b, true));
        }
    }
}

TEST_CASE("rank-nullity and product bounds on random matrices") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = random_matrix({3}, 20, 31, rng);
        CHECK(m.rank() + m.kernel().cols() == m.cols());
        CHECK(m.rank() == m.transpose().rank());
        auto n = random_matrix({3}, 31, 17, rng);
        CHECK((m * n).rank() <= std::min(m.rank(), n.rank()));
    }
}
