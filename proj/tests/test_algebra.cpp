#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "th/algebra.hpp"

using namespace th;
using namespace th::algebra;
using linalg::FieldSpec;
using linalg::Matrix;
using linalg::Rat;

namespace {

struct CatalogEntry {
    std::string name;
    FieldSpec field;
    BuiltinParams params;
};

std::vector<CatalogEntry> catalog() {
    return {
        {"c_ht", {2}, {Rat(1), Rat(0), Rat(1), 2}},
        {"c_ht", {0}, {Rat(0), Rat(0), Rat(1), 2}},
        {"c_ht", {5}, {Rat(2), Rat(3), Rat(1), 2}},
        {"khovanov_pair", {2}, {}},
        {"truncated_poly", {3}, {}},
        {"modp_X", {5}, {}},
        {"barnatan_pair", {2}, {Rat(1), Rat(0), Rat(1), 2}},
        {"lee_pair", {2}, {Rat(0), Rat(1), Rat(1), 2}},
        {"matrix", {5}, {Rat(0), Rat(0), Rat(1), 2}},
        {"matrix", {0}, {Rat(0), Rat(0), Rat(2), 3}},
        {"quaternion", {5}, {}},
        {"quaternion", {0}, {Rat(0), Rat(0), Rat(3), 2}},
        {"m2k_plus_k", {5}, {}},
        {"hk_plus_k", {5}, {}},
    };
}

FrobeniusData trivial_frobenius(FieldSpec f) {
    FrobeniusData t;
    t.dim = 1;
    t.basis = {"1"};
    t.mu = {{{Rat(1)}}};
    t.eta = {Rat(1)};
    t.delta = {{{Rat(1)}}};
    t.eps = {Rat(1)};
    t.degrees = {0};
    t.grading = GradingMode::none;
    t.field = f;
    t.normalize();
    return t;
}

KnowledgeableFrobenius get_pair(const std::string& name, FieldSpec f,
                                const BuiltinParams& p = {}) {
    return std::get<KnowledgeableFrobenius>(builtin(name, f, p));
}

FrobeniusData get_plain(const std::string& name, FieldSpec f,
                        const BuiltinParams& p = {}) {
    return std::get<FrobeniusData>(builtin(name, f, p));
}

} // namespace

TEST_CASE("every catalog algebra passes its axiom suite") {
    for (const auto& e : catalog()) {
        CAPTURE(e.name);
        CAPTURE(e.field.ch);
        Builtin b = builtin(e.name, e.field, e.params);
        if (auto* k = std::get_if<KnowledgeableFrobenius>(&b)) {
            auto rep = validate_knowledgeable(*k);
            INFO(rep.summary());
            CHECK(rep.ok());
            if (k->A.grading != GradingMode::none) {
                auto deg = check_euler_degrees(*k);
                INFO(deg.summary());
                CHECK(deg.ok());
            }
            auto bn = check_barnatan(k->C);
            CHECK(bn.S);
            CHECK(bn.T);
            CHECK(bn.fourTu);
        } else {
            auto& f = std::get<FrobeniusData>(b);
            auto rep = validate_frobenius(f);
            INFO(rep.summary());
            CHECK(rep.ok());
            if (f.is_commutative()) {
                auto bn = check_barnatan(f);
                CHECK(bn.S);
                CHECK(bn.T);
                CHECK(bn.fourTu);
            }
        }
    }
}

TEST_CASE("unknown names and bad characteristics are input errors") {
    CHECK_THROWS_AS(builtin("nonsense", {2}), input_error);
    CHECK_THROWS_AS(builtin("khovanov_pair", {3}), input_error);
    CHECK_THROWS_AS(builtin("quaternion", {2}), input_error);
    CHECK_THROWS_AS(builtin("modp_X", {2}), input_error);
    CHECK_THROWS_AS(builtin("m2k_plus_k", {7}), input_error);
    auto names = builtin_names();
    CHECK(names.size() == 10);
    for (const auto& n : names) CHECK_NOTHROW(builtin(n, n == "quaternion" || n == "m2k_plus_k" || n == "hk_plus_k" ? FieldSpec{5} : n == "modp_X" || n == "truncated_poly" ? FieldSpec{3} : FieldSpec{2}));
}

TEST_CASE("Cardy failure in odd characteristic is detected") {
    for (long long p : {3LL, 5LL}) {
        CAPTURE(p);
        auto b = builtin("khovanov_pair", {p}, {}, /*enforce=*/false);
        auto& k = std::get<KnowledgeableFrobenius>(b);
        auto rep = validate_knowledgeable(k);
        CHECK_FALSE(rep.ok());
        auto* cardy = rep.find("cardy");
        REQUIRE(cardy != nullptr);
        CHECK_FALSE(cardy->ok);
    }
}

TEST_CASE("S fails for the trivial Frobenius structure on k") {
    auto t = trivial_frobenius({2});
    CHECK(validate_frobenius(t).ok());
    auto bn = check_barnatan(t);
    CHECK_FALSE(bn.S);
}

TEST_CASE("strong separability of C_{h,t} iff h^2 + 4t != 0") {
    for (long long p : {2LL, 3LL, 5LL}) {
        for (long long h = 0; h < p; ++h)
            for (long long t = 0; t < p; ++t) {
                CAPTURE(p); CAPTURE(h); CAPTURE(t);
                auto c = get_plain("c_ht", {p}, {Rat(h), Rat(t), Rat(1), 2});
                bool expect = (h * h + 4 * t) % p != 0;
                CHECK(is_strongly_separable(c) == expect);
                CHECK(window(c).inverse.has_value() == expect);
            }
    }
    for (long long h = -2; h <= 2; ++h)
        for (long long t = -2; t <= 2; ++t) {
            CAPTURE(h); CAPTURE(t);
            auto c = get_plain("c_ht", {0}, {Rat(h), Rat(t), Rat(1), 2});
            CHECK(is_strongly_separable(c) == (h * h + 4 * t != 0));
        }
}

TEST_CASE("window element of C_{h,t} is 2x - h") {
    auto c = get_plain("c_ht", {0}, {Rat(3), Rat(1), Rat(1), 2});
    auto w = window(c);
    CHECK(w.a == std::vector<Rat>{Rat(-3), Rat(2)});
    REQUIRE(w.inverse.has_value());
    // a * a^{-1} = 1
    auto prod = c.left_mult(w.a).apply(*w.inverse);
    CHECK(prod == std::vector<Rat>{Rat(1), Rat(0)});
}

TEST_CASE("central idempotent projects onto the centre") {
    for (auto name : {"matrix", "quaternion"}) {
        CAPTURE(name);
        auto f = get_plain(name, {5});
        Matrix p = central_idempotent(f);
        CHECK(p * p == p);
        // the centre of a central simple algebra is 1-dimensional
        CHECK(p.rank() == 1);
        CHECK(!(p * f.eta_matrix()).is_zero()); // fixes the unit
    }
    // commutative algebra: p is the identity
    auto c = get_plain("c_ht", {2}, {Rat(1), Rat(1), Rat(1), 2});
    CHECK(central_idempotent(c) == Matrix::identity(c.field, c.dim));
}

TEST_CASE("state-sum construction yields a knowledgeable pair") {
    for (auto name : {"matrix", "quaternion"}) {
        CAPTURE(name);
        auto f = get_plain(name, {5});
        auto k = state_sum_kfrob(f);
        auto rep = validate_knowledgeable(k);
        INFO(rep.summary());
        CHECK(rep.ok());
        CHECK(k.C.dim == 1);
    }
}

TEST_CASE("state-sum on A_{1,0}/F_2 reproduces the Bar-Natan pair") {
    auto bn = get_pair("barnatan_pair", {2}, {Rat(1), Rat(0), Rat(1), 2});
    auto k = state_sum_kfrob(bn.A);
    REQUIRE(k.C.dim == bn.C.dim);
    CHECK(k.C.mu == bn.C.mu);
    CHECK(k.C.delta == bn.C.delta);
    CHECK(k.C.eta == bn.C.eta);
    CHECK(k.C.eps == bn.C.eps);
    CHECK(k.iota == bn.iota);
    CHECK(k.iota_star == bn.iota_star);
    auto rep = validate_knowledgeable(k);
    INFO(rep.summary());
    CHECK(rep.ok());
}

TEST_CASE("state-sum fails for non-strongly-separable algebras") {
    auto kh = get_pair("khovanov_pair", {2});
    CHECK_THROWS_AS(state_sum_kfrob(kh.A), compute_error);
    auto lee = get_pair("lee_pair", {2}, {Rat(0), Rat(1), Rat(1), 2});
    CHECK_THROWS_AS(state_sum_kfrob(lee.A), compute_error);
}

TEST_CASE("P and Q idempotent composition laws") {
    std::vector<FrobeniusData> algs{
        get_pair("barnatan_pair", {2}, {Rat(1), Rat(0), Rat(1), 2}).A,
        get_plain("matrix", {5}),
        get_plain("quaternion", {5}),
    };
    for (const auto& a : algs) {
        CAPTURE(a.basis[0]);
        for (int j = 1; j <= 3; ++j)
            for (int l = 1; l <= 3; ++l)
                for (int m = 1; m <= 3; ++m) {
                    auto [p_jl, q_jl] = idempotents_PQ(a, j, l);
                    auto [p_lm, q_lm] = idempotents_PQ(a, l, m);
                    auto [p_jm, q_jm] = idempotents_PQ(a, j, m);
                    CHECK(p_jl * p_lm == p_jm);
                    CHECK(q_jm == q_jl * q_lm);
                }
    }
}

TEST_CASE("opposite algebra reverses multiplication") {
    auto f = get_plain("matrix", {5});
    auto op = opposite(f);
    CHECK(validate_frobenius(op).ok());
    CHECK_FALSE(f.mu == op.mu);
    CHECK(opposite(op).mu == f.mu);
    // commutative algebras are their own opposites
    auto c = get_plain("c_ht", {2}, {Rat(1), Rat(1), Rat(1), 2});
    CHECK(opposite(c).mu == c.mu);
    CHECK(opposite(c).delta == c.delta);
}

TEST_CASE("associated graded of the Bar-Natan pair is the Khovanov pair") {
    auto bn = get_pair("barnatan_pair", {2}, {Rat(1), Rat(0), Rat(1), 2});
    auto gr = associated_graded(bn);
    auto kh = get_pair("khovanov_pair", {2});
    CHECK(gr.A.mu == kh.A.mu);
    CHECK(gr.A.delta == kh.A.delta);
    CHECK(gr.C.mu == kh.C.mu);
    CHECK(gr.C.delta == kh.C.delta);
    CHECK(gr.A.grading == GradingMode::graded);
    CHECK(validate_knowledgeable(gr).ok());
}

TEST_CASE("JSON round trip preserves Frobenius data") {
    for (const auto& e : catalog()) {
        Builtin b = builtin(e.name, e.field, e.params);
        FrobeniusData f = std::holds_alternative<FrobeniusData>(b)
                              ? std::get<FrobeniusData>(b)
                              : std::get<KnowledgeableFrobenius>(b).A;
        auto text = frobenius_to_json(f);
        auto g = frobenius_from_json(text);
        CHECK(g.dim == f.dim);
        CHECK(g.basis == f.basis);
        CHECK(g.mu == f.mu);
        CHECK(g.delta == f.delta);
        CHECK(g.eta == f.eta);
        CHECK(g.eps == f.eps);
        CHECK(g.degrees == f.degrees);
        CHECK(g.grading == f.grading);
        CHECK(g.field == f.field);
    }
    CHECK_THROWS_AS(frobenius_from_json("{not json"), input_error);
    CHECK_THROWS_AS(frobenius_from_json("{\"version\":1}"), input_error);
}
