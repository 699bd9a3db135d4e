#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "th/compose.hpp"

using namespace th;
using namespace th::compose;
using algebra::BuiltinParams;
using algebra::FrobeniusData;
using algebra::KnowledgeableFrobenius;
using linalg::Matrix;
using linalg::Rat;
using tangle::Point;

namespace {

tangle::TangleDiagram diagram(const std::string& text) {
    return tangle::analyze(tangle::parse_slice_word(text));
}

const char* kTPrime = "tangle v1\nin 2\norient u u\nXO 1\nXO 1\nend\n";
const char* kT = "tangle v1\nin 2\norient u u\nXO 1\nXU 1\nend\n";
const char* kTwoStrands = "tangle v1\nin 2\norient u u\nend\n";
const char* kStrand = "tangle v1\nin 1\norient u\nend\n";
const char* kKink = "tangle v1\nin 1\norient u\nCUP 2 u\nXO 1\nCAP 2\nend\n";

KnowledgeableFrobenius barnatan() {
    return std::get<KnowledgeableFrobenius>(
        algebra::builtin("barnatan_pair", {2}, {Rat(1), Rat(0), Rat(1), 2}));
}

std::size_t find_boundary(const BimoduleComplex& c, Point p, bool plus) {
    for (std::size_t i = 0; i < c.boundary.size(); ++i)
        if (c.boundary[i].point == p && c.boundary[i].is_plus == plus) return i;
    REQUIRE(false);
    return 0;
}

// columns of act for the single algebra basis vector e_i
Matrix action_of(const BimoduleComplex& c, const Matrix& act, std::size_t i) {
    std::size_t d = act.rows();
    Matrix out(act.field(), d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t v = 0; v < d; ++v)
            out.set(r, v, act.at(r, i * d + v));
    (void)c;
    return out;
}

void check_action_laws(const BimoduleComplex& c, const FrobeniusData& a) {
    for (const auto& b : c.boundary) {
        REQUIRE(b.act.size() == c.cx.terms.size());
        for (std::size_t r = 0; r < c.cx.terms.size(); ++r) {
            std::size_t d = c.cx.terms[r].dim();
            // the unit acts as the identity
            Matrix unit_action(a.field, d, d);
            for (std::size_t i = 0; i < a.dim; ++i)
                if (a.eta[i].numerator() != 0)
                    unit_action = unit_action +
                                  action_of(c, b.act[r], i).scaled(a.eta[i]);
            CHECK(unit_action == Matrix::identity(a.field, d));
            // actions are chain maps: d o act_a = act_a o d
            if (r + 1 < c.cx.terms.size()) {
                for (std::size_t i = 0; i < a.dim; ++i) {
                    auto lo = action_of(c, b.act[r], i);
                    auto hi = action_of(c, b.act[r + 1], i);
                    CHECK(c.cx.diffs[r] * lo == hi * c.cx.diffs[r]);
                }
            }
        }
    }
}

} // namespace

TEST_CASE("unit bimodule is a tensor unit") {
    auto k = barnatan();
    auto u = unit_bimodule(k.A.field);
    auto arc = arc_block(k.A, {0, 1}, {0, 2});
    auto l = tensor_bimodule(u, arc);
    auto r = tensor_bimodule(arc, u);
    for (const auto* t : {&l, &r}) {
        CHECK(t->cx.terms.size() == 1);
        CHECK(t->cx.terms[0].dim() == k.A.dim);
        CHECK(t->boundary.size() == 2);
    }
}

TEST_CASE("arc blocks carry one left and one right action") {
    auto k = barnatan();
    auto arc = arc_block(k.A, {0, 1}, {0, 2});
    REQUIRE(arc.boundary.size() == 2);
    CHECK_FALSE(arc.boundary[0].is_plus);
    CHECK(arc.boundary[1].is_plus);
    check_action_laws(arc, k.A);
}

TEST_CASE("crossing blocks satisfy the action laws") {
    auto k = barnatan();
    auto t = diagram(kT);
    for (std::size_t j = 0; j < 2; ++j) {
        auto block = crossing_block(k.A, t.crossings[j], 1);
        CHECK(block.cx.terms.size() == 2);
        CHECK(block.boundary.size() == 4);
        CHECK(complex::verify_complex(block.cx).ok());
        check_action_laws(block, k.A);
    }
    // positive crossings start in degree 0, negative ones in degree -1
    CHECK(crossing_block(k.A, t.crossings[0], 1).cx.r_min == 0);
    CHECK(crossing_block(k.A, t.crossings[1], 1).cx.r_min == -1);
}

TEST_CASE("coequalizing an arc chain reproduces the algebra itself") {
    for (auto name : {"matrix", "quaternion"}) {
        CAPTURE(name);
        auto a = std::get<FrobeniusData>(algebra::builtin(name, {5}));
        // chain of three arcs glued end to end: dimension must drop to dim A
        auto c = arc_block(a, {0, 1}, {0, 2});
        for (int i = 1; i <= 2; ++i) {
            auto next = arc_block(a, {i, 1}, {i, 2});
            auto t = tensor_bimodule(c, next);
            std::size_t plus = find_boundary(t, {i - 1, 2}, true);
            std::size_t minus = find_boundary(t, {i, 1}, false);
            c = coequalize(t, plus, minus);
        }
        CHECK(c.cx.terms[0].dim() == a.dim);
        check_action_laws(c, a);
        // closing the chain into a loop leaves the centre
        std::size_t plus = find_boundary(c, {2, 2}, true);
        std::size_t minus = find_boundary(c, {0, 1}, false);
        auto loop = coequalize(c, plus, minus);
        CHECK(loop.cx.terms[0].dim() == 1); // both algebras are central simple
        CHECK(loop.boundary.empty());
    }
}

TEST_CASE("coequalize rejects sign mismatches") {
    auto k = barnatan();
    auto a1 = arc_block(k.A, {0, 1}, {0, 2});
    auto a2 = arc_block(k.A, {1, 1}, {1, 2});
    auto t = tensor_bimodule(a1, a2);
    CHECK_THROWS_AS(coequalize(t, 1, 3), input_error); // two '+' points
    CHECK_THROWS_AS(coequalize(t, 0, 2), input_error); // two '-' points
}

TEST_CASE("composition agrees with the global pipeline (Bar-Natan pair)") {
    auto k = barnatan();
    for (const char* text : {kStrand, kTwoStrands, kKink, kT, kTPrime}) {
        CAPTURE(text);
        std::string detail;
        bool ok = verify_composition(diagram(text), 1, k, &detail);
        INFO(detail);
        CHECK(ok);
    }
    // and for the reversed colouring
    std::string detail;
    CHECK(verify_composition(diagram(kKink), -1, k, &detail));
}

TEST_CASE("composition works for the exotic strongly separable pairs") {
    struct Case { const char* name; long long ch; };
    for (auto [name, ch] : {Case{"modp_X", 5}, Case{"m2k_plus_k", 5},
                            Case{"hk_plus_k", 5}, Case{"truncated_poly", 3}}) {
        CAPTURE(name);
        auto k = std::get<KnowledgeableFrobenius>(
            algebra::builtin(name, {ch}));
        if (!algebra::window(k.A).inverse) continue; // not strongly separable
        std::string detail;
        bool ok = verify_composition(diagram(kKink), 1, k, &detail);
        INFO(detail);
        CHECK(ok);
    }
    // state-sum pairs from central simple algebras
    for (auto name : {"matrix", "quaternion"}) {
        CAPTURE(name);
        auto k = algebra::state_sum_kfrob(
            std::get<FrobeniusData>(algebra::builtin(name, {5})));
        std::string detail;
        bool ok = verify_composition(diagram(kT), 1, k, &detail);
        INFO(detail);
        CHECK(ok);
    }
}

TEST_CASE("non-strongly-separable algebras cannot be composed") {
    auto kh = std::get<KnowledgeableFrobenius>(
        algebra::builtin("khovanov_pair", {2}));
    CHECK_THROWS_AS(compose_tangle(diagram(kKink), 1, kh), compute_error);
    auto lee = std::get<KnowledgeableFrobenius>(
        algebra::builtin("lee_pair", {2}, {Rat(0), Rat(1), Rat(1), 2}));
    CHECK_THROWS_AS(compose_tangle(diagram(kT), 1, lee), compute_error);
}

TEST_CASE("gluing two crossing blocks yields the R2 complex") {
    auto k = barnatan();
    auto t = diagram(kT);
    auto c1 = crossing_block(k.A, t.crossings[0], 1);
    auto c2 = crossing_block(k.A, t.crossings[1], 1);
    // match the two interface points (level 1, positions 1 and 2)
    std::vector<std::pair<std::size_t, std::size_t>> matching;
    for (int pos : {1, 2}) {
        for (std::size_t i = 0; i < c1.boundary.size(); ++i) {
            if (c1.boundary[i].point != Point{1, pos}) continue;
            for (std::size_t j = 0; j < c2.boundary.size(); ++j)
                if (c2.boundary[j].point == Point{1, pos} &&
                    c2.boundary[j].is_plus != c1.boundary[i].is_plus)
                    matching.push_back({i, j});
        }
    }
    REQUIRE(matching.size() == 2);
    auto glued = glue_tangles(c1, c2, matching);
    CHECK(glued.boundary.size() == 4);
    auto h = complex::homology_bigraded(glued.cx);
    auto r2 = complex::homology_bigraded(
        complex::tangle_complex(t, algebra::to_tangle_algebra(k), 1));
    auto strands = complex::homology_bigraded(complex::tangle_complex(
        diagram(kTwoStrands), algebra::to_tangle_algebra(k), 1));
    CHECK(h == r2);
    CHECK(h == strands);
    // gluing in the opposite order gives the same table
    auto glued2 = glue_tangles(c1, c2, {matching[1], matching[0]});
    CHECK(complex::homology_bigraded(glued2.cx) == h);
}

TEST_CASE("gluing with an empty matching is the tensor product") {
    auto k = barnatan();
    auto a1 = arc_block(k.A, {0, 1}, {0, 2});
    auto a2 = arc_block(k.A, {5, 1}, {5, 2});
    auto g = glue_tangles(a1, a2, {});
    CHECK(g.cx.terms[0].dim() ==
          a1.cx.terms[0].dim() * a2.cx.terms[0].dim());
    CHECK(g.boundary.size() == 4);
}

TEST_CASE("glue_tangles validates its matching") {
    auto k = barnatan();
    auto a1 = arc_block(k.A, {0, 1}, {0, 2});
    auto a2 = arc_block(k.A, {1, 1}, {1, 2});
    CHECK_THROWS_AS(glue_tangles(a1, a2, {{0, 0}}), input_error); // '-' vs '-'
    CHECK_THROWS_AS(glue_tangles(a1, a2, {{7, 0}}), input_error);
}

TEST_CASE("composed complexes expose sign-correct boundary actions") {
    auto k = barnatan();
    auto comp = compose_tangle(diagram(kTwoStrands), 1, k);
    REQUIRE(comp.boundary.size() == 4);
    int plus = 0, minus = 0;
    for (auto& b : comp.boundary) (b.is_plus ? plus : minus)++;
    CHECK(plus == 2);
    CHECK(minus == 2);
    check_action_laws(comp, k.A);
}
