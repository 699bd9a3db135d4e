#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "th/tangle.hpp"

using namespace th;
using namespace th::tangle;

namespace {

TangleDiagram diagram(const std::string& text) {
    return analyze(parse_slice_word(text));
}

const char* kTPrime = "tangle v1\nin 2\norient u u\nXO 1\nXO 1\nend\n";
const char* kT = "tangle v1\nin 2\norient u u\nXO 1\nXU 1\nend\n";
const char* kUnknot = "tangle v1\nin 0\nCUP 1 u\nCAP 1\nend\n";
const char* kKink = "tangle v1\nin 1\norient u\nCUP 2 u\nXO 1\nCAP 2\nend\n";

} // namespace

TEST_CASE("slice word parsing accepts comments and flexible whitespace") {
    auto w = parse_slice_word(
        "# a comment\ntangle v1\n  in 2 # trailing\norient u d\nCAP 1\nend\n");
    CHECK(w.in_count == 2);
    REQUIRE(w.in_orientations.size() == 2);
    CHECK(w.in_orientations[0] == Dir::up);
    CHECK(w.in_orientations[1] == Dir::down);
    REQUIRE(w.slices.size() == 1);
    CHECK(w.slices[0].kind == SliceKind::cap);
}

TEST_CASE("malformed inputs are rejected") {
    CHECK_THROWS_AS(parse_slice_word("in 2\norient u u\nend\n"), input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 2\nend\n"), input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 0\norient u\nend\n"),
                    input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 2\norient u u\nXO 2\nend\n"),
                    input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 0\nCUP 2 u\nend\n"),
                    input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 2\norient u u\nFOO 1\nend\n"),
                    input_error);
    CHECK_THROWS_AS(parse_slice_word("tangle v1\nin 2\norient u u\nXO 1\n"),
                    input_error); // missing end
}

TEST_CASE("capping two strands with equal direction is an orientation error") {
    CHECK_THROWS_AS(diagram("tangle v1\nin 2\norient u u\nCAP 1\nend\n"),
                    input_error);
    CHECK_NOTHROW(diagram("tangle v1\nin 2\norient u d\nCAP 1\nend\n"));
}

TEST_CASE("orientation propagation and crossing signs") {
    auto tp = diagram(kTPrime);
    CHECK(tp.n_crossings() == 2);
    CHECK(tp.n_plus == 2);
    CHECK(tp.n_minus == 0);
    for (const auto& lvl : tp.level_dirs)
        for (Dir d : lvl) CHECK(d == Dir::up);

    auto t = diagram(kT);
    CHECK(t.n_plus == 1);
    CHECK(t.n_minus == 1);
    CHECK(t.crossings[0].sign == 1);  // XO, both strands upward
    CHECK(t.crossings[1].sign == -1); // XU, both strands upward

    auto kink = diagram(kKink);
    CHECK(kink.n_plus == 1); // an XO kink is positive for any orientation
    CHECK(kink.n_minus == 0);
    CHECK(kink.in_points() == 1);
    CHECK(kink.out_points() == 1);
}

TEST_CASE("reversing both strands keeps the crossing signs") {
    auto up = diagram("tangle v1\nin 2\norient u u\nXO 1\nend\n");
    auto down = diagram("tangle v1\nin 2\norient d d\nXO 1\nend\n");
    CHECK(up.crossings[0].sign == 1);
    CHECK(down.crossings[0].sign == 1);
    auto mixed = diagram("tangle v1\nin 2\norient u d\nXO 1\nend\n");
    CHECK(mixed.crossings[0].sign == -1);
}

TEST_CASE("checkerboard shading starts shaded west of the leftmost strand") {
    CHECK(shaded(0, 1));
    CHECK_FALSE(shaded(1, 1));
    CHECK(shaded(2, 1));
    CHECK_FALSE(shaded(0, -1));
    CHECK(shaded(1, -1));
}

TEST_CASE("resolutions of the unknot and a bare strand") {
    auto u = diagram(kUnknot);
    auto r = resolve(u, 0, 1);
    CHECK(r.n_circles() == 1);
    CHECK(r.n_arcs() == 0);

    auto s = diagram("tangle v1\nin 1\norient u\nend\n");
    auto rs = resolve(s, 0, 1);
    CHECK(rs.n_circles() == 0);
    REQUIRE(rs.n_arcs() == 1);
    // shaded west: the bottom endpoint is '-', the top endpoint '+'
    CHECK(rs.comps[0].neg_end == Point{0, 1});
    CHECK(rs.comps[0].pos_end == Point{0, 1});
    auto rs2 = resolve(s, 0, -1);
    CHECK(rs2.n_arcs() == 1);
}

TEST_CASE("resolutions of T-prime") {
    auto tp = diagram(kTPrime);
    // 0-smoothing of an XO crossing is the vertical smoothing
    auto r00 = resolve(tp, 0b00, 1);
    CHECK(r00.n_arcs() == 2);
    CHECK(r00.n_circles() == 0);
    auto r01 = resolve(tp, 0b01, 1);
    CHECK(r01.n_arcs() == 2);
    CHECK(r01.n_circles() == 0);
    auto r10 = resolve(tp, 0b10, 1);
    CHECK(r10.n_arcs() == 2);
    CHECK(r10.n_circles() == 0);
    auto r11 = resolve(tp, 0b11, 1);
    CHECK(r11.n_arcs() == 2);
    CHECK(r11.n_circles() == 1);
    // components are sorted by their minimal (level, pos) key
    for (std::size_t i = 1; i < r11.comps.size(); ++i)
        CHECK(r11.comps[i - 1].key < r11.comps[i].key);
    // comp_of covers every point of every level
    for (std::size_t l = 0; l < tp.levels(); ++l)
        for (int p = 1; p <= tp.width(l); ++p)
            CHECK(r11.comp_at({(int)l, p}) >= 0);
}

TEST_CASE("saddle classification across the T-prime cube") {
    auto tp = diagram(kTPrime);
    auto r00 = resolve(tp, 0b00, 1);
    auto r01 = resolve(tp, 0b01, 1);
    auto r10 = resolve(tp, 0b10, 1);
    auto r11 = resolve(tp, 0b11, 1);

    auto s0 = saddle_classify(tp, r00, r01, 0, 1);
    CHECK(s0.kind == SaddleKind::arc_arc);
    CHECK(s0.variant_x); // east/west wedges shaded at position 1
    auto s1 = saddle_classify(tp, r01, r11, 1, 1);
    CHECK(s1.kind == SaddleKind::arc_to_circle_arc);
    auto s2 = saddle_classify(tp, r10, r11, 0, 1);
    CHECK(s2.kind == SaddleKind::arc_to_circle_arc);
    auto s3 = saddle_classify(tp, r00, r10, 1, 1);
    CHECK(s3.kind == SaddleKind::arc_arc);
    // untouched components are matched bijectively
    for (auto& [a, b] : s0.untouched) {
        CHECK(a >= 0);
        CHECK(b >= 0);
    }
}

TEST_CASE("circle merges and splits on the Hopf plat") {
    auto hopf = diagram("tangle v1\nin 0\nCUP 1 u\nCUP 3 d\nXO 2\nXO 2\nCAP 1\nCAP 1\nend\n");
    CHECK(hopf.n_crossings() == 2);
    auto r0 = resolve(hopf, 0b00, 1);
    auto r1 = resolve(hopf, 0b01, 1);
    auto r3 = resolve(hopf, 0b11, 1);
    CHECK(r0.n_arcs() == 0);
    CHECK(r3.n_arcs() == 0);
    auto s = saddle_classify(hopf, r0, r1, 0, 1);
    CHECK((s.kind == SaddleKind::merge_cc || s.kind == SaddleKind::split_cc));
    auto s2 = saddle_classify(hopf, r1, r3, 1, 1);
    CHECK((s2.kind == SaddleKind::merge_cc || s2.kind == SaddleKind::split_cc));
    // the circle count changes by exactly one along each edge
    auto gap = [](std::size_t a, std::size_t b) {
        return a > b ? a - b : b - a;
    };
    CHECK(gap(r0.n_circles(), r1.n_circles()) == 1);
    CHECK(gap(r1.n_circles(), r3.n_circles()) == 1);
}

TEST_CASE("cube structure and edge signs") {
    auto tp = diagram(kTPrime);
    auto cube = build_cube(tp, 1);
    CHECK(cube.vertices.size() == 4);
    // every square of the cube anticommutes in signs: the four edge signs
    // multiply to -1
    int prod = 1;
    for (const auto& e : cube.edges_from[0b00]) prod *= e.sign;
    for (const auto& e : cube.edges_from[0b01])
        if (e.crossing == 1) prod *= e.sign;
    for (const auto& e : cube.edges_from[0b10])
        if (e.crossing == 0) prod *= e.sign;
    CHECK(prod == -1);
}

TEST_CASE("renumbering the crossings only flips edge signs") {
    auto tp = diagram(kTPrime);
    auto c1 = build_cube(tp, 1);
    std::vector<std::size_t> perm{1, 0};
    auto c2 = build_cube(tp, 1, &perm);
    REQUIRE(c1.edges_from.size() == c2.edges_from.size());
    for (std::size_t v = 0; v < c1.edges_from.size(); ++v) {
        REQUIRE(c1.edges_from[v].size() == c2.edges_from[v].size());
        for (std::size_t e = 0; e < c1.edges_from[v].size(); ++e) {
            CHECK(c1.edges_from[v][e].crossing == c2.edges_from[v][e].crossing);
            CHECK(c1.edges_from[v][e].saddle.kind ==
                  c2.edges_from[v][e].saddle.kind);
        }
    }
    // with the swapped numbering the sign-carrying edge moves
    auto sign_of = [](const TangleCube& c, std::uint32_t v, std::size_t j) {
        for (const auto& e : c.edges_from[v])
            if (e.crossing == j) return e.sign;
        return 0;
    };
    CHECK(sign_of(c1, 0b01, 1) == -1);
    CHECK(sign_of(c2, 0b01, 1) == 1);
    CHECK(sign_of(c1, 0b10, 0) == 1);
    CHECK(sign_of(c2, 0b10, 0) == -1);
}

TEST_CASE("epsilon = -1 flips the saddle variants") {
    auto tp = diagram(kTPrime);
    auto rp0 = resolve(tp, 0b00, 1);
    auto rp1 = resolve(tp, 0b01, 1);
    auto rm0 = resolve(tp, 0b00, -1);
    auto rm1 = resolve(tp, 0b01, -1);
    auto sp = saddle_classify(tp, rp0, rp1, 0, 1);
    auto sm = saddle_classify(tp, rm0, rm1, 0, -1);
    CHECK(sp.variant_x != sm.variant_x);
}
