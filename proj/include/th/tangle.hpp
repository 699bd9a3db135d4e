#pragma once

// Oriented tangle diagrams as slice words: parsing, checkerboard colouring,
// crossing signs, smoothings/resolutions, saddle classification and the cube
// of resolutions.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "th/common.hpp"

namespace th::tangle {

enum class Dir { up, down };
inline Dir flip(Dir d) { return d == Dir::up ? Dir::down : Dir::up; }

enum class SliceKind { cap, cup, cross_over, cross_under };

struct Slice {
    SliceKind kind;
    int pos = 1;                // 1-based from the left
    Dir cup_left = Dir::up;     // orientation of the left leg (cup only)
};

struct SliceWord {
    int in_count = 0;
    std::vector<Dir> in_orientations;
    std::vector<Slice> slices;
};

// Format: `tangle v1` / `in <p>` / `orient <u|d>...` (iff p>0) /
// CAP|CUP|XO|XU lines / `end`; '#' starts a comment.
SliceWord parse_slice_word(const std::string& text);

struct Crossing {
    std::size_t slice_index = 0; // lower level of the crossing
    int pos = 1;
    bool over_left = true;       // XO: strand entering at `pos` goes over
    int sign = 0;                // +1 or -1
};

// Diagram with orientations propagated through every level.
struct TangleDiagram {
    SliceWord word;
    std::vector<std::vector<Dir>> level_dirs; // levels 0..L, L = #slices
    std::vector<Crossing> crossings;          // in slice order, numbered 1..n
    int n_plus = 0, n_minus = 0;

    std::size_t levels() const { return level_dirs.size(); }     // L+1
    int width(std::size_t level) const { return (int)level_dirs[level].size(); }
    int in_points() const { return word.in_count; }
    int out_points() const { return width(levels() - 1); }
    std::size_t n_crossings() const { return crossings.size(); }
};

TangleDiagram analyze(const SliceWord& w);

// Shading of the region with `strands_west` strands strictly to its west.
bool shaded(int strands_west, int epsilon);

struct Point {
    int level = -1;
    int pos = 0; // 1-based
    auto operator<=>(const Point&) const = default;
};

struct Component {
    bool is_circle = false;
    Point key;            // minimal (level, pos) the component visits
    Point neg_end, pos_end; // arc only: the '-' and '+' boundary points
};

struct Resolution {
    std::uint32_t alpha = 0; // bit j-1 = 1-smoothing of crossing j
    std::vector<Component> comps; // sorted by key
    std::vector<std::vector<int>> comp_of; // [level][pos-1] -> comp index
    int comp_at(const Point& p) const { return comp_of[p.level][p.pos - 1]; }
    std::size_t n_circles() const;
    std::size_t n_arcs() const { return comps.size() - n_circles(); }
};

Resolution resolve(const TangleDiagram& t, std::uint32_t alpha, int epsilon);

enum class SaddleKind { arc_arc, arc_to_circle_arc, circle_arc_to_arc,
                        merge_cc, split_cc };

// Saddle along crossing j from resolution alpha (bit j off) to alpha|bit j.
// Role order is (left, right) for a vertical smoothing and (bottom, top) for
// a horizontal one, at the crossing's four local points.
struct SaddleDescriptor {
    std::size_t crossing = 0;  // 0-based index into diagram.crossings
    SaddleKind kind{};
    bool variant_x = true;     // east/west wedges shaded at the crossing
    std::vector<int> src_roles;
    std::vector<int> dst_roles; // arc_to_circle_arc: {circle, arc}
    std::vector<std::pair<int, int>> untouched; // (src comp, dst comp)
};

SaddleDescriptor saddle_classify(const TangleDiagram& t, const Resolution& src,
                                 const Resolution& dst, std::size_t j,
                                 int epsilon);

struct CubeEdge {
    std::uint32_t src_alpha = 0;
    std::size_t crossing = 0;
    int sign = 1; // (-1)^{#{k in alpha : num(k) < num(j)}}
    SaddleDescriptor saddle;
};

struct TangleCube {
    TangleDiagram diagram;
    int epsilon = 1;
    std::vector<Resolution> vertices;        // indexed by alpha bitmask
    std::vector<std::vector<CubeEdge>> edges_from; // per source vertex
};

// `numbering`, when given, is a permutation of {0..n-1} used only for the
// edge signs (crossing j treated as number numbering[j]).
TangleCube build_cube(const TangleDiagram& t, int epsilon,
                      const std::vector<std::size_t>* numbering = nullptr);

} // namespace th::tangle
