#include "th/tangle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

namespace th::tangle {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) out.push_back(tok);
    }
    return out;
}

Dir parse_dir(const std::string& s) {
    if (s == "u") return Dir::up;
    if (s == "d") return Dir::down;
    throw input_error("MalformedInput: expected orientation token u|d, got '" + s + "'");
}

int parse_pos(const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size() || v < 1) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw input_error("MalformedInput: bad position '" + s + "'");
    }
}

} // namespace

SliceWord parse_slice_word(const std::string& text) {
    std::vector<std::string> tok = tokenize(text);
    std::size_t i = 0;
    auto need = [&](const char* what) -> const std::string& {
        if (i >= tok.size())
            throw input_error(std::string("MalformedInput: unexpected end, expected ") + what);
        return tok[i++];
    };
    if (need("'tangle'") != "tangle" || need("'v1'") != "v1")
        throw input_error("MalformedInput: file must start with 'tangle v1'");
    if (need("'in'") != "in") throw input_error("MalformedInput: expected 'in <p>'");
    SliceWord w;
    const std::string& pc = need("strand count");
    try {
        std::size_t used = 0;
        w.in_count = std::stoi(pc, &used);
        if (used != pc.size() || w.in_count < 0) throw std::invalid_argument(pc);
    } catch (const std::exception&) {
        throw input_error("MalformedInput: bad strand count '" + pc + "'");
    }
    if (w.in_count > 0) {
        if (need("'orient'") != "orient")
            throw input_error("MalformedInput: expected 'orient' line");
        for (int k = 0; k < w.in_count; ++k)
            w.in_orientations.push_back(parse_dir(need("orientation token")));
    }
    int width = w.in_count;
    for (;;) {
        const std::string& kw = need("slice or 'end'");
        if (kw == "end") break;
        Slice s;
        if (kw == "CAP") s.kind = SliceKind::cap;
        else if (kw == "CUP") s.kind = SliceKind::cup;
        else if (kw == "XO") s.kind = SliceKind::cross_over;
        else if (kw == "XU") s.kind = SliceKind::cross_under;
        else throw input_error("MalformedInput: unknown keyword '" + kw + "'");
        s.pos = parse_pos(need("position"));
        if (s.kind == SliceKind::cup) {
            s.cup_left = parse_dir(need("cup orientation"));
            if (s.pos > width + 1)
                throw input_error("MalformedInput: CUP position out of range");
            width += 2;
        } else {
            if (s.pos + 1 > width)
                throw input_error("MalformedInput: " + kw + " position out of range");
            if (s.kind == SliceKind::cap) width -= 2;
        }
        w.slices.push_back(s);
    }
    if (i != tok.size())
        throw input_error("MalformedInput: trailing tokens after 'end'");
    if ((w.in_count + width) % 2 != 0)
        throw internal_error("boundary point count parity violated");
    return w;
}

TangleDiagram analyze(const SliceWord& w) {
    if ((int)w.in_orientations.size() != w.in_count)
        throw input_error("MalformedInput: orientation count mismatch");
    TangleDiagram t;
    t.word = w;
    std::vector<Dir> dirs = w.in_orientations;
    t.level_dirs.push_back(dirs);
    for (std::size_t s = 0; s < w.slices.size(); ++s) {
        const Slice& sl = w.slices[s];
        int i = sl.pos;
        switch (sl.kind) {
            case SliceKind::cap:
                if (dirs[i - 1] == dirs[i])
                    throw input_error("OrientationMismatch: CAP joins two strands "
                                      "with the same orientation");
                dirs.erase(dirs.begin() + (i - 1), dirs.begin() + (i + 1));
                break;
            case SliceKind::cup:
                dirs.insert(dirs.begin() + (i - 1), {sl.cup_left, flip(sl.cup_left)});
                break;
            case SliceKind::cross_over:
            case SliceKind::cross_under: {
                Crossing c;
                c.slice_index = s;
                c.pos = i;
                c.over_left = (sl.kind == SliceKind::cross_over);
                // travel vectors toward the upper level: strand entering at
                // position i heads NE (if oriented up), the one at i+1 NW.
                int lx = 1, ly = 1, rx = -1, ry = 1;
                if (dirs[i - 1] == Dir::down) { lx = -lx; ly = -ly; }
                if (dirs[i] == Dir::down) { rx = -rx; ry = -ry; }
                int ox = lx, oy = ly, ux = rx, uy = ry;
                if (!c.over_left) { std::swap(ox, ux); std::swap(oy, uy); }
                int det = ox * uy - oy * ux;
                if (det == 0) throw internal_error("degenerate crossing frame");
                c.sign = det > 0 ? 1 : -1;
                (c.sign > 0 ? t.n_plus : t.n_minus)++;
                t.crossings.push_back(c);
                std::swap(dirs[i - 1], dirs[i]);
                break;
            }
        }
        t.level_dirs.push_back(dirs);
    }
    if (t.n_crossings() > 30) throw input_error("too many crossings (max 30)");
    return t;
}

bool shaded(int strands_west, int epsilon) {
    return (strands_west % 2 == 0) == (epsilon > 0);
}

std::size_t Resolution::n_circles() const {
    return (std::size_t)std::count_if(comps.begin(), comps.end(),
                                      [](const Component& c) { return c.is_circle; });
}

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

// Is crossing j drawn as the vertical (identity) smoothing in resolution
// alpha?  XO: 0-smoothing vertical; XU: the reverse.
bool vertical_smoothing(const Crossing& c, std::uint32_t alpha, std::size_t j) {
    bool one = (alpha >> j) & 1u;
    return c.over_left ? !one : one;
}

} // namespace

Resolution resolve(const TangleDiagram& t, std::uint32_t alpha, int epsilon) {
    const std::size_t L = t.levels();
    std::vector<std::size_t> offset(L + 1, 0);
    for (std::size_t l = 0; l < L; ++l) offset[l + 1] = offset[l] + t.width(l);
    auto pid = [&](int level, int pos) { return (int)(offset[level] + pos - 1); };
    Dsu dsu(offset[L]);

    std::size_t cross_idx = 0;
    for (std::size_t s = 0; s + 1 < L; ++s) {
        const Slice& sl = t.word.slices[s];
        int wlo = t.width(s);
        int i = sl.pos;
        auto straight = [&](int lo, int hi, int shift) {
            for (int j = lo; j <= hi; ++j) dsu.join(pid(s, j), pid(s + 1, j + shift));
        };
        switch (sl.kind) {
            case SliceKind::cap:
                dsu.join(pid(s, i), pid(s, i + 1));
                straight(1, i - 1, 0);
                straight(i + 2, wlo, -2);
                break;
            case SliceKind::cup:
                dsu.join(pid(s + 1, i), pid(s + 1, i + 1));
                straight(1, i - 1, 0);
                straight(i, wlo, 2);
                break;
            case SliceKind::cross_over:
            case SliceKind::cross_under: {
                bool vert = vertical_smoothing(t.crossings[cross_idx], alpha, cross_idx);
                ++cross_idx;
                straight(1, i - 1, 0);
                straight(i + 2, wlo, 0);
                if (vert) {
                    dsu.join(pid(s, i), pid(s + 1, i));
                    dsu.join(pid(s, i + 1), pid(s + 1, i + 1));
                } else {
                    dsu.join(pid(s, i), pid(s, i + 1));
                    dsu.join(pid(s + 1, i), pid(s + 1, i + 1));
                }
                break;
            }
        }
    }

    // Gather components keyed by root, tracking minimal coordinate and
    // boundary incidences.
    struct Raw {
        Point key{1 << 30, 1 << 30};
        std::vector<std::pair<Point, bool>> boundary; // (point, is_bottom)
    };
    std::map<int, Raw> raw;
    const int top = (int)L - 1;
    for (int level = 0; level <= top; ++level)
        for (int pos = 1; pos <= t.width(level); ++pos) {
            Raw& r = raw[dsu.find(pid(level, pos))];
            r.key = std::min(r.key, Point{level, pos});
            // a zero-slice diagram's points serve as both bottom and top
            if (level == 0) r.boundary.push_back({{level, pos}, true});
            if (level == top) r.boundary.push_back({{level, pos}, false});
        }

    Resolution res;
    res.alpha = alpha;
    std::vector<std::pair<Point, int>> order; // (key, root)
    for (auto& [root, r] : raw) order.push_back({r.key, root});
    std::sort(order.begin(), order.end());
    std::map<int, int> index_of_root;
    for (auto& [key, root] : order) {
        Raw& r = raw[root];
        Component c;
        c.key = key;
        if (r.boundary.empty()) {
            c.is_circle = true;
        } else {
            if (r.boundary.size() != 2)
                throw internal_error("arc with " + std::to_string(r.boundary.size()) +
                                     " boundary points");
            int nneg = 0;
            for (const auto& [p, is_bottom] : r.boundary) {
                bool sh = shaded(p.pos - 1, epsilon);
                // bottom points are '-' iff the region to their west is
                // shaded; top points are '+' iff it is.
                bool minus = is_bottom ? sh : !sh;
                if (minus) { c.neg_end = p; ++nneg; }
                else c.pos_end = p;
            }
            if (nneg != 1)
                throw internal_error("arc endpoint signs not one '-' one '+'");
        }
        index_of_root[root] = (int)res.comps.size();
        res.comps.push_back(c);
    }
    if (t.in_points() + t.out_points() > 0 &&
        res.n_arcs() != (std::size_t)(t.in_points() + t.out_points()) / 2)
        throw internal_error("arc count mismatch");

    res.comp_of.resize(L);
    for (std::size_t level = 0; level < L; ++level) {
        res.comp_of[level].resize(t.width(level));
        for (int pos = 1; pos <= t.width(level); ++pos)
            res.comp_of[level][pos - 1] = index_of_root[dsu.find(pid(level, pos))];
    }
    return res;
}

SaddleDescriptor saddle_classify(const TangleDiagram& t, const Resolution& src,
                                 const Resolution& dst, std::size_t j,
                                 int epsilon) {
    if ((src.alpha >> j) & 1u) throw internal_error("saddle from a 1-smoothing");
    const Crossing& c = t.crossings[j];
    const int s = (int)c.slice_index, i = c.pos;
    SaddleDescriptor sd;
    sd.crossing = j;
    sd.variant_x = shaded(i - 1, epsilon);

    auto roles = [&](const Resolution& r, bool vertical) -> std::pair<int, int> {
        if (vertical) return {r.comp_at({s, i}), r.comp_at({s, i + 1})};
        return {r.comp_at({s, i}), r.comp_at({s + 1, i})};
    };
    bool src_vert = vertical_smoothing(c, src.alpha, j);
    auto [s1, s2] = roles(src, src_vert);
    auto [t1, t2] = roles(dst, !src_vert);

    auto circ = [&](const Resolution& r, int k) { return r.comps[k].is_circle; };
    if (s1 != s2 && !circ(src, s1) && !circ(src, s2)) {
        sd.kind = SaddleKind::arc_arc;
        if (t1 == t2 || circ(dst, t1) || circ(dst, t2))
            throw internal_error("arc-arc saddle target is not two arcs");
        sd.src_roles = {s1, s2};
        sd.dst_roles = {t1, t2};
    } else if (s1 != s2 && circ(src, s1) != circ(src, s2)) {
        sd.kind = SaddleKind::circle_arc_to_arc;
        if (t1 != t2 || circ(dst, t1))
            throw internal_error("circle-arc saddle target is not one arc");
        sd.src_roles = circ(src, s1) ? std::vector<int>{s1, s2}
                                     : std::vector<int>{s2, s1};
        sd.dst_roles = {t1};
    } else if (s1 == s2 && !circ(src, s1)) {
        sd.kind = SaddleKind::arc_to_circle_arc;
        if (t1 == t2 || circ(dst, t1) == circ(dst, t2))
            throw internal_error("arc-split saddle target is not arc + circle");
        sd.src_roles = {s1};
        sd.dst_roles = circ(dst, t1) ? std::vector<int>{t1, t2}
                                     : std::vector<int>{t2, t1};
    } else if (s1 != s2) {
        sd.kind = SaddleKind::merge_cc;
        if (t1 != t2 || !circ(dst, t1))
            throw internal_error("circle merge target is not one circle");
        sd.src_roles = {s1, s2};
        sd.dst_roles = {t1};
    } else {
        sd.kind = SaddleKind::split_cc;
        if (t1 == t2 || !circ(dst, t1) || !circ(dst, t2))
            throw internal_error("circle split target is not two circles");
        sd.src_roles = {s1};
        sd.dst_roles = {t1, t2};
    }

    // Untouched components keep their canonical key across the saddle.
    std::map<Point, int> dst_by_key;
    for (int k = 0; k < (int)dst.comps.size(); ++k)
        if (k != t1 && k != t2) dst_by_key[dst.comps[k].key] = k;
    for (int k = 0; k < (int)src.comps.size(); ++k) {
        if (k == s1 || k == s2) continue;
        auto it = dst_by_key.find(src.comps[k].key);
        if (it == dst_by_key.end())
            throw internal_error("untouched component lost its canonical key");
        sd.untouched.push_back({k, it->second});
    }
    if (sd.untouched.size() + (s1 == s2 ? 1 : 2) != src.comps.size())
        throw internal_error("untouched component matching incomplete");
    return sd;
}

TangleCube build_cube(const TangleDiagram& t, int epsilon,
                      const std::vector<std::size_t>* numbering) {
    if (epsilon != 1 && epsilon != -1) throw input_error("epsilon must be +1 or -1");
    const std::size_t n = t.n_crossings();
    TangleCube cube;
    cube.diagram = t;
    cube.epsilon = epsilon;
    cube.vertices.resize(std::size_t(1) << n);
    cube.edges_from.resize(std::size_t(1) << n);
    std::vector<std::size_t> num(n);
    std::iota(num.begin(), num.end(), 0);
    if (numbering) {
        if (numbering->size() != n) throw input_error("bad crossing numbering");
        num = *numbering;
    }
    for (std::uint32_t a = 0; a < (1u << n); ++a)
        cube.vertices[a] = resolve(t, a, epsilon);
    for (std::uint32_t a = 0; a < (1u << n); ++a)
        for (std::size_t j = 0; j < n; ++j) {
            if ((a >> j) & 1u) continue;
            CubeEdge e;
            e.src_alpha = a;
            e.crossing = j;
            int lower = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (((a >> k) & 1u) && num[k] < num[j]) ++lower;
            e.sign = (lower % 2 == 0) ? 1 : -1;
            e.saddle = saddle_classify(t, cube.vertices[a],
                                       cube.vertices[a | (1u << j)], j, epsilon);
            cube.edges_from[a].push_back(e);
        }
    return cube;
}

} // namespace th::tangle
