#include "th/complex.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace th::complex {

using tangle::Resolution;
using tangle::SaddleDescriptor;
using tangle::SaddleKind;
using tangle::TangleCube;
using tangle::TangleDiagram;

// ----------------------------- basic types -------------------------------

const GradedSpace* FilteredChainComplex::term_at(int r) const {
    int i = r - r_min;
    if (i < 0 || i >= (int)terms.size()) return nullptr;
    return &terms[i];
}

Matrix FilteredChainComplex::diff_at(int r) const {
    int i = r - r_min;
    if (i >= 0 && i + 1 < (int)terms.size()) return diffs[i];
    const GradedSpace* src = term_at(r);
    const GradedSpace* dst = term_at(r + 1);
    return Matrix(field, dst ? dst->dim() : 0, src ? src->dim() : 0);
}

std::size_t BigradedDims::at(int k, int r) const {
    auto it = ranks.find({k, r});
    return it == ranks.end() ? 0 : it->second;
}

std::size_t BigradedDims::total() const {
    std::size_t s = 0;
    for (auto& [kr, v] : ranks) s += v;
    return s;
}

std::string BigradedDims::table() const {
    std::ostringstream os;
    os << "  r    k  rank\n";
    std::map<std::pair<int, int>, std::size_t> by_r; // (r, k)
    for (auto& [kr, v] : ranks) by_r[{kr.second, kr.first}] = v;
    for (auto& [rk, v] : by_r)
        os << std::setw(3) << rk.first << "  " << std::setw(3) << rk.second
           << "  " << v << "\n";
    return os.str();
}

namespace {

std::string monomial(long long c, int t_exp, int a_exp) {
    std::vector<std::string> parts;
    if (c != 1 || (t_exp == 0 && a_exp == 0)) parts.push_back(std::to_string(c));
    if (t_exp != 0) parts.push_back("t^" + std::to_string(t_exp));
    if (a_exp != 0) parts.push_back("A^" + std::to_string(a_exp));
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? "*" : "") + parts[i];
    return out;
}

std::string join_terms(const std::vector<std::pair<long long, std::string>>& terms) {
    if (terms.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        auto& [c, body] = terms[i];
        if (i == 0) out += (c < 0 ? "-" : "") + body;
        else out += (c < 0 ? " - " : " + ") + body;
    }
    return out;
}

} // namespace

std::string Polynomial2::str() const {
    std::vector<std::pair<long long, std::string>> terms;
    for (auto& [rk, c] : coeff)
        if (c != 0) terms.push_back({c, monomial(std::llabs(c), rk.first, rk.second)});
    return join_terms(terms);
}

std::string laurent_str(const LaurentA& p) {
    std::vector<std::pair<long long, std::string>> terms;
    for (auto& [k, c] : p)
        if (c != 0) terms.push_back({c, monomial(std::llabs(c), 0, k)});
    return join_terms(terms);
}

// ------------------------------ realization ------------------------------

namespace {

GradingMode combine_mode(const TangleAlgebra& alg, bool arcs_present) {
    std::vector<GradingMode> ms{alg.C.grading};
    if (arcs_present && alg.A) ms.push_back(alg.A->grading);
    for (auto m : ms)
        if (m == GradingMode::none) return GradingMode::none;
    for (auto m : ms)
        if (m == GradingMode::filtered) return GradingMode::filtered;
    return GradingMode::graded;
}

struct FactorInfo {
    std::size_t dim;
    const std::vector<int>* degrees;
    const std::vector<std::string>* names;
};

FactorInfo factor(const TangleAlgebra& alg, const tangle::Component& c) {
    const algebra::FrobeniusData& f = c.is_circle ? alg.C : *alg.A;
    return {f.dim, &f.degrees, &f.basis};
}

std::vector<std::size_t> strides(const std::vector<std::size_t>& dims) {
    std::vector<std::size_t> st(dims.size(), 1);
    for (int i = (int)dims.size() - 2; i >= 0; --i) st[i] = st[i + 1] * dims[i + 1];
    return st;
}

GradedSpace vertex_space(const TangleAlgebra& alg, const Resolution& res,
                         GradingMode mode, FieldSpec field) {
    GradedSpace g;
    g.field = field;
    std::vector<FactorInfo> fs;
    for (auto& c : res.comps) fs.push_back(factor(alg, c));
    std::size_t dim = 1;
    for (auto& f : fs) dim *= f.dim;
    g.degrees.resize(dim, 0);
    g.labels.resize(dim);
    int shift = 2 * std::popcount(res.alpha);
    std::vector<std::size_t> digits(fs.size(), 0);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        int deg = 0;
        std::string lab;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            deg += (*fs[i].degrees)[digits[i]];
            lab += (i ? "(x)" : "") + (*fs[i].names)[digits[i]];
        }
        if (fs.empty()) lab = "1";
        g.degrees[idx] = mode == GradingMode::none ? 0 : deg + shift;
        g.labels[idx] = lab;
        for (int i = (int)fs.size() - 1; i >= 0; --i) {
            if (++digits[i] < fs[i].dim) break;
            digits[i] = 0;
        }
    }
    return g;
}

// Local outputs of a saddle applied to the role values: list of
// (coefficient, role output values).
struct LocalTerm {
    Rat c;
    std::size_t o1 = 0, o2 = 0; // o2 unused for single-output kinds
};

std::vector<LocalTerm> local_map(const TangleAlgebra& alg,
                                 const SaddleDescriptor& sd,
                                 const std::vector<std::size_t>& in) {
    std::vector<LocalTerm> out;
    const algebra::FrobeniusData& C = alg.C;
    auto nz = [](const Rat& x) { return x.numerator() != 0; };
    switch (sd.kind) {
        case SaddleKind::merge_cc:
            for (std::size_t k = 0; k < C.dim; ++k)
                if (nz(C.mu[in[0]][in[1]][k])) out.push_back({C.mu[in[0]][in[1]][k], k});
            break;
        case SaddleKind::split_cc:
            for (std::size_t j = 0; j < C.dim; ++j)
                for (std::size_t k = 0; k < C.dim; ++k)
                    if (nz(C.delta[in[0]][j][k]))
                        out.push_back({C.delta[in[0]][j][k], j, k});
            break;
        case SaddleKind::circle_arc_to_arc: {
            const algebra::FrobeniusData& A = *alg.A;
            for (std::size_t k = 0; k < A.dim; ++k) {
                Rat c(0);
                for (std::size_t m = 0; m < A.dim; ++m)
                    if (alg.iota->entry_nonzero(m, in[0]))
                        c += alg.iota->at(m, in[0]) * A.mu[m][in[1]][k];
                c = linalg::to_field(A.field, c);
                if (nz(c)) out.push_back({c, k});
            }
            break;
        }
        case SaddleKind::arc_to_circle_arc: {
            const algebra::FrobeniusData& A = *alg.A;
            for (std::size_t c0 = 0; c0 < C.dim; ++c0)
                for (std::size_t q = 0; q < A.dim; ++q) {
                    Rat c(0);
                    for (std::size_t p = 0; p < A.dim; ++p)
                        if (nz(A.delta[in[0]][p][q]))
                            c += A.delta[in[0]][p][q] * alg.iota_star->at(c0, p);
                    c = linalg::to_field(A.field, c);
                    if (nz(c)) out.push_back({c, c0, q});
                }
            break;
        }
        case SaddleKind::arc_arc: {
            const algebra::FrobeniusData& A = *alg.A;
            std::size_t a = in[0], b = in[1];
            for (std::size_t o1 = 0; o1 < A.dim; ++o1)
                for (std::size_t o2 = 0; o2 < A.dim; ++o2) {
                    Rat c(0);
                    if (sd.variant_x) {
                        // d_X(a(x)b) = sum mu(a' (x) b) (x) a''
                        for (std::size_t p = 0; p < A.dim; ++p)
                            c += A.delta[a][p][o2] * A.mu[p][b][o1];
                    } else {
                        // d_Y(a(x)b) = sum b' (x) mu(a (x) b'')
                        for (std::size_t q = 0; q < A.dim; ++q)
                            c += A.delta[b][o1][q] * A.mu[a][q][o2];
                    }
                    c = linalg::to_field(A.field, c);
                    if (nz(c)) out.push_back({c, o1, o2});
                }
            break;
        }
    }
    return out;
}

Matrix realize_edge(const TangleAlgebra& alg, const Resolution& src,
                    const Resolution& dst, const SaddleDescriptor& sd,
                    FieldSpec field) {
    std::vector<std::size_t> sdims, ddims;
    for (auto& c : src.comps) sdims.push_back(factor(alg, c).dim);
    for (auto& c : dst.comps) ddims.push_back(factor(alg, c).dim);
    std::vector<std::size_t> sst = strides(sdims), dst_st = strides(ddims);
    std::size_t stot = 1, dtot = 1;
    for (auto d : sdims) stot *= d;
    for (auto d : ddims) dtot *= d;
    Matrix M(field, dtot, stot);

    std::vector<std::size_t> sdig(sdims.size(), 0);
    for (std::size_t col = 0; col < stot; ++col) {
        std::vector<std::size_t> in;
        for (int role : sd.src_roles) in.push_back(sdig[role]);
        std::vector<std::size_t> base(ddims.size(), 0);
        for (auto& [sc, dc] : sd.untouched) base[dc] = sdig[sc];
        for (const LocalTerm& t : local_map(alg, sd, in)) {
            std::vector<std::size_t> ddig = base;
            ddig[sd.dst_roles[0]] = t.o1;
            if (sd.dst_roles.size() == 2) ddig[sd.dst_roles[1]] = t.o2;
            std::size_t row = 0;
            for (std::size_t i = 0; i < ddig.size(); ++i) row += ddig[i] * dst_st[i];
            M.add_at(row, col, t.c);
        }
        for (int i = (int)sdims.size() - 1; i >= 0; --i) {
            if (++sdig[i] < sdims[i]) break;
            sdig[i] = 0;
        }
    }
    return M;
}

} // namespace

RealizedCube realize_cube(const TangleCube& cube, const TangleAlgebra& alg,
                          bool parallel) {
    RealizedCube rc;
    rc.cube = cube;
    rc.alg = alg;
    bool arcs = cube.diagram.in_points() + cube.diagram.out_points() > 0;
    if (arcs && !alg.knowledgeable())
        throw input_error("AlgebraNotKnowledgeable: diagram has arc components "
                          "but no (A, iota, iota*) data");
    if (cube.epsilon == -1 && rc.alg.A) rc.alg.A = algebra::opposite(*rc.alg.A);
    rc.mode = combine_mode(rc.alg, arcs);
    FieldSpec field = rc.alg.C.field;
    if (rc.alg.A && !(rc.alg.A->field == field))
        throw input_error("A and C live over different fields");

    const std::size_t nv = cube.vertices.size();
    rc.vertex_spaces.resize(nv);
    rc.edge_maps.resize(nv);
    for (std::size_t a = 0; a < nv; ++a) {
        rc.vertex_spaces[a] = vertex_space(rc.alg, cube.vertices[a], rc.mode, field);
        rc.edge_maps[a].resize(cube.edges_from[a].size());
    }
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t a = 0; a < nv; ++a)
        for (std::size_t e = 0; e < cube.edges_from[a].size(); ++e)
            tasks.push_back({a, e});
    (void)parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (long long ti = 0; ti < (long long)tasks.size(); ++ti) {
        auto [a, e] = tasks[ti];
        const tangle::CubeEdge& edge = cube.edges_from[a][e];
        rc.edge_maps[a][e] =
            realize_edge(rc.alg, cube.vertices[a],
                         cube.vertices[a | (1u << edge.crossing)], edge.saddle,
                         field);
    }
    return rc;
}

FilteredChainComplex total_complex(const RealizedCube& rc, bool check_squares) {
    const TangleDiagram& t = rc.cube.diagram;
    const std::size_t n = t.n_crossings();
    const int n_minus = t.n_minus, n_plus = t.n_plus;
    FieldSpec field = rc.alg.C.field;

    if (check_squares) {
        for (std::uint32_t a = 0; a < (1u << n); ++a)
            for (std::size_t e1 = 0; e1 < rc.cube.edges_from[a].size(); ++e1)
                for (std::size_t e2 = e1 + 1; e2 < rc.cube.edges_from[a].size(); ++e2) {
                    std::size_t j = rc.cube.edges_from[a][e1].crossing;
                    std::size_t l = rc.cube.edges_from[a][e2].crossing;
                    auto find_edge = [&](std::uint32_t v, std::size_t cr) -> const Matrix& {
                        for (std::size_t e = 0; e < rc.cube.edges_from[v].size(); ++e)
                            if (rc.cube.edges_from[v][e].crossing == cr)
                                return rc.edge_maps[v][e];
                        throw internal_error("missing cube edge");
                    };
                    Matrix lhs = find_edge(a | (1u << j), l) * rc.edge_maps[a][e1];
                    Matrix rhs = find_edge(a | (1u << l), j) * rc.edge_maps[a][e2];
                    if (!(lhs == rhs))
                        throw internal_error("NonCommutingSquare at alpha=" +
                                             std::to_string(a) + " j=" + std::to_string(j) +
                                             " l=" + std::to_string(l));
                }
    }

    // heights 0..n; alphas in ascending numeric order within a height
    std::vector<std::vector<std::uint32_t>> by_height(n + 1);
    for (std::uint32_t a = 0; a < (1u << n); ++a)
        by_height[std::popcount(a)].push_back(a);
    std::vector<std::size_t> offset(std::size_t(1) << n, 0);

    FilteredChainComplex c;
    c.field = field;
    c.mode = rc.mode == GradingMode::none ? GradingMode::graded : rc.mode;
    c.r_min = -n_minus;
    int global_shift = rc.mode == GradingMode::none ? 0 : 2 * n_plus - 4 * n_minus;
    for (std::size_t h = 0; h <= n; ++h) {
        GradedSpace g;
        g.field = field;
        for (std::uint32_t a : by_height[h]) {
            offset[a] = g.degrees.size();
            const GradedSpace& v = rc.vertex_spaces[a];
            for (std::size_t i = 0; i < v.dim(); ++i) {
                g.degrees.push_back(v.degrees[i] + global_shift);
                g.labels.push_back("a" + std::to_string(a) + ":" + v.labels[i]);
            }
        }
        c.terms.push_back(std::move(g));
    }
    int flip = (n_minus % 2 == 0) ? 1 : -1; // the [-n_minus] shift
    for (std::size_t h = 0; h < n; ++h) {
        Matrix d(field, c.terms[h + 1].dim(), c.terms[h].dim());
        for (std::uint32_t a : by_height[h])
            for (std::size_t e = 0; e < rc.cube.edges_from[a].size(); ++e) {
                const tangle::CubeEdge& edge = rc.cube.edges_from[a][e];
                const Matrix& M = rc.edge_maps[a][e];
                Rat s(edge.sign * flip);
                std::size_t roff = offset[a | (1u << edge.crossing)], coff = offset[a];
                for (std::size_t r = 0; r < M.rows(); ++r)
                    for (std::size_t col = 0; col < M.cols(); ++col)
                        if (M.entry_nonzero(r, col))
                            d.add_at(roff + r, coff + col, s * M.at(r, col));
            }
        c.diffs.push_back(std::move(d));
    }
    return c;
}

FilteredChainComplex tangle_complex(const TangleDiagram& t,
                                    const TangleAlgebra& alg, int epsilon,
                                    bool parallel) {
    return total_complex(realize_cube(tangle::build_cube(t, epsilon), alg, parallel));
}

AxiomReport verify_complex(const FilteredChainComplex& c) {
    AxiomReport rep;
    for (std::size_t i = 0; i + 1 < c.diffs.size(); ++i) {
        algebra::AxiomCheck chk{"d_squared_r" + std::to_string(c.r_min + (int)i), true, ""};
        if (!(c.diffs[i + 1] * c.diffs[i]).is_zero()) {
            chk.ok = false;
            chk.detail = "d^2 != 0 out of cohomological degree " +
                         std::to_string(c.r_min + (int)i);
        }
        rep.checks.push_back(chk);
    }
    for (std::size_t i = 0; i < c.diffs.size(); ++i) {
        algebra::AxiomCheck chk{"degree_r" + std::to_string(c.r_min + (int)i), true, ""};
        const Matrix& d = c.diffs[i];
        for (std::size_t r = 0; r < d.rows() && chk.ok; ++r)
            for (std::size_t col = 0; col < d.cols() && chk.ok; ++col)
                if (d.entry_nonzero(r, col)) {
                    int in = c.terms[i].degrees[col], out = c.terms[i + 1].degrees[r];
                    bool ok = c.mode == GradingMode::filtered ? out >= in : out == in;
                    if (!ok) {
                        chk.ok = false;
                        chk.detail = "entry (" + std::to_string(r) + "," +
                                     std::to_string(col) + ") deg " +
                                     std::to_string(in) + " -> " + std::to_string(out);
                    }
                }
        rep.checks.push_back(chk);
    }
    return rep;
}

// ------------------------------- homology --------------------------------

namespace {

// columns of the identity at generators of degree >= k
Matrix filtration_inclusion(const GradedSpace& g, int k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < g.dim(); ++i)
        if (g.degrees[i] >= k) idx.push_back(i);
    Matrix inc(g.field, g.dim(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) inc.set(idx[j], j, Rat(1));
    return inc;
}

} // namespace

BigradedDims homology_bigraded(const FilteredChainComplex& c, bool parallel) {
    BigradedDims out;
    for (int r = c.r_min; r <= c.r_max(); ++r) {
        const GradedSpace& g = *c.term_at(r);
        if (g.dim() == 0) continue;
        Matrix d = c.diff_at(r);
        Matrix prev = c.diff_at(r - 1);
        std::vector<int> ks(g.degrees.begin(), g.degrees.end());
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        // dim F^k H^r for each distinct k, then take successive quotients
        std::vector<std::size_t> fk(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i) {
            Matrix inc = filtration_inclusion(g, ks[i]);
            Matrix ker = (d * inc).kernel(parallel);
            fk[i] = linalg::image_membership_rank(inc * ker, prev, parallel);
        }
        for (std::size_t i = 0; i < ks.size(); ++i) {
            std::size_t upper = (i + 1 < ks.size()) ? fk[i + 1] : 0;
            if (fk[i] > upper) out.ranks[{ks[i], r}] = fk[i] - upper;
        }
    }
    return out;
}

Polynomial2 poincare_polynomial(const BigradedDims& dims) {
    Polynomial2 p;
    for (auto& [kr, rank] : dims.ranks)
        if (rank) p.coeff[{kr.second, kr.first}] = (long long)rank;
    return p;
}

LaurentA graded_euler_characteristic(const FilteredChainComplex& c) {
    LaurentA chi;
    for (std::size_t i = 0; i < c.terms.size(); ++i) {
        int r = c.r_min + (int)i;
        long long sgn = (((r % 2) + 2) % 2 == 0) ? 1 : -1;
        for (int deg : c.terms[i].degrees) chi[deg] += sgn;
    }
    std::erase_if(chi, [](const auto& kv) { return kv.second == 0; });
    return chi;
}

// --------------------------- Kauffman bracket ----------------------------

namespace {

LaurentA lmul(const LaurentA& a, const LaurentA& b) {
    LaurentA out;
    for (auto& [ka, ca] : a)
        for (auto& [kb, cb] : b) out[ka + kb] += ca * cb;
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

// Sweep-based circle counter for one smoothing state (no union-find).
long long sweep_circles(const TangleDiagram& t, std::uint32_t alpha) {
    std::vector<int> open; // strand labels left to right
    int next = 0;
    long long circles = 0;
    auto do_cap = [&](int i) {
        int a = open[i - 1], b = open[i];
        if (a == b) ++circles;
        else
            for (int& x : open)
                if (x == b) x = a;
        open.erase(open.begin() + (i - 1), open.begin() + (i + 1));
    };
    auto do_cup = [&](int i) {
        open.insert(open.begin() + (i - 1), {next, next});
        ++next;
    };
    std::size_t cross_idx = 0;
    for (const tangle::Slice& sl : t.word.slices) {
        switch (sl.kind) {
            case tangle::SliceKind::cap: do_cap(sl.pos); break;
            case tangle::SliceKind::cup: do_cup(sl.pos); break;
            case tangle::SliceKind::cross_over:
            case tangle::SliceKind::cross_under: {
                bool one = (alpha >> cross_idx) & 1u;
                bool vertical = (sl.kind == tangle::SliceKind::cross_over) ? !one : one;
                ++cross_idx;
                if (!vertical) {
                    do_cap(sl.pos);
                    do_cup(sl.pos);
                }
                break;
            }
        }
    }
    if (!open.empty()) throw internal_error("link sweep left open strands");
    return circles;
}

} // namespace

LaurentA kauffman_bracket(const TangleDiagram& t) {
    if (t.in_points() != 0 || t.out_points() != 0)
        throw input_error("NotALink: Kauffman bracket needs an empty boundary");
    const std::size_t n = t.n_crossings();
    LaurentA total;
    const LaurentA loop{{2, 1}, {-2, 1}}; // q + q^-1, q = A^2
    for (std::uint32_t a = 0; a < (1u << n); ++a) {
        int h = std::popcount(a);
        LaurentA term{{2 * h, (h % 2 == 0) ? 1 : -1}}; // (-q)^{|alpha|}
        long long circ = sweep_circles(t, a);
        for (long long i = 0; i < circ; ++i) term = lmul(term, loop);
        for (auto& [k, c] : term) total[k] += c;
    }
    std::erase_if(total, [](const auto& kv) { return kv.second == 0; });
    return total;
}

// --------------------------- spectral sequence ---------------------------

namespace {

// Columns spanning Z_r^{k} in term index i (cohom degree r_min+i):
// F^k gens whose differential lands in filtration >= k+r.  r = -1 gives F^k.
Matrix z_space(const FilteredChainComplex& c, int r, int k, int i,
               bool parallel) {
    if (i < 0 || i >= (int)c.terms.size())
        return Matrix(c.field, 0, 0);
    const GradedSpace& g = c.terms[i];
    Matrix inc = filtration_inclusion(g, k);
    if (r < 0) return inc;
    Matrix d = c.diff_at(c.r_min + i);
    // rows of the target with degree < k+r must vanish
    std::vector<std::size_t> low;
    const GradedSpace* tgt = c.term_at(c.r_min + i + 1);
    if (tgt)
        for (std::size_t j = 0; j < tgt->dim(); ++j)
            if (tgt->degrees[j] < k + r) low.push_back(j);
    if (low.empty()) return inc;
    Matrix sub = (d * inc).rowsel(low);
    return inc * sub.kernel(parallel);
}

} // namespace

SpectralPage spectral_page(const FilteredChainComplex& c, int r, bool parallel) {
    if (r < 0) throw input_error("spectral page index must be >= 0");
    SpectralPage page;
    page.r = r;
    for (int i = 0; i < (int)c.terms.size(); ++i) {
        const GradedSpace& g = c.terms[i];
        if (g.dim() == 0) continue;
        int rc = c.r_min + i;
        Matrix d_in = c.diff_at(rc - 1);
        Matrix d_out = c.diff_at(rc);
        std::vector<int> ks(g.degrees.begin(), g.degrees.end());
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        for (int k : ks) {
            Matrix z = z_space(c, r, k, i, parallel);
            Matrix den_a = z_space(c, r - 1, k + 1, i, parallel);
            Matrix zin = z_space(c, r - 1, k - r + 1, i - 1, parallel);
            Matrix den_b = zin.cols() ? d_in * zin : Matrix(c.field, g.dim(), 0);
            Matrix den = den_a.cols() || den_b.cols()
                             ? (den_a.cols() ? (den_b.cols() ? den_a.hcat(den_b) : den_a)
                                             : den_b)
                             : Matrix(c.field, g.dim(), 0);
            std::size_t dim = z.cols() - den.rank(parallel);
            if (dim) page.dims.ranks[{k, rc}] = dim;
            if (dim && i + 1 < (int)c.terms.size()) {
                const GradedSpace& tg = c.terms[i + 1];
                Matrix dz = d_out * z;
                Matrix tden_a = z_space(c, r - 1, k + r + 1, i + 1, parallel);
                Matrix zb = z_space(c, r - 1, k + 1, i, parallel);
                Matrix tden_b = zb.cols() ? d_out * zb : Matrix(c.field, tg.dim(), 0);
                Matrix tden = tden_a.cols() ? (tden_b.cols() ? tden_a.hcat(tden_b) : tden_a)
                                            : tden_b;
                if (!tden.cols()) tden = Matrix(c.field, tg.dim(), 0);
                std::size_t dr = linalg::image_membership_rank(dz, tden, parallel);
                if (dr) page.d_ranks[{k, rc}] = dr;
            }
        }
    }
    return page;
}

FilteredChainComplex degreewise_truncation(const FilteredChainComplex& c) {
    FilteredChainComplex out = c;
    out.mode = GradingMode::graded;
    for (std::size_t i = 0; i < out.diffs.size(); ++i) {
        Matrix d(out.field, out.terms[i + 1].dim(), out.terms[i].dim());
        for (std::size_t r = 0; r < d.rows(); ++r)
            for (std::size_t col = 0; col < d.cols(); ++col)
                if (out.diffs[i].entry_nonzero(r, col) &&
                    out.terms[i + 1].degrees[r] == out.terms[i].degrees[col])
                    d.set(r, col, out.diffs[i].at(r, col));
        out.diffs[i] = std::move(d);
    }
    return out;
}

// ----------------------------- link oracle -------------------------------

namespace {

// Independent bookkeeping: circles of one smoothing state via a sweep that
// records every (level, position) point of every circle.
struct OracleResolution {
    std::vector<std::pair<int, int>> keys;           // per circle, sorted order
    std::map<std::pair<int, int>, int> comp_of;      // point -> circle index
};

OracleResolution oracle_resolve(const TangleDiagram& t, std::uint32_t alpha) {
    struct Strand {
        std::pair<int, int> key;
        std::vector<std::pair<int, int>> points;
    };
    std::map<int, Strand> strands;
    std::vector<int> open;
    int next = 0;
    struct Circle {
        std::pair<int, int> key;
        std::vector<std::pair<int, int>> points;
    };
    std::vector<Circle> circles;

    auto do_cap = [&](int i) {
        int a = open[i - 1], b = open[i];
        if (a == b) {
            circles.push_back({strands[a].key, std::move(strands[a].points)});
            strands.erase(a);
        } else {
            Strand& sa = strands[a];
            Strand& sb = strands[b];
            sa.key = std::min(sa.key, sb.key);
            sa.points.insert(sa.points.end(), sb.points.begin(), sb.points.end());
            strands.erase(b);
            for (int& x : open)
                if (x == b) x = a;
        }
        open.erase(open.begin() + (i - 1), open.begin() + (i + 1));
    };
    auto do_cup = [&](int i, int level) {
        strands[next] = {{level, i}, {}};
        open.insert(open.begin() + (i - 1), {next, next});
        ++next;
    };

    std::size_t cross_idx = 0;
    for (std::size_t s = 0; s < t.word.slices.size(); ++s) {
        const tangle::Slice& sl = t.word.slices[s];
        int lvl = (int)s + 1;
        switch (sl.kind) {
            case tangle::SliceKind::cap: do_cap(sl.pos); break;
            case tangle::SliceKind::cup: do_cup(sl.pos, lvl); break;
            case tangle::SliceKind::cross_over:
            case tangle::SliceKind::cross_under: {
                bool one = (alpha >> cross_idx) & 1u;
                bool vertical = (sl.kind == tangle::SliceKind::cross_over) ? !one : one;
                ++cross_idx;
                if (!vertical) {
                    do_cap(sl.pos);
                    do_cup(sl.pos, lvl);
                }
                break;
            }
        }
        for (std::size_t j = 0; j < open.size(); ++j)
            strands[open[j]].points.push_back({lvl, (int)j + 1});
    }
    if (!open.empty()) throw internal_error("oracle sweep left open strands");

    std::sort(circles.begin(), circles.end(),
              [](const Circle& a, const Circle& b) { return a.key < b.key; });
    OracleResolution res;
    for (int i = 0; i < (int)circles.size(); ++i) {
        res.keys.push_back(circles[i].key);
        res.comp_of[circles[i].key] = i; // the creation point itself
        for (auto& p : circles[i].points) res.comp_of[p] = i;
    }
    return res;
}

} // namespace

BigradedDims khovanov_link_oracle(const TangleDiagram& t,
                                  const FrobeniusData& C) {
    if (t.in_points() != 0 || t.out_points() != 0)
        throw input_error("NotALink: the closed oracle needs an empty boundary");
    if (!C.is_commutative())
        throw input_error("link oracle needs a commutative Frobenius algebra");
    const std::size_t n = t.n_crossings();
    const FieldSpec field = C.field;
    bool graded = C.grading != GradingMode::none;

    std::vector<OracleResolution> res(std::size_t(1) << n);
    for (std::uint32_t a = 0; a < (1u << n); ++a) res[a] = oracle_resolve(t, a);

    FilteredChainComplex c;
    c.field = field;
    c.mode = C.grading == GradingMode::filtered ? GradingMode::filtered
                                                : GradingMode::graded;
    c.r_min = -t.n_minus;
    int gshift = graded ? 2 * t.n_plus - 4 * t.n_minus : 0;

    std::vector<std::vector<std::uint32_t>> by_height(n + 1);
    for (std::uint32_t a = 0; a < (1u << n); ++a)
        by_height[std::popcount(a)].push_back(a);
    std::vector<std::size_t> offset(std::size_t(1) << n, 0);
    auto vdim = [&](std::uint32_t a) {
        std::size_t d = 1;
        for (std::size_t i = 0; i < res[a].keys.size(); ++i) d *= C.dim;
        return d;
    };
    for (std::size_t h = 0; h <= n; ++h) {
        GradedSpace g;
        g.field = field;
        for (std::uint32_t a : by_height[h]) {
            offset[a] = g.degrees.size();
            std::size_t nc = res[a].keys.size(), dim = vdim(a);
            std::vector<std::size_t> dig(nc, 0);
            for (std::size_t idx = 0; idx < dim; ++idx) {
                int deg = 0;
                for (std::size_t f = 0; f < nc; ++f) deg += C.degrees[dig[f]];
                g.degrees.push_back(graded ? deg + 2 * (int)h + gshift : 0);
                g.labels.push_back("");
                for (int f = (int)nc - 1; f >= 0; --f) {
                    if (++dig[f] < C.dim) break;
                    dig[f] = 0;
                }
            }
        }
        c.terms.push_back(std::move(g));
    }

    int flip = (t.n_minus % 2 == 0) ? 1 : -1;
    for (std::size_t h = 0; h < n; ++h) {
        Matrix d(field, c.terms[h + 1].dim(), c.terms[h].dim());
        for (std::uint32_t a : by_height[h])
            for (std::size_t j = 0; j < n; ++j) {
                if ((a >> j) & 1u) continue;
                std::uint32_t b = a | (1u << j);
                const tangle::Crossing& cr = t.crossings[j];
                int s = (int)cr.slice_index, i = cr.pos;
                bool src_vert = cr.over_left ? ((a >> j) & 1u) == 0 : ((a >> j) & 1u) != 0;
                auto role_pts = [&](bool vert) {
                    return vert ? std::pair{std::pair{s, i}, std::pair{s, i + 1}}
                                : std::pair{std::pair{s, i}, std::pair{s + 1, i}};
                };
                auto [sp1, sp2] = role_pts(src_vert);
                auto [tp1, tp2] = role_pts(!src_vert);
                int s1 = res[a].comp_of.at(sp1), s2 = res[a].comp_of.at(sp2);
                int t1 = res[b].comp_of.at(tp1), t2 = res[b].comp_of.at(tp2);
                bool split = (s1 == s2);

                // untouched circles match by creation key
                std::vector<int> dst_of(res[a].keys.size(), -1);
                std::map<std::pair<int, int>, int> bykey;
                for (int q = 0; q < (int)res[b].keys.size(); ++q)
                    if (q != t1 && q != t2) bykey[res[b].keys[q]] = q;
                for (int q = 0; q < (int)res[a].keys.size(); ++q) {
                    if (q == s1 || q == s2) continue;
                    auto it = bykey.find(res[a].keys[q]);
                    if (it == bykey.end())
                        throw internal_error("oracle: untouched circle lost");
                    dst_of[q] = it->second;
                }

                int lower = 0;
                for (std::size_t kk = 0; kk < n; ++kk)
                    if (((a >> kk) & 1u) && kk < j) ++lower;
                Rat sign((lower % 2 == 0 ? 1 : -1) * flip);

                std::size_t nsrc = res[a].keys.size(), ndst = res[b].keys.size();
                std::vector<std::size_t> sdimv(nsrc, C.dim), ddimv(ndst, C.dim);
                std::vector<std::size_t> sst = strides(sdimv), dstst = strides(ddimv);
                std::vector<std::size_t> dig(nsrc, 0);
                std::size_t stot = vdim(a);
                for (std::size_t col = 0; col < stot; ++col) {
                    std::vector<std::size_t> base(ndst, 0);
                    for (std::size_t q = 0; q < nsrc; ++q)
                        if (dst_of[q] >= 0) base[dst_of[q]] = dig[q];
                    auto emit = [&](std::size_t v1, std::size_t v2, const Rat& cf) {
                        std::vector<std::size_t> dd = base;
                        dd[t1] = v1;
                        if (split || t1 != t2) dd[t2] = v2;
                        std::size_t row = 0;
                        for (std::size_t q = 0; q < ndst; ++q) row += dd[q] * dstst[q];
                        d.add_at(offset[b] + row, offset[a] + col, sign * cf);
                    };
                    if (split) {
                        std::size_t v = dig[s1];
                        for (std::size_t p = 0; p < C.dim; ++p)
                            for (std::size_t q = 0; q < C.dim; ++q)
                                if (C.delta[v][p][q].numerator() != 0)
                                    emit(p, q, C.delta[v][p][q]);
                    } else {
                        std::size_t v1 = dig[s1], v2 = dig[s2];
                        for (std::size_t k = 0; k < C.dim; ++k)
                            if (C.mu[v1][v2][k].numerator() != 0)
                                emit(k, k, C.mu[v1][v2][k]);
                    }
                    for (int f = (int)nsrc - 1; f >= 0; --f) {
                        if (++dig[f] < C.dim) break;
                        dig[f] = 0;
                    }
                }
            }
        c.diffs.push_back(std::move(d));
    }
    AxiomReport rep = verify_complex(c);
    if (!rep.ok()) throw internal_error("oracle complex invalid: " + rep.summary());
    return homology_bigraded(c);
}

} // namespace th::complex
