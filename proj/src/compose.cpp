#include "th/compose.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace th::compose {

using algebra::GradingMode;
using complex::GradedSpace;
using linalg::FieldSpec;
using tangle::Point;

namespace {

bool nz(const Rat& x) { return x.numerator() != 0; }

// ------------------------- incremental echelon ---------------------------

// Row-echelon span of inserted vectors; insert() reports whether the vector
// enlarged the span.
class Echelon {
  public:
    explicit Echelon(FieldSpec f) : f_(f) {}
    std::size_t rank() const { return by_pivot_.size(); }
    bool insert(std::vector<Rat> v) {
        for (auto& [p, r] : by_pivot_) {
            if (!nz(v[p])) continue;
            Rat c = v[p];
            for (std::size_t i = p; i < v.size(); ++i)
                v[i] = linalg::to_field(f_, v[i] - c * r[i]);
        }
        std::size_t p = v.size();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (nz(v[i])) { p = i; break; }
        if (p == v.size()) return false;
        Rat inv = linalg::to_field(f_, Rat(1) / v[p]);
        for (std::size_t i = p; i < v.size(); ++i)
            v[i] = linalg::to_field(f_, v[i] * inv);
        by_pivot_[p] = std::move(v);
        return true;
    }

  private:
    FieldSpec f_;
    std::map<std::size_t, std::vector<Rat>> by_pivot_;
};

std::vector<Rat> column_of(const Matrix& m, std::size_t c) {
    std::vector<Rat> v(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) v[r] = m.at(r, c);
    return v;
}

// lambda_f / rho_f on a tensor power of A: multiply factor `f` of `nfac`
// factors on the left (left=true) or right.  Shape d^nfac x (dimA * d^nfac).
Matrix factor_action(const FrobeniusData& a, std::size_t nfac, std::size_t f,
                     bool left) {
    std::size_t d = a.dim, tot = 1;
    for (std::size_t i = 0; i < nfac; ++i) tot *= d;
    std::vector<std::size_t> st(nfac, 1);
    for (int i = (int)nfac - 2; i >= 0; --i) st[i] = st[i + 1] * d;
    Matrix m(a.field, tot, d * tot);
    std::vector<std::size_t> dig(nfac, 0);
    for (std::size_t col = 0; col < tot; ++col) {
        for (std::size_t av = 0; av < d; ++av) {
            std::size_t x = dig[f];
            for (std::size_t k = 0; k < d; ++k) {
                const Rat& c = left ? a.mu[av][x][k] : a.mu[x][av][k];
                if (!nz(c)) continue;
                std::size_t row = col - x * st[f] + k * st[f];
                m.add_at(row, av * tot + col, c);
            }
        }
        for (int i = (int)nfac - 1; i >= 0; --i) {
            if (++dig[i] < d) break;
            dig[i] = 0;
        }
    }
    return m;
}

std::vector<int> power_degrees(const FrobeniusData& a, std::size_t nfac, int shift) {
    bool graded = a.grading != GradingMode::none;
    std::size_t tot = 1;
    for (std::size_t i = 0; i < nfac; ++i) tot *= a.dim;
    std::vector<int> deg(tot, 0);
    if (!graded) return deg;
    std::vector<std::size_t> dig(nfac, 0);
    for (std::size_t i = 0; i < tot; ++i) {
        int s = shift;
        for (std::size_t f = 0; f < nfac; ++f) s += a.degrees[dig[f]];
        deg[i] = s;
        for (int f = (int)nfac - 1; f >= 0; --f) {
            if (++dig[f] < a.dim) break;
            dig[f] = 0;
        }
    }
    return deg;
}

GradingMode block_mode(const FrobeniusData& a) {
    return a.grading == GradingMode::filtered ? GradingMode::filtered
                                              : GradingMode::graded;
}

// ----------------------------- model cubes -------------------------------

std::vector<std::size_t> factor_dims(const ModelContext& ctx,
                                     const ModelVertex& v) {
    std::vector<std::size_t> d;
    d.reserve(v.factors.size());
    for (const auto& f : v.factors) d.push_back(f.is_circle ? ctx.c.dim : ctx.a.dim);
    return d;
}

std::size_t dims_prod(const std::vector<std::size_t>& d) {
    std::size_t t = 1;
    for (std::size_t x : d) t *= x;
    return t;
}

std::size_t vertex_dim(const ModelContext& ctx, const ModelVertex& v) {
    return dims_prod(factor_dims(ctx, v));
}

// I_pre (x) m (x) I_post on the given slot; m may change the slot dimension.
Matrix on_slot(FieldSpec f, const std::vector<std::size_t>& dims,
               std::size_t slot, const Matrix& m) {
    std::size_t pre = 1, post = 1;
    for (std::size_t i = 0; i < slot; ++i) pre *= dims[i];
    for (std::size_t i = slot + 1; i < dims.size(); ++i) post *= dims[i];
    return Matrix::identity(f, pre).kron(m).kron(Matrix::identity(f, post));
}

// dim_v x (dimA * dim_v) multiplication action on one arc factor.
Matrix vertex_action(const ModelContext& ctx, const ModelVertex& v,
                     std::size_t slot, bool left) {
    const FrobeniusData& a = ctx.a;
    auto dims = factor_dims(ctx, v);
    std::size_t D = dims_prod(dims);
    Matrix out(a.field, D, a.dim * D);
    for (std::size_t av = 0; av < a.dim; ++av) {
        Matrix b(a.field, a.dim, a.dim);
        for (std::size_t x = 0; x < a.dim; ++x)
            for (std::size_t k = 0; k < a.dim; ++k) {
                const Rat& c = left ? a.mu[av][x][k] : a.mu[x][av][k];
                if (nz(c)) b.add_at(k, x, c);
            }
        Matrix m = on_slot(a.field, dims, slot, b);
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m.entry_nonzero(r, c)) out.add_at(r, av * D + c, m.at(r, c));
    }
    return out;
}

// The differential of a crossing block: (mu(x)id)(id(x)tau)(Delta(x)id) for
// the X variant, its mirror for Y, as a dimA^2 x dimA^2 matrix on x(x)y.
Matrix crossing_diff(const FrobeniusData& a, bool variant_x) {
    std::size_t d = a.dim, tot = d * d;
    Matrix diff(a.field, tot, tot);
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = 0; y < d; ++y)
            for (std::size_t o1 = 0; o1 < d; ++o1)
                for (std::size_t o2 = 0; o2 < d; ++o2) {
                    Rat cf(0);
                    if (variant_x) {
                        for (std::size_t p = 0; p < d; ++p)
                            cf += a.delta[x][p][o2] * a.mu[p][y][o1];
                    } else {
                        for (std::size_t q = 0; q < d; ++q)
                            cf += a.delta[y][o1][q] * a.mu[x][q][o2];
                    }
                    cf = linalg::to_field(a.field, cf);
                    if (nz(cf)) diff.add_at(o1 * d + o2, x * d + y, cf);
                }
    return diff;
}

// Normalized circle-closing map C <- A: kills commutators and splits the
// circle-opening section iota (phi(iota(c)) = c).
std::optional<Matrix> make_circle_close(const ModelContext& ctx,
                                        const std::vector<Rat>& a_inv) {
    Matrix phi0 = ctx.iota_star * ctx.a.left_mult(a_inv);
    Matrix rho = phi0 * ctx.iota;
    auto rinv = rho.solve(Matrix::identity(ctx.a.field, ctx.c.dim));
    if (!rinv) return std::nullopt;
    return *rinv * phi0;
}

struct StepMaps {
    Matrix phi; // new model vertex <- old vertex
    Matrix psi; // section: old vertex <- new model vertex, phi * psi = id
};

// Glue the '+' end at plus_pt to the '-' end at minus_pt inside one vertex:
// two factors merge through multiplication, or one factor closes into a
// circle.  Mutates the factor list and returns the transport maps.
StepMaps glue_step(const ModelContext& ctx, ModelVertex& v, Point plus_pt,
                   Point minus_pt, const std::vector<Rat>& a_inv,
                   const std::optional<Matrix>& close) {
    const FrobeniusData& a = ctx.a;
    constexpr std::size_t npos = (std::size_t)-1;
    std::size_t kp = npos, km = npos;
    for (std::size_t i = 0; i < v.factors.size(); ++i) {
        if (v.factors[i].is_circle) continue;
        if (v.factors[i].plus_end == plus_pt) kp = i;
        if (v.factors[i].minus_end == minus_pt) km = i;
    }
    if (kp == npos || km == npos)
        throw internal_error("glue point is not a free arc end");
    auto dims = factor_dims(ctx, v);

    if (kp == km) { // the factor closes into a circle
        if (!close)
            throw compute_error("CircleClosure: the normalized trace map of "
                                "this pair is not invertible");
        StepMaps s{on_slot(a.field, dims, kp, *close),
                   on_slot(a.field, dims, kp, ctx.iota)};
        v.factors[kp].is_circle = true;
        return s;
    }

    // merge: the '+' factor multiplies the '-' factor from the left
    std::size_t keep = std::min(kp, km), rem = std::max(kp, km);
    std::size_t d = a.dim, D = dims_prod(dims);
    std::vector<std::size_t> nd;
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (i != rem) nd.push_back(dims[i]);
    std::size_t ND = dims_prod(nd);
    auto strides = [](const std::vector<std::size_t>& ds) {
        std::vector<std::size_t> st(ds.size(), 1);
        for (int i = (int)ds.size() - 2; i >= 0; --i) st[i] = st[i + 1] * ds[i + 1];
        return st;
    };
    auto st = strides(dims), nst = strides(nd);
    auto new_index = [&](const std::vector<std::size_t>& g, std::size_t kdig) {
        std::size_t idx = 0, pos = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i == rem) continue;
            idx += (i == keep ? kdig : g[i]) * nst[pos];
            ++pos;
        }
        return idx;
    };
    Matrix phi(a.field, ND, D), psi(a.field, D, ND);
    std::vector<std::size_t> g(dims.size(), 0);
    for (std::size_t src = 0; src < D; ++src) {
        std::size_t x = g[kp], y = g[km];
        for (std::size_t k = 0; k < d; ++k)
            if (nz(a.mu[x][y][k])) phi.add_at(new_index(g, k), src, a.mu[x][y][k]);
        for (int i = (int)dims.size() - 1; i >= 0; --i) {
            if (++g[i] < dims[i]) break;
            g[i] = 0;
        }
    }
    // section z -> Delta(a^{-1} z) spread over the two merged slots
    Matrix dl = a.delta_matrix() * a.left_mult(a_inv);
    std::fill(g.begin(), g.end(), 0);
    std::vector<std::size_t> h(nd.size(), 0);
    for (std::size_t dst = 0; dst < ND; ++dst) {
        // reconstruct the old digit layout with slots kp/km free
        std::size_t pos = 0;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (i == rem) continue;
            g[i] = h[pos++];
        }
        std::size_t z = g[keep];
        for (std::size_t z1 = 0; z1 < d; ++z1)
            for (std::size_t z2 = 0; z2 < d; ++z2) {
                const Rat& c = dl.at(z1 * d + z2, z);
                if (!nz(c)) continue;
                g[kp] = z1;
                g[km] = z2;
                std::size_t src = 0;
                for (std::size_t i = 0; i < dims.size(); ++i) src += g[i] * st[i];
                psi.add_at(src, dst, c);
            }
        for (int i = (int)nd.size() - 1; i >= 0; --i) {
            if (++h[i] < nd[i]) break;
            h[i] = 0;
        }
    }
    ModelFactor merged{false, v.factors[kp].minus_end, v.factors[km].plus_end};
    v.factors[keep] = merged;
    v.factors.erase(v.factors.begin() + (long)rem);
    return {std::move(phi), std::move(psi)};
}

void cube_glue(ModelCube& cube, Point plus_pt, Point minus_pt,
               const std::vector<Rat>& a_inv, const std::optional<Matrix>& close) {
    std::size_t n = cube.signs.size();
    std::uint32_t nv = 1u << n;
    std::vector<StepMaps> st;
    st.reserve(nv);
    for (std::uint32_t v = 0; v < nv; ++v)
        st.push_back(glue_step(cube.ctx, cube.verts[v], plus_pt, minus_pt,
                               a_inv, close));
    for (std::size_t j = 0; j < n; ++j)
        for (std::uint32_t v = 0; v < nv; ++v) {
            if (v & (1u << j)) continue;
            cube.edges[j][v] =
                st[v | (1u << j)].phi * (cube.edges[j][v] * st[v].psi);
        }
}

void cube_append_arc(ModelCube& cube, Point minus_pt, Point plus_pt) {
    for (auto& v : cube.verts) v.factors.push_back({false, minus_pt, plus_pt});
    Matrix id = Matrix::identity(cube.ctx.a.field, cube.ctx.a.dim);
    std::size_t n = cube.signs.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::uint32_t v = 0; v < (1u << n); ++v)
            if (!(v & (1u << j))) cube.edges[j][v] = cube.edges[j][v].kron(id);
}

void cube_append_crossing(ModelCube& cube, const tangle::Crossing& cr,
                          int epsilon) {
    const FrobeniusData& a = cube.ctx.a;
    const bool graded = a.grading != GradingMode::none;
    const std::size_t j = cube.signs.size();
    const std::uint32_t oldv = 1u << j;
    const int s = (int)cr.slice_index, i = cr.pos;
    const bool variant_x = tangle::shaded(i - 1, epsilon);
    Matrix dx = crossing_diff(a, variant_x);
    Matrix id2 = Matrix::identity(a.field, a.dim * a.dim);

    auto is_minus = [&](const Point& p, bool bottom) {
        bool sh = tangle::shaded(p.pos - 1, epsilon);
        return bottom ? sh : !sh;
    };
    auto piece = [&](Point p1, bool b1, Point p2, bool b2) {
        bool m1 = is_minus(p1, b1), m2 = is_minus(p2, b2);
        if (m1 == m2) throw internal_error("crossing piece without one '-' "
                                           "and one '+' end");
        return m1 ? ModelFactor{false, p1, p2} : ModelFactor{false, p2, p1};
    };

    std::vector<std::size_t> old_dim(oldv);
    for (std::uint32_t v = 0; v < oldv; ++v)
        old_dim[v] = vertex_dim(cube.ctx, cube.verts[v]);

    std::vector<ModelVertex> nverts(2u * oldv);
    for (int b = 0; b < 2; ++b)
        for (std::uint32_t v = 0; v < oldv; ++v) {
            ModelVertex w = cube.verts[v];
            bool vertical = (b == 0) == cr.over_left;
            if (vertical) {
                w.factors.push_back(piece({s, i}, true, {s + 1, i}, false));
                w.factors.push_back(piece({s, i + 1}, true, {s + 1, i + 1}, false));
            } else {
                w.factors.push_back(piece({s, i}, true, {s, i + 1}, true));
                w.factors.push_back(
                    piece({s + 1, i}, false, {s + 1, i + 1}, false));
            }
            if (graded) w.shift += cr.sign > 0 ? 2 + 2 * b : -4 + 2 * b;
            nverts[v | ((std::uint32_t)b << j)] = std::move(w);
        }

    std::vector<std::vector<Matrix>> nedges(j + 1,
                                            std::vector<Matrix>(2u * oldv));
    for (std::size_t jj = 0; jj < j; ++jj)
        for (int b = 0; b < 2; ++b)
            for (std::uint32_t v = 0; v < oldv; ++v)
                if (!(v & (1u << jj)))
                    nedges[jj][v | ((std::uint32_t)b << j)] =
                        cube.edges[jj][v].kron(id2);
    for (std::uint32_t v = 0; v < oldv; ++v)
        nedges[j][v] = Matrix::identity(a.field, old_dim[v]).kron(dx);

    cube.signs.push_back(cr.sign);
    cube.verts = std::move(nverts);
    cube.edges = std::move(nedges);
}

BimoduleComplex totalize_cube(ModelCube cube) {
    const ModelContext& ctx = cube.ctx;
    const FrobeniusData& a = ctx.a;
    const FieldSpec field = a.field;
    const bool graded = a.grading != GradingMode::none;
    const std::size_t n = cube.signs.size();
    const std::uint32_t nv = 1u << n;
    int n_minus = 0;
    for (int s : cube.signs)
        if (s < 0) ++n_minus;

    BimoduleComplex out;
    out.dim_a = a.dim;
    out.cx.field = field;
    out.cx.mode = block_mode(a);
    out.cx.r_min = -n_minus;

    std::vector<std::vector<std::uint32_t>> by_h(n + 1);
    for (std::uint32_t v = 0; v < nv; ++v)
        by_h[std::popcount(v)].push_back(v);
    std::vector<std::size_t> offset(nv, 0);

    for (std::size_t h = 0; h <= n; ++h) {
        GradedSpace g;
        g.field = field;
        for (std::uint32_t v : by_h[h]) {
            offset[v] = g.degrees.size();
            const ModelVertex& mv = cube.verts[v];
            auto dims = factor_dims(ctx, mv);
            std::size_t dv = dims_prod(dims);
            std::vector<std::size_t> dig(dims.size(), 0);
            for (std::size_t idx = 0; idx < dv; ++idx) {
                int deg = graded ? mv.shift : 0;
                std::string lab;
                for (std::size_t f = 0; f < dims.size(); ++f) {
                    const auto& names =
                        mv.factors[f].is_circle ? ctx.c.basis : a.basis;
                    const auto& degs =
                        mv.factors[f].is_circle ? ctx.c.degrees : a.degrees;
                    if (graded) deg += degs[dig[f]];
                    if (!lab.empty()) lab += "(x)";
                    lab += names[dig[f]];
                }
                if (lab.empty()) lab = "1";
                g.degrees.push_back(deg);
                g.labels.push_back("a" + std::to_string(v) + ":" + lab);
                for (int f = (int)dims.size() - 1; f >= 0; --f) {
                    if (++dig[f] < dims[f]) break;
                    dig[f] = 0;
                }
            }
        }
        out.cx.terms.push_back(std::move(g));
    }

    int flip = n_minus % 2 == 0 ? 1 : -1; // the [-n_minus] shift
    for (std::size_t h = 0; h < n; ++h) {
        Matrix d(field, out.cx.terms[h + 1].dim(), out.cx.terms[h].dim());
        for (std::uint32_t v : by_h[h])
            for (std::size_t j = 0; j < n; ++j) {
                if (v & (1u << j)) continue;
                const Matrix& m = cube.edges[j][v];
                int sgn = (std::popcount(v & ((1u << j) - 1)) % 2 ? -1 : 1) * flip;
                std::size_t roff = offset[v | (1u << j)], coff = offset[v];
                for (std::size_t r = 0; r < m.rows(); ++r)
                    for (std::size_t c = 0; c < m.cols(); ++c)
                        if (m.entry_nonzero(r, c))
                            d.add_at(roff + r, coff + c, Rat(sgn) * m.at(r, c));
            }
        out.cx.diffs.push_back(std::move(d));
    }

    // free arc ends are the boundary; their polarity is shading-determined
    // and therefore the same in every vertex
    std::vector<std::pair<Point, bool>> ends;
    for (const auto& f : cube.verts[0].factors) {
        if (f.is_circle) continue;
        ends.push_back({f.minus_end, false});
        ends.push_back({f.plus_end, true});
    }
    std::sort(ends.begin(), ends.end());
    for (auto& [pt, plus] : ends) {
        BoundaryAction ba;
        ba.point = pt;
        ba.is_plus = plus;
        for (std::size_t h = 0; h <= n; ++h) {
            std::size_t dim = out.cx.terms[h].dim();
            Matrix m(field, dim, a.dim * dim);
            for (std::uint32_t v : by_h[h]) {
                const ModelVertex& mv = cube.verts[v];
                std::size_t slot = (std::size_t)-1;
                for (std::size_t f = 0; f < mv.factors.size(); ++f) {
                    if (mv.factors[f].is_circle) continue;
                    if ((plus ? mv.factors[f].plus_end
                              : mv.factors[f].minus_end) == pt)
                        slot = f;
                }
                if (slot == (std::size_t)-1)
                    throw internal_error("boundary point lost in a vertex");
                Matrix act = vertex_action(ctx, mv, slot, /*left=*/!plus);
                std::size_t dv = vertex_dim(ctx, mv);
                for (std::size_t av = 0; av < a.dim; ++av)
                    for (std::size_t r = 0; r < dv; ++r)
                        for (std::size_t c = 0; c < dv; ++c)
                            if (act.entry_nonzero(r, av * dv + c))
                                m.add_at(offset[v] + r,
                                         av * dim + offset[v] + c,
                                         act.at(r, av * dv + c));
            }
            ba.act.push_back(std::move(m));
        }
        out.boundary.push_back(std::move(ba));
    }
    out.model = std::move(cube);
    return out;
}

// Context for standalone building blocks: circles use the state-sum pair of
// the algebra itself.  Invalid (and harmless) when A is not strongly
// separable: gluing then falls back to the generic coequalizer.
ModelCube block_cube(const FrobeniusData& a) {
    ModelCube m;
    if (!algebra::is_strongly_separable(a)) return m;
    try {
        auto k = algebra::state_sum_kfrob(a);
        m.ctx = {a, k.C, k.iota, k.iota_star, true};
    } catch (const std::exception&) {
        return m;
    }
    m.valid = true;
    m.verts = {ModelVertex{}};
    return m;
}

} // namespace

BimoduleComplex unit_bimodule(FieldSpec field) {
    BimoduleComplex b;
    b.cx.field = field;
    b.cx.mode = GradingMode::graded;
    b.cx.r_min = 0;
    GradedSpace g;
    g.field = field;
    g.degrees = {0};
    g.labels = {"1"};
    b.cx.terms.push_back(g);
    return b;
}

BimoduleComplex arc_block(const FrobeniusData& a, Point minus_pt, Point plus_pt) {
    BimoduleComplex b;
    b.dim_a = a.dim;
    b.cx.field = a.field;
    b.cx.mode = block_mode(a);
    b.cx.r_min = 0;
    GradedSpace g;
    g.field = a.field;
    g.degrees = power_degrees(a, 1, 0);
    g.labels = a.basis;
    b.cx.terms.push_back(g);
    b.boundary.push_back({minus_pt, false, {factor_action(a, 1, 0, true)}});
    b.boundary.push_back({plus_pt, true, {factor_action(a, 1, 0, false)}});
    b.model = block_cube(a);
    if (b.model.valid)
        b.model.verts[0].factors.push_back({false, minus_pt, plus_pt});
    return b;
}

BimoduleComplex crossing_block(const FrobeniusData& a, const tangle::Crossing& c,
                               int epsilon) {
    const int s = (int)c.slice_index, i = c.pos;
    const bool variant_x = tangle::shaded(i - 1, epsilon);
    const bool positive = c.sign > 0;
    const bool term0_vertical = c.over_left; // XO: 0-smoothing is vertical
    const bool graded = a.grading != GradingMode::none;

    BimoduleComplex b;
    b.dim_a = a.dim;
    b.cx.field = a.field;
    b.cx.mode = block_mode(a);
    b.cx.r_min = positive ? 0 : -1;
    int shift0 = positive ? 2 : -4, shift1 = positive ? 4 : -2;
    for (int t = 0; t < 2; ++t) {
        GradedSpace g;
        g.field = a.field;
        g.degrees = power_degrees(a, 2, graded ? (t == 0 ? shift0 : shift1) : 0);
        g.labels.resize(g.degrees.size());
        for (std::size_t x = 0; x < a.dim; ++x)
            for (std::size_t y = 0; y < a.dim; ++y)
                g.labels[x * a.dim + y] = a.basis[x] + "(x)" + a.basis[y];
        b.cx.terms.push_back(std::move(g));
    }
    b.cx.diffs.push_back(crossing_diff(a, variant_x));

    // four corners: point, strands strictly west, bottom/top
    struct Corner {
        Point pt;
        int west;
        bool bottom;
    };
    const Corner corners[4] = {{{s, i}, i - 1, true},        // SW
                               {{s, i + 1}, i, true},        // SE
                               {{s + 1, i + 1}, i, false},   // NE
                               {{s + 1, i}, i - 1, false}};  // NW
    for (const Corner& co : corners) {
        bool sh = tangle::shaded(co.west, epsilon);
        bool minus = co.bottom ? sh : !sh;
        BoundaryAction act;
        act.point = co.pt;
        act.is_plus = !minus;
        for (int t = 0; t < 2; ++t) {
            bool vertical = (t == 0) == term0_vertical;
            // which tensor factor holds this corner in that smoothing
            std::size_t f;
            if (vertical) f = (co.pt.pos == i) ? 0 : 1;
            else f = co.bottom ? 0 : 1;
            act.act.push_back(factor_action(a, 2, f, minus));
        }
        b.boundary.push_back(std::move(act));
    }
    b.model = block_cube(a);
    if (b.model.valid) {
        cube_append_crossing(b.model, c, epsilon);
    }
    return b;
}

BimoduleComplex tensor_bimodule(const BimoduleComplex& x, const BimoduleComplex& y) {
    const FilteredChainComplex& a = x.cx;
    const FilteredChainComplex& b = y.cx;
    BimoduleComplex out;
    out.dim_a = std::max(x.dim_a, y.dim_a);
    if (x.dim_a && y.dim_a && x.dim_a != y.dim_a)
        throw internal_error("tensor of bimodules over different algebras");
    out.cx.field = a.field;
    out.cx.mode = (a.mode == GradingMode::filtered || b.mode == GradingMode::filtered)
                      ? GradingMode::filtered
                      : GradingMode::graded;
    out.cx.r_min = a.r_min + b.r_min;
    int nterms = (int)a.terms.size() + (int)b.terms.size() - 1;

    // offsets[k][p] = offset of block (p, k-p) inside term k
    std::vector<std::map<int, std::size_t>> offsets(nterms);
    for (int k = 0; k < nterms; ++k) {
        GradedSpace g;
        g.field = a.field;
        for (int p = 0; p < (int)a.terms.size(); ++p) {
            int q = k - p;
            if (q < 0 || q >= (int)b.terms.size()) continue;
            offsets[k][p] = g.degrees.size();
            for (std::size_t ia = 0; ia < a.terms[p].dim(); ++ia)
                for (std::size_t ib = 0; ib < b.terms[q].dim(); ++ib) {
                    g.degrees.push_back(a.terms[p].degrees[ia] + b.terms[q].degrees[ib]);
                    g.labels.push_back(a.terms[p].labels[ia] + "|" + b.terms[q].labels[ib]);
                }
        }
        out.cx.terms.push_back(std::move(g));
    }
    for (int k = 0; k + 1 < nterms; ++k) {
        Matrix dmat(a.field, out.cx.terms[k + 1].dim(), out.cx.terms[k].dim());
        for (auto& [p, off] : offsets[k]) {
            int q = k - p;
            std::size_t da = a.terms[p].dim(), db = b.terms[q].dim();
            if (p + 1 < (int)a.terms.size() && offsets[k + 1].count(p + 1)) {
                const Matrix& dA = a.diffs[p];
                std::size_t noff = offsets[k + 1].at(p + 1);
                for (std::size_t r = 0; r < dA.rows(); ++r)
                    for (std::size_t c = 0; c < dA.cols(); ++c)
                        if (dA.entry_nonzero(r, c))
                            for (std::size_t ib = 0; ib < db; ++ib)
                                dmat.add_at(noff + r * db + ib, off + c * db + ib,
                                            dA.at(r, c));
            }
            if (q + 1 < (int)b.terms.size() && offsets[k + 1].count(p)) {
                const Matrix& dB = b.diffs[q];
                std::size_t noff = offsets[k + 1].at(p);
                std::size_t db2 = b.terms[q + 1].dim();
                Rat sgn(((a.r_min + p) % 2 + 2) % 2 == 0 ? 1 : -1);
                for (std::size_t ia = 0; ia < da; ++ia)
                    for (std::size_t r = 0; r < dB.rows(); ++r)
                        for (std::size_t c = 0; c < dB.cols(); ++c)
                            if (dB.entry_nonzero(r, c))
                                dmat.add_at(noff + ia * db2 + r, off + ia * db + c,
                                            sgn * dB.at(r, c));
            }
        }
        out.cx.diffs.push_back(std::move(dmat));
    }

    std::size_t dA = out.dim_a;
    auto lift = [&](const BoundaryAction& src, bool from_a) {
        BoundaryAction outb;
        outb.point = src.point;
        outb.is_plus = src.is_plus;
        for (int k = 0; k < nterms; ++k) {
            std::size_t dim = out.cx.terms[k].dim();
            Matrix m(a.field, dim, dA * dim);
            for (auto& [p, off] : offsets[k]) {
                int q = k - p;
                std::size_t dpa = a.terms[p].dim(), dqb = b.terms[q].dim();
                const Matrix& s = src.act[from_a ? p : q];
                for (std::size_t av = 0; av < dA; ++av) {
                    if (from_a) {
                        for (std::size_t r = 0; r < dpa; ++r)
                            for (std::size_t c = 0; c < dpa; ++c)
                                if (s.entry_nonzero(r, av * dpa + c))
                                    for (std::size_t ib = 0; ib < dqb; ++ib)
                                        m.add_at(off + r * dqb + ib,
                                                 av * dim + off + c * dqb + ib,
                                                 s.at(r, av * dpa + c));
                    } else {
                        for (std::size_t r = 0; r < dqb; ++r)
                            for (std::size_t c = 0; c < dqb; ++c)
                                if (s.entry_nonzero(r, av * dqb + c))
                                    for (std::size_t ia = 0; ia < dpa; ++ia)
                                        m.add_at(off + ia * dqb + r,
                                                 av * dim + off + ia * dqb + c,
                                                 s.at(r, av * dqb + c));
                    }
                }
            }
            outb.act.push_back(std::move(m));
        }
        return outb;
    };
    for (auto& sb : x.boundary) out.boundary.push_back(lift(sb, true));
    for (auto& sb : y.boundary) out.boundary.push_back(lift(sb, false));
    return out;
}

BimoduleComplex coequalize(const BimoduleComplex& c, std::size_t plus_index,
                           std::size_t minus_index) {
    if (plus_index >= c.boundary.size() || minus_index >= c.boundary.size() ||
        plus_index == minus_index)
        throw input_error("coequalize: bad boundary indices");
    if (!c.boundary[plus_index].is_plus || c.boundary[minus_index].is_plus)
        throw input_error("SignMismatch: coequalize needs a '+' and a '-' point");
    const FieldSpec field = c.cx.field;
    const std::size_t nt = c.cx.terms.size();
    const std::size_t dA = c.dim_a;

    std::vector<Matrix> pi(nt), emb(nt), rbasis(nt);
    std::vector<std::vector<std::size_t>> chosen(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        std::size_t dim = c.cx.terms[i].dim();
        Matrix rel = c.boundary[plus_index].act[i] - c.boundary[minus_index].act[i];
        Echelon ech(field);
        std::vector<std::size_t> rb_cols;
        for (std::size_t col = 0; col < rel.cols(); ++col)
            if (ech.insert(column_of(rel, col))) rb_cols.push_back(col);
        rbasis[i] = rel.columns(rb_cols);
        // complement among standard basis vectors, highest degree first
        std::vector<std::size_t> order(dim);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return c.cx.terms[i].degrees[a] > c.cx.terms[i].degrees[b];
        });
        for (std::size_t g : order) {
            if (ech.rank() == dim) break;
            std::vector<Rat> e(dim, Rat(0));
            e[g] = Rat(1);
            if (ech.insert(std::move(e))) chosen[i].push_back(g);
        }
        std::sort(chosen[i].begin(), chosen[i].end());
        std::size_t m = chosen[i].size();
        if (rbasis[i].cols() + m != dim)
            throw internal_error("coequalize: complement construction failed");
        emb[i] = Matrix(field, dim, m);
        for (std::size_t j = 0; j < m; ++j) emb[i].set(chosen[i][j], j, Rat(1));
        Matrix bmat = rbasis[i].cols() ? rbasis[i].hcat(emb[i]) : emb[i];
        auto binv = bmat.solve(Matrix::identity(field, dim));
        if (!binv) throw internal_error("coequalize: basis matrix not invertible");
        std::vector<std::size_t> last(m);
        std::iota(last.begin(), last.end(), rbasis[i].cols());
        pi[i] = binv->rowsel(last);
    }

    BimoduleComplex out;
    out.dim_a = dA;
    out.cx.field = field;
    out.cx.mode = c.cx.mode;
    out.cx.r_min = c.cx.r_min;
    for (std::size_t i = 0; i < nt; ++i) {
        GradedSpace g;
        g.field = field;
        for (std::size_t j : chosen[i]) {
            g.degrees.push_back(c.cx.terms[i].degrees[j]);
            g.labels.push_back(c.cx.terms[i].labels[j]);
        }
        out.cx.terms.push_back(std::move(g));
    }
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        if (rbasis[i].cols() && !(pi[i + 1] * (c.cx.diffs[i] * rbasis[i])).is_zero())
            throw internal_error("coequalize: differential not well-defined on "
                                 "the quotient");
        out.cx.diffs.push_back(pi[i + 1] * (c.cx.diffs[i] * emb[i]));
    }
    for (std::size_t bi = 0; bi < c.boundary.size(); ++bi) {
        if (bi == plus_index || bi == minus_index) continue;
        BoundaryAction nb;
        nb.point = c.boundary[bi].point;
        nb.is_plus = c.boundary[bi].is_plus;
        for (std::size_t i = 0; i < nt; ++i) {
            std::size_t dim = c.cx.terms[i].dim(), m = chosen[i].size();
            Matrix na(field, m, dA * m);
            for (std::size_t av = 0; av < dA; ++av) {
                std::vector<std::size_t> cols(dim);
                std::iota(cols.begin(), cols.end(), av * dim);
                Matrix block = c.boundary[bi].act[i].columns(cols); // dim x dim
                if (rbasis[i].cols() && !(pi[i] * (block * rbasis[i])).is_zero())
                    throw internal_error("coequalize: action not well-defined on "
                                         "the quotient");
                Matrix nb_block = pi[i] * (block * emb[i]); // m x m
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t cc = 0; cc < m; ++cc)
                        if (nb_block.entry_nonzero(r, cc))
                            na.set(r, av * m + cc, nb_block.at(r, cc));
            }
            nb.act.push_back(std::move(na));
        }
        out.boundary.push_back(std::move(nb));
    }
    return out;
}

BimoduleComplex compose_tangle(const tangle::TangleDiagram& t, int epsilon,
                               const KnowledgeableFrobenius& k) {
    if (epsilon != 1 && epsilon != -1) throw input_error("epsilon must be +1 or -1");
    FrobeniusData a = epsilon == -1 ? algebra::opposite(k.A) : k.A;
    auto win = algebra::window(a);
    if (!win.inverse)
        throw compute_error("NotStronglySeparable: the window element of A is "
                            "not invertible");
    const std::vector<Rat>& a_inv = *win.inverse;

    ModelCube cube;
    cube.ctx = {a, k.C, k.iota, k.iota_star, true};
    cube.valid = true;
    cube.verts = {ModelVertex{}};
    std::optional<Matrix> close = make_circle_close(cube.ctx, a_inv);

    auto is_minus = [&](const Point& p, bool bottom) {
        bool sh = tangle::shaded(p.pos - 1, epsilon);
        return bottom ? sh : !sh;
    };
    // b1/b2: whether each endpoint is a bottom ('-' iff shaded) or top
    // ('+' iff shaded) point of its cell
    auto add_arc = [&](Point p1, bool b1, Point p2, bool b2) {
        bool m1 = is_minus(p1, b1), m2 = is_minus(p2, b2);
        if (m1 == m2) throw internal_error("arc cell without one '-' and one '+'");
        if (m1) cube_append_arc(cube, p1, p2);
        else cube_append_arc(cube, p2, p1);
    };
    auto glue_at = [&](Point pt) { cube_glue(cube, pt, pt, a_inv, close); };

    if (t.word.slices.empty()) {
        // bare strands: one arc cell per boundary position
        for (int j = 1; j <= t.in_points(); ++j)
            add_arc({0, j}, true, {0, j}, false);
        return totalize_cube(std::move(cube));
    }

    std::size_t cross_idx = 0;
    for (std::size_t s = 0; s < t.word.slices.size(); ++s) {
        const tangle::Slice& sl = t.word.slices[s];
        const int w = t.width(s), i = sl.pos, lo = (int)s, hi = (int)s + 1;
        const bool interior = s > 0; // level-0 points stay on the boundary
        auto side_arc = [&](int jfrom, int jto) {
            add_arc({lo, jfrom}, true, {hi, jto}, false);
            if (interior) glue_at({lo, jfrom});
        };
        switch (sl.kind) {
            case tangle::SliceKind::cap:
                for (int j = 1; j < i; ++j) side_arc(j, j);
                add_arc({lo, i}, true, {lo, i + 1}, true);
                if (interior) {
                    glue_at({lo, i});
                    glue_at({lo, i + 1});
                }
                for (int j = i + 2; j <= w; ++j) side_arc(j, j - 2);
                break;
            case tangle::SliceKind::cup:
                for (int j = 1; j < i; ++j) side_arc(j, j);
                add_arc({hi, i}, false, {hi, i + 1}, false);
                for (int j = i; j <= w; ++j) side_arc(j, j + 2);
                break;
            case tangle::SliceKind::cross_over:
            case tangle::SliceKind::cross_under:
                for (int j = 1; j < i; ++j) side_arc(j, j);
                cube_append_crossing(cube, t.crossings[cross_idx], epsilon);
                ++cross_idx;
                if (interior) {
                    glue_at({lo, i});
                    glue_at({lo, i + 1});
                }
                for (int j = i + 2; j <= w; ++j) side_arc(j, j);
                break;
        }
    }
    return totalize_cube(std::move(cube));
}

bool verify_composition(const tangle::TangleDiagram& t, int epsilon,
                        const KnowledgeableFrobenius& k, std::string* detail) {
    BimoduleComplex comp = compose_tangle(t, epsilon, k);
    FilteredChainComplex global =
        complex::tangle_complex(t, algebra::to_tangle_algebra(k), epsilon, true);

    auto dims_by = [](const FilteredChainComplex& c) {
        std::map<std::pair<int, int>, std::size_t> m; // (r, deg) -> count
        for (std::size_t i = 0; i < c.terms.size(); ++i)
            for (int d : c.terms[i].degrees) m[{c.r_min + (int)i, d}]++;
        return m;
    };
    std::ostringstream os;
    bool ok = true;
    if (dims_by(comp.cx) != dims_by(global)) {
        ok = false;
        os << "term dimensions per (degree, internal degree) differ\n";
    }
    complex::BigradedDims hc = complex::homology_bigraded(comp.cx);
    complex::BigradedDims hg = complex::homology_bigraded(global);
    if (!(hc == hg)) {
        ok = false;
        os << "homology rank tables differ:\ncomposed:\n"
           << hc.table() << "global:\n" << hg.table();
    }
    if (detail) *detail = os.str();
    return ok;
}

BimoduleComplex glue_tangles(
    const BimoduleComplex& c1, const BimoduleComplex& c2,
    const std::vector<std::pair<std::size_t, std::size_t>>& matching) {
    for (auto& [p, m] : matching) {
        if (p >= c1.boundary.size() || m >= c2.boundary.size())
            throw input_error("glue_tangles: bad boundary index");
        if (c1.boundary[p].is_plus == c2.boundary[m].is_plus)
            throw input_error("SignMismatch: matching must pair '+' with '-'");
    }
    constexpr int kOffset = 1 << 20; // keep the two diagrams' points disjoint

    const bool model_ok = c1.model.valid && c2.model.valid &&
                          c1.model.ctx.a.dim == c2.model.ctx.a.dim &&
                          c1.model.ctx.a.field == c2.model.ctx.a.field &&
                          c1.model.ctx.a.mu == c2.model.ctx.a.mu;
    if (model_ok) {
        const ModelCube& m1 = c1.model;
        ModelCube m2 = c2.model;
        for (auto& v : m2.verts)
            for (auto& f : v.factors) {
                f.minus_end.level += kOffset;
                f.plus_end.level += kOffset;
            }
        const std::size_t n1 = m1.signs.size(), n2 = m2.signs.size();
        const std::uint32_t v1 = 1u << n1, v2 = 1u << n2;

        ModelCube g;
        g.ctx = m1.ctx;
        g.valid = true;
        g.signs = m1.signs;
        g.signs.insert(g.signs.end(), m2.signs.begin(), m2.signs.end());
        g.verts.resize((std::size_t)v1 * v2);
        for (std::uint32_t a2 = 0; a2 < v2; ++a2)
            for (std::uint32_t a1 = 0; a1 < v1; ++a1) {
                ModelVertex w = m1.verts[a1];
                const ModelVertex& u = m2.verts[a2];
                w.factors.insert(w.factors.end(), u.factors.begin(),
                                 u.factors.end());
                w.shift += u.shift;
                g.verts[a1 | (a2 << n1)] = std::move(w);
            }
        g.edges.assign(n1 + n2,
                       std::vector<Matrix>((std::size_t)v1 * v2));
        for (std::size_t j = 0; j < n1; ++j)
            for (std::uint32_t a1 = 0; a1 < v1; ++a1) {
                if (a1 & (1u << j)) continue;
                for (std::uint32_t a2 = 0; a2 < v2; ++a2)
                    g.edges[j][a1 | (a2 << n1)] = m1.edges[j][a1].kron(
                        Matrix::identity(g.ctx.a.field,
                                         vertex_dim(m2.ctx, m2.verts[a2])));
            }
        for (std::size_t j = 0; j < n2; ++j)
            for (std::uint32_t a2 = 0; a2 < v2; ++a2) {
                if (a2 & (1u << j)) continue;
                for (std::uint32_t a1 = 0; a1 < v1; ++a1)
                    g.edges[n1 + j][a1 | (a2 << n1)] =
                        Matrix::identity(g.ctx.a.field,
                                         vertex_dim(m1.ctx, m1.verts[a1]))
                            .kron(m2.edges[j][a2]);
            }

        auto win = algebra::window(g.ctx.a);
        if (!win.inverse)
            throw compute_error("NotStronglySeparable: the window element of "
                                "A is not invertible");
        std::optional<Matrix> close = make_circle_close(g.ctx, *win.inverse);
        for (auto& [p, m] : matching) {
            Point plus_pt, minus_pt;
            if (c1.boundary[p].is_plus) {
                plus_pt = c1.boundary[p].point;
                minus_pt = c2.boundary[m].point;
                minus_pt.level += kOffset;
            } else {
                plus_pt = c2.boundary[m].point;
                plus_pt.level += kOffset;
                minus_pt = c1.boundary[p].point;
            }
            cube_glue(g, plus_pt, minus_pt, *win.inverse, close);
        }
        return totalize_cube(std::move(g));
    }

    // generic path: tensor, then one quotient coequalizer per pair
    BimoduleComplex c2s = c2;
    for (auto& bp : c2s.boundary) bp.point.level += kOffset;
    BimoduleComplex acc = tensor_bimodule(c1, c2s);
    std::vector<std::pair<Point, Point>> pairs; // ('+' point, '-' point)
    for (auto& [p, m] : matching) {
        if (c1.boundary[p].is_plus)
            pairs.push_back({c1.boundary[p].point, c2s.boundary[m].point});
        else
            pairs.push_back({c2s.boundary[m].point, c1.boundary[p].point});
    }
    for (auto& [pp, mp] : pairs) {
        std::size_t ip = acc.boundary.size(), im = acc.boundary.size();
        for (std::size_t i = 0; i < acc.boundary.size(); ++i) {
            if (acc.boundary[i].point == pp && acc.boundary[i].is_plus) ip = i;
            if (acc.boundary[i].point == mp && !acc.boundary[i].is_plus) im = i;
        }
        if (ip == acc.boundary.size() || im == acc.boundary.size())
            throw internal_error("glue_tangles: matched point disappeared");
        acc = coequalize(acc, ip, im);
    }
    return acc;
}

} // namespace th::compose
