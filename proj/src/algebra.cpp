#include "th/algebra.hpp"

#include <sstream>

namespace th::algebra {

using linalg::image_membership_rank;

namespace {

// tau: V (x) W -> W (x) V as a permutation matrix (here V = W = A).
Matrix tau_matrix(const FieldSpec& f, std::size_t d) {
    Matrix t(f, d * d, d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) t.set(j * d + i, i * d + j, Rat(1));
    return t;
}

std::string first_nonzero(const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m.entry_nonzero(i, j))
                return "first failing entry (" + std::to_string(i) + "," +
                       std::to_string(j) + ")";
    return "";
}

void check_equal(AxiomReport& rep, const std::string& name, const Matrix& lhs,
                 const Matrix& rhs) {
    Matrix diff = lhs - rhs;
    bool ok = diff.is_zero();
    rep.checks.push_back({name, ok, ok ? "" : first_nonzero(diff)});
}

// degrees of a tensor power basis (sums of factor degrees)
std::vector<int> tensor_degrees(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() * b.size());
    for (int da : a)
        for (int db : b) out.push_back(da + db);
    return out;
}

// Check a matrix is graded (==) or filtered (>=) of declared degree d.
bool map_degree_ok(const Matrix& m, const std::vector<int>& out_degs,
                   const std::vector<int>& in_degs, int d, bool graded,
                   std::string* detail) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (!m.entry_nonzero(r, c)) continue;
            bool ok = graded ? out_degs[r] == in_degs[c] + d : out_degs[r] >= in_degs[c] + d;
            if (!ok) {
                if (detail)
                    *detail = "entry (" + std::to_string(r) + "," + std::to_string(c) +
                              ") violates degree " + std::to_string(d);
                return false;
            }
        }
    return true;
}

Matrix pow_matrix(const Matrix& m, int e) {
    Matrix out = Matrix::identity(m.field(), m.rows());
    for (int i = 0; i < e; ++i) out = out * m;
    return out;
}

} // namespace

void FrobeniusData::normalize() {
    linalg::validate_field(field);
    auto canon = [&](Rat& x) { x = linalg::to_field(field, x); };
    for (auto& a : mu)
        for (auto& b : a)
            for (auto& c : b) canon(c);
    for (auto& a : delta)
        for (auto& b : a)
            for (auto& c : b) canon(c);
    for (auto& x : eta) canon(x);
    for (auto& x : eps) canon(x);
    if (degrees.empty()) degrees.assign(dim, 0);
    if (basis.empty())
        for (std::size_t i = 0; i < dim; ++i) basis.push_back("e" + std::to_string(i));
}

Matrix FrobeniusData::mu_matrix() const {
    Matrix m(field, dim, dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                if (mu[i][j][k].numerator() != 0) m.set(k, i * dim + j, mu[i][j][k]);
    return m;
}

Matrix FrobeniusData::delta_matrix() const {
    Matrix m(field, dim * dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                if (delta[i][j][k].numerator() != 0) m.set(j * dim + k, i, delta[i][j][k]);
    return m;
}

Matrix FrobeniusData::eta_matrix() const {
    Matrix m(field, dim, 1);
    for (std::size_t i = 0; i < dim; ++i)
        if (eta[i].numerator() != 0) m.set(i, 0, eta[i]);
    return m;
}

Matrix FrobeniusData::eps_matrix() const {
    Matrix m(field, 1, dim);
    for (std::size_t i = 0; i < dim; ++i)
        if (eps[i].numerator() != 0) m.set(0, i, eps[i]);
    return m;
}

Matrix FrobeniusData::left_mult(const std::vector<Rat>& a) const {
    Matrix m(field, dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (a[i].numerator() == 0) continue;
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t k = 0; k < dim; ++k)
                if (mu[i][j][k].numerator() != 0) m.add_at(k, j, a[i] * mu[i][j][k]);
    }
    return m;
}

Matrix FrobeniusData::right_mult(const std::vector<Rat>& a) const {
    Matrix m(field, dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        if (a[j].numerator() == 0) continue;
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t k = 0; k < dim; ++k)
                if (mu[i][j][k].numerator() != 0) m.add_at(k, i, a[j] * mu[i][j][k]);
    }
    return m;
}

std::vector<Rat> FrobeniusData::basis_vector(std::size_t i) const {
    std::vector<Rat> v(dim, Rat(0));
    v[i] = linalg::to_field(field, Rat(1));
    return v;
}

bool FrobeniusData::is_commutative() const {
    Matrix m = mu_matrix();
    return (m - m * tau_matrix(field, dim)).is_zero();
}

bool FrobeniusData::is_symmetric() const {
    Matrix em = eps_matrix() * mu_matrix();
    return (em - em * tau_matrix(field, dim)).is_zero();
}

bool AxiomReport::ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

const AxiomCheck* AxiomReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

std::string AxiomReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.ok ? "pass" : "FAIL") << " " << c.name;
        if (!c.ok && !c.detail.empty()) os << " (" << c.detail << ")";
        os << "\n";
    }
    return os.str();
}

AxiomReport validate_frobenius(const FrobeniusData& f) {
    if (f.mu.size() != f.dim || f.delta.size() != f.dim || f.eta.size() != f.dim ||
        f.eps.size() != f.dim || f.degrees.size() != f.dim)
        throw input_error("frobenius data dimension mismatch");

    AxiomReport rep;
    const std::size_t d = f.dim;
    Matrix I = Matrix::identity(f.field, d);
    Matrix I2 = Matrix::identity(f.field, d * d);
    Matrix M = f.mu_matrix(), D = f.delta_matrix(), E = f.eta_matrix(), Ep = f.eps_matrix();

    check_equal(rep, "unit_left", M * E.kron(I), I);
    check_equal(rep, "unit_right", M * I.kron(E), I);
    check_equal(rep, "associativity", M * M.kron(I), M * I.kron(M));
    check_equal(rep, "counit_left", Ep.kron(I) * D, I);
    check_equal(rep, "counit_right", I.kron(Ep) * D, I);
    check_equal(rep, "coassociativity", D.kron(I) * D, I.kron(D) * D);
    Matrix dm = D * M;
    check_equal(rep, "frobenius_left", I.kron(M) * (D.kron(I)), dm);
    check_equal(rep, "frobenius_right", M.kron(I) * (I.kron(D)), dm);

    if (f.grading != GradingMode::none) {
        // Euler degrees come in two scales: (-1,1) when the algebra plays
        // the role of A, (-2,2) when it plays the role of C.  A standalone
        // datum passes if either scale fits.
        bool any = false;
        for (int scale : {1, 2}) {
            AxiomReport sub = check_euler_degrees_single(f, "", scale);
            if (sub.ok()) {
                any = true;
                break;
            }
        }
        rep.checks.push_back(
            {"euler_degrees", any, any ? "" : "no Euler degree scale fits"});
    }
    return rep;
}

AxiomReport check_euler_degrees_single(const FrobeniusData& f, const std::string& prefix,
                                       int scale) {
    AxiomReport rep;
    if (f.grading == GradingMode::none) throw compute_error("grading absent");
    bool graded = f.grading == GradingMode::graded;
    std::vector<int> k0{0};
    std::vector<int> dd = tensor_degrees(f.degrees, f.degrees);
    auto push = [&](const std::string& name, const Matrix& m, const std::vector<int>& out,
                    const std::vector<int>& in, int deg) {
        std::string detail;
        bool ok = map_degree_ok(m, out, in, deg, graded, &detail);
        rep.checks.push_back({prefix + name, ok, detail});
    };
    push("deg_mu", f.mu_matrix(), f.degrees, dd, -scale);
    push("deg_eta", f.eta_matrix(), f.degrees, k0, scale);
    push("deg_delta", f.delta_matrix(), dd, f.degrees, -scale);
    push("deg_eps", f.eps_matrix(), k0, f.degrees, scale);
    return rep;
}

AxiomReport validate_knowledgeable(const KnowledgeableFrobenius& k) {
    AxiomReport rep;
    AxiomReport ra = validate_frobenius(k.A), rc = validate_frobenius(k.C);
    rep.checks.push_back({"A_frobenius", ra.ok(), ra.ok() ? "" : ra.summary()});
    rep.checks.push_back({"C_frobenius", rc.ok(), rc.ok() ? "" : rc.summary()});
    rep.checks.push_back({"A_symmetric", k.A.is_symmetric(), ""});
    rep.checks.push_back({"C_commutative", k.C.is_commutative(), ""});

    const std::size_t da = k.A.dim, dc = k.C.dim;
    if (k.iota.rows() != da || k.iota.cols() != dc || k.iota_star.rows() != dc ||
        k.iota_star.cols() != da)
        throw input_error("iota/iota_star dimension mismatch");
    Matrix Ia = Matrix::identity(k.A.field, da);
    Matrix Ma = k.A.mu_matrix(), Da = k.A.delta_matrix();
    Matrix Mc = k.C.mu_matrix();
    Matrix tau = tau_matrix(k.A.field, da);

    check_equal(rep, "iota_unit", k.iota * k.C.eta_matrix(), k.A.eta_matrix());
    check_equal(rep, "iota_multiplicative", k.iota * Mc, Ma * k.iota.kron(k.iota));
    check_equal(rep, "knowledge", Ma * k.iota.kron(Ia), Ma * tau * k.iota.kron(Ia));
    check_equal(rep, "duality",
                k.C.eps_matrix() * Mc * Matrix::identity(k.C.field, dc).kron(k.iota_star),
                k.A.eps_matrix() * Ma * k.iota.kron(Ia));
    check_equal(rep, "cardy", Ma * tau * Da, k.iota * k.iota_star);
    return rep;
}

BarNatanFlags check_barnatan(const FrobeniusData& c) {
    BarNatanFlags out;
    const std::size_t d = c.dim;
    Matrix I = Matrix::identity(c.field, d);
    Matrix M = c.mu_matrix(), D = c.delta_matrix(), E = c.eta_matrix(), Ep = c.eps_matrix();

    out.S = (Ep * E).is_zero();                        // eps(eta(1)) = 0
    Matrix t = Ep * M * D * E;                         // eps mu Delta eta
    out.T = (t - Matrix::identity(c.field, 1).scaled(Rat(2))).is_zero();
    Matrix etaeps = E * Ep;                            // A -> A
    Matrix lhs = D * E * Ep.kron(Ep)                   // Delta eta (eps (x) eps)
                 + E.kron(E) * (Ep * M)                // (eta (x) eta) eps mu
                 - etaeps.kron(I) - I.kron(etaeps);
    out.fourTu = lhs.is_zero();
    return out;
}

Window window(const FrobeniusData& f) {
    Window w;
    Matrix a = f.mu_matrix() * f.delta_matrix() * f.eta_matrix();
    w.a.resize(f.dim);
    for (std::size_t i = 0; i < f.dim; ++i) w.a[i] = a.at(i, 0);
    auto x = f.left_mult(w.a).solve(f.eta_matrix());
    if (x) {
        std::vector<Rat> inv(f.dim);
        for (std::size_t i = 0; i < f.dim; ++i) inv[i] = x->at(i, 0);
        // demand a two-sided inverse
        std::vector<Rat> unit(f.dim);
        for (std::size_t i = 0; i < f.dim; ++i) unit[i] = f.eta_matrix().at(i, 0);
        if (f.right_mult(w.a).apply(inv) == unit) w.inverse = inv;
    }
    return w;
}

bool is_strongly_separable(const FrobeniusData& f) {
    // Gram matrix of g_can(a,b) = tr(L_a L_b)
    Matrix g(f.field, f.dim, f.dim);
    std::vector<Matrix> L;
    for (std::size_t i = 0; i < f.dim; ++i) L.push_back(f.left_mult(f.basis_vector(i)));
    for (std::size_t i = 0; i < f.dim; ++i)
        for (std::size_t j = 0; j < f.dim; ++j) {
            Matrix prod = L[i] * L[j];
            Rat tr(0);
            for (std::size_t k = 0; k < f.dim; ++k) tr += prod.at(k, k);
            g.set(i, j, tr);
        }
    bool nondeg = g.rank() == f.dim;
    if (f.is_symmetric()) {
        // cross-check against window invertibility (both appear in the
        // source definition); disagreement is a bug, not a result
        bool inv = window(f).inverse.has_value();
        if (inv != nondeg)
            throw internal_error("strong separability criteria disagree");
    }
    return nondeg;
}

Matrix central_idempotent(const FrobeniusData& f) {
    Window w = window(f);
    if (!w.inverse) throw compute_error("NotStronglySeparable");
    return f.left_mult(*w.inverse) * f.mu_matrix() * tau_matrix(f.field, f.dim) *
           f.delta_matrix();
}

KnowledgeableFrobenius state_sum_kfrob(const FrobeniusData& f) {
    if (!f.is_symmetric()) throw compute_error("state sum requires a symmetric algebra");
    Window w = window(f);
    if (!w.inverse) throw compute_error("NotStronglySeparable");
    Matrix p = central_idempotent(f);

    // centre basis: pivot columns of p (deterministic elimination order)
    Matrix pr = p;
    std::vector<std::size_t> pivots = pr.rref_inplace();
    Matrix Z = p.columns(pivots); // dim(A) x m, columns are the centre basis
    const std::size_t m = pivots.size();

    auto coords = [&](const Matrix& v) {
        auto x = Z.solve(v);
        if (!x) throw internal_error("vector not in the centre of A");
        return *x;
    };

    KnowledgeableFrobenius out;
    out.A = f;
    FrobeniusData& C = out.C;
    C.dim = m;
    C.field = f.field;
    C.grading = GradingMode::none;
    C.degrees.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) C.basis.push_back("z" + std::to_string(i));

    Matrix Ma = f.mu_matrix();
    C.mu.assign(m, std::vector<std::vector<Rat>>(m, std::vector<Rat>(m, Rat(0))));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            Matrix prod = p * (Ma * Z.columns({i}).kron(Z.columns({j})));
            Matrix x = coords(prod);
            for (std::size_t k = 0; k < m; ++k) C.mu[i][j][k] = x.at(k, 0);
        }
    Matrix etaC = coords(p * f.eta_matrix());
    C.eta.assign(m, Rat(0));
    for (std::size_t k = 0; k < m; ++k) C.eta[k] = etaC.at(k, 0);

    Matrix La = f.left_mult(w.a), Lainv = f.left_mult(*w.inverse);
    C.delta.assign(m, std::vector<std::vector<Rat>>(m, std::vector<Rat>(m, Rat(0))));
    Matrix ZZ = Z.kron(Z);
    for (std::size_t i = 0; i < m; ++i) {
        Matrix v = p.kron(p) * (f.delta_matrix() * (La * Z.columns({i})));
        auto x = ZZ.solve(v);
        if (!x) throw internal_error("Delta_C image not in Z(A) (x) Z(A)");
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) C.delta[i][j][k] = x->at(j * m + k, 0);
    }
    C.eps.assign(m, Rat(0));
    for (std::size_t i = 0; i < m; ++i) {
        Matrix v = f.eps_matrix() * (Lainv * Z.columns({i}));
        C.eps[i] = v.at(0, 0);
    }
    C.normalize();

    out.iota = Z;
    Matrix is = coords(La * p); // (a .) o p expressed in centre coordinates
    out.iota_star = is;

    // Euler grading: for a two-dimensional centre whose first basis vector
    // is the unit, the C_{h,t} pattern (2,-2) applies; otherwise leave the
    // pair ungraded (see ledger).
    if (f.grading != GradingMode::none && m == 2) {
        bool unit_first = C.eta[0] == Rat(1) && C.eta[1] == Rat(0);
        if (unit_first) {
            C.degrees = {2, -2};
            C.grading = f.grading;
            KnowledgeableFrobenius probe = out;
            try {
                if (!check_euler_degrees(probe).ok()) {
                    C.degrees = {0, 0};
                    C.grading = GradingMode::none;
                }
            } catch (const compute_error&) {
                C.degrees = {0, 0};
                C.grading = GradingMode::none;
            }
        }
    }
    return out;
}

std::pair<Matrix, Matrix> idempotents_PQ(const FrobeniusData& f, int j, int l) {
    if (j < 1 || l < 1 || j > 4 || l > 4) throw input_error("idempotents_PQ: j,l in 1..4");
    Window w = window(f);
    if (!w.inverse) throw compute_error("NotStronglySeparable");
    const std::size_t d = f.dim;
    Matrix I = Matrix::identity(f.field, d);

    // Delta^{(j)}: A -> A^{(x)j}, built as D_1 = id, D_s = (Delta (x) id^{(s-2)}) D_{s-1}
    Matrix Dj = I;
    for (int s = 2; s <= j; ++s) {
        std::size_t rest = 1;
        for (int t = 0; t < s - 2; ++t) rest *= d;
        Dj = f.delta_matrix().kron(Matrix::identity(f.field, rest)) * Dj;
    }
    // mu^{(l)}: A^{(x)l} -> A, M_1 = id, M_s = mu (M_{s-1} (x) id)
    Matrix Ml = I;
    for (int s = 2; s <= l; ++s) Ml = f.mu_matrix() * Ml.kron(I);

    Matrix mid = pow_matrix(f.left_mult(*w.inverse), j - 1);
    Matrix P = Dj * mid * Ml;
    Matrix Q = Dj * mid * central_idempotent(f) * Ml;
    return {P, Q};
}

AxiomReport check_euler_degrees(const KnowledgeableFrobenius& k) {
    if (k.A.grading == GradingMode::none || k.C.grading == GradingMode::none)
        throw compute_error("grading absent");
    bool graded =
        k.A.grading == GradingMode::graded && k.C.grading == GradingMode::graded;
    AxiomReport rep;
    auto add = [&](AxiomReport sub) {
        for (auto& c : sub.checks) rep.checks.push_back(std::move(c));
    };
    // force the per-part scale (A: +-1, C: +-2) at the joint grading mode
    FrobeniusData A = k.A, C = k.C;
    A.grading = C.grading = graded ? GradingMode::graded : GradingMode::filtered;
    add(check_euler_degrees_single(A, "A_", 1));
    add(check_euler_degrees_single(C, "C_", 2));
    std::string detail;
    bool ok = map_degree_ok(k.iota, k.A.degrees, k.C.degrees, -1, graded, &detail);
    rep.checks.push_back({"deg_iota", ok, detail});
    ok = map_degree_ok(k.iota_star, k.C.degrees, k.A.degrees, -1, graded, &detail);
    rep.checks.push_back({"deg_iota_star", ok, detail});
    return rep;
}

namespace {

FrobeniusData truncate_frobenius(const FrobeniusData& f, int scale) {
    FrobeniusData g = f;
    for (std::size_t i = 0; i < f.dim; ++i)
        for (std::size_t j = 0; j < f.dim; ++j)
            for (std::size_t k = 0; k < f.dim; ++k) {
                if (f.degrees[k] != f.degrees[i] + f.degrees[j] - scale)
                    g.mu[i][j][k] = Rat(0);
                if (f.degrees[j] + f.degrees[k] != f.degrees[i] - scale)
                    g.delta[i][j][k] = Rat(0);
            }
    for (std::size_t k = 0; k < f.dim; ++k) {
        if (f.degrees[k] != scale) g.eta[k] = Rat(0);
        if (f.degrees[k] != -scale) g.eps[k] = Rat(0);
    }
    g.grading = GradingMode::graded;
    return g;
}

Matrix truncate_map(const Matrix& m, const std::vector<int>& out_degs,
                    const std::vector<int>& in_degs, int d) {
    Matrix out(m.field(), m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (m.entry_nonzero(r, c) && out_degs[r] == in_degs[c] + d)
                out.set(r, c, m.at(r, c));
    return out;
}

} // namespace

KnowledgeableFrobenius associated_graded(const KnowledgeableFrobenius& k) {
    if (k.A.grading == GradingMode::none || k.C.grading == GradingMode::none)
        throw compute_error("grading absent");
    KnowledgeableFrobenius out;
    out.A = truncate_frobenius(k.A, 1);
    out.C = truncate_frobenius(k.C, 2);
    out.iota = truncate_map(k.iota, k.A.degrees, k.C.degrees, -1);
    out.iota_star = truncate_map(k.iota_star, k.C.degrees, k.A.degrees, -1);
    return out;
}

FrobeniusData opposite(const FrobeniusData& f) {
    FrobeniusData g = f;
    for (std::size_t i = 0; i < f.dim; ++i)
        for (std::size_t j = 0; j < f.dim; ++j)
            for (std::size_t k = 0; k < f.dim; ++k) {
                g.mu[i][j][k] = f.mu[j][i][k];      // mu^op = mu tau
                g.delta[i][j][k] = f.delta[i][k][j]; // Delta^op = tau Delta
            }
    return g;
}

TangleAlgebra to_tangle_algebra(const KnowledgeableFrobenius& k) {
    return TangleAlgebra{k.A, k.C, k.iota, k.iota_star};
}

TangleAlgebra to_tangle_algebra(const FrobeniusData& c_only) {
    return TangleAlgebra{std::nullopt, c_only, std::nullopt, std::nullopt};
}

} // namespace th::algebra
