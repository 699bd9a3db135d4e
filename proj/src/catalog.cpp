// Built-in example algebras, plus JSON import/export.

#include <json.hpp>

#include "th/algebra.hpp"

namespace th::algebra {

namespace {

using Tensor3 = std::vector<std::vector<std::vector<Rat>>>;

Tensor3 zeros3(std::size_t d) {
    return Tensor3(d, std::vector<std::vector<Rat>>(d, std::vector<Rat>(d, Rat(0))));
}

FrobeniusData blank(std::size_t dim, FieldSpec field) {
    FrobeniusData f;
    f.dim = dim;
    f.field = field;
    f.mu = zeros3(dim);
    f.delta = zeros3(dim);
    f.eta.assign(dim, Rat(0));
    f.eps.assign(dim, Rat(0));
    f.degrees.assign(dim, 0);
    return f;
}

// C_{h,t} = k[x]/(x^2 - h x - t), basis (1, x), degrees (2,-2).
FrobeniusData make_cht(FieldSpec field, const Rat& h, const Rat& t) {
    FrobeniusData c = blank(2, field);
    c.basis = {"1", "x"};
    c.mu[0][0][0] = Rat(1);
    c.mu[0][1][1] = Rat(1);
    c.mu[1][0][1] = Rat(1);
    c.mu[1][1][1] = h;
    c.mu[1][1][0] = t;
    c.eta[0] = Rat(1);
    // Delta(1) = 1(x)x + x(x)1 - h 1(x)1,  Delta(x) = x(x)x + t 1(x)1
    c.delta[0][0][1] = Rat(1);
    c.delta[0][1][0] = Rat(1);
    c.delta[0][0][0] = -h;
    c.delta[1][1][1] = Rat(1);
    c.delta[1][0][0] = t;
    c.eps[1] = Rat(1);
    c.degrees = {2, -2};
    Rat hf = linalg::to_field(field, h), tf = linalg::to_field(field, t);
    c.grading = (hf.numerator() == 0 && tf.numerator() == 0) ? GradingMode::graded
                                                             : GradingMode::filtered;
    c.normalize();
    return c;
}

// k[y]/(y^2 - h y - t) as the open algebra A_{h,t} (same constants as
// C_{h,t} but with degrees on the +-1 scale).
FrobeniusData make_aht(FieldSpec field, const Rat& h, const Rat& t) {
    FrobeniusData a = make_cht(field, h, t);
    a.basis = {"1", "y"};
    a.degrees = {1, -1};
    return a;
}

// Delta determined by (mu, eps) through dual bases: with g(a,b) = eps(ab)
// and e^j the g-dual basis, Delta(e_i) = sum_j (e_i e_j) (x) e^j.  This is
// the unique coproduct making (mu, eta, eps) a Frobenius algebra.
void delta_from_dual_bases(FrobeniusData& f) {
    Matrix g(f.field, f.dim, f.dim);
    for (std::size_t i = 0; i < f.dim; ++i)
        for (std::size_t j = 0; j < f.dim; ++j) {
            Rat v(0);
            for (std::size_t k = 0; k < f.dim; ++k) v += f.mu[i][j][k] * f.eps[k];
            g.set(i, j, linalg::to_field(f.field, v));
        }
    auto ginv = g.solve(Matrix::identity(f.field, f.dim));
    if (!ginv) throw internal_error("degenerate Frobenius pairing");
    f.delta = zeros3(f.dim);
    for (std::size_t i = 0; i < f.dim; ++i)
        for (std::size_t j = 0; j < f.dim; ++j)
            for (std::size_t k = 0; k < f.dim; ++k) {
                if (f.mu[i][j][k].numerator() == 0) continue;
                for (std::size_t b = 0; b < f.dim; ++b)
                    f.delta[i][k][b] += f.mu[i][j][k] * ginv->at(b, j);
            }
}

void require_char(FieldSpec field, long long p, const std::string& name, bool enforce) {
    if (enforce && field.ch != p)
        throw input_error("IncompatibleCharacteristic: " + name + " requires char " +
                          std::to_string(p));
}

FrobeniusData make_matrix_algebra(FieldSpec field, long long m, const Rat& alpha) {
    if (m < 1) throw input_error("matrix algebra size must be positive");
    if (linalg::to_field(field, alpha).numerator() == 0)
        throw input_error("alpha must be nonzero in the field");
    std::size_t d = static_cast<std::size_t>(m * m);
    FrobeniusData f = blank(d, field);
    auto idx = [&](long long p, long long q) { return (std::size_t)(p * m + q); };
    for (long long p = 0; p < m; ++p)
        for (long long q = 0; q < m; ++q) {
            f.basis.push_back("e" + std::to_string(p + 1) + std::to_string(q + 1));
            for (long long r = 0; r < m; ++r)
                for (long long s = 0; s < m; ++s)
                    if (q == r) f.mu[idx(p, q)][idx(r, s)][idx(p, s)] = Rat(1);
            for (long long r = 0; r < m; ++r)
                f.delta[idx(p, q)][idx(p, r)][idx(r, q)] = alpha;
            if (p == q) {
                f.eta[idx(p, p)] = Rat(1);
                f.eps[idx(p, p)] = Rat(1) / alpha;
            }
        }
    f.grading = GradingMode::none;
    f.normalize();
    return f;
}

FrobeniusData make_quaternion(FieldSpec field, const Rat& alpha) {
    if (linalg::to_field(field, alpha).numerator() == 0)
        throw input_error("alpha must be nonzero in the field");
    FrobeniusData f = blank(4, field);
    f.basis = {"1", "I", "J", "K"};
    const int U = 0, I = 1, J = 2, K = 3;
    auto set_mu = [&](int a, int b, int c, int sign) { f.mu[a][b][c] = Rat(sign); };
    for (int a = 0; a < 4; ++a) {
        set_mu(U, a, a, 1);
        if (a != U) set_mu(a, U, a, 1);
    }
    set_mu(I, I, U, -1);
    set_mu(J, J, U, -1);
    set_mu(K, K, U, -1);
    set_mu(I, J, K, 1);
    set_mu(J, I, K, -1);
    set_mu(J, K, I, 1);
    set_mu(K, J, I, -1);
    set_mu(K, I, J, 1);
    set_mu(I, K, J, -1);
    f.eta[U] = Rat(1);
    // Delta(1) = alpha(1(x)1 - I(x)I - J(x)J - K(x)K), cyclic for I,J,K
    f.delta[U][U][U] = alpha;
    f.delta[U][I][I] = -alpha;
    f.delta[U][J][J] = -alpha;
    f.delta[U][K][K] = -alpha;
    auto set_delta_imag = [&](int x, int y, int z) {
        // Delta(x) = alpha(1(x)x + x(x)1 + y(x)z - z(x)y)
        f.delta[x][U][x] = alpha;
        f.delta[x][x][U] = alpha;
        f.delta[x][y][z] = alpha;
        f.delta[x][z][y] = -alpha;
    };
    set_delta_imag(I, J, K);
    set_delta_imag(J, K, I);
    set_delta_imag(K, I, J);
    f.eps[U] = Rat(1) / alpha;
    f.grading = GradingMode::none;
    f.normalize();
    return f;
}

KnowledgeableFrobenius make_khovanov_pair(FieldSpec field, bool enforce) {
    require_char(field, 2, "khovanov_pair", enforce);
    KnowledgeableFrobenius k;
    k.A = blank(2, field);
    k.A.basis = {"1", "y"};
    k.A.mu[0][0][0] = Rat(1);
    k.A.mu[0][1][1] = Rat(1);
    k.A.mu[1][0][1] = Rat(1);
    // y^2 = 0
    k.A.delta[0][0][1] = Rat(1);
    k.A.delta[0][1][0] = Rat(1);
    k.A.delta[1][1][1] = Rat(1);
    k.A.eta[0] = Rat(1);
    k.A.eps[1] = Rat(1);
    k.A.degrees = {1, -1};
    k.A.grading = GradingMode::graded;
    k.A.normalize();
    k.C = make_cht(field, Rat(0), Rat(0));
    k.iota = Matrix(field, 2, 2);
    k.iota.set(0, 0, Rat(1)); // iota(1)=1, iota(x)=0
    k.iota_star = Matrix(field, 2, 2);
    k.iota_star.set(1, 1, Rat(1)); // iota*(1)=0, iota*(y)=x
    return k;
}

KnowledgeableFrobenius make_truncated_poly(FieldSpec field, bool enforce) {
    long long p = field.ch;
    if (enforce && (p < 2))
        throw input_error("IncompatibleCharacteristic: truncated_poly requires prime char p");
    if (p < 2) p = 2; // unenforced fallback so the raw data is still buildable
    std::size_t d = static_cast<std::size_t>(p);
    KnowledgeableFrobenius k;
    k.A = blank(d, field);
    for (std::size_t l = 0; l < d; ++l)
        k.A.basis.push_back(l == 0 ? "1" : "y^" + std::to_string(l));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            if (i + j < d) k.A.mu[i][j][i + j] = Rat(1); // y^i y^j, truncated
    k.A.eta[0] = Rat(1);
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t j = 0; j + l < d; ++j)
            k.A.delta[l][j + l][d - 1 - j] = Rat(1);
    k.A.eps[d - 1] = Rat(1);
    if (p == 2) {
        k.A.degrees = {1, -1};
        k.A.grading = GradingMode::graded;
    } else if (p == 3) {
        k.A.degrees = {1, 0, -1};
        k.A.grading = GradingMode::graded;
    } else {
        k.A.grading = GradingMode::none;
    }
    k.A.normalize();
    k.C = make_cht(field, Rat(0), Rat(0));
    k.iota = Matrix(field, d, 2);
    k.iota.set(0, 0, Rat(1)); // iota(1)=1, iota(x)=0
    k.iota_star = Matrix(field, 2, d);
    k.iota_star.set(1, d - 1, Rat(1)); // iota*(y^{p-1}) = x
    return k;
}

KnowledgeableFrobenius make_modp(FieldSpec field, bool enforce) {
    long long p = field.ch;
    if (enforce && (p < 3 || p % 2 == 0))
        throw input_error("IncompatibleCharacteristic: modp_X requires odd prime char");
    if (p < 3) p = 3;
    long long n = (p - 1) / 2;
    std::size_t d = static_cast<std::size_t>(p);
    auto idx = [&](long long j) { return static_cast<std::size_t>(j + n); }; // X_j
    KnowledgeableFrobenius k;
    k.A = blank(d, field);
    for (long long j = -n; j <= n; ++j) k.A.basis.push_back("X" + std::to_string(j));
    for (long long j = -n; j <= n; ++j) {
        k.A.mu[idx(1)][idx(j)][idx(j)] += Rat(1);
        if (j != 1) k.A.mu[idx(j)][idx(1)][idx(j)] += Rat(1);
        if (j != 1 && -j != 1) k.A.mu[idx(j)][idx(-j)][idx(-1)] += Rat(1);
    }
    k.A.eta[idx(1)] = Rat(1);
    for (long long l = -n; l <= n; ++l) k.A.delta[idx(1)][idx(l)][idx(-l)] = Rat(1);
    k.A.delta[idx(-1)][idx(-1)][idx(-1)] = Rat(1);
    for (long long j = -n; j <= n; ++j)
        if (j != 1 && j != -1) {
            k.A.delta[idx(j)][idx(-1)][idx(j)] = Rat(1);
            k.A.delta[idx(j)][idx(j)][idx(-1)] = Rat(1);
        }
    k.A.eps[idx(-1)] = Rat(1);
    for (long long j = -n; j <= n; ++j) k.A.degrees[idx(j)] = static_cast<int>(j);
    k.A.grading = GradingMode::graded;
    k.A.normalize();
    k.C = make_cht(field, Rat(0), Rat(0));
    k.iota = Matrix(field, d, 2);
    k.iota.set(idx(1), 0, Rat(1));
    k.iota_star = Matrix(field, 2, d);
    k.iota_star.set(1, idx(-1), Rat(1)); // iota*(X_{-1}) = x
    return k;
}

KnowledgeableFrobenius make_barnatan_pair(FieldSpec field, const Rat& t, bool enforce) {
    require_char(field, 2, "barnatan_pair", enforce);
    KnowledgeableFrobenius k;
    k.A = make_aht(field, Rat(1), t);
    k.C = make_cht(field, Rat(1), t);
    k.iota = Matrix::identity(field, 2);       // iota(1)=1, iota(x)=y
    k.iota_star = Matrix::identity(field, 2);  // iota*(1)=1, iota*(y)=x
    return k;
}

KnowledgeableFrobenius make_lee_pair(FieldSpec field, const Rat& t, bool enforce) {
    require_char(field, 2, "lee_pair", enforce);
    KnowledgeableFrobenius k;
    k.A = make_aht(field, Rat(0), t);
    k.C = make_cht(field, Rat(0), t * t);
    k.iota = Matrix(field, 2, 2);
    k.iota.set(0, 0, Rat(1)); // iota(1)=1
    k.iota.set(0, 1, t);      // iota(x)=t.1
    k.iota_star = Matrix(field, 2, 2);
    k.iota_star.set(0, 1, t); // iota*(y) = t.1 + x
    k.iota_star.set(1, 1, Rat(1));
    return k;
}

// Example 3.19: A = M_2(k) (+) k in char 5, basis (1,A,B,C,D), with the
// state-sum partner C = C_{1,0}.
KnowledgeableFrobenius make_m2k_plus_k(FieldSpec field, bool enforce) {
    require_char(field, 5, "m2k_plus_k", enforce);
    KnowledgeableFrobenius k;
    FrobeniusData& f = k.A;
    f = blank(5, field);
    f.basis = {"1", "A", "B", "C", "D"};
    const int U = 0, A = 1, B = 2, C = 3, D = 4;
    auto m = [&](int a, int b, int c, Rat v) { f.mu[a][b][c] += v; };
    for (int a = 0; a < 5; ++a) {
        m(U, a, a, Rat(1));
        if (a != U) m(a, U, a, Rat(1));
    }
    m(C, C, U, Rat(1));
    m(C, C, D, Rat(-1)); // C.C = 1 - D
    m(D, D, D, Rat(1));
    m(A, B, U, Rat(1, 2));
    m(A, B, C, Rat(1, 2));
    m(A, B, D, Rat(-1, 2)); // A.B = (1+C-D)/2
    m(B, A, U, Rat(1, 2));
    m(B, A, C, Rat(-1, 2));
    m(B, A, D, Rat(-1, 2)); // B.A = (1-C-D)/2
    m(A, C, A, Rat(-1));
    m(C, A, A, Rat(1));
    m(B, C, B, Rat(1));
    m(C, B, B, Rat(-1));
    f.eta[U] = Rat(1);
    // eps = 2 tr (+) id; in characteristic 5 this leaves eps(D) = 1 as the
    // only nonzero value on the basis, and makes the window element the unit
    f.eps[D] = Rat(1);
    delta_from_dual_bases(f);
    f.degrees = {1, 0, 0, 0, -1};
    f.grading = GradingMode::filtered;
    f.normalize();
    k.C = make_cht(field, Rat(1), Rat(0));
    k.iota = Matrix(field, 5, 2);
    k.iota.set(U, 0, Rat(1)); // iota(1)=1
    k.iota.set(D, 1, Rat(1)); // iota(x)=D
    k.iota_star = Matrix(field, 2, 5);
    k.iota_star.set(0, U, Rat(1)); // iota*(1)=1
    k.iota_star.set(1, D, Rat(1)); // iota*(D)=x
    return k;
}

// Example 3.20: A = H_k (+) k in char 5, basis (1,I,J,K,L), partner C_{1,0}.
KnowledgeableFrobenius make_hk_plus_k(FieldSpec field, bool enforce) {
    require_char(field, 5, "hk_plus_k", enforce);
    KnowledgeableFrobenius k;
    FrobeniusData& f = k.A;
    f = blank(5, field);
    f.basis = {"1", "I", "J", "K", "L"};
    const int U = 0, I = 1, J = 2, K = 3, L = 4;
    auto m = [&](int a, int b, int c, Rat v) { f.mu[a][b][c] += v; };
    for (int a = 0; a < 5; ++a) {
        m(U, a, a, Rat(1));
        if (a != U) m(a, U, a, Rat(1));
    }
    for (int x : {I, J, K}) {
        m(x, x, L, Rat(1));
        m(x, x, U, Rat(-1)); // x^2 = L - 1
    }
    m(I, J, K, Rat(1));
    m(J, I, K, Rat(-1));
    m(J, K, I, Rat(1));
    m(K, J, I, Rat(-1));
    m(K, I, J, Rat(1));
    m(I, K, J, Rat(-1));
    m(L, L, L, Rat(1));
    f.eta[U] = Rat(1);
    // eps = 4 Re (+) id; in characteristic 5 only eps(L) = 1 survives on the
    // basis, and the window element is the unit
    f.eps[L] = Rat(1);
    delta_from_dual_bases(f);
    f.degrees = {1, 0, 0, 0, -1};
    f.grading = GradingMode::filtered;
    f.normalize();
    k.C = make_cht(field, Rat(1), Rat(0));
    k.iota = Matrix(field, 5, 2);
    k.iota.set(U, 0, Rat(1));
    k.iota.set(L, 1, Rat(1)); // iota(x)=L
    k.iota_star = Matrix(field, 2, 5);
    k.iota_star.set(0, U, Rat(1));
    k.iota_star.set(1, L, Rat(1)); // iota*(L)=x
    return k;
}

} // namespace

std::vector<std::string> builtin_names() {
    return {"c_ht",     "khovanov_pair", "truncated_poly", "modp_X",      "barnatan_pair",
            "lee_pair", "matrix",        "quaternion",     "m2k_plus_k",  "hk_plus_k"};
}

Builtin builtin(const std::string& name, FieldSpec field, const BuiltinParams& params,
                bool enforce) {
    linalg::validate_field(field);
    if (name == "c_ht") return make_cht(field, params.h, params.t);
    if (name == "khovanov_pair") return make_khovanov_pair(field, enforce);
    if (name == "truncated_poly") return make_truncated_poly(field, enforce);
    if (name == "modp_X") return make_modp(field, enforce);
    if (name == "barnatan_pair") return make_barnatan_pair(field, params.t, enforce);
    if (name == "lee_pair") return make_lee_pair(field, params.t, enforce);
    if (name == "matrix") return make_matrix_algebra(field, params.m, params.alpha);
    if (name == "quaternion") {
        if (enforce && field.ch == 2)
            throw input_error(
                "IncompatibleCharacteristic: quaternion requires char != 2");
        return make_quaternion(field, params.alpha);
    }
    if (name == "m2k_plus_k") return make_m2k_plus_k(field, enforce);
    if (name == "hk_plus_k") return make_hk_plus_k(field, enforce);
    throw input_error("unknown algebra name: " + name);
}

// ------------------------------- JSON I/O --------------------------------

namespace {

using nlohmann::json;

json rat_to_json(const FieldSpec& f, const Rat& x) {
    if (f.ch > 0) return json(linalg::residue(x, f.ch));
    if (x.denominator() == 1) return json(x.numerator().str());
    return json(x.numerator().str() + "/" + x.denominator().str());
}

Rat rat_from_json(const json& j) {
    if (j.is_number_integer()) return Rat(linalg::Int(j.get<long long>()));
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rat(linalg::Int(s));
            return Rat(linalg::Int(s.substr(0, slash)), linalg::Int(s.substr(slash + 1)));
        } catch (const std::exception&) {
            throw input_error("bad rational literal: " + s);
        }
    }
    throw input_error("expected integer or \"n/d\" string");
}

std::string grading_str(GradingMode g) {
    switch (g) {
        case GradingMode::graded: return "graded";
        case GradingMode::filtered: return "filtered";
        default: return "none";
    }
}

GradingMode grading_from_str(const std::string& s) {
    if (s == "graded") return GradingMode::graded;
    if (s == "filtered") return GradingMode::filtered;
    if (s == "none") return GradingMode::none;
    throw input_error("bad grading_mode: " + s);
}

} // namespace

std::string frobenius_to_json(const FrobeniusData& f) {
    json j;
    j["version"] = 1;
    j["dim"] = f.dim;
    j["basis"] = f.basis;
    j["field"] = {{"char", f.field.ch}};
    j["grading_mode"] = grading_str(f.grading);
    j["degrees"] = f.degrees;
    json mu = json::array(), delta = json::array(), eta = json::array(),
         eps = json::array();
    for (std::size_t i = 0; i < f.dim; ++i) {
        json mi = json::array(), di = json::array();
        for (std::size_t a = 0; a < f.dim; ++a) {
            json mij = json::array(), dij = json::array();
            for (std::size_t b = 0; b < f.dim; ++b) {
                mij.push_back(rat_to_json(f.field, f.mu[i][a][b]));
                dij.push_back(rat_to_json(f.field, f.delta[i][a][b]));
            }
            mi.push_back(mij);
            di.push_back(dij);
        }
        mu.push_back(mi);
        delta.push_back(di);
        eta.push_back(rat_to_json(f.field, f.eta[i]));
        eps.push_back(rat_to_json(f.field, f.eps[i]));
    }
    j["mu"] = mu;
    j["delta"] = delta;
    j["eta"] = eta;
    j["eps"] = eps;
    return j.dump(2);
}

FrobeniusData frobenius_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("bad JSON: ") + e.what());
    }
    try {
        FrobeniusData f;
        f.dim = j.at("dim").get<std::size_t>();
        f.field.ch = j.at("field").at("char").get<long long>();
        linalg::validate_field(f.field);
        f.basis = j.at("basis").get<std::vector<std::string>>();
        f.degrees = j.at("degrees").get<std::vector<int>>();
        f.grading = grading_from_str(j.at("grading_mode").get<std::string>());
        auto load3 = [&](const json& src) {
            Tensor3 t = zeros3(f.dim);
            if (src.size() != f.dim) throw input_error("tensor rank-3 size mismatch");
            for (std::size_t i = 0; i < f.dim; ++i)
                for (std::size_t a = 0; a < f.dim; ++a)
                    for (std::size_t b = 0; b < f.dim; ++b)
                        t[i][a][b] = rat_from_json(src.at(i).at(a).at(b));
            return t;
        };
        f.mu = load3(j.at("mu"));
        f.delta = load3(j.at("delta"));
        for (const auto& e : j.at("eta")) f.eta.push_back(rat_from_json(e));
        for (const auto& e : j.at("eps")) f.eps.push_back(rat_from_json(e));
        if (f.eta.size() != f.dim || f.eps.size() != f.dim ||
            f.basis.size() != f.dim || f.degrees.size() != f.dim)
            throw input_error("vector size mismatch");
        f.normalize();
        return f;
    } catch (const json::exception& e) {
        throw input_error(std::string("bad algebra JSON: ") + e.what());
    }
}

} // namespace th::algebra
