#include "th/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace th::cli {

using nlohmann::json;
using algebra::Builtin;
using algebra::BuiltinParams;
using algebra::FrobeniusData;
using algebra::GradingMode;
using algebra::KnowledgeableFrobenius;
using algebra::TangleAlgebra;
using complex::BigradedDims;
using complex::FilteredChainComplex;
using linalg::FieldSpec;
using linalg::Rat;

namespace {

linalg::Rat parse_rat(const std::string& s) {
    auto bad = [&] { throw input_error("MalformedRational: '" + s + "'"); };
    std::string num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
    }
    auto is_int = [](const std::string& x) {
        if (x.empty()) return false;
        std::size_t i = (x[0] == '-' || x[0] == '+') ? 1 : 0;
        if (i == x.size()) return false;
        for (; i < x.size(); ++i)
            if (!std::isdigit((unsigned char)x[i])) return false;
        return true;
    };
    if (!is_int(num) || !is_int(den)) bad();
    linalg::Int n(num), d(den);
    if (d == 0) bad();
    return Rat(n, d);
}

struct Opts {
    std::string algebra = "barnatan_pair";
    long long charp = 2;
    std::string h = "0", t = "0", alpha = "1";
    long long m = 2;
    std::string epsilon = "+1";
    std::string format = "text";
    int page = 1;
    unsigned long long seed = 1;
    std::string moves = "R1,R2,R3";
    int nmax = 6;
    std::string input;
};

int parse_epsilon(const std::string& s) {
    if (s == "+1" || s == "1") return 1;
    if (s == "-1") return -1;
    throw input_error("BadEpsilon: expected +1 or -1, got '" + s + "'");
}

FieldSpec field_of(const Opts& o) {
    FieldSpec f{o.charp};
    linalg::validate_field(f);
    return f;
}

Builtin make_builtin(const Opts& o, bool enforce) {
    BuiltinParams p;
    p.h = parse_rat(o.h);
    p.t = parse_rat(o.t);
    p.alpha = parse_rat(o.alpha);
    p.m = o.m;
    return algebra::builtin(o.algebra, field_of(o), p, enforce);
}

TangleAlgebra make_tangle_algebra(const Opts& o) {
    Builtin b = make_builtin(o, true);
    if (auto* k = std::get_if<KnowledgeableFrobenius>(&b))
        return algebra::to_tangle_algebra(*k);
    auto& f = std::get<FrobeniusData>(b);
    if (f.is_commutative()) return algebra::to_tangle_algebra(f);
    return algebra::to_tangle_algebra(algebra::state_sum_kfrob(f));
}

KnowledgeableFrobenius make_knowledgeable(const Opts& o) {
    Builtin b = make_builtin(o, true);
    if (auto* k = std::get_if<KnowledgeableFrobenius>(&b)) return *k;
    return algebra::state_sum_kfrob(std::get<FrobeniusData>(b));
}

tangle::TangleDiagram load_diagram(const Opts& o) {
    if (o.input.empty()) throw input_error("MissingInput: no tangle file given");
    std::ifstream in(o.input);
    if (!in) throw input_error("CannotOpenFile: '" + o.input + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return tangle::analyze(tangle::parse_slice_word(ss.str()));
}

void text_header(std::ostream& out, const Opts& o, const tangle::TangleDiagram& t) {
    out << "algebra: " << o.algebra << " (char " << o.charp << ")\n"
        << "epsilon: " << (parse_epsilon(o.epsilon) > 0 ? "+1" : "-1") << "\n"
        << "crossings: n+ = " << t.n_plus << ", n- = " << t.n_minus << "\n";
}

json json_header(const Opts& o, const tangle::TangleDiagram& t) {
    json j;
    j["field"] = json{{"char", o.charp}};
    j["algebra"] = o.algebra;
    j["epsilon"] = parse_epsilon(o.epsilon);
    j["n_plus"] = t.n_plus;
    j["n_minus"] = t.n_minus;
    return j;
}

json homology_json(const BigradedDims& dims) {
    // sorted by (r, k) for a stable, readable order
    std::map<std::pair<int, int>, std::size_t> by_r;
    for (auto& [kr, v] : dims.ranks) by_r[{kr.second, kr.first}] = v;
    json arr = json::array();
    for (auto& [rk, v] : by_r)
        arr.push_back(json{{"r", rk.first}, {"k", rk.second}, {"rank", v}});
    return arr;
}

int cmd_algebra_list(std::ostream& out) {
    for (auto& n : algebra::builtin_names()) out << n << "\n";
    return 0;
}

int cmd_algebra_check(const Opts& o, std::ostream& out) {
    Builtin b = make_builtin(o, /*enforce=*/false);
    out << "algebra: " << o.algebra << " (char " << o.charp << ")\n";
    algebra::AxiomReport rep;
    const FrobeniusData* c_part = nullptr;
    if (auto* k = std::get_if<KnowledgeableFrobenius>(&b)) {
        rep = algebra::validate_knowledgeable(*k);
        auto deg = algebra::check_euler_degrees(*k);
        rep.checks.insert(rep.checks.end(), deg.checks.begin(), deg.checks.end());
        c_part = &k->C;
        out << "strongly separable (A): "
            << (algebra::is_strongly_separable(k->A) ? "yes" : "no") << "\n";
    } else {
        auto& f = std::get<FrobeniusData>(b);
        rep = algebra::validate_frobenius(f);
        if (f.is_commutative()) c_part = &f;
        out << "strongly separable: "
            << (algebra::is_strongly_separable(f) ? "yes" : "no") << "\n";
    }
    if (c_part) {
        auto bn = algebra::check_barnatan(*c_part);
        out << "bar-natan: S=" << (bn.S ? "yes" : "no")
            << " T=" << (bn.T ? "yes" : "no")
            << " 4Tu=" << (bn.fourTu ? "yes" : "no") << "\n";
    }
    for (auto& c : rep.checks) {
        out << (c.ok ? "  [ok]   " : "  [FAIL] ") << c.name;
        if (!c.ok && !c.detail.empty()) out << " (" << c.detail << ")";
        out << "\n";
    }
    out << (rep.ok() ? "result: pass\n" : "result: fail\n");
    return rep.ok() ? 0 : 1;
}

int cmd_homology(const Opts& o, std::ostream& out, bool polynomial_only) {
    auto t = load_diagram(o);
    auto alg = make_tangle_algebra(o);
    auto c = complex::tangle_complex(t, alg, parse_epsilon(o.epsilon), true);
    auto dims = complex::homology_bigraded(c, true);
    auto poly = complex::poincare_polynomial(dims);
    if (o.format == "json") {
        json j = json_header(o, t);
        j["homology"] = homology_json(dims);
        j["polynomial"] = poly.str();
        out << j.dump(2) << "\n";
    } else if (polynomial_only) {
        out << poly.str() << "\n";
    } else {
        text_header(out, o, t);
        out << "homology ranks:\n" << dims.table()
            << "polynomial: " << poly.str() << "\n";
    }
    return 0;
}

int cmd_euler(const Opts& o, std::ostream& out) {
    auto t = load_diagram(o);
    auto alg = make_tangle_algebra(o);
    auto c = complex::tangle_complex(t, alg, parse_epsilon(o.epsilon), true);
    auto chi = complex::graded_euler_characteristic(c);
    if (o.format == "json") {
        json j = json_header(o, t);
        j["euler"] = complex::laurent_str(chi);
        out << j.dump(2) << "\n";
    } else {
        out << complex::laurent_str(chi) << "\n";
    }
    return 0;
}

int cmd_spectral(const Opts& o, std::ostream& out) {
    auto t = load_diagram(o);
    auto alg = make_tangle_algebra(o);
    auto c = complex::tangle_complex(t, alg, parse_epsilon(o.epsilon), true);
    auto page = complex::spectral_page(c, o.page, true);
    if (o.format == "json") {
        json j = json_header(o, t);
        j["page"] = page.r;
        j["dims"] = homology_json(page.dims);
        json dr = json::array();
        for (auto& [kr, v] : page.d_ranks)
            dr.push_back(json{{"k", kr.first}, {"r", kr.second}, {"rank", v}});
        j["d_ranks"] = dr;
        out << j.dump(2) << "\n";
    } else {
        text_header(out, o, t);
        out << "E_" << page.r << " dimensions:\n" << page.dims.table();
        out << "d_" << page.r << " ranks (nonzero):\n";
        for (auto& [kr, v] : page.d_ranks)
            if (v) out << "  k=" << kr.first << " r=" << kr.second
                       << " rank=" << v << "\n";
    }
    return 0;
}

int cmd_compose(const Opts& o, std::ostream& out) {
    auto t = load_diagram(o);
    auto k = make_knowledgeable(o);
    int eps = parse_epsilon(o.epsilon);
    auto bc = compose::compose_tangle(t, eps, k);
    auto dims = complex::homology_bigraded(bc.cx, true);
    std::string detail;
    bool ok = compose::verify_composition(t, eps, k, &detail);
    if (o.format == "json") {
        json j = json_header(o, t);
        j["homology"] = homology_json(dims);
        j["polynomial"] = complex::poincare_polynomial(dims).str();
        json ba = json::array();
        for (auto& b : bc.boundary)
            ba.push_back(json{{"level", b.point.level},
                              {"pos", b.point.pos},
                              {"sign", b.is_plus ? "+" : "-"}});
        j["boundary_actions"] = ba;
        j["verified"] = ok;
        out << j.dump(2) << "\n";
    } else {
        text_header(out, o, t);
        out << "boundary points:";
        for (auto& b : bc.boundary)
            out << " (" << b.point.level << "," << b.point.pos << ")"
                << (b.is_plus ? "+" : "-");
        out << "\nterm dimensions:";
        for (std::size_t i = 0; i < bc.cx.terms.size(); ++i)
            out << " r=" << bc.cx.r_min + (int)i << ":" << bc.cx.terms[i].dim();
        out << "\nhomology ranks:\n" << dims.table();
        out << "verified against global pipeline: " << (ok ? "yes" : "NO") << "\n";
        if (!ok) out << detail;
    }
    return ok ? 0 : 1;
}

int cmd_oracle(const Opts& o, std::ostream& out) {
    auto t = load_diagram(o);
    if (t.in_points() != 0 || t.out_points() != 0)
        throw input_error("NotALink: the oracle needs a closed diagram");
    auto alg = make_tangle_algebra(o);
    int eps = parse_epsilon(o.epsilon);
    auto oracle = complex::khovanov_link_oracle(t, alg.C);
    auto c = complex::tangle_complex(t, alg, eps, true);
    auto main = complex::homology_bigraded(c, true);
    bool agree = oracle == main;
    if (o.format == "json") {
        json j = json_header(o, t);
        j["homology"] = homology_json(main);
        j["oracle"] = homology_json(oracle);
        j["agree"] = agree;
        out << j.dump(2) << "\n";
    } else {
        text_header(out, o, t);
        out << "oracle ranks:\n" << oracle.table()
            << "pipeline ranks:\n" << main.table()
            << "agree: " << (agree ? "yes" : "NO") << "\n";
    }
    return agree ? 0 : 1;
}

std::set<std::string> parse_moves(const std::string& csv) {
    std::set<std::string> moves;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok != "R1" && tok != "R2" && tok != "R3")
            throw input_error("BadMove: '" + tok + "' (expected R1,R2,R3)");
        moves.insert(tok);
    }
    if (moves.empty()) throw input_error("BadMove: empty move list");
    return moves;
}

int cmd_reidemeister(const Opts& o, std::ostream& out) {
    auto moves = parse_moves(o.moves);
    auto alg = make_tangle_algebra(o);
    auto rep = reidemeister_suite(o.seed, moves, o.nmax, alg,
                                  parse_epsilon(o.epsilon));
    if (o.format == "json") {
        json j;
        j["seed"] = rep.seed;
        json arr = json::array();
        for (auto& r : rep.results)
            arr.push_back(json{{"move", r.move}, {"index", r.index},
                               {"pass", r.pass}, {"detail", r.detail}});
        j["results"] = arr;
        j["all_pass"] = rep.all_pass();
        out << j.dump(2) << "\n";
    } else {
        out << "algebra: " << o.algebra << " (char " << o.charp << "), seed "
            << rep.seed << "\n";
        for (auto& r : rep.results)
            out << "  " << r.move << " pair " << r.index << ": "
                << (r.pass ? "pass" : "FAIL") << "\n";
        out << (rep.all_pass() ? "result: pass\n" : "result: fail\n");
    }
    return rep.all_pass() ? 0 : 1;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out) {
    CLI::App app{"tanglehom: tangle homology from knowledgeable Frobenius algebras"};
    app.require_subcommand(1);
    Opts o;

    auto add_algebra_flags = [&](CLI::App* sub) {
        // free the short -h for the algebra parameter of the same name
        sub->set_help_flag("--help", "print this help message and exit");
        sub->add_option("--algebra", o.algebra, "built-in algebra name");
        sub->add_option("--char", o.charp, "field characteristic (0 = Q)");
        sub->add_option("--h", o.h, "parameter h (rational)");
        sub->add_option("--t", o.t, "parameter t (rational)");
        sub->add_option("--alpha", o.alpha, "parameter alpha (rational)");
        sub->add_option("--m", o.m, "matrix-algebra size");
    };
    auto add_diagram_flags = [&](CLI::App* sub) {
        sub->add_option("--epsilon", o.epsilon, "checkerboard colouring (+1/-1)");
        sub->add_option("--format", o.format, "output format (text/json)")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("input", o.input, "slice-word tangle file");
    };

    auto* list = app.add_subcommand("algebra-list", "list built-in algebras");
    auto* check = app.add_subcommand("algebra-check", "verify algebra axioms");
    add_algebra_flags(check);
    auto* hom = app.add_subcommand("homology", "bigraded homology rank table");
    auto* poly = app.add_subcommand("polynomial", "tangle polynomial");
    auto* euler = app.add_subcommand("euler", "graded Euler characteristic");
    auto* spectral = app.add_subcommand("spectral", "spectral-sequence page");
    spectral->add_option("--page", o.page, "page index r >= 0");
    auto* comp = app.add_subcommand("compose", "cell-by-cell composition");
    auto* oracle = app.add_subcommand("oracle", "independent link-homology oracle");
    for (auto* sub : {hom, poly, euler, spectral, comp, oracle}) {
        add_algebra_flags(sub);
        add_diagram_flags(sub);
    }
    auto* reid = app.add_subcommand("reidemeister", "randomized invariance suite");
    add_algebra_flags(reid);
    reid->add_option("--epsilon", o.epsilon, "checkerboard colouring (+1/-1)");
    reid->add_option("--format", o.format, "output format (text/json)")
        ->check(CLI::IsMember({"text", "json"}));
    reid->add_option("--seed", o.seed, "random seed");
    reid->add_option("--moves", o.moves, "comma-separated subset of R1,R2,R3");
    reid->add_option("--nmax", o.nmax, "crossing bound (<= 10)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, out);
        return 0;
    }

    if (list->parsed()) return cmd_algebra_list(out);
    if (check->parsed()) return cmd_algebra_check(o, out);
    if (hom->parsed()) return cmd_homology(o, out, false);
    if (poly->parsed()) return cmd_homology(o, out, true);
    if (euler->parsed()) return cmd_euler(o, out);
    if (spectral->parsed()) return cmd_spectral(o, out);
    if (comp->parsed()) return cmd_compose(o, out);
    if (oracle->parsed()) return cmd_oracle(o, out);
    if (reid->parsed()) return cmd_reidemeister(o, out);
    throw internal_error("unhandled subcommand");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
    try {
        return run_impl(args, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const input_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const compute_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

// ------------------------- random diagrams & moves -------------------------

namespace {

int rng_int(std::mt19937_64& rng, int lo, int hi) { // inclusive
    return lo + (int)(rng() % (unsigned long long)(hi - lo + 1));
}

} // namespace

tangle::SliceWord random_slice_word(std::mt19937_64& rng, int max_crossings,
                                    int max_width, bool close_link) {
    using tangle::Dir;
    using tangle::Slice;
    using tangle::SliceKind;
    tangle::SliceWord w;
    std::vector<Dir> cur;
    int ncross = 0;
    int target = rng_int(rng, 3, 9);
    for (int step = 0; step < target; ++step) {
        int width = (int)cur.size();
        // weights: cup 0.2, cap 0.2, crossing 0.6, restricted to admissible
        std::vector<std::pair<SliceKind, int>> menu; // (kind, weight in tenths)
        if (width < max_width) menu.push_back({SliceKind::cup, 2});
        std::vector<int> cap_sites;
        for (int j = 1; j < width; ++j)
            if (cur[j - 1] != cur[j]) cap_sites.push_back(j);
        if (!cap_sites.empty()) menu.push_back({SliceKind::cap, 2});
        if (width >= 2 && ncross < max_crossings)
            menu.push_back({SliceKind::cross_over, 6});
        if (menu.empty()) break;
        int tot = 0;
        for (auto& [k, wt] : menu) tot += wt;
        int pick = rng_int(rng, 0, tot - 1);
        SliceKind kind = menu.back().first;
        for (auto& [k, wt] : menu) {
            if (pick < wt) { kind = k; break; }
            pick -= wt;
        }
        Slice s;
        s.kind = kind;
        switch (kind) {
        case SliceKind::cup:
            s.pos = rng_int(rng, 1, width + 1);
            s.cup_left = rng() % 2 ? Dir::up : Dir::down;
            cur.insert(cur.begin() + (s.pos - 1),
                       {s.cup_left, tangle::flip(s.cup_left)});
            break;
        case SliceKind::cap:
            s.pos = cap_sites[(std::size_t)rng_int(rng, 0, (int)cap_sites.size() - 1)];
            cur.erase(cur.begin() + (s.pos - 1), cur.begin() + (s.pos + 1));
            break;
        default:
            s.kind = rng() % 2 ? SliceKind::cross_over : SliceKind::cross_under;
            s.pos = rng_int(rng, 1, width - 1);
            std::swap(cur[s.pos - 1], cur[s.pos]);
            ++ncross;
            break;
        }
        w.slices.push_back(s);
    }
    if (close_link) {
        while (!cur.empty()) {
            int site = -1;
            for (int j = 1; j < (int)cur.size(); ++j)
                if (cur[j - 1] != cur[j]) { site = j; break; }
            if (site < 0) throw internal_error("unbalanced open strands");
            w.slices.push_back({tangle::SliceKind::cap, site, Dir::up});
            cur.erase(cur.begin() + (site - 1), cur.begin() + (site + 1));
        }
    }
    return w;
}

std::size_t complex_dimension(const tangle::TangleDiagram& t, std::size_t dim_a,
                              std::size_t dim_c, int epsilon) {
    std::size_t n = t.n_crossings(), total = 0;
    for (std::uint32_t alpha = 0; alpha < (1u << n); ++alpha) {
        auto res = tangle::resolve(t, alpha, epsilon);
        std::size_t d = 1;
        for (auto& c : res.comps) d *= c.is_circle ? dim_c : dim_a;
        total += d;
    }
    return total;
}

bool ReidemeisterReport::all_pass() const {
    return std::all_of(results.begin(), results.end(),
                       [](const MovePairResult& r) { return r.pass; });
}

namespace {

std::string word_str(const tangle::SliceWord& w) {
    std::ostringstream os;
    os << "tangle v1 / in " << w.in_count;
    for (auto& s : w.slices) {
        os << " / ";
        switch (s.kind) {
        case tangle::SliceKind::cap: os << "CAP " << s.pos; break;
        case tangle::SliceKind::cup:
            os << "CUP " << s.pos << " "
               << (s.cup_left == tangle::Dir::up ? "u" : "d");
            break;
        case tangle::SliceKind::cross_over: os << "XO " << s.pos; break;
        case tangle::SliceKind::cross_under: os << "XU " << s.pos; break;
        }
    }
    os << " / end";
    return os.str();
}

tangle::SliceWord insert_slices(const tangle::SliceWord& w, std::size_t level,
                                const std::vector<tangle::Slice>& ins) {
    tangle::SliceWord out = w;
    out.slices.insert(out.slices.begin() + (std::ptrdiff_t)level, ins.begin(),
                      ins.end());
    return out;
}

bool equal_invariants(const FilteredChainComplex& c1,
                      const FilteredChainComplex& c2, std::string* why) {
    auto h1 = complex::homology_bigraded(c1, true);
    auto h2 = complex::homology_bigraded(c2, true);
    if (!(h1 == h2)) {
        if (why) *why = "homology tables differ:\n" + h1.table() + "vs\n" + h2.table();
        return false;
    }
    if (c1.mode == GradingMode::filtered) {
        for (int r = 1; r <= 3; ++r) {
            auto p1 = complex::spectral_page(c1, r, true);
            auto p2 = complex::spectral_page(c2, r, true);
            if (!(p1.dims == p2.dims)) {
                if (why)
                    *why = "E_" + std::to_string(r) + " tables differ:\n" +
                           p1.dims.table() + "vs\n" + p2.dims.table();
                return false;
            }
        }
    }
    return true;
}

} // namespace

ReidemeisterReport reidemeister_suite(unsigned long long seed,
                                      const std::set<std::string>& moves,
                                      int n_max,
                                      const algebra::TangleAlgebra& alg,
                                      int epsilon, int trials) {
    if (n_max < 1 || n_max > 10)
        throw input_error("BadNMax: n_max must be between 1 and 10");
    ReidemeisterReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    bool link_only = !alg.knowledgeable();
    std::size_t dim_a = alg.A ? alg.A->dim : alg.C.dim;
    std::size_t dim_cap = 6000 / std::max<std::size_t>(dim_a, 2);

    for (const std::string mv : {"R1", "R2", "R3"}) {
        if (!moves.count(mv)) continue;
        int need = mv == "R1" ? 1 : mv == "R2" ? 2 : 3;
        int overhead = mv == "R3" ? 3 : need; // extra crossings in the pair
        for (int trial = 1; trial <= trials; ++trial) {
            MovePairResult res;
            res.move = mv;
            res.index = trial;
            bool built = false;
            for (int attempt = 0; attempt < 400 && !built; ++attempt) {
                auto base = random_slice_word(
                    rng, std::max(0, n_max - overhead), 4, link_only);
                auto tb = tangle::analyze(base);
                std::vector<std::size_t> levels;
                std::size_t last = base.slices.size();
                for (std::size_t l = 0; l <= last; ++l) {
                    if (tb.width(l) < need) continue;
                    if (link_only && (l == 0 || l == last)) continue;
                    levels.push_back(l);
                }
                if (levels.empty()) continue;
                std::size_t lev =
                    levels[(std::size_t)rng_int(rng, 0, (int)levels.size() - 1)];
                int width = tb.width(lev);
                tangle::SliceWord w1, w2;
                using tangle::Slice;
                using tangle::SliceKind;
                if (mv == "R1") {
                    int i = rng_int(rng, 1, width);
                    tangle::Dir d = tb.level_dirs[lev][(std::size_t)i - 1];
                    std::vector<Slice> ins{
                        {SliceKind::cup, i + 1, d},
                        {rng() % 2 ? SliceKind::cross_over
                                   : SliceKind::cross_under, i, tangle::Dir::up},
                        {SliceKind::cap, i + 1, tangle::Dir::up}};
                    w1 = base;
                    w2 = insert_slices(base, lev, ins);
                } else if (mv == "R2") {
                    int i = rng_int(rng, 1, width - 1);
                    bool over_first = rng() % 2;
                    std::vector<Slice> ins{
                        {over_first ? SliceKind::cross_over
                                    : SliceKind::cross_under, i, tangle::Dir::up},
                        {over_first ? SliceKind::cross_under
                                    : SliceKind::cross_over, i, tangle::Dir::up}};
                    w1 = base;
                    w2 = insert_slices(base, lev, ins);
                } else {
                    int i = rng_int(rng, 1, width - 2);
                    SliceKind k = rng() % 2 ? SliceKind::cross_over
                                            : SliceKind::cross_under;
                    w1 = insert_slices(base, lev,
                                       {{k, i, tangle::Dir::up},
                                        {k, i + 1, tangle::Dir::up},
                                        {k, i, tangle::Dir::up}});
                    w2 = insert_slices(base, lev,
                                       {{k, i + 1, tangle::Dir::up},
                                        {k, i, tangle::Dir::up},
                                        {k, i + 1, tangle::Dir::up}});
                }
                tangle::TangleDiagram t1, t2;
                try {
                    t1 = tangle::analyze(w1);
                    t2 = tangle::analyze(w2);
                } catch (const input_error&) {
                    // an R3 braid permutes the strands, which can turn a
                    // later CAP of the base word inadmissible; retry
                    continue;
                }
                if (complex_dimension(t1, dim_a, alg.C.dim, epsilon) +
                        complex_dimension(t2, dim_a, alg.C.dim, epsilon) >
                    dim_cap)
                    continue;
                res.word1 = word_str(w1);
                res.word2 = word_str(w2);
                auto c1 = complex::tangle_complex(t1, alg, epsilon, true);
                auto c2 = complex::tangle_complex(t2, alg, epsilon, true);
                res.pass = equal_invariants(c1, c2, &res.detail);
                built = true;
            }
            if (!built) {
                res.pass = false;
                res.detail = "could not build an admissible move pair";
            }
            rep.results.push_back(std::move(res));
        }
    }
    return rep;
}

} // namespace th::cli
