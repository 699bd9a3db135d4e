// Benchmark: OpenMP-parallel kernels against the serial reference paths.
// Compares (a) dense F_p rank/kernel elimination and (b) cube realization +
// homology of a moderately sized random link, checking that both paths
// produce identical results while reporting wall times.

#include <chrono>
#include <iostream>
#include <random>

#include "th/cli.hpp"

using namespace th;
using Clock = std::chrono::steady_clock;

static double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

static void bench_rank(std::size_t n, long long p, std::mt19937_64& rng) {
    linalg::Matrix m({p}, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.set(i, j, linalg::Rat((long long)(rng() % (unsigned long long)p)));
    auto t0 = Clock::now();
    std::size_t r_serial = m.rank(false);
    double serial = ms_since(t0);
    t0 = Clock::now();
    std::size_t r_par = m.rank(true);
    double par = ms_since(t0);
    std::cout << "rank " << n << "x" << n << " over F_" << p << ": serial "
              << serial << " ms, parallel " << par << " ms, speedup "
              << (par > 0 ? serial / par : 0.0)
              << (r_serial == r_par ? "" : "  ** MISMATCH **") << "\n";
}

static void bench_homology(unsigned long long seed) {
    std::mt19937_64 rng(seed);
    tangle::TangleDiagram t;
    for (;;) {
        auto w = cli::random_slice_word(rng, 8, 4, true);
        t = tangle::analyze(w);
        auto d = cli::complex_dimension(t, 2, 2, 1);
        if (t.n_crossings() >= 6 && d >= 500 && d <= 6000) break;
    }
    auto b = algebra::builtin("barnatan_pair", {2});
    auto alg = algebra::to_tangle_algebra(
        std::get<algebra::KnowledgeableFrobenius>(b));
    for (bool parallel : {false, true}) {
        auto t0 = Clock::now();
        auto c = complex::tangle_complex(t, alg, 1, parallel);
        auto h = complex::homology_bigraded(c, parallel);
        std::cout << (parallel ? "parallel" : "serial  ")
                  << " tangle homology (" << t.n_crossings()
                  << " crossings): " << ms_since(t0) << " ms, total rank "
                  << h.total() << "\n";
    }
}

int main() {
    std::mt19937_64 rng(42);
    for (std::size_t n : {200, 400, 800}) bench_rank(n, 2, rng);
    bench_rank(400, 5, rng);
    bench_homology(7);
    return 0;
}
