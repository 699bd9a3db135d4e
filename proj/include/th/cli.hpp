#pragma once

// Command-line front end: argument parsing, algebra/field selection,
// dispatch to the computation modules, canonical text/JSON output, the
// randomized Reidemeister suite and the random diagram generator.

#include <iosfwd>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "th/compose.hpp"

namespace th::cli {

// In-process entry point: `args` excludes the program name.  Returns the
// exit status (0 success, 1 computation error, 2 input error) and writes
// deterministic bytes to `out` / diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Random slice word with `in 0`, at most max_crossings crossings and
// max_width strands; close_link caps off every remaining strand.
tangle::SliceWord random_slice_word(std::mt19937_64& rng, int max_crossings,
                                    int max_width, bool close_link);

// Total dimension of the would-be tangle complex (sum over all resolutions
// of the products of factor dimensions) - used to cap randomized tests.
std::size_t complex_dimension(const tangle::TangleDiagram& t, std::size_t dim_a,
                              std::size_t dim_c, int epsilon);

struct MovePairResult {
    std::string move;
    int index = 0;
    bool pass = false;
    std::string word1, word2;
    std::string detail;
};

struct ReidemeisterReport {
    unsigned long long seed = 0;
    std::vector<MovePairResult> results;
    bool all_pass() const;
};

// Random diagrams related by one R-move; rank tables must agree (E_r pages
// for r in {1,2,3} plus bigraded homology in the filtered case).
ReidemeisterReport reidemeister_suite(unsigned long long seed,
                                      const std::set<std::string>& moves,
                                      int n_max,
                                      const algebra::TangleAlgebra& alg,
                                      int epsilon, int trials = 2);

} // namespace th::cli
