#pragma once

#include <cstdint>
#include <limits>

#include "lrpd/reductions.hpp"

namespace lrpd {

struct SizeCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooManyUnknowns : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ColoringResult {
    bool colorable = false;
    Coloring coloring;  // proper 3-coloring when colorable
};

// Exhaustive backtracking; complete.
ColoringResult brute_force_3color(const Graph& g, std::size_t size_cap = 30);

struct ProbeReport {
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    // minimum verified rank over PSD-feasible samples (max() when none)
    std::size_t best_rank_found = std::numeric_limits<std::size_t>::max();
    std::size_t feasible_samples = 0;  // samples passing PSD + constraints
    std::size_t verified_at_target = 0;  // feasible samples with rank <= r
    std::vector<double> best_d;          // sample achieving best_rank_found
    std::string sampling;                // parameter log
    bool ever_verified() const { return verified_at_target > 0; }
};

// Random/grid sampling of d (and the free entries of L for P3). Evidence
// only: never claims infeasibility.
ProbeReport rank_probe(const Instance<Rational>& inst, std::size_t r, std::size_t trials,
                       std::uint64_t seed);
ProbeReport rank_probe(const Instance<double>& inst, std::size_t r, std::size_t trials,
                       std::uint64_t seed);

struct LemmaReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;
};

// Samples hypotheses of the inverse-perturbation bound, the KDK sandwich
// bound, and the negative-off-diagonal rank lemma; conclusions asserted.
LemmaReport check_perturbation_lemmas(std::size_t trials, std::uint64_t seed);

struct GridSpec {
    double lo = -3.0;
    double hi = 3.0;
    std::size_t points = 13;
    std::size_t refine_iters = 60;
    std::size_t combo_cap = 300000;
};

struct CompletionSearchResult {
    SymMat<double> completion;
    std::vector<std::pair<std::size_t, std::size_t>> unknown_positions;  // i <= j
    std::vector<double> unknown_values;
    double score = 0.0;  // PSD violation + (r+1)-th singular value at the best point
    bool psd = false;
    std::size_t rank = 0;
};

// Grid search plus coordinate refinement over the unspecified entries;
// returns the best (lowest-score) completion found. <= 6 unknowns.
CompletionSearchResult small_completion_search(const PartialMatrix& pm, std::size_t r,
                                               const GridSpec& grid = {});

}  // namespace lrpd
