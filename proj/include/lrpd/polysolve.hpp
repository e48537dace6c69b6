#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrpd/charsys.hpp"
#include "lrpd/poly.hpp"

namespace lrpd {

struct VariableCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverBudget {
    std::size_t var_cap = 12;
    std::size_t newton_random_starts = 32;
    std::size_t newton_grid_cap = 4096;  // structured grid size cap before sampling
    std::size_t newton_iters = 80;
    double newton_residual_tol = 1e-8;
    double merge_tol = 1e-6;
    std::uint64_t seed = 1;
    std::size_t exact_free_cap = 2;   // exact backend handles up to this many free unknowns
    double exact_residual_tol = 1e-12;
};

struct Assignment {
    std::vector<double> values;                 // one per system variable
    std::vector<std::optional<Rational>> exact; // exact view per variable when known
    double residual = 0.0;                      // max |equation| at `values`

    bool fully_exact() const {
        for (const auto& e : exact)
            if (!e) return false;
        return true;
    }
};

enum class SolveKind { solutions, none_found_complete, none_found_incomplete };

struct SolveOutcome {
    SolveKind kind = SolveKind::none_found_incomplete;
    std::vector<Assignment> solutions;  // deterministically ordered
    std::string report;
};

// Bounded-degree solver: exact elimination + resultants + Sturm isolation,
// complete for <= budget.exact_free_cap unknowns after eliminating the affine
// equations and the z-square structure; seeded multi-start damped Gauss-Newton
// otherwise (incompleteness labeled in the outcome).
SolveOutcome solve_system(const PolySystem& sys, const SolverBudget& budget);

// System (inner2) for a given J and the linear basis returned by the linear
// phase. Variables: svec(V) entries then z_1..z_r. Equations: the pinned
// linear rows, A_ij det(V) - adj(V)(i,j) = 0 for i < j in J, and the leading
// principal minor positivity encodings det(V_{J_k}) z_k^2 = 1.
PolySystem assemble_inner2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                           const Mat<Rational>& lhs, const std::vector<Rational>& rhs);

// P1 flavor: additionally threads d_i for i in J as y_i^2 (variables after z),
// adds the diagonal equations adj(V)(i,i) = (A_ii - y_i^2) det(V), and appends
// the facet equations d_i(V) = 0 for the requested rows of the affine family.
PolySystem assemble_inner2_p1(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                              const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                              const Mat<Rational>& divi_coeffs,
                              const std::vector<Rational>& divi_const,
                              const std::vector<std::size_t>& facet_rows);

template <class T>
struct Alg2Result {
    Alg1Outcome<T> outcome;
    // jbar positions whose d_i(V) went negative in an inspected solution
    // (drives the P1 facet recursion)
    std::vector<std::size_t> violated_facets;
    bool search_incomplete = false;
    std::size_t solutions_seen = 0;
    // true when the returned witness came out of exact arithmetic end to end
    // (numeric-backend witnesses verify at float tolerance instead)
    bool exact_witness = false;
};

// Nonlinear solver with a given index set: assembles (inner2), solves it, and
// converts the first admissible solution into d via the output step shared
// with the linear phase.
Alg2Result<Rational> algorithm2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                                const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                                const SolverBudget& budget, ProblemKind kind = ProblemKind::P2,
                                const CharSystem<Rational>* p1_system = nullptr,
                                const std::vector<std::size_t>& p1_facets = {});
Alg2Result<double> algorithm2(const SymMat<double>& a, const std::vector<std::size_t>& j,
                              const Mat<double>& lhs, const std::vector<double>& rhs,
                              const SolverBudget& budget, ProblemKind kind = ProblemKind::P2,
                              const CharSystem<double>* p1_system = nullptr,
                              const std::vector<std::size_t>& p1_facets = {});

// all real solutions of the raw inner2 system for a J (criterion-2 surface):
// returns solve_system's outcome on assemble_inner2(...)
SolveOutcome solve_inner2(const SymMat<Rational>& a, const std::vector<std::size_t>& j,
                          const Mat<Rational>& lhs, const std::vector<Rational>& rhs,
                          const SolverBudget& budget);

// The det-multiplied equations of (inner2) admit numeric quasi-solutions
// drifting toward the det(V) -> 0 boundary (both sides of
// A_ij det(V) = adj(V)(i,j) vanish there). A solution is admissible when V is
// positive definite with margin and V^{-1} actually matches A on J; exact
// assignments are tested exactly.
bool inner2_solution_admissible(const Assignment& sol, const SymMat<Rational>& a,
                                const std::vector<std::size_t>& j, double tol);
std::vector<Assignment> admissible_inner2_solutions(const SolveOutcome& outcome,
                                                    const SymMat<Rational>& a,
                                                    const std::vector<std::size_t>& j,
                                                    double tol = 1e-6);

std::optional<Rational> exact_sqrt(const Rational& x);

}  // namespace lrpd
