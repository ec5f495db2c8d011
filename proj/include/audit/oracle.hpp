#pragma once

#include <cstddef>
#include <vector>

#include "audit/equilibrium.hpp"
#include "audit/game.hpp"

namespace audit {

// Brute-force grid over [0,1]^m. Deliberately independent of the solver's
// candidate set: grid nodes never coincide with critical coordinates, so
// agreement between the two is informative.
struct GridSpec {
    double step = 1.0 / 256;
    bool force = false;               // allow m > 4
    std::size_t cell_cap = 400'000'000;  // refuse larger grids
};

enum class GridMode { Worst, Best };

struct GridResult {
    double value = 0.0;
    AuditVector p_at;
    // Largest observed jump of the objective between axis-adjacent grid
    // nodes. Advisory only: the worst-case objective can be discontinuous,
    // so this is not a certified modulus. Acceptance comparisons use it
    // one-sided (solver >= grid - 2 n eps - slack).
    double slack = 0.0;
    std::size_t cells = 0;
};

// Evaluates the worst (or best) equilibrium objective at every grid node
// and returns the maximizer; ties break to the lexicographically smallest
// node regardless of thread schedule.
GridResult grid_best(const AuditGame& g, Objective obj, const GridSpec& grid, GridMode mode);

// Single-threaded reference implementation, kept for testing.
GridResult grid_best_serial(const AuditGame& g, Objective obj, const GridSpec& grid,
                            GridMode mode);

// All extreme-point equilibria of p: the Cartesian product of per-type
// pure best responses computed by direct utility comparison (independent
// of summarize). Each element is a per-type report vector. Refuses
// products larger than max_count.
std::vector<std::vector<int>> enumerate_equilibria(const AuditGame& g, const AuditVector& p,
                                                   std::size_t max_count = 1'000'000);

// Dense strategy from a per-type pure report assignment.
ReportStrategy pure_strategy(int m, const std::vector<int>& reports);

}  // namespace audit
