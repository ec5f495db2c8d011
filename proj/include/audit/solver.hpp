#pragma once

#include <utility>
#include <vector>

#include "audit/equilibrium.hpp"
#include "audit/game.hpp"

namespace audit {

enum class CriticalSign { Plus, Minus };

// Template index of a critical audit vector: the equalized level sits just
// above pay(iota-1) (Plus) or just below pay(iota) (Minus), with the
// misreport utility of report kappa pinned to it.
struct CriticalIndex {
    int iota = 0;
    int kappa = 0;
    CriticalSign sign = CriticalSign::Plus;
};

bool operator==(const CriticalIndex& a, const CriticalIndex& b);

// All valid templates in search order: iota ascending, kappa ascending,
// Plus before Minus. Size 2 * (m choose 2 + m) = m (m + 1).
std::vector<CriticalIndex> critical_set(int m);

// Largest epsilon accepted by the critical-vector constructors: gamma/3.
// This also keeps equal-(0, kappa, eps) well formed since gamma <= pay(0).
double eps_upper_bound(const AuditGame& g);

// Equalized audit vector: p_k = 0 below iota = min{i : pay(i) >= u},
// rho_k(u) for k in A, rho_k(u - eps) otherwise. Requires 0 < u <= max pay,
// 0 < eps <= u, and A a nonempty subset of {k >= iota}. Entries land in
// [0,1] without clamping under these preconditions.
AuditVector equalized_vector(const AuditGame& g, double u, const std::vector<int>& A, double eps);

// Plus: equalized(pay(iota-1) + eps, {kappa}, eps); Minus: equalized(
// pay(iota) - eps, {kappa}, eps). Requires 0 < eps <= gamma/3.
AuditVector critical_vector(const AuditGame& g, const CriticalIndex& idx, double eps);

// Prefix and suffix tables for constant-time evaluation over critical
// vectors:
//   F[i]    = sum_{j<i} q_j
//   M[i][k] = sum_{j<i} q_j val(j,k)
//   H[i]    = sum_{j>=i} q_j (val(j,j) - pay(j))
//   Hw[i]   = sum_{j>=i} q_j val(j,j)
//   Spay[i] = sum_{j>=i} q_j pay(j)/pen(j)
//   Sinv[i] = sum_{j>=i} q_j / pen(j)
struct FastTables {
    int m = 0;
    std::vector<double> F, H, Hw, Spay, Sinv;
    std::vector<double> M;  // (m+1) x m row-major

    static FastTables build(const AuditGame& g);
    double m_at(int i, int k) const { return M[static_cast<std::size_t>(i) * m + k]; }
};

// Worst-case objective at critical_vector(idx, eps), evaluated via the
// tables. Only defined on critical vectors, where the equilibrium is the
// unique single-minded one with the given (iota, kappa).
double fast_compute_val(const AuditGame& g, const CriticalIndex& idx, double eps,
                        const FastTables& tables, Objective obj);

struct SolverResult {
    AuditVector p_star;
    double value = 0.0;  // worst-case objective at p_star
    CriticalIndex critical;
    double epsilon = 0.0;
    ReportStrategy witness;
};

// Searches all critical vectors and returns the one maximizing the
// worst-case objective; the result is 2 n eps-optimal over all audit
// vectors. Requires a valid costly-regime game and 0 < eps <= gamma/3.
// Candidates are evaluated through the tables, in parallel when OpenMP is
// enabled; ties break to the earliest template in search order regardless
// of schedule.
SolverResult succinct_search(const AuditGame& g, Objective obj, double eps);

// Serial reference: same search driven by evaluate_worst on each critical
// vector instead of the table path. Kept for testing and benchmarks.
SolverResult succinct_search_reference(const AuditGame& g, Objective obj, double eps);

// Scales audit probabilities by pen(k)/pen_new(k) so every misreport
// utility, and hence the equilibrium set and expected penalty gain, is
// unchanged under the raised penalty. Requires pen_new >= pen pointwise.
std::pair<AuditGame, AuditVector> monotone_transform(const AuditGame& g, const AuditVector& p,
                                                     const std::vector<double>& pen_new);

}  // namespace audit
