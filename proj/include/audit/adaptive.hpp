#pragma once

#include <span>
#include <vector>

#include "audit/equilibrium.hpp"
#include "audit/game.hpp"
#include "audit/solver.hpp"

namespace audit {

// L-infinity tolerance for matching a report distribution against the
// policy target.
inline constexpr double kDistTol = 1e-9;

// Adaptive policy in dictator form: play p_star when the observed report
// distribution equals qhat_star, otherwise fall back to a vector that
// destroys every other equilibrium (all-ones / all-zeros in the costly
// regime; the top-type budget dump in the budgeted one).
struct DictatorPolicy {
    AuditVector p_star;
    std::vector<double> qhat_star;
    Regime regime;
    double value = 0.0;  // guaranteed worst-case utility
    CriticalIndex critical;
    // True when the budgeted solver used the small-budget allocation
    // (everything on the top report), either because B <= n beta or as a
    // fallback when no single-minded candidate was feasible.
    bool small_budget = false;
};

// Audit vector the policy plays against a report distribution.
AuditVector apply_policy(const DictatorPolicy& policy, const AuditGame& g,
                         const std::vector<double>& qhat);

// Costly adaptive optimum via the critical-vector loop with best-case
// evaluation. Requires the insensitivity condition
// pay(l)/pay(k) >= pen(l)/pen(k); throws otherwise.
DictatorPolicy solve_adaptive_costly(const AuditGame& g, double eps);

struct BudgetDiagnostics {
    double beta = 0.0;        // (pay(m-1) - pay(m-2)) / pen(m-1)
    bool small_budget = false;  // B <= n beta (inclusive)
    // Coefficients of the affine audit cost C(u) = a - b u for the
    // truthful candidate (iota = 0); per-candidate coefficients come from
    // budget_cost_coeffs.
    double cost_a = 0.0;
    double cost_b = 0.0;
};

BudgetDiagnostics budget_beta(const AuditGame& g);

// C(u) = n [ F_iota rho_kappa(u) + sum_{i >= iota} q_i rho_i(u) ] as
// (a, b) with C(u) = a - b u.
std::pair<double, double> budget_cost_coeffs(const AuditGame& g, int iota, int kappa);

// Analytic upper bound on any budget-feasible policy when everyone pools
// on the top report: sum_i q_i (val(i,m-1) - pay(m-1)) + (B/n) pen(m-1),
// scaled by n. The realized value is strictly below it whenever the top
// type has mass, since truthful agents pay no penalty.
double small_budget_upper_bound(const AuditGame& g);

// Budgeted adaptive optimum. B <= n beta: allocate the whole budget to the
// top report and report the realized equilibrium value. Otherwise search
// single-minded candidates, each audited at the common level
// u = max{pay(iota-1), C^-1(B)} (skipped when u > pay(iota)), and keep the
// best. Exact, no epsilon: the dictator pins the report distribution.
DictatorPolicy solve_adaptive_budgeted(const AuditGame& g);

struct WaterfillResult {
    AuditVector p;
    double u_star = 0.0;   // achieved common misreport-utility level
    double eps_mi = 0.0;   // u_star - min_i pay(i)
};

// Minimizes the largest misreport gain max_k (pay(k) - pen(k) p_k) subject
// to n sum_k qhat_k p_k <= B and p in [0,1]^m, by lowering the level u
// until the budget binds (breakpoint scan over the piecewise-linear cost).
// Accepts pay >= 0 and pen >= pay >= 0; types with pen(k) = 0 are never
// audited and floor the level at pay(k).
WaterfillResult minimize_misreport_incentive(std::span<const double> pay,
                                             std::span<const double> pen,
                                             std::span<const double> qhat, double n,
                                             double budget);

WaterfillResult minimize_misreport_incentive(const AuditGame& g, const std::vector<double>& qhat,
                                             double budget);

}  // namespace audit
