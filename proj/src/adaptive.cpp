#include "audit/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace audit {

namespace {

bool dist_matches(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > kDistTol) return false;
    }
    return true;
}

}  // namespace

AuditVector apply_policy(const DictatorPolicy& policy, const AuditGame& g,
                         const std::vector<double>& qhat) {
    if (static_cast<int>(qhat.size()) != g.m)
        throw std::invalid_argument("apply_policy: qhat must have length m");
    if (dist_matches(qhat, policy.qhat_star)) return policy.p_star;

    if (policy.regime.kind == RegimeKind::Costly) {
        if (dist_matches(qhat, g.q)) return AuditVector(g.m, 0.0);
        return AuditVector(g.m, 1.0);
    }
    // Budgeted fallback: dump the budget on the top report when it is
    // over-reported, otherwise audit nobody.
    AuditVector p(g.m, 0.0);
    const int top = g.m - 1;
    if (qhat[top] > g.q[top]) {
        p[top] = std::min(policy.regime.budget / (g.n * qhat[top]), 1.0);
    }
    return p;
}

DictatorPolicy solve_adaptive_costly(const AuditGame& g, double eps) {
    require_valid(g);
    if (g.regime.kind != RegimeKind::Costly)
        throw std::invalid_argument("solve_adaptive_costly: game must be in the costly regime");
    const InsensitivityFlag flag = insensitivity_flag(g);
    if (!flag.holds) {
        std::ostringstream os;
        os << "solve_adaptive_costly requires pay(l)/pay(k) >= pen(l)/pen(k); violated at (k,l)=("
           << flag.k << "," << flag.l << ")";
        throw std::invalid_argument(os.str());
    }
    if (!(eps > 0.0 && eps <= eps_upper_bound(g)))
        throw std::invalid_argument("solve_adaptive_costly: need 0 < eps <= gamma/3");

    // Every critical vector carries a unique single-minded equilibrium, so
    // scanning them with best-case evaluation covers all single-minded
    // report strategies up to the usual 2 n eps slack.
    const std::vector<CriticalIndex> arms = critical_set(g.m);
    double best_v = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t a = 0; a < arms.size(); ++a) {
        const AuditVector p = critical_vector(g, arms[a], eps);
        const double v = evaluate_best(g, p, Objective::PrincipalUtility).value;
        if (v > best_v) {
            best_v = v;
            best_idx = a;
        }
    }

    DictatorPolicy policy;
    policy.critical = arms[best_idx];
    policy.regime = g.regime;
    policy.p_star = critical_vector(g, arms[best_idx], eps);
    Evaluation e = evaluate_best(g, policy.p_star, Objective::PrincipalUtility);
    policy.value = e.value;
    policy.qhat_star = e.witness.report_distribution(g);
    return policy;
}

BudgetDiagnostics budget_beta(const AuditGame& g) {
    require_valid(g);
    if (g.regime.kind != RegimeKind::Budgeted)
        throw std::invalid_argument("budget_beta: game must be in the budgeted regime");
    BudgetDiagnostics d;
    d.beta = (g.pay[g.m - 1] - g.pay[g.m - 2]) / g.pen[g.m - 1];
    d.small_budget = g.regime.budget <= g.n * d.beta;
    std::tie(d.cost_a, d.cost_b) = budget_cost_coeffs(g, 0, 0);
    return d;
}

std::pair<double, double> budget_cost_coeffs(const AuditGame& g, int iota, int kappa) {
    if (iota < 0 || iota >= g.m || kappa < iota || kappa >= g.m)
        throw std::invalid_argument("budget_cost_coeffs: need 0 <= iota <= kappa < m");
    double f_iota = 0.0;
    for (int i = 0; i < iota; ++i) f_iota += g.q[i];
    double a = f_iota * g.pay[kappa] / g.pen[kappa];
    double b = f_iota / g.pen[kappa];
    for (int i = iota; i < g.m; ++i) {
        a += g.q[i] * g.pay[i] / g.pen[i];
        b += g.q[i] / g.pen[i];
    }
    return {g.n * a, g.n * b};
}

double small_budget_upper_bound(const AuditGame& g) {
    const int top = g.m - 1;
    double s = 0.0;
    for (int i = 0; i < g.m; ++i) s += g.q[i] * (g.val_at(i, top) - g.pay[top]);
    return g.n * (s + (g.regime.budget / g.n) * g.pen[top]);
}

namespace {

// Realized worst-case value when everyone reports the top type and the top
// report is audited with probability p_top. Truthful top-type agents pay
// no penalty, which is why this sits strictly below the analytic bound
// whenever q_{m-1} > 0.
double all_top_value(const AuditGame& g, double p_top) {
    const int top = g.m - 1;
    double v = 0.0;
    for (int i = 0; i < g.m; ++i) {
        const double pen_gain = (i == top) ? 0.0 : p_top * g.pen[top];
        v += g.q[i] * (g.val_at(i, top) - g.pay[top] + pen_gain);
    }
    return g.n * v;
}

DictatorPolicy small_budget_policy(const AuditGame& g) {
    const int top = g.m - 1;
    DictatorPolicy policy;
    policy.regime = g.regime;
    policy.small_budget = true;
    policy.critical = {top, top, CriticalSign::Plus};
    policy.p_star.assign(g.m, 0.0);
    policy.p_star[top] = std::min(g.regime.budget / g.n, 1.0);
    policy.qhat_star.assign(g.m, 0.0);
    policy.qhat_star[top] = 1.0;
    policy.value = all_top_value(g, policy.p_star[top]);
    return policy;
}

}  // namespace

DictatorPolicy solve_adaptive_budgeted(const AuditGame& g) {
    require_valid(g);
    if (g.regime.kind != RegimeKind::Budgeted)
        throw std::invalid_argument("solve_adaptive_budgeted: game must be in the budgeted regime");
    const double B = g.regime.budget;
    const BudgetDiagnostics diag = budget_beta(g);
    if (diag.small_budget) return small_budget_policy(g);

    const FastTables t = FastTables::build(g);
    double best_v = -std::numeric_limits<double>::infinity();
    int best_iota = -1, best_kappa = -1;
    double best_u = 0.0;
    for (int iota = 0; iota < g.m; ++iota) {
        for (int kappa = iota; kappa < g.m; ++kappa) {
            const auto [a, b] = budget_cost_coeffs(g, iota, kappa);
            const double u_budget = (a - B) / b;  // C(u) = B
            const double u = std::max(g.pay_at(iota - 1), u_budget);
            if (u > g.pay[iota]) continue;  // budget cannot support this equilibrium
            // V at the single-minded pair, via prefix sums; the audited
            // level p_kappa = rho_kappa(u) feeds the penalty gain.
            const double p_kappa = (g.pay[kappa] - u) / g.pen[kappa];
            const double v = g.n * (t.m_at(iota, kappa) - g.pay[kappa] * t.F[iota] +
                                    p_kappa * g.pen[kappa] * t.F[iota] + t.H[iota]);
            if (v > best_v) {
                best_v = v;
                best_iota = iota;
                best_kappa = kappa;
                best_u = u;
            }
            if (iota == 0) break;  // kappa is irrelevant without misreporters
        }
    }
    if (best_iota < 0) {
        // Unreachable for valid games (the all-top candidate is always
        // feasible once B > n beta), kept as a guarded fallback.
        return small_budget_policy(g);
    }

    DictatorPolicy policy;
    policy.regime = g.regime;
    // Records the winning single-minded pair; the sign slot is unused in
    // the budgeted regime (the level u is exact, not an eps perturbation).
    policy.critical = {best_iota, best_kappa, CriticalSign::Plus};
    policy.p_star.assign(g.m, 0.0);
    for (int k = best_iota; k < g.m; ++k)
        policy.p_star[k] = std::clamp(rho(g, k, best_u), 0.0, 1.0);
    const ReportStrategy witness = ReportStrategy::single_minded(g.m, best_iota, best_kappa);
    policy.qhat_star = witness.report_distribution(g);
    policy.value = best_v;
    return policy;
}

WaterfillResult minimize_misreport_incentive(std::span<const double> pay,
                                             std::span<const double> pen,
                                             std::span<const double> qhat, double n,
                                             double budget) {
    const std::size_t m = pay.size();
    if (pen.size() != m || qhat.size() != m)
        throw std::invalid_argument("minimize_misreport_incentive: length mismatch");
    if (budget < 0.0) throw std::invalid_argument("minimize_misreport_incentive: budget < 0");
    for (std::size_t k = 0; k < m; ++k) {
        if (pay[k] < 0.0 || pen[k] < pay[k])
            throw std::invalid_argument("minimize_misreport_incentive: need 0 <= pay <= pen");
    }

    auto cost = [&](double u) {
        double c = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            if (pen[k] <= 0.0) continue;  // auditing cannot move this report's utility
            c += qhat[k] * std::clamp((pay[k] - u) / pen[k], 0.0, 1.0);
        }
        return n * c;
    };

    // The level can never go below the best per-report utility at full
    // auditing; reports with pen = 0 pin it at their payment.
    double u_floor = -std::numeric_limits<double>::infinity();
    double u_max = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        u_floor = std::max(u_floor, pay[k] - pen[k]);
        u_max = std::max(u_max, pay[k]);
    }

    double u_star;
    if (cost(u_floor) <= budget) {
        u_star = u_floor;
    } else {
        // Walk the breakpoints of the piecewise-linear decreasing cost
        // from the top; between consecutive breakpoints the cost is
        // affine, so the budget crossing solves exactly.
        std::vector<double> bps{u_max, u_floor};
        for (std::size_t k = 0; k < m; ++k) {
            if (pen[k] <= 0.0) continue;
            bps.push_back(pay[k]);
            bps.push_back(pay[k] - pen[k]);
        }
        std::sort(bps.begin(), bps.end(), std::greater<double>());
        bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

        u_star = u_max;  // cost(u_max) = 0 <= budget
        for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
            const double hi = bps[j], lo = bps[j + 1];
            if (hi > u_max) continue;
            const double c_hi = cost(hi), c_lo = cost(lo);
            if (c_lo <= budget) {
                u_star = lo;
                continue;
            }
            // crossing inside (lo, hi]
            const double slope = (c_lo - c_hi) / (hi - lo);
            u_star = hi - (budget - c_hi) / slope;
            break;
        }
    }

    WaterfillResult r;
    r.u_star = u_star;
    r.p.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (pen[k] <= 0.0) continue;
        r.p[k] = std::clamp((pay[k] - u_star) / pen[k], 0.0, 1.0);
    }
    double pay_min = pay[0];
    for (std::size_t k = 1; k < m; ++k) pay_min = std::min(pay_min, pay[k]);
    r.eps_mi = u_star - pay_min;
    return r;
}

WaterfillResult minimize_misreport_incentive(const AuditGame& g, const std::vector<double>& qhat,
                                             double budget) {
    if (static_cast<int>(qhat.size()) != g.m)
        throw std::invalid_argument("minimize_misreport_incentive: qhat must have length m");
    return minimize_misreport_incentive(std::span<const double>(g.pay),
                                        std::span<const double>(g.pen),
                                        std::span<const double>(qhat), g.n, budget);
}

}  // namespace audit
