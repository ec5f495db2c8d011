#include "audit/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace audit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void require_audit_vector(const AuditGame& g, const AuditVector& p) {
    if (static_cast<int>(p.size()) != g.m)
        throw std::invalid_argument("audit vector length must equal m");
    for (double x : p) {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("audit probabilities must lie in [0,1]");
    }
}

double rho(const AuditGame& g, int k, double u) {
    if (k < 0 || k >= g.m) throw std::invalid_argument("rho: type index out of range");
    if (!(g.pen[k] > 0.0)) throw std::invalid_argument("rho: pen(k) must be positive");
    return (g.pay[k] - u) / g.pen[k];
}

EquilibriumSummary summarize(const AuditGame& g, const AuditVector& p) {
    require_audit_vector(g, p);
    EquilibriumSummary s;
    s.misreport_utils.resize(g.m);
    s.truthful_utils = g.pay;
    s.u_hat = -kInf;
    for (int k = 0; k < g.m; ++k) {
        s.misreport_utils[k] = g.pay[k] - p[k] * g.pen[k];
        s.u_hat = std::max(s.u_hat, s.misreport_utils[k]);
    }
    for (int k = 0; k < g.m; ++k) {
        if (s.misreport_utils[k] >= s.u_hat - kTieTol) s.a_hat.push_back(k);
    }
    s.i_truth = g.m;
    for (int i = 0; i < g.m; ++i) {
        if (g.pay[i] >= s.u_hat - kTieTol) {
            s.i_truth = i;
            break;
        }
    }
    s.strict = true;
    for (int i = 0; i < g.m; ++i) {
        if (std::abs(g.pay[i] - s.u_hat) <= kTieTol) {
            s.strict = false;
            break;
        }
    }
    return s;
}

std::vector<int> best_response_set(const AuditGame& g, const EquilibriumSummary& s, int i) {
    if (i < 0 || i >= g.m) throw std::invalid_argument("best_response_set: type out of range");
    if (i > s.i_truth) return {i};
    if (i < s.i_truth) return s.a_hat;
    // i == i_truth: truthful, plus the misreport range when indifferent.
    if (g.pay[i] > s.u_hat + kTieTol) return {i};
    std::vector<int> out = s.a_hat;
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
}

ReportStrategy ReportStrategy::dense(int m, std::vector<double> matrix) {
    if (static_cast<int>(matrix.size()) != m * m)
        throw std::invalid_argument("dense strategy needs an m x m matrix");
    ReportStrategy s;
    s.kind = Kind::Dense;
    s.m = m;
    s.matrix = std::move(matrix);
    return s;
}

ReportStrategy ReportStrategy::single_minded(int m, int iota, int kappa) {
    if (iota < 0 || iota >= m) throw std::invalid_argument("single_minded: iota out of range");
    if (kappa < iota || kappa >= m)
        throw std::invalid_argument("single_minded: need iota <= kappa < m");
    ReportStrategy s;
    s.kind = Kind::SingleMinded;
    s.m = m;
    s.iota = iota;
    s.kappa = kappa;
    return s;
}

std::vector<double> ReportStrategy::to_matrix() const {
    if (kind == Kind::Dense) return matrix;
    std::vector<double> out(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        const int k = i < iota ? kappa : i;
        out[static_cast<std::size_t>(i) * m + k] = 1.0;
    }
    return out;
}

double ReportStrategy::at(int i, int k) const {
    if (kind == Kind::Dense) return matrix[static_cast<std::size_t>(i) * m + k];
    const int rep = i < iota ? kappa : i;
    return k == rep ? 1.0 : 0.0;
}

std::vector<double> ReportStrategy::report_distribution(const AuditGame& g) const {
    std::vector<double> qhat(g.m, 0.0);
    for (int i = 0; i < g.m; ++i) {
        if (kind == Kind::SingleMinded) {
            qhat[i < iota ? kappa : i] += g.q[i];
        } else {
            for (int k = 0; k < g.m; ++k) qhat[k] += g.q[i] * at(i, k);
        }
    }
    return qhat;
}

bool ReportStrategy::is_row_stochastic(double tol) const {
    if (kind == Kind::SingleMinded) return true;
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int k = 0; k < m; ++k) {
            const double x = at(i, k);
            if (x < -tol) return false;
            row += x;
        }
        if (std::abs(row - 1.0) > tol) return false;
    }
    return true;
}

double objective_value(const AuditGame& g, const AuditVector& p, const ReportStrategy& strat,
                       Objective obj) {
    require_audit_vector(g, p);
    const double lam = g.eval_lambda();
    double v = 0.0;
    for (int i = 0; i < g.m; ++i) {
        for (int k = 0; k < g.m; ++k) {
            const double w = strat.at(i, k);
            if (w == 0.0) continue;
            double term;
            if (obj == Objective::PrincipalUtility) {
                const double pen_ik = (i == k) ? 0.0 : g.pen[k];
                term = g.val_at(i, k) - g.pay[k] + p[k] * (pen_ik - lam);
            } else {
                term = g.val_at(i, k) - p[k] * lam;
            }
            v += g.q[i] * w * term;
        }
    }
    return g.n * v;
}

namespace {

// Shared core of evaluate_worst / evaluate_best. Per type and branch:
//   truthful contribution   v_i  = val(i,i) - pay(i) - p_i lam   (utility)
//                                  val(i,i) - p_i lam            (welfare)
//   misreport contribution  v^_i = extremum over k in A_hat of
//                                  val(i,k) - pay(k) + p_k (pen(k) - lam)
//                                  val(i,k) - p_k lam            (welfare)
// Types with pay(i) above u_hat are truthful, below it misreport, and the
// indifferent band takes the extremum of both. When i itself lies in A_hat
// the misreport term coincides with the truthful one (that requires
// p_i = 0), so the formulas stay consistent.
Evaluation evaluate_impl(const AuditGame& g, const AuditVector& p, Objective obj, bool worst) {
    const EquilibriumSummary s = summarize(g, p);
    const double lam = g.eval_lambda();
    const double sign = worst ? 1.0 : -1.0;

    std::vector<int> reports(g.m);
    double total = 0.0;
    for (int i = 0; i < g.m; ++i) {
        const double v_truth = (obj == Objective::PrincipalUtility)
                                   ? g.val_at(i, i) - g.pay[i] - p[i] * lam
                                   : g.val_at(i, i) - p[i] * lam;
        double v_mis = kInf * sign;
        int k_mis = -1;
        for (int k : s.a_hat) {
            double t;
            if (obj == Objective::PrincipalUtility) {
                const double pen_ik = (i == k) ? 0.0 : g.pen[k];
                t = g.val_at(i, k) - g.pay[k] + p[k] * (pen_ik - lam);
            } else {
                t = g.val_at(i, k) - p[k] * lam;
            }
            if (sign * t < sign * v_mis) {
                v_mis = t;
                k_mis = k;
            }
        }

        double contrib;
        if (g.pay[i] > s.u_hat + kTieTol) {  // truthful
            contrib = v_truth;
            reports[i] = i;
        } else if (g.pay[i] < s.u_hat - kTieTol) {  // misreporting
            contrib = v_mis;
            reports[i] = k_mis;
        } else {  // indifferent
            if (sign * v_mis < sign * v_truth) {
                contrib = v_mis;
                reports[i] = k_mis;
            } else {
                contrib = v_truth;
                reports[i] = i;
            }
        }
        total += g.q[i] * contrib;
    }

    std::vector<double> matrix(static_cast<std::size_t>(g.m) * g.m, 0.0);
    for (int i = 0; i < g.m; ++i) matrix[static_cast<std::size_t>(i) * g.m + reports[i]] = 1.0;
    Evaluation e;
    e.value = g.n * total;
    e.witness = ReportStrategy::dense(g.m, std::move(matrix));
    return e;
}

}  // namespace

Evaluation evaluate_worst(const AuditGame& g, const AuditVector& p, Objective obj) {
    return evaluate_impl(g, p, obj, true);
}

Evaluation evaluate_best(const AuditGame& g, const AuditVector& p, Objective obj) {
    return evaluate_impl(g, p, obj, false);
}

Metrics metrics(const AuditGame& g, const AuditVector& p, const ReportStrategy& strat) {
    require_audit_vector(g, p);
    if (!strat.is_row_stochastic()) throw std::invalid_argument("metrics: strategy must be row stochastic");
    Metrics out;
    out.distortion.assign(g.m, 0.0);
    for (int i = 0; i < g.m; ++i) {
        for (int k = 0; k < g.m; ++k) {
            const double w = strat.at(i, k);
            if (w == 0.0) continue;
            if (i != k) out.misreport_mass += g.q[i] * w;
            out.audit_rate += g.q[i] * w * p[k];
            if (g.m >= 2) out.distortion[i] += w * std::abs(i - k) / double(g.m - 1);
        }
    }
    out.expected_audits = g.n * out.audit_rate;
    return out;
}

}  // namespace audit
