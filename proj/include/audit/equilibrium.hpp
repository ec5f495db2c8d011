#pragma once

#include <vector>

#include "audit/game.hpp"

namespace audit {

// Per-reported-type audit probabilities, one entry per type, each in [0,1].
using AuditVector = std::vector<double>;

// Absolute tolerance for ties among misreport utilities and for detecting
// u_hat == pay(i). Solver epsilons are >= 1e-6, three orders above this.
inline constexpr double kTieTol = 1e-9;

enum class Objective { PrincipalUtility, SocialWelfare };

// Audit probability that pins the misreport utility of a type-k report to u:
// rho_k(u) = (pay(k) - u) / pen(k). Unclamped; callers clamp or reject.
double rho(const AuditGame& g, int k, double u);

// Equilibrium-relevant structure of an audit vector per the threshold
// characterization: every type below i_truth misreports into A_hat, every
// type above reports truthfully.
struct EquilibriumSummary {
    std::vector<double> misreport_utils;  // U^_k = pay(k) - p_k pen(k)
    std::vector<double> truthful_utils;   // U_k = pay(k)
    double u_hat = 0.0;                   // max_k U^_k
    std::vector<int> a_hat;               // argmax set within kTieTol, ascending
    int i_truth = 0;                      // min{i : pay(i) >= u_hat - kTieTol}, m if none
    bool strict = false;                  // u_hat not equal to any pay(i) within kTieTol
};

EquilibriumSummary summarize(const AuditGame& g, const AuditVector& p);

// Pure best responses of type i given a summary of the same audit vector.
std::vector<int> best_response_set(const AuditGame& g, const EquilibriumSummary& s, int i);

// Row-stochastic report strategy. Either a dense m x m matrix or the
// compact single-minded form: types below iota report kappa, the rest are
// truthful (iota == 0 means everyone is truthful).
struct ReportStrategy {
    enum class Kind { Dense, SingleMinded };
    Kind kind = Kind::SingleMinded;
    int m = 0;
    std::vector<double> matrix;  // m*m row-major when Dense
    int iota = 0;
    int kappa = 0;

    static ReportStrategy dense(int m, std::vector<double> matrix);
    static ReportStrategy single_minded(int m, int iota, int kappa);
    static ReportStrategy truthful(int m) { return single_minded(m, 0, 0); }

    // Dense view; materializes the single-minded form.
    std::vector<double> to_matrix() const;
    double at(int i, int k) const;

    // q^_k = sum_i q_i Q_{i,k}.
    std::vector<double> report_distribution(const AuditGame& g) const;

    bool is_row_stochastic(double tol = 1e-9) const;
};

// Raw objective value of a fixed (p, Q) pair:
//   utility: n sum q_i Q_{ik} (val(i,k) - pay(k) + p_k (1[i!=k] pen(k) - lambda))
//   welfare: n sum q_i Q_{ik} (val(i,k) - p_k lambda)
// with lambda = 0 in the budgeted regime.
double objective_value(const AuditGame& g, const AuditVector& p, const ReportStrategy& strat,
                       Objective obj);

struct Evaluation {
    double value = 0.0;
    ReportStrategy witness;
};

// Objective at the equilibrium minimizing (worst) or maximizing (best) it.
// The witness is a dense strategy with one pure report per type; the
// indifferent type takes whichever side attains the extremum.
Evaluation evaluate_worst(const AuditGame& g, const AuditVector& p, Objective obj);
Evaluation evaluate_best(const AuditGame& g, const AuditVector& p, Objective obj);

// Outcome statistics of a strategy under an audit vector.
struct Metrics {
    double misreport_mass = 0.0;   // sum_{i != k} q_i Q_{ik}
    double audit_rate = 0.0;       // sum_{i,k} q_i Q_{ik} p_k
    double expected_audits = 0.0;  // n * audit_rate
    std::vector<double> distortion;  // per type: sum_k Q_{ik} |i-k| / (m-1)
};

Metrics metrics(const AuditGame& g, const AuditVector& p, const ReportStrategy& strat);

void require_audit_vector(const AuditGame& g, const AuditVector& p);

}  // namespace audit
