#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace audit {

enum class RegimeKind { Costly, Budgeted };

// Audit resource model: either a per-audit cost lambda or a hard budget on
// the expected number of audits.
struct Regime {
    RegimeKind kind = RegimeKind::Costly;
    double lambda = 0.0;  // valid when kind == Costly
    double budget = 0.0;  // valid when kind == Budgeted

    static Regime costly(double lambda) { return {RegimeKind::Costly, lambda, 0.0}; }
    static Regime budgeted(double budget) { return {RegimeKind::Budgeted, 0.0, budget}; }
};

// A full audit-game instance. Types are ordered 0..m-1 by strictly
// increasing payment; pay(-1) is defined as 0 throughout. The penalty is
// type independent and charged only on a detected misreport, so it is
// stored as a vector and the indicator is applied at evaluation sites.
struct AuditGame {
    double n = 1.0;              // total agent mass
    int m = 0;                   // number of types, >= 2
    std::vector<double> q;       // prior over types, full support
    std::vector<double> val;     // m*m row-major, val(i,k): true type i reports k
    std::vector<double> pay;     // payment per reported type, strictly increasing
    std::vector<double> pen;     // penalty per reported type, pen(k) >= pay(k)
    Regime regime;

    double val_at(int i, int k) const { return val[static_cast<std::size_t>(i) * m + k]; }

    // pay(k) with the pay(-1) := 0 convention.
    double pay_at(int k) const { return k < 0 ? 0.0 : pay[k]; }

    // Minimal payment gap min_k pay(k) - pay(k-1); positive on valid games.
    double gamma() const;

    // Per-audit cost used by evaluation: lambda in the costly regime,
    // zero in the budgeted regime (budget feasibility is checked by the
    // budgeted solver, not by the evaluator).
    double eval_lambda() const { return regime.kind == RegimeKind::Costly ? regime.lambda : 0.0; }
};

// Continuous one-dimensional model discretized into m bins by bin
// expectation under the uniform prior on [0,1]:
//   pay(x) = c0 + c1 x, pen(x) = pay(x) + pen_offset,
//   val(x,y) = a0 + a1 x - a2 |x - y|.
struct ContinuousModelSpec {
    double c0 = 1.0, c1 = 2.0;   // pay affine coefficients
    double pen_offset = 2.0;
    double a0 = 2.0, a1 = 2.0, a2 = 1.0;  // val family
    double lambda = 2.5;
    int m = 2;
};

// Whether pay(l)/pay(k) >= pen(l)/pen(k) for all k <= l, i.e. the penalty
// grows no faster than the payment. Computed, never asserted by callers.
struct InsensitivityFlag {
    bool holds = false;
    // First violating pair (k, l) when holds is false.
    int k = -1, l = -1;
};

InsensitivityFlag insensitivity_flag(const AuditGame& g);

// Checks every structural invariant and returns one message per violation
// with the offending indices; an empty list means the game is valid.
// Violations are data, not faults.
std::vector<std::string> validate_game(const AuditGame& g);

// Throws std::invalid_argument listing all violations.
void require_valid(const AuditGame& g);

// Builds the m-type game with q_i = 1/m, x_i = (2i+1)/(2m),
// pay(i) = c0 + c1 x_i, pen = pay + pen_offset, and
// val(i,k) = a0 + a1 x_i - a2 |i-k|/m off the diagonal,
//            a0 + a1 x_i - a2 / (3m) on it.
// Throws if m < 2 or the resulting game fails validation.
AuditGame discretize(const ContinuousModelSpec& spec);

// The binary-type example game with the unattainable optimum:
// q = (1/2, 1/2), pay = (1, 2), pen = (3, 4), val = diag(3, 4), lambda = 1.
AuditGame fig1_game();

// Three-type game used by the prior sweeps: val = diag(0.5, 1.4, 3.0),
// pay = (0.3, 0.8, 1.3), pen = (1.0, 1.2, 1.4), lambda = 0.7.
AuditGame heatmap_game(const std::vector<double>& prior = {1.0 / 3, 1.0 / 3, 1.0 / 3});

struct RandomGameOptions {
    RegimeKind regime = RegimeKind::Costly;
    // Force pen = a*pay + b with a >= 1, b >= 0 so the insensitivity
    // condition holds by construction.
    bool insensitive = false;
};

// Deterministic generator of valid games for tests and oracle checks.
AuditGame random_game(int m, std::uint64_t seed, const RandomGameOptions& opt = {});

}  // namespace audit
