#pragma once

#include <optional>
#include <string>
#include <vector>

#include "audit/equilibrium.hpp"
#include "audit/game.hpp"

namespace audit {

// Data-emitting experiment protocols. All sweeps are grid deterministic;
// rows are computed independently (in parallel when OpenMP is enabled) and
// emitted in coordinate order.
struct SweepPlan {
    enum class Kind { PriorSimplex, CostSweep, PenaltyMargin, Resolution, AuditScan };
    Kind kind = Kind::CostSweep;

    std::optional<AuditGame> base_game;          // all kinds except Resolution
    std::optional<ContinuousModelSpec> cspec;    // Resolution
    bool utility = true;
    bool welfare = true;
    double eps = 1e-3;

    int simplex_resolution = 60;                 // PriorSimplex denominator
    std::vector<double> values;                  // lambda ladder / b ladder
    int m_lo = 2, m_hi = 200;                    // Resolution range
    int scan_index = 0;                          // AuditScan coordinate
    double scan_lo = 0.0, scan_hi = 1.0, scan_step = 1.0 / 256;
};

struct ObjectiveRow {
    double value = 0.0;
    AuditVector p_star;
    std::string witness_class;  // "truthful", "single-minded(i,k)", "mixed"
    double misreport_mass = 0.0;
    double audit_rate = 0.0;
    std::vector<double> distortion;
};

struct SweepRow {
    std::vector<double> coords;
    std::optional<ObjectiveRow> utility;
    std::optional<ObjectiveRow> welfare;
    bool skipped = false;
    std::string skip_reason;
};

std::vector<SweepRow> run_sweep(const SweepPlan& plan);

// Classification of a witness matrix: identity rows everywhere, a
// single-minded block, or anything else.
std::string classify_witness(const ReportStrategy& strat);

// CSV serialization: coordinate columns first, then one block per enabled
// objective suffixed _U / _W. Vector-valued fields are semicolon joined.
std::string sweep_csv(const SweepPlan& plan, const std::vector<SweepRow>& rows);

// Sidecar with the plan parameters and solver epsilon.
std::string sweep_sidecar_json(const SweepPlan& plan);

struct Fig1Row {
    double p1 = 0.0;
    double v_tru = 0.0;  // closed-form utility when everyone is truthful
    double v_lie = 0.0;  // closed-form utility when the low type pools up
    double worst = 0.0;  // evaluate_worst at (0, p1)
};

// Scan of the binary example game along p = (0, p1), emitting both branch
// formulas and the worst-case evaluation; the branches cross at p1 = 1/4.
std::vector<Fig1Row> fig1_scan(double step);

std::string fig1_csv(const std::vector<Fig1Row>& rows);

}  // namespace audit
