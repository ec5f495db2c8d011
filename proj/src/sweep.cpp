#include "audit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "audit/io.hpp"
#include "audit/solver.hpp"

namespace audit {

namespace {

std::string join_sig(const std::vector<double>& xs) {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ';';
        os << io::fmt_sig(xs[i]);
    }
    return os.str();
}

struct RowTask {
    std::vector<double> coords;
    AuditGame game;
    bool solve = true;            // false for AuditScan rows
    AuditVector fixed_p;          // AuditScan: evaluate here instead of solving
    std::string invalid_reason;   // nonempty: emit as skipped
};

ObjectiveRow make_objective_row(const AuditGame& g, Objective obj, double eps, bool solve,
                                const AuditVector& fixed_p) {
    ObjectiveRow row;
    AuditVector p;
    ReportStrategy witness = ReportStrategy::truthful(g.m);
    if (solve) {
        SolverResult r = succinct_search(g, obj, eps);
        row.value = r.value;
        p = std::move(r.p_star);
        witness = std::move(r.witness);
    } else {
        Evaluation e = evaluate_worst(g, fixed_p, obj);
        row.value = e.value;
        p = fixed_p;
        witness = std::move(e.witness);
    }
    const Metrics stats = metrics(g, p, witness);
    row.p_star = std::move(p);
    row.witness_class = classify_witness(witness);
    row.misreport_mass = stats.misreport_mass;
    row.audit_rate = stats.audit_rate;
    row.distortion = stats.distortion;
    return row;
}

std::vector<RowTask> build_tasks(const SweepPlan& plan) {
    std::vector<RowTask> tasks;
    auto push_game_row = [&tasks](std::vector<double> coords, AuditGame g) {
        RowTask t;
        t.coords = std::move(coords);
        auto violations = validate_game(g);
        if (!violations.empty()) t.invalid_reason = violations.front();
        t.game = std::move(g);
        tasks.push_back(std::move(t));
    };

    switch (plan.kind) {
        case SweepPlan::Kind::PriorSimplex: {
            if (!plan.base_game) throw std::invalid_argument("prior sweep needs a base game");
            AuditGame base = *plan.base_game;
            if (base.m != 3)
                throw std::invalid_argument("prior simplex sweep is defined for m = 3");
            const int R = plan.simplex_resolution;
            if (R < 1) throw std::invalid_argument("simplex resolution must be positive");
            for (int a = 0; a <= R; ++a) {
                for (int b = 0; b + a <= R; ++b) {
                    const int c = R - a - b;
                    std::vector<double> q = {double(a) / R, double(b) / R, double(c) / R};
                    // The model needs full support; empty corners are
                    // nudged and renormalized.
                    double sum = 0.0;
                    for (double& x : q) sum += (x = std::max(x, 1e-6));
                    for (double& x : q) x /= sum;
                    AuditGame g = base;
                    g.q = q;
                    push_game_row(q, std::move(g));
                }
            }
            break;
        }
        case SweepPlan::Kind::CostSweep: {
            if (!plan.base_game) throw std::invalid_argument("cost sweep needs a base game");
            for (double lambda : plan.values) {
                AuditGame g = *plan.base_game;
                g.regime = Regime::costly(lambda);
                push_game_row({lambda}, std::move(g));
            }
            break;
        }
        case SweepPlan::Kind::PenaltyMargin: {
            if (!plan.base_game) throw std::invalid_argument("penalty sweep needs a base game");
            for (double b : plan.values) {
                AuditGame g = *plan.base_game;
                for (int k = 0; k < g.m; ++k) g.pen[k] = g.pay[k] + b;
                push_game_row({b}, std::move(g));
            }
            break;
        }
        case SweepPlan::Kind::Resolution: {
            if (!plan.cspec) throw std::invalid_argument("resolution sweep needs a continuous spec");
            for (int m = plan.m_lo; m <= plan.m_hi; ++m) {
                RowTask t;
                t.coords = {double(m)};
                ContinuousModelSpec spec = *plan.cspec;
                spec.m = m;
                try {
                    t.game = discretize(spec);
                } catch (const std::exception& e) {
                    t.invalid_reason = e.what();
                }
                tasks.push_back(std::move(t));
            }
            break;
        }
        case SweepPlan::Kind::AuditScan: {
            if (!plan.base_game) throw std::invalid_argument("audit scan needs a base game");
            const AuditGame& base = *plan.base_game;
            if (plan.scan_index < 0 || plan.scan_index >= base.m)
                throw std::invalid_argument("audit scan index out of range");
            const auto steps =
                static_cast<long>(std::llround((plan.scan_hi - plan.scan_lo) / plan.scan_step));
            for (long j = 0; j <= steps; ++j) {
                const double x = std::min(plan.scan_hi, plan.scan_lo + j * plan.scan_step);
                RowTask t;
                t.coords = {x};
                t.game = base;
                t.solve = false;
                t.fixed_p.assign(base.m, 0.0);
                t.fixed_p[plan.scan_index] = x;
                auto violations = validate_game(base);
                if (!violations.empty()) t.invalid_reason = violations.front();
                tasks.push_back(std::move(t));
            }
            break;
        }
    }
    return tasks;
}

}  // namespace

std::string classify_witness(const ReportStrategy& strat) {
    const int m = strat.m;
    std::vector<int> pure(m, -1);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const double w = strat.at(i, k);
            if (w == 1.0 && pure[i] < 0) {
                pure[i] = k;
            } else if (w != 0.0 && w != 1.0) {
                return "mixed";
            }
        }
        if (pure[i] < 0) return "mixed";
    }
    int iota = 0;
    while (iota < m && pure[iota] != iota) ++iota;
    // rows iota.. must be truthful, rows below must share one target
    for (int i = iota; i < m; ++i) {
        if (pure[i] != i) return "mixed";
    }
    if (iota == 0) return "truthful";
    const int kappa = pure[0];
    for (int i = 0; i < iota; ++i) {
        if (pure[i] != kappa) return "mixed";
    }
    if (kappa < iota) return "mixed";  // not a valid single-minded block
    std::ostringstream os;
    os << "single-minded(" << iota << "," << kappa << ")";
    return os.str();
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
    const std::vector<RowTask> tasks = build_tasks(plan);
    std::vector<SweepRow> rows(tasks.size());

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(tasks.size()); ++r) {
        const RowTask& task = tasks[r];
        SweepRow row;
        row.coords = task.coords;
        if (!task.invalid_reason.empty()) {
            row.skipped = true;
            row.skip_reason = task.invalid_reason;
            rows[r] = std::move(row);
            continue;
        }
        if (task.solve && !(plan.eps > 0.0 && plan.eps < eps_upper_bound(task.game))) {
            row.skipped = true;
            row.skip_reason = "eps must be below gamma/3 for this game";
            rows[r] = std::move(row);
            continue;
        }
        try {
            if (plan.utility)
                row.utility = make_objective_row(task.game, Objective::PrincipalUtility, plan.eps,
                                                 task.solve, task.fixed_p);
            if (plan.welfare)
                row.welfare = make_objective_row(task.game, Objective::SocialWelfare, plan.eps,
                                                 task.solve, task.fixed_p);
        } catch (const std::exception& e) {
            row.skipped = true;
            row.skip_reason = e.what();
        }
        rows[r] = std::move(row);
    }
    return rows;
}

namespace {

std::vector<std::string> coord_names(const SweepPlan& plan) {
    switch (plan.kind) {
        case SweepPlan::Kind::PriorSimplex: return {"q0", "q1", "q2"};
        case SweepPlan::Kind::CostSweep: return {"lambda"};
        case SweepPlan::Kind::PenaltyMargin: return {"b"};
        case SweepPlan::Kind::Resolution: return {"m"};
        case SweepPlan::Kind::AuditScan: return {"p_scan"};
    }
    return {};
}

const char* kind_name(SweepPlan::Kind k) {
    switch (k) {
        case SweepPlan::Kind::PriorSimplex: return "prior_simplex";
        case SweepPlan::Kind::CostSweep: return "cost";
        case SweepPlan::Kind::PenaltyMargin: return "penalty_margin";
        case SweepPlan::Kind::Resolution: return "resolution";
        case SweepPlan::Kind::AuditScan: return "audit_scan";
    }
    return "?";
}

void append_block(std::ostringstream& os, const std::optional<ObjectiveRow>& row) {
    if (!row) {
        os << ",,,,,,";
        return;
    }
    os << ',' << io::fmt_sig(row->value) << ',' << join_sig(row->p_star) << ','
       << row->witness_class << ',' << io::fmt_sig(row->misreport_mass) << ','
       << io::fmt_sig(row->audit_rate) << ',' << join_sig(row->distortion);
}

// Skip reasons come from exception messages and may carry newlines or
// commas; flatten them so a note stays one CSV cell.
std::string csv_safe(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        if (ch == '\n' || ch == '\r')
            out += "; ";
        else if (ch == ',')
            out += ';';
        else
            out += ch;
    }
    return out;
}

}  // namespace

std::string sweep_csv(const SweepPlan& plan, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < coord_names(plan).size(); ++i) {
        if (i) os << ',';
        os << coord_names(plan)[i];
    }
    for (const char* suffix : {"_U", "_W"}) {
        if ((suffix[1] == 'U' && !plan.utility) || (suffix[1] == 'W' && !plan.welfare)) continue;
        os << ",value" << suffix << ",p_star" << suffix << ",witness" << suffix
           << ",misreport_mass" << suffix << ",audit_rate" << suffix << ",distortion" << suffix;
    }
    os << ",note\n";

    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.coords.size(); ++i) {
            if (i) os << ',';
            os << io::fmt_sig(row.coords[i]);
        }
        if (plan.utility) append_block(os, row.utility);
        if (plan.welfare) append_block(os, row.welfare);
        os << ',' << (row.skipped ? "skipped: " + csv_safe(row.skip_reason) : "") << '\n';
    }
    return os.str();
}

std::string sweep_sidecar_json(const SweepPlan& plan) {
    std::ostringstream os;
    os << "{\n  \"kind\": \"" << kind_name(plan.kind) << "\",\n";
    os << "  \"eps\": " << io::fmt_sig(plan.eps, 17) << ",\n";
    os << "  \"objectives\": [";
    if (plan.utility) os << "\"utility\"";
    if (plan.utility && plan.welfare) os << ", ";
    if (plan.welfare) os << "\"welfare\"";
    os << "]";
    switch (plan.kind) {
        case SweepPlan::Kind::PriorSimplex:
            os << ",\n  \"resolution\": " << plan.simplex_resolution;
            break;
        case SweepPlan::Kind::CostSweep:
        case SweepPlan::Kind::PenaltyMargin:
            os << ",\n  \"values\": [" << join_sig(plan.values) << "]";
            break;
        case SweepPlan::Kind::Resolution:
            os << ",\n  \"m_lo\": " << plan.m_lo << ",\n  \"m_hi\": " << plan.m_hi;
            break;
        case SweepPlan::Kind::AuditScan:
            os << ",\n  \"scan_index\": " << plan.scan_index << ",\n  \"scan_lo\": "
               << io::fmt_sig(plan.scan_lo) << ",\n  \"scan_hi\": " << io::fmt_sig(plan.scan_hi)
               << ",\n  \"scan_step\": " << io::fmt_sig(plan.scan_step);
            break;
    }
    os << "\n}\n";
    return os.str();
}

std::vector<Fig1Row> fig1_scan(double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fig1_scan: step must be positive");
    const AuditGame g = fig1_game();
    const double lam = g.regime.lambda;
    const auto steps = static_cast<long>(std::llround(1.0 / step));
    std::vector<Fig1Row> rows;
    rows.reserve(steps + 1);
    for (long j = 0; j <= steps; ++j) {
        const double p1 = std::min(1.0, j * step);
        Fig1Row row;
        row.p1 = p1;
        row.v_tru = g.q[0] * (g.val_at(0, 0) - g.pay[0]) +
                    g.q[1] * (g.val_at(1, 1) - g.pay[1] - p1 * lam);
        row.v_lie = g.q[0] * (g.val_at(0, 1) - g.pay[1] + p1 * (g.pen[1] - lam)) +
                    g.q[1] * (g.val_at(1, 1) - g.pay[1] - p1 * lam);
        row.worst = evaluate_worst(g, {0.0, p1}, Objective::PrincipalUtility).value;
        rows.push_back(row);
    }
    return rows;
}

std::string fig1_csv(const std::vector<Fig1Row>& rows) {
    std::ostringstream os;
    os << "p1,v_tru,v_lie,worst\n";
    for (const auto& row : rows) {
        os << io::fmt_sig(row.p1) << ',' << io::fmt_sig(row.v_tru) << ','
           << io::fmt_sig(row.v_lie) << ',' << io::fmt_sig(row.worst) << '\n';
    }
    return os.str();
}

}  // namespace audit
