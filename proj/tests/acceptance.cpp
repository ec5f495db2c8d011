// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria mix library-level checks with runs of the real CLI.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "audit/adaptive.hpp"
#include "audit/equilibrium.hpp"
#include "audit/game.hpp"
#include "audit/io.hpp"
#include "audit/online.hpp"
#include "audit/oracle.hpp"
#include "audit/solver.hpp"
#include "audit/sweep.hpp"
#include "test_util.hpp"

using namespace audit;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void require(bool ok, const std::string& why) {
        if (!ok) fail(why);
    }
};

std::string fmt(double x) { return io::fmt_sig(x, 6); }

AuditVector random_p(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    AuditVector p(m);
    for (double& x : p) x = u(rng);
    return p;
}

// ---- criterion 1: binary-example reproduction through the CLI ----
Criterion criterion1() {
    Criterion c;
    const fs::path dir = fs::temp_directory_path() / "audit_acceptance";
    fs::create_directories(dir);
    const fs::path game_file = dir / "fig1_game.json";
    io::atomic_write(game_file.string(), io::write_game(fig1_game()));
    const fs::path out = dir / "solve_out.txt";
    const std::string cmd = std::string(AUDIT_CLI_PATH) + " solve " + game_file.string() +
                            " --eps 1e-3 > " + out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    c.require(WEXITSTATUS(rc) == 0, "solve exited nonzero");
    const std::string text = io::read_file(out.string());
    const auto pos = text.find("value ");
    c.require(pos != std::string::npos, "no value line in solve output");
    if (c.pass) {
        const double value = std::stod(text.substr(pos + 6));
        c.require(value >= 15.0 / 8.0 - 2e-3 && value < 15.0 / 8.0,
                  "value " + fmt(value) + " outside [15/8 - 2e-3, 15/8)");
        c.detail = "solve value " + fmt(value);
    }
    const double knife =
        evaluate_worst(fig1_game(), {0.0, 0.25}, Objective::PrincipalUtility).value;
    c.require(std::abs(knife - 0.25) <= 1e-9, "worst at (0, 1/4) is " + fmt(knife));
    c.detail += ", worst(0,1/4) = " + fmt(knife);
    return c;
}

// ---- criterion 2: solver vs grid oracle, and enumeration vs evaluator ----
Criterion criterion2() {
    Criterion c;
    const double eps = 1e-3;
    GridSpec grid;
    grid.step = 1.0 / 512;
    int trials = 0;
    double worst_margin = 1e300;
    for (int seed = 0; seed < 200; ++seed) {
        const int m = seed < 150 ? 2 : 3;
        const AuditGame g = random_game(m, 52000 + seed);
        const SolverResult solver = succinct_search(g, Objective::PrincipalUtility, eps);
        const GridResult oracle = grid_best(g, Objective::PrincipalUtility, grid, GridMode::Worst);
        const double margin =
            solver.value - (oracle.value - 2.0 * g.n * eps - oracle.slack);
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0) {
            c.fail("solver below grid bound on seed " + std::to_string(seed));
            break;
        }
        ++trials;
    }
    c.detail = std::to_string(trials) + " grid trials, min margin " + fmt(worst_margin);

    std::mt19937_64 rng(987);
    for (int trial = 0; trial < 1000 && c.pass; ++trial) {
        const AuditGame g = random_game(2 + trial % 3, 61000 + trial);
        const AuditVector p = random_p(g.m, rng);
        const auto eqs = enumerate_equilibria(g, p);
        double lo = 1e300, hi = -1e300;
        for (const auto& reports : eqs) {
            const double v =
                objective_value(g, p, pure_strategy(g.m, reports), Objective::PrincipalUtility);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.require(std::abs(lo - evaluate_worst(g, p, Objective::PrincipalUtility).value) <= 1e-9 &&
                      std::abs(hi - evaluate_best(g, p, Objective::PrincipalUtility).value) <= 1e-9,
                  "enumeration mismatch on trial " + std::to_string(trial));
    }
    c.detail += ", 1000 enumeration pairs";
    return c;
}

// ---- criterion 3: fast DP equals slow evaluation on critical vectors ----
Criterion criterion3() {
    Criterion c;
    double max_gap = 0.0;
    for (int seed = 0; seed < 50; ++seed) {
        const int m = 2 + seed * 48 / 49;  // 2 .. 50
        const AuditGame g = random_game(m, 73000 + seed);
        const double eps = std::min(1e-3, 0.5 * eps_upper_bound(g));
        const FastTables tables = FastTables::build(g);
        for (const auto& idx : critical_set(g.m)) {
            const AuditVector p = critical_vector(g, idx, eps);
            for (Objective obj : {Objective::PrincipalUtility, Objective::SocialWelfare}) {
                const double gap = std::abs(fast_compute_val(g, idx, eps, tables, obj) -
                                            evaluate_worst(g, p, obj).value);
                max_gap = std::max(max_gap, gap);
            }
        }
    }
    c.require(max_gap <= 1e-9, "max fast/slow gap " + fmt(max_gap));
    c.detail = "50 games (m up to 50), max gap " + fmt(max_gap);
    return c;
}

// ---- criterion 4: monotonicity in cost and penalty ----
Criterion criterion4() {
    Criterion c;
    std::mt19937_64 rng(31);
    for (int seed = 0; seed < 50 && c.pass; ++seed) {
        AuditGame g = random_game(2 + seed % 3, 81000 + seed);
        const double pen_min = *std::min_element(g.pen.begin(), g.pen.end());
        g.regime = Regime::costly(std::min(g.regime.lambda, 0.4 * pen_min));
        const double eps = std::min(1e-3, 0.5 * eps_upper_bound(g));
        const double tol = 2.0 * g.n * eps + 1e-6;

        for (Objective obj : {Objective::PrincipalUtility, Objective::SocialWelfare}) {
            double prev = succinct_search(g, obj, eps).value;
            for (int step = 1; step <= 2; ++step) {
                AuditGame g2 = g;
                g2.regime = Regime::costly(g.regime.lambda + 0.25 * step * pen_min);
                const double v = succinct_search(g2, obj, eps).value;
                c.require(v <= prev + tol, "value rose with lambda on seed " + std::to_string(seed));
                prev = v;
            }
            AuditGame raised = g;
            for (double& x : raised.pen) x += 0.5;
            c.require(succinct_search(raised, obj, eps).value >=
                          succinct_search(g, obj, eps).value - tol,
                      "value fell with penalty on seed " + std::to_string(seed));
        }

        // the scaling transform preserves the summary
        const AuditVector p = random_p(g.m, rng);
        std::vector<double> pen_new = g.pen;
        for (double& x : pen_new) x += 0.5;
        const auto [g2, p2] = monotone_transform(g, p, pen_new);
        const auto a = summarize(g, p);
        const auto b = summarize(g2, p2);
        c.require(a.a_hat == b.a_hat && a.i_truth == b.i_truth && a.strict == b.strict &&
                      std::abs(a.u_hat - b.u_hat) <= 1e-12,
                  "transform changed summary on seed " + std::to_string(seed));
        for (int k = 0; k < g.m; ++k) {
            c.require(std::abs(a.misreport_utils[k] - b.misreport_utils[k]) <= 1e-12,
                      "transform moved a misreport utility");
        }
    }
    c.detail = "50 games, 3-point cost ladder and +0.5 penalty shift";
    return c;
}

// ---- criterion 5: three-type cost and penalty-margin sweeps ----
Criterion criterion5() {
    Criterion c;
    const double tol = 2.002e-3;  // 2 n eps plus float headroom

    SweepPlan cost;
    cost.kind = SweepPlan::Kind::CostSweep;
    cost.base_game = testutil::cost_sweep_game();
    cost.values = {0.6, 0.7, 0.8, 0.9};
    const auto cost_rows = run_sweep(cost);
    for (std::size_t r = 1; r < cost_rows.size(); ++r) {
        c.require(cost_rows[r].utility->value <= cost_rows[r - 1].utility->value + tol,
                  "utility rose along the cost ladder");
        c.require(cost_rows[r].welfare->value <= cost_rows[r - 1].welfare->value + tol,
                  "welfare rose along the cost ladder");
    }

    SweepPlan margin;
    margin.kind = SweepPlan::Kind::PenaltyMargin;
    margin.base_game = testutil::cost_sweep_game(0.7);
    margin.values = {0.5, 1.0, 1.5, 2.0};
    const auto margin_rows = run_sweep(margin);
    for (std::size_t r = 1; r < margin_rows.size(); ++r) {
        c.require(margin_rows[r].utility->value >= margin_rows[r - 1].utility->value - tol,
                  "utility fell along the margin ladder");
        c.require(margin_rows[r].welfare->value >= margin_rows[r - 1].welfare->value - tol,
                  "welfare fell along the margin ladder");
        for (int k = 1; k < 3; ++k) {
            c.require(margin_rows[r].utility->p_star[k] <=
                          margin_rows[r - 1].utility->p_star[k] + 1e-6,
                      "a higher-report audit probability rose with the margin");
            c.require(margin_rows[r].welfare->p_star[k] <=
                          margin_rows[r - 1].welfare->p_star[k] + 1e-6,
                      "a higher-report audit probability rose with the margin (welfare)");
        }
    }
    c.detail = "lambda in {0.6..0.9}, b in {0.5..2.0}";
    return c;
}

// ---- criterion 6: prior corners of the three-type heatmap game ----
Criterion criterion6() {
    Criterion c;
    const std::vector<std::pair<std::vector<double>, std::string>> corners = {
        {{0.9, 0.05, 0.05}, "truthful"},
        {{0.05, 0.9, 0.05}, "single-minded(1,1)"},
        {{0.05, 0.05, 0.9}, "single-minded(2,2)"},
    };
    for (const auto& [prior, expected] : corners) {
        const AuditGame g = heatmap_game(prior);
        const SolverResult r = succinct_search(g, Objective::PrincipalUtility, 1e-3);
        const std::string got = classify_witness(r.witness);
        c.require(got == expected, "witness at corner is " + got + ", expected " + expected);

        // oracle confirmation 1: the enumeration oracle finds the same
        // worst extreme equilibrium at p_star
        const auto eqs = enumerate_equilibria(g, r.p_star);
        double lo = 1e300;
        std::vector<int> lo_reports;
        for (const auto& reports : eqs) {
            const double v = objective_value(g, r.p_star, pure_strategy(g.m, reports),
                                             Objective::PrincipalUtility);
            if (v < lo) {
                lo = v;
                lo_reports = reports;
            }
        }
        c.require(classify_witness(pure_strategy(g.m, lo_reports)) == expected,
                  "enumerated worst equilibrium class differs at corner");

        // oracle confirmation 2: the solver clears the grid bound here
        GridSpec grid;
        grid.step = 1.0 / 128;
        const GridResult oracle = grid_best(g, Objective::PrincipalUtility, grid, GridMode::Worst);
        c.require(r.value >= oracle.value - 2e-3 * g.n - oracle.slack,
                  "solver below the grid bound at a corner");
    }
    c.detail = "three corners, witness classes + enumeration + grid";
    return c;
}

// ---- criterion 7: adaptive search matches non-adaptive on insensitive games ----
Criterion criterion7() {
    Criterion c;
    for (int seed = 0; seed < 50 && c.pass; ++seed) {
        RandomGameOptions opt;
        opt.insensitive = true;
        const AuditGame g = random_game(2 + seed % 4, 91000 + seed, opt);
        const double eps = std::min(1e-3, 0.5 * eps_upper_bound(g));
        const DictatorPolicy policy = solve_adaptive_costly(g, eps);
        const SolverResult nonadaptive = succinct_search(g, Objective::PrincipalUtility, eps);
        c.require(policy.value >= nonadaptive.value - 1e-9 &&
                      policy.value <= nonadaptive.value + 2.0 * g.n * eps + 1e-9,
                  "adaptive value outside the band on seed " + std::to_string(seed));
        double best = -1e300;
        for (const auto& idx : critical_set(g.m)) {
            best = std::max(best, evaluate_best(g, critical_vector(g, idx, eps),
                                                Objective::PrincipalUtility)
                                      .value);
        }
        c.require(std::abs(policy.value - best) <= 1e-9,
                  "adaptive value differs from the best-case scan on seed " + std::to_string(seed));
    }
    c.detail = "50 insensitive games";
    return c;
}

// ---- criterion 8: budgeted policy branches ----
Criterion criterion8() {
    Criterion c;
    int small = 0, sufficient = 0;
    for (int seed = 0; seed < 50 && c.pass; ++seed) {
        RandomGameOptions opt;
        opt.regime = RegimeKind::Budgeted;
        AuditGame g = random_game(2 + seed % 4, 101000 + seed, opt);
        const double beta = budget_beta(g).beta;
        g.regime = Regime::budgeted(seed % 2 == 0 ? (0.2 + 0.6 * (seed % 5) / 5.0) * g.n * beta
                                                  : g.n * beta * (1.1 + 0.8 * (seed % 5)));
        const DictatorPolicy policy = solve_adaptive_budgeted(g);
        if (policy.small_budget) {
            ++small;
            c.require(policy.value <= small_budget_upper_bound(g) + 1e-9,
                      "small-budget value above the pooling bound on seed " + std::to_string(seed));
        } else {
            ++sufficient;
            const auto sm =
                ReportStrategy::single_minded(g.m, policy.critical.iota, policy.critical.kappa);
            const Metrics m = metrics(g, policy.p_star, sm);
            c.require(m.expected_audits <= g.regime.budget + 1e-9,
                      "budget violated on seed " + std::to_string(seed));
            const double p_top = std::min(g.regime.budget / g.n, beta);
            double ref = 0.0;
            for (int i = 0; i < g.m; ++i) {
                const double gain = i == g.m - 1 ? 0.0 : p_top * g.pen[g.m - 1];
                ref += g.q[i] * (g.val_at(i, g.m - 1) - g.pay[g.m - 1] + gain);
            }
            c.require(policy.value >= g.n * ref - 1e-9,
                      "pooling policy beats the search on seed " + std::to_string(seed));
        }
    }
    c.detail = std::to_string(small) + " small-budget, " + std::to_string(sufficient) +
               " sufficient-budget games";
    return c;
}

// ---- criterion 9: misreport-incentive water-fill vs the LP oracle ----
Criterion criterion9() {
    Criterion c;
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double max_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const AuditGame g = random_game(2 + trial % 4, 111000 + trial);
        std::vector<double> qhat(g.m);
        double sum = 0.0;
        for (double& x : qhat) sum += (x = 0.05 + u01(rng));
        for (double& x : qhat) x /= sum;
        const double budget = 2.5 * u01(rng);
        const WaterfillResult r = minimize_misreport_incentive(g, qhat, budget);
        const double lp_u = testutil::misreport_incentive_lp(g.pay, g.pen, qhat, g.n, budget);
        const double pay_min = *std::min_element(g.pay.begin(), g.pay.end());
        max_gap = std::max(max_gap, std::abs(r.eps_mi - (lp_u - pay_min)));
    }
    c.require(max_gap <= 1e-7, "max water-fill/LP gap " + fmt(max_gap));

    const WaterfillResult knife = minimize_misreport_incentive(fig1_game(), {0.5, 0.5}, 0.25);
    c.require(std::abs(knife.u_star - 4.0 / 7.0) <= 1e-9 &&
                  std::abs(knife.p[0] - 1.0 / 7.0) <= 1e-9 &&
                  std::abs(knife.p[1] - 5.0 / 14.0) <= 1e-9,
              "binary-example water-fill off the closed form");

    const std::vector<double> pay = {0.0, 0.0, 1.0, 1.0, 1.0};
    const std::vector<double> pen = {0.0, 0.0, 1.7, 1.7, 1.7};
    const std::vector<double> qhat_thr = {0.25, 0.15, 0.2, 0.2, 0.2};
    const WaterfillResult thr = minimize_misreport_incentive(pay, pen, qhat_thr, 1.0, 0.2);
    c.require(thr.p[0] == 0.0 && thr.p[1] == 0.0 && std::abs(thr.p[2] - thr.p[3]) <= 1e-12 &&
                  std::abs(thr.p[3] - thr.p[4]) <= 1e-12,
              "threshold instance not audited uniformly");

    c.detail = "100 LP trials, max gap " + fmt(max_gap) + ", closed forms hold";
    return c;
}

// ---- criterion 10: empirical sublinearity of the online learner ----
Criterion criterion10() {
    Criterion c;
    const AuditGame g = fig1_game();
    const std::vector<std::vector<std::vector<double>>> sequences = {
        {{0.5, 0.5}},
        {{0.9, 0.1}, {0.1, 0.9}},
    };
    const char* names[] = {"constant", "alternating"};
    for (std::size_t s = 0; s < sequences.size(); ++s) {
        double short_avg = 0.0, long_avg = 0.0;
        for (int seed = 0; seed < 10; ++seed) {
            const OnlineRun short_run = run_online(g, sequences[s], 256, 1200 + seed, true);
            const OnlineRun long_run = run_online(g, sequences[s], 4096, 1200 + seed, true);
            short_avg += short_run.report.avg_regret;
            long_avg += long_run.report.avg_regret;
            for (const auto& run : {short_run, long_run}) {
                for (const auto& log : run.logs) {
                    const double sum =
                        std::accumulate(log.p_snapshot->begin(), log.p_snapshot->end(), 0.0);
                    if (std::abs(sum - 1.0) > 1e-12) {
                        c.fail("sampling distribution unnormalized at round " +
                               std::to_string(log.t));
                        break;
                    }
                }
            }
        }
        short_avg /= 10.0;
        long_avg /= 10.0;
        c.require(long_avg < short_avg,
                  std::string(names[s]) + " priors: avg regret " + fmt(long_avg) +
                      " at T=4096 not below " + fmt(short_avg) + " at T=256");
        c.detail += std::string(s ? "; " : "") + names[s] + " " + fmt(short_avg) + " -> " +
                    fmt(long_avg);
    }
    return c;
}

// ---- criterion 11: resolution sweep flattening and strictness ----
Criterion criterion11() {
    Criterion c;
    SweepPlan plan;
    plan.kind = SweepPlan::Kind::Resolution;
    plan.cspec = ContinuousModelSpec{};
    plan.m_lo = 2;
    plan.m_hi = 200;
    plan.eps = 1e-6;
    const auto rows = run_sweep(plan);
    c.require(rows.size() == 199, "unexpected row count");

    auto value_at = [&rows](int m, bool utility) {
        for (const auto& row : rows) {
            if (static_cast<int>(row.coords[0]) == m)
                return utility ? row.utility->value : row.welfare->value;
        }
        return 0.0;
    };
    for (bool utility : {true, false}) {
        const double v100 = value_at(100, utility), v200 = value_at(200, utility);
        c.require(std::abs(v200 - v100) <= 0.05 * std::abs(v100),
                  std::string(utility ? "utility" : "welfare") + " failed flattening: " +
                      fmt(v100) + " vs " + fmt(v200));
    }

    double audit_u = 0.0, audit_w = 0.0, mis_u = 0.0, mis_w = 0.0;
    for (const auto& row : rows) {
        audit_u += row.utility->audit_rate;
        audit_w += row.welfare->audit_rate;
        mis_u += row.utility->misreport_mass;
        mis_w += row.welfare->misreport_mass;
    }
    c.require(audit_u >= audit_w, "utility-optimal policy audits less on aggregate");
    c.detail = "U(100)=" + fmt(value_at(100, true)) + " U(200)=" + fmt(value_at(200, true)) +
               ", mean audit U/W = " + fmt(audit_u / 199) + "/" + fmt(audit_w / 199) +
               ", mean misreport U/W = " + fmt(mis_u / 199) + "/" + fmt(mis_w / 199);
    return c;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        double budget_s;
        Criterion (*run)();
    };
    const std::vector<Entry> entries = {
        {"1. binary-example reproduction", 1.0, criterion1},
        {"2. grid-oracle equivalence", 300.0, criterion2},
        {"3. fast/slow evaluation equality", 30.0, criterion3},
        {"4. cost and penalty monotonicity", 120.0, criterion4},
        {"5. three-type cost/margin sweeps", 60.0, criterion5},
        {"6. heatmap prior corners", 60.0, criterion6},
        {"7. adaptive-costly equivalence", 60.0, criterion7},
        {"8. budgeted policy branches", 60.0, criterion8},
        {"9. misreport-incentive water-fill", 60.0, criterion9},
        {"10. online regret sublinearity", 120.0, criterion10},
        {"11. resolution sweep flattening", 600.0, criterion11},
    };

    int passed = 0;
    for (const auto& entry : entries) {
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c = entry.run();
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.seconds > entry.budget_s) {
            c.fail("runtime " + fmt(c.seconds) + "s over the " + fmt(entry.budget_s) + "s budget");
        }
        std::printf("[%s] %s (%.2f s)%s%s\n", c.pass ? "PASS" : "FAIL", entry.name, c.seconds,
                    c.detail.empty() ? "" : " - ", c.detail.c_str());
        std::fflush(stdout);
        passed += c.pass ? 1 : 0;
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, entries.size());
    return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
