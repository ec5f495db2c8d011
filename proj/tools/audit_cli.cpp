// Command-line front end: solvers, adaptive policies, online runs, sweeps,
// and brute-force oracle checks. All numeric output uses 12 significant
// digits; files are written atomically (temp + rename).

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "audit/adaptive.hpp"
#include "audit/equilibrium.hpp"
#include "audit/game.hpp"
#include "audit/io.hpp"
#include "audit/online.hpp"
#include "audit/oracle.hpp"
#include "audit/solver.hpp"
#include "audit/sweep.hpp"

namespace {

using namespace audit;

std::string join(const std::vector<double>& xs, char sep = ';') {
    std::ostringstream os;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << sep;
        os << io::fmt_sig(xs[i]);
    }
    return os.str();
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

int report_violations(const AuditGame& g) {
    const auto violations = validate_game(g);
    if (violations.empty()) return 0;
    for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
    return 1;
}

std::string sign_str(CriticalSign s) { return s == CriticalSign::Plus ? "+" : "-"; }

struct CommonOpts {
    std::string out_dir = ".";
    int parallel = 0;
};

void apply_parallel(const CommonOpts& opts) {
#ifdef _OPENMP
    if (opts.parallel > 0) omp_set_num_threads(opts.parallel);
#else
    (void)opts;
#endif
}

int cmd_solve(const std::string& game_path, const std::string& objective, double eps,
              bool adaptive, const CommonOpts& opts) {
    const std::string text = io::read_file(game_path);
    // a continuous-model config is discretized on the fly
    AuditGame g = io::looks_continuous(text) ? discretize(io::parse_continuous(text))
                                             : io::parse_game(text);
    if (int rc = report_violations(g)) return rc;
    const Objective obj =
        objective == "welfare" ? Objective::SocialWelfare : Objective::PrincipalUtility;

    const InsensitivityFlag flag = insensitivity_flag(g);
    std::cout << "penalty-sensitivity advisory: "
              << (flag.holds ? "pay/pen ratio condition holds" : "ratio condition fails") << "\n";

    if (adaptive) {
        DictatorPolicy policy;
        try {
            policy = solve_adaptive_costly(g, eps);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        std::cout << "adaptive value " << io::fmt_sig(policy.value) << "\n";
        std::cout << "p_star " << join(policy.p_star) << "\n";
        std::cout << "qhat_star " << join(policy.qhat_star) << "\n";
        std::cout << "critical (" << policy.critical.iota << "," << policy.critical.kappa << ","
                  << sign_str(policy.critical.sign) << ")\n";
        io::atomic_write((std::filesystem::path(opts.out_dir) / "policy.json").string(),
                         io::write_policy(policy));
        return 0;
    }

    if (g.regime.kind != RegimeKind::Costly) {
        std::cerr << "error: non-adaptive solving needs the costly regime; "
                     "use the budget subcommand for budgeted games\n";
        return 1;
    }
    if (!(eps > 0.0 && eps <= eps_upper_bound(g))) {
        std::cerr << "error: eps must satisfy 0 < eps <= gamma/3 = "
                  << io::fmt_sig(eps_upper_bound(g)) << "\n";
        return 1;
    }
    const SolverResult r = succinct_search(g, obj, eps);
    std::cout << "objective " << (obj == Objective::SocialWelfare ? "welfare" : "utility") << "\n";
    std::cout << "eps " << io::fmt_sig(eps) << "\n";
    std::cout << "value " << io::fmt_sig(r.value) << "\n";
    std::cout << "critical (" << r.critical.iota << "," << r.critical.kappa << ","
              << sign_str(r.critical.sign) << ")\n";
    std::cout << "p_star " << join(r.p_star) << "\n";
    std::cout << "witness " << classify_witness(r.witness) << "\n";
    const Metrics m = metrics(g, r.p_star, r.witness);
    std::cout << "misreport_mass " << io::fmt_sig(m.misreport_mass) << "\n";
    std::cout << "audit_rate " << io::fmt_sig(m.audit_rate) << "\n";
    return 0;
}

int cmd_budget(const std::string& game_path, const CommonOpts& opts) {
    AuditGame g = io::load_game(game_path);
    if (int rc = report_violations(g)) return rc;
    if (g.regime.kind != RegimeKind::Budgeted) {
        std::cerr << "error: budget subcommand needs a budgeted game (field 'budget')\n";
        return 1;
    }
    const BudgetDiagnostics diag = budget_beta(g);
    const DictatorPolicy policy = solve_adaptive_budgeted(g);
    std::cout << "beta " << io::fmt_sig(diag.beta) << "\n";
    std::cout << "branch " << (policy.small_budget ? "small-budget" : "single-minded search")
              << "\n";
    std::cout << "value " << io::fmt_sig(policy.value) << "\n";
    if (policy.small_budget) {
        // The analytic pooling bound charges the penalty on every audit;
        // truthful top-type agents pay none, so the realized value sits
        // below it whenever the top type has mass.
        std::cout << "pooling upper bound " << io::fmt_sig(small_budget_upper_bound(g)) << "\n";
    }
    std::cout << "p_star " << join(policy.p_star) << "\n";
    std::cout << "qhat_star " << join(policy.qhat_star) << "\n";
    io::atomic_write((std::filesystem::path(opts.out_dir) / "policy.json").string(),
                     io::write_policy(policy));
    return 0;
}

int cmd_mi(const std::string& game_path, const std::string& qhat_text, double budget) {
    AuditGame g = io::load_game(game_path);
    if (int rc = report_violations(g)) return rc;
    std::vector<double> qhat = qhat_text.empty() ? g.q : parse_number_list(qhat_text);
    if (static_cast<int>(qhat.size()) != g.m) {
        std::cerr << "error: qhat needs " << g.m << " entries\n";
        return 1;
    }
    const WaterfillResult r = minimize_misreport_incentive(g, qhat, budget);
    std::cout << "u_star " << io::fmt_sig(r.u_star) << "\n";
    std::cout << "eps_mi " << io::fmt_sig(r.eps_mi) << "\n";
    std::cout << "p " << join(r.p) << "\n";
    return 0;
}

int cmd_online(const std::string& game_path, const std::string& priors_path, int T,
               std::uint64_t seed, const CommonOpts& opts) {
    AuditGame g = io::load_game(game_path);
    if (int rc = report_violations(g)) return rc;
    const auto priors = io::parse_priors(io::read_file(priors_path), g.m);
    OnlineRun run;
    try {
        run = run_online(g, priors, T, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const auto csv_path = std::filesystem::path(opts.out_dir) / "online_rounds.csv";
    io::atomic_write(csv_path.string(), round_logs_csv(run.logs));
    std::cout << regret_report_text(run.report, critical_set(g.m));
    std::cout << "round log: " << csv_path.string() << "\n";
    return 0;
}

int cmd_sweep(const std::string& plan_path, const CommonOpts& opts) {
    const auto base_dir = std::filesystem::path(plan_path).parent_path().string();
    const SweepPlan plan = io::parse_plan(io::read_file(plan_path), base_dir);
    const auto rows = run_sweep(plan);
    const auto csv_path = std::filesystem::path(opts.out_dir) / "sweep.csv";
    const auto sidecar_path = std::filesystem::path(opts.out_dir) / "sweep_plan.json";
    io::atomic_write(csv_path.string(), sweep_csv(plan, rows));
    io::atomic_write(sidecar_path.string(), sweep_sidecar_json(plan));
    std::size_t skipped = 0;
    for (const auto& row : rows) skipped += row.skipped ? 1 : 0;
    std::cout << "rows " << rows.size() << " (skipped " << skipped << ")\n";
    std::cout << "csv: " << csv_path.string() << "\n";
    return 0;
}

int cmd_oracle_check(const std::string& game_path, int random_count, int random_m,
                     std::uint64_t seed, double eps, double step, bool force) {
    std::vector<AuditGame> games;
    std::vector<std::string> labels;
    if (!game_path.empty()) {
        games.push_back(io::load_game(game_path));
        labels.push_back(game_path);
    } else {
        for (int i = 0; i < random_count; ++i) {
            games.push_back(random_game(random_m, seed + i));
            labels.push_back("random[" + std::to_string(i) + "]");
        }
    }

    GridSpec grid;
    grid.step = step;
    grid.force = force;

    bool all_pass = true;
    std::printf("%-16s %16s %16s %12s %8s\n", "game", "solver", "grid", "slack", "verdict");
    for (std::size_t i = 0; i < games.size(); ++i) {
        const AuditGame& g = games[i];
        if (int rc = report_violations(g)) return rc;
        const SolverResult solver = succinct_search(g, Objective::PrincipalUtility, eps);
        const GridResult oracle = grid_best(g, Objective::PrincipalUtility, grid, GridMode::Worst);
        const double margin = 2.0 * g.n * eps + oracle.slack;
        const bool pass = solver.value >= oracle.value - margin;
        all_pass = all_pass && pass;
        std::printf("%-16s %16s %16s %12s %8s\n", labels[i].c_str(),
                    io::fmt_sig(solver.value).c_str(), io::fmt_sig(oracle.value).c_str(),
                    io::fmt_sig(oracle.slack).c_str(), pass ? "PASS" : "FAIL");
    }
    std::printf("slack is advisory (largest observed inter-cell jump; the objective can be "
                "discontinuous)\n");
    return all_pass ? 0 : 1;
}

int cmd_fig1(double step, const CommonOpts& opts) {
    const auto rows = fig1_scan(step);
    const auto csv_path = std::filesystem::path(opts.out_dir) / "fig1.csv";
    io::atomic_write(csv_path.string(), fig1_csv(rows));
    std::cout << "rows " << rows.size() << "\n";
    std::cout << "csv: " << csv_path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit-policy solvers for principal-agent audit games"};
    app.require_subcommand(1);
    app.fallthrough();  // accept --out / --parallel after the subcommand

    CommonOpts common;
    app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
    app.add_option("--parallel", common.parallel, "worker thread count (0 = runtime default)");

    std::string game_path, priors_path, plan_path, objective = "utility", qhat_text;
    double eps = 1e-3;  // overridable; validity is re-checked per game
    double budget = 0.0, step = 0.01, grid_step = 1.0 / 256;
    bool adaptive = false, force_grid = false;
    int T = 1000, random_count = 0, random_m = 3;
    std::uint64_t seed = 1;

    auto* solve = app.add_subcommand("solve", "non-adaptive or adaptive costly solver");
    solve->add_option("game", game_path, "game config file")->required();
    solve->add_option("--objective", objective, "utility|welfare")
        ->check(CLI::IsMember({"utility", "welfare"}));
    solve->add_option("--eps", eps, "solver epsilon")->capture_default_str();
    solve->add_flag("--adaptive", adaptive, "dictator policy via best-case search");

    auto* budget_cmd = app.add_subcommand("budget", "adaptive budgeted solver");
    budget_cmd->add_option("game", game_path, "game config file (budgeted)")->required();

    auto* mi = app.add_subcommand("mi", "misreport-incentive minimizing water-fill");
    mi->add_option("game", game_path, "game config file")->required();
    mi->add_option("--qhat", qhat_text, "report distribution, comma separated (default: prior)");
    mi->add_option("--budget", budget, "audit budget")->required();

    auto* online = app.add_subcommand("online", "EXP3 over critical-vector templates");
    online->add_option("game", game_path, "game config file")->required();
    online->add_option("--priors", priors_path, "JSON array of per-round priors")->required();
    online->add_option("-T,--rounds", T, "horizon")->capture_default_str();
    online->add_option("--seed", seed, "RNG seed")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "run a sweep plan and emit CSV");
    sweep->add_option("plan", plan_path, "sweep plan file")->required();

    auto* oracle = app.add_subcommand("oracle-check", "grid oracle vs solver");
    oracle->add_option("game", game_path, "game config file");
    oracle->add_option("--random-count", random_count, "number of random games");
    oracle->add_option("--random-m", random_m, "type count for random games")
        ->capture_default_str();
    oracle->add_option("--seed", seed, "RNG seed")->capture_default_str();
    oracle->add_option("--eps", eps, "solver epsilon")->capture_default_str();
    oracle->add_option("--step", grid_step, "grid step")->capture_default_str();
    oracle->add_flag("--force-grid", force_grid, "allow m > 4 grids");

    auto* fig1 = app.add_subcommand("fig1", "audit-probability scan of the binary example");
    fig1->add_option("--step", step, "scan step")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    apply_parallel(common);
    try {
        if (solve->parsed()) return cmd_solve(game_path, objective, eps, adaptive, common);
        if (budget_cmd->parsed()) return cmd_budget(game_path, common);
        if (mi->parsed()) return cmd_mi(game_path, qhat_text, budget);
        if (online->parsed()) return cmd_online(game_path, priors_path, T, seed, common);
        if (sweep->parsed()) return cmd_sweep(plan_path, common);
        if (oracle->parsed()) {
            if (game_path.empty() && random_count <= 0) {
                std::cerr << "error: oracle-check needs a game file or --random-count\n";
                return 2;
            }
            return cmd_oracle_check(game_path, random_count, random_m, seed, eps, grid_step,
                                    force_grid);
        }
        if (fig1->parsed()) return cmd_fig1(step, common);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
