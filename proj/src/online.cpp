#include "audit/online.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "audit/io.hpp"

namespace audit {

namespace {

// Uniform draw in [0,1) built directly from the engine's 64-bit output so
// the stream does not depend on the standard library's distribution
// implementation.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<double> LearnerState::sampling_distribution() const {
    // Softmax of eta * score, shifted by the max score before
    // exponentiation so large score sums cannot overflow.
    double smax = scores.empty() ? 0.0 : *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double total = 0.0;
    for (std::size_t a = 0; a < scores.size(); ++a) {
        p[a] = std::exp(eta * (scores[a] - smax));
        total += p[a];
    }
    for (double& x : p) x /= total;
    return p;
}

LearnerState learner_init(const AuditGame& game_sans_prior, int T, std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("learner_init: T must be at least 1");
    AuditGame g = game_sans_prior;
    if (g.q.empty()) g.q.assign(g.m, 1.0 / g.m);  // placeholder; never read by the learner
    require_valid(g);

    LearnerState s;
    s.arms = critical_set(g.m);
    s.scores.assign(s.arms.size(), 0.0);
    const double two_m2 = 2.0 * g.m * g.m;
    s.eta = std::sqrt(std::log(two_m2) / (two_m2 * T));
    double worst = 0.0;
    for (int i = 0; i < g.m; ++i) {
        for (int k = 0; k < g.m; ++k) {
            worst = std::max(worst, g.val_at(i, k) + g.pay[k] + g.pen[k]);
        }
    }
    s.reward_bound = g.n * worst;
    s.eps0 = g.gamma() / 3.0;
    s.eps_t = s.eps0;
    s.t = 0;
    s.seed = seed;
    s.rng.seed(seed);
    return s;
}

double exp3_increment(double reward_bound, double reward, double prob_chosen, bool chosen) {
    const double loss = (reward_bound - reward) / (2.0 * reward_bound);
    return 1.0 - (chosen ? loss / prob_chosen : 0.0);
}

RoundLog learner_step(const AuditGame& g, LearnerState& state,
                      const std::function<double(const AuditVector&)>& reward_oracle,
                      bool snapshot_distribution) {
    const std::vector<double> dist = state.sampling_distribution();

    const double u = unit_uniform(state.rng);
    std::size_t chosen = dist.size() - 1;
    double acc = 0.0;
    for (std::size_t a = 0; a < dist.size(); ++a) {
        acc += dist[a];
        if (u < acc) {
            chosen = a;
            break;
        }
    }

    RoundLog log;
    log.t = state.t + 1;
    log.sigma = state.arms[chosen];
    log.eps_t = state.eps_t;
    log.p_played = critical_vector(g, state.arms[chosen], state.eps_t);
    if (snapshot_distribution) log.p_snapshot = dist;

    const double v = reward_oracle(log.p_played);
    if (!(std::abs(v) <= state.reward_bound + 1e-9))
        throw std::runtime_error("learner_step: reward outside [-L, L]");
    log.reward = v;

    for (std::size_t a = 0; a < state.scores.size(); ++a) {
        state.scores[a] += exp3_increment(state.reward_bound, v, dist[a], a == chosen);
    }
    state.eps_t = std::max(state.eps_t / 2.0, kEpsFloor);
    state.t += 1;
    return log;
}

OnlineRun run_online(const AuditGame& game_template,
                     const std::vector<std::vector<double>>& prior_sequence, int T,
                     std::uint64_t seed, bool snapshot_distribution, double eps_bench) {
    if (prior_sequence.empty()) throw std::invalid_argument("run_online: empty prior sequence");
    AuditGame g = game_template;
    for (const auto& prior : prior_sequence) {
        if (static_cast<int>(prior.size()) != g.m)
            throw std::invalid_argument("run_online: prior length must equal m");
        g.q = prior;
        require_valid(g);  // full support and the rest, before round 0
    }

    LearnerState state = learner_init(game_template, T, seed);
    if (!(eps_bench > 0.0 && eps_bench <= eps_upper_bound(g)))
        throw std::invalid_argument("run_online: eps_bench out of range");

    std::vector<AuditVector> bench_vectors;
    bench_vectors.reserve(state.arms.size());
    for (const auto& arm : state.arms)
        bench_vectors.push_back(critical_vector(g, arm, eps_bench));

    OnlineRun run;
    run.logs.reserve(T);
    run.report.eps_bench = eps_bench;
    run.report.arm_benchmarks.assign(state.arms.size(), 0.0);

    for (int t = 1; t <= T; ++t) {
        g.q = prior_sequence[(t - 1) % prior_sequence.size()];
        auto oracle = [&g](const AuditVector& p) {
            return evaluate_worst(g, p, Objective::PrincipalUtility).value;
        };
        RoundLog log = learner_step(g, state, oracle, snapshot_distribution);
        log.prior = g.q;
        run.report.cum_reward += log.reward;
        for (std::size_t a = 0; a < bench_vectors.size(); ++a) {
            run.report.arm_benchmarks[a] +=
                evaluate_worst(g, bench_vectors[a], Objective::PrincipalUtility).value;
        }
        run.logs.push_back(std::move(log));
    }

    const auto best = std::max_element(run.report.arm_benchmarks.begin(),
                                       run.report.arm_benchmarks.end());
    run.report.best_arm = static_cast<int>(best - run.report.arm_benchmarks.begin());
    run.report.best_benchmark = *best;
    run.report.regret = run.report.best_benchmark - run.report.cum_reward;
    run.report.avg_regret = run.report.regret / T;
    return run;
}

std::string round_logs_csv(const std::vector<RoundLog>& logs) {
    std::ostringstream os;
    os << "t,sigma_iota,sigma_kappa,sigma_sign,eps_t,reward,cum_reward\n";
    double cum = 0.0;
    for (const auto& log : logs) {
        cum += log.reward;
        os << log.t << ',' << log.sigma.iota << ',' << log.sigma.kappa << ','
           << (log.sigma.sign == CriticalSign::Plus ? '+' : '-') << ','
           << io::fmt_sig(log.eps_t) << ',' << io::fmt_sig(log.reward) << ','
           << io::fmt_sig(cum) << '\n';
    }
    return os.str();
}

std::string regret_report_text(const RegretReport& report,
                               const std::vector<CriticalIndex>& arms) {
    std::ostringstream os;
    os << "rounds benchmark: best fixed critical arm at eps=" << io::fmt_sig(report.eps_bench)
       << "\n";
    os << "note: the fixed-vector supremum is approached, not attained; the best fixed arm\n"
          "bounds it up to the 2.n.eps slack of the critical approximation.\n";
    for (std::size_t a = 0; a < arms.size(); ++a) {
        os << "arm (" << arms[a].iota << "," << arms[a].kappa << ","
           << (arms[a].sign == CriticalSign::Plus ? '+' : '-')
           << ") cumulative value " << io::fmt_sig(report.arm_benchmarks[a]) << "\n";
    }
    os << "best arm index " << report.best_arm << " cumulative "
       << io::fmt_sig(report.best_benchmark) << "\n";
    os << "learner cumulative reward " << io::fmt_sig(report.cum_reward) << "\n";
    os << "regret " << io::fmt_sig(report.regret) << " (" << io::fmt_sig(report.avg_regret)
       << " per round)\n";
    return os.str();
}

}  // namespace audit
