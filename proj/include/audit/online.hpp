#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "audit/equilibrium.hpp"
#include "audit/game.hpp"
#include "audit/solver.hpp"

namespace audit {

// EXP3 over critical-vector templates. Scores are kept in search order of
// critical_set(m); the sampling distribution is the softmax of eta * score,
// computed shift-stably.
struct LearnerState {
    std::vector<CriticalIndex> arms;
    std::vector<double> scores;
    double eta = 0.0;     // sqrt(log(2 m^2) / (2 m^2 T))
    double reward_bound = 0.0;  // L = n max_{i,k}(val(i,k) + pay(k) + pen(k))
    double eps0 = 0.0;    // gamma / 3
    double eps_t = 0.0;   // current construction epsilon, halved per round
    int t = 0;            // rounds completed
    std::uint64_t seed = 0;
    std::mt19937_64 rng;

    std::vector<double> sampling_distribution() const;
};

// Floor below which eps_t stops halving; keeps every played vector legal.
inline constexpr double kEpsFloor = 1e-9;

// Initializes scores to zero, eps to gamma/3, and the rate and reward
// bound from the game parameters. The prior is never read.
LearnerState learner_init(const AuditGame& game_sans_prior, int T, std::uint64_t seed);

struct RoundLog {
    int t = 0;
    CriticalIndex sigma;
    AuditVector p_played;
    double eps_t = 0.0;
    double reward = 0.0;
    std::vector<double> prior;              // empty unless the runner fills it
    std::optional<std::vector<double>> p_snapshot;  // P_t, gated by flag
};

// One EXP3 round: sample an arm, play its critical vector at eps_t, query
// the reward, apply s_sigma += 1 - (L - v)/(2L) * I[sigma]/P_sigma, halve
// eps (subject to the floor). The oracle receives the played vector and
// must return a reward in [-L, L]; anything else is a contract fault.
RoundLog learner_step(const AuditGame& g, LearnerState& state,
                      const std::function<double(const AuditVector&)>& reward_oracle,
                      bool snapshot_distribution = false);

// Score increment the update assigns to one arm; exposed for direct tests
// of the importance weighting.
double exp3_increment(double reward_bound, double reward, double prob_chosen, bool chosen);

struct RegretReport {
    // Cumulative benchmark value per arm at the fixed construction epsilon.
    std::vector<double> arm_benchmarks;
    double eps_bench = 1e-6;
    int best_arm = 0;
    double best_benchmark = 0.0;
    double cum_reward = 0.0;
    double regret = 0.0;      // best_benchmark - cum_reward
    double avg_regret = 0.0;  // regret / T
};

struct OnlineRun {
    std::vector<RoundLog> logs;
    RegretReport report;
};

// Runs T rounds against the given prior sequence (cycled when shorter than
// T); round t uses prior[(t-1) mod size]. Rewards are worst-case utilities
// under the round prior. Priors must be full-support distributions;
// validation failures abort before round 0. The benchmark is the best
// fixed critical arm at eps_bench, which bounds the fixed-vector supremum
// up to the usual 2 n eps slack.
OnlineRun run_online(const AuditGame& game_template,
                     const std::vector<std::vector<double>>& prior_sequence, int T,
                     std::uint64_t seed, bool snapshot_distribution = false,
                     double eps_bench = 1e-6);

// CSV with columns t, sigma_iota, sigma_kappa, sigma_sign, eps_t, reward,
// cum_reward.
std::string round_logs_csv(const std::vector<RoundLog>& logs);

std::string regret_report_text(const RegretReport& report, const std::vector<CriticalIndex>& arms);

}  // namespace audit
