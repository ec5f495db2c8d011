#include "audit/game.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace audit {

namespace {

// Absolute slack for the inequality checks; admits games assembled in
// floating point (e.g. discretized ones).
constexpr double kValidationTol = 1e-12;

std::string idx2(const char* name, int a, int b) {
    std::ostringstream os;
    os << name << "(" << a << "," << b << ")";
    return os.str();
}

}  // namespace

double AuditGame::gamma() const {
    double g = pay.empty() ? 0.0 : pay[0];
    for (int k = 1; k < m; ++k) g = std::min(g, pay[k] - pay[k - 1]);
    return g;
}

InsensitivityFlag insensitivity_flag(const AuditGame& g) {
    for (int k = 0; k < g.m; ++k) {
        for (int l = k; l < g.m; ++l) {
            if (g.pay[l] * g.pen[k] < g.pen[l] * g.pay[k] - kValidationTol) {
                return {false, k, l};
            }
        }
    }
    return {true, -1, -1};
}

std::vector<std::string> validate_game(const AuditGame& g) {
    std::vector<std::string> out;
    auto bad = [&out](const std::string& msg) { out.push_back(msg); };

    if (g.m < 2) bad("m must be at least 2");
    if (!(g.n >= 0.0) || !std::isfinite(g.n)) bad("n must be a nonnegative real");
    const auto m = static_cast<std::size_t>(std::max(g.m, 0));
    if (g.q.size() != m) bad("q must have length m");
    if (g.pay.size() != m) bad("pay must have length m");
    if (g.pen.size() != m) bad("pen must have length m");
    if (g.val.size() != m * m) bad("val must be an m x m matrix");
    if (!out.empty()) return out;  // shape errors make index checks meaningless

    double qsum = 0.0;
    for (int i = 0; i < g.m; ++i) {
        qsum += g.q[i];
        if (!(g.q[i] > 0.0)) bad("q(" + std::to_string(i) + ") must be positive (full support)");
    }
    if (std::abs(qsum - 1.0) > 1e-9) bad("q must sum to 1");

    if (!(g.pay[0] > 0.0)) bad("pay(0) must be positive");
    for (int k = 1; k < g.m; ++k) {
        if (!(g.pay[k] > g.pay[k - 1]))
            bad("pay must be strictly increasing at k=" + std::to_string(k));
    }

    for (int i = 0; i < g.m; ++i) {
        for (int k = i; k < g.m; ++k) {
            for (int l = k; l < g.m; ++l) {
                if (g.val_at(i, k) < g.val_at(i, l) - kValidationTol) {
                    bad("misreporting higher must not raise value: " + idx2("val", i, k) +
                        " < " + idx2("val", i, l));
                }
            }
        }
    }

    for (int k = 0; k < g.m; ++k) {
        if (g.pen[k] < g.pay[k] - kValidationTol)
            bad("pen(" + std::to_string(k) + ") < pay(" + std::to_string(k) + ")");
    }

    if (g.regime.kind == RegimeKind::Costly) {
        if (!(g.regime.lambda >= 0.0)) bad("lambda must be nonnegative");
        for (int k = 0; k < g.m; ++k) {
            if (g.regime.lambda > g.pen[k] + kValidationTol)
                bad("lambda exceeds pen(" + std::to_string(k) + ")");
        }
    } else {
        if (!(g.regime.budget >= 0.0)) bad("budget must be nonnegative");
    }

    return out;
}

void require_valid(const AuditGame& g) {
    auto v = validate_game(g);
    if (v.empty()) return;
    std::ostringstream os;
    os << "invalid game:";
    for (const auto& msg : v) os << "\n  " << msg;
    throw std::invalid_argument(os.str());
}

AuditGame discretize(const ContinuousModelSpec& spec) {
    if (spec.m < 2) throw std::invalid_argument("discretize: m must be at least 2");
    if (!(spec.c0 > 0.0)) throw std::invalid_argument("discretize: c0 must be positive");
    if (spec.c1 < 0.0 || spec.pen_offset < 0.0 || spec.a2 < 0.0)
        throw std::invalid_argument("discretize: c1, pen_offset, and a2 must be nonnegative");

    const int m = spec.m;
    AuditGame g;
    g.n = 1.0;
    g.m = m;
    g.regime = Regime::costly(spec.lambda);
    g.q.assign(m, 1.0 / m);
    g.pay.resize(m);
    g.pen.resize(m);
    g.val.resize(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        const double x = (2.0 * i + 1.0) / (2.0 * m);
        g.pay[i] = spec.c0 + spec.c1 * x;
        g.pen[i] = g.pay[i] + spec.pen_offset;
        const double base = spec.a0 + spec.a1 * x;
        for (int k = 0; k < m; ++k) {
            const double dist = (i == k) ? 1.0 / (3.0 * m) : std::abs(i - k) / double(m);
            g.val[static_cast<std::size_t>(i) * m + k] = base - spec.a2 * dist;
        }
    }

    auto violations = validate_game(g);
    if (!violations.empty()) {
        std::ostringstream os;
        os << "discretize: resulting game is invalid:";
        for (const auto& v : violations) os << "\n  " << v;
        throw std::invalid_argument(os.str());
    }
    return g;
}

AuditGame fig1_game() {
    AuditGame g;
    g.n = 1.0;
    g.m = 2;
    g.q = {0.5, 0.5};
    g.pay = {1.0, 2.0};
    g.pen = {3.0, 4.0};
    g.val = {3.0, 0.0, 0.0, 4.0};
    g.regime = Regime::costly(1.0);
    return g;
}

AuditGame heatmap_game(const std::vector<double>& prior) {
    AuditGame g;
    g.n = 1.0;
    g.m = 3;
    g.q = prior;
    g.pay = {0.3, 0.8, 1.3};
    g.pen = {1.0, 1.2, 1.4};
    g.val = {0.5, 0.0, 0.0, 0.0, 1.4, 0.0, 0.0, 0.0, 3.0};
    g.regime = Regime::costly(0.7);
    return g;
}

AuditGame random_game(int m, std::uint64_t seed, const RandomGameOptions& opt) {
    if (m < 2) throw std::invalid_argument("random_game: m must be at least 2");
    std::mt19937_64 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    AuditGame g;
    g.m = m;
    g.n = 1.0;

    g.pay.resize(m);
    g.pay[0] = uni(0.5, 1.5);
    for (int k = 1; k < m; ++k) g.pay[k] = g.pay[k - 1] + uni(0.3, 1.2);

    g.pen.resize(m);
    if (opt.insensitive) {
        // pen = a * pay + b keeps pay(l)/pay(k) >= pen(l)/pen(k).
        const double a = uni(1.0, 2.0), b = uni(0.0, 1.0);
        for (int k = 0; k < m; ++k) g.pen[k] = a * g.pay[k] + b;
    } else {
        for (int k = 0; k < m; ++k) g.pen[k] = g.pay[k] + uni(0.1, 2.0);
    }

    g.q.resize(m);
    double qsum = 0.0;
    for (int i = 0; i < m; ++i) qsum += (g.q[i] = uni(0.05, 1.0));
    for (int i = 0; i < m; ++i) g.q[i] /= qsum;

    g.val.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        double v = uni(1.0, 5.0);
        g.val[static_cast<std::size_t>(i) * m + i] = v;
        for (int k = i + 1; k < m; ++k) {
            v -= uni(0.0, 1.5);
            g.val[static_cast<std::size_t>(i) * m + k] = v;
        }
        for (int k = 0; k < i; ++k) g.val[static_cast<std::size_t>(i) * m + k] = uni(0.0, 3.0);
    }

    double pen_min = g.pen[0];
    for (int k = 1; k < m; ++k) pen_min = std::min(pen_min, g.pen[k]);
    if (opt.regime == RegimeKind::Costly) {
        g.regime = Regime::costly(uni(0.0, 0.8) * pen_min);
    } else {
        g.regime = Regime::budgeted(uni(0.0, 1.0));
    }

    require_valid(g);
    return g;
}

}  // namespace audit
