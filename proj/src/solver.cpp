#include "audit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace audit {

bool operator==(const CriticalIndex& a, const CriticalIndex& b) {
    return a.iota == b.iota && a.kappa == b.kappa && a.sign == b.sign;
}

std::vector<CriticalIndex> critical_set(int m) {
    std::vector<CriticalIndex> out;
    out.reserve(static_cast<std::size_t>(m) * (m + 1));
    for (int i = 0; i < m; ++i) {
        for (int k = i; k < m; ++k) {
            out.push_back({i, k, CriticalSign::Plus});
            out.push_back({i, k, CriticalSign::Minus});
        }
    }
    return out;
}

double eps_upper_bound(const AuditGame& g) { return g.gamma() / 3.0; }

AuditVector equalized_vector(const AuditGame& g, double u, const std::vector<int>& A,
                             double eps) {
    const double pay_max = g.pay[g.m - 1];
    if (!(u > 0.0 && u <= pay_max))
        throw std::invalid_argument("equalized_vector: need 0 < u <= max pay");
    // eps == u is allowed so the lowest Plus template (level pay(-1)+eps)
    // stays constructible; rho(u - eps) = rho(0) = pay/pen <= 1 there.
    if (!(eps > 0.0 && eps <= u))
        throw std::invalid_argument("equalized_vector: need 0 < eps <= u");
    int iota = g.m;
    for (int i = 0; i < g.m; ++i) {
        if (g.pay[i] >= u) {
            iota = i;
            break;
        }
    }
    if (A.empty()) throw std::invalid_argument("equalized_vector: A must be nonempty");
    for (int k : A) {
        if (k < iota || k >= g.m)
            throw std::invalid_argument("equalized_vector: A must lie in {k : pay(k) >= u}");
    }

    AuditVector p(g.m, 0.0);
    for (int k = iota; k < g.m; ++k) {
        const bool in_a = std::find(A.begin(), A.end(), k) != A.end();
        p[k] = rho(g, k, in_a ? u : u - eps);
    }
    return p;
}

AuditVector critical_vector(const AuditGame& g, const CriticalIndex& idx, double eps) {
    if (idx.iota < 0 || idx.kappa < idx.iota || idx.kappa >= g.m)
        throw std::invalid_argument("critical_vector: need 0 <= iota <= kappa < m");
    if (!(eps > 0.0 && eps <= eps_upper_bound(g)))
        throw std::invalid_argument("critical_vector: need 0 < eps <= gamma/3");
    const double u = idx.sign == CriticalSign::Plus ? g.pay_at(idx.iota - 1) + eps
                                                    : g.pay[idx.iota] - eps;
    return equalized_vector(g, u, {idx.kappa}, eps);
}

FastTables FastTables::build(const AuditGame& g) {
    FastTables t;
    t.m = g.m;
    const int m = g.m;
    t.F.assign(m + 1, 0.0);
    t.H.assign(m + 1, 0.0);
    t.Hw.assign(m + 1, 0.0);
    t.Spay.assign(m + 1, 0.0);
    t.Sinv.assign(m + 1, 0.0);
    t.M.assign(static_cast<std::size_t>(m + 1) * m, 0.0);
    for (int i = 1; i <= m; ++i) t.F[i] = t.F[i - 1] + g.q[i - 1];
    for (int i = m - 1; i >= 0; --i) {
        t.H[i] = t.H[i + 1] + g.q[i] * (g.val_at(i, i) - g.pay[i]);
        t.Hw[i] = t.Hw[i + 1] + g.q[i] * g.val_at(i, i);
        t.Spay[i] = t.Spay[i + 1] + g.q[i] * g.pay[i] / g.pen[i];
        t.Sinv[i] = t.Sinv[i + 1] + g.q[i] / g.pen[i];
    }
    for (int k = 0; k < m; ++k) {
        for (int i = 1; i <= m; ++i) {
            t.M[static_cast<std::size_t>(i) * m + k] =
                t.M[static_cast<std::size_t>(i - 1) * m + k] + g.q[i - 1] * g.val_at(i - 1, k);
        }
    }
    return t;
}

// Evaluation in O(1) per template. A critical vector is strict and has the
// singleton misreport range {kappa}, so its unique equilibrium is the
// single-minded one: types below iota report kappa, the rest are truthful
// at levels u (kappa) and u - eps (others), with u - eps = c below.
double fast_compute_val(const AuditGame& g, const CriticalIndex& idx, double eps,
                        const FastTables& t, Objective obj) {
    const int i = idx.iota, k = idx.kappa;
    const double lam = g.eval_lambda();
    const double c =
        idx.sign == CriticalSign::Plus ? g.pay_at(i - 1) : g.pay[i] - 2.0 * eps;
    const double u_hat = c + eps;
    const double p_k = (g.pay[k] - u_hat) / g.pen[k];
    // Expected audits over truthful types: p_j = (pay(j) - c)/pen(j) for
    // j >= i, corrected by eps/pen(k) on the equalized report.
    const double audits_truth = (t.Spay[i] - c * t.Sinv[i]) - g.q[k] * eps / g.pen[k];
    if (obj == Objective::PrincipalUtility) {
        return g.n * (t.m_at(i, k) - g.pay[k] * t.F[i] + (g.pen[k] - lam) * p_k * t.F[i] +
                      t.H[i] - lam * audits_truth);
    }
    return g.n * (t.m_at(i, k) - lam * p_k * t.F[i] + t.Hw[i] - lam * audits_truth);
}

namespace {

SolverResult finalize_result(const AuditGame& g, Objective obj, double eps,
                             const CriticalIndex& best) {
    SolverResult r;
    r.critical = best;
    r.epsilon = eps;
    r.p_star = critical_vector(g, best, eps);
    Evaluation e = evaluate_worst(g, r.p_star, obj);
    r.value = e.value;
    r.witness = std::move(e.witness);
    return r;
}

void check_search_preconditions(const AuditGame& g, double eps) {
    require_valid(g);
    if (g.regime.kind != RegimeKind::Costly)
        throw std::invalid_argument("succinct search requires the costly regime");
    if (!(eps > 0.0 && eps <= eps_upper_bound(g)))
        throw std::invalid_argument("succinct search: need 0 < eps <= gamma/3");
}

}  // namespace

SolverResult succinct_search(const AuditGame& g, Objective obj, double eps) {
    check_search_preconditions(g, eps);
    const FastTables tables = FastTables::build(g);
    const std::vector<CriticalIndex> arms = critical_set(g.m);
    const auto count = static_cast<std::ptrdiff_t>(arms.size());

    double best_v = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t best_idx = 0;
#ifdef _OPENMP
#pragma omp parallel
    {
        double local_v = -std::numeric_limits<double>::infinity();
        std::ptrdiff_t local_idx = 0;
#pragma omp for nowait
        for (std::ptrdiff_t a = 0; a < count; ++a) {
            const double v = fast_compute_val(g, arms[a], eps, tables, obj);
            if (v > local_v || (v == local_v && a < local_idx)) {
                local_v = v;
                local_idx = a;
            }
        }
#pragma omp critical
        {
            if (local_v > best_v || (local_v == best_v && local_idx < best_idx)) {
                best_v = local_v;
                best_idx = local_idx;
            }
        }
    }
#else
    for (std::ptrdiff_t a = 0; a < count; ++a) {
        const double v = fast_compute_val(g, arms[a], eps, tables, obj);
        if (v > best_v) {
            best_v = v;
            best_idx = a;
        }
    }
#endif
    return finalize_result(g, obj, eps, arms[best_idx]);
}

SolverResult succinct_search_reference(const AuditGame& g, Objective obj, double eps) {
    check_search_preconditions(g, eps);
    const std::vector<CriticalIndex> arms = critical_set(g.m);
    double best_v = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t a = 0; a < arms.size(); ++a) {
        const AuditVector p = critical_vector(g, arms[a], eps);
        const double v = evaluate_worst(g, p, obj).value;
        if (v > best_v) {
            best_v = v;
            best_idx = a;
        }
    }
    return finalize_result(g, obj, eps, arms[best_idx]);
}

std::pair<AuditGame, AuditVector> monotone_transform(const AuditGame& g, const AuditVector& p,
                                                     const std::vector<double>& pen_new) {
    require_audit_vector(g, p);
    if (static_cast<int>(pen_new.size()) != g.m)
        throw std::invalid_argument("monotone_transform: pen_new must have length m");
    for (int k = 0; k < g.m; ++k) {
        if (pen_new[k] < g.pen[k])
            throw std::invalid_argument("monotone_transform: pen_new(" + std::to_string(k) +
                                        ") below pen");
    }
    AuditGame g2 = g;
    g2.pen = pen_new;
    AuditVector p2(g.m);
    for (int k = 0; k < g.m; ++k) p2[k] = p[k] * (g.pen[k] / pen_new[k]);
    return {std::move(g2), std::move(p2)};
}

}  // namespace audit
