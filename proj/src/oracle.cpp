#include "audit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace audit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Flattened per-game constants so a grid node costs no allocation:
//   misreport term of (i,k): mis_base[i*m+k] + p_k * mis_coef[k]
//   truthful term of i:      tru_base[i] - p_i * lam
// with the k == i special case (no penalty on an audited truthful report)
// handled inline.
struct EvalCtx {
    int m = 0;
    double n = 1.0, lam = 0.0;
    const AuditGame* g = nullptr;
    std::vector<double> mis_base, mis_coef, tru_base;

    static EvalCtx build(const AuditGame& g, Objective obj) {
        EvalCtx c;
        c.m = g.m;
        c.n = g.n;
        c.lam = g.eval_lambda();
        c.g = &g;
        c.mis_base.resize(static_cast<std::size_t>(g.m) * g.m);
        c.mis_coef.resize(g.m);
        c.tru_base.resize(g.m);
        for (int k = 0; k < g.m; ++k) {
            c.mis_coef[k] =
                obj == Objective::PrincipalUtility ? g.pen[k] - c.lam : -c.lam;
        }
        for (int i = 0; i < g.m; ++i) {
            c.tru_base[i] = obj == Objective::PrincipalUtility
                                ? g.val_at(i, i) - g.pay[i]
                                : g.val_at(i, i);
            for (int k = 0; k < g.m; ++k) {
                c.mis_base[static_cast<std::size_t>(i) * g.m + k] =
                    obj == Objective::PrincipalUtility ? g.val_at(i, k) - g.pay[k]
                                                       : g.val_at(i, k);
            }
        }
        return c;
    }
};

// Same branch structure as evaluate_worst / evaluate_best, without the
// summary and witness machinery.
template <bool kWorst>
double eval_point(const EvalCtx& c, const double* p) {
    const AuditGame& g = *c.g;
    const int m = c.m;
    double uhat_arr[64];
    double* uh = m <= 64 ? uhat_arr : nullptr;
    std::vector<double> uh_heap;
    if (!uh) {
        uh_heap.resize(m);
        uh = uh_heap.data();
    }
    double u_hat = -kInf;
    for (int k = 0; k < m; ++k) {
        uh[k] = g.pay[k] - p[k] * g.pen[k];
        u_hat = std::max(u_hat, uh[k]);
    }
    const double hi = u_hat + kTieTol, lo = u_hat - kTieTol;

    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const double v_truth = c.tru_base[i] - p[i] * c.lam;
        if (g.pay[i] > hi) {
            total += g.q[i] * v_truth;
            continue;
        }
        double v_mis = kWorst ? kInf : -kInf;
        const double* row = &c.mis_base[static_cast<std::size_t>(i) * m];
        for (int k = 0; k < m; ++k) {
            if (uh[k] < lo) continue;  // outside the misreport range
            const double coef = (k == i) ? -c.lam : c.mis_coef[k];
            const double t = row[k] + p[k] * coef;
            if (kWorst ? t < v_mis : t > v_mis) v_mis = t;
        }
        if (g.pay[i] < lo) {
            total += g.q[i] * v_mis;
        } else {
            total += g.q[i] * (kWorst ? std::min(v_truth, v_mis) : std::max(v_truth, v_mis));
        }
    }
    return c.n * total;
}

struct ScanResult {
    double best = -kInf;
    std::size_t best_idx = 0;
    double slack = 0.0;
};

// Walks linear indices [lo, hi) of the N^m grid in lexicographic order
// (axis 0 outermost). Axis-adjacent jumps are read from a ring buffer of
// the last N^(m-1) values; when lo > 0 the scan starts one full plane
// early to seed it, recording nothing for those warm-up nodes.
ScanResult scan_range(const EvalCtx& c, const std::vector<double>& coord, int m,
                      std::size_t lo, std::size_t hi, bool worst) {
    const std::size_t N = coord.size();
    std::size_t ring_size = 1;
    for (int a = 0; a < m - 1; ++a) ring_size *= N;
    std::vector<double> ring(ring_size, 0.0);

    std::size_t strides[16];
    strides[m - 1] = 1;
    for (int a = m - 2; a >= 0; --a) strides[a] = strides[a + 1] * N;

    const std::size_t warm = lo >= ring_size ? lo - ring_size : 0;
    std::vector<std::size_t> idx(m, 0);
    {
        std::size_t rem = warm;
        for (int a = 0; a < m; ++a) {
            idx[a] = rem / strides[a];
            rem %= strides[a];
        }
    }
    std::vector<double> p(m);
    for (int a = 0; a < m; ++a) p[a] = coord[idx[a]];

    ScanResult res;
    for (std::size_t pos = warm; pos < hi; ++pos) {
        const double v = worst ? eval_point<true>(c, p.data()) : eval_point<false>(c, p.data());
        if (pos >= lo) {
            if (v > res.best || (v == res.best && pos < res.best_idx)) {
                res.best = v;
                res.best_idx = pos;
            }
            for (int a = 0; a < m; ++a) {
                if (idx[a] == 0) continue;
                if (pos - strides[a] < warm) continue;  // neighbor not computed here
                const double prev = ring[(pos - strides[a]) % ring_size];
                res.slack = std::max(res.slack, std::abs(v - prev));
            }
        }
        ring[pos % ring_size] = v;
        // odometer increment
        for (int a = m - 1; a >= 0; --a) {
            if (++idx[a] < N) {
                p[a] = coord[idx[a]];
                break;
            }
            idx[a] = 0;
            p[a] = coord[0];
        }
    }
    return res;
}

GridResult grid_run(const AuditGame& g, Objective obj, const GridSpec& grid, GridMode mode,
                    bool parallel) {
    require_valid(g);
    if (!(grid.step > 0.0)) throw std::invalid_argument("grid_best: step must be positive");
    if (g.m > 4 && !grid.force)
        throw std::invalid_argument("grid_best: refusing m > 4 without force");
    if (g.m > 16) throw std::invalid_argument("grid_best: m too large for a grid oracle");

    const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid.step));
    const std::size_t N = steps + 1;
    double cells_d = 1.0;
    for (int a = 0; a < g.m; ++a) cells_d *= static_cast<double>(N);
    if (cells_d > static_cast<double>(grid.cell_cap)) {
        throw std::invalid_argument(
            "grid_best: grid has " + std::to_string(cells_d) + " cells, above the cap of " +
            std::to_string(grid.cell_cap) + "; coarsen the step or raise the cap");
    }
    const auto cells = static_cast<std::size_t>(cells_d);

    std::vector<double> coord(N);
    for (std::size_t j = 0; j < N; ++j) coord[j] = std::min(1.0, j * grid.step);
    coord[N - 1] = std::min(coord[N - 1], 1.0);

    const EvalCtx ctx = EvalCtx::build(g, obj);
    const bool worst = mode == GridMode::Worst;

    ScanResult total;
#ifdef _OPENMP
    if (parallel) {
        const std::size_t plane = cells / N;
        const int nthreads = omp_get_max_threads();
#pragma omp parallel num_threads(nthreads)
        {
            const int tid = omp_get_thread_num();
            const int nt = omp_get_num_threads();
            // Split along axis 0 so each thread owns whole planes.
            const std::size_t lo_plane = (N * static_cast<std::size_t>(tid)) / nt;
            const std::size_t hi_plane = (N * static_cast<std::size_t>(tid + 1)) / nt;
            ScanResult local;
            if (lo_plane < hi_plane)
                local = scan_range(ctx, coord, g.m, lo_plane * plane, hi_plane * plane, worst);
#pragma omp critical
            {
                if (lo_plane < hi_plane) {
                    if (local.best > total.best ||
                        (local.best == total.best && local.best_idx < total.best_idx)) {
                        total.best = local.best;
                        total.best_idx = local.best_idx;
                    }
                    total.slack = std::max(total.slack, local.slack);
                }
            }
        }
    } else
#endif
    {
        (void)parallel;
        total = scan_range(ctx, coord, g.m, 0, cells, worst);
    }

    GridResult out;
    out.value = total.best;
    out.slack = total.slack;
    out.cells = cells;
    out.p_at.resize(g.m);
    std::size_t rem = total.best_idx;
    for (int a = g.m - 1; a >= 0; --a) {
        out.p_at[a] = coord[rem % N];
        rem /= N;
    }
    return out;
}

}  // namespace

GridResult grid_best(const AuditGame& g, Objective obj, const GridSpec& grid, GridMode mode) {
    return grid_run(g, obj, grid, mode, true);
}

GridResult grid_best_serial(const AuditGame& g, Objective obj, const GridSpec& grid,
                            GridMode mode) {
    return grid_run(g, obj, grid, mode, false);
}

std::vector<std::vector<int>> enumerate_equilibria(const AuditGame& g, const AuditVector& p,
                                                   std::size_t max_count) {
    require_audit_vector(g, p);
    // Pure best responses straight from the utility definition, with no
    // use of the summary machinery.
    std::vector<std::vector<int>> br(g.m);
    for (int i = 0; i < g.m; ++i) {
        double best = -kInf;
        std::vector<double> util(g.m);
        for (int k = 0; k < g.m; ++k) {
            util[k] = (k == i) ? g.pay[i] : g.pay[k] - p[k] * g.pen[k];
            best = std::max(best, util[k]);
        }
        for (int k = 0; k < g.m; ++k) {
            if (util[k] >= best - kTieTol) br[i].push_back(k);
        }
    }

    double combos = 1.0;
    for (int i = 0; i < g.m; ++i) combos *= static_cast<double>(br[i].size());
    if (combos > static_cast<double>(max_count))
        throw std::invalid_argument("enumerate_equilibria: " + std::to_string(combos) +
                                    " extreme equilibria exceed the cap of " +
                                    std::to_string(max_count));

    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(combos));
    std::vector<std::size_t> pick(g.m, 0);
    while (true) {
        std::vector<int> reports(g.m);
        for (int i = 0; i < g.m; ++i) reports[i] = br[i][pick[i]];
        out.push_back(std::move(reports));
        int a = g.m - 1;
        while (a >= 0 && ++pick[a] == br[a].size()) pick[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

ReportStrategy pure_strategy(int m, const std::vector<int>& reports) {
    std::vector<double> matrix(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) matrix[static_cast<std::size_t>(i) * m + reports[i]] = 1.0;
    return ReportStrategy::dense(m, std::move(matrix));
}

}  // namespace audit
