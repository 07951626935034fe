#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "matcher_internal.hpp"
#include "mbm/exact_matcher.hpp"

namespace mbm::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Reduced costs this far below zero trigger an edge repair round; anything
// smaller is floating-point dribble from the potential updates.
constexpr double kCertTol = 1e-11;

double point_distance(const double* p, const double* q, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        const double t = p[k] - q[k];
        s += t * t;
    }
    return std::sqrt(s);
}

// Uniform bucket grid over the column points, CSR layout.
struct Grid {
    int dim = 0;
    int cpa = 0;  // cells per axis
    std::vector<int> start, items;
    bool ok = false;
};

Grid build_grid(const double* b, int nb, int dim) {
    Grid g;
    g.dim = dim;
    int cpa = static_cast<int>(std::floor(std::pow(nb / 2.0, 1.0 / dim)));
    std::int64_t cells = 0;
    for (; cpa >= 2; --cpa) {
        cells = 1;
        for (int a = 0; a < dim && cells <= 8LL * nb + 64; ++a) cells *= cpa;
        if (cells <= 8LL * nb + 64) break;
    }
    if (cpa < 2) return g;
    g.cpa = cpa;

    auto cell_of = [&](const double* p) {
        std::int64_t idx = 0, stride = 1;
        for (int a = 0; a < dim; ++a) {
            const int ia = std::min(static_cast<int>(p[a] * cpa), cpa - 1);
            idx += stride * ia;
            stride *= cpa;
        }
        return idx;
    };

    g.start.assign(static_cast<std::size_t>(cells) + 1, 0);
    for (int j = 0; j < nb; ++j)
        ++g.start[cell_of(b + static_cast<std::size_t>(j) * dim) + 1];
    for (std::size_t c = 1; c < g.start.size(); ++c) g.start[c] += g.start[c - 1];
    g.items.resize(nb);
    std::vector<int> fill(g.start.begin(), g.start.end() - 1);
    for (int j = 0; j < nb; ++j)
        g.items[fill[cell_of(b + static_cast<std::size_t>(j) * dim)]++] = j;
    g.ok = true;
    return g;
}

// Append the columns of every cell at Chebyshev distance exactly `shell` from
// the center cell. Returns false once no larger shell can exist.
bool gather_shell(const Grid& g, const int* center, int shell, std::vector<int>& out) {
    const int dim = g.dim;
    const int cpa = g.cpa;
    std::vector<int> lo(dim), hi(dim), pos(dim);
    for (int a = 0; a < dim; ++a) {
        lo[a] = std::max(0, center[a] - shell);
        hi[a] = std::min(cpa - 1, center[a] + shell);
        pos[a] = lo[a];
    }
    while (true) {
        int cheb = 0;
        std::int64_t idx = 0, stride = 1;
        for (int a = 0; a < dim; ++a) {
            cheb = std::max(cheb, std::abs(pos[a] - center[a]));
            idx += stride * pos[a];
            stride *= cpa;
        }
        if (cheb == shell) {
            for (int t = g.start[idx]; t < g.start[idx + 1]; ++t) out.push_back(g.items[t]);
        }
        int a = 0;
        for (; a < dim; ++a) {
            if (++pos[a] <= hi[a]) break;
            pos[a] = lo[a];
        }
        if (a == dim) break;
    }
    for (int a = 0; a < dim; ++a)
        if (center[a] - shell > 0 || center[a] + shell < cpa - 1) return true;
    return false;
}

// Restricted assignment problem state: candidate edge lists, duals, matching,
// and the shortest-path workspace. Augmentation is exact on the edge lists;
// global optimality is established afterwards by the reduced-cost scan.
struct SparseAssign {
    int na = 0, nb = 0;
    std::vector<std::vector<int>> col;      // candidate columns per row
    std::vector<std::vector<double>> cost;  // parallel costs
    std::vector<double> u, v;
    std::vector<int> row_to_col, col_to_row;

    // shortest-path workspace
    std::vector<double> dist;
    std::vector<int> parent, stamp, popped;
    std::vector<char> done;
    int round = 0;

    void reset_state() {
        u.assign(na, 0.0);
        v.assign(nb, 0.0);
        row_to_col.assign(na, -1);
        col_to_row.assign(nb, -1);
    }

    // Greedy row reduction + augmenting row reduction; returns rows left free.
    std::vector<int> reduction_passes() {
        std::vector<int> contested;
        for (int i = 0; i < na; ++i) {
            double best = kInf;
            int jb = -1;
            for (std::size_t t = 0; t < col[i].size(); ++t) {
                if (cost[i][t] < best) {
                    best = cost[i][t];
                    jb = col[i][t];
                }
            }
            u[i] = best;
            if (jb != -1 && col_to_row[jb] == -1) {
                col_to_row[jb] = i;
                row_to_col[i] = jb;
            } else {
                contested.push_back(i);
            }
        }

        std::vector<int> free_rows;
        std::vector<int> queue = std::move(contested);
        long pops_left = 3L * na + 64;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int i = queue[qi];
            if (col[i].empty()) {
                free_rows.push_back(i);
                continue;
            }
            if (pops_left-- <= 0) {
                free_rows.insert(free_rows.end(), queue.begin() + qi, queue.end());
                break;
            }
            double u1 = kInf, u2 = kInf;
            int j1 = -1;
            for (std::size_t t = 0; t < col[i].size(); ++t) {
                const double r = cost[i][t] - v[col[i][t]];
                if (r < u1) {
                    u2 = u1;
                    u1 = r;
                    j1 = col[i][t];
                } else if (r < u2) {
                    u2 = r;
                }
            }
            if (u2 == kInf) u2 = u1;
            u[i] = u2;
            const int owner = col_to_row[j1];
            if (u1 < u2) {
                v[j1] -= u2 - u1;
            } else if (owner != -1) {
                free_rows.push_back(i);
                continue;
            }
            col_to_row[j1] = i;
            row_to_col[i] = j1;
            if (owner != -1) {
                row_to_col[owner] = -1;
                queue.push_back(owner);
            }
        }
        return free_rows;
    }

    // Shortest augmenting path for one free row. Free columns never enter the
    // heap; the cheapest free label seen so far both terminates the search and
    // prunes every relaxation at or beyond it.
    bool augment(int r) {
        ++round;
        popped.clear();
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                            std::greater<>>
            heap;
        double best_free = kInf;
        int best_free_col = -1;

        auto relax = [&](int j, double nd, int from_col) {
            if (nd >= best_free) return;
            if (col_to_row[j] == -1) {
                best_free = nd;
                best_free_col = j;
                if (stamp[j] != round) stamp[j] = round;
                parent[j] = from_col;
                return;
            }
            if (stamp[j] != round) {
                stamp[j] = round;
                dist[j] = kInf;
                done[j] = 0;
            }
            if (!done[j] && nd < dist[j]) {
                dist[j] = nd;
                parent[j] = from_col;
                heap.emplace(nd, j);
            }
        };

        for (std::size_t t = 0; t < col[r].size(); ++t)
            relax(col[r][t], cost[r][t] - u[r] - v[col[r][t]], -1);

        while (!heap.empty() && heap.top().first < best_free) {
            const auto [dj, j] = heap.top();
            heap.pop();
            if (stamp[j] != round || done[j] || dj > dist[j]) continue;
            done[j] = 1;
            popped.push_back(j);
            const int i = col_to_row[j];
            for (std::size_t t = 0; t < col[i].size(); ++t) {
                const double nd = std::max(dj + cost[i][t] - u[i] - v[col[i][t]], dj);
                relax(col[i][t], nd, j);
            }
        }
        if (best_free_col == -1) return false;

        const double total = best_free;
        for (const int jj : popped) {
            if (dist[jj] >= total) continue;
            const double delta = total - dist[jj];
            v[jj] -= delta;
            u[col_to_row[jj]] += delta;
        }
        u[r] += total;

        int j = best_free_col;
        while (true) {
            const int pc = parent[j];
            if (pc == -1) {
                col_to_row[j] = r;
                row_to_col[r] = j;
                break;
            }
            const int i = col_to_row[pc];
            col_to_row[j] = i;
            row_to_col[i] = j;
            j = pc;
        }
        return true;
    }

    bool augment_all(const std::vector<int>& rows) {
        for (const int r : rows)
            if (!augment(r)) return false;
        return true;
    }

    bool solve_from_scratch() {
        reset_state();
        dist.assign(nb, kInf);
        parent.assign(nb, -1);
        stamp.assign(nb, -1);
        done.assign(nb, 0);
        round = 0;
        return augment_all(reduction_passes());
    }

    // A matching is optimal only if its columns carry the smallest potentials;
    // warm-started repairs can in principle strand a negative-potential column
    // unmatched, so verify before trusting the result.
    bool column_choice_ok() const {
        if (na == nb) return true;
        double max_matched = -kInf, min_unmatched = kInf;
        for (int j = 0; j < nb; ++j) {
            if (col_to_row[j] != -1)
                max_matched = std::max(max_matched, v[j]);
            else
                min_unmatched = std::min(min_unmatched, v[j]);
        }
        return max_matched <= min_unmatched + kCertTol;
    }
};

// Scan every pair for negative reduced cost; add violated edges to the lists
// and collect the affected rows. Empty result means globally optimal.
template <int D>
std::vector<int> certify_and_grow(const double* a, const double* b, int dim, SparseAssign& s) {
    std::vector<int> touched;
    double max_v = -kInf;
    for (int j = 0; j < s.nb; ++j) max_v = std::max(max_v, s.v[j]);
    for (int i = 0; i < s.na; ++i) {
        const double* p = a + static_cast<std::size_t>(i) * (D > 0 ? D : dim);
        const double ui = s.u[i];
        // A violation needs dist < u[i] + v[j] - tol, so rows and pairs whose
        // dual budget cannot exceed zero are certified without a sqrt.
        if (ui + max_v <= kCertTol) continue;
        bool grew = false;
        for (int j = 0; j < s.nb; ++j) {
            const double thr = ui + s.v[j] - kCertTol;
            if (thr <= 0.0) continue;
            const double* q = b + static_cast<std::size_t>(j) * (D > 0 ? D : dim);
            double sq = 0.0;
            if constexpr (D > 0) {
                for (int k = 0; k < D; ++k) {
                    const double t = p[k] - q[k];
                    sq += t * t;
                }
            } else {
                for (int k = 0; k < dim; ++k) {
                    const double t = p[k] - q[k];
                    sq += t * t;
                }
            }
            if (sq >= thr * thr) continue;
            const double c = std::sqrt(sq);
            if (c - ui - s.v[j] < -kCertTol) {
                auto& cols = s.col[i];
                if (std::find(cols.begin(), cols.end(), j) == cols.end()) {
                    cols.push_back(j);
                    s.cost[i].push_back(c);
                    grew = true;
                }
            }
        }
        if (grew) touched.push_back(i);
    }
    return touched;
}

std::vector<int> certify_dispatch(const double* a, const double* b, int dim, SparseAssign& s) {
    switch (dim) {
        case 2: return certify_and_grow<2>(a, b, dim, s);
        case 3: return certify_and_grow<3>(a, b, dim, s);
        case 4: return certify_and_grow<4>(a, b, dim, s);
        case 5: return certify_and_grow<5>(a, b, dim, s);
        case 6: return certify_and_grow<6>(a, b, dim, s);
        default: return certify_and_grow<0>(a, b, dim, s);
    }
}

}  // namespace

Matching solve_sparse(const PointCloud& x, const PointCloud& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("solve_sparse: dimension mismatch");
    const int n1 = x.size();
    const int n2 = y.size();
    if (n1 == 0 || n2 == 0) return empty_matching(x, y);

    const bool x_is_rows = n1 <= n2;
    const double* a = (x_is_rows ? x : y).coords().data();
    const double* b = (x_is_rows ? y : x).coords().data();
    const int na = std::min(n1, n2);
    const int nb = std::max(n1, n2);
    const int dim = x.dim();

    const Grid g = build_grid(b, nb, dim);
    if (!g.ok) return solve_dense(x, y);

    // Planar matchings carry long transport edges, so the candidate lists need
    // to reach much further in dimension 2.
    const int log_nb = static_cast<int>(std::ceil(std::log2(static_cast<double>(nb))));
    const int k_target = std::min(nb, dim == 2 ? 12 + 6 * log_nb : 12 + 2 * log_nb);

    SparseAssign s;
    s.na = na;
    s.nb = nb;
    s.col.resize(na);
    s.cost.resize(na);
    {
        std::vector<int> center(dim), found;
        for (int i = 0; i < na; ++i) {
            const double* p = a + static_cast<std::size_t>(i) * dim;
            for (int ax = 0; ax < dim; ++ax)
                center[ax] = std::min(static_cast<int>(p[ax] * g.cpa), g.cpa - 1);
            found.clear();
            for (int shell = 0;; ++shell) {
                const bool more = gather_shell(g, center.data(), shell, found);
                if (static_cast<int>(found.size()) >= k_target || !more) break;
            }
            s.col[i].reserve(found.size());
            s.cost[i].reserve(found.size());
            for (const int j : found) {
                s.col[i].push_back(j);
                s.cost[i].push_back(point_distance(p, b + static_cast<std::size_t>(j) * dim, dim));
            }
        }
    }

    // Certify-and-repair loop. A scratch solve leaves every free column at
    // potential zero and every matched one at or below it, so its column
    // choice is sound by construction; only warm repairs can strand a
    // released column, and that taint is cleared by re-solving from scratch
    // on the grown lists rather than abandoning them.
    bool ok = s.solve_from_scratch();
    bool warm_tainted = false;
    for (int repair = 0; ok && repair < 12; ++repair) {
        const std::vector<int> touched = certify_dispatch(a, b, dim, s);
        if (touched.empty()) {
            if (!warm_tainted || s.column_choice_ok())
                return matching_from_rows(x, y, x_is_rows, s.row_to_col);
            ok = s.solve_from_scratch();
            warm_tainted = false;
            continue;
        }
        // Warm repair: release the affected rows, restore their dual
        // feasibility against the grown lists, and re-augment only them.
        if (4 * static_cast<int>(touched.size()) >= na) {
            ok = s.solve_from_scratch();
            warm_tainted = false;
            continue;
        }
        for (const int i : touched) {
            if (s.row_to_col[i] != -1) {
                s.col_to_row[s.row_to_col[i]] = -1;
                s.row_to_col[i] = -1;
            }
            double best = kInf;
            for (std::size_t t = 0; t < s.col[i].size(); ++t)
                best = std::min(best, s.cost[i][t] - s.v[s.col[i][t]]);
            s.u[i] = best;
        }
        ok = s.augment_all(touched);
        warm_tainted = true;
    }
    return solve_dense(x, y);
}

}  // namespace mbm::detail
