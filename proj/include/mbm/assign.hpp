#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mbm {

// Result of a rectangular min-cost assignment. Every row is matched; u/v are
// the dual potentials at termination (an optimality certificate: all reduced
// costs nonnegative, assigned edges tight).
struct AssignResult {
    std::vector<int> row_to_col;
    double cost = 0.0;
    std::vector<double> u, v;
};

// Exact min-cost assignment of n_rows into n_cols (n_rows <= n_cols) with a
// lazy cost oracle. Greedy row reduction, then augmenting row reduction, then
// successive shortest augmenting paths with dual potentials. Costs must be
// finite and nonnegative; no cost matrix is materialized.
template <class CostFn>
AssignResult min_cost_assignment(int n_rows, int n_cols, CostFn&& cost) {
    if (n_rows > n_cols)
        throw std::invalid_argument("min_cost_assignment: n_rows must be <= n_cols");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    AssignResult res;
    res.row_to_col.assign(n_rows, -1);
    res.u.assign(n_rows, 0.0);
    res.v.assign(n_cols, 0.0);
    if (n_rows == 0) return res;

    std::vector<double>& u = res.u;
    std::vector<double>& v = res.v;
    std::vector<int>& row_to_col = res.row_to_col;
    std::vector<int> col_to_row(n_cols, -1);

    // Greedy pass: u[i] = row minimum, claim the argmin column when free.
    std::vector<int> contested;
    for (int i = 0; i < n_rows; ++i) {
        double best = kInf;
        int jb = 0;
        for (int j = 0; j < n_cols; ++j) {
            const double c = cost(i, j);
            if (c < best) {
                best = c;
                jb = j;
            }
        }
        u[i] = best;
        if (col_to_row[jb] == -1) {
            col_to_row[jb] = i;
            row_to_col[i] = jb;
        } else {
            contested.push_back(i);
        }
    }

    // Augmenting row reduction: a contested row either displaces the owner of
    // its best column (paying the second-minimum dual) or, on a tie, is left
    // for the shortest-path phase. Displacements strictly lower v, so the
    // budget is a safeguard, not the usual exit.
    std::vector<int> free_rows;
    {
        std::vector<int> queue = std::move(contested);
        long pops_left = 3L * n_rows + 64;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int i = queue[qi];
            if (pops_left-- <= 0) {
                free_rows.insert(free_rows.end(), queue.begin() + qi, queue.end());
                break;
            }
            double u1 = kInf, u2 = kInf;
            int j1 = 0;
            for (int j = 0; j < n_cols; ++j) {
                const double r = cost(i, j) - v[j];
                if (r < u1) {
                    u2 = u1;
                    u1 = r;
                    j1 = j;
                } else if (r < u2) {
                    u2 = r;
                }
            }
            if (u2 == kInf) u2 = u1;  // single column
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
    }

    // Successive shortest augmenting paths (Dijkstra with potentials) for the
    // remaining free rows. Column n_cols acts as the virtual root.
    if (!free_rows.empty()) {
        const int kRoot = n_cols;
        std::vector<double> minv(n_cols + 1);
        std::vector<int> way(n_cols + 1);
        std::vector<char> used(n_cols + 1);
        std::vector<int> colrow(n_cols + 1);

        for (const int r : free_rows) {
            std::fill(minv.begin(), minv.end(), kInf);
            std::fill(way.begin(), way.end(), kRoot);
            std::fill(used.begin(), used.end(), 0);
            for (int j = 0; j < n_cols; ++j) colrow[j] = col_to_row[j];
            colrow[kRoot] = r;

            int j0 = kRoot;
            do {
                used[j0] = 1;
                const int i0 = colrow[j0];
                double delta = kInf;
                int j_next = -1;
                for (int j = 0; j < n_cols; ++j) {
                    if (used[j]) continue;
                    const double cur = cost(i0, j) - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if (minv[j] < delta) {
                        delta = minv[j];
                        j_next = j;
                    }
                }
                if (j_next == -1)
                    throw std::logic_error("min_cost_assignment: no augmenting path (non-finite cost?)");
                for (int j = 0; j <= n_cols; ++j) {
                    if (used[j]) {
                        u[colrow[j]] += delta;
                        if (j != kRoot) v[j] -= delta;
                    } else {
                        minv[j] -= delta;
                    }
                }
                j0 = j_next;
            } while (colrow[j0] != -1);

            // Augment along the alternating path back to the root.
            while (j0 != kRoot) {
                const int jp = way[j0];
                colrow[j0] = colrow[jp];
                j0 = jp;
            }
            for (int j = 0; j < n_cols; ++j) col_to_row[j] = colrow[j];
        }
        for (int j = 0; j < n_cols; ++j)
            if (col_to_row[j] != -1) row_to_col[col_to_row[j]] = j;
    }

    double sum = 0.0, comp = 0.0;  // Kahan
    for (int i = 0; i < n_rows; ++i) {
        const double t = cost(i, row_to_col[i]) - comp;
        const double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    res.cost = sum;
    return res;
}

}  // namespace mbm
