#include "mbm/exact_matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "matcher_internal.hpp"
#include "mbm/assign.hpp"

namespace mbm {
namespace {

template <int D>
AssignResult assign_fixed_dim(const double* a, int na, const double* b, int nb) {
    return min_cost_assignment(na, nb, [a, b](int i, int j) {
        const double* p = a + static_cast<std::size_t>(i) * D;
        const double* q = b + static_cast<std::size_t>(j) * D;
        double s = 0.0;
        for (int k = 0; k < D; ++k) {
            const double t = p[k] - q[k];
            s += t * t;
        }
        return std::sqrt(s);
    });
}

AssignResult assign_clouds(const double* a, int na, const double* b, int nb, int dim) {
    switch (dim) {
        case 1: return assign_fixed_dim<1>(a, na, b, nb);
        case 2: return assign_fixed_dim<2>(a, na, b, nb);
        case 3: return assign_fixed_dim<3>(a, na, b, nb);
        case 4: return assign_fixed_dim<4>(a, na, b, nb);
        case 5: return assign_fixed_dim<5>(a, na, b, nb);
        case 6: return assign_fixed_dim<6>(a, na, b, nb);
        default:
            return min_cost_assignment(na, nb, [a, b, dim](int i, int j) {
                const double* p = a + static_cast<std::size_t>(i) * dim;
                const double* q = b + static_cast<std::size_t>(j) * dim;
                double s = 0.0;
                for (int k = 0; k < dim; ++k) {
                    const double t = p[k] - q[k];
                    s += t * t;
                }
                return std::sqrt(s);
            });
    }
}

void require_same_dim(const PointCloud& x, const PointCloud& y, const char* who) {
    if (x.dim() != y.dim())
        throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

std::vector<int> complement_of(const std::vector<int>& hit, int n) {
    std::vector<char> seen(n, 0);
    for (const int j : hit) seen[j] = 1;
    std::vector<int> out;
    out.reserve(n - static_cast<int>(hit.size()));
    for (int j = 0; j < n; ++j)
        if (!seen[j]) out.push_back(j);
    return out;
}

// Threshold below which the dense path beats grid construction overhead.
constexpr int kDenseCutoff = 256;

}  // namespace

namespace detail {

Matching empty_matching(const PointCloud& x, const PointCloud& y) {
    Matching m;
    m.unmatched_x.resize(x.size());
    m.unmatched_y.resize(y.size());
    std::iota(m.unmatched_x.begin(), m.unmatched_x.end(), 0);
    std::iota(m.unmatched_y.begin(), m.unmatched_y.end(), 0);
    m.total_length = 0.0;
    return m;
}

Matching matching_from_rows(const PointCloud& x, const PointCloud& y, bool x_is_rows,
                            const std::vector<int>& row_to_col) {
    Matching m;
    const int n_rows = static_cast<int>(row_to_col.size());
    std::vector<int> hit;
    hit.reserve(n_rows);
    if (x_is_rows) {
        for (int i = 0; i < n_rows; ++i) {
            m.pairs.emplace_back(i, row_to_col[i]);
            hit.push_back(row_to_col[i]);
        }
        m.unmatched_y = complement_of(hit, y.size());
    } else {
        for (int j = 0; j < n_rows; ++j) {
            m.pairs.emplace_back(row_to_col[j], j);
            hit.push_back(row_to_col[j]);
        }
        std::sort(m.pairs.begin(), m.pairs.end());
        m.unmatched_x = complement_of(hit, x.size());
    }
    m.total_length = recompute_length(m, x, y);
    return m;
}

Matching solve_dense(const PointCloud& x, const PointCloud& y) {
    require_same_dim(x, y, "solve_dense");
    const int n1 = x.size();
    const int n2 = y.size();
    if (n1 == 0 || n2 == 0) return empty_matching(x, y);

    const bool x_is_rows = n1 <= n2;
    const AssignResult sol =
        x_is_rows ? assign_clouds(x.coords().data(), n1, y.coords().data(), n2, x.dim())
                  : assign_clouds(y.coords().data(), n2, x.coords().data(), n1, x.dim());
    return matching_from_rows(x, y, x_is_rows, sol.row_to_col);
}

Matching line_match_dp(const PointCloud& x, const PointCloud& y) {
    require_same_dim(x, y, "line_match_dp");
    if (x.dim() != 1)
        throw std::invalid_argument("line_match_dp: dim must be 1");
    const int n1 = x.size();
    const int n2 = y.size();
    if (n1 == 0 || n2 == 0) return empty_matching(x, y);

    const bool x_is_small = n1 <= n2;
    const PointCloud& small = x_is_small ? x : y;
    const PointCloud& large = x_is_small ? y : x;
    const int ns = small.size();
    const int nl = large.size();

    std::vector<int> si(ns), li(nl);
    std::iota(si.begin(), si.end(), 0);
    std::iota(li.begin(), li.end(), 0);
    std::sort(si.begin(), si.end(),
              [&](int a, int b) { return small.coord(a, 0) < small.coord(b, 0); });
    std::sort(li.begin(), li.end(),
              [&](int a, int b) { return large.coord(a, 0) < large.coord(b, 0); });

    // dp[j] = best cost of matching the first i smalls into the first j larges;
    // an optimal matching on the line is order-preserving, so each small either
    // takes the next large or skips it.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(nl + 1, 0.0), cur(nl + 1, kInf);
    std::vector<std::uint8_t> took(static_cast<std::size_t>(ns) * (nl + 1), 0);
    for (int i = 1; i <= ns; ++i) {
        const double sc = small.coord(si[i - 1], 0);
        std::uint8_t* trow = took.data() + static_cast<std::size_t>(i - 1) * (nl + 1);
        cur[i - 1] = kInf;
        for (int j = i; j <= nl; ++j) {
            const double take = prev[j - 1] + std::abs(sc - large.coord(li[j - 1], 0));
            const double skip = (j > i) ? cur[j - 1] : kInf;
            if (take <= skip) {
                cur[j] = take;
                trow[j] = 1;
            } else {
                cur[j] = skip;
                trow[j] = 0;
            }
        }
        std::swap(prev, cur);
    }

    std::vector<int> small_to_large(ns, -1);
    for (int i = ns, j = nl; i > 0; --j) {
        if (took[static_cast<std::size_t>(i - 1) * (nl + 1) + j]) {
            small_to_large[i - 1] = j - 1;
            --i;
        }
    }

    std::vector<int> row_to_col(ns);
    for (int k = 0; k < ns; ++k) row_to_col[si[k]] = li[small_to_large[k]];
    return matching_from_rows(x, y, x_is_small, row_to_col);
}

}  // namespace detail

Matching solve_exact(const PointCloud& x, const PointCloud& y) {
    require_same_dim(x, y, "solve_exact");
    const int nmin = std::min(x.size(), y.size());
    if (nmin == 0) return detail::empty_matching(x, y);
    if (x.dim() >= 2 && nmin >= kDenseCutoff) return detail::solve_sparse(x, y);
    return detail::solve_dense(x, y);
}

Matching brute_force(const PointCloud& x, const PointCloud& y) {
    require_same_dim(x, y, "brute_force");
    const int n1 = x.size();
    const int n2 = y.size();
    const int ns = std::min(n1, n2);
    if (ns > 8)
        throw std::invalid_argument("brute_force: min(N1,N2) must be <= 8");
    if (ns == 0) return detail::empty_matching(x, y);

    const bool x_is_small = n1 <= n2;
    const PointCloud& small = x_is_small ? x : y;
    const PointCloud& large = x_is_small ? y : x;
    const int nl = large.size();

    std::vector<double> cost(static_cast<std::size_t>(ns) * nl);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nl; ++j)
            cost[static_cast<std::size_t>(i) * nl + j] = distance(small, i, large, j);

    std::vector<int> assign(ns, -1), best_assign;
    std::vector<char> used(nl, 0);
    double best = std::numeric_limits<double>::infinity();

    auto dfs = [&](auto&& self, int row, double acc) -> void {
        if (acc >= best) return;
        if (row == ns) {
            best = acc;
            best_assign = assign;
            return;
        }
        const double* c = cost.data() + static_cast<std::size_t>(row) * nl;
        for (int j = 0; j < nl; ++j) {
            if (used[j]) continue;
            used[j] = 1;
            assign[row] = j;
            self(self, row + 1, acc + c[j]);
            used[j] = 0;
        }
    };
    dfs(dfs, 0, 0.0);

    return detail::matching_from_rows(x, y, x_is_small, best_assign);
}

Matching sorted_match_1d(const PointCloud& x, const PointCloud& y) {
    require_same_dim(x, y, "sorted_match_1d");
    if (x.dim() != 1)
        throw std::invalid_argument("sorted_match_1d: dim must be 1");
    if (x.size() != y.size())
        throw std::invalid_argument("sorted_match_1d: clouds must have equal size");

    const int n = x.size();
    std::vector<int> ix(n), iy(n);
    std::iota(ix.begin(), ix.end(), 0);
    std::iota(iy.begin(), iy.end(), 0);
    std::sort(ix.begin(), ix.end(),
              [&](int a, int b) { return x.coord(a, 0) < x.coord(b, 0); });
    std::sort(iy.begin(), iy.end(),
              [&](int a, int b) { return y.coord(a, 0) < y.coord(b, 0); });

    Matching m;
    m.pairs.reserve(n);
    for (int k = 0; k < n; ++k) m.pairs.emplace_back(ix[k], iy[k]);
    m.total_length = recompute_length(m, x, y);
    return m;
}

}  // namespace mbm
