#pragma once

#include "mbm/matching.hpp"
#include "mbm/point_cloud.hpp"

namespace mbm {

// Minimum-length bipartite matching of cardinality min(N1, N2); the excess
// points of the larger cloud are left unmatched. Empty inputs yield a valid
// empty matching.
Matching solve_exact(const PointCloud& x, const PointCloud& y);

// Exhaustive search over all injections of the smaller cloud into the larger.
// Validation oracle only; requires min(N1, N2) <= 8.
Matching brute_force(const PointCloud& x, const PointCloud& y);

// Balanced one-dimensional matching by order statistics: the i-th smallest of
// X pairs with the i-th smallest of Y. Requires dim == 1 and N1 == N2.
Matching sorted_match_1d(const PointCloud& x, const PointCloud& y);

namespace detail {

// Dense successive-shortest-path solve, any dimension. Reference path; used
// directly by tests and as the fallback of the sparse path.
Matching solve_dense(const PointCloud& x, const PointCloud& y);

// Candidate-edge solve: nearest-neighbor edge lists from a uniform grid, then
// a full reduced-cost scan certifies optimality, growing the edge set and
// re-solving until the certificate passes (dense fallback if it never does).
// Exact for dim >= 2; solve_exact dispatches here for large instances.
Matching solve_sparse(const PointCloud& x, const PointCloud& y);

// Exact one-dimensional matching for any cardinalities: both sides sorted,
// the smaller side aligned into the larger by dynamic programming with skips.
Matching line_match_dp(const PointCloud& x, const PointCloud& y);

}  // namespace detail

}  // namespace mbm
