#pragma once

#include <utility>
#include <vector>

#include "mbm/point_cloud.hpp"

namespace mbm {

// A partial pairing between two clouds. pairs holds (index into X, index
// into Y); exactly min(N1,N2) pairs, the surplus side listed unmatched.
struct Matching {
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> unmatched_x;
    std::vector<int> unmatched_y;
    double total_length = 0.0;
};

// Sum of pair distances, compensated so the value does not depend on
// accumulation luck at the 1e-12 level.
double recompute_length(const Matching& m, const PointCloud& x, const PointCloud& y);

// Throws std::logic_error if the matching breaks its structural invariants
// against the given clouds (partial bijection, cardinalities, length).
void check_matching(const Matching& m, const PointCloud& x, const PointCloud& y);

}  // namespace mbm
