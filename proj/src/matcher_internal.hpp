#pragma once

#include <vector>

#include "mbm/matching.hpp"
#include "mbm/point_cloud.hpp"

namespace mbm::detail {

// Assemble a Matching from a row-side assignment, where rows are the smaller
// cloud (X if x_is_rows, else Y). Recomputes total_length from coordinates.
Matching matching_from_rows(const PointCloud& x, const PointCloud& y, bool x_is_rows,
                            const std::vector<int>& row_to_col);

// Valid empty matching for the case where one side has no points.
Matching empty_matching(const PointCloud& x, const PointCloud& y);

}  // namespace mbm::detail
