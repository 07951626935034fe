#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mbm/point_cloud.hpp"

namespace mbm {

// Point counts of one cell: n1 from the X cloud, n2 from the Y cloud.
struct CellStats {
    long long n1 = 0;
    long long n2 = 0;
    long long discrepancy() const { return n1 > n2 ? n1 - n2 : n2 - n1; }
};

// Nested grid over a cube: level k splits each axis of the cube into 2^k
// equal slabs, so a level-k cell has edge cube_edge / 2^k. Only occupied
// cells are stored. Cell addresses pack the per-axis indices into one
// integer, k bits per axis, axis 0 in the low bits.
class DyadicTree {
public:
    using Level = std::map<std::uint64_t, CellStats>;

    DyadicTree(int dim, int depth, double cube_edge);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    double cube_edge() const { return cube_edge_; }
    double cell_edge(int level) const;

    const Level& level(int k) const;
    // Sum of |n1 - n2| over the cells of one level.
    long long discrepancy_sum(int level) const;

    // Filled by the builder; levels_[k] holds level k, k in {0..depth}.
    std::vector<Level>& levels() { return levels_; }

private:
    int dim_;
    int depth_;
    double cube_edge_;
    std::vector<Level> levels_;
};

// Counts both clouds into a depth-K tree over the unit cube. Points must lie
// in [0,1]^d; cells are half-open with the top face closed, so each point
// lands in exactly one cell per level. Throws when depth * dim > 30 (cell
// address budget) or on points outside the cube.
DyadicTree build_tree(const PointCloud& x, const PointCloud& y, int depth);

namespace detail {

// General form backing build_tree: the cube is [0, cube_edge]^d and the
// leaf grid is chosen so that cells_per_unit leaf cells tile each unit of
// axis length (cube_edge * cells_per_unit == 2^depth). Points still must
// lie in [0,1]^d; leaf cells beyond index cells_per_unit - 1 stay empty.
DyadicTree build_tree_scaled(const PointCloud& x, const PointCloud& y, int depth,
                             long cells_per_unit, double cube_edge);

// Per-axis leaf index of a coordinate, half-open cells, top face of the
// unit cube closed (so 1.0 lands in cell cells_per_unit - 1).
inline long leaf_axis_index(double c, long cells_per_unit) {
    long i = static_cast<long>(c * static_cast<double>(cells_per_unit));
    return i >= cells_per_unit ? cells_per_unit - 1 : i;
}

}  // namespace detail

}  // namespace mbm
