#include "mbm/dyadic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mbm {

DyadicTree::DyadicTree(int dim, int depth, double cube_edge)
    : dim_(dim), depth_(depth), cube_edge_(cube_edge) {
    if (dim < 1) throw std::invalid_argument("DyadicTree: dim must be >= 1");
    if (depth < 0) throw std::invalid_argument("DyadicTree: depth must be >= 0");
    if (!(cube_edge > 0.0)) throw std::invalid_argument("DyadicTree: cube edge must be positive");
    levels_.resize(static_cast<std::size_t>(depth) + 1);
}

double DyadicTree::cell_edge(int level) const {
    return std::ldexp(cube_edge_, -level);
}

const DyadicTree::Level& DyadicTree::level(int k) const {
    if (k < 0 || k > depth_) throw std::out_of_range("DyadicTree::level: bad level " + std::to_string(k));
    return levels_[static_cast<std::size_t>(k)];
}

long long DyadicTree::discrepancy_sum(int k) const {
    long long total = 0;
    for (const auto& [addr, stats] : level(k)) total += stats.discrepancy();
    return total;
}

namespace detail {

namespace {

void count_cloud(const PointCloud& cloud, bool is_x, long cells_per_unit, DyadicTree& tree) {
    const int d = tree.dim();
    const int depth = tree.depth();
    std::vector<long> leaf_idx(static_cast<std::size_t>(d));
    for (int i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < d; ++a) {
            const double c = cloud.coord(i, a);
            if (!(c >= 0.0 && c <= 1.0))
                throw std::invalid_argument("build_tree: point coordinate outside [0,1]");
            leaf_idx[static_cast<std::size_t>(a)] = leaf_axis_index(c, cells_per_unit);
        }
        for (int k = 0; k <= depth; ++k) {
            const int shift = depth - k;
            std::uint64_t addr = 0;
            for (int a = 0; a < d; ++a) {
                const auto ia = static_cast<std::uint64_t>(leaf_idx[static_cast<std::size_t>(a)] >> shift);
                addr |= ia << (k * a);
            }
            CellStats& cell = tree.levels()[static_cast<std::size_t>(k)][addr];
            (is_x ? cell.n1 : cell.n2) += 1;
        }
    }
}

}  // namespace

DyadicTree build_tree_scaled(const PointCloud& x, const PointCloud& y, int depth,
                             long cells_per_unit, double cube_edge) {
    if (x.dim() != y.dim()) throw std::invalid_argument("build_tree: cloud dimensions differ");
    const int d = x.dim();
    if (depth < 0) throw std::invalid_argument("build_tree: depth must be >= 0");
    if (depth * d > 30) throw std::invalid_argument("build_tree: depth * dim exceeds the cell budget of 30");
    if (cells_per_unit < 1) throw std::invalid_argument("build_tree: cells_per_unit must be >= 1");
    DyadicTree tree(d, depth, cube_edge);
    count_cloud(x, true, cells_per_unit, tree);
    count_cloud(y, false, cells_per_unit, tree);
    return tree;
}

}  // namespace detail

DyadicTree build_tree(const PointCloud& x, const PointCloud& y, int depth) {
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("build_tree: depth must be in [0, 30]");
    return detail::build_tree_scaled(x, y, depth, 1L << depth, 1.0);
}

}  // namespace mbm
