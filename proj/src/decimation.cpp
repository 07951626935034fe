#include "mbm/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbm/exact_matcher.hpp"

namespace mbm {

namespace {

constexpr double kAuditTol = 1e-9;

struct CellPoints {
    std::vector<int> xs;
    std::vector<int> ys;
};

using CellMap = std::map<std::uint64_t, CellPoints>;

// Original-index lists per occupied leaf cell, depth bits per axis in the key.
CellMap group_leaf_cells(const PointCloud& x, const PointCloud& y, int depth, long cells_per_unit) {
    const int d = x.dim();
    CellMap cells;
    auto place = [&](const PointCloud& cloud, bool is_x) {
        for (int i = 0; i < cloud.size(); ++i) {
            std::uint64_t addr = 0;
            for (int a = 0; a < d; ++a) {
                const double c = cloud.coord(i, a);
                if (!(c >= 0.0 && c <= 1.0))
                    throw std::invalid_argument("decimation: point coordinate outside [0,1]");
                const auto ia = static_cast<std::uint64_t>(detail::leaf_axis_index(c, cells_per_unit));
                addr |= ia << (depth * a);
            }
            CellPoints& cell = cells[addr];
            (is_x ? cell.xs : cell.ys).push_back(i);
        }
    };
    place(x, true);
    place(y, false);
    return cells;
}

Matching run_cell_solver(const LeafSolver& solver, const PointCloud& sx, const PointCloud& sy) {
    Matching m = solver ? solver(sx, sy) : solve_exact(sx, sy);
    const int nx = sx.size();
    const int ny = sy.size();
    if (m.pairs.size() != static_cast<std::size_t>(std::min(nx, ny)))
        throw std::logic_error("decimation: cell solver returned the wrong pair count");
    for (const auto& [i, j] : m.pairs)
        if (i < 0 || i >= nx || j < 0 || j >= ny)
            throw std::logic_error("decimation: cell solver returned out-of-range indices");
    return m;
}

DecimationResult run_engine(const PointCloud& x, const PointCloud& y, int depth,
                            long cells_per_unit, double cube_edge, const LeafSolver& solver) {
    if (x.dim() != y.dim()) throw std::invalid_argument("decimation: cloud dimensions differ");
    const int d = x.dim();
    if (depth < 0) throw std::invalid_argument("decimation: depth must be >= 0");
    if (depth * d > 30) throw std::invalid_argument("decimation: depth * dim exceeds the cell budget of 30");

    DecimationResult res;
    res.dim = d;
    res.depth = depth;
    res.cells_per_unit = cells_per_unit;
    res.cube_edge = cube_edge;
    res.per_level_cost.assign(static_cast<std::size_t>(depth) + 1, 0.0);
    res.per_level_discrepancy_sum.assign(static_cast<std::size_t>(depth) + 1, 0);
    res.per_level_max_edge.assign(static_cast<std::size_t>(depth) + 1, 0.0);

    std::vector<std::pair<int, int>> pairs;

    // Solves one cell's current points, appends the new pairs, and leaves the
    // unpaired points behind in cp.
    auto match_within = [&](CellPoints& cp, double& cost_acc, double& max_edge) {
        if (cp.xs.empty() || cp.ys.empty()) return;
        const Matching sub = run_cell_solver(solver, x.subset(cp.xs), y.subset(cp.ys));
        cost_acc += sub.total_length;
        std::vector<char> used_x(cp.xs.size(), 0);
        std::vector<char> used_y(cp.ys.size(), 0);
        for (const auto& [i, j] : sub.pairs) {
            if (used_x[static_cast<std::size_t>(i)] || used_y[static_cast<std::size_t>(j)])
                throw std::logic_error("decimation: cell solver repeated an index");
            used_x[static_cast<std::size_t>(i)] = 1;
            used_y[static_cast<std::size_t>(j)] = 1;
            const int gi = cp.xs[static_cast<std::size_t>(i)];
            const int gj = cp.ys[static_cast<std::size_t>(j)];
            pairs.emplace_back(gi, gj);
            max_edge = std::max(max_edge, distance(x, gi, y, gj));
        }
        CellPoints left;
        for (std::size_t i = 0; i < cp.xs.size(); ++i)
            if (!used_x[i]) left.xs.push_back(cp.xs[i]);
        for (std::size_t j = 0; j < cp.ys.size(); ++j)
            if (!used_y[j]) left.ys.push_back(cp.ys[j]);
        cp = std::move(left);
    };

    CellMap cells = group_leaf_cells(x, y, depth, cells_per_unit);
    CellMap live;
    double leaf_edge_sink = 0.0;
    for (auto& [addr, cp] : cells) {
        res.per_level_discrepancy_sum[static_cast<std::size_t>(depth)] +=
            std::llabs(static_cast<long long>(cp.xs.size()) - static_cast<long long>(cp.ys.size()));
        match_within(cp, res.leaf_cost, leaf_edge_sink);
        if (!cp.xs.empty() || !cp.ys.empty()) live.emplace(addr, std::move(cp));
    }

    for (int t = depth; t >= 1; --t) {
        const std::uint64_t mask = (1ull << t) - 1;
        CellMap parents;
        for (auto& [addr, cp] : live) {
            std::uint64_t paddr = 0;
            for (int a = 0; a < d; ++a) {
                const std::uint64_t ia = (addr >> (t * a)) & mask;
                paddr |= (ia >> 1) << ((t - 1) * a);
            }
            CellPoints& dst = parents[paddr];
            dst.xs.insert(dst.xs.end(), cp.xs.begin(), cp.xs.end());
            dst.ys.insert(dst.ys.end(), cp.ys.begin(), cp.ys.end());
        }
        live.clear();
        for (auto& [paddr, cp] : parents) {
            res.per_level_discrepancy_sum[static_cast<std::size_t>(t) - 1] +=
                std::llabs(static_cast<long long>(cp.xs.size()) - static_cast<long long>(cp.ys.size()));
            match_within(cp, res.per_level_cost[static_cast<std::size_t>(t)],
                         res.per_level_max_edge[static_cast<std::size_t>(t)]);
            if (!cp.xs.empty() || !cp.ys.empty()) live.emplace(paddr, std::move(cp));
        }
    }

    Matching m;
    m.pairs = std::move(pairs);
    std::sort(m.pairs.begin(), m.pairs.end());
    if (!live.empty()) {
        CellPoints& root = live.begin()->second;
        m.unmatched_x = std::move(root.xs);
        m.unmatched_y = std::move(root.ys);
        std::sort(m.unmatched_x.begin(), m.unmatched_x.end());
        std::sort(m.unmatched_y.begin(), m.unmatched_y.end());
    }
    m.total_length = recompute_length(m, x, y);
    res.matching = std::move(m);
    return res;
}

}  // namespace

double DecimationResult::claimed_total() const {
    double total = leaf_cost;
    for (int k = 1; k <= depth; ++k) total += per_level_cost[static_cast<std::size_t>(k)];
    return total;
}

double DecimationResult::upper_bound() const {
    const double diam = std::sqrt(static_cast<double>(dim)) * cube_edge;
    double bound = leaf_cost;
    for (int k = 1; k <= depth; ++k)
        bound += std::ldexp(diam, -k) *
                 static_cast<double>(per_level_discrepancy_sum[static_cast<std::size_t>(k)]);
    return bound;
}

DecimationResult decimation_match(const PointCloud& x, const PointCloud& y, int depth,
                                  const LeafSolver& solver) {
    if (depth < 0 || depth > 30)
        throw std::invalid_argument("decimation_match: depth must be in [0, 30]");
    return run_engine(x, y, depth, 1L << depth, 1.0, solver);
}

SplitReport verify_single_split(const PointCloud& x, const PointCloud& y, double edge) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("verify_single_split: cloud dimensions differ");
    if (!(edge > 0.0)) throw std::invalid_argument("verify_single_split: edge must be positive");
    const int d = x.dim();

    std::map<std::uint64_t, CellPoints> cells;
    auto place = [&](const PointCloud& cloud, bool is_x) {
        for (int i = 0; i < cloud.size(); ++i) {
            std::uint64_t addr = 0;
            for (int a = 0; a < d; ++a) {
                const double c = cloud.coord(i, a);
                if (!(c >= 0.0 && c <= edge))
                    throw std::invalid_argument("verify_single_split: point outside the cube");
                if (c >= 0.5 * edge) addr |= 1ull << a;
            }
            CellPoints& cell = cells[addr];
            (is_x ? cell.xs : cell.ys).push_back(i);
        }
    };
    place(x, true);
    place(y, false);

    SplitReport rep;
    std::vector<int> left_x;
    std::vector<int> left_y;
    for (auto& [addr, cp] : cells) {
        rep.discrepancy_total += std::llabs(static_cast<long long>(cp.xs.size()) -
                                            static_cast<long long>(cp.ys.size()));
        if (!cp.xs.empty() && !cp.ys.empty()) {
            const Matching sub = solve_exact(x.subset(cp.xs), y.subset(cp.ys));
            rep.subcube_cost += sub.total_length;
            for (int i : sub.unmatched_x) left_x.push_back(cp.xs[static_cast<std::size_t>(i)]);
            for (int j : sub.unmatched_y) left_y.push_back(cp.ys[static_cast<std::size_t>(j)]);
        } else {
            left_x.insert(left_x.end(), cp.xs.begin(), cp.xs.end());
            left_y.insert(left_y.end(), cp.ys.begin(), cp.ys.end());
        }
    }
    rep.leftover_cost = solve_exact(x.subset(left_x), y.subset(left_y)).total_length;
    rep.exact_cost = solve_exact(x, y).total_length;
    rep.refined_bound = rep.subcube_cost + rep.leftover_cost;
    rep.crude_bound = rep.subcube_cost + 0.5 * edge * std::sqrt(static_cast<double>(d)) *
                                             static_cast<double>(rep.discrepancy_total);
    const double eps = kAuditTol * (1.0 + rep.crude_bound);
    rep.chain_ok = rep.exact_cost <= rep.refined_bound + eps &&
                   rep.refined_bound <= rep.crude_bound + eps;
    return rep;
}

DecimationResult padded_subdivision(const PointCloud& x, const PointCloud& y, long m,
                                    const LeafSolver& solver) {
    if (m < 1) throw std::invalid_argument("padded_subdivision: m must be >= 1");
    if (m == 1) return run_engine(x, y, 0, 1, 1.0, solver);
    int k_levels = 0;
    while ((2L << k_levels) <= m) ++k_levels;
    const int depth = k_levels + 1;
    const double enclosing_edge = std::ldexp(1.0, depth) / static_cast<double>(m);
    return run_engine(x, y, depth, m, enclosing_edge, solver);
}

DecimationAudit audit_decimation(const PointCloud& x, const PointCloud& y,
                                 const DecimationResult& result, bool with_exact) {
    DecimationAudit audit;
    const int depth = result.depth;
    const DyadicTree tree =
        detail::build_tree_scaled(x, y, depth, result.cells_per_unit, result.cube_edge);

    audit.levels_ok =
        result.per_level_discrepancy_sum.size() == static_cast<std::size_t>(depth) + 1;
    if (audit.levels_ok)
        for (int k = 0; k <= depth; ++k)
            if (tree.discrepancy_sum(k) != result.per_level_discrepancy_sum[static_cast<std::size_t>(k)]) {
                audit.levels_ok = false;
                break;
            }

    const CellMap cells = group_leaf_cells(x, y, depth, result.cells_per_unit);
    for (const auto& [addr, cp] : cells)
        if (!cp.xs.empty() && !cp.ys.empty())
            audit.independent_leaf_cost += solve_exact(x.subset(cp.xs), y.subset(cp.ys)).total_length;

    const double diam = std::sqrt(static_cast<double>(result.dim)) * result.cube_edge;
    double bound = audit.independent_leaf_cost;
    for (int k = 1; k <= depth; ++k)
        bound += std::ldexp(diam, -k) * static_cast<double>(tree.discrepancy_sum(k));
    audit.independent_bound = bound;

    audit.claimed_total = result.claimed_total();
    const double eps = kAuditTol * (1.0 + std::abs(bound));
    audit.leaf_costs_ok = std::abs(result.leaf_cost - audit.independent_leaf_cost) <= eps;
    audit.bound_ok = audit.claimed_total <= bound + eps;
    audit.dominance_ok = true;
    if (with_exact) {
        audit.exact_cost = solve_exact(x, y).total_length;
        audit.dominance_ok = audit.exact_cost <= audit.claimed_total + eps;
    }
    return audit;
}

}  // namespace mbm
