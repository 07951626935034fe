#include "mbm/matching.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mbm {

double recompute_length(const Matching& m, const PointCloud& x, const PointCloud& y) {
    double sum = 0.0, comp = 0.0;  // Kahan
    for (auto [i, j] : m.pairs) {
        const double t = distance(x, i, y, j) - comp;
        const double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
    return sum;
}

void check_matching(const Matching& m, const PointCloud& x, const PointCloud& y) {
    const int n1 = x.size(), n2 = y.size();
    const int expect_pairs = std::min(n1, n2);
    if (static_cast<int>(m.pairs.size()) != expect_pairs)
        throw std::logic_error("matching: pair count != min(N1,N2)");

    std::vector<char> seen_x(n1, 0), seen_y(n2, 0);
    for (auto [i, j] : m.pairs) {
        if (i < 0 || i >= n1 || j < 0 || j >= n2)
            throw std::logic_error("matching: pair index out of range");
        if (seen_x[i]++ || seen_y[j]++)
            throw std::logic_error("matching: index appears twice");
    }
    for (int i : m.unmatched_x) {
        if (i < 0 || i >= n1 || seen_x[i]++) throw std::logic_error("matching: bad unmatched_x");
    }
    for (int j : m.unmatched_y) {
        if (j < 0 || j >= n2 || seen_y[j]++) throw std::logic_error("matching: bad unmatched_y");
    }
    if (static_cast<int>(m.unmatched_x.size()) != n1 - expect_pairs ||
        static_cast<int>(m.unmatched_y.size()) != n2 - expect_pairs)
        throw std::logic_error("matching: unmatched residue != |N1-N2| on the surplus side");

    const double len = recompute_length(m, x, y);
    const double tol = 1e-12 * std::max(1.0, std::fabs(len));
    if (std::fabs(len - m.total_length) > tol)
        throw std::logic_error("matching: total_length disagrees with recomputed sum by " +
                               std::to_string(std::fabs(len - m.total_length)));
}

}  // namespace mbm
