#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbm {

// A finite set of points in [0,1]^d, coordinates stored flat in point-major
// order for cache-friendly distance evaluation. Immutable after construction.
class PointCloud {
public:
    PointCloud() = default;
    PointCloud(int dim, std::vector<double> coords);

    int dim() const { return dim_; }
    int size() const { return dim_ == 0 ? 0 : static_cast<int>(coords_.size()) / dim_; }
    double coord(int point, int axis) const {
        return coords_[static_cast<std::size_t>(point) * dim_ + axis];
    }
    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * dim_, static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& coords() const { return coords_; }

    // Cloud restricted to the given point indices, same order.
    PointCloud subset(std::span<const int> indices) const;

    bool operator==(const PointCloud&) const = default;

private:
    int dim_ = 1;
    std::vector<double> coords_;
};

double distance(const PointCloud& a, int i, const PointCloud& b, int j);

enum class CardinalityMode { Fixed, Poisson };

struct SampleSpec {
    int dim = 1;
    CardinalityMode mode = CardinalityMode::Fixed;
    long fixed_count = 0;       // used when mode == Fixed
    double poisson_mean = 0.0;  // used when mode == Poisson
    std::uint64_t seed = 0;

    static SampleSpec fixed(int dim, long count, std::uint64_t seed);
    static SampleSpec poisson(int dim, double mean, std::uint64_t seed);

    void validate() const;  // throws std::invalid_argument
};

// Deterministic: identical SampleSpec values give bit-identical output.
PointCloud sample_cloud(const SampleSpec& spec);

// Two clouds from stream-separated substreams, so reusing one seed for both
// specs still yields independent clouds. Dimensions must match.
std::pair<PointCloud, PointCloud> sample_pair(const SampleSpec& spec_x, const SampleSpec& spec_y);

// CSV, one point per row "x1,...,xd", shortest round-trip doubles.
std::string to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(const std::string& text);
PointCloud load_cloud_csv(const std::string& path);
void save_cloud_csv(const PointCloud& cloud, const std::string& path);

}  // namespace mbm
