#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mbm/point_cloud.hpp"

using namespace mbm;

TEST_CASE("fixed sampling honors count, dim, and bounds") {
    const auto spec = SampleSpec::fixed(3, 25, 99);
    const PointCloud c = sample_cloud(spec);
    CHECK(c.dim() == 3);
    CHECK(c.size() == 25);
    for (const double v : c.coords()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("sampling is deterministic in the sample parameters") {
    const auto spec = SampleSpec::poisson(2, 40.0, 5);
    CHECK(sample_cloud(spec) == sample_cloud(spec));
    const auto other = SampleSpec::poisson(2, 40.0, 6);
    CHECK_FALSE(sample_cloud(spec) == sample_cloud(other));
}

TEST_CASE("sample_pair gives distinct clouds even for identical specs") {
    const auto spec = SampleSpec::fixed(2, 30, 77);
    const auto [x, y] = sample_pair(spec, spec);
    CHECK(x.size() == 30);
    CHECK(y.size() == 30);
    CHECK_FALSE(x == y);
    const auto [x2, y2] = sample_pair(spec, spec);
    CHECK(x == x2);
    CHECK(y == y2);
}

TEST_CASE("sample_pair rejects mismatched dimensions") {
    CHECK_THROWS(sample_pair(SampleSpec::fixed(2, 5, 1), SampleSpec::fixed(3, 5, 1)));
}

TEST_CASE("empirical box mass matches volume") {
    // Fraction of points in [0, 0.5]^d against volume 1/2^d.
    for (const int d : {1, 2, 3}) {
        long inside = 0, total = 0;
        for (int t = 0; t < 200; ++t) {
            const PointCloud c = sample_cloud(SampleSpec::fixed(d, 100, 1000 + t));
            for (int i = 0; i < c.size(); ++i) {
                bool in = true;
                for (int a = 0; a < d; ++a) in = in && c.coord(i, a) <= 0.5;
                inside += in;
                ++total;
            }
        }
        const double v = std::pow(0.5, d);
        const double frac = static_cast<double>(inside) / static_cast<double>(total);
        CHECK(std::abs(frac - v) <= 4.0 * std::sqrt(v * (1.0 - v) / total));
    }
}

TEST_CASE("poisson cloud counts have matching mean and variance") {
    const double mean = 100.0;
    const int trials = 4000;
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const PointCloud c = sample_cloud(SampleSpec::poisson(1, mean, 50000 + t));
        const double n = c.size();
        sum += n;
        sumsq += n * n;
    }
    const double m = sum / trials;
    const double var = sumsq / trials - m * m;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / trials));
    CHECK(std::abs(var - mean) < 0.10 * mean);
}

TEST_CASE("cloud validation rejects bad input") {
    CHECK_THROWS(PointCloud(0, {}));
    CHECK_THROWS(PointCloud(2, {0.1, 0.2, 0.3}));
    CHECK_THROWS(PointCloud(1, {1.5}));
    CHECK_THROWS(PointCloud(1, {-0.1}));
    const PointCloud ok(2, {0.0, 1.0});
    CHECK(ok.size() == 1);
}

TEST_CASE("csv round trip preserves coordinates exactly") {
    const PointCloud c = sample_cloud(SampleSpec::fixed(3, 17, 8));
    const std::string text = to_csv(c);
    const PointCloud back = cloud_from_csv(text);
    CHECK(back == c);
}

TEST_CASE("csv accepts empty input and flags parse errors") {
    CHECK(cloud_from_csv("").size() == 0);
    CHECK_THROWS(cloud_from_csv("0.1,0.2\n0.3\n"));
    CHECK_THROWS(cloud_from_csv("0.1,zebra\n"));
}

TEST_CASE("subset picks rows by index") {
    const PointCloud c(2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const std::vector<int> keep = {2, 0};
    const PointCloud s = c.subset(keep);
    CHECK(s.size() == 2);
    CHECK(s.coord(0, 0) == 0.5);
    CHECK(s.coord(0, 1) == 0.6);
    CHECK(s.coord(1, 0) == 0.1);
}
