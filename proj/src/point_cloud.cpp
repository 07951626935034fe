#include "mbm/point_cloud.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mbm/rng.hpp"

namespace mbm {

namespace {
constexpr std::uint64_t kTagCloud = 0x636c6f7564ull;  // sampling stream tag
}

PointCloud::PointCloud(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    if (dim_ < 1) throw std::invalid_argument("PointCloud: dim must be >= 1");
    if (coords_.size() % static_cast<std::size_t>(dim_) != 0)
        throw std::invalid_argument("PointCloud: coords length must be a multiple of dim");
    for (double c : coords_)
        if (!(c >= 0.0 && c <= 1.0))
            throw std::invalid_argument("PointCloud: coordinate outside [0,1]");
}

PointCloud PointCloud::subset(std::span<const int> indices) const {
    std::vector<double> sub;
    sub.reserve(indices.size() * dim_);
    for (int i : indices)
        for (int a = 0; a < dim_; ++a) sub.push_back(coord(i, a));
    return PointCloud(dim_, std::move(sub));
}

double distance(const PointCloud& a, int i, const PointCloud& b, int j) {
    const double* pa = a.coords().data() + static_cast<std::size_t>(i) * a.dim();
    const double* pb = b.coords().data() + static_cast<std::size_t>(j) * b.dim();
    double s = 0.0;
    for (int k = 0; k < a.dim(); ++k) {
        const double d = pa[k] - pb[k];
        s += d * d;
    }
    return std::sqrt(s);
}

SampleSpec SampleSpec::fixed(int dim, long count, std::uint64_t seed) {
    return SampleSpec{dim, CardinalityMode::Fixed, count, 0.0, seed};
}

SampleSpec SampleSpec::poisson(int dim, double mean, std::uint64_t seed) {
    return SampleSpec{dim, CardinalityMode::Poisson, 0, mean, seed};
}

void SampleSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("SampleSpec: dim must be >= 1");
    if (mode == CardinalityMode::Fixed) {
        if (fixed_count < 0) throw std::invalid_argument("SampleSpec: fixed count must be >= 0");
    } else {
        if (!(poisson_mean > 0.0) || !std::isfinite(poisson_mean))
            throw std::invalid_argument("SampleSpec: poisson mean must be > 0");
    }
}

namespace {

PointCloud sample_with_stream(const SampleSpec& spec, std::uint64_t stream_key) {
    spec.validate();
    Rng rng(substream(spec.seed, {kTagCloud, stream_key}));
    const long count = spec.mode == CardinalityMode::Fixed ? spec.fixed_count
                                                           : rng.next_poisson(spec.poisson_mean);
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(count) * spec.dim);
    for (long i = 0; i < count; ++i)
        for (int a = 0; a < spec.dim; ++a) coords.push_back(rng.next_unit());
    return PointCloud(spec.dim, std::move(coords));
}

}  // namespace

PointCloud sample_cloud(const SampleSpec& spec) { return sample_with_stream(spec, 0); }

std::pair<PointCloud, PointCloud> sample_pair(const SampleSpec& spec_x, const SampleSpec& spec_y) {
    if (spec_x.dim != spec_y.dim)
        throw std::invalid_argument("sample_pair: dimension mismatch");
    return {sample_with_stream(spec_x, 0), sample_with_stream(spec_y, 1)};
}

std::string to_csv(const PointCloud& cloud) {
    std::string out;
    char buf[32];
    for (int i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < cloud.dim(); ++a) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, cloud.coord(i, a));
            if (a) out.push_back(',');
            out.append(buf, p);
        }
        out.push_back('\n');
    }
    return out;
}

PointCloud cloud_from_csv(const std::string& text) {
    std::vector<double> coords;
    int dim = -1;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        int cols = 0;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p < end) {
            double v;
            auto [next, ec] = std::from_chars(p, end, v);
            if (ec != std::errc())
                throw std::invalid_argument("cloud csv: bad number at line " + std::to_string(line_no));
            coords.push_back(v);
            ++cols;
            p = next;
            if (p < end) {
                if (*p != ',')
                    throw std::invalid_argument("cloud csv: expected ',' at line " + std::to_string(line_no));
                ++p;
            }
        }
        if (dim == -1) dim = cols;
        else if (cols != dim)
            throw std::invalid_argument("cloud csv: inconsistent column count at line " + std::to_string(line_no));
    }
    if (dim == -1) dim = 1;  // empty file: empty 1-d cloud
    return PointCloud(dim, std::move(coords));
}

PointCloud load_cloud_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return cloud_from_csv(ss.str());
}

void save_cloud_csv(const PointCloud& cloud, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << to_csv(cloud);
}

}  // namespace mbm
