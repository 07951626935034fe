#include "mbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace mbm {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n <= 16) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanStderr mean_stderr(std::span<const double> values) {
    MeanStderr out;
    const auto n = static_cast<double>(values.size());
    if (values.empty()) return out;
    out.mean = pairwise_sum(values) / n;
    if (values.size() < 2) return out;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    out.std_error = std::sqrt(var / n);
    return out;
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const auto n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / (n - 1.0);
}

std::vector<double> run_indexed(long count, int workers, const std::function<double(long)>& fn) {
    if (count < 0) throw std::invalid_argument("run_indexed: negative count");
    std::vector<double> out(static_cast<std::size_t>(count));
    const long w = std::clamp<long>(workers, 1, std::max<long>(1, count));
    if (w == 1) {
        for (long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    pool.reserve(static_cast<std::size_t>(w));
    for (long k = 0; k < w; ++k) {
        const long lo = count * k / w;
        const long hi = count * (k + 1) / w;
        pool.emplace_back([&, lo, hi, k] {
            try {
                for (long i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace mbm
