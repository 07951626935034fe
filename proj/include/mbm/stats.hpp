#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mbm {

// Cascade summation over the given order: deterministic for a fixed input
// order and with error growing only logarithmically in length, so parallel
// trial collection followed by this reduction gives scheduling-independent
// results.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;  // standard error of the mean
};

// Two-pass mean and standard error; empty input gives zeros, a single value
// has standard error zero.
MeanStderr mean_stderr(std::span<const double> values);

// Unbiased sample variance (n - 1 denominator); zero for fewer than two
// values.
double sample_variance(std::span<const double> values);

// Evaluates fn(0..count-1) into a vector in index order, fanned out over the
// requested worker threads. fn must depend only on its index; the result is
// identical for every worker count.
std::vector<double> run_indexed(long count, int workers, const std::function<double(long)>& fn);

}  // namespace mbm
