#pragma once

#include <cstdint>
#include <vector>

#include "mbm/point_cloud.hpp"
#include "mbm/stats.hpp"

namespace mbm {

// Matched length of `trials` independent instances at one size. Each trial
// samples an (X, Y) pair with both cardinalities either fixed at `size` or
// independently Poisson with mean `size`, solves it exactly, and records
// total_length. Entry t depends only on (dim, mode, size, seed, t), so any
// execution order gives the same vector.
std::vector<double> sample_lengths(int dim, CardinalityMode mode, double size, long trials,
                                   std::uint64_t seed, int workers = 1);

// Mean and standard error of sample_lengths.
MeanStderr estimate_mean(int dim, CardinalityMode mode, double size, long trials,
                         std::uint64_t seed, int workers = 1);

// One size ladder of mean lengths with the power-law fit
//   mean(N) = beta * N^(1-1/d) * (1 + c * N^-gamma),  gamma = 1/2 - 1/d.
struct ScalingEstimate {
    int dim = 0;
    std::vector<long> sizes;
    std::vector<double> means;
    std::vector<double> stderrs;
    std::vector<long> trials;
    std::vector<double> stabilization;  // means[i] / sizes[i]^(1-1/d)
    double beta_hat = 0.0;
    double beta_ci = 0.0;             // ~95% half-width from the weighted fit
    double correction_hat = 0.0;      // fitted c
    double beta_drop_smallest = 0.0;  // refit without the smallest size
    bool fit_ok = false;
};

// Weighted least-squares fit of the model above (linear in beta and beta*c).
// Requires dim >= 3 and at least four strictly increasing sizes spanning a
// decade; throws std::invalid_argument otherwise. A degenerate system comes
// back with fit_ok = false rather than an extrapolated value.
ScalingEstimate fit_beta(int dim, const std::vector<long>& sizes, const std::vector<double>& means,
                         const std::vector<double>& stderrs, const std::vector<long>& trials);

// sample_lengths at every ladder size (one substream per size, derived from
// dim, mode, and the size value), then fit_beta.
ScalingEstimate scan_beta(int dim, CardinalityMode mode, const std::vector<long>& sizes,
                          const std::vector<long>& trials_per_size, std::uint64_t seed,
                          int workers = 1);

// True when the normalized means have settled: the last three successive
// |differences| of the stabilization sequence are nonincreasing. Requires at
// least five ladder sizes.
bool stabilization_settled(const ScalingEstimate& est);

// Monte Carlo check that E|n1 - n2| <= sqrt(2*lambda) for independent
// Poisson(lambda) counts.
struct PoissonDiscrepancyReport {
    double lambda = 0.0;
    long trials = 0;
    double mean_abs_diff = 0.0;
    double std_error = 0.0;
    double bound = 0.0;  // sqrt(2 * lambda)
    bool ok = false;     // mean <= bound + 3 * std_error
};
PoissonDiscrepancyReport check_poisson_discrepancy(double lambda, long trials, std::uint64_t seed);

// Monte Carlo check of the Poissonized mean inequality
//   M(N) <= m^(d-1) * M(N / m^d) + 2^d * sqrt(2 d N) * sum_{k=0}^{K} 2^(k(d/2-1)),
// K = floor(log2 m); when m is exactly 2^K the tighter form without the 2^d
// factor and with the sum starting at k=1 is asserted as well.
struct SubadditivityReport {
    int dim = 0;
    double size = 0.0;  // Poisson mean of the whole instance
    long m = 0;
    int k_levels = 0;
    long trials = 0;
    double mean_whole = 0.0;
    double se_whole = 0.0;
    double mean_cell = 0.0;  // estimate of M(size / m^dim)
    double se_cell = 0.0;
    double rhs_general = 0.0;
    double rhs_dyadic = 0.0;  // meaningful only when dyadic_applicable
    bool dyadic_applicable = false;
    double combined_se = 0.0;
    bool ok = false;  // inequalities hold within 3 combined standard errors
};
SubadditivityReport check_mean_subadditivity(int dim, double size, long m, long trials,
                                             std::uint64_t seed, int workers = 1);

// Fixed-cardinality vs Poissonized means on coupled samples. Couples each
// trial through a shared coordinate stream: the fixed-N clouds are the
// Poisson clouds truncated or padded to exactly N points, so the per-trial
// lengths must differ by at most sqrt(d) * (|N1-N| + |N2-N|); the means must
// differ by at most 2 * sqrt(2 d N).
struct DepoissonizationReport {
    int dim = 0;
    long size = 0;
    long trials = 0;
    double fixed_mean = 0.0;
    double fixed_se = 0.0;
    double poisson_mean = 0.0;
    double poisson_se = 0.0;
    double mean_gap = 0.0;
    double mean_bound = 0.0;  // 2 * sqrt(2 d N)
    bool mean_ok = false;
    long coupling_violations = 0;
    double worst_coupling_margin = 0.0;  // max of |dL| - allowance; <= 0 when clean
    bool coupling_ok = false;
    bool ok() const { return mean_ok && coupling_ok; }
};
DepoissonizationReport check_depoissonization(int dim, long size, long trials, std::uint64_t seed,
                                              int workers = 1);

// Tail of the normalized length L / N^(1-1/d) around its empirical mean,
// against the bound 2 * exp(-N^(1-2/d) * t^2 / (8d)) at every t.
struct ConcentrationReport {
    int dim = 0;
    long size = 0;
    long trials = 0;
    double mean_normalized = 0.0;
    std::vector<double> t_grid;
    std::vector<double> empirical_tail;
    std::vector<double> analytic_bound;
    std::vector<double> tail_se;  // binomial standard error per t
    bool ok = false;              // tail <= bound + 3 se at every t
};
ConcentrationReport check_concentration(int dim, long size, long trials,
                                        std::vector<double> t_grid, std::uint64_t seed,
                                        int workers = 1);
std::vector<double> default_t_grid();  // 0.45 * k for k = 1..10

// Low-dimension scalings. dim 1: reports L/sqrt(N) and checks that its
// variance does not die out along the ladder (last >= half of first). dim 2:
// reports L/sqrt(N ln N) and checks the normalized means stay in a tight
// band (max/min <= 1.5). Natural logarithm throughout.
struct AnomalousReport {
    int dim = 0;
    std::vector<long> sizes;
    std::vector<long> trials;
    std::vector<double> means;
    std::vector<double> stderrs;
    std::vector<double> normalized;
    std::vector<double> normalized_variance;  // dim 1 only
    bool trend_checked = false;               // false when fewer than two sizes
    double variance_ratio = 0.0;              // dim 1: last / first
    double band_ratio = 0.0;                  // dim 2: max / min
    bool ok = false;
};
AnomalousReport anomalous_scaling_report(int dim, const std::vector<long>& sizes,
                                         const std::vector<long>& trials_per_size,
                                         std::uint64_t seed, int workers = 1);

// Mean cost of the 2-d recursive construction along a ladder, fitted to
// C * sqrt(N) * ln N; ok when every mean sits within 25% of the fitted
// curve, which pins the growth rate to sqrt(N) log N.
struct DecimationGrowthReport {
    std::vector<long> sizes;
    std::vector<long> trials;
    std::vector<int> depths;
    std::vector<double> means;
    std::vector<double> stderrs;
    std::vector<double> ratios;  // mean / (sqrt(N) ln N)
    double c_fit = 0.0;
    double max_rel_dev = 0.0;
    bool ok = false;
};
DecimationGrowthReport decimation_growth(const std::vector<long>& sizes,
                                         const std::vector<long>& trials_per_size,
                                         std::uint64_t seed, int workers = 1);

// sqrt(d / (2 e pi)), the proven large-d asymptote of the scaling constant.
double beta_large_d_asymptote(int dim);

// Fitted constants across dimensions against the large-d asymptote.
struct AsymptoteTrendReport {
    std::vector<int> dims;
    std::vector<double> beta_hats;
    std::vector<double> predicted;  // beta_large_d_asymptote per dim
    std::vector<double> ratios;     // beta_hat / predicted
    bool ratios_positive = false;
    bool increasing = false;    // beta_hat strictly increasing in d
    double ratio_spread = 0.0;  // max - min of ratios
    bool ok = false;            // positive ratios with spread <= 1
};
AsymptoteTrendReport asymptote_trend(const std::vector<int>& dims,
                                     const std::vector<double>& beta_hats);

// Assignment on i.i.d. cost matrices (no geometry): mean optimal cost per
// matrix order, with the qualitative checks that the mean grows with n and
// stays bounded (the exponential mean approaches pi^2/6).
enum class LinkDistribution { Uniform, Exponential };
struct RandomLinkReport {
    LinkDistribution distribution = LinkDistribution::Uniform;
    std::vector<long> sizes;  // matrix orders
    long trials = 0;
    std::vector<double> means;
    std::vector<double> stderrs;
    bool increasing = false;
    bool bounded = false;  // largest mean < 2
    bool ok = false;
};
RandomLinkReport random_link_compare(const std::vector<long>& sizes, LinkDistribution distribution,
                                     long trials, std::uint64_t seed, int workers = 1);

}  // namespace mbm
