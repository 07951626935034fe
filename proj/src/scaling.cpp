#include "mbm/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbm/assign.hpp"
#include "mbm/decimation.hpp"
#include "mbm/exact_matcher.hpp"
#include "mbm/rng.hpp"

namespace mbm {

namespace {

constexpr double kInstanceTol = 1e-9;
constexpr double kGrowthBand = 0.25;
constexpr double kRatioSpreadMax = 1.0;

// One dimension gets its dedicated solvers; everything else goes through the
// general matcher.
double solve_length(const PointCloud& x, const PointCloud& y) {
    if (x.dim() == 1) {
        if (x.size() == y.size()) return sorted_match_1d(x, y).total_length;
        return detail::line_match_dp(x, y).total_length;
    }
    return solve_exact(x, y).total_length;
}

double power_alpha(int dim) { return 1.0 - 1.0 / static_cast<double>(dim); }

struct Fit2 {
    double b0 = 0.0;
    double b1 = 0.0;
    double var_b0 = 0.0;
    bool ok = false;
};

// Weighted least squares for y ~ b0*phi0 + b1*phi1, weights 1/sigma^2 (unit
// weight where sigma is zero, e.g. synthetic noise-free inputs).
Fit2 weighted_fit2(const std::vector<double>& phi0, const std::vector<double>& phi1,
                   const std::vector<double>& y, const std::vector<double>& sigma) {
    double s00 = 0.0, s01 = 0.0, s11 = 0.0, r0 = 0.0, r1 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double w = sigma[i] > 0.0 ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        s00 += w * phi0[i] * phi0[i];
        s01 += w * phi0[i] * phi1[i];
        s11 += w * phi1[i] * phi1[i];
        r0 += w * phi0[i] * y[i];
        r1 += w * phi1[i] * y[i];
    }
    Fit2 f;
    const double det = s00 * s11 - s01 * s01;
    if (!(det > 1e-12 * s00 * s11)) return f;
    f.b0 = (r0 * s11 - r1 * s01) / det;
    f.b1 = (r1 * s00 - r0 * s01) / det;
    f.var_b0 = s11 / det;
    f.ok = true;
    return f;
}

long broadcast_trials(const std::vector<long>& trials_per_size, std::size_t n_sizes,
                      std::size_t i, const char* who) {
    if (trials_per_size.size() != n_sizes && trials_per_size.size() != 1)
        throw std::invalid_argument(std::string(who) +
                                    ": trial counts must match sizes or be a single count");
    const long t = trials_per_size[trials_per_size.size() == 1 ? 0 : i];
    if (t < 2) throw std::invalid_argument(std::string(who) + ": need at least two trials per size");
    return t;
}

void require_increasing_sizes(const std::vector<long>& sizes, long min_size, const char* who) {
    if (sizes.empty()) throw std::invalid_argument(std::string(who) + ": empty size ladder");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < min_size)
            throw std::invalid_argument(std::string(who) + ": sizes below the minimum");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw std::invalid_argument(std::string(who) + ": sizes must be strictly increasing");
    }
}

}  // namespace

std::vector<double> sample_lengths(int dim, CardinalityMode mode, double size, long trials,
                                   std::uint64_t seed, int workers) {
    if (dim < 1) throw std::invalid_argument("sample_lengths: dim must be >= 1");
    if (trials < 0) throw std::invalid_argument("sample_lengths: negative trial count");
    if (!(size >= 0.0)) throw std::invalid_argument("sample_lengths: size must be nonnegative");
    if (mode == CardinalityMode::Fixed && size != std::floor(size))
        throw std::invalid_argument("sample_lengths: fixed cardinality must be integral");
    auto one = [=](long t) {
        const std::uint64_t s = substream(seed, {static_cast<std::uint64_t>(t)});
        const SampleSpec spec = mode == CardinalityMode::Fixed
                                    ? SampleSpec::fixed(dim, static_cast<long>(size), s)
                                    : SampleSpec::poisson(dim, size, s);
        try {
            const auto [x, y] = sample_pair(spec, spec);
            return solve_length(x, y);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
        }
    };
    return run_indexed(trials, workers, one);
}

MeanStderr estimate_mean(int dim, CardinalityMode mode, double size, long trials,
                         std::uint64_t seed, int workers) {
    return mean_stderr(sample_lengths(dim, mode, size, trials, seed, workers));
}

ScalingEstimate fit_beta(int dim, const std::vector<long>& sizes, const std::vector<double>& means,
                         const std::vector<double>& stderrs, const std::vector<long>& trials) {
    if (dim < 3) throw std::invalid_argument("fit_beta: requires dim >= 3");
    const std::size_t n = sizes.size();
    if (n < 4) throw std::invalid_argument("fit_beta: requires at least four sizes");
    if (means.size() != n || stderrs.size() != n)
        throw std::invalid_argument("fit_beta: sizes, means, and stderrs must align");
    require_increasing_sizes(sizes, 1, "fit_beta");
    if (sizes.back() < 10 * sizes.front())
        throw std::invalid_argument("fit_beta: sizes must span at least a decade");

    ScalingEstimate est;
    est.dim = dim;
    est.sizes = sizes;
    est.means = means;
    est.stderrs = stderrs;
    est.trials = trials;
    const double alpha = power_alpha(dim);
    const double gamma = 0.5 - 1.0 / static_cast<double>(dim);
    est.stabilization.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        est.stabilization[i] = means[i] / std::pow(static_cast<double>(sizes[i]), alpha);

    auto fit_from = [&](std::size_t lo) {
        std::vector<double> p0, p1, yy, sg;
        for (std::size_t i = lo; i < n; ++i) {
            const double nn = static_cast<double>(sizes[i]);
            p0.push_back(std::pow(nn, alpha));
            p1.push_back(std::pow(nn, alpha - gamma));
            yy.push_back(means[i]);
            sg.push_back(stderrs[i]);
        }
        return weighted_fit2(p0, p1, yy, sg);
    };
    const Fit2 full = fit_from(0);
    if (!full.ok) return est;
    est.beta_hat = full.b0;
    est.correction_hat = full.b0 != 0.0 ? full.b1 / full.b0 : 0.0;
    est.beta_ci = 2.0 * std::sqrt(std::max(full.var_b0, 0.0));
    est.beta_drop_smallest = full.b0;
    if (n >= 5) {
        const Fit2 tail = fit_from(1);
        if (tail.ok) est.beta_drop_smallest = tail.b0;
    }
    est.fit_ok = est.beta_hat > 0.0;
    return est;
}

ScalingEstimate scan_beta(int dim, CardinalityMode mode, const std::vector<long>& sizes,
                          const std::vector<long>& trials_per_size, std::uint64_t seed,
                          int workers) {
    require_increasing_sizes(sizes, 0, "scan_beta");
    std::vector<double> means;
    std::vector<double> ses;
    std::vector<long> trials;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const long t = broadcast_trials(trials_per_size, sizes.size(), i, "scan_beta");
        const std::uint64_t s =
            substream(seed, {static_cast<std::uint64_t>(dim),
                             static_cast<std::uint64_t>(mode == CardinalityMode::Fixed ? 0 : 1),
                             static_cast<std::uint64_t>(sizes[i])});
        const MeanStderr ms =
            estimate_mean(dim, mode, static_cast<double>(sizes[i]), t, s, workers);
        means.push_back(ms.mean);
        ses.push_back(ms.std_error);
        trials.push_back(t);
    }
    return fit_beta(dim, sizes, means, ses, trials);
}

bool stabilization_settled(const ScalingEstimate& est) {
    const auto& r = est.stabilization;
    if (r.size() < 5) return false;
    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) d.push_back(std::abs(r[i + 1] - r[i]));
    const std::size_t n = d.size();
    return d[n - 2] <= d[n - 3] && d[n - 1] <= d[n - 2];
}

PoissonDiscrepancyReport check_poisson_discrepancy(double lambda, long trials,
                                                   std::uint64_t seed) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("check_poisson_discrepancy: lambda must be positive");
    if (trials < 2) throw std::invalid_argument("check_poisson_discrepancy: need two trials");
    std::vector<double> diffs(static_cast<std::size_t>(trials));
    for (long t = 0; t < trials; ++t) {
        Rng g(substream(seed, {static_cast<std::uint64_t>(t)}));
        const long n1 = g.next_poisson(lambda);
        const long n2 = g.next_poisson(lambda);
        diffs[static_cast<std::size_t>(t)] = static_cast<double>(std::labs(n1 - n2));
    }
    const MeanStderr ms = mean_stderr(diffs);
    PoissonDiscrepancyReport rep;
    rep.lambda = lambda;
    rep.trials = trials;
    rep.mean_abs_diff = ms.mean;
    rep.std_error = ms.std_error;
    rep.bound = std::sqrt(2.0 * lambda);
    rep.ok = ms.mean <= rep.bound + 3.0 * ms.std_error;
    return rep;
}

SubadditivityReport check_mean_subadditivity(int dim, double size, long m, long trials,
                                             std::uint64_t seed, int workers) {
    if (dim < 1) throw std::invalid_argument("check_mean_subadditivity: dim must be >= 1");
    if (!(size > 0.0))
        throw std::invalid_argument("check_mean_subadditivity: size must be positive");
    if (m < 1) throw std::invalid_argument("check_mean_subadditivity: m must be >= 1");
    if (trials < 2) throw std::invalid_argument("check_mean_subadditivity: need two trials");

    SubadditivityReport rep;
    rep.dim = dim;
    rep.size = size;
    rep.m = m;
    rep.trials = trials;
    int k_levels = 0;
    while ((2L << k_levels) <= m) ++k_levels;
    rep.k_levels = k_levels;

    const double cell_size = size / std::pow(static_cast<double>(m), dim);
    const MeanStderr whole = mean_stderr(
        sample_lengths(dim, CardinalityMode::Poisson, size, trials, substream(seed, {1}), workers));
    const MeanStderr cell = mean_stderr(sample_lengths(
        dim, CardinalityMode::Poisson, cell_size, trials, substream(seed, {2}), workers));
    rep.mean_whole = whole.mean;
    rep.se_whole = whole.std_error;
    rep.mean_cell = cell.mean;
    rep.se_cell = cell.std_error;

    const double scale = std::pow(static_cast<double>(m), dim - 1);
    const double half_dim_rate = static_cast<double>(dim) / 2.0 - 1.0;
    double sum_general = 0.0;
    for (int k = 0; k <= k_levels; ++k) sum_general += std::exp2(k * half_dim_rate);
    rep.rhs_general =
        scale * cell.mean + std::exp2(dim) * std::sqrt(2.0 * dim * size) * sum_general;
    rep.dyadic_applicable = (1L << k_levels) == m;
    if (rep.dyadic_applicable) {
        double sum_dyadic = 0.0;
        for (int k = 1; k <= k_levels; ++k) sum_dyadic += std::exp2(k * half_dim_rate);
        rep.rhs_dyadic = scale * cell.mean + std::sqrt(2.0 * dim * size) * sum_dyadic;
    }
    rep.combined_se =
        std::sqrt(whole.std_error * whole.std_error + scale * scale * cell.std_error * cell.std_error);
    const double slack = 3.0 * rep.combined_se;
    rep.ok = whole.mean <= rep.rhs_general + slack &&
             (!rep.dyadic_applicable || whole.mean <= rep.rhs_dyadic + slack);
    return rep;
}

DepoissonizationReport check_depoissonization(int dim, long size, long trials, std::uint64_t seed,
                                              int workers) {
    if (dim < 1) throw std::invalid_argument("check_depoissonization: dim must be >= 1");
    if (size < 1) throw std::invalid_argument("check_depoissonization: size must be >= 1");
    if (trials < 2) throw std::invalid_argument("check_depoissonization: need two trials");
    (void)workers;  // trial loop is cheap next to the heavy estimators; kept serial

    DepoissonizationReport rep;
    rep.dim = dim;
    rep.size = size;
    rep.trials = trials;
    std::vector<double> fixed(static_cast<std::size_t>(trials));
    std::vector<double> poisson(static_cast<std::size_t>(trials));
    const double root_d = std::sqrt(static_cast<double>(dim));
    for (long t = 0; t < trials; ++t) {
        const std::uint64_t s = substream(seed, {static_cast<std::uint64_t>(t)});
        Rng counts(substream(s, {0}));
        const long n1 = counts.next_poisson(static_cast<double>(size));
        const long n2 = counts.next_poisson(static_cast<double>(size));
        auto draw = [&](std::uint64_t tag, long count) {
            Rng g(substream(s, {tag}));
            std::vector<double> coords(static_cast<std::size_t>(count) * dim);
            for (auto& c : coords) c = g.next_unit();
            return coords;
        };
        const std::vector<double> cx = draw(1, std::max(n1, size));
        const std::vector<double> cy = draw(2, std::max(n2, size));
        auto prefix = [&](const std::vector<double>& c, long count) {
            return PointCloud(dim, {c.begin(), c.begin() + count * dim});
        };
        const double l_poisson = solve_length(prefix(cx, n1), prefix(cy, n2));
        const double l_fixed = solve_length(prefix(cx, size), prefix(cy, size));
        poisson[static_cast<std::size_t>(t)] = l_poisson;
        fixed[static_cast<std::size_t>(t)] = l_fixed;
        const double allowance =
            root_d * static_cast<double>(std::labs(n1 - size) + std::labs(n2 - size));
        const double margin = std::abs(l_fixed - l_poisson) - allowance;
        rep.worst_coupling_margin = std::max(rep.worst_coupling_margin, margin);
        if (margin > kInstanceTol) ++rep.coupling_violations;
    }
    const MeanStderr f = mean_stderr(fixed);
    const MeanStderr p = mean_stderr(poisson);
    rep.fixed_mean = f.mean;
    rep.fixed_se = f.std_error;
    rep.poisson_mean = p.mean;
    rep.poisson_se = p.std_error;
    rep.mean_gap = std::abs(f.mean - p.mean);
    rep.mean_bound = 2.0 * std::sqrt(2.0 * dim * static_cast<double>(size));
    const double combined = std::sqrt(f.std_error * f.std_error + p.std_error * p.std_error);
    rep.mean_ok = rep.mean_gap <= rep.mean_bound + 3.0 * combined;
    rep.coupling_ok = rep.coupling_violations == 0;
    return rep;
}

ConcentrationReport check_concentration(int dim, long size, long trials,
                                        std::vector<double> t_grid, std::uint64_t seed,
                                        int workers) {
    if (dim < 1) throw std::invalid_argument("check_concentration: dim must be >= 1");
    if (size < 1) throw std::invalid_argument("check_concentration: size must be >= 1");
    if (trials < 2) throw std::invalid_argument("check_concentration: need two trials");
    if (t_grid.empty()) throw std::invalid_argument("check_concentration: empty t grid");
    for (double t : t_grid)
        if (!(t > 0.0)) throw std::invalid_argument("check_concentration: thresholds must be positive");

    const std::vector<double> lengths = sample_lengths(
        dim, CardinalityMode::Fixed, static_cast<double>(size), trials, substream(seed, {3}), workers);
    const double denom = std::pow(static_cast<double>(size), power_alpha(dim));
    std::vector<double> normalized(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) normalized[i] = lengths[i] / denom;
    const double mean = pairwise_sum(normalized) / static_cast<double>(trials);

    ConcentrationReport rep;
    rep.dim = dim;
    rep.size = size;
    rep.trials = trials;
    rep.mean_normalized = mean;
    rep.t_grid = std::move(t_grid);
    const double rate = std::pow(static_cast<double>(size), 1.0 - 2.0 / dim);
    rep.ok = true;
    for (double t : rep.t_grid) {
        long over = 0;
        for (double v : normalized)
            if (std::abs(v - mean) > t) ++over;
        const double tail = static_cast<double>(over) / static_cast<double>(trials);
        const double bound = 2.0 * std::exp(-rate * t * t / (8.0 * dim));
        const double se = std::sqrt(tail * (1.0 - tail) / static_cast<double>(trials));
        rep.empirical_tail.push_back(tail);
        rep.analytic_bound.push_back(bound);
        rep.tail_se.push_back(se);
        if (tail > bound + 3.0 * se) rep.ok = false;
    }
    return rep;
}

std::vector<double> default_t_grid() {
    std::vector<double> grid;
    for (int k = 1; k <= 10; ++k) grid.push_back(0.45 * k);
    return grid;
}

AnomalousReport anomalous_scaling_report(int dim, const std::vector<long>& sizes,
                                         const std::vector<long>& trials_per_size,
                                         std::uint64_t seed, int workers) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("anomalous_scaling_report: dim must be 1 or 2");
    require_increasing_sizes(sizes, 2, "anomalous_scaling_report");

    AnomalousReport rep;
    rep.dim = dim;
    rep.sizes = sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const long t = broadcast_trials(trials_per_size, sizes.size(), i, "anomalous_scaling_report");
        const double n = static_cast<double>(sizes[i]);
        const std::uint64_t s = substream(seed, {static_cast<std::uint64_t>(dim),
                                                 static_cast<std::uint64_t>(sizes[i])});
        const std::vector<double> lengths =
            sample_lengths(dim, CardinalityMode::Fixed, n, t, s, workers);
        const MeanStderr ms = mean_stderr(lengths);
        rep.trials.push_back(t);
        rep.means.push_back(ms.mean);
        rep.stderrs.push_back(ms.std_error);
        if (dim == 1) {
            std::vector<double> scaled(lengths.size());
            for (std::size_t j = 0; j < lengths.size(); ++j) scaled[j] = lengths[j] / std::sqrt(n);
            rep.normalized.push_back(ms.mean / std::sqrt(n));
            rep.normalized_variance.push_back(sample_variance(scaled));
        } else {
            rep.normalized.push_back(ms.mean / std::sqrt(n * std::log(n)));
        }
    }
    if (sizes.size() < 2) {
        rep.trend_checked = false;
        rep.ok = true;
        return rep;
    }
    rep.trend_checked = true;
    if (dim == 1) {
        rep.variance_ratio = rep.normalized_variance.back() / rep.normalized_variance.front();
        rep.ok = rep.variance_ratio > 0.5;
    } else {
        const auto [lo, hi] = std::minmax_element(rep.normalized.begin(), rep.normalized.end());
        rep.band_ratio = *hi / *lo;
        rep.ok = rep.band_ratio <= 1.5;
    }
    return rep;
}

DecimationGrowthReport decimation_growth(const std::vector<long>& sizes,
                                         const std::vector<long>& trials_per_size,
                                         std::uint64_t seed, int workers) {
    require_increasing_sizes(sizes, 2, "decimation_growth");
    DecimationGrowthReport rep;
    rep.sizes = sizes;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const long t = broadcast_trials(trials_per_size, sizes.size(), i, "decimation_growth");
        const long n = sizes[i];
        int log2n = 0;
        while ((1L << (log2n + 1)) <= n) ++log2n;
        const int depth = std::max(1, log2n / 2);  // about one point per leaf cell per side
        auto one = [=](long trial) {
            const std::uint64_t s = substream(seed, {static_cast<std::uint64_t>(n),
                                                     static_cast<std::uint64_t>(trial)});
            const SampleSpec spec = SampleSpec::fixed(2, n, s);
            const auto [x, y] = sample_pair(spec, spec);
            return decimation_match(x, y, depth).matching.total_length;
        };
        const MeanStderr ms = mean_stderr(run_indexed(t, workers, one));
        rep.trials.push_back(t);
        rep.depths.push_back(depth);
        rep.means.push_back(ms.mean);
        rep.stderrs.push_back(ms.std_error);
        rep.ratios.push_back(ms.mean / (std::sqrt(static_cast<double>(n)) *
                                        std::log(static_cast<double>(n))));
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double phi = std::sqrt(static_cast<double>(sizes[i])) *
                           std::log(static_cast<double>(sizes[i]));
        const double sg = rep.stderrs[i];
        const double w = sg > 0.0 ? 1.0 / (sg * sg) : 1.0;
        num += w * phi * rep.means[i];
        den += w * phi * phi;
    }
    rep.c_fit = den > 0.0 ? num / den : 0.0;
    rep.max_rel_dev = 0.0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double phi = std::sqrt(static_cast<double>(sizes[i])) *
                           std::log(static_cast<double>(sizes[i]));
        const double ref = rep.c_fit * phi;
        if (ref > 0.0)
            rep.max_rel_dev = std::max(rep.max_rel_dev, std::abs(rep.means[i] - ref) / ref);
    }
    rep.ok = rep.c_fit > 0.0 && rep.max_rel_dev <= kGrowthBand;
    return rep;
}

double beta_large_d_asymptote(int dim) {
    if (dim < 1) throw std::invalid_argument("beta_large_d_asymptote: dim must be >= 1");
    return std::sqrt(static_cast<double>(dim) / (2.0 * std::numbers::e * std::numbers::pi));
}

AsymptoteTrendReport asymptote_trend(const std::vector<int>& dims,
                                     const std::vector<double>& beta_hats) {
    if (dims.size() != beta_hats.size())
        throw std::invalid_argument("asymptote_trend: dims and estimates must align");
    if (dims.size() < 3)
        throw std::invalid_argument("asymptote_trend: need at least three dimensions");
    for (std::size_t i = 0; i + 1 < dims.size(); ++i)
        if (dims[i + 1] <= dims[i])
            throw std::invalid_argument("asymptote_trend: dimensions must be strictly increasing");

    AsymptoteTrendReport rep;
    rep.dims = dims;
    rep.beta_hats = beta_hats;
    rep.ratios_positive = true;
    rep.increasing = true;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const double pred = beta_large_d_asymptote(dims[i]);
        rep.predicted.push_back(pred);
        rep.ratios.push_back(beta_hats[i] / pred);
        if (!(rep.ratios.back() > 0.0)) rep.ratios_positive = false;
        if (i > 0 && beta_hats[i] <= beta_hats[i - 1]) rep.increasing = false;
    }
    const auto [lo, hi] = std::minmax_element(rep.ratios.begin(), rep.ratios.end());
    rep.ratio_spread = *hi - *lo;
    rep.ok = rep.ratios_positive && rep.ratio_spread <= kRatioSpreadMax;
    return rep;
}

RandomLinkReport random_link_compare(const std::vector<long>& sizes,
                                     LinkDistribution distribution, long trials,
                                     std::uint64_t seed, int workers) {
    require_increasing_sizes(sizes, 1, "random_link_compare");
    if (trials < 2) throw std::invalid_argument("random_link_compare: need two trials");

    RandomLinkReport rep;
    rep.distribution = distribution;
    rep.sizes = sizes;
    rep.trials = trials;
    for (long n : sizes) {
        auto one = [=](long t) {
            Rng g(substream(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(t)}));
            std::vector<double> costs(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
            for (auto& c : costs)
                c = distribution == LinkDistribution::Uniform ? g.next_unit()
                                                              : g.next_exponential();
            const AssignResult res =
                min_cost_assignment(static_cast<int>(n), static_cast<int>(n), [&](int i, int j) {
                    return costs[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(j)];
                });
            return res.cost;
        };
        const MeanStderr ms = mean_stderr(run_indexed(trials, workers, one));
        rep.means.push_back(ms.mean);
        rep.stderrs.push_back(ms.std_error);
    }
    rep.increasing = true;
    for (std::size_t i = 0; i + 1 < rep.means.size(); ++i)
        if (rep.means[i + 1] <= rep.means[i]) rep.increasing = false;
    rep.bounded = rep.means.back() < 2.0;
    rep.ok = rep.increasing && rep.bounded;
    return rep;
}

}  // namespace mbm
