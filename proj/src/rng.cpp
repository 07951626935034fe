#include "mbm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mbm {

double Rng::next_exponential() {
    // u in [0,1) so 1-u in (0,1] and the log is finite.
    return -std::log1p(-next_unit());
}

long Rng::next_poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::invalid_argument("poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;

    if (mean < 30.0) {
        // Inversion by sequential search. The cap is unreachable in
        // distribution (tail mass < 1e-300 for mean < 30) and only guards
        // against cdf stalling just below a u drawn at the top of [0,1).
        double p = std::exp(-mean);
        double cdf = p;
        const double u = next_unit();
        long k = 0;
        while (u > cdf && k < 4096) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    // Hormann's PTRS rejection sampler.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = next_unit() - 0.5;
        const double v = next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0))
            return static_cast<long>(kf);
    }
}

}  // namespace mbm
