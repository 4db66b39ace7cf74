#pragma once

// Test-only reference computations. These avoid the library's
// recursions and LLR kernels: likelihood ratios come from log_density
// differences and the statistics are evaluated from their defining sums.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pcusum/model.hpp"

namespace oracle {

// Z_i = log g_i(x_i) - log f_i(x_i), phases starting at 1.
inline std::vector<double> log_ratios(std::span<const double> xs, const pcusum::IpidLaw& pre,
                                      const pcusum::IpidLaw& post) {
    std::vector<double> z(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i) + 1;
        z[i] = pcusum::log_density(post.at_time(n), xs[i]) - pcusum::log_density(pre.at_time(n), xs[i]);
    }
    return z;
}

// sum_{k=1}^{n} prod_{i=k}^{n} exp(z_i), evaluated directly.
inline double sr_double_sum(std::span<const double> z) {
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double prod = 1.0;
        for (std::size_t i = k; i < z.size(); ++i) prod *= std::exp(z[i]);
        total += prod;
    }
    return total;
}

// Periodic-CUSUM stop time from scratch: first n whose max-over-k suffix sum
// crosses the threshold (strict or not). Returns 0 if never.
inline std::int64_t cusum_stop_brute(std::span<const double> z, double threshold, bool strict) {
    for (std::size_t n = 1; n <= z.size(); ++n) {
        double best = -INFINITY;
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += z[i];
            best = std::max(best, s);
        }
        if (strict ? best > threshold : best >= threshold) return static_cast<std::int64_t>(n);
    }
    return 0;
}

// Relative agreement with an absolute floor of 1 in the scale.
inline bool close(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle
