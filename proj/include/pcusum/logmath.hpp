#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace pcusum {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(1 + e^x) without overflow; log1p_exp(-inf) == 0.
inline double log1p_exp(double x) noexcept {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

// log(sum_i e^{v_i}); -inf for an empty span or all -inf entries.
inline double log_sum_exp(std::span<const double> v) noexcept {
    if (v.empty()) return neg_inf;
    const double m = *std::max_element(v.begin(), v.end());
    if (m == neg_inf) return neg_inf;
    if (m == std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace pcusum
