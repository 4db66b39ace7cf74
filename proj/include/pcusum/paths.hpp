#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <span>

namespace pcusum {

/// serial is the reference loop; parallel runs the same body under OpenMP.
/// Every path owns a seed derived from its index, so both give identical results.
enum class Exec { serial, parallel };

template <class Body>
void for_each_path(std::int64_t paths, Exec exec, Body&& body) {
    if (exec == Exec::serial) {
        for (std::int64_t i = 0; i < paths; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < paths; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(pcusum_path_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation
    double se = 0.0;  // sd / sqrt(count)
};

// Two-pass in index order, so the result does not depend on the thread schedule.
inline Summary summarize(std::span<const double> v) {
    Summary s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return s;
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(v.size()));
    return s;
}

}  // namespace pcusum
