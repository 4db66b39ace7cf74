#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pcusum/model.hpp"

namespace pcusum {

/// Periodic-CUSUM state: samples consumed and the current statistic W_n.
struct CusumState {
    std::int64_t n = 0;
    double w = 0.0;

    friend bool operator==(const CusumState&, const CusumState&) = default;
};

constexpr CusumState cusum_init() noexcept { return {}; }

/// W_{n+1} = max(W_n, 0) + z.
constexpr CusumState cusum_advance(CusumState s, double z) noexcept { return {s.n + 1, std::max(s.w, 0.0) + z}; }

/// One recursion step on observation x, which is sample s.n + 1.
CusumState cusum_step(CusumState s, double x, const IpidLaw& pre, const IpidLaw& post);

/// Direct O(n^2) evaluation of max over start points k of sum_{i=k}^{n} Z_i.
/// Oracle for the recursion; never used by the detectors themselves.
double brute_force_statistic(std::span<const double> xs, const IpidLaw& pre, const IpidLaw& post,
                             std::int64_t phase_offset = 0);

/// Streaming detector: feed one observation, get back the new state and
/// whether the statistic is strictly above the threshold.
class PeriodicCusum {
public:
    struct Step {
        CusumState state;
        double z;
        bool crossed;
    };

    PeriodicCusum(const IpidLaw& pre, const IpidLaw& post, double threshold, std::int64_t phase_offset = 0);

    Step step(double x) {
        const double z = table_(state_.n + 1, x);
        state_ = cusum_advance(state_, z);
        return {state_, z, state_.w > threshold_};
    }

    const CusumState& state() const noexcept { return state_; }
    const LlrTable& table() const noexcept { return table_; }
    double threshold() const noexcept { return threshold_; }
    void reset() noexcept { state_ = cusum_init(); }

private:
    LlrTable table_;
    double threshold_;
    CusumState state_;
};

struct TrajectoryRow {
    std::int64_t n;
    std::int64_t phase;
    double x;
    double z;
    double w;
};

struct DetectionRun {
    bool stopped = false;
    std::optional<std::int64_t> stop_time;  // empty when censored
    std::int64_t samples = 0;               // samples consumed (stop time or censoring point)
    double threshold = 0.0;
    std::vector<TrajectoryRow> trajectory;  // filled only on request
};

struct RunOptions {
    bool record_trajectory = false;
    std::int64_t phase_offset = 0;
};

/// Runs the stopping rule inf{n : W_n > A} over xs, censoring at
/// min(horizon, xs.size()). DomainError messages carry the sample index.
DetectionRun run_detector(std::span<const double> xs, const IpidLaw& pre, const IpidLaw& post, double threshold,
                          std::int64_t horizon, const RunOptions& opts = {});

/// Threshold meeting a mean-time-to-false-alarm target: A = log(beta).
double threshold_for_mtfa(double beta);

/// CSV with columns n,phase,x,Z,W.
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows);

}  // namespace pcusum
