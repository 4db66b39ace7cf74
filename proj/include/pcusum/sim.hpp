#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pcusum/model.hpp"
#include "pcusum/paths.hpp"
#include "pcusum/rng.hpp"

namespace pcusum {

/// Synthetic i.p.i.d. stream: samples n < nu come from pre, n >= nu from
/// post. nu == nullopt means no change. Deterministic given the seed.
std::vector<double> generate(const IpidLaw& pre, const IpidLaw& post, std::optional<std::int64_t> nu,
                             std::int64_t horizon, std::uint64_t seed, std::int64_t phase_offset = 0);

/// Outcome of one simulated detector path.
struct PathOutcome {
    std::int64_t steps;  // samples consumed until the alarm, or the cap if censored
    bool stopped;
};

/// Core kernel: runs the Periodic-CUSUM from W = 0 on data drawn from
/// data_law, starting at absolute time start (which fixes the phase), until
/// W > threshold or max_steps samples have been consumed.
PathOutcome run_path(const LlrTable& table, const LawSampler& data, std::int64_t start, double threshold,
                     std::int64_t max_steps, Rng& rng);

struct MtfaEstimate {
    double mean = 0.0;       // censored paths count at the horizon
    double ci_half = 0.0;    // 95% half-width
    double censor_frac = 0.0;
    bool lower_bound = false;  // true when any path was censored
    std::int64_t paths = 0;
    std::int64_t horizon = 0;
};

/// Mean time to false alarm of the stopping rule W_n > A under no change.
MtfaEstimate estimate_mtfa(const StreamLaws& laws, double threshold, std::int64_t paths, std::int64_t horizon,
                           std::uint64_t seed, Exec exec = Exec::parallel);

struct WaddEstimate {
    double mean = 0.0;      // worst over change phases of the mean delay
    double ci_half = 0.0;   // 95% half-width at the worst phase
    std::int64_t worst_nu = 1;
    std::vector<double> per_nu;  // mean delay for nu = 1..T
    double censor_frac = 0.0;
};

/// Worst-case average detection delay. For each change time nu in 1..T the
/// statistic is started at 0 at nu and the delay tau - nu + 1 is averaged.
WaddEstimate estimate_wadd(const StreamLaws& laws, double threshold, std::int64_t paths, std::uint64_t seed,
                           std::int64_t horizon = 1'000'000, Exec exec = Exec::parallel);

struct PerfPoint {
    double threshold = 0.0;
    MtfaEstimate mtfa;
    WaddEstimate wadd;
    double theory_delay = 0.0;  // threshold / I
};

struct CurveOptions {
    double horizon_factor = 10.0;  // MTFA horizon = ceil(factor * e^A)
    std::int64_t wadd_horizon = 1'000'000;
    Exec exec = Exec::parallel;
};

/// One PerfPoint per threshold, each with its own derived seed.
std::vector<PerfPoint> tradeoff_curve(const StreamLaws& laws, std::span<const double> thresholds,
                                      std::int64_t paths, std::uint64_t seed, const CurveOptions& opts = {});

/// CSV columns: A,log_mtfa_est,mtfa_ci,wadd_est,wadd_ci,theory,censor_frac.
void write_curve_csv(std::ostream& out, std::span<const PerfPoint> points);

/// The two-phase Gaussian scenario used for the reference trade-off curve:
/// f = (N(0,1), N(0,1)), g = (N(1,1), N(0.5,1)).
StreamLaws reference_gaussian_scenario();

}  // namespace pcusum
