#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcusum/model.hpp"

namespace pcusum {

/// Partition of the phases 1..T into E contiguous batches (episodes).
/// Batch e (1-based) covers phases boundaries[e-1]+1 .. boundaries[e].
class BatchSpec {
public:
    /// boundaries must read 0 = N_0 < N_1 < ... < N_E = period.
    BatchSpec(std::int64_t period, std::vector<std::int64_t> boundaries);

    /// Builds a spec from batch lengths. If the lengths sum to less than the
    /// period, the remainder becomes one final batch.
    static BatchSpec from_lengths(std::int64_t period, std::span<const std::int64_t> lengths);

    std::int64_t period() const noexcept { return boundaries_.back(); }
    std::size_t batches() const noexcept { return boundaries_.size() - 1; }
    std::int64_t first_phase(std::size_t e) const { return boundaries_.at(e - 1) + 1; }
    std::int64_t last_phase(std::size_t e) const { return boundaries_.at(e); }
    std::int64_t length(std::size_t e) const { return last_phase(e) - first_phase(e) + 1; }
    /// 1-based batch containing the given phase.
    std::size_t batch_of(std::int64_t phase) const;
    std::span<const std::int64_t> boundaries() const noexcept { return boundaries_; }

private:
    std::vector<std::int64_t> boundaries_;
};

/// One fitted density per batch.
struct StepParams {
    Family family;
    std::vector<PhaseDensity> values;
};

struct FitOptions {
    bool fit_variance = false;     // Gaussian only; otherwise variance is fixed at 1
    double rate_floor = 0.5;       // rate used for a Poisson batch with no events
    double variance_floor = 1e-6;
};

/// Per-batch maximum likelihood fit over whole training periods. The first
/// training sample is phase 1. family selects Poisson or Gaussian.
StepParams fit_step_params(std::span<const double> training, const BatchSpec& spec, Family family,
                           const FitOptions& opts = {});

/// Repeats each batch's density over its phases.
IpidLaw expand_to_law(const BatchSpec& spec, const StepParams& params);

/// Multiplies every phase's rate (Poisson) or mean (Gaussian) by factor.
IpidLaw scale_post(const IpidLaw& base, double factor);

}  // namespace pcusum
