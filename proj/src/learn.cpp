#include "pcusum/learn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcusum {

BatchSpec::BatchSpec(std::int64_t period, std::vector<std::int64_t> boundaries) : boundaries_(std::move(boundaries)) {
    if (period < 1) throw ConfigError("period must be >= 1");
    if (boundaries_.size() < 2 || boundaries_.front() != 0 || boundaries_.back() != period) {
        throw ConfigError("batch boundaries must start at 0 and end at the period " + std::to_string(period));
    }
    for (std::size_t i = 1; i < boundaries_.size(); ++i) {
        if (boundaries_[i] <= boundaries_[i - 1]) throw ConfigError("batch " + std::to_string(i) + " is empty");
    }
}

BatchSpec BatchSpec::from_lengths(std::int64_t period, std::span<const std::int64_t> lengths) {
    if (period < 1) throw ConfigError("period must be >= 1");
    std::vector<std::int64_t> b{0};
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        if (lengths[i] < 1) throw ConfigError("batch " + std::to_string(i + 1) + " is empty");
        b.push_back(b.back() + lengths[i]);
    }
    if (b.back() > period) {
        throw ConfigError("batch lengths sum to " + std::to_string(b.back()) + ", more than the period " +
                          std::to_string(period));
    }
    if (b.back() < period) b.push_back(period);
    return BatchSpec(period, std::move(b));
}

std::size_t BatchSpec::batch_of(std::int64_t phase) const {
    if (phase < 1 || phase > period()) throw ConfigError("phase out of range");
    const auto it = std::lower_bound(boundaries_.begin() + 1, boundaries_.end(), phase);
    return static_cast<std::size_t>(it - boundaries_.begin());
}

StepParams fit_step_params(std::span<const double> training, const BatchSpec& spec, Family family,
                           const FitOptions& opts) {
    const std::int64_t t = spec.period();
    const auto len = static_cast<std::int64_t>(training.size());
    if (len == 0 || len % t != 0) {
        throw ConfigError("training data has " + std::to_string(len) + " samples, not a positive multiple of the period " +
                          std::to_string(t));
    }
    const bool counts = family == Family::poisson;
    const std::int64_t periods = len / t;
    const std::size_t e_count = spec.batches();

    std::vector<double> sum(e_count, 0.0);
    for (std::int64_t i = 0; i < len; ++i) {
        const double x = training[static_cast<std::size_t>(i)];
        const std::size_t e = spec.batch_of(i % t + 1) - 1;
        if (counts ? !in_support(PhaseDensity::poisson(1.0), x) : !std::isfinite(x)) {
            throw DomainError("training sample " + std::to_string(i + 1) + " (" + std::to_string(x) +
                              ") is outside the support");
        }
        sum[e] += x;
    }

    StepParams out{counts ? Family::poisson : (opts.fit_variance ? Family::gaussian : Family::gaussian_unit_var), {}};
    for (std::size_t e = 1; e <= e_count; ++e) {
        const auto n = static_cast<double>(spec.length(e) * periods);
        const double mean = sum[e - 1] / n;
        if (counts) {
            out.values.push_back(PhaseDensity::poisson(mean > 0.0 ? mean : opts.rate_floor));
            continue;
        }
        if (!opts.fit_variance) {
            out.values.push_back(PhaseDensity::gaussian_unit_var(mean));
            continue;
        }
        double ss = 0.0;
        for (std::int64_t k = 0; k < periods; ++k) {
            for (std::int64_t p = spec.first_phase(e); p <= spec.last_phase(e); ++p) {
                const double r = training[static_cast<std::size_t>(k * t + p - 1)] - mean;
                ss += r * r;
            }
        }
        out.values.push_back(PhaseDensity::gaussian(mean, std::max(ss / n, opts.variance_floor)));
    }
    return out;
}

IpidLaw expand_to_law(const BatchSpec& spec, const StepParams& params) {
    if (params.values.size() != spec.batches()) {
        throw ConfigError("spec has " + std::to_string(spec.batches()) + " batches but " +
                          std::to_string(params.values.size()) + " parameters were given");
    }
    std::vector<PhaseDensity> phases;
    phases.reserve(static_cast<std::size_t>(spec.period()));
    for (std::size_t e = 1; e <= spec.batches(); ++e) {
        phases.insert(phases.end(), static_cast<std::size_t>(spec.length(e)), params.values[e - 1]);
    }
    return IpidLaw(std::move(phases));
}

IpidLaw scale_post(const IpidLaw& base, double factor) {
    if (!(factor > 0.0)) throw ConfigError("scale factor must be positive");
    std::vector<PhaseDensity> phases;
    phases.reserve(base.phases().size());
    for (const PhaseDensity& d : base.phases()) {
        switch (d.family()) {
            case Family::poisson: phases.push_back(PhaseDensity::poisson(d.location() * factor)); break;
            case Family::gaussian_unit_var:
                phases.push_back(PhaseDensity::gaussian_unit_var(d.location() * factor));
                break;
            case Family::gaussian: phases.push_back(PhaseDensity::gaussian(d.location() * factor, d.variance())); break;
        }
    }
    return IpidLaw(std::move(phases));
}

}  // namespace pcusum
