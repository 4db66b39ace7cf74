#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcusum {

/// Raised when an observation lies outside the support of a density.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised for inconsistent laws, configs, or arguments.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Closed set of parametric families. Adding a family means extending
// PhaseDensity, log_density, LlrKernel, kl_divergence and the JSON codec.
enum class Family { gaussian_unit_var, gaussian, poisson };

const char* family_name(Family f) noexcept;

/// One phase's density. Immutable after construction.
class PhaseDensity {
public:
    static PhaseDensity gaussian_unit_var(double mean);
    static PhaseDensity gaussian(double mean, double variance);
    static PhaseDensity poisson(double rate);

    Family family() const noexcept { return family_; }
    bool is_gaussian() const noexcept { return family_ != Family::poisson; }

    // Gaussian mean, or Poisson rate.
    double location() const noexcept { return location_; }
    // 1 for unit-variance Gaussians; the rate for Poisson.
    double variance() const noexcept;

    friend bool operator==(const PhaseDensity&, const PhaseDensity&) = default;

private:
    PhaseDensity(Family f, double loc, double var) : family_(f), location_(loc), variance_(var) {}

    Family family_;
    double location_;
    double variance_;
};

/// Maps absolute time n >= 1 to its phase in 1..period.
constexpr std::int64_t phase_of(std::int64_t n, std::int64_t period) noexcept {
    return ((n - 1) % period) + 1;
}

/// A periodic law: T phase densities, applied cyclically.
class IpidLaw {
public:
    explicit IpidLaw(std::vector<PhaseDensity> phases);

    std::int64_t period() const noexcept { return static_cast<std::int64_t>(phases_.size()); }
    // 1-based phase index.
    const PhaseDensity& phase(std::int64_t p) const { return phases_.at(static_cast<std::size_t>(p - 1)); }
    const PhaseDensity& at_time(std::int64_t n) const { return phase(phase_of(n, period())); }
    std::span<const PhaseDensity> phases() const noexcept { return phases_; }

    friend bool operator==(const IpidLaw&, const IpidLaw&) = default;

private:
    std::vector<PhaseDensity> phases_;
};

/// Natural log of the density (or mass) at x. Throws DomainError outside the support.
double log_density(const PhaseDensity& d, double x);

/// True if x is in the support of d.
bool in_support(const PhaseDensity& d, double x) noexcept;

/// Precompiled log-likelihood ratio log g(x) - log f(x) for one phase.
///
/// Both supported family pairs give a ratio that is a polynomial of degree
/// at most two in x, so the kernel stores three coefficients plus the
/// support. Every detector goes through this type so that independent code
/// paths (single stream, bank, multi-stream) agree bitwise.
class LlrKernel {
public:
    LlrKernel(const PhaseDensity& f, const PhaseDensity& g);

    double operator()(double x) const;

    bool counts() const noexcept { return counts_; }

private:
    double c0_;
    double c1_;
    double c2_;
    bool counts_;
};

/// log g(x) - log f(x).
double llr(const PhaseDensity& f, const PhaseDensity& g, double x);

/// Closed-form D(g || f). Throws ConfigError for mixed Gaussian/Poisson pairs.
double kl_divergence(const PhaseDensity& g, const PhaseDensity& f);

/// Mean over one period of the phase-wise divergences D(g_i || f_i).
double avg_kl(const IpidLaw& pre, const IpidLaw& post);

/// Per-phase kernels for a (pre, post) pair, with an optional phase offset so
/// that sample 1 can be aligned to any phase.
class LlrTable {
public:
    LlrTable(const IpidLaw& pre, const IpidLaw& post, std::int64_t phase_offset = 0);

    std::int64_t period() const noexcept { return static_cast<std::int64_t>(kernels_.size()); }
    std::int64_t phase_at(std::int64_t n) const noexcept { return phase_of(n + offset_, period()); }
    double operator()(std::int64_t n, double x) const {
        return kernels_[static_cast<std::size_t>(phase_at(n) - 1)](x);
    }
    const LlrKernel& kernel(std::int64_t phase) const { return kernels_.at(static_cast<std::size_t>(phase - 1)); }

private:
    std::vector<LlrKernel> kernels_;
    std::int64_t offset_;
};

/// Pre/post law pair for one monitored stream (or one simulated scenario).
struct StreamLaws {
    IpidLaw pre;
    IpidLaw post;
};

/// A pre-change law, candidate post-change laws and the change point.
struct ChangeConfig {
    IpidLaw pre;
    std::vector<IpidLaw> post;
    std::optional<std::int64_t> change_point;  // nullopt: no change

    /// Throws ConfigError unless periods agree, every candidate differs from
    /// the pre law in some phase and all divergences are finite.
    void validate() const;
};

}  // namespace pcusum
