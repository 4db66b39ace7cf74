#include "pcusum/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pcusum {

const char* family_name(Family f) noexcept {
    switch (f) {
        case Family::gaussian_unit_var: return "gaussian_unit_var";
        case Family::gaussian: return "gaussian";
        case Family::poisson: return "poisson";
    }
    return "unknown";
}

PhaseDensity PhaseDensity::gaussian_unit_var(double mean) {
    if (!std::isfinite(mean)) throw ConfigError("gaussian mean must be finite");
    return PhaseDensity(Family::gaussian_unit_var, mean, 1.0);
}

PhaseDensity PhaseDensity::gaussian(double mean, double variance) {
    if (!std::isfinite(mean)) throw ConfigError("gaussian mean must be finite");
    if (!(variance > 0.0) || !std::isfinite(variance)) throw ConfigError("gaussian variance must be positive");
    return PhaseDensity(Family::gaussian, mean, variance);
}

PhaseDensity PhaseDensity::poisson(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("poisson rate must be positive");
    return PhaseDensity(Family::poisson, rate, rate);
}

double PhaseDensity::variance() const noexcept { return variance_; }

IpidLaw::IpidLaw(std::vector<PhaseDensity> phases) : phases_(std::move(phases)) {
    if (phases_.empty()) throw ConfigError("law needs at least one phase");
}

bool in_support(const PhaseDensity& d, double x) noexcept {
    if (!std::isfinite(x)) return false;
    if (d.family() == Family::poisson) return x >= 0.0 && std::floor(x) == x;
    return true;
}

namespace {

void require_support(const PhaseDensity& d, double x) {
    if (in_support(d, x)) return;
    std::ostringstream os;
    os << "observation " << x << " is outside the support of the " << family_name(d.family()) << " density";
    throw DomainError(os.str());
}

}  // namespace

double log_density(const PhaseDensity& d, double x) {
    require_support(d, x);
    if (d.family() == Family::poisson) {
        const double rate = d.location();
        return x * std::log(rate) - rate - std::lgamma(x + 1.0);
    }
    const double v = d.variance();
    const double r = x - d.location();
    return -0.5 * std::log(2.0 * std::numbers::pi * v) - r * r / (2.0 * v);
}

LlrKernel::LlrKernel(const PhaseDensity& f, const PhaseDensity& g) {
    if (f.is_gaussian() != g.is_gaussian()) {
        throw ConfigError(std::string("mismatched supports: ") + family_name(f.family()) + " vs " +
                          family_name(g.family()));
    }
    counts_ = !f.is_gaussian();
    if (counts_) {
        // x log(lg/lf) - (lg - lf); the log x! terms cancel.
        c0_ = f.location() - g.location();
        c1_ = std::log(g.location()) - std::log(f.location());
        c2_ = 0.0;
        return;
    }
    const double mf = f.location(), mg = g.location();
    if (f.family() == Family::gaussian_unit_var && g.family() == Family::gaussian_unit_var) {
        c0_ = 0.5 * (mf * mf - mg * mg);
        c1_ = mg - mf;
        c2_ = 0.0;
        return;
    }
    const double vf = f.variance(), vg = g.variance();
    // Coefficients written so that swapping f and g negates each one exactly.
    c0_ = 0.5 * (std::log(vf) - std::log(vg)) + (mf * mf / (2.0 * vf) - mg * mg / (2.0 * vg));
    c1_ = mg / vg - mf / vf;
    c2_ = 0.5 / vf - 0.5 / vg;
}

double LlrKernel::operator()(double x) const {
    const bool ok = std::isfinite(x) && (!counts_ || (x >= 0.0 && std::floor(x) == x));
    if (!ok) {
        std::ostringstream os;
        os << "observation " << x << " is outside the support of the "
           << (counts_ ? "poisson" : "gaussian") << " density";
        throw DomainError(os.str());
    }
    return c0_ + x * (c1_ + x * c2_);
}

double llr(const PhaseDensity& f, const PhaseDensity& g, double x) { return LlrKernel(f, g)(x); }

double kl_divergence(const PhaseDensity& g, const PhaseDensity& f) {
    if (g.is_gaussian() != f.is_gaussian()) {
        throw ConfigError(std::string("no closed-form divergence between ") + family_name(g.family()) + " and " +
                          family_name(f.family()));
    }
    if (!g.is_gaussian()) {
        const double lg = g.location(), lf = f.location();
        return std::max(0.0, lg * std::log(lg / lf) + lf - lg);
    }
    const double dm = g.location() - f.location();
    const double ratio = g.variance() / f.variance();
    return std::max(0.0, dm * dm / (2.0 * f.variance()) + 0.5 * (ratio - 1.0 - std::log(ratio)));
}

double avg_kl(const IpidLaw& pre, const IpidLaw& post) {
    if (pre.period() != post.period()) {
        throw ConfigError("period mismatch: " + std::to_string(pre.period()) + " vs " + std::to_string(post.period()));
    }
    double sum = 0.0;
    for (std::int64_t i = 1; i <= pre.period(); ++i) sum += kl_divergence(post.phase(i), pre.phase(i));
    return sum / static_cast<double>(pre.period());
}

LlrTable::LlrTable(const IpidLaw& pre, const IpidLaw& post, std::int64_t phase_offset) {
    if (pre.period() != post.period()) {
        throw ConfigError("period mismatch: " + std::to_string(pre.period()) + " vs " + std::to_string(post.period()));
    }
    const std::int64_t t = pre.period();
    offset_ = ((phase_offset % t) + t) % t;
    kernels_.reserve(static_cast<std::size_t>(t));
    for (std::int64_t i = 1; i <= t; ++i) kernels_.emplace_back(pre.phase(i), post.phase(i));
}

void ChangeConfig::validate() const {
    if (post.empty()) throw ConfigError("at least one post-change law is required");
    if (change_point && *change_point < 1) throw ConfigError("change point must be >= 1");
    for (std::size_t l = 0; l < post.size(); ++l) {
        const IpidLaw& g = post[l];
        if (g.period() != pre.period()) {
            throw ConfigError("candidate " + std::to_string(l + 1) + " has period " + std::to_string(g.period()) +
                              ", pre law has " + std::to_string(pre.period()));
        }
        bool differs = false;
        for (std::int64_t i = 1; i <= pre.period(); ++i) {
            const double d = kl_divergence(g.phase(i), pre.phase(i));
            if (!std::isfinite(d)) throw ConfigError("infinite divergence in candidate " + std::to_string(l + 1));
            differs = differs || g.phase(i).location() != pre.phase(i).location() ||
                      g.phase(i).variance() != pre.phase(i).variance();
        }
        if (!differs) throw ConfigError("candidate " + std::to_string(l + 1) + " equals the pre-change law");
    }
}

}  // namespace pcusum
