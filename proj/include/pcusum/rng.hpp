#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pcusum/model.hpp"

namespace pcusum {

// splitmix64 finalizer; used to derive independent per-path seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return mix64(mix64(mix64(base) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

/// Per-path random source. Not shared between paths.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double poisson(const std::poisson_distribution<long long>::param_type& p) {
        return static_cast<double>(poisson_(engine_, p));
    }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::poisson_distribution<long long> poisson_;
};

/// Draws observations from an IpidLaw, phase by phase.
class LawSampler {
public:
    explicit LawSampler(const IpidLaw& law);

    std::int64_t period() const noexcept { return static_cast<std::int64_t>(phases_.size()); }
    double draw(std::int64_t phase, Rng& rng) const {
        const Phase& p = phases_[static_cast<std::size_t>(phase - 1)];
        return p.counts ? rng.poisson(p.poisson) : p.mean + p.sd * rng.normal();
    }

private:
    struct Phase {
        bool counts;
        double mean;
        double sd;
        std::poisson_distribution<long long>::param_type poisson;
    };
    std::vector<Phase> phases_;
};

}  // namespace pcusum
