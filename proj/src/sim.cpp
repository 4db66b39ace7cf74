#include "pcusum/sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pcusum/csv.hpp"

namespace pcusum {

LawSampler::LawSampler(const IpidLaw& law) {
    phases_.reserve(law.phases().size());
    for (const PhaseDensity& d : law.phases()) {
        if (d.is_gaussian()) {
            phases_.push_back({false, d.location(), std::sqrt(d.variance()), {}});
        } else {
            phases_.push_back({true, d.location(), 0.0, std::poisson_distribution<long long>::param_type(d.location())});
        }
    }
}

std::vector<double> generate(const IpidLaw& pre, const IpidLaw& post, std::optional<std::int64_t> nu,
                             std::int64_t horizon, std::uint64_t seed, std::int64_t phase_offset) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (pre.period() != post.period()) throw ConfigError("pre and post laws must share the period");
    if (nu && *nu < 1) throw ConfigError("change point must be >= 1");
    const std::int64_t t = pre.period();
    const std::int64_t off = ((phase_offset % t) + t) % t;
    const LawSampler before(pre), after(post);
    Rng rng(derive_seed(seed, 0x67656eULL));
    std::vector<double> xs(static_cast<std::size_t>(horizon));
    for (std::int64_t n = 1; n <= horizon; ++n) {
        const bool changed = nu && n >= *nu;
        xs[static_cast<std::size_t>(n - 1)] = (changed ? after : before).draw(phase_of(n + off, t), rng);
    }
    return xs;
}

PathOutcome run_path(const LlrTable& table, const LawSampler& data, std::int64_t start, double threshold,
                     std::int64_t max_steps, Rng& rng) {
    double w = 0.0;
    for (std::int64_t k = 1; k <= max_steps; ++k) {
        const std::int64_t n = start + k - 1;
        const double x = data.draw(table.phase_at(n), rng);
        w = std::max(w, 0.0) + table(n, x);
        if (w > threshold) return {k, true};
    }
    return {max_steps, false};
}

namespace {

constexpr double z95 = 1.959963984540054;

constexpr std::uint64_t mtfa_tag = 0x6d746661ULL;
constexpr std::uint64_t wadd_tag = 0x77616464ULL;

}  // namespace

MtfaEstimate estimate_mtfa(const StreamLaws& laws, double threshold, std::int64_t paths, std::int64_t horizon,
                           std::uint64_t seed, Exec exec) {
    if (paths < 2) throw ConfigError("need at least two paths");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const LlrTable table(laws.pre, laws.post);
    const LawSampler sampler(laws.pre);
    const auto np = static_cast<std::size_t>(paths);
    std::vector<double> stop(np), censored(np);
    for_each_path(paths, exec, [&](std::int64_t p) {
        Rng rng(derive_seed(seed, mtfa_tag, static_cast<std::uint64_t>(p)));
        const PathOutcome o = run_path(table, sampler, 1, threshold, horizon, rng);
        stop[static_cast<std::size_t>(p)] = static_cast<double>(o.steps);
        censored[static_cast<std::size_t>(p)] = o.stopped ? 0.0 : 1.0;
    });
    const Summary s = summarize(stop);
    MtfaEstimate e;
    e.mean = s.mean;
    e.ci_half = z95 * s.se;
    e.censor_frac = summarize(censored).mean;
    e.lower_bound = e.censor_frac > 0.0;
    e.paths = paths;
    e.horizon = horizon;
    return e;
}

WaddEstimate estimate_wadd(const StreamLaws& laws, double threshold, std::int64_t paths, std::uint64_t seed,
                           std::int64_t horizon, Exec exec) {
    if (paths < 2) throw ConfigError("need at least two paths");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    const LlrTable table(laws.pre, laws.post);
    const LawSampler sampler(laws.post);
    const std::int64_t t = table.period();
    const auto np = static_cast<std::size_t>(paths);

    WaddEstimate e;
    e.per_nu.resize(static_cast<std::size_t>(t));
    std::vector<double> delay(np), censored(np);
    double censored_total = 0.0;
    for (std::int64_t nu = 1; nu <= t; ++nu) {
        for_each_path(paths, exec, [&](std::int64_t p) {
            Rng rng(derive_seed(seed, wadd_tag + static_cast<std::uint64_t>(nu), static_cast<std::uint64_t>(p)));
            const PathOutcome o = run_path(table, sampler, nu, threshold, horizon, rng);
            delay[static_cast<std::size_t>(p)] = static_cast<double>(o.steps);
            censored[static_cast<std::size_t>(p)] = o.stopped ? 0.0 : 1.0;
        });
        const Summary s = summarize(delay);
        e.per_nu[static_cast<std::size_t>(nu - 1)] = s.mean;
        censored_total += summarize(censored).mean;
        if (nu == 1 || s.mean > e.mean) {
            e.mean = s.mean;
            e.ci_half = z95 * s.se;
            e.worst_nu = nu;
        }
    }
    e.censor_frac = censored_total / static_cast<double>(t);
    return e;
}

std::vector<PerfPoint> tradeoff_curve(const StreamLaws& laws, std::span<const double> thresholds,
                                      std::int64_t paths, std::uint64_t seed, const CurveOptions& opts) {
    if (thresholds.empty()) throw ConfigError("at least one threshold is required");
    const double info = avg_kl(laws.pre, laws.post);
    if (!(info > 0.0)) throw ConfigError("post-change law must differ from the pre-change law");
    std::vector<PerfPoint> out;
    for (double a : thresholds) {
        if (!(a >= 0.0)) throw ConfigError("thresholds must be nonnegative");
        const std::uint64_t s = derive_seed(seed, std::bit_cast<std::uint64_t>(a));
        const auto horizon = static_cast<std::int64_t>(std::ceil(opts.horizon_factor * std::exp(a)));
        PerfPoint pt;
        pt.threshold = a;
        pt.mtfa = estimate_mtfa(laws, a, paths, std::max<std::int64_t>(horizon, 1), s, opts.exec);
        pt.wadd = estimate_wadd(laws, a, paths, s, opts.wadd_horizon, opts.exec);
        pt.theory_delay = a / info;
        out.push_back(std::move(pt));
    }
    return out;
}

void write_curve_csv(std::ostream& out, std::span<const PerfPoint> points) {
    out << "A,log_mtfa_est,mtfa_ci,wadd_est,wadd_ci,theory,censor_frac\n";
    for (const PerfPoint& p : points) {
        out << format_double(p.threshold) << ',' << format_double(std::log(p.mtfa.mean)) << ','
            << format_double(p.mtfa.ci_half) << ',' << format_double(p.wadd.mean) << ','
            << format_double(p.wadd.ci_half) << ',' << format_double(p.theory_delay) << ','
            << format_double(p.mtfa.censor_frac) << '\n';
    }
}

StreamLaws reference_gaussian_scenario() {
    return {IpidLaw({PhaseDensity::gaussian_unit_var(0.0), PhaseDensity::gaussian_unit_var(0.0)}),
            IpidLaw({PhaseDensity::gaussian_unit_var(1.0), PhaseDensity::gaussian_unit_var(0.5)})};
}

}  // namespace pcusum
