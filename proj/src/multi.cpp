#include "pcusum/multi.hpp"

#include <algorithm>
#include <cmath>

#include "pcusum/csv.hpp"
#include "pcusum/logmath.hpp"
#include "pcusum/rng.hpp"

namespace pcusum {

MultiState multi_init(std::size_t candidates) {
    if (candidates == 0) throw ConfigError("a candidate bank needs at least one law");
    MultiState s;
    s.w.assign(candidates, 0.0);
    s.log_r.assign(candidates, neg_inf);
    return s;
}

void multi_advance(MultiState& s, std::span<const double> z) {
    if (z.size() != s.candidates()) {
        throw ConfigError("expected " + std::to_string(s.candidates()) + " candidate increments, got " +
                          std::to_string(z.size()));
    }
    for (std::size_t l = 0; l < z.size(); ++l) {
        s.w[l] = std::max(s.w[l], 0.0) + z[l];
        s.log_r[l] = log1p_exp(s.log_r[l]) + z[l];
    }
    ++s.n;
}

MultiState multi_step(const MultiState& s, double x, const IpidLaw& pre, std::span<const IpidLaw> posts) {
    if (posts.size() != s.candidates()) {
        throw ConfigError("state tracks " + std::to_string(s.candidates()) + " candidates but " +
                          std::to_string(posts.size()) + " laws were given");
    }
    const std::int64_t n = s.n + 1;
    std::vector<double> z(posts.size());
    for (std::size_t l = 0; l < posts.size(); ++l) {
        if (posts[l].period() != pre.period()) throw ConfigError("candidate periods must match the pre law");
        z[l] = llr(pre.at_time(n), posts[l].at_time(n), x);
    }
    MultiState out = s;
    multi_advance(out, z);
    return out;
}

double log_sr(const MultiState& s) { return log_sum_exp(s.log_r); }

namespace {

double log_threshold(double beta, std::size_t m) {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    return std::log(beta) + std::log(static_cast<double>(m));
}

}  // namespace

bool stop_cm(const MultiState& s, double beta) {
    const double a = log_threshold(beta, s.candidates());
    return *std::max_element(s.w.begin(), s.w.end()) >= a;
}

bool stop_sr(const MultiState& s, double beta) { return log_sr(s) >= log_threshold(beta, s.candidates()); }

std::size_t leading_candidate(const MultiState& s) {
    return static_cast<std::size_t>(std::max_element(s.w.begin(), s.w.end()) - s.w.begin());
}

CandidateBank::CandidateBank(const IpidLaw& pre, std::vector<IpidLaw> posts, std::int64_t phase_offset)
    : state_(multi_init(posts.size())) {
    tables_.reserve(posts.size());
    for (const IpidLaw& g : posts) tables_.emplace_back(pre, g, phase_offset);
    z_.resize(posts.size());
}

const MultiState& CandidateBank::step(double x) {
    const std::int64_t n = state_.n + 1;
    for (std::size_t l = 0; l < tables_.size(); ++l) z_[l] = tables_[l](n, x);
    multi_advance(state_, z_);
    return state_;
}

void CandidateBank::reset() { state_ = multi_init(tables_.size()); }

MartingaleReport martingale_check(const IpidLaw& pre, std::span<const IpidLaw> posts,
                                  const std::set<std::int64_t>& n_points, std::int64_t paths, std::uint64_t seed,
                                  Exec exec) {
    if (n_points.empty() || *n_points.begin() < 1) throw ConfigError("checkpoints must be >= 1");
    if (paths < 2) throw ConfigError("need at least two paths");
    const std::vector<std::int64_t> checkpoints(n_points.begin(), n_points.end());
    const std::int64_t last = checkpoints.back();
    const auto m = static_cast<double>(posts.size());
    const std::vector<IpidLaw> bank_laws(posts.begin(), posts.end());
    const CandidateBank proto(pre, bank_laws);
    const LawSampler sampler(pre);

    const auto np = static_cast<std::size_t>(paths);
    std::vector<double> values(checkpoints.size() * np);
    for_each_path(paths, exec, [&](std::int64_t p) {
        Rng rng(derive_seed(seed, 0x6d617274ULL, static_cast<std::uint64_t>(p)));
        CandidateBank bank = proto;
        std::size_t next = 0;
        for (std::int64_t n = 1; n <= last; ++n) {
            const MultiState& s = bank.step(sampler.draw(phase_of(n, pre.period()), rng));
            if (n == checkpoints[next]) {
                values[next * np + static_cast<std::size_t>(p)] =
                    std::exp(log_sr(s)) - static_cast<double>(n) * m;
                ++next;
            }
        }
    });

    MartingaleReport report;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        const Summary s = summarize(std::span<const double>(values).subspan(i * np, np));
        const double slack = 1e-9 * static_cast<double>(checkpoints[i]) * m;
        const bool ok = std::abs(s.mean) <= 3.0 * s.se + slack;
        report.points.push_back({checkpoints[i], s.mean, s.se, ok});
        report.pass = report.pass && ok;
    }
    return report;
}

SrStoppingReport sr_stopping_diagnostic(const IpidLaw& pre, std::span<const IpidLaw> posts, double beta,
                                        std::int64_t paths, std::int64_t horizon, std::uint64_t seed, Exec exec) {
    if (paths < 1 || horizon < 1) throw ConfigError("paths and horizon must be >= 1");
    const std::vector<IpidLaw> bank_laws(posts.begin(), posts.end());
    const CandidateBank proto(pre, bank_laws);
    const LawSampler sampler(pre);
    const auto np = static_cast<std::size_t>(paths);
    std::vector<double> stop(np), r(np), censored(np);
    for_each_path(paths, exec, [&](std::int64_t p) {
        Rng rng(derive_seed(seed, 0x73727374ULL, static_cast<std::uint64_t>(p)));
        CandidateBank bank = proto;
        std::int64_t n = 1;
        for (;; ++n) {
            const MultiState& s = bank.step(sampler.draw(phase_of(n, pre.period()), rng));
            if (stop_sr(s, beta) || n == horizon) break;
        }
        const auto i = static_cast<std::size_t>(p);
        stop[i] = static_cast<double>(n);
        r[i] = std::exp(log_sr(bank.state()));
        censored[i] = stop_sr(bank.state(), beta) ? 0.0 : 1.0;
    });
    SrStoppingReport rep;
    rep.mean_stop = summarize(stop).mean;
    rep.censor_frac = summarize(censored).mean;
    rep.mean_r = summarize(r).mean;
    std::vector<double> sorted = r;
    std::sort(sorted.begin(), sorted.end());
    const auto q = [&](double f) {
        return sorted[std::min(sorted.size() - 1, static_cast<std::size_t>(f * static_cast<double>(sorted.size())))];
    };
    rep.q50_r = q(0.50);
    rep.q90_r = q(0.90);
    rep.q99_r = q(0.99);
    return rep;
}

void write_multi_header(std::ostream& out, std::size_t candidates) {
    out << "n,phase,x";
    for (std::size_t l = 1; l <= candidates; ++l) out << ",W" << l;
    for (std::size_t l = 1; l <= candidates; ++l) out << ",logR" << l;
    out << ",logR\n";
}

void write_multi_row(std::ostream& out, const MultiState& s, std::int64_t phase, double x) {
    out << s.n << ',' << phase << ',' << format_double(x);
    for (double w : s.w) out << ',' << format_double(w);
    for (double r : s.log_r) out << ',' << format_double(r);
    out << ',' << format_double(log_sr(s)) << '\n';
}

}  // namespace pcusum
