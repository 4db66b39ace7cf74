#include "pcusum/detect.hpp"

#include <cmath>

#include "pcusum/csv.hpp"

namespace pcusum {

CusumState cusum_step(CusumState s, double x, const IpidLaw& pre, const IpidLaw& post) {
    if (pre.period() != post.period()) throw ConfigError("pre and post laws must share the period");
    const std::int64_t n = s.n + 1;
    return cusum_advance(s, llr(pre.at_time(n), post.at_time(n), x));
}

double brute_force_statistic(std::span<const double> xs, const IpidLaw& pre, const IpidLaw& post,
                             std::int64_t phase_offset) {
    if (xs.empty()) throw ConfigError("brute_force_statistic needs at least one sample");
    if (pre.period() != post.period()) throw ConfigError("pre and post laws must share the period");
    const std::int64_t t = pre.period();
    const std::int64_t off = ((phase_offset % t) + t) % t;
    std::vector<double> z(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i) + 1 + off;
        z[i] = llr(pre.at_time(n), post.at_time(n), xs[i]);
    }
    double best = -INFINITY;
    for (std::size_t k = 0; k < z.size(); ++k) {
        double sum = 0.0;
        for (std::size_t i = k; i < z.size(); ++i) sum += z[i];
        best = std::max(best, sum);
    }
    return best;
}

PeriodicCusum::PeriodicCusum(const IpidLaw& pre, const IpidLaw& post, double threshold, std::int64_t phase_offset)
    : table_(pre, post, phase_offset), threshold_(threshold) {
    if (!(threshold >= 0.0)) throw ConfigError("threshold must be nonnegative");
}

DetectionRun run_detector(std::span<const double> xs, const IpidLaw& pre, const IpidLaw& post, double threshold,
                          std::int64_t horizon, const RunOptions& opts) {
    if (xs.empty()) throw ConfigError("empty observation stream");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    PeriodicCusum det(pre, post, threshold, opts.phase_offset);
    DetectionRun run;
    run.threshold = threshold;
    const std::int64_t limit = std::min<std::int64_t>(horizon, static_cast<std::int64_t>(xs.size()));
    if (opts.record_trajectory) run.trajectory.reserve(static_cast<std::size_t>(limit));
    for (std::int64_t n = 1; n <= limit; ++n) {
        const double x = xs[static_cast<std::size_t>(n - 1)];
        PeriodicCusum::Step st;
        try {
            st = det.step(x);
        } catch (const DomainError& e) {
            throw DomainError("sample " + std::to_string(n) + ": " + e.what());
        }
        run.samples = n;
        if (opts.record_trajectory) {
            run.trajectory.push_back({n, det.table().phase_at(n), x, st.z, st.state.w});
        }
        if (st.crossed) {
            run.stopped = true;
            run.stop_time = n;
            break;
        }
    }
    return run;
}

double threshold_for_mtfa(double beta) {
    if (!(beta > 1.0)) throw ConfigError("beta must exceed 1");
    return std::log(beta);
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows) {
    out << "n,phase,x,Z,W\n";
    for (const TrajectoryRow& r : rows) {
        out << r.n << ',' << r.phase << ',' << format_double(r.x) << ',' << format_double(r.z) << ','
            << format_double(r.w) << '\n';
    }
}

}  // namespace pcusum
