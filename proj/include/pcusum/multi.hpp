#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "pcusum/model.hpp"
#include "pcusum/paths.hpp"

namespace pcusum {

/// Bank state for M candidate post-change laws.
///
/// w[l] is the Periodic-CUSUM statistic for candidate l. log_r[l] is the log
/// of that candidate's Shiryaev-Roberts component, so the combined statistic
/// is R_n = sum_l exp(log_r[l]). R_0 = 0, i.e. log_r starts at -inf.
struct MultiState {
    std::int64_t n = 0;
    std::vector<double> w;
    std::vector<double> log_r;

    std::size_t candidates() const noexcept { return w.size(); }
};

MultiState multi_init(std::size_t candidates);

/// Applies one observation's candidate LLRs z[l] to the state.
///   w'[l]     = max(w[l], 0) + z[l]
///   log_r'[l] = log(1 + exp(log_r[l])) + z[l]
void multi_advance(MultiState& s, std::span<const double> z);

MultiState multi_step(const MultiState& s, double x, const IpidLaw& pre, std::span<const IpidLaw> posts);

/// log R_n, combined over candidates.
double log_sr(const MultiState& s);

/// max_l w[l] >= log(beta * M).
bool stop_cm(const MultiState& s, double beta);
/// R_n >= beta * M, compared in the log domain.
bool stop_sr(const MultiState& s, double beta);

/// Index (0-based) of the candidate with the largest CUSUM statistic.
/// Reported as a diagnostic at alarm time only.
std::size_t leading_candidate(const MultiState& s);

/// Streaming bank with precomputed per-candidate kernels.
class CandidateBank {
public:
    CandidateBank(const IpidLaw& pre, std::vector<IpidLaw> posts, std::int64_t phase_offset = 0);

    const MultiState& step(double x);
    const MultiState& state() const noexcept { return state_; }
    std::size_t candidates() const noexcept { return tables_.size(); }
    std::int64_t phase_at(std::int64_t n) const noexcept { return tables_.front().phase_at(n); }
    void reset();

private:
    std::vector<LlrTable> tables_;
    std::vector<double> z_;
    MultiState state_;
};

struct MartingalePoint {
    std::int64_t n;
    double mean;  // empirical mean of R_n - n M
    double se;
    bool pass;    // |mean| <= 3 se, plus a 1e-9 n M rounding floor
};

struct MartingaleReport {
    std::vector<MartingalePoint> points;
    bool pass = true;
};

/// Simulates change-free paths and checks that R_n - n M has mean zero.
MartingaleReport martingale_check(const IpidLaw& pre, std::span<const IpidLaw> posts,
                                  const std::set<std::int64_t>& n_points, std::int64_t paths, std::uint64_t seed,
                                  Exec exec = Exec::parallel);

/// Distribution of the stopped statistic R at the SR stopping time under no change.
struct SrStoppingReport {
    double mean_stop = 0.0;     // censored paths counted at the horizon
    double censor_frac = 0.0;
    double mean_r = 0.0;        // mean of R at stopping (or at the horizon)
    double q50_r = 0.0;
    double q90_r = 0.0;
    double q99_r = 0.0;
};

SrStoppingReport sr_stopping_diagnostic(const IpidLaw& pre, std::span<const IpidLaw> posts, double beta,
                                        std::int64_t paths, std::int64_t horizon, std::uint64_t seed,
                                        Exec exec = Exec::parallel);

/// CSV with columns n,phase,x,W1..WM,logR1..logRM,logR.
void write_multi_header(std::ostream& out, std::size_t candidates);
void write_multi_row(std::ostream& out, const MultiState& s, std::int64_t phase, double x);

}  // namespace pcusum
