#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "pcusum/model.hpp"

namespace pcusum {

/// Support violation in one stream of a bank.
class StreamError : public DomainError {
public:
    StreamError(std::size_t stream, const std::string& what)
        : DomainError("stream " + std::to_string(stream + 1) + ": " + what), stream_(stream) {}

    std::size_t stream() const noexcept { return stream_; }  // 0-based

private:
    std::size_t stream_;
};

/// M independent streams sampled on a common tick, each with its own law pair.
///
/// d()[l] is the Periodic-CUSUM statistic of stream l on its own data, and
/// log_s()[l] is the log of stream l's Shiryaev-Roberts component, so that
/// S_n = sum_l exp(log_s()[l]). Streams never read each other's data.
class StreamBank {
public:
    explicit StreamBank(std::vector<StreamLaws> streams, std::int64_t phase_offset = 0);

    /// One synchronous tick; xs[l] is stream l's observation.
    void step(std::span<const double> xs);

    std::size_t size() const noexcept { return tables_.size(); }
    std::int64_t n() const noexcept { return n_; }
    std::int64_t period() const noexcept { return tables_.front().period(); }
    std::int64_t phase_at(std::int64_t n) const noexcept { return tables_.front().phase_at(n); }
    std::span<const double> d() const noexcept { return d_; }
    std::span<const double> log_s() const noexcept { return log_s_; }
    const std::vector<StreamLaws>& streams() const noexcept { return streams_; }

    /// log S_n over all streams.
    double log_total() const;
    /// Index (0-based) of the stream with the largest CUSUM statistic.
    std::size_t leading_stream() const;

private:
    std::vector<StreamLaws> streams_;
    std::vector<LlrTable> tables_;
    std::int64_t n_ = 0;
    std::vector<double> d_;
    std::vector<double> log_s_;
};

StreamBank dist_step(StreamBank bank, std::span<const double> xs);

/// max_l D[l] >= log(beta * M).
bool stop_dm(const StreamBank& bank, double beta);
/// S_n >= beta * M, compared in the log domain.
bool stop_srd(const StreamBank& bank, double beta);

/// CSV with columns tick,D1..DM,logS1..logSM,logS.
void write_dist_header(std::ostream& out, std::size_t streams);
void write_dist_row(std::ostream& out, const StreamBank& bank);

}  // namespace pcusum
