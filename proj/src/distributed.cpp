#include "pcusum/distributed.hpp"

#include <algorithm>
#include <cmath>

#include "pcusum/csv.hpp"
#include "pcusum/logmath.hpp"

namespace pcusum {

StreamBank::StreamBank(std::vector<StreamLaws> streams, std::int64_t phase_offset) : streams_(std::move(streams)) {
    if (streams_.empty()) throw ConfigError("a stream bank needs at least one stream");
    const std::int64_t t = streams_.front().pre.period();
    tables_.reserve(streams_.size());
    for (std::size_t l = 0; l < streams_.size(); ++l) {
        const StreamLaws& s = streams_[l];
        if (s.pre.period() != t || s.post.period() != t) {
            throw ConfigError("stream " + std::to_string(l + 1) + " does not share the common period " +
                              std::to_string(t));
        }
        tables_.emplace_back(s.pre, s.post, phase_offset);
    }
    d_.assign(streams_.size(), 0.0);
    log_s_.assign(streams_.size(), neg_inf);
}

void StreamBank::step(std::span<const double> xs) {
    if (xs.size() != size()) {
        throw ConfigError("expected " + std::to_string(size()) + " observations per tick, got " +
                          std::to_string(xs.size()));
    }
    const std::int64_t n = n_ + 1;
    // Validate every stream before mutating, so a bad tick leaves the bank untouched.
    std::vector<double> z(size());
    for (std::size_t l = 0; l < size(); ++l) {
        try {
            z[l] = tables_[l](n, xs[l]);
        } catch (const DomainError& e) {
            throw StreamError(l, std::string("tick ") + std::to_string(n) + ": " + e.what());
        }
    }
    for (std::size_t l = 0; l < size(); ++l) {
        d_[l] = std::max(d_[l], 0.0) + z[l];
        log_s_[l] = log1p_exp(log_s_[l]) + z[l];
    }
    n_ = n;
}

double StreamBank::log_total() const { return log_sum_exp(log_s_); }

std::size_t StreamBank::leading_stream() const {
    return static_cast<std::size_t>(std::max_element(d_.begin(), d_.end()) - d_.begin());
}

StreamBank dist_step(StreamBank bank, std::span<const double> xs) {
    bank.step(xs);
    return bank;
}

namespace {

double log_threshold(double beta, std::size_t m) {
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");
    return std::log(beta) + std::log(static_cast<double>(m));
}

}  // namespace

bool stop_dm(const StreamBank& bank, double beta) {
    const auto d = bank.d();
    return *std::max_element(d.begin(), d.end()) >= log_threshold(beta, bank.size());
}

bool stop_srd(const StreamBank& bank, double beta) { return bank.log_total() >= log_threshold(beta, bank.size()); }

void write_dist_header(std::ostream& out, std::size_t streams) {
    out << "tick";
    for (std::size_t l = 1; l <= streams; ++l) out << ",D" << l;
    for (std::size_t l = 1; l <= streams; ++l) out << ",logS" << l;
    out << ",logS\n";
}

void write_dist_row(std::ostream& out, const StreamBank& bank) {
    out << bank.n();
    for (double d : bank.d()) out << ',' << format_double(d);
    for (double s : bank.log_s()) out << ',' << format_double(s);
    out << ',' << format_double(bank.log_total()) << '\n';
}

}  // namespace pcusum
