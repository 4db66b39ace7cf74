#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pcusum/model.hpp"

namespace pcusum::cli {

inline constexpr int exit_no_alarm = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_alarm = 10;

enum class Mode { fit, detect, multi, distributed, simulate, curve };

/// Parsed command line. Exactly one mode; threshold and beta are exclusive.
struct RunConfig {
    Mode mode = Mode::detect;

    std::string pre_path;
    std::string post_path;
    std::string posts_path;   // multi: JSON array of candidate laws
    std::string bank_path;    // distributed: {"streams": [...]}
    std::string data_path;    // "-" reads stdin
    std::string train_path;
    std::string out_path;
    std::string post_out_path;

    std::vector<double> thresholds;  // one entry except in curve mode
    std::vector<double> betas;

    std::optional<std::int64_t> period;
    std::vector<std::int64_t> batches;
    std::string family = "poisson";
    bool fit_variance = false;
    double rate_floor = 0.5;
    double post_scale = 3.0;

    std::int64_t phase_offset = 0;
    std::optional<std::int64_t> horizon;
    std::int64_t paths = 5000;
    std::optional<std::uint64_t> seed;
    std::string rule;  // multi: cm|sr, distributed: dm|srd

    bool generate = false;
    std::optional<std::int64_t> nu;

    /// Throws ConfigError on inconsistent or missing settings.
    void validate() const;
    /// Detection threshold A: the given value, or log(beta).
    double resolved_threshold() const;
    /// Beta: the given value, or e^A.
    double resolved_beta() const;
};

/// Parses argv (argv[0] is the program name). Throws ConfigError on bad input;
/// returns nullopt after printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

struct FitResult {
    IpidLaw pre;
    std::optional<IpidLaw> post;
};

FitResult cmd_fit(const RunConfig& cfg);
int cmd_detect(const RunConfig& cfg, std::ostream& report);
int cmd_multi(const RunConfig& cfg, std::ostream& report);
int cmd_distributed(const RunConfig& cfg, std::ostream& report);
int cmd_simulate(const RunConfig& cfg, std::ostream& report);
int cmd_curve(const RunConfig& cfg, std::ostream& report);

/// Full entry point; maps errors to exit_error with a message on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcusum::cli
