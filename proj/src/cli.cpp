#include "pcusum/cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pcusum/csv.hpp"
#include "pcusum/detect.hpp"
#include "pcusum/distributed.hpp"
#include "pcusum/law_io.hpp"
#include "pcusum/learn.hpp"
#include "pcusum/multi.hpp"
#include "pcusum/sim.hpp"

namespace pcusum::cli {

namespace {

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::fit: return "fit";
        case Mode::detect: return "detect";
        case Mode::multi: return "multi";
        case Mode::distributed: return "distributed";
        case Mode::simulate: return "simulate";
        case Mode::curve: return "curve";
    }
    return "?";
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void RunConfig::validate() const {
    const std::string m = mode_name(mode);
    require(thresholds.empty() || betas.empty(), m + ": --threshold and --beta are mutually exclusive");
    for (double a : thresholds) require(a >= 0.0, m + ": thresholds must be nonnegative");
    for (double b : betas) require(b > 1.0, m + ": beta must exceed 1");
    if (mode != Mode::curve) {
        require(thresholds.size() <= 1 && betas.size() <= 1, m + ": give a single threshold or beta");
    }
    require(paths >= 2, m + ": --paths must be >= 2");
    require(!horizon || *horizon >= 1, m + ": --horizon must be >= 1");
    require(post_scale > 0.0, m + ": --post-scale must be positive");

    switch (mode) {
        case Mode::fit:
            require(!train_path.empty(), "fit: --train is required");
            require(period && *period >= 1, "fit: --period is required");
            require(!out_path.empty(), "fit: --out is required");
            require(family == "poisson" || family == "gaussian", "fit: --family must be poisson or gaussian");
            break;
        case Mode::detect:
            require(!pre_path.empty() && !post_path.empty(), "detect: --pre and --post are required");
            require(!data_path.empty(), "detect: --data is required");
            require(!thresholds.empty() || !betas.empty(), "detect: --threshold or --beta is required");
            break;
        case Mode::multi:
            require(!pre_path.empty() && !posts_path.empty(), "multi: --pre and --posts are required");
            require(!data_path.empty(), "multi: --data is required");
            require(!thresholds.empty() || !betas.empty(), "multi: --threshold or --beta is required");
            require(rule.empty() || rule == "cm" || rule == "sr", "multi: --rule must be cm or sr");
            break;
        case Mode::distributed:
            require(!bank_path.empty(), "distributed: --bank is required");
            require(!data_path.empty(), "distributed: --data is required");
            require(!thresholds.empty() || !betas.empty(), "distributed: --threshold or --beta is required");
            require(rule.empty() || rule == "dm" || rule == "srd", "distributed: --rule must be dm or srd");
            break;
        case Mode::simulate:
            require(seed.has_value(), "simulate: --seed is required");
            if (posts_path.empty()) {
                require(pre_path.empty() == post_path.empty(),
                        "simulate: give both --pre and --post, or neither for the reference scenario");
            } else {
                require(!pre_path.empty(), "simulate: --posts needs --pre");
            }
            if (generate) {
                require(horizon.has_value(), "simulate --generate: --horizon (sample count) is required");
                require(!nu || *nu >= 1, "simulate --generate: --nu must be >= 1");
            } else {
                require(!thresholds.empty() || !betas.empty(), "simulate: --threshold or --beta is required");
            }
            break;
        case Mode::curve:
            require(seed.has_value(), "curve: --seed is required");
            require(pre_path.empty() == post_path.empty(),
                    "curve: give both --pre and --post, or neither for the reference scenario");
            break;
    }
}

double RunConfig::resolved_threshold() const {
    if (!thresholds.empty()) return thresholds.front();
    if (!betas.empty()) return threshold_for_mtfa(betas.front());
    throw ConfigError("no threshold or beta given");
}

double RunConfig::resolved_beta() const {
    if (!betas.empty()) return betas.front();
    if (!thresholds.empty()) return std::exp(thresholds.front());
    throw ConfigError("no threshold or beta given");
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    RunConfig cfg;
    CLI::App app{"Periodic-CUSUM change detection for statistically periodic streams"};
    app.require_subcommand(1);

    const auto threshold_opts = [&](CLI::App* sub, bool many) {
        auto* a = sub->add_option("--threshold,-A", cfg.thresholds, many ? "Thresholds A (comma separated)"
                                                                         : "Threshold A");
        auto* b = sub->add_option("--beta", cfg.betas, "False-alarm target beta; A = log(beta)");
        if (many) {
            a->delimiter(',');
            b->delimiter(',');
        }
        a->excludes(b);
    };

    auto* fit = app.add_subcommand("fit", "Fit a step-model baseline law from training data");
    fit->add_option("--train", cfg.train_path, "Training CSV (index,value[,period_start])")->required();
    fit->add_option("--period", cfg.period, "Period T")->required();
    fit->add_option("--batches", cfg.batches, "Batch lengths; the remainder forms a final batch")->delimiter(',');
    fit->add_option("--family", cfg.family, "poisson or gaussian");
    fit->add_flag("--fit-variance", cfg.fit_variance, "Fit per-batch Gaussian variances");
    fit->add_option("--rate-floor", cfg.rate_floor, "Rate for all-zero Poisson batches");
    fit->add_option("--post-scale", cfg.post_scale, "Post-change law = factor x baseline");
    fit->add_option("--out", cfg.out_path, "Pre-change law JSON")->required();
    fit->add_option("--post-out", cfg.post_out_path, "Scaled post-change law JSON");

    auto* detect = app.add_subcommand("detect", "Run the Periodic-CUSUM over a data file");
    detect->add_option("--pre", cfg.pre_path)->required();
    detect->add_option("--post", cfg.post_path)->required();
    detect->add_option("--data", cfg.data_path, "Data CSV, or - for stdin")->required();
    threshold_opts(detect, false);

    auto* multi = app.add_subcommand("multi", "Bank of candidate post-change laws (max and SR rules)");
    multi->add_option("--pre", cfg.pre_path)->required();
    multi->add_option("--posts", cfg.posts_path, "JSON array of candidate laws")->required();
    multi->add_option("--data", cfg.data_path, "Data CSV, or - for stdin")->required();
    multi->add_option("--rule", cfg.rule, "cm (default) or sr");
    threshold_opts(multi, false);

    auto* dist = app.add_subcommand("distributed", "Multi-stream detection over a wide CSV");
    dist->add_option("--bank", cfg.bank_path, "Stream bank JSON")->required();
    dist->add_option("--data", cfg.data_path, "Wide CSV (tick,s1,...,sM), or - for stdin")->required();
    dist->add_option("--rule", cfg.rule, "dm (default) or srd");
    threshold_opts(dist, false);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates at one threshold, or synthetic data");
    sim->add_option("--pre", cfg.pre_path);
    sim->add_option("--post", cfg.post_path);
    sim->add_option("--posts", cfg.posts_path, "Candidate bank; adds the SR stopping diagnostic");
    sim->add_option("--paths", cfg.paths);
    sim->add_option("--seed", cfg.seed)->required();
    sim->add_flag("--generate", cfg.generate, "Write one synthetic stream instead of estimates");
    sim->add_option("--nu", cfg.nu, "Change point for --generate (default: no change)");
    threshold_opts(sim, false);

    auto* curve = app.add_subcommand("curve", "Delay versus log mean time to false alarm");
    curve->add_option("--pre", cfg.pre_path);
    curve->add_option("--post", cfg.post_path);
    curve->add_option("--paths", cfg.paths);
    curve->add_option("--seed", cfg.seed)->required();
    threshold_opts(curve, true);

    for (auto* sub : {detect, multi, dist, sim}) {
        sub->add_option("--horizon", cfg.horizon, "Maximum samples (censoring point)");
    }
    for (auto* sub : {detect, multi, dist, sim}) sub->add_option("--phase-offset", cfg.phase_offset);
    for (auto* sub : {detect, multi, dist, sim, curve}) sub->add_option("--out", cfg.out_path, "Output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    if (fit->parsed()) cfg.mode = Mode::fit;
    if (detect->parsed()) cfg.mode = Mode::detect;
    if (multi->parsed()) cfg.mode = Mode::multi;
    if (dist->parsed()) cfg.mode = Mode::distributed;
    if (sim->parsed()) cfg.mode = Mode::simulate;
    if (curve->parsed()) cfg.mode = Mode::curve;
    cfg.validate();
    return cfg;
}

namespace {

Series load_series(const std::string& path) {
    if (path == "-") return read_series(std::cin);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return read_series(in);
}

WideSeries load_wide(const std::string& path) {
    if (path == "-") return read_wide(std::cin);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return read_wide(in);
}

IpidLaw load_law(const std::string& path) { return law_from_json(read_json_file(path)); }

// Checks every sample against the pre law's support before any statistic is touched.
void check_support(const Series& s, const IpidLaw& law, std::int64_t offset) {
    const std::int64_t t = law.period();
    const std::int64_t off = ((offset % t) + t) % t;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const auto n = static_cast<std::int64_t>(i) + 1;
        const PhaseDensity& d = law.at_time(n + off);
        if (!in_support(d, s.values[i])) {
            throw DomainError("row " + std::to_string(s.rows[i]) + " (sample " + std::to_string(n) + "): value " +
                              format_double(s.values[i]) + " is outside the " + family_name(d.family()) + " support");
        }
    }
}

class OutFile {
public:
    explicit OutFile(const std::string& path) {
        if (path.empty()) return;
        file_.open(path);
        if (!file_) throw ConfigError("cannot write " + path);
    }
    explicit operator bool() const { return file_.is_open(); }
    std::ostream& stream() { return file_; }

private:
    std::ofstream file_;
};

StreamLaws scenario(const RunConfig& cfg) {
    if (cfg.pre_path.empty()) return reference_gaussian_scenario();
    return {load_law(cfg.pre_path), load_law(cfg.post_path)};
}

}  // namespace

FitResult cmd_fit(const RunConfig& cfg) {
    cfg.validate();
    const std::int64_t t = *cfg.period;
    const Series s = load_series(cfg.train_path);
    const bool counts = cfg.family == "poisson";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double x = s.values[i];
        const bool ok = counts ? in_support(PhaseDensity::poisson(1.0), x) : std::isfinite(x);
        if (!ok) {
            throw DomainError("row " + std::to_string(s.rows[i]) + ": value " + format_double(x) +
                              (counts ? " is not a nonnegative integer count" : " is not finite"));
        }
    }
    if (s.values.empty() || static_cast<std::int64_t>(s.values.size()) % t != 0) {
        throw ConfigError("training data has " + std::to_string(s.values.size()) +
                          " samples, not a whole number of periods of " + std::to_string(t));
    }
    if (s.period_marks) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const bool expected = static_cast<std::int64_t>(i) % t == 0;
            if ((*s.period_marks)[i] != expected) {
                throw ConfigError("row " + std::to_string(s.rows[i]) + ": period marker disagrees with period " +
                                  std::to_string(t));
            }
        }
    }
    std::vector<std::int64_t> lengths = cfg.batches;
    if (lengths.empty()) lengths.assign(static_cast<std::size_t>(t), 1);
    const BatchSpec spec = BatchSpec::from_lengths(t, lengths);
    FitOptions opts;
    opts.fit_variance = cfg.fit_variance;
    opts.rate_floor = cfg.rate_floor;
    const StepParams params = fit_step_params(s.values, spec, counts ? Family::poisson : Family::gaussian, opts);

    FitResult r{expand_to_law(spec, params), std::nullopt};
    r.post = scale_post(r.pre, cfg.post_scale);
    write_json_file(cfg.out_path, law_to_json(r.pre));
    if (!cfg.post_out_path.empty()) write_json_file(cfg.post_out_path, law_to_json(*r.post));
    return r;
}

int cmd_detect(const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    const IpidLaw pre = load_law(cfg.pre_path);
    const IpidLaw post = load_law(cfg.post_path);
    const double a = cfg.resolved_threshold();
    const Series s = load_series(cfg.data_path);
    if (s.values.empty()) throw ConfigError("empty observation stream");
    check_support(s, pre, cfg.phase_offset);

    PeriodicCusum det(pre, post, a, cfg.phase_offset);
    OutFile out(cfg.out_path);
    if (out) out.stream() << "n,phase,x,Z,W\n";
    const std::int64_t limit = std::min<std::int64_t>(cfg.horizon.value_or(INT64_MAX),
                                                      static_cast<std::int64_t>(s.values.size()));
    std::optional<std::int64_t> alarm;
    double alarm_w = 0.0;
    std::int64_t above = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
        const double x = s.values[static_cast<std::size_t>(n - 1)];
        const auto st = det.step(x);
        if (out) {
            out.stream() << n << ',' << det.table().phase_at(n) << ',' << format_double(x) << ','
                         << format_double(st.z) << ',' << format_double(st.state.w) << '\n';
        }
        if (st.crossed) {
            ++above;
            if (!alarm) {
                alarm = n;
                alarm_w = st.state.w;
            }
        }
    }
    report << "threshold " << format_double(a) << ", samples " << limit << ", samples above threshold " << above
           << '\n';
    if (!alarm) {
        report << "no alarm\n";
        return exit_no_alarm;
    }
    report << "alarm at n=" << *alarm << " (row " << s.rows[static_cast<std::size_t>(*alarm - 1)]
           << ", phase " << det.table().phase_at(*alarm) << ", W=" << format_double(alarm_w) << ")\n";
    return exit_alarm;
}

int cmd_multi(const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    const IpidLaw pre = load_law(cfg.pre_path);
    std::vector<IpidLaw> posts = bank_from_json(read_json_file(cfg.posts_path));
    ChangeConfig{pre, posts, std::nullopt}.validate();
    const double beta = cfg.resolved_beta();
    const bool use_sr = cfg.rule == "sr";
    const Series s = load_series(cfg.data_path);
    if (s.values.empty()) throw ConfigError("empty observation stream");
    check_support(s, pre, cfg.phase_offset);

    CandidateBank bank(pre, posts, cfg.phase_offset);
    OutFile out(cfg.out_path);
    if (out) write_multi_header(out.stream(), bank.candidates());
    const std::int64_t limit = std::min<std::int64_t>(cfg.horizon.value_or(INT64_MAX),
                                                      static_cast<std::int64_t>(s.values.size()));
    std::optional<std::int64_t> tau_cm, tau_sr;
    std::size_t cause = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
        const double x = s.values[static_cast<std::size_t>(n - 1)];
        const MultiState& st = bank.step(x);
        if (out) write_multi_row(out.stream(), st, bank.phase_at(n), x);
        if (!tau_cm && stop_cm(st, beta)) {
            tau_cm = n;
            if (!use_sr) cause = leading_candidate(st);
        }
        if (!tau_sr && stop_sr(st, beta)) {
            tau_sr = n;
            if (use_sr) cause = leading_candidate(st);
        }
    }
    const auto show = [](const std::optional<std::int64_t>& t) { return t ? std::to_string(*t) : std::string("none"); };
    report << "beta " << format_double(beta) << ", candidates " << bank.candidates() << ", samples " << limit << '\n';
    report << "tau_cm " << show(tau_cm) << ", tau_sr " << show(tau_sr) << '\n';
    const auto& fired = use_sr ? tau_sr : tau_cm;
    if (!fired) {
        report << "no alarm\n";
        return exit_no_alarm;
    }
    report << "alarm at n=" << *fired << " (rule " << (use_sr ? "sr" : "cm") << ", leading candidate " << cause + 1
           << ")\n";
    return exit_alarm;
}

int cmd_distributed(const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    StreamBank bank(streams_from_json(read_json_file(cfg.bank_path)), cfg.phase_offset);
    const double beta = cfg.resolved_beta();
    const bool use_srd = cfg.rule == "srd";
    const WideSeries data = load_wide(cfg.data_path);
    if (data.ticks.empty()) throw ConfigError("empty observation stream");
    if (data.ticks.front().size() != bank.size()) {
        throw ConfigError("data has " + std::to_string(data.ticks.front().size()) + " streams, bank has " +
                          std::to_string(bank.size()));
    }
    OutFile out(cfg.out_path);
    if (out) write_dist_header(out.stream(), bank.size());
    const std::int64_t limit = std::min<std::int64_t>(cfg.horizon.value_or(INT64_MAX),
                                                      static_cast<std::int64_t>(data.ticks.size()));
    std::optional<std::int64_t> tau_dm, tau_srd;
    std::size_t cause = 0;
    for (std::int64_t n = 1; n <= limit; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        try {
            bank.step(data.ticks[i]);
        } catch (const StreamError& e) {
            throw DomainError("row " + std::to_string(data.rows[i]) + ", " + e.what());
        }
        if (out) write_dist_row(out.stream(), bank);
        if (!tau_dm && stop_dm(bank, beta)) {
            tau_dm = n;
            if (!use_srd) cause = bank.leading_stream();
        }
        if (!tau_srd && stop_srd(bank, beta)) {
            tau_srd = n;
            if (use_srd) cause = bank.leading_stream();
        }
    }
    const auto show = [](const std::optional<std::int64_t>& t) { return t ? std::to_string(*t) : std::string("none"); };
    report << "beta " << format_double(beta) << ", streams " << bank.size() << ", ticks " << limit << '\n';
    report << "tau_dm " << show(tau_dm) << ", tau_srd " << show(tau_srd) << '\n';
    const auto& fired = use_srd ? tau_srd : tau_dm;
    if (!fired) {
        report << "no alarm\n";
        return exit_no_alarm;
    }
    const std::string name = cause < data.names.size() ? data.names[cause] : std::to_string(cause + 1);
    report << "alarm at tick " << *fired << " (rule " << (use_srd ? "srd" : "dm") << ", leading stream " << name
           << ")\n";
    return exit_alarm;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    const std::uint64_t seed = *cfg.seed;
    if (cfg.generate) {
        const StreamLaws laws = scenario(cfg);
        const auto xs = generate(laws.pre, laws.post, cfg.nu, *cfg.horizon, seed, cfg.phase_offset);
        OutFile out(cfg.out_path);
        std::ostream& os = out ? out.stream() : report;
        os << "index,value\n";
        for (std::size_t i = 0; i < xs.size(); ++i) os << i + 1 << ',' << format_double(xs[i]) << '\n';
        return exit_no_alarm;
    }

    const double a = cfg.resolved_threshold();
    const auto horizon = cfg.horizon.value_or(static_cast<std::int64_t>(std::ceil(10.0 * std::exp(a))));
    if (!cfg.posts_path.empty()) {
        const IpidLaw pre = load_law(cfg.pre_path);
        const auto posts = bank_from_json(read_json_file(cfg.posts_path));
        const SrStoppingReport r =
            sr_stopping_diagnostic(pre, posts, cfg.resolved_beta(), cfg.paths, horizon, seed);
        report << "sr stopping under no change: mean tau " << format_double(r.mean_stop) << ", censored "
               << format_double(r.censor_frac) << ", R at stop mean " << format_double(r.mean_r) << " q50 "
               << format_double(r.q50_r) << " q90 " << format_double(r.q90_r) << " q99 " << format_double(r.q99_r)
               << '\n';
        return exit_no_alarm;
    }

    const StreamLaws laws = scenario(cfg);
    PerfPoint pt;
    pt.threshold = a;
    pt.mtfa = estimate_mtfa(laws, a, cfg.paths, horizon, seed);
    pt.wadd = estimate_wadd(laws, a, cfg.paths, seed);
    pt.theory_delay = a / avg_kl(laws.pre, laws.post);
    OutFile out(cfg.out_path);
    write_curve_csv(out ? out.stream() : report, std::span<const PerfPoint>(&pt, 1));
    if (out) {
        report << "A " << format_double(a) << ": mtfa " << format_double(pt.mtfa.mean)
               << (pt.mtfa.lower_bound ? " (lower bound, censored)" : "") << ", wadd " << format_double(pt.wadd.mean)
               << " at nu=" << pt.wadd.worst_nu << ", theory " << format_double(pt.theory_delay) << '\n';
    }
    return exit_no_alarm;
}

int cmd_curve(const RunConfig& cfg, std::ostream& report) {
    cfg.validate();
    const StreamLaws laws = scenario(cfg);
    std::vector<double> thresholds = cfg.thresholds;
    for (double b : cfg.betas) thresholds.push_back(threshold_for_mtfa(b));
    if (thresholds.empty()) thresholds = {3.0, 4.0, 5.0, 5.5, 6.0};
    const auto points = tradeoff_curve(laws, thresholds, cfg.paths, *cfg.seed);
    OutFile out(cfg.out_path);
    write_curve_csv(out ? out.stream() : report, points);
    if (out) {
        report << "I = " << format_double(avg_kl(laws.pre, laws.post)) << ", " << points.size() << " points, "
               << cfg.paths << " paths each\n";
    }
    return exit_no_alarm;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = parse_args(argc, argv, out);
        if (!cfg) return exit_no_alarm;
        switch (cfg->mode) {
            case Mode::fit: {
                const FitResult r = cmd_fit(*cfg);
                out << "fitted " << r.pre.period() << "-phase " << family_name(r.pre.phase(1).family())
                    << " law -> " << cfg->out_path << '\n';
                if (!cfg->post_out_path.empty()) {
                    out << "post law (x" << format_double(cfg->post_scale) << ") -> " << cfg->post_out_path << '\n';
                }
                return exit_no_alarm;
            }
            case Mode::detect: return cmd_detect(*cfg, out);
            case Mode::multi: return cmd_multi(*cfg, out);
            case Mode::distributed: return cmd_distributed(*cfg, out);
            case Mode::simulate: return cmd_simulate(*cfg, out);
            case Mode::curve: return cmd_curve(*cfg, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return exit_error;
}

}  // namespace pcusum::cli
