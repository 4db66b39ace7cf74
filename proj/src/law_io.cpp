#include "pcusum/law_io.hpp"

#include <fstream>

namespace pcusum {

using nlohmann::json;

json law_to_json(const IpidLaw& law) {
    const auto phases = law.phases();
    const bool counts = !phases.front().is_gaussian();
    json params = json::array();
    for (const PhaseDensity& d : phases) {
        if (d.is_gaussian() == counts) throw ConfigError("a law document holds a single family");
        if (counts) {
            params.push_back({{"rate", d.location()}});
        } else if (d.family() == Family::gaussian_unit_var) {
            params.push_back({{"mean", d.location()}});
        } else {
            params.push_back({{"mean", d.location()}, {"variance", d.variance()}});
        }
    }
    return {{"period", law.period()}, {"family", counts ? "poisson" : "gaussian"}, {"params", params}};
}

namespace {

double number_field(const json& rec, const char* key, std::size_t idx) {
    if (!rec.is_object() || !rec.contains(key) || !rec[key].is_number()) {
        throw ConfigError("params[" + std::to_string(idx) + "] needs numeric field '" + key + "'");
    }
    return rec[key].get<double>();
}

}  // namespace

IpidLaw law_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("law document must be an object");
    if (!doc.contains("period") || !doc["period"].is_number_integer()) throw ConfigError("law needs integer 'period'");
    if (!doc.contains("family") || !doc["family"].is_string()) throw ConfigError("law needs string 'family'");
    if (!doc.contains("params") || !doc["params"].is_array()) throw ConfigError("law needs array 'params'");

    const auto period = doc["period"].get<std::int64_t>();
    const auto family = doc["family"].get<std::string>();
    const json& params = doc["params"];
    if (period < 1) throw ConfigError("period must be >= 1");
    if (static_cast<std::int64_t>(params.size()) != period) {
        throw ConfigError("period is " + std::to_string(period) + " but " + std::to_string(params.size()) +
                          " phase records were given");
    }

    std::vector<PhaseDensity> phases;
    phases.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const json& rec = params[i];
        if (family == "poisson") {
            phases.push_back(PhaseDensity::poisson(number_field(rec, "rate", i)));
        } else if (family == "gaussian") {
            const double mean = number_field(rec, "mean", i);
            if (rec.contains("variance")) {
                phases.push_back(PhaseDensity::gaussian(mean, number_field(rec, "variance", i)));
            } else {
                phases.push_back(PhaseDensity::gaussian_unit_var(mean));
            }
        } else {
            throw ConfigError("unknown family '" + family + "'");
        }
    }
    return IpidLaw(std::move(phases));
}

json bank_to_json(const std::vector<IpidLaw>& laws) {
    json out = json::array();
    for (const IpidLaw& l : laws) out.push_back(law_to_json(l));
    return out;
}

std::vector<IpidLaw> bank_from_json(const json& doc) {
    if (!doc.is_array() || doc.empty()) throw ConfigError("candidate bank must be a non-empty array of laws");
    std::vector<IpidLaw> out;
    for (const json& d : doc) out.push_back(law_from_json(d));
    return out;
}

json streams_to_json(const std::vector<StreamLaws>& streams) {
    json arr = json::array();
    for (const StreamLaws& s : streams) arr.push_back({{"pre", law_to_json(s.pre)}, {"post", law_to_json(s.post)}});
    return {{"streams", arr}};
}

std::vector<StreamLaws> streams_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("streams") || !doc["streams"].is_array() || doc["streams"].empty()) {
        throw ConfigError("stream bank needs a non-empty 'streams' array");
    }
    std::vector<StreamLaws> out;
    for (const json& s : doc["streams"]) {
        if (!s.is_object() || !s.contains("pre") || !s.contains("post")) {
            throw ConfigError("each stream needs 'pre' and 'post' laws");
        }
        out.push_back({law_from_json(s["pre"]), law_from_json(s["post"])});
    }
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace pcusum
