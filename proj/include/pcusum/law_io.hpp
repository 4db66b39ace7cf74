#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "pcusum/model.hpp"

namespace pcusum {

// Law documents: {"period": T, "family": "gaussian"|"poisson", "params": [...]}.
// See docs/formats.md for the per-phase records.
nlohmann::json law_to_json(const IpidLaw& law);
IpidLaw law_from_json(const nlohmann::json& doc);

// A candidate bank is a JSON array of law documents.
nlohmann::json bank_to_json(const std::vector<IpidLaw>& laws);
std::vector<IpidLaw> bank_from_json(const nlohmann::json& doc);

// {"streams": [{"pre": law, "post": law}, ...]}
nlohmann::json streams_to_json(const std::vector<StreamLaws>& streams);
std::vector<StreamLaws> streams_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace pcusum
