#include <algorithm>
#include <filesystem>

#include <json.hpp>

#include "pgr/errors.hpp"
#include "pgr/frame_io.hpp"
#include "pgr/ground_removal.hpp"

namespace pgr {

using nlohmann::json;

namespace {

RemovalConfig kitti_defaults() {
  RemovalConfig cfg;
  cfg.resolution = 0.4;
  cfg.delta_minmax = 0.4;
  cfg.er = 1.8;
  cfg.delta_env = 0.4;
  cfg.restore_rules = {{30.0, 1.8}, {kUnbounded, 5.4}};
  return cfg;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"pgr-c0-kitti", "pgr-c0-waymo", "pgr-c1", "pgr-c2", "pgr-c3", "pgr-c4"};
}

RemovalConfig named_config(std::string_view name) {
  RemovalConfig cfg = kitti_defaults();
  if (name == "pgr-c0-kitti") return cfg;
  if (name == "pgr-c0-waymo") {
    cfg.restore_rules[0].delta_res = 2.2;
    return cfg;
  }
  if (name == "pgr-c1") {
    cfg.er = 1.4;
    return cfg;
  }
  if (name == "pgr-c2") {
    cfg.restore_rules[0].delta_res = 1.4;
    return cfg;
  }
  if (name == "pgr-c3") {
    cfg.delta_minmax = 0.6;
    return cfg;
  }
  if (name == "pgr-c4") {
    cfg.er = 0.6;
    cfg.delta_minmax = 0.35;
    cfg.restore_rules[0].delta_res = 1.6;
    cfg.restore_rules[1].delta_res = 5.2;
    return cfg;
  }
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown removal config '" + std::string(name) + "'; valid presets: " + valid);
}

RemovalConfig parse_removal_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("removal config is not valid JSON: ") + e.what());
  }
  RemovalConfig cfg = kitti_defaults();
  try {
    cfg.resolution = doc.value("resolution", cfg.resolution);
    cfg.delta_minmax = doc.value("delta_minmax", cfg.delta_minmax);
    cfg.er = doc.value("er", cfg.er);
    cfg.delta_env = doc.value("delta_env", cfg.delta_env);
    if (doc.contains("restore_rules")) {
      cfg.restore_rules.clear();
      for (const json& r : doc.at("restore_rules")) {
        RestoreRule rule;
        const json& mr = r.at("max_range");
        rule.max_range = mr.is_null() ? kUnbounded : mr.get<double>();
        rule.delta_res = r.at("delta_res").get<double>();
        cfg.restore_rules.push_back(rule);
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("removal config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string serialize_removal_config(const RemovalConfig& cfg) {
  json rules = json::array();
  for (const RestoreRule& r : cfg.restore_rules) {
    json mr = r.max_range == kUnbounded ? json(nullptr) : json(r.max_range);
    rules.push_back({{"max_range", mr}, {"delta_res", r.delta_res}});
  }
  json doc = {{"resolution", cfg.resolution},
              {"delta_minmax", cfg.delta_minmax},
              {"er", cfg.er},
              {"delta_env", cfg.delta_env},
              {"restore_rules", rules}};
  return doc.dump(2) + "\n";
}

RemovalConfig load_removal_config(const std::filesystem::path& path) {
  try {
    return parse_removal_config(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

RemovalConfig resolve_removal_config(std::string_view name_or_path) {
  const std::string name(name_or_path);
  const auto presets = preset_names();
  if (std::find(presets.begin(), presets.end(), name) != presets.end()) return named_config(name);
  if (name == "c0" || name == "pgr-c0") return named_config("pgr-c0-kitti");
  if (name.rfind("pgr-", 0) != 0) {
    const std::string prefixed = "pgr-" + name;
    if (std::find(presets.begin(), presets.end(), prefixed) != presets.end()) {
      return named_config(prefixed);
    }
  }
  const std::filesystem::path path(name);
  if (path.extension() == ".json" && std::filesystem::exists(path)) return load_removal_config(path);
  return named_config(name);  // throws LookupError listing presets
}

}  // namespace pgr
