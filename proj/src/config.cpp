#include "vsrplan/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace vsr {

namespace {

const char* kDefaults = R"(
vsr:
  comp_min: -0.7
  comp_max: 0.2
  device_cost: 1.95e+06
  tighten: true
finance:
  interest: 0.05
  life_years: 5
network:
  theta_max: 1.0471975511965976
  emergency_factor: 1.1
  thermal_scale: 1.0
  default_rating_mva: 10000.0
  auto_rating: false
  auto_rating_margin: 1.5
gen:
  ramp_frac: 0.25
  reschedulable: all
penalty:
  load_shed: 5000.0
  adjust_up_frac: 1.2
  adjust_dn_frac: 0.8
  slack_factor: 10.0
scenario:
  load_levels:
    - label: peak
      scale: 1.2
    - label: normal
      scale: 1.0
    - label: low
      scale: 0.8
  base_hours_split: [0.15, 0.55, 0.30]
  contingency_hours: 2.0
screen:
  num_contingencies: 30
  num_candidates: 30
solver:
  backend: builtin
  gap: 1.0e-04
  node_limit: 20000
  time_limit_s: 0.0
  max_nonzeros: 50000
benders:
  epsilon: 1.0e-03
  iter_cap: 50
  alpha_down: 0.0
)";

// Every map key in the user document must exist in the defaults at the same
// level, so typos fail loudly. List and scalar contents replace wholesale.
void check_known(const YAML::Node& base, const YAML::Node& over,
                 const std::string& path) {
  if (!over.IsMap()) return;
  if (!base.IsMap()) {
    throw Error(ErrorCode::BadConfig, "'" + path + "' is not a section");
  }
  for (const auto& kv : over) {
    std::string key = kv.first.as<std::string>();
    std::string full = path.empty() ? key : path + "." + key;
    if (!base[key]) {
      throw Error(ErrorCode::BadConfig, "unknown config key '" + full + "'");
    }
    check_known(base[key], kv.second, full);
  }
}

void apply_over(YAML::Node base, const YAML::Node& over) {
  for (const auto& kv : over) {
    std::string key = kv.first.as<std::string>();
    if (kv.second.IsMap() && base[key] && base[key].IsMap()) {
      apply_over(base[key], kv.second);
    } else {
      base[key] = YAML::Clone(kv.second);
    }
  }
}

std::vector<std::string> split_key(const std::string& key) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(key);
  while (std::getline(in, part, '.')) parts.push_back(part);
  return parts;
}

YAML::Node navigate(const YAML::Node& root, const std::string& key) {
  YAML::Node at = root;
  for (const std::string& part : split_key(key)) {
    if (!at.IsMap() || !at[part]) return YAML::Node(YAML::NodeType::Undefined);
    at.reset(at[part]);
  }
  return at;
}

void flatten_into(const YAML::Node& node, const std::string& path,
                  std::vector<std::pair<std::string, std::string>>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      std::string key = kv.first.as<std::string>();
      flatten_into(kv.second, path.empty() ? key : path + "." + key, out);
    }
  } else if (node.IsSequence()) {
    for (size_t i = 0; i < node.size(); ++i) {
      flatten_into(node[i], path + "." + std::to_string(i), out);
    }
  } else {
    out.emplace_back(path, YAML::Dump(node));
  }
}

}  // namespace

Config::Config() : root_(new YAML::Node(YAML::Load(kDefaults))) {}

Config::Config(const YAML::Node& merged)
    : root_(new YAML::Node(YAML::Clone(merged))) {}

Config::Config(const Config& other)
    : root_(new YAML::Node(YAML::Clone(*other.root_))) {}

Config& Config::operator=(const Config& other) {
  if (this != &other) {
    delete root_;
    root_ = new YAML::Node(YAML::Clone(*other.root_));
  }
  return *this;
}

Config::~Config() { delete root_; }

const YAML::Node& Config::root() const { return *root_; }

Config Config::from_string(const std::string& yaml_text) {
  YAML::Node user;
  try {
    user = YAML::Load(yaml_text);
  } catch (const YAML::Exception& err) {
    throw Error(ErrorCode::BadConfig,
                std::string("config parse failed: ") + err.what());
  }
  YAML::Node merged = YAML::Load(kDefaults);
  if (user && !user.IsNull()) {
    if (!user.IsMap()) {
      throw Error(ErrorCode::BadConfig, "config root must be a mapping");
    }
    check_known(merged, user, "");
    apply_over(merged, user);
  }
  return Config(merged);
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open config file " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str());
}

bool Config::has(const std::string& key) const {
  return navigate(root(), key).IsDefined();
}

bool Config::is_list(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  return node.IsDefined() && node.IsSequence();
}

double Config::number(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined()) {
    throw Error(ErrorCode::BadConfig, "missing config key '" + key + "'");
  }
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::BadConfig, "config key '" + key + "' is not a number");
  }
}

int Config::integer(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined()) {
    throw Error(ErrorCode::BadConfig, "missing config key '" + key + "'");
  }
  try {
    return node.as<int>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::BadConfig,
                "config key '" + key + "' is not an integer");
  }
}

bool Config::flag(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined()) {
    throw Error(ErrorCode::BadConfig, "missing config key '" + key + "'");
  }
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::BadConfig, "config key '" + key + "' is not a flag");
  }
}

std::string Config::text(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined()) {
    throw Error(ErrorCode::BadConfig, "missing config key '" + key + "'");
  }
  try {
    return node.as<std::string>();
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::BadConfig, "config key '" + key + "' is not text");
  }
}

std::vector<double> Config::number_list(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined() || !node.IsSequence()) {
    throw Error(ErrorCode::BadConfig,
                "config key '" + key + "' is not a number list");
  }
  std::vector<double> values;
  for (const auto& item : node) {
    try {
      values.push_back(item.as<double>());
    } catch (const YAML::Exception&) {
      throw Error(ErrorCode::BadConfig,
                  "config key '" + key + "' holds a non-numeric entry");
    }
  }
  return values;
}

std::vector<int> Config::integer_list(const std::string& key) const {
  YAML::Node node = navigate(root(), key);
  if (!node.IsDefined() || !node.IsSequence()) {
    throw Error(ErrorCode::BadConfig,
                "config key '" + key + "' is not an integer list");
  }
  std::vector<int> values;
  for (const auto& item : node) {
    try {
      values.push_back(item.as<int>());
    } catch (const YAML::Exception&) {
      throw Error(ErrorCode::BadConfig,
                  "config key '" + key + "' holds a non-integer entry");
    }
  }
  return values;
}

std::vector<LoadLevelSpec> Config::load_levels() const {
  YAML::Node node = navigate(root(), "scenario.load_levels");
  if (!node.IsDefined() || !node.IsSequence() || node.size() == 0) {
    throw Error(ErrorCode::BadConfig,
                "scenario.load_levels must be a nonempty list");
  }
  std::vector<LoadLevelSpec> levels;
  for (const auto& item : node) {
    if (!item.IsMap() || !item["label"] || !item["scale"]) {
      throw Error(ErrorCode::BadConfig,
                  "each load level needs 'label' and 'scale'");
    }
    LoadLevelSpec spec;
    spec.label = item["label"].as<std::string>();
    try {
      spec.scale = item["scale"].as<double>();
    } catch (const YAML::Exception&) {
      throw Error(ErrorCode::BadConfig, "load level scale is not a number");
    }
    if (!(spec.scale > 0.0)) {
      throw Error(ErrorCode::BadConfig,
                  "load level '" + spec.label + "' has nonpositive scale");
    }
    levels.push_back(spec);
  }
  return levels;
}

void Config::set(const std::string& key, const std::string& yaml_value) {
  std::vector<std::string> parts = split_key(key);
  if (parts.empty()) {
    throw Error(ErrorCode::BadConfig, "empty config key");
  }
  YAML::Node value;
  try {
    value = YAML::Load(yaml_value);
  } catch (const YAML::Exception&) {
    throw Error(ErrorCode::BadConfig,
                "cannot parse value for config key '" + key + "'");
  }
  YAML::Node at = *root_;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!at[parts[i]] || !at[parts[i]].IsMap()) at[parts[i]] = YAML::Node();
    at.reset(at[parts[i]]);
  }
  at[parts.back()] = value;
}

std::vector<std::pair<std::string, std::string>> Config::flattened() const {
  std::vector<std::pair<std::string, std::string>> out;
  flatten_into(root(), "", out);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace vsr
