#pragma once

#include <string>
#include <vector>

#include "vsrplan/common.hpp"

namespace YAML {
class Node;
}

namespace vsr {

struct LoadLevelSpec {
  std::string label;
  double scale = 1.0;
};

// Layered key-value settings: documented defaults underneath, an optional
// YAML file merged on top. Keys are dotted paths like "vsr.comp_max".
class Config {
 public:
  Config();
  Config(const Config& other);
  Config& operator=(const Config& other);
  ~Config();

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& yaml_text);

  bool has(const std::string& key) const;
  bool is_list(const std::string& key) const;
  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;
  std::vector<int> integer_list(const std::string& key) const;
  std::vector<LoadLevelSpec> load_levels() const;

  // Overrides one key with a YAML scalar or flow-style value.
  void set(const std::string& key, const std::string& yaml_value);

  // Flat sorted key=value view of the effective settings, for report echo.
  std::vector<std::pair<std::string, std::string>> flattened() const;

 private:
  explicit Config(const YAML::Node& merged);
  const YAML::Node& root() const;
  // Owned via pointer so yaml-cpp stays out of this header.
  YAML::Node* root_ = nullptr;
};

}  // namespace vsr
