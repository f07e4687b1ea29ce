#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levyk/levy_models.hpp"
#include "levyk/schrodinger.hpp"

namespace levyk::cli {

inline constexpr int kConfigVersion = 1;

/// Parses and schema-checks a run configuration; throws ConfigError.
nlohmann::json load_config(const std::string& path);

/// Strict view of one JSON object: every key must be read before finish().
class Block {
 public:
  Block(const nlohmann::json& j, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  /// A list of numbers, or {"start", "stop", "count", "spacing": "linear|log"}.
  std::vector<double> points(const std::string& key);
  Block object(const std::string& key);
  const nlohmann::json& raw(const std::string& key);
  void finish() const;

 private:
  const nlohmann::json& at(const std::string& key);

  const nlohmann::json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

/// {"dim", "profile": {"kind", ...}, "comparability", "closed_form"}.
LevyModel parse_model(Block block);
ProfileSpec parse_profile(Block block);
PotentialSpec parse_potential(Block block);

}  // namespace levyk::cli
