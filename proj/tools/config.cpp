#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "levyk/errors.hpp"

namespace levyk::cli {

using nlohmann::json;

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("version")) throw ConfigError("config: missing 'version'");
  if (!j["version"].is_number_integer() || j["version"].get<int>() != kConfigVersion)
    throw ConfigError("config: unsupported version (expected " + std::to_string(kConfigVersion) + ")");
  return j;
}

Block::Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool Block::has(const std::string& key) const { return j_.contains(key); }

const json& Block::at(const std::string& key) {
  if (!j_.contains(key)) throw ConfigError(path_ + ": missing '" + key + "'");
  seen_.push_back(key);
  return j_.at(key);
}

const json& Block::raw(const std::string& key) { return at(key); }

double Block::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
  return v.get<double>();
}

double Block::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Block::integer(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
  return v.get<int>();
}

int Block::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

bool Block::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(path_ + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string Block::string(const std::string& key) {
  const json& v = at(key);
  if (!v.is_string()) throw ConfigError(path_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Block::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Block::numbers(const std::string& key) {
  const json& v = at(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> Block::points(const std::string& key) {
  if (has(key) && j_.at(key).is_array()) return numbers(key);
  Block b = object(key);
  const double start = b.number("start"), stop = b.number("stop");
  const int count = b.integer("count");
  const std::string spacing = b.string("spacing", "linear");
  b.finish();
  if (count < 1) throw ConfigError(path_ + "." + key + ".count: must be positive");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (spacing == "linear") {
    for (int i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  } else if (spacing == "log") {
    if (!(start > 0.0 && stop > 0.0)) throw ConfigError(path_ + "." + key + ": log spacing needs positive bounds");
    for (int i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] =
          count == 1 ? start : start * std::pow(stop / start, static_cast<double>(i) / (count - 1));
  } else {
    throw ConfigError(path_ + "." + key + ".spacing: expected 'linear' or 'log'");
  }
  return out;
}

Block Block::object(const std::string& key) { return Block(at(key), path_ + "." + key); }

void Block::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
      throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }
}

ProfileSpec parse_profile(Block b) {
  const std::string kind = b.string("kind");
  ProfileSpec p;
  if (kind == "pure_stable") {
    p = PureStable{b.number("beta")};
  } else if (kind == "tempered_stable") {
    p = TemperedStable{b.number("beta"), b.number("kappa"), b.number("eta"), b.number("delta")};
  } else if (kind == "relativistic_stable") {
    p = RelativisticStable{b.number("beta"), b.number("m")};
  } else if (kind == "custom_tabulated") {
    p = CustomTabulated{b.numbers("radii"), b.numbers("values")};
  } else {
    throw ConfigError("profile.kind: unknown kind '" + kind + "'");
  }
  b.finish();
  return p;
}

LevyModel parse_model(Block b) {
  const int dim = b.integer("dim", 1);
  ProfileSpec profile = parse_profile(b.object("profile"));
  const double comparability = b.number("comparability", 1.0);
  const bool closed = b.boolean("closed_form", true);
  b.finish();
  if (dim < 1) throw ConfigError("model.dim: must be at least 1");
  return LevyModel::create(dim, std::move(profile), comparability, closed);
}

PotentialSpec parse_potential(Block b) {
  const std::string kind = b.string("kind");
  PotentialSpec v;
  if (kind == "square_well") {
    v = SquareWell{b.number("depth"), b.number("radius")};
  } else if (kind == "gaussian_well") {
    v = GaussianWell{b.number("depth"), b.number("width")};
  } else if (kind == "tabulated") {
    v = TabulatedPotential{b.numbers("grid"), b.numbers("values")};
  } else {
    throw ConfigError("potential.kind: unknown kind '" + kind + "'");
  }
  b.finish();
  return v;
}

}  // namespace levyk::cli
