#include "tsdiff/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tsdiff/errors.hpp"

namespace tsdiff {
namespace {

using Json = nlohmann::ordered_json;

Range read_range(const Json& j, std::string_view key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("ranges." + std::string(key) + " must be a [lo, hi] pair of numbers");
  }
  return Range{j[0].get<double>(), j[1].get<double>()};
}

double read_number(const Json& j, std::string_view key) {
  if (!j.is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.get<double>();
}

int read_int(const Json& j, std::string_view key) {
  if (!j.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return j.get<int>();
}

void apply_ranges(const Json& j, LibraryRanges& r) {
  if (!j.is_object()) throw ConfigError("ranges must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "amplitude") {
      r.amplitude = read_range(value, key);
    } else if (key == "frequency") {
      r.frequency = read_range(value, key);
    } else if (key == "phase") {
      r.phase = read_range(value, key);
    } else if (key == "amplitude_offset") {
      r.amplitude_offset = read_range(value, key);
    } else if (key == "frequency_ratio") {
      r.frequency_ratio = read_range(value, key);
    } else if (key == "nonevent_min_frac") {
      r.nonevent_min_frac = read_number(value, key);
    } else if (key == "nonevent_max_frac") {
      r.nonevent_max_frac = read_number(value, key);
    } else if (key == "event_max_frac") {
      r.event_max_frac = read_number(value, key);
    } else {
      throw ConfigError("unknown key ranges." + key);
    }
  }
}

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

}  // namespace

GenConfig parse_config(std::string_view text, GenConfig base) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "length") {
      base.length = read_int(value, key);
    } else if (key == "kmin") {
      base.k_min = read_int(value, key);
    } else if (key == "kmax") {
      base.k_max = read_int(value, key);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
      base.seed = value.get<std::uint64_t>();
    } else if (key == "source") {
      if (!value.is_string()) throw ConfigError("source must be a string");
      base.source = BaselineSource::parse(value.get<std::string>());
    } else if (key == "ranges") {
      apply_ranges(value, base.ranges);
    } else {
      throw ConfigError("unknown config key " + key);
    }
  }
  base.validate();
  return base;
}

GenConfig load_config(const std::filesystem::path& path, GenConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string config_to_json(const GenConfig& c) {
  Json ranges;
  ranges["amplitude"] = range_json(c.ranges.amplitude);
  ranges["frequency"] = range_json(c.ranges.frequency);
  ranges["phase"] = range_json(c.ranges.phase);
  ranges["amplitude_offset"] = range_json(c.ranges.amplitude_offset);
  ranges["frequency_ratio"] = range_json(c.ranges.frequency_ratio);
  ranges["nonevent_min_frac"] = c.ranges.nonevent_min_frac;
  ranges["nonevent_max_frac"] = c.ranges.nonevent_max_frac;
  ranges["event_max_frac"] = c.ranges.event_max_frac;
  Json j;
  j["length"] = c.length;
  j["kmin"] = c.k_min;
  j["kmax"] = c.k_max;
  j["seed"] = c.seed;
  j["source"] = c.source.descriptor();
  j["ranges"] = ranges;
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const GenConfig& config) { return hex64(fnv1a64(config_to_json(config))); }

}  // namespace tsdiff
