#pragma once

// Human-editable JSON config file: generation settings plus library range overrides.
//
// {
//   "length": 300, "kmin": 1, "kmax": 1, "seed": 7, "source": "random_walk",
//   "ranges": {
//     "amplitude": [0.5, 3.0], "frequency": [2, 10], "phase": [0, 6.283185307179586],
//     "amplitude_offset": [0.5, 1.5], "frequency_ratio": [1.5, 3.0],
//     "nonevent_min_frac": 0.15, "nonevent_max_frac": 0.9, "event_max_frac": 0.05
//   }
// }
//
// Every key is optional; missing keys keep their defaults. Unknown keys are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "tsdiff/pairgen.hpp"

namespace tsdiff {

/// Applies the keys present in `text` on top of `base`. Throws ConfigError.
GenConfig parse_config(std::string_view text, GenConfig base = {});
GenConfig load_config(const std::filesystem::path& path, GenConfig base = {});

/// Canonical single-line JSON of every field (stable key order).
std::string config_to_json(const GenConfig& config);

/// 16 hex digits of FNV-1a 64 over config_to_json(config).
std::string config_hash(const GenConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace tsdiff
