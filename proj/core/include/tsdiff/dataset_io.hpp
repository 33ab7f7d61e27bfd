#pragma once

// On-disk formats: the JSON-lines dataset manifest written by `generate`, the
// JSON-lines prediction files, and the per-directory run manifest.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsdiff/evaluator.hpp"
#include "tsdiff/pairgen.hpp"
#include "tsdiff/schema.hpp"

namespace tsdiff {

inline constexpr std::string_view kManifestName = "manifest.jsonl";
inline constexpr std::string_view kRunManifestName = "run_manifest.json";

/// Shortest decimal text that reads back to exactly `v`.
std::string format_double(double v);

/// Sidecar CSV names relative to the manifest directory; unset => inline arrays.
struct SeriesFiles {
  std::string ref;
  std::string tgt;
};

/// One manifest line (no trailing newline):
/// {"id": ..., "ref": [...] | "ref_file": ..., "tgt": [...] | "tgt_file": ...,
///  "ground_truth": [...], "provenance": {"seed", "index", "source", "config_hash"}}
std::string manifest_line(const PairSample& sample, const std::optional<SeriesFiles>& files = std::nullopt);

/// Single-column CSV with header "value".
std::string series_csv(std::span<const double> series);
/// Two-column CSV "ref,tgt" for external plotting.
std::string overlay_csv(std::span<const double> ref, std::span<const double> tgt);

struct ManifestEntry {
  std::string id;
  TimeSeries reference;
  TimeSeries target;
  ExplanationList ground_truth;
  Provenance provenance;
};

/// Reads a manifest (a file, or a directory holding manifest.jsonl). Sidecar paths
/// resolve against the manifest's directory. Syntax errors carry the file line.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// {"id": ..., "explanation": [...]}
std::string prediction_line(std::string_view id, const ExplanationList& list);

/// Reads id-keyed lists from a prediction file or a manifest (its ground truth).
std::vector<IdentifiedList> read_lists(const std::filesystem::path& path,
                                       ParseMode mode = ParseMode::Strict);

struct TextValidation {
  std::size_t records = 0;            // records that passed
  std::vector<std::string> problems;  // one message per failing array or line
};

/// Validates a whole-file JSON array, or JSON lines where each line is an array or an
/// object carrying "explanation" or "ground_truth". Manifest lines are also checked
/// against the length of their inline series.
TextValidation validate_text(std::string_view text, ParseMode mode = ParseMode::Strict);

/// Writes via a sibling temporary file and rename. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::optional<std::uint64_t> seed;
  std::string tool_version;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  std::string to_json() const;
};

}  // namespace tsdiff
