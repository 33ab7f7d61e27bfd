#pragma once

// Reference/target pair generation: baseline preprocessing, elementary-difference
// sampling, additive injection, and ground-truth emission.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdiff/funclib.hpp"
#include "tsdiff/rng.hpp"
#include "tsdiff/schema.hpp"

namespace tsdiff {

enum class BaselineKind : std::uint8_t { RandomWalk, Ar1, SineMix, PiecewiseConst };

/// Lowercase flag spelling: random_walk, ar1, sine_mix, piecewise.
std::string_view to_string(BaselineKind k);
std::optional<BaselineKind> parse_baseline_kind(std::string_view s);

struct BaselineSource {
  BaselineKind kind = BaselineKind::RandomWalk;
  std::optional<std::filesystem::path> corpus;  // set => read raw series from CSV instead

  /// "random_walk", ..., or "corpus:<path>".
  std::string descriptor() const;
  static BaselineSource parse(std::string_view descriptor);

  friend bool operator==(const BaselineSource&, const BaselineSource&) = default;
};

struct GenConfig {
  int length = kDefaultLength;
  int k_min = 1;
  int k_max = 1;
  std::uint64_t seed = 0;
  BaselineSource source;
  LibraryRanges ranges;

  /// Throws ConfigError on k_min < 1, k_max < k_min, or bad length/ranges.
  void validate() const;

  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

/// Ground truth for one injected phenomenon.
struct ElementaryDifference {
  FuncId func = FuncId::LinearIncrease;
  Interval interval;
  ParamVector theta_ref;
  ParamVector theta_tgt;
  bool active_ref = false;
  bool active_tgt = false;
  DiffType diff_type = DiffType::Type1;
  std::optional<Param> diff_param;
  std::uint64_t noise_seed = 0;

  /// Empty when every invariant holds.
  std::vector<std::string> check() const;

  /// Contribution to target - reference:
  /// 1[t in I] * (active_tgt * g(t; theta_tgt) - active_ref * g(t; theta_ref)).
  TimeSeries signed_component(const Catalog& catalog) const;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::string source;
  std::string config_hash;
};

struct PairSample {
  std::string id;
  TimeSeries reference;
  TimeSeries target;
  ExplanationList ground_truth;
  std::vector<ElementaryDifference> internal;  // same order as ground_truth
  Provenance provenance;
};

/// Linear-interpolation resampling of `raw` onto `length` evenly spaced points.
TimeSeries resample_linear(std::span<const double> raw, int length);

/// Resample (if shorter) or truncate (if longer) to `length`, then z-normalize with
/// population std clamped below by 1e-8. Throws DataError on empty/non-finite input.
TimeSeries preprocess_baseline(std::span<const double> raw, int length);

ElementaryDifference sample_difference(const Catalog& catalog, Rng& rng);

/// Throws std::logic_error when `d` violates its invariants.
DifferenceRecord to_record(const ElementaryDifference& d);

/// Injects K ~ U{k_min..k_max} sampled differences into copies of `baseline`.
PairSample generate_pair(const TimeSeries& baseline, const Catalog& catalog, int k_min, int k_max, Rng& rng);

TimeSeries synth_random_walk(int length, Rng& rng);
TimeSeries synth_ar1(int length, double coefficient, Rng& rng);
TimeSeries synth_sine_mix(int length, Rng& rng);
TimeSeries synth_piecewise_const(int length, int segments, Rng& rng);

/// Draws the family's own parameters from `rng`:
///   RANDOM_WALK     cumulative sum of N(0,1) steps
///   AR1             coefficient ~ U[0.5, 0.95], N(0,1) innovations
///   SINE_MIX        3 sines, frequency ~ U[0.5, 5] cycles/series, amplitude ~ U[0.5, 1.5], phase ~ U[0, 2pi)
///   PIECEWISE_CONST segments ~ U{1..5}, levels ~ N(0,1)
TimeSeries synth_baseline(BaselineKind kind, int length, Rng& rng);

/// Raw series read from CSV: a directory of files (one series each, first column,
/// optional header) or a single file holding one comma-separated series per row.
std::vector<TimeSeries> load_corpus(const std::filesystem::path& path);

/// Deterministic dataset generator. Sample i depends only on (config, i).
class PairGenerator {
 public:
  explicit PairGenerator(GenConfig config);

  const GenConfig& config() const { return config_; }
  const Catalog& catalog() const { return catalog_; }
  const std::string& config_hash() const { return config_hash_; }

  PairSample sample(std::uint64_t index) const;

  /// Samples 0..n-1 in index order; `threads` only changes wall-clock time.
  std::vector<PairSample> generate(std::size_t n, unsigned threads = 1) const;

 private:
  GenConfig config_;
  Catalog catalog_;
  std::string config_hash_;
  std::vector<TimeSeries> corpus_;
};

std::string sample_id(std::uint64_t index);

}  // namespace tsdiff
