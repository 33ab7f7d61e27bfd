#pragma once

// Non-neural explainers mapping a (reference, target) pair to an ExplanationList:
// a least-squares template matcher over the function library, a nearest-neighbour
// retrieval baseline over hand-crafted difference features, and an oracle.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsdiff/funclib.hpp"
#include "tsdiff/pairgen.hpp"
#include "tsdiff/schema.hpp"

namespace tsdiff {

struct ExplainConfig {
  int window = 5;               // sliding RMS window (samples)
  double tol = 0.05;            // RMS threshold, z-normalized units
  int gap_merge = 10;           // runs closer than this are merged
  double spike_factor = 6.0;    // isolated samples above spike_factor * tol become length-1 intervals
  double presence_threshold = 0.15;
  double min_explained = 0.5;   // fraction of a side's window energy a template must explain
  double delta_explained = 0.9; // fraction of the difference's window energy a single shape must explain
  double kurtosis_split = 1.5;  // excess kurtosis above this => LAPLACE_NOISE
  int max_components = 8;
};

/// tgt - ref. Throws DataError on length mismatch.
TimeSeries compute_delta(std::span<const double> ref, std::span<const double> tgt);

/// Candidate supports of `delta`, ascending by start.
std::vector<Interval> segment_delta(std::span<const double> delta, double tol, int window = 5, int gap_merge = 10,
                                    double spike_factor = 6.0);

struct FitResult {
  FuncId func = FuncId::LinearIncrease;
  ParamVector theta;
  Interval interval;
  double residual = 0.0;  // RMS of the fit error over the interval
};

struct SideEvidence {
  std::optional<FitResult> best;   // best deterministic template, if any candidate was feasible
  double explained = 0.0;          // 1 - rss/tss of `best` over the analysis window
  double absent_residual = 0.0;    // RMS of the detrended side with no component
  double noise_level = 0.0;        // std of the white-noise part inside the interval
};

/// Fits the same function on both sides over one shared interval.
struct JointFit {
  FuncId func = FuncId::LinearIncrease;
  Interval interval;
  std::array<ParamVector, 2> theta;
  double residual = 0.0;
};

struct ComponentFit {
  std::array<std::optional<FitResult>, 2> best;  // [0] reference, [1] target; set when the side holds a component
  std::array<SideEvidence, 2> sides;
  Interval window;                 // analysis window around the interval
  double delta_kurtosis = 0.0;     // excess kurtosis of tgt - ref inside the interval
  bool fluctuation = false;        // decided by distributional statistics, not pointwise fit
  bool from_delta = false;         // shape taken from a fit of tgt - ref
  std::optional<JointFit> shared;  // both sides hold the same shape with different amplitudes
  std::vector<std::string> notes;  // skipped candidates and similar
};

/// Least-squares template matching around `interval`. A shape that explains tgt - ref
/// on its own is attributed to a side by its amplitude in each series once a smooth
/// baseline is projected out; otherwise every candidate is fitted on each side.
ComponentFit fit_component(std::span<const double> ref, std::span<const double> tgt, const Interval& interval,
                           std::span<const FunctionSpec> candidates, const ExplainConfig& config = {});

std::optional<JointFit> fit_joint(std::span<const double> ref, std::span<const double> tgt, const Interval& interval,
                                  std::span<const FunctionSpec> candidates, const ExplainConfig& config = {});

ExplanationList explain_lsq(std::span<const double> ref, std::span<const double> tgt,
                            const ExplainConfig& config = {}, const Catalog& catalog = default_catalog());

/// Layout of feature_embed's output.
inline constexpr int kFeatureWindows = 16;
inline constexpr int kFeatureBands = 16;
inline constexpr int kFeatureDim = 4 * kFeatureWindows + kFeatureBands + 1 + 7 + 2;

/// Identifies the feature extractor; stored in pool files.
std::uint64_t feature_version();

/// Per window (16 equal chunks): mean, std, total slope change, RMS of first
/// differences. Then 16 spectral bands (DFT bins 1-32 in pairs) and the energy above
/// bin 32; global mean, std, excess kurtosis, min, max, argmin/T, argmax/T; the
/// largest absolute first difference and its position/T.
std::vector<double> feature_embed(std::span<const double> series);

/// embed(tgt) - embed(ref)
std::vector<double> difference_embedding(std::span<const double> ref, std::span<const double> tgt);

class RetrievalPool {
 public:
  struct Entry {
    std::vector<double> features;
    ExplanationList explanation;
  };

  RetrievalPool() = default;

  /// Throws PreconditionError when the feature vector has the wrong dimension.
  void add(std::vector<double> features, ExplanationList explanation);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int feature_dim() const { return kFeatureDim; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }

  /// Per-dimension RMS over all entries (1 where it vanishes). Similarities are
  /// computed on features divided by this scale.
  std::vector<double> scale() const;

  /// Index of the most cosine-similar entry; ties go to the lowest index.
  /// Throws PreconditionError on an empty pool.
  std::size_t nearest(std::span<const double> query) const;
  double similarity(std::span<const double> query, std::size_t i) const;

  void save(const std::filesystem::path& path) const;
  /// Throws DataError on dimension or feature-version mismatch, IoError on I/O failure.
  static RetrievalPool load(const std::filesystem::path& path);

  /// Pool of `n` pairs drawn by `generator` starting at sample index `first`.
  static RetrievalPool build(const PairGenerator& generator, std::size_t n, std::uint64_t first = 0,
                             unsigned threads = 1);

 private:
  std::vector<Entry> entries_;
  std::vector<double> sum_squares_ = std::vector<double>(kFeatureDim, 0.0);
};

ExplanationList explain_retrieval(std::span<const double> ref, std::span<const double> tgt,
                                  const RetrievalPool& pool);

/// Copy of the ground truth.
ExplanationList explain_oracle(const PairSample& sample);

}  // namespace tsdiff
