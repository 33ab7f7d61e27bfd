#pragma once

// Component-function library: the 28 named signal shapes, grouped into four
// categories, with their parameter vocabulary, sampling ranges, duration bounds
// and the offset/ratio rules used to build a second, strictly larger parameter.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsdiff/rng.hpp"

namespace tsdiff {

using TimeSeries = std::vector<double>;

inline constexpr int kDefaultLength = 300;

enum class Category : std::uint8_t { Trend, Periodic, Fluctuation, Event };

inline constexpr std::array<Category, 4> kCategories{Category::Trend, Category::Periodic,
                                                     Category::Fluctuation, Category::Event};

std::string_view to_string(Category c);

enum class FuncId : std::uint8_t {
  LinearIncrease,
  LinearDecrease,
  QuadraticIncrease,
  QuadraticDecrease,
  CubicIncrease,
  CubicDecrease,
  ExponentialGrowth,
  InvertedExponentialGrowth,
  ExponentialDecay,
  InvertedExponentialDecay,
  LogIncrease,
  LogDecrease,
  Sigmoid,
  InvertedSigmoid,
  Gaussian,
  InvertedGaussian,
  Sinusoidal,
  Sawtooth,
  SquareWave,
  TriangleWave,
  GaussianNoise,
  LaplaceNoise,
  Spike,
  Drop,
  PositiveStep,
  NegativeStep,
  PositivePulse,
  NegativePulse,
};

inline constexpr std::size_t kNumFunctions = 28;

/// Uppercase JSON name, e.g. "TRIANGLE_WAVE".
std::string_view to_string(FuncId id);
std::optional<FuncId> parse_func_id(std::string_view name);
Category category_of(FuncId id);
std::array<FuncId, kNumFunctions> all_functions();

enum class Param : std::uint8_t { Amplitude, Frequency, Phase };

inline constexpr std::size_t kNumParams = 3;

std::string_view to_string(Param p);
std::optional<Param> parse_param(std::string_view name);

/// Parameter name -> value. Only the parameters of the owning function are set.
class ParamVector {
 public:
  ParamVector() = default;

  bool contains(Param p) const { return present_[index(p)]; }
  /// Throws DomainError when `p` is not set.
  double at(Param p) const;
  void set(Param p, double value);
  std::vector<Param> keys() const;
  bool all_finite() const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;

 private:
  static constexpr std::size_t index(Param p) { return static_cast<std::size_t>(p); }
  std::array<double, kNumParams> values_{};
  std::array<bool, kNumParams> present_{};
};

/// Inclusive sample-index range.
struct Interval {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int t) const { return t >= start && t <= end; }
  bool valid_for(int series_length) const { return 0 <= start && start <= end && end < series_length; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double mid() const { return 0.5 * (lo + hi); }
};

enum class ModKind : std::uint8_t { Offset, Ratio };

/// OFFSET adds eta > 0 to |value|, RATIO multiplies |value| by rho > 1.
struct ModRule {
  ModKind kind = ModKind::Offset;
  Range range;
};

struct ParamSpec {
  Param name = Param::Amplitude;
  Range base;
  std::optional<ModRule> mod;  // set iff the parameter may be the differing one
  bool integer_valued = false;
};

struct DurationBounds {
  int min_len = 1;
  int max_len = 1;
};

struct FunctionSpec {
  FuncId id = FuncId::LinearIncrease;
  Category category = Category::Trend;
  std::vector<ParamSpec> params;
  DurationBounds duration;

  std::string_view name() const { return to_string(id); }
  bool has_param(Param p) const;
  const ParamSpec& param(Param p) const;
  std::vector<Param> param_names() const;
  std::vector<Param> modifiable() const;
  bool is_modifiable(Param p) const;
};

/// Numeric ranges shared by the whole library; all overridable from the config file.
struct LibraryRanges {
  Range amplitude{0.5, 3.0};
  Range frequency{2.0, 10.0};
  Range phase{0.0, 6.283185307179586};
  Range amplitude_offset{0.5, 1.5};
  Range frequency_ratio{1.5, 3.0};
  double nonevent_min_frac = 0.15;
  double nonevent_max_frac = 0.9;
  double event_max_frac = 0.05;

  friend bool operator==(const LibraryRanges&, const LibraryRanges&) = default;
};

/// The static library instantiated for one series length. Immutable after construction.
class Catalog {
 public:
  /// Throws ConfigError when the ranges or the length violate the duration invariants.
  explicit Catalog(int length = kDefaultLength, LibraryRanges ranges = {});

  int length() const { return length_; }
  const LibraryRanges& ranges() const { return ranges_; }
  std::span<const FunctionSpec> specs() const { return specs_; }
  const FunctionSpec& spec(FuncId id) const { return specs_[static_cast<std::size_t>(id)]; }
  std::vector<FuncId> in_category(Category c) const;

 private:
  int length_;
  LibraryRanges ranges_;
  std::vector<FunctionSpec> specs_;
};

/// Catalog for the default series length and ranges.
const Catalog& default_catalog();

/// Unit-amplitude value of a deterministic function at local time u in [0, 1].
/// Periodic shapes use `frequency` (cycles per interval) and `phase` (radians).
/// Fluctuation functions have no deterministic shape and return 0.
double unit_shape(FuncId id, double u, double frequency = 0.0, double phase = 0.0);

/// Fills `out` with zero-mean, unit-variance i.i.d. draws of the noise family of `id`
/// (GAUSSIAN_NOISE or LAPLACE_NOISE) from the stream identified by `seed`.
void standard_noise(FuncId id, std::uint64_t seed, std::span<double> out);

/// Local time of sample t inside `interval`; 0 when the interval is a single point.
double local_time(const Interval& interval, int t);

/// Component signal 1[t in interval] * g(t; theta) over a series of `length` samples.
/// `noise_seed` selects the realization for fluctuation functions.
TimeSeries evaluate(const FunctionSpec& spec, const ParamVector& theta, const Interval& interval, int length,
                    std::uint64_t noise_seed = 0);

/// Throws PreconditionError unless theta has exactly spec's parameters, all finite.
void check_params(const FunctionSpec& spec, const ParamVector& theta);

ParamVector sample_base_params(const FunctionSpec& spec, Rng& rng);

/// Throws ConfigError when spec's minimum duration exceeds `length`.
Interval sample_interval(const FunctionSpec& spec, int length, Rng& rng);

/// Applies one offset/ratio step to `value`, preserving its sign. Integer-valued
/// parameters are rounded and pushed to at least |value| + 1.
double apply_modification(ModKind kind, double value, double amount, bool integer_valued = false);

/// Copy of theta with only entry `p` replaced by a strictly larger-magnitude value.
/// Throws DomainError when `p` is not modifiable for spec.
ParamVector modify_param(const FunctionSpec& spec, const ParamVector& theta, Param p, Rng& rng);

}  // namespace tsdiff
