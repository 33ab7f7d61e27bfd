#include "tsdiff/funclib.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tsdiff/errors.hpp"

namespace tsdiff {
namespace {

constexpr std::array<std::string_view, kNumFunctions> kFuncNames{
    "LINEAR_INCREASE",
    "LINEAR_DECREASE",
    "QUADRATIC_INCREASE",
    "QUADRATIC_DECREASE",
    "CUBIC_INCREASE",
    "CUBIC_DECREASE",
    "EXPONENTIAL_GROWTH",
    "INVERTED_EXPONENTIAL_GROWTH",
    "EXPONENTIAL_DECAY",
    "INVERTED_EXPONENTIAL_DECAY",
    "LOG_INCREASE",
    "LOG_DECREASE",
    "SIGMOID",
    "INVERTED_SIGMOID",
    "GAUSSIAN",
    "INVERTED_GAUSSIAN",
    "SINUSOIDAL",
    "SAWTOOTH",
    "SQUARE_WAVE",
    "TRIANGLE_WAVE",
    "GAUSSIAN_NOISE",
    "LAPLACE_NOISE",
    "SPIKE",
    "DROP",
    "POSITIVE_STEP",
    "NEGATIVE_STEP",
    "POSITIVE_PULSE",
    "NEGATIVE_PULSE",
};

constexpr std::array<std::string_view, kNumParams> kParamNames{"AMPLITUDE", "FREQUENCY", "PHASE"};

// Fixed shape constants of the trend forms.
constexpr double kExpShape = 4.0;
constexpr double kSigmoidSteepness = 12.0;
constexpr double kGaussianWidth = 0.15;

double frac(double x) { return x - std::floor(x); }

int round_to_int(double x) { return static_cast<int>(std::lround(x)); }

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Trend:
      return "TREND";
    case Category::Periodic:
      return "PERIODIC";
    case Category::Fluctuation:
      return "FLUCTUATION";
    case Category::Event:
      return "EVENT";
  }
  return "?";
}

std::string_view to_string(FuncId id) { return kFuncNames[static_cast<std::size_t>(id)]; }

std::optional<FuncId> parse_func_id(std::string_view name) {
  for (std::size_t i = 0; i < kNumFunctions; ++i) {
    if (kFuncNames[i] == name) return static_cast<FuncId>(i);
  }
  return std::nullopt;
}

Category category_of(FuncId id) {
  const auto i = static_cast<int>(id);
  if (i <= static_cast<int>(FuncId::InvertedGaussian)) return Category::Trend;
  if (i <= static_cast<int>(FuncId::TriangleWave)) return Category::Periodic;
  if (i <= static_cast<int>(FuncId::LaplaceNoise)) return Category::Fluctuation;
  return Category::Event;
}

std::array<FuncId, kNumFunctions> all_functions() {
  std::array<FuncId, kNumFunctions> out{};
  for (std::size_t i = 0; i < kNumFunctions; ++i) out[i] = static_cast<FuncId>(i);
  return out;
}

std::string_view to_string(Param p) { return kParamNames[static_cast<std::size_t>(p)]; }

std::optional<Param> parse_param(std::string_view name) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (kParamNames[i] == name) return static_cast<Param>(i);
  }
  return std::nullopt;
}

double ParamVector::at(Param p) const {
  if (!contains(p)) throw DomainError("parameter " + std::string(to_string(p)) + " is not set");
  return values_[index(p)];
}

void ParamVector::set(Param p, double value) {
  values_[index(p)] = value;
  present_[index(p)] = true;
}

std::vector<Param> ParamVector::keys() const {
  std::vector<Param> out;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (present_[i]) out.push_back(static_cast<Param>(i));
  }
  return out;
}

bool ParamVector::all_finite() const {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (present_[i] && !std::isfinite(values_[i])) return false;
  }
  return true;
}

bool FunctionSpec::has_param(Param p) const {
  return std::any_of(params.begin(), params.end(), [p](const ParamSpec& s) { return s.name == p; });
}

const ParamSpec& FunctionSpec::param(Param p) const {
  for (const auto& s : params) {
    if (s.name == p) return s;
  }
  throw DomainError(std::string(name()) + " has no parameter " + std::string(to_string(p)));
}

std::vector<Param> FunctionSpec::param_names() const {
  std::vector<Param> out;
  for (const auto& s : params) out.push_back(s.name);
  return out;
}

std::vector<Param> FunctionSpec::modifiable() const {
  std::vector<Param> out;
  for (const auto& s : params) {
    if (s.mod) out.push_back(s.name);
  }
  return out;
}

bool FunctionSpec::is_modifiable(Param p) const {
  return std::any_of(params.begin(), params.end(), [p](const ParamSpec& s) { return s.name == p && s.mod; });
}

Catalog::Catalog(int length, LibraryRanges ranges) : length_(length), ranges_(ranges) {
  if (length < 1) throw ConfigError("series length must be >= 1");
  const auto& r = ranges_;
  if (!(r.amplitude.lo <= r.amplitude.hi) || !(r.frequency.lo <= r.frequency.hi) || !(r.phase.lo <= r.phase.hi)) {
    throw ConfigError("base ranges must satisfy lo <= hi");
  }
  if (!(r.frequency.lo > 0.0)) throw ConfigError("frequency range must be positive");
  if (!(r.amplitude_offset.lo > 0.0) || !(r.amplitude_offset.lo <= r.amplitude_offset.hi)) {
    throw ConfigError("amplitude offset range must satisfy 0 < lo <= hi");
  }
  if (!(r.frequency_ratio.lo > 1.0) || !(r.frequency_ratio.lo <= r.frequency_ratio.hi)) {
    throw ConfigError("frequency ratio range must satisfy 1 < lo <= hi");
  }

  // Step and pulse need two samples to be told apart from spike and drop.
  const int event_max = std::max(2, round_to_int(r.event_max_frac * length));
  const int nonevent_min = std::max(event_max + 1, round_to_int(r.nonevent_min_frac * length));
  const int nonevent_max = std::min(length, std::max(nonevent_min, round_to_int(r.nonevent_max_frac * length)));
  if (event_max > length || nonevent_min > length) {
    throw ConfigError("series length " + std::to_string(length) + " is too short for the duration bounds");
  }

  const ParamSpec amplitude{Param::Amplitude, r.amplitude, ModRule{ModKind::Offset, r.amplitude_offset}, false};
  const ParamSpec frequency{Param::Frequency, r.frequency, ModRule{ModKind::Ratio, r.frequency_ratio}, true};
  const ParamSpec phase{Param::Phase, r.phase, std::nullopt, false};

  specs_.reserve(kNumFunctions);
  for (FuncId id : all_functions()) {
    FunctionSpec s;
    s.id = id;
    s.category = category_of(id);
    s.params.push_back(amplitude);
    if (s.category == Category::Periodic) {
      s.params.push_back(frequency);
      s.params.push_back(phase);
    }
    if (s.category == Category::Event) {
      s.duration = (id == FuncId::Spike || id == FuncId::Drop) ? DurationBounds{1, 1} : DurationBounds{2, event_max};
    } else {
      s.duration = DurationBounds{nonevent_min, nonevent_max};
    }
    specs_.push_back(std::move(s));
  }
}

std::vector<FuncId> Catalog::in_category(Category c) const {
  std::vector<FuncId> out;
  for (const auto& s : specs_) {
    if (s.category == c) out.push_back(s.id);
  }
  return out;
}

const Catalog& default_catalog() {
  static const Catalog catalog;
  return catalog;
}

double unit_shape(FuncId id, double u, double frequency, double phase) {
  using std::numbers::pi;
  const double cycles = frequency * u + phase / (2.0 * pi);
  switch (id) {
    case FuncId::LinearIncrease:
      return u;
    case FuncId::LinearDecrease:
      return -u;
    case FuncId::QuadraticIncrease:
      return u * u;
    case FuncId::QuadraticDecrease:
      return -u * u;
    case FuncId::CubicIncrease:
      return u * u * u;
    case FuncId::CubicDecrease:
      return -u * u * u;
    case FuncId::ExponentialGrowth:
      return std::expm1(kExpShape * u) / std::expm1(kExpShape);
    case FuncId::InvertedExponentialGrowth:
      return -std::expm1(kExpShape * u) / std::expm1(kExpShape);
    case FuncId::ExponentialDecay:
      return std::exp(-kExpShape * u);
    case FuncId::InvertedExponentialDecay:
      return -std::exp(-kExpShape * u);
    case FuncId::LogIncrease:
      return std::log1p(9.0 * u) / std::log(10.0);
    case FuncId::LogDecrease:
      return -std::log1p(9.0 * u) / std::log(10.0);
    case FuncId::Sigmoid:
      return 1.0 / (1.0 + std::exp(-kSigmoidSteepness * (u - 0.5)));
    case FuncId::InvertedSigmoid:
      return -1.0 / (1.0 + std::exp(-kSigmoidSteepness * (u - 0.5)));
    case FuncId::Gaussian:
      return std::exp(-(u - 0.5) * (u - 0.5) / (2.0 * kGaussianWidth * kGaussianWidth));
    case FuncId::InvertedGaussian:
      return -std::exp(-(u - 0.5) * (u - 0.5) / (2.0 * kGaussianWidth * kGaussianWidth));
    case FuncId::Sinusoidal:
      return std::sin(2.0 * pi * cycles);
    case FuncId::Sawtooth:
      return 2.0 * frac(cycles) - 1.0;
    case FuncId::SquareWave:
      return frac(cycles) < 0.5 ? 1.0 : -1.0;
    case FuncId::TriangleWave:
      return 1.0 - 4.0 * std::abs(frac(cycles) - 0.5);
    case FuncId::GaussianNoise:
    case FuncId::LaplaceNoise:
      return 0.0;
    case FuncId::Spike:
    case FuncId::PositivePulse:
      return 1.0;
    case FuncId::Drop:
    case FuncId::NegativePulse:
      return -1.0;
    case FuncId::PositiveStep:
      return u < 0.5 ? 0.5 : 1.0;
    case FuncId::NegativeStep:
      return u < 0.5 ? -0.5 : -1.0;
  }
  return 0.0;
}

void standard_noise(FuncId id, std::uint64_t seed, std::span<double> out) {
  Rng rng(seed);
  if (id == FuncId::GaussianNoise) {
    for (double& v : out) v = rng.normal();
    return;
  }
  if (id != FuncId::LaplaceNoise) throw PreconditionError("standard_noise needs a fluctuation function");
  // Inverse CDF with scale 1/sqrt(2), i.e. unit variance.
  const double scale = 1.0 / std::numbers::sqrt2;
  for (double& v : out) {
    double p = 0.0;
    do {
      p = rng.uniform(-0.5, 0.5);
    } while (1.0 - 2.0 * std::abs(p) <= 0.0);
    v = -scale * std::copysign(1.0, p) * std::log(1.0 - 2.0 * std::abs(p));
  }
}

double local_time(const Interval& interval, int t) {
  if (interval.end == interval.start) return 0.0;
  return static_cast<double>(t - interval.start) / static_cast<double>(interval.end - interval.start);
}

void check_params(const FunctionSpec& spec, const ParamVector& theta) {
  if (theta.keys() != spec.param_names()) {
    throw PreconditionError("parameter vector does not match " + std::string(spec.name()));
  }
  if (!theta.all_finite()) throw PreconditionError("parameter vector has non-finite entries");
}

TimeSeries evaluate(const FunctionSpec& spec, const ParamVector& theta, const Interval& interval, int length,
                    std::uint64_t noise_seed) {
  check_params(spec, theta);
  if (!interval.valid_for(length)) {
    throw PreconditionError("interval [" + std::to_string(interval.start) + ", " + std::to_string(interval.end) +
                            "] invalid for length " + std::to_string(length));
  }
  TimeSeries out(static_cast<std::size_t>(length), 0.0);
  const double amplitude = theta.at(Param::Amplitude);
  auto support = std::span<double>(out).subspan(static_cast<std::size_t>(interval.start),
                                               static_cast<std::size_t>(interval.length()));
  if (spec.category == Category::Fluctuation) {
    standard_noise(spec.id, noise_seed, support);
    for (double& v : support) v *= amplitude;
    return out;
  }
  const double frequency = theta.contains(Param::Frequency) ? theta.at(Param::Frequency) : 0.0;
  const double phase = theta.contains(Param::Phase) ? theta.at(Param::Phase) : 0.0;
  for (int t = interval.start; t <= interval.end; ++t) {
    out[static_cast<std::size_t>(t)] = amplitude * unit_shape(spec.id, local_time(interval, t), frequency, phase);
  }
  return out;
}

ParamVector sample_base_params(const FunctionSpec& spec, Rng& rng) {
  ParamVector theta;
  for (const auto& p : spec.params) {
    if (p.integer_valued) {
      theta.set(p.name, static_cast<double>(rng.uniform_int(static_cast<long long>(std::ceil(p.base.lo)),
                                                            static_cast<long long>(std::floor(p.base.hi)))));
    } else if (p.base.lo == p.base.hi) {
      theta.set(p.name, p.base.lo);
    } else {
      theta.set(p.name, rng.uniform(p.base.lo, p.base.hi));
    }
  }
  return theta;
}

Interval sample_interval(const FunctionSpec& spec, int length, Rng& rng) {
  if (spec.duration.min_len > length) {
    throw ConfigError(std::string(spec.name()) + ": minimum duration " + std::to_string(spec.duration.min_len) +
                      " exceeds series length " + std::to_string(length));
  }
  const int max_len = std::min(spec.duration.max_len, length);
  const auto len = static_cast<int>(rng.uniform_int(spec.duration.min_len, max_len));
  const auto start = static_cast<int>(rng.uniform_int(0, length - len));
  return Interval{start, start + len - 1};
}

double apply_modification(ModKind kind, double value, double amount, bool integer_valued) {
  const double sign = std::signbit(value) ? -1.0 : 1.0;
  const double magnitude = std::abs(value);
  double grown = 0.0;
  if (kind == ModKind::Offset) {
    if (!(amount > 0.0)) throw PreconditionError("offset must be > 0");
    grown = magnitude + amount;
  } else {
    if (!(amount > 1.0)) throw PreconditionError("ratio must be > 1");
    if (magnitude == 0.0) throw PreconditionError("ratio rule cannot enlarge a zero parameter");
    grown = magnitude * amount;
  }
  if (integer_valued) grown = std::max(std::round(grown), std::round(magnitude) + 1.0);
  return sign * grown;
}

ParamVector modify_param(const FunctionSpec& spec, const ParamVector& theta, Param p, Rng& rng) {
  if (!spec.is_modifiable(p)) {
    throw DomainError(std::string(to_string(p)) + " is not modifiable for " + std::string(spec.name()));
  }
  check_params(spec, theta);
  const ParamSpec& ps = spec.param(p);
  const double amount = ps.mod->range.lo == ps.mod->range.hi ? ps.mod->range.lo
                                                              : rng.uniform(ps.mod->range.lo, ps.mod->range.hi);
  ParamVector out = theta;
  out.set(p, apply_modification(ps.mod->kind, theta.at(p), amount, ps.integer_valued));
  return out;
}

}  // namespace tsdiff
