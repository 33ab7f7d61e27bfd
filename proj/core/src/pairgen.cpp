#include "tsdiff/pairgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tsdiff/config.hpp"
#include "tsdiff/errors.hpp"

namespace tsdiff {
namespace {

constexpr double kStdFloor = 1e-8;

bool parse_double(std::string_view field, double& out) {
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
  while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
  if (field.empty()) return false;
  const std::string s(field);
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus file " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

TimeSeries read_column_file(const std::filesystem::path& path) {
  TimeSeries out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    double v = 0.0;
    if (parse_double(split_commas(lines[i]).front(), v)) {
      out.push_back(v);
    } else if (i != 0) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": not a number");
    }
  }
  if (out.empty()) throw DataError(path.string() + ": no samples");
  return out;
}

}  // namespace

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::RandomWalk:
      return "random_walk";
    case BaselineKind::Ar1:
      return "ar1";
    case BaselineKind::SineMix:
      return "sine_mix";
    case BaselineKind::PiecewiseConst:
      return "piecewise";
  }
  return "?";
}

std::optional<BaselineKind> parse_baseline_kind(std::string_view s) {
  for (auto k : {BaselineKind::RandomWalk, BaselineKind::Ar1, BaselineKind::SineMix, BaselineKind::PiecewiseConst}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string BaselineSource::descriptor() const {
  if (corpus) return "corpus:" + corpus->string();
  return std::string(to_string(kind));
}

BaselineSource BaselineSource::parse(std::string_view descriptor) {
  constexpr std::string_view prefix = "corpus:";
  BaselineSource s;
  if (descriptor.substr(0, prefix.size()) == prefix) {
    const auto path = descriptor.substr(prefix.size());
    if (path.empty()) throw ConfigError("corpus source needs a path");
    s.corpus = std::filesystem::path(std::string(path));
    return s;
  }
  const auto kind = parse_baseline_kind(descriptor);
  if (!kind) throw ConfigError("unknown baseline source '" + std::string(descriptor) + "'");
  s.kind = *kind;
  return s;
}

void GenConfig::validate() const {
  if (k_min < 1 || k_max < k_min) throw ConfigError("kmax must be >= kmin >= 1");
  Catalog check(length, ranges);
}

std::vector<std::string> ElementaryDifference::check() const {
  std::vector<std::string> out;
  if (!active_ref && !active_tgt) out.emplace_back("phenomenon inactive on both sides");
  if ((diff_type == DiffType::Type1) != (active_ref != active_tgt)) {
    out.emplace_back("TYPE1 iff exactly one side is active");
  }
  if (diff_type == DiffType::Type2) {
    if (!diff_param) {
      out.emplace_back("TYPE2 needs a differing parameter");
    } else {
      if (theta_ref.keys() != theta_tgt.keys()) out.emplace_back("parameter vectors have different keys");
      for (Param p : theta_ref.keys()) {
        if (!theta_tgt.contains(p)) continue;
        const bool same = theta_ref.at(p) == theta_tgt.at(p);
        if (p == *diff_param && std::abs(theta_ref.at(p)) == std::abs(theta_tgt.at(p))) {
          out.emplace_back("differing parameter has equal magnitude on both sides");
        } else if (p != *diff_param && !same) {
          out.emplace_back("parameter " + std::string(to_string(p)) + " differs but is not the differing one");
        }
      }
    }
  } else if (diff_param) {
    out.emplace_back("TYPE1 must not carry a differing parameter");
  }
  return out;
}

TimeSeries ElementaryDifference::signed_component(const Catalog& catalog) const {
  const auto& spec = catalog.spec(func);
  TimeSeries out(static_cast<std::size_t>(catalog.length()), 0.0);
  if (active_tgt) {
    const auto g = evaluate(spec, theta_tgt, interval, catalog.length(), noise_seed);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += g[t];
  }
  if (active_ref) {
    const auto g = evaluate(spec, theta_ref, interval, catalog.length(), noise_seed);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] -= g[t];
  }
  return out;
}

TimeSeries resample_linear(std::span<const double> raw, int length) {
  if (raw.empty()) throw DataError("cannot resample an empty series");
  if (length < 1) throw PreconditionError("target length must be >= 1");
  TimeSeries out(static_cast<std::size_t>(length));
  const auto n = raw.size();
  if (n == 1 || length == 1) {
    std::fill(out.begin(), out.end(), raw.front());
    return out;
  }
  const double step = static_cast<double>(n - 1) / static_cast<double>(length - 1);
  for (int j = 0; j < length; ++j) {
    const double pos = j * step;
    const auto i = std::min(static_cast<std::size_t>(pos), n - 2);
    const double w = pos - static_cast<double>(i);
    out[static_cast<std::size_t>(j)] = raw[i] + w * (raw[i + 1] - raw[i]);
  }
  return out;
}

TimeSeries preprocess_baseline(std::span<const double> raw, int length) {
  if (raw.empty()) throw DataError("baseline series is empty");
  if (!std::all_of(raw.begin(), raw.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("baseline series has non-finite values");
  }
  TimeSeries x = raw.size() < static_cast<std::size_t>(length)
                     ? resample_linear(raw, length)
                     : TimeSeries(raw.begin(), raw.begin() + length);
  // Summing offsets from x[0] makes a constant input centre to exactly zero.
  double shift = 0.0;
  for (double v : x) shift += v - x[0];
  const double mean = x[0] + shift / static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const double sd = std::max(std::sqrt(var), kStdFloor);
  for (double& v : x) v = (v - mean) / sd;
  return x;
}

ElementaryDifference sample_difference(const Catalog& catalog, Rng& rng) {
  const Category category = kCategories[static_cast<std::size_t>(rng.uniform_int(0, 3))];
  const auto members = catalog.in_category(category);
  const FuncId func = members[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(members.size()) - 1))];
  const FunctionSpec& spec = catalog.spec(func);

  ElementaryDifference d;
  d.func = func;
  const ParamVector base = sample_base_params(spec, rng);
  d.interval = sample_interval(spec, catalog.length(), rng);
  d.diff_type = rng.coin() ? DiffType::Type2 : DiffType::Type1;
  if (d.diff_type == DiffType::Type1) {
    d.active_tgt = rng.coin();
    d.active_ref = !d.active_tgt;
    // The inactive side never contributes; it keeps a copy so both vectors are defined.
    d.theta_ref = base;
    d.theta_tgt = base;
  } else {
    const auto candidates = spec.modifiable();
    const Param p = candidates[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<long long>(candidates.size()) - 1))];
    const ParamVector modified = modify_param(spec, base, p, rng);
    d.active_ref = d.active_tgt = true;
    d.diff_param = p;
    if (rng.coin()) {
      d.theta_ref = base;
      d.theta_tgt = modified;
    } else {
      d.theta_ref = modified;
      d.theta_tgt = base;
    }
  }
  d.noise_seed = rng.next();
  return d;
}

DifferenceRecord to_record(const ElementaryDifference& d) {
  if (auto problems = d.check(); !problems.empty()) {
    throw std::logic_error("invalid elementary difference: " + problems.front());
  }
  DifferenceRecord r;
  r.type = d.diff_type;
  r.func = d.func;
  r.start = d.interval.start;
  r.end = d.interval.end;
  if (d.diff_type == DiffType::Type1) {
    r.presence = d.active_tgt ? Presence::Present : Presence::Absent;
  } else {
    const Param p = *d.diff_param;
    r.param = p;
    r.magnitude = std::abs(d.theta_tgt.at(p)) > std::abs(d.theta_ref.at(p)) ? Magnitude::Larger : Magnitude::Smaller;
  }
  return r;
}

PairSample generate_pair(const TimeSeries& baseline, const Catalog& catalog, int k_min, int k_max, Rng& rng) {
  if (baseline.size() != static_cast<std::size_t>(catalog.length())) {
    throw DataError("baseline length " + std::to_string(baseline.size()) + " does not match catalog length " +
                    std::to_string(catalog.length()));
  }
  if (k_min < 1 || k_max < k_min) throw ConfigError("kmax must be >= kmin >= 1");

  PairSample s;
  s.reference = baseline;
  s.target = baseline;
  const auto k = rng.uniform_int(k_min, k_max);
  for (long long i = 0; i < k; ++i) s.internal.push_back(sample_difference(catalog, rng));

  for (const auto& d : s.internal) {
    const auto& spec = catalog.spec(d.func);
    if (d.active_ref) {
      const auto g = evaluate(spec, d.theta_ref, d.interval, catalog.length(), d.noise_seed);
      for (std::size_t t = 0; t < g.size(); ++t) s.reference[t] += g[t];
    }
    if (d.active_tgt) {
      const auto g = evaluate(spec, d.theta_tgt, d.interval, catalog.length(), d.noise_seed);
      for (std::size_t t = 0; t < g.size(); ++t) s.target[t] += g[t];
    }
  }

  std::stable_sort(s.internal.begin(), s.internal.end(),
                   [](const ElementaryDifference& a, const ElementaryDifference& b) {
                     if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
                     return to_string(a.func) < to_string(b.func);
                   });
  for (const auto& d : s.internal) s.ground_truth.push_back(to_record(d));
  return s;
}

TimeSeries synth_random_walk(int length, Rng& rng) {
  TimeSeries x(static_cast<std::size_t>(length));
  double level = 0.0;
  for (double& v : x) {
    level += rng.normal();
    v = level;
  }
  return x;
}

TimeSeries synth_ar1(int length, double coefficient, Rng& rng) {
  TimeSeries x(static_cast<std::size_t>(length));
  double prev = 0.0;
  for (double& v : x) {
    prev = coefficient * prev + rng.normal();
    v = prev;
  }
  return x;
}

TimeSeries synth_sine_mix(int length, Rng& rng) {
  TimeSeries x(static_cast<std::size_t>(length), 0.0);
  for (int k = 0; k < 3; ++k) {
    const double freq = rng.uniform(0.5, 5.0);
    const double amp = rng.uniform(0.5, 1.5);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int t = 0; t < length; ++t) {
      x[static_cast<std::size_t>(t)] += amp * std::sin(2.0 * std::numbers::pi * freq * t / length + phase);
    }
  }
  return x;
}

TimeSeries synth_piecewise_const(int length, int segments, Rng& rng) {
  segments = std::clamp(segments, 1, std::max(1, length));
  // Partial Fisher-Yates over the candidate breakpoints 1..length-1.
  std::vector<int> cuts(static_cast<std::size_t>(std::max(0, length - 1)));
  std::iota(cuts.begin(), cuts.end(), 1);
  for (int i = 0; i < segments - 1; ++i) {
    const auto j = rng.uniform_int(i, static_cast<long long>(cuts.size()) - 1);
    std::swap(cuts[static_cast<std::size_t>(i)], cuts[static_cast<std::size_t>(j)]);
  }
  cuts.resize(static_cast<std::size_t>(segments - 1));
  std::sort(cuts.begin(), cuts.end());

  TimeSeries x(static_cast<std::size_t>(length));
  std::size_t next_cut = 0;
  double level = rng.normal();
  for (int t = 0; t < length; ++t) {
    if (next_cut < cuts.size() && t == cuts[next_cut]) {
      level = rng.normal();
      ++next_cut;
    }
    x[static_cast<std::size_t>(t)] = level;
  }
  return x;
}

TimeSeries synth_baseline(BaselineKind kind, int length, Rng& rng) {
  switch (kind) {
    case BaselineKind::RandomWalk:
      return synth_random_walk(length, rng);
    case BaselineKind::Ar1:
      return synth_ar1(length, rng.uniform(0.5, 0.95), rng);
    case BaselineKind::SineMix:
      return synth_sine_mix(length, rng);
    case BaselineKind::PiecewiseConst:
      return synth_piecewise_const(length, static_cast<int>(rng.uniform_int(1, 5)), rng);
  }
  throw std::logic_error("unknown baseline kind");
}

std::vector<TimeSeries> load_corpus(const std::filesystem::path& path) {
  std::error_code ec;
  std::vector<TimeSeries> out;
  if (std::filesystem::is_directory(path, ec)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list corpus directory " + path.string());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(read_column_file(f));
  } else if (std::filesystem::is_regular_file(path, ec)) {
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      TimeSeries row;
      bool ok = true;
      for (auto field : split_commas(lines[i])) {
        double v = 0.0;
        if (!parse_double(field, v)) {
          ok = false;
          break;
        }
        row.push_back(v);
      }
      if (ok) {
        out.push_back(std::move(row));
      } else if (i != 0) {
        throw DataError(path.string() + ":" + std::to_string(i + 1) + ": not a number");
      }
    }
  } else {
    throw IoError("corpus path not found: " + path.string());
  }
  if (out.empty()) throw DataError("corpus " + path.string() + " holds no series");
  return out;
}

PairGenerator::PairGenerator(GenConfig config)
    : config_(std::move(config)), catalog_(config_.length, config_.ranges), config_hash_(tsdiff::config_hash(config_)) {
  config_.validate();
  if (config_.source.corpus) corpus_ = load_corpus(*config_.source.corpus);
}

PairSample PairGenerator::sample(std::uint64_t index) const {
  Rng rng = Rng::substream(config_.seed, index);
  const TimeSeries raw =
      corpus_.empty()
          ? synth_baseline(config_.source.kind, config_.length, rng)
          : corpus_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(corpus_.size()) - 1))];
  const TimeSeries baseline = preprocess_baseline(raw, config_.length);
  PairSample s = generate_pair(baseline, catalog_, config_.k_min, config_.k_max, rng);
  s.id = sample_id(index);
  s.provenance = Provenance{config_.seed, index, config_.source.descriptor(), config_hash_};
  return s;
}

std::vector<PairSample> PairGenerator::generate(std::size_t n, unsigned threads) const {
  std::vector<PairSample> out(n);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = sample(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += threads) out[i] = sample(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string sample_id(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(index));
  return buf;
}

}  // namespace tsdiff
