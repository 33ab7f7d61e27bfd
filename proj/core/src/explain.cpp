#include "tsdiff/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "tsdiff/config.hpp"
#include "tsdiff/errors.hpp"
#include "tsdiff/stats.hpp"

namespace tsdiff {
namespace {

constexpr int kRef = 0;
constexpr int kTgt = 1;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPhaseGrid = 24;
constexpr int kGoldenIterations = 24;
constexpr int kMaxFrequency = 40;
constexpr int kWindowExpansions = 3;

// A side of the pair restricted to the analysis window, with its local baseline removed.
struct Side {
  Interval window;
  std::vector<double> y;
  double tss = 0.0;

  double at(int t) const { return y[static_cast<std::size_t>(t - window.start)]; }
  int size() const { return window.length(); }
};

// Baseline = least-squares line through the window samples outside `core`, or their
// mean when they lie on one side only, or zero when there are none.
Side detrend(std::span<const double> x, const Interval& window, const Interval& core) {
  std::vector<int> left;
  std::vector<int> right;
  for (int t = window.start; t <= window.end; ++t) {
    if (t < core.start) left.push_back(t);
    if (t > core.end) right.push_back(t);
  }
  double intercept = 0.0;
  double slope = 0.0;
  if (left.size() >= 2 && right.size() >= 2) {
    double st = 0, sx = 0, stt = 0, stx = 0;
    double n = 0;
    for (const auto* side : {&left, &right}) {
      for (int t : *side) {
        const double v = x[static_cast<std::size_t>(t)];
        st += t;
        sx += v;
        stt += static_cast<double>(t) * t;
        stx += t * v;
        n += 1;
      }
    }
    const double den = n * stt - st * st;
    slope = den != 0.0 ? (n * stx - st * sx) / den : 0.0;
    intercept = (sx - slope * st) / n;
  } else if (!left.empty() || !right.empty()) {
    double s = 0.0;
    for (int t : left) s += x[static_cast<std::size_t>(t)];
    for (int t : right) s += x[static_cast<std::size_t>(t)];
    intercept = s / static_cast<double>(left.size() + right.size());
  }
  Side side;
  side.window = window;
  side.y.resize(static_cast<std::size_t>(window.length()));
  for (int t = window.start; t <= window.end; ++t) {
    const double v = x[static_cast<std::size_t>(t)] - (intercept + slope * t);
    side.y[static_cast<std::size_t>(t - window.start)] = v;
    side.tss += v * v;
  }
  return side;
}

struct AmplitudeFit {
  double amplitude = 0.0;
  double rss = 0.0;
};

// Non-negative least-squares amplitude of `shape` over `iv`; the template is zero
// elsewhere in the window, so rss covers the whole window.
template <typename Shape>
AmplitudeFit fit_amplitude(const Side& side, const Interval& iv, Shape&& shape) {
  double sy = 0.0;
  double ss = 0.0;
  for (int t = iv.start; t <= iv.end; ++t) {
    const double s = shape(t);
    sy += side.at(t) * s;
    ss += s * s;
  }
  if (ss <= 0.0 || sy <= 0.0) return {0.0, side.tss};
  return {sy / ss, std::max(0.0, side.tss - sy * sy / ss)};
}

double wrap_phase(double phi) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  return phi;
}

struct PeriodicFit {
  double frequency = 0.0;
  double phase = 0.0;
  double amplitude = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

// Closed-form sine fit: A sin(x + phi) = a sin x + b cos x.
PeriodicFit fit_sine(const Side& side, const Interval& iv, double frequency) {
  double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
  for (int t = iv.start; t <= iv.end; ++t) {
    const double x = kTwoPi * frequency * local_time(iv, t);
    const double s = std::sin(x);
    const double c = std::cos(x);
    const double y = side.at(t);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys += y * s;
    yc += y * c;
  }
  const double det = ss * cc - sc * sc;
  PeriodicFit out;
  out.frequency = frequency;
  if (std::abs(det) < 1e-9 * std::max(1.0, ss * cc)) return out;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  out.amplitude = std::hypot(a, b);
  out.phase = wrap_phase(std::atan2(b, a));
  out.rss = std::max(0.0, side.tss - (a * ys + b * yc));
  return out;
}

PeriodicFit fit_waveform_at(FuncId f, const Side& side, const Interval& iv, double frequency, double phase) {
  const auto fit = fit_amplitude(side, iv, [&](int t) { return unit_shape(f, local_time(iv, t), frequency, phase); });
  return PeriodicFit{frequency, wrap_phase(phase), fit.amplitude, fit.rss};
}

// Phase grid followed by golden-section refinement around the best grid point.
PeriodicFit fit_waveform(FuncId f, const Side& side, const Interval& iv, double frequency) {
  if (f == FuncId::Sinusoidal) return fit_sine(side, iv, frequency);
  PeriodicFit best;
  for (int k = 0; k < kPhaseGrid; ++k) {
    auto fit = fit_waveform_at(f, side, iv, frequency, kTwoPi * k / kPhaseGrid);
    if (fit.rss < best.rss) best = fit;
  }
  const double step = kTwoPi / kPhaseGrid;
  double lo = best.phase - step;
  double hi = best.phase + step;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  auto f1 = fit_waveform_at(f, side, iv, frequency, x1);
  auto f2 = fit_waveform_at(f, side, iv, frequency, x2);
  for (int i = 0; i < kGoldenIterations; ++i) {
    if (f1.rss <= f2.rss) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = fit_waveform_at(f, side, iv, frequency, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = fit_waveform_at(f, side, iv, frequency, x2);
    }
  }
  for (const auto& c : {f1, f2}) {
    if (c.rss < best.rss) best = c;
  }
  return best;
}

PeriodicFit fit_periodic(FuncId f, const Side& side, const Interval& iv, std::span<const double> frequencies) {
  PeriodicFit best;
  for (double freq : frequencies) {
    auto fit = fit_waveform(f, side, iv, freq);
    if (fit.rss < best.rss) best = fit;
  }
  return best;
}

// The non-sine waves share the sine's fundamental, so their phase search only runs
// next to the best few sine frequencies.
std::vector<double> fundamentals(const Side& side, const Interval& iv, std::span<const double> grid) {
  constexpr std::size_t kPeaks = 3;
  std::vector<std::pair<double, double>> scored;
  for (double F : grid) scored.emplace_back(fit_sine(side, iv, F).rss, F);
  std::sort(scored.begin(), scored.end());
  std::vector<double> peaks;
  for (const auto& [rss, F] : scored) {
    if (peaks.size() == kPeaks) break;
    if (std::none_of(peaks.begin(), peaks.end(), [F](double p) { return std::abs(p - F) < 0.75; })) peaks.push_back(F);
  }
  std::vector<double> out;
  for (double p : peaks) {
    for (double d : {-0.25, 0.0, 0.25}) {
      if (p + d > 0.0) out.push_back(p + d);
    }
  }
  return out;
}

int max_frequency(const Interval& iv) { return std::max(1, std::min(kMaxFrequency, iv.length() - 1)); }

std::vector<double> integer_frequencies(int lo, int hi) {
  std::vector<double> out;
  for (int f = std::max(1, lo); f <= hi; ++f) out.push_back(f);
  return out;
}

struct Candidate {
  Interval iv;
  double rss = std::numeric_limits<double>::infinity();
};

std::vector<int> grid(int lo, int hi, int stride) {
  std::vector<int> out;
  for (int v = lo; v < hi; v += stride) out.push_back(v);
  if (hi >= lo) out.push_back(hi);
  return out;
}

// Coarse grid over (start, end), then successively halved grids around the optimum.
template <typename Objective>
std::optional<Candidate> search_intervals(int s_lo, int s_hi, int e_lo, int e_hi, DurationBounds bounds,
                                          Objective&& objective) {
  auto feasible = [&](int s, int e) {
    const int len = e - s + 1;
    return s >= s_lo && s <= s_hi && e >= e_lo && e <= e_hi && s <= e && len >= bounds.min_len &&
           len <= bounds.max_len;
  };
  if (s_lo > s_hi || e_lo > e_hi) return std::nullopt;
  const int span = std::max(s_hi - s_lo, e_hi - e_lo);
  int stride = std::max(1, span / 24);
  std::optional<Candidate> best;
  auto consider = [&](int s, int e) {
    if (!feasible(s, e)) return;
    const double r = objective(Interval{s, e});
    if (!best || r < best->rss) best = Candidate{Interval{s, e}, r};
  };
  for (int s : grid(s_lo, s_hi, stride)) {
    for (int e : grid(e_lo, e_hi, stride)) consider(s, e);
  }
  if (!best && stride > 1) {
    stride = 1;
    for (int s = s_lo; s <= s_hi; ++s) {
      for (int e = e_lo; e <= e_hi; ++e) consider(s, e);
    }
  }
  if (!best) return std::nullopt;
  while (stride > 1) {
    stride = std::max(1, stride / 2);
    const Interval c = best->iv;
    for (int s = c.start - 2 * stride; s <= c.start + 2 * stride; s += stride) {
      for (int e = c.end - 2 * stride; e <= c.end + 2 * stride; e += stride) consider(s, e);
    }
  }
  return best;
}

struct TemplateFit {
  Interval iv;
  std::vector<ParamVector> thetas;  // one per side
  double rss = 0.0;
};

ParamVector amplitude_only(double a) {
  ParamVector p;
  p.set(Param::Amplitude, a);
  return p;
}

ParamVector periodic_params(const PeriodicFit& f) {
  ParamVector p;
  p.set(Param::Amplitude, f.amplitude);
  p.set(Param::Frequency, f.frequency);
  p.set(Param::Phase, f.phase);
  return p;
}

// Fits `spec` on every side simultaneously (shared interval, per-side parameters).
std::optional<TemplateFit> fit_template(const FunctionSpec& spec, std::span<const Side* const> sides,
                                        const Interval& seg, int w, std::vector<std::string>& notes) {
  const Interval window = sides.front()->window;
  const FuncId f = spec.id;
  int s_lo = window.start;
  int s_hi = std::min(seg.end, seg.start + w);
  int e_lo = std::max(seg.start, seg.end - w);
  int e_hi = window.end;
  if (spec.category == Category::Event) {
    if (seg.length() > spec.duration.max_len + 2 * w) {
      notes.push_back(std::string(spec.name()) + ": segment longer than its duration bound");
      return std::nullopt;
    }
    s_lo = std::max(window.start, seg.start - w);
    e_hi = std::min(window.end, seg.end + w);
  }

  if (spec.category != Category::Periodic) {
    auto objective = [&](const Interval& iv) {
      double total = 0.0;
      for (const Side* side : sides) {
        total += fit_amplitude(*side, iv, [&](int t) { return unit_shape(f, local_time(iv, t)); }).rss;
      }
      return total;
    };
    auto best = search_intervals(s_lo, s_hi, e_lo, e_hi, spec.duration, objective);
    if (!best) {
      notes.push_back(std::string(spec.name()) + ": no feasible interval");
      return std::nullopt;
    }
    TemplateFit out{best->iv, {}, best->rss};
    for (const Side* side : sides) {
      const auto a = fit_amplitude(*side, best->iv, [&](int t) { return unit_shape(f, local_time(best->iv, t)); });
      out.thetas.push_back(amplitude_only(a.amplitude));
    }
    return out;
  }

  if (seg.length() < 3) {
    notes.push_back(std::string(spec.name()) + ": segment too short for a periodic fit");
    return std::nullopt;
  }
  // Per-side cycles-per-sample and phase at seg.start from a continuous-frequency fit on the segment.
  struct Hint {
    double cps;
    double phase;
  };
  std::vector<Hint> hints;
  std::vector<double> continuous;
  for (double F = 0.5; F <= max_frequency(seg) + 1e-9; F += 0.25) continuous.push_back(F);
  for (const Side* side : sides) {
    const auto pf = fit_periodic(f, *side, seg, f == FuncId::Sinusoidal ? continuous : fundamentals(*side, seg, continuous));
    hints.push_back({pf.frequency / static_cast<double>(seg.end - seg.start), pf.phase});
  }
  auto hinted_shape = [&](const Hint& h, int t) {
    return unit_shape(f, h.cps * (t - seg.start) + h.phase / kTwoPi, 1.0, 0.0);
  };
  auto objective = [&](const Interval& iv) {
    double total = 0.0;
    for (std::size_t i = 0; i < sides.size(); ++i) {
      total += fit_amplitude(*sides[i], iv, [&](int t) { return hinted_shape(hints[i], t); }).rss;
    }
    return total;
  };
  auto coarse = search_intervals(s_lo, s_hi, e_lo, e_hi, spec.duration, objective);
  if (!coarse) {
    notes.push_back(std::string(spec.name()) + ": no feasible interval");
    return std::nullopt;
  }

  // Integer-frequency refit at the coarse interval, then a local interval refinement.
  const Interval c = coarse->iv;
  std::vector<int> centre;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    const int fc = static_cast<int>(std::lround(hints[i].cps * (c.end - c.start)));
    const auto pf = fit_periodic(f, *sides[i], c, integer_frequencies(fc - 2, std::min(fc + 2, max_frequency(c))));
    centre.push_back(static_cast<int>(pf.frequency));
  }
  std::optional<TemplateFit> best;
  constexpr int kLocal = 2;
  for (int s = c.start - kLocal; s <= c.start + kLocal; ++s) {
    for (int e = c.end - kLocal; e <= c.end + kLocal; ++e) {
      const Interval iv{s, e};
      if (s < s_lo || s > s_hi || e < e_lo || e > e_hi || s >= e) continue;
      if (iv.length() < spec.duration.min_len || iv.length() > spec.duration.max_len) continue;
      TemplateFit tf{iv, {}, 0.0};
      for (std::size_t i = 0; i < sides.size(); ++i) {
        const auto pf = fit_periodic(f, *sides[i], iv,
                                     integer_frequencies(centre[i] - 1, std::min(centre[i] + 1, max_frequency(iv))));
        tf.rss += pf.rss;
        tf.thetas.push_back(periodic_params(pf));
      }
      if (!best || tf.rss < best->rss) best = std::move(tf);
    }
  }
  if (!best) notes.push_back(std::string(spec.name()) + ": no feasible interval");
  return best;
}

double fit_rms_on_interval(const Side& side, FuncId f, const ParamVector& theta, const Interval& iv) {
  const double freq = theta.contains(Param::Frequency) ? theta.at(Param::Frequency) : 0.0;
  const double phase = theta.contains(Param::Phase) ? theta.at(Param::Phase) : 0.0;
  const double a = theta.at(Param::Amplitude);
  double s = 0.0;
  for (int t = iv.start; t <= iv.end; ++t) {
    const double r = side.at(t) - a * unit_shape(f, local_time(iv, t), freq, phase);
    s += r * r;
  }
  return std::sqrt(s / iv.length());
}

struct Geometry {
  Interval window;
  Interval core;
};

Geometry geometry(const Interval& seg, int length, int w, int margin) {
  return Geometry{Interval{std::max(0, seg.start - margin), std::min(length - 1, seg.end + margin)},
                  Interval{std::max(0, seg.start - w), std::min(length - 1, seg.end + w)}};
}

bool touches_inner_edge(const Interval& iv, const Interval& window, int length) {
  return (iv.start == window.start && window.start > 0) || (iv.end == window.end && window.end < length - 1);
}

// Energy of the white-noise part of `side` inside `seg`: half the excess of the mean
// squared first difference over its value outside the core.
double noise_level(const Side& side, const Interval& seg, const Interval& core) {
  if (seg.length() < 2) return 0.0;
  double in = 0.0;
  for (int t = seg.start + 1; t <= seg.end; ++t) in += (side.at(t) - side.at(t - 1)) * (side.at(t) - side.at(t - 1));
  in /= seg.length() - 1;
  double out = 0.0;
  int n = 0;
  for (int t = side.window.start + 1; t <= side.window.end; ++t) {
    if (core.contains(t) || core.contains(t - 1)) continue;
    out += (side.at(t) - side.at(t - 1)) * (side.at(t) - side.at(t - 1));
    ++n;
  }
  if (n > 0) out /= n;
  return std::sqrt(std::max(0.0, in - out) / 2.0);
}

bool deterministic(const FunctionSpec& s) { return s.category != Category::Fluctuation; }

double delta_energy(std::span<const double> delta, const Interval& iv) {
  double e = 0.0;
  for (int t = iv.start; t <= iv.end; ++t) e += delta[static_cast<std::size_t>(t)] * delta[static_cast<std::size_t>(t)];
  return e;
}

// Mean squared first difference over twice the variance: about 1 for white noise and
// at most 1 - cos(2 pi / P) (sine) or 4 / P (square) for a wave with P samples per
// cycle. Long segments this rough cannot hold a library shape with P >= 6.
constexpr double kNoiseRoughness = 0.8;
constexpr int kMinSamplesPerCycle = 6;

bool noise_like(std::span<const double> ref, std::span<const double> tgt, const Interval& seg) {
  if (seg.length() < kMinSamplesPerCycle * kMaxFrequency) return false;
  std::vector<double> d;
  for (int t = seg.start; t <= seg.end; ++t) {
    d.push_back(tgt[static_cast<std::size_t>(t)] - ref[static_cast<std::size_t>(t)]);
  }
  const double var = stats::variance(d);
  if (var <= 1e-12) return false;
  double msd = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) msd += (d[i] - d[i - 1]) * (d[i] - d[i - 1]);
  msd /= static_cast<double>(d.size() - 1);
  return msd / (2.0 * var) > kNoiseRoughness;
}

double template_value(FuncId f, const ParamVector& theta, const Interval& iv, int t) {
  if (!iv.contains(t)) return 0.0;
  const double freq = theta.contains(Param::Frequency) ? theta.at(Param::Frequency) : 0.0;
  const double phase = theta.contains(Param::Phase) ? theta.at(Param::Phase) : 0.0;
  return theta.at(Param::Amplitude) * unit_shape(f, local_time(iv, t), freq, phase);
}

// Coefficient of `s` in `x` over `window` once both lose their lowest DCT-II
// components, which soak up a smooth baseline. What remains of a library shape is
// mostly its edges, which a smooth baseline cannot imitate.
double smooth_free_coefficient(std::span<const double> x, std::span<const double> s, const Interval& window) {
  const int n = window.length();
  double ss = 0.0;
  for (double v : s) ss += v * v;
  if (ss <= 0.0) return 0.0;
  std::vector<double> rx(static_cast<std::size_t>(n));
  std::vector<double> rs(static_cast<std::size_t>(n));
  std::vector<double> basis(static_cast<std::size_t>(n));
  for (int k = std::max(4, n / 10);; k /= 2) {
    for (int i = 0; i < n; ++i) {
      rx[i] = x[static_cast<std::size_t>(window.start + i)];
      rs[i] = s[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < std::min(k, n); ++j) {
      const double norm = j == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      double px = 0.0;
      double ps = 0.0;
      for (int i = 0; i < n; ++i) {
        basis[i] = norm * std::cos(std::numbers::pi * j * (i + 0.5) / n);
        px += basis[i] * rx[i];
        ps += basis[i] * rs[i];
      }
      for (int i = 0; i < n; ++i) {
        rx[i] -= px * basis[i];
        rs[i] -= ps * basis[i];
      }
    }
    double rr = 0.0;
    double xr = 0.0;
    for (int i = 0; i < n; ++i) {
      rr += rs[i] * rs[i];
      xr += rx[i] * rs[i];
    }
    if (rr >= 0.05 * ss || k <= 1) return rr > 1e-12 * ss ? xr / rr : 0.0;
  }
}

struct DeltaHypothesis {
  FuncId func = FuncId::LinearIncrease;
  ParamVector theta;
  Interval iv;
  double explained = 0.0;
  double residual = 0.0;
};

ParamVector with_amplitude(ParamVector theta, double a) {
  theta.set(Param::Amplitude, a);
  return theta;
}

// Shape fit of tgt - ref: hypothesis [kTgt] puts +delta on the target, [kRef] puts
// -delta on the reference. Empty when no single shape explains the difference.
std::optional<ComponentFit> fit_delta(std::span<const double> ref, std::span<const double> tgt,
                                      const Interval& interval, std::span<const FunctionSpec> candidates,
                                      const ExplainConfig& config) {
  const int length = static_cast<int>(ref.size());
  const int w = config.window;
  const TimeSeries delta = compute_delta(ref, tgt);
  std::array<std::optional<DeltaHypothesis>, 2> hyp;
  std::vector<std::string> notes;
  Geometry geo;
  int margin = std::max(3 * w, interval.length());
  for (int attempt = 0;; ++attempt) {
    geo = geometry(interval, length, w, margin);
    const Side plus = detrend(delta, geo.window, geo.core);
    Side minus = plus;
    for (double& v : minus.y) v = -v;
    hyp = {};
    bool expand = false;
    for (int s : {kRef, kTgt}) {
      const Side& side = s == kTgt ? plus : minus;
      const Side* one[] = {&side};
      std::optional<TemplateFit> best;
      FuncId best_func = FuncId::LinearIncrease;
      for (const auto& spec : candidates) {
        if (!deterministic(spec)) continue;
        auto fit = fit_template(spec, one, interval, w, notes);
        if (fit && (!best || fit->rss < best->rss)) {
          best = std::move(fit);
          best_func = spec.id;
        }
      }
      if (!best || side.tss <= 0.0) continue;
      hyp[s] = DeltaHypothesis{best_func, best->thetas.front(), best->iv, 1.0 - best->rss / side.tss,
                               fit_rms_on_interval(side, best_func, best->thetas.front(), best->iv)};
      if (touches_inner_edge(best->iv, geo.window, length)) expand = true;
    }
    if (!expand || attempt >= kWindowExpansions) break;
    margin *= 2;
  }

  auto good = [&](int s) { return hyp[s] && hyp[s]->explained >= config.delta_explained; };
  if (!good(kRef) && !good(kTgt)) return std::nullopt;
  const int lead = good(kTgt) && (!good(kRef) || hyp[kTgt]->explained >= hyp[kRef]->explained) ? kTgt : kRef;
  const DeltaHypothesis& h = *hyp[lead];

  const Interval window = geo.window;
  std::vector<double> signal(static_cast<std::size_t>(window.length()), 0.0);
  const double sign = lead == kTgt ? 1.0 : -1.0;
  for (int t = h.iv.start; t <= h.iv.end; ++t) {
    signal[static_cast<std::size_t>(t - window.start)] = sign * template_value(h.func, h.theta, h.iv, t);
  }
  // Coefficients of the fitted difference in each series; k_tgt - k_ref is about 1.
  std::array<double, 2> k{smooth_free_coefficient(ref, signal, window),
                          smooth_free_coefficient(tgt, signal, window)};
  int host = std::abs(k[kRef]) <= std::abs(k[kTgt]) ? kTgt : kRef;
  if (!good(host)) host = lead;
  const int other = 1 - host;
  const DeltaHypothesis& hh = *hyp[host];
  const double a_host = hh.theta.at(Param::Amplitude);
  const double spread = std::max(std::abs(k[host] - k[other]), 1e-12);
  const double a_other = a_host * std::abs(k[other]) / spread;

  ComponentFit out;
  out.from_delta = true;
  out.window = window;
  out.notes = std::move(notes);
  for (int s : {kRef, kTgt}) {
    if (hyp[s]) out.sides[s].explained = hyp[s]->explained;
  }
  if (k[host] * k[other] > 0.0 && a_other > config.presence_threshold) {
    JointFit joint{hh.func, hh.iv, {}, hh.residual};
    joint.theta[host] = with_amplitude(hh.theta, a_host + a_other);
    joint.theta[other] = with_amplitude(hh.theta, a_other);
    for (int s : {kRef, kTgt}) out.best[s] = FitResult{hh.func, joint.theta[s], hh.iv, hh.residual};
    out.shared = std::move(joint);
  } else {
    out.best[host] = FitResult{hh.func, hh.theta, hh.iv, hh.residual};
  }
  return out;
}

void check_pair(std::span<const double> ref, std::span<const double> tgt, const Interval& iv) {
  if (ref.size() != tgt.size()) throw DataError("reference and target lengths differ");
  if (!iv.valid_for(static_cast<int>(ref.size()))) throw PreconditionError("interval outside the series");
}

}  // namespace

TimeSeries compute_delta(std::span<const double> ref, std::span<const double> tgt) {
  if (ref.size() != tgt.size()) {
    throw DataError("reference length " + std::to_string(ref.size()) + " != target length " +
                    std::to_string(tgt.size()));
  }
  TimeSeries out(ref.size());
  for (std::size_t t = 0; t < ref.size(); ++t) out[t] = tgt[t] - ref[t];
  return out;
}

std::vector<Interval> segment_delta(std::span<const double> delta, double tol, int window, int gap_merge,
                                    double spike_factor) {
  if (!(tol > 0.0)) throw PreconditionError("tol must be > 0");
  const int n = static_cast<int>(delta.size());
  const int half = std::max(0, window / 2);
  std::vector<double> prefix(delta.size() + 1, 0.0);
  for (int t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + delta[t] * delta[t];
  auto windowed_rms = [&](int t) {
    const int lo = std::max(0, t - half);
    const int hi = std::min(n - 1, t + half);
    return std::sqrt((prefix[hi + 1] - prefix[lo]) / (hi - lo + 1));
  };

  // Runs above tol, trimmed to the outermost samples that individually exceed it.
  std::vector<Interval> runs;
  for (int t = 0; t < n;) {
    if (windowed_rms(t) <= tol) {
      ++t;
      continue;
    }
    int end = t;
    while (end + 1 < n && windowed_rms(end + 1) > tol) ++end;
    int lo = t;
    int hi = end;
    while (lo <= hi && std::abs(delta[lo]) <= tol) ++lo;
    while (hi >= lo && std::abs(delta[hi]) <= tol) --hi;
    if (lo <= hi) runs.push_back({lo, hi});
    t = end + 1;
  }
  // Isolated samples the windowed RMS missed.
  for (int t = 0; t < n; ++t) {
    if (std::abs(delta[t]) > spike_factor * tol &&
        std::none_of(runs.begin(), runs.end(), [t](const Interval& r) { return r.contains(t); })) {
      runs.push_back({t, t});
    }
  }
  std::sort(runs.begin(), runs.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });

  auto is_spike = [&](const Interval& r) {
    return r.length() == 1 && std::abs(delta[static_cast<std::size_t>(r.start)]) > spike_factor * tol;
  };
  std::vector<Interval> out;
  for (const auto& r : runs) {
    if (!out.empty() && r.start - out.back().end - 1 < gap_merge && !is_spike(r) && !is_spike(out.back())) {
      out.back().end = std::max(out.back().end, r.end);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

ComponentFit fit_component(std::span<const double> ref, std::span<const double> tgt, const Interval& interval,
                           std::span<const FunctionSpec> candidates, const ExplainConfig& config) {
  check_pair(ref, tgt, interval);
  const int length = static_cast<int>(ref.size());
  const int w = config.window;
  bool any_deterministic = std::any_of(candidates.begin(), candidates.end(), deterministic);
  if (any_deterministic && noise_like(ref, tgt, interval)) any_deterministic = false;
  std::vector<FuncId> fluctuations;
  for (const auto& c : candidates) {
    if (!deterministic(c)) fluctuations.push_back(c.id);
  }

  if (any_deterministic) {
    if (auto from_delta = fit_delta(ref, tgt, interval, candidates, config)) return std::move(*from_delta);
  }

  ComponentFit out;
  int margin = std::max(3 * w, interval.length());
  for (int attempt = 0;; ++attempt) {
    const auto geo = geometry(interval, length, w, margin);
    out = ComponentFit{};
    out.window = geo.window;
    std::array<Side, 2> sides{detrend(ref, geo.window, geo.core), detrend(tgt, geo.window, geo.core)};
    bool expand = false;
    for (int s : {kRef, kTgt}) {
      auto& ev = out.sides[s];
      ev.absent_residual = std::sqrt(sides[s].tss / sides[s].size());
      ev.noise_level = noise_level(sides[s], interval, geo.core);
      if (!any_deterministic) continue;
      const Side* one[] = {&sides[s]};
      std::optional<TemplateFit> best;
      FuncId best_func = FuncId::LinearIncrease;
      for (const auto& spec : candidates) {
        if (!deterministic(spec)) continue;
        auto fit = fit_template(spec, one, interval, w, out.notes);
        if (fit && (!best || fit->rss < best->rss)) {
          best = std::move(fit);
          best_func = spec.id;
        }
      }
      if (!best) continue;
      ev.best = FitResult{best_func, best->thetas.front(), best->iv,
                          fit_rms_on_interval(sides[s], best_func, best->thetas.front(), best->iv)};
      ev.explained = sides[s].tss > 0.0 ? 1.0 - best->rss / sides[s].tss : 0.0;
      if (ev.best->theta.at(Param::Amplitude) > config.presence_threshold &&
          touches_inner_edge(best->iv, geo.window, length)) {
        expand = true;
      }
    }
    if (!expand || attempt >= kWindowExpansions) break;
    margin *= 2;
  }

  std::vector<double> delta_seg;
  for (int t = interval.start; t <= interval.end; ++t) {
    delta_seg.push_back(tgt[static_cast<std::size_t>(t)] - ref[static_cast<std::size_t>(t)]);
  }
  out.delta_kurtosis = stats::excess_kurtosis(delta_seg);

  bool any_present = false;
  for (int s : {kRef, kTgt}) {
    const auto& ev = out.sides[s];
    if (ev.best && ev.best->theta.at(Param::Amplitude) > config.presence_threshold &&
        ev.explained >= config.min_explained) {
      out.best[s] = ev.best;
      any_present = true;
    }
  }
  if (any_present || fluctuations.empty()) return out;

  FuncId family = fluctuations.front();
  if (fluctuations.size() > 1) {
    family = out.delta_kurtosis > config.kurtosis_split ? FuncId::LaplaceNoise : FuncId::GaussianNoise;
  }
  for (int s : {kRef, kTgt}) {
    const auto& ev = out.sides[s];
    if (ev.noise_level <= config.presence_threshold) continue;
    out.fluctuation = true;
    const double total = ev.absent_residual;
    out.best[s] = FitResult{family, amplitude_only(ev.noise_level), interval,
                            std::sqrt(std::max(0.0, total * total - ev.noise_level * ev.noise_level))};
  }
  return out;
}

std::optional<JointFit> fit_joint(std::span<const double> ref, std::span<const double> tgt, const Interval& interval,
                                  std::span<const FunctionSpec> candidates, const ExplainConfig& config) {
  check_pair(ref, tgt, interval);
  const int length = static_cast<int>(ref.size());
  const int w = config.window;
  int margin = std::max(3 * w, interval.length());
  std::optional<JointFit> best;
  for (int attempt = 0;; ++attempt) {
    const auto geo = geometry(interval, length, w, margin);
    const Side r = detrend(ref, geo.window, geo.core);
    const Side t = detrend(tgt, geo.window, geo.core);
    const Side* both[] = {&r, &t};
    std::vector<std::string> notes;
    best.reset();
    for (const auto& spec : candidates) {
      if (!deterministic(spec)) continue;
      auto fit = fit_template(spec, both, interval, w, notes);
      if (fit && (!best || fit->rss < best->residual)) {
        best = JointFit{spec.id, fit->iv, {fit->thetas[0], fit->thetas[1]}, fit->rss};
      }
    }
    if (!best || !touches_inner_edge(best->interval, geo.window, length) || attempt >= kWindowExpansions) break;
    margin *= 2;
  }
  if (best) best->residual = std::sqrt(best->residual / (2.0 * best->interval.length()));
  return best;
}

ExplanationList explain_lsq(std::span<const double> ref, std::span<const double> tgt, const ExplainConfig& config,
                            const Catalog& catalog) {
  if (ref.size() != tgt.size()) throw DataError("reference and target lengths differ");
  const int length = static_cast<int>(ref.size());
  // Duration bounds follow the series actually being explained.
  const Catalog local = length == catalog.length() ? catalog : Catalog(length, catalog.ranges());
  std::vector<FunctionSpec> deterministic_specs;
  for (const auto& s : local.specs()) {
    if (deterministic(s)) deterministic_specs.push_back(s);
  }

  std::array<TimeSeries, 2> work{TimeSeries(ref.begin(), ref.end()), TimeSeries(tgt.begin(), tgt.end())};
  std::vector<Interval> exhausted;
  ExplanationList out;

  auto overlaps_exhausted = [&](const Interval& seg) {
    return std::any_of(exhausted.begin(), exhausted.end(), [&](const Interval& e) {
      const int inter = std::min(seg.end, e.end) - std::max(seg.start, e.start) + 1;
      return inter * 2 > seg.length();
    });
  };

  for (int iteration = 0; iteration < config.max_components; ++iteration) {
    const TimeSeries delta = compute_delta(work[kRef], work[kTgt]);
    std::optional<Interval> seg;
    double seg_energy = 0.0;
    for (const auto& cand : segment_delta(delta, config.tol, config.window, config.gap_merge, config.spike_factor)) {
      if (overlaps_exhausted(cand)) continue;
      double peak = 0.0;
      for (int t = cand.start; t <= cand.end; ++t) peak = std::max(peak, std::abs(delta[static_cast<std::size_t>(t)]));
      if (peak < config.presence_threshold) continue;
      const double e = delta_energy(delta, cand);
      if (!seg || e > seg_energy) {
        seg = cand;
        seg_energy = e;
      }
    }
    if (!seg) break;

    const ComponentFit fit = fit_component(work[kRef], work[kTgt], *seg, local.specs(), config);
    const bool on_ref = fit.best[kRef].has_value();
    const bool on_tgt = fit.best[kTgt].has_value();
    if (!on_ref && !on_tgt) {
      exhausted.push_back(*seg);
      continue;
    }

    DifferenceRecord rec;
    if (fit.fluctuation) {
      const FitResult& any = on_tgt ? *fit.best[kTgt] : *fit.best[kRef];
      rec.func = any.func;
      rec.start = seg->start;
      rec.end = seg->end;
      if (on_ref && on_tgt) {
        rec.type = DiffType::Type2;
        rec.param = Param::Amplitude;
        rec.magnitude = fit.sides[kTgt].noise_level > fit.sides[kRef].noise_level ? Magnitude::Larger
                                                                                  : Magnitude::Smaller;
      } else {
        rec.type = DiffType::Type1;
        rec.presence = on_tgt ? Presence::Present : Presence::Absent;
      }
      // The realization cannot be separated from the baseline; cancel the difference instead.
      const int side = on_tgt ? kTgt : kRef;
      const int other = 1 - side;
      for (int t = seg->start; t <= seg->end; ++t) {
        work[side][static_cast<std::size_t>(t)] = work[other][static_cast<std::size_t>(t)];
      }
    } else if (on_ref != on_tgt) {
      const int side = on_tgt ? kTgt : kRef;
      const FitResult& f = *fit.best[side];
      rec.type = DiffType::Type1;
      rec.func = f.func;
      rec.start = f.interval.start;
      rec.end = f.interval.end;
      rec.presence = on_tgt ? Presence::Present : Presence::Absent;
      const auto g = evaluate(local.spec(f.func), f.theta, f.interval, length);
      for (int t = f.interval.start; t <= f.interval.end; ++t) work[side][static_cast<std::size_t>(t)] -= g[t];
    } else {
      const auto joint = fit.shared ? fit.shared : fit_joint(work[kRef], work[kTgt], *seg, deterministic_specs, config);
      if (!joint) {
        exhausted.push_back(*seg);
        continue;
      }
      const FunctionSpec& spec = local.spec(joint->func);
      rec.type = DiffType::Type2;
      rec.func = joint->func;
      rec.start = joint->interval.start;
      rec.end = joint->interval.end;
      double widest = -1.0;
      for (Param p : spec.modifiable()) {
        const double a = std::abs(joint->theta[kRef].at(p));
        const double b = std::abs(joint->theta[kTgt].at(p));
        const double rel = std::max(a, b) > 0.0 ? std::abs(a - b) / std::max(a, b) : 0.0;
        if (rel > widest) {
          widest = rel;
          rec.param = p;
          rec.magnitude = b > a ? Magnitude::Larger : Magnitude::Smaller;
        }
      }
      for (int s : {kRef, kTgt}) {
        const auto g = evaluate(spec, joint->theta[s], joint->interval, length);
        for (int t = joint->interval.start; t <= joint->interval.end; ++t) work[s][static_cast<std::size_t>(t)] -= g[t];
      }
    }

    const TimeSeries after = compute_delta(work[kRef], work[kTgt]);
    if (delta_energy(after, *seg) > 0.5 * seg_energy) exhausted.push_back(*seg);
    if (validate(rec, length).empty()) out.push_back(rec);
  }
  sort_records(out);
  return out;
}

// ---------------------------------------------------------------------------
// Retrieval baseline
// ---------------------------------------------------------------------------

namespace {

constexpr int kSpectralBins = 2 * kFeatureBands;

struct Twiddles {
  std::vector<double> cos_table;
  std::vector<double> sin_table;
};

const Twiddles& twiddles(std::size_t n) {
  thread_local std::map<std::size_t, Twiddles> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Twiddles tw;
  tw.cos_table.resize(n);
  tw.sin_table.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tw.cos_table[i] = std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    tw.sin_table[i] = std::sin(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
  return cache.emplace(n, std::move(tw)).first->second;
}

}  // namespace

std::uint64_t feature_version() {
  return fnv1a64("tsdiff.features/v1;windows=16:mean,std,slope,roughness;bands=16x2;high;global7;jump2;dim=" +
                 std::to_string(kFeatureDim));
}

std::vector<double> feature_embed(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(kFeatureDim);
  const std::size_t n = x.size();
  if (n == 0) return std::vector<double>(kFeatureDim, 0.0);

  for (int w = 0; w < kFeatureWindows; ++w) {
    std::size_t lo = w * n / kFeatureWindows;
    std::size_t hi = (w + 1) * n / kFeatureWindows;
    if (hi <= lo) {
      lo = std::min(lo, n - 1);
      hi = lo + 1;
    }
    const auto chunk = x.subspan(lo, hi - lo);
    const double m = stats::mean(chunk);
    double stt = 0.0;
    double stx = 0.0;
    const double tc = 0.5 * static_cast<double>(chunk.size() - 1);
    double rough = 0.0;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const double d = static_cast<double>(i) - tc;
      stt += d * d;
      stx += d * (chunk[i] - m);
      if (i > 0) rough += (chunk[i] - chunk[i - 1]) * (chunk[i] - chunk[i - 1]);
    }
    const double slope = stt > 0.0 ? stx / stt : 0.0;
    out.push_back(m);
    out.push_back(stats::stddev(chunk));
    out.push_back(slope * static_cast<double>(chunk.size() - 1));
    out.push_back(chunk.size() > 1 ? std::sqrt(rough / static_cast<double>(chunk.size() - 1)) : 0.0);
  }

  const auto& tw = twiddles(n);
  double low_energy = 0.0;
  std::array<double, kFeatureBands> bands{};
  double dc_re = 0.0;
  for (double v : x) dc_re += v;
  for (int k = 1; k <= kSpectralBins; ++k) {
    double re = 0.0;
    double im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += x[t] * tw.cos_table[idx];
      im -= x[t] * tw.sin_table[idx];
      idx += static_cast<std::size_t>(k);
      if (idx >= n) idx %= n;
    }
    const double p = re * re + im * im;
    bands[static_cast<std::size_t>((k - 1) / 2)] += p;
    if (static_cast<std::size_t>(2 * k) < n) low_energy += 2.0 * p;
  }
  for (double b : bands) out.push_back(std::sqrt(b) / static_cast<double>(n));
  double total = 0.0;
  for (double v : x) total += v * v;
  const double high = std::max(0.0, static_cast<double>(n) * total - dc_re * dc_re - low_energy);
  out.push_back(std::sqrt(high) / static_cast<double>(n));

  // First occurrence on ties, so a flat series reports position 0.
  const auto mn = std::min_element(x.begin(), x.end());
  const auto mx = std::max_element(x.begin(), x.end());
  out.push_back(stats::mean(x));
  out.push_back(stats::stddev(x));
  out.push_back(stats::excess_kurtosis(x));
  out.push_back(*mn);
  out.push_back(*mx);
  out.push_back(static_cast<double>(mn - x.begin()) / static_cast<double>(n));
  out.push_back(static_cast<double>(mx - x.begin()) / static_cast<double>(n));

  double jump = 0.0;
  std::size_t jump_at = 0;
  for (std::size_t t = 1; t < n; ++t) {
    const double d = std::abs(x[t] - x[t - 1]);
    if (d > jump) {
      jump = d;
      jump_at = t;
    }
  }
  out.push_back(jump);
  out.push_back(static_cast<double>(jump_at) / static_cast<double>(n));
  return out;
}

std::vector<double> difference_embedding(std::span<const double> ref, std::span<const double> tgt) {
  if (ref.size() != tgt.size()) throw DataError("reference and target lengths differ");
  auto a = feature_embed(ref);
  const auto b = feature_embed(tgt);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = b[i] - a[i];
  return a;
}

void RetrievalPool::add(std::vector<double> features, ExplanationList explanation) {
  if (features.size() != static_cast<std::size_t>(kFeatureDim)) {
    throw PreconditionError("feature vector has dimension " + std::to_string(features.size()) + ", expected " +
                            std::to_string(kFeatureDim));
  }
  for (std::size_t i = 0; i < features.size(); ++i) sum_squares_[i] += features[i] * features[i];
  entries_.push_back(Entry{std::move(features), std::move(explanation)});
}

std::vector<double> RetrievalPool::scale() const {
  std::vector<double> s(kFeatureDim, 1.0);
  if (entries_.empty()) return s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = std::sqrt(sum_squares_[i] / static_cast<double>(entries_.size()));
    s[i] = r > 1e-12 ? r : 1.0;
  }
  return s;
}

namespace {

double scaled_cosine(std::span<const double> q, std::span<const double> e, std::span<const double> inv_scale) {
  double dot = 0.0;
  double qq = 0.0;
  double ee = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = q[i] * inv_scale[i];
    const double b = e[i] * inv_scale[i];
    dot += a * b;
    qq += a * a;
    ee += b * b;
  }
  if (qq <= 0.0 || ee <= 0.0) return 0.0;
  return dot / std::sqrt(qq * ee);
}

std::vector<double> inverse(std::vector<double> s) {
  for (double& v : s) v = 1.0 / v;
  return s;
}

}  // namespace

double RetrievalPool::similarity(std::span<const double> query, std::size_t i) const {
  if (query.size() != static_cast<std::size_t>(kFeatureDim)) throw PreconditionError("query has wrong dimension");
  const auto inv = inverse(scale());
  return scaled_cosine(query, entries_.at(i).features, inv);
}

std::size_t RetrievalPool::nearest(std::span<const double> query) const {
  if (entries_.empty()) throw PreconditionError("retrieval pool is empty");
  if (query.size() != static_cast<std::size_t>(kFeatureDim)) throw PreconditionError("query has wrong dimension");
  const auto inv = inverse(scale());
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double s = scaled_cosine(query, entries_[i].features, inv);
    if (s > best_sim) {
      best_sim = s;
      best = i;
    }
  }
  return best;
}

namespace {

constexpr char kPoolMagic[8] = {'T', 'S', 'D', 'P', 'O', 'O', 'L', '\0'};
constexpr std::uint32_t kPoolFormat = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw DataError("truncated pool file " + path.string());
  return v;
}

}  // namespace

void RetrievalPool::save(const std::filesystem::path& path) const {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write pool file " + tmp.string());
    out.write(kPoolMagic, sizeof kPoolMagic);
    put(out, kPoolFormat);
    put(out, static_cast<std::uint32_t>(kFeatureDim));
    put(out, feature_version());
    put(out, static_cast<std::uint64_t>(entries_.size()));
    for (const auto& e : entries_) {
      out.write(reinterpret_cast<const char*>(e.features.data()),
                static_cast<std::streamsize>(e.features.size() * sizeof(double)));
      const std::string text = serialize(e.explanation);
      put(out, static_cast<std::uint32_t>(text.size()));
      out.write(text.data(), static_cast<std::streamsize>(text.size()));
    }
    if (!out) throw IoError("failed writing pool file " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move pool file into place: " + path.string());
}

RetrievalPool RetrievalPool::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read pool file " + path.string());
  char magic[sizeof kPoolMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kPoolMagic, sizeof magic) != 0) {
    throw DataError(path.string() + " is not a retrieval pool file");
  }
  if (get<std::uint32_t>(in, path) != kPoolFormat) throw DataError("unsupported pool format in " + path.string());
  const auto dim = get<std::uint32_t>(in, path);
  const auto version = get<std::uint64_t>(in, path);
  if (dim != static_cast<std::uint32_t>(kFeatureDim) || version != feature_version()) {
    throw DataError("pool " + path.string() + " was built with a different feature extractor (dim " +
                    std::to_string(dim) + ", version " + hex64(version) + "; expected dim " +
                    std::to_string(kFeatureDim) + ", version " + hex64(feature_version()) + ")");
  }
  const auto count = get<std::uint64_t>(in, path);
  RetrievalPool pool;
  for (std::uint64_t i = 0; i < count; ++i) {
    std::vector<double> features(dim);
    if (!in.read(reinterpret_cast<char*>(features.data()), static_cast<std::streamsize>(dim * sizeof(double)))) {
      throw DataError("truncated pool file " + path.string());
    }
    const auto len = get<std::uint32_t>(in, path);
    std::string text(len, '\0');
    if (!in.read(text.data(), len)) throw DataError("truncated pool file " + path.string());
    pool.add(std::move(features), parse(text));
  }
  return pool;
}

RetrievalPool RetrievalPool::build(const PairGenerator& generator, std::size_t n, std::uint64_t first,
                                   unsigned threads) {
  std::vector<Entry> entries(n);
  auto work = [&](std::size_t lo, std::size_t step) {
    for (std::size_t i = lo; i < n; i += step) {
      PairSample s = generator.sample(first + i);
      entries[i] = Entry{difference_embedding(s.reference, s.target), std::move(s.ground_truth)};
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  }
  RetrievalPool out;
  for (auto& e : entries) out.add(std::move(e.features), std::move(e.explanation));
  return out;
}

ExplanationList explain_retrieval(std::span<const double> ref, std::span<const double> tgt,
                                  const RetrievalPool& pool) {
  const auto query = difference_embedding(ref, tgt);
  return pool.entry(pool.nearest(query)).explanation;
}

ExplanationList explain_oracle(const PairSample& sample) { return sample.ground_truth; }

}  // namespace tsdiff
