// Prints one PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "generators.hpp"
#include "tsdiff/dataset_io.hpp"
#include "tsdiff/evaluator.hpp"
#include "tsdiff/explain.hpp"

namespace fs = std::filesystem;
using namespace tsdiff;

namespace {

// Tolerances and budgets.
constexpr double kReconstructionTol = 1e-9;
constexpr double kReconstructionBudgetSec = 30.0;
constexpr double kIouTol = 1e-9;
constexpr double kRateTol = 0.01;
constexpr int kRoundTrips = 10000;
constexpr double kLsqGate = 0.90;
constexpr double kNoiseGate = 0.95;
constexpr double kRetrievalAlpha = 0.01;
constexpr double kGatesBudgetSec = 300.0;
constexpr int kGateTrials = 300;
constexpr std::size_t kPoolSize = 50000;
constexpr int kQueries = 500;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("tsdiff_accept_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string operator/(const std::string& n) const { return (path_ / n).string(); }

 private:
  fs::path path_;
};

int cli_run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "tsdiff %s failed: %s", args[0].c_str(), err.str().c_str());
  return code;
}

ExplanationList fixture(const std::string& name) {
  return parse(read_file(fs::path(TSDIFF_FIXTURES) / name), ParseMode::Lenient);
}

// Predicted func agrees with the single ground-truth record under the evaluator's alignment.
bool func_recovered(const ExplanationList& pred, const DifferenceRecord& gt) {
  const ExplanationList g{gt};
  const Alignment a = align(pred, g);
  return !a.matches.empty() && pred[a.matches[0].first].func == gt.func;
}

// P(X >= k) for X ~ Binomial(n, p).
double binomial_upper_tail(int n, int k, double p) {
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                            i * std::log(p) + (n - i) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return total;
}

Outcome reconstruction() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int pairs = 0;
  for (int kmax = 1; kmax <= 4; ++kmax) {
    GenConfig c;
    c.k_max = kmax;
    c.seed = 100 + kmax;
    const PairGenerator gen(c);
    for (std::uint64_t i = 0; i < 250; ++i, ++pairs) {
      const PairSample s = gen.sample(i);
      TimeSeries sum(s.reference.size(), 0.0);
      for (const auto& d : s.internal) {
        const auto g = d.signed_component(gen.catalog());
        for (std::size_t t = 0; t < sum.size(); ++t) sum[t] += g[t];
      }
      for (std::size_t t = 0; t < sum.size(); ++t) {
        worst = std::max(worst, std::abs((s.target[t] - s.reference[t]) - sum[t]));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {pairs == 1000 && worst < kReconstructionTol && secs < kReconstructionBudgetSec,
          fmt("%d pairs, max error %.3g (< %g), %.2fs (< %gs)", pairs, worst, kReconstructionTol, secs,
              kReconstructionBudgetSec)};
}

Outcome oracle_fixed_point() {
  TempDir dir;
  std::string detail;
  bool pass = true;
  for (const char* kmax : {"1", "4"}) {
    const std::string data = dir / (std::string("k") + kmax);
    const std::string pred = data + ".pred.jsonl";
    const std::string report = data + ".report";
    if (cli_run({"generate", "--n", "1000", "--kmax", kmax, "--seed", "77", "--out", data}) != 0 ||
        cli_run({"explain", "--method", "oracle", "--in", data, "--out", pred}) != 0 ||
        cli_run({"evaluate", "--pred", pred, "--gt", data, "--out", report}) != 0) {
      return {false, "pipeline failed"};
    }
    const auto j = nlohmann::json::parse(read_file(fs::path(report) / "report.json"));
    bool ok = j.at("mean_iou") == 100.0 && j.at("match_acc_overall") == 100.0 && j.at("opr") == 0.0 &&
              j.at("upr") == 0.0 && j.at("counts").at("samples") == 1000;
    for (const auto& [name, value] : j.at("field_acc").items()) {
      ok = ok && value == 100.0;
    }
    ok = ok && j.at("field_acc").size() == kFields.size();
    pass = pass && ok;
    detail += fmt("kmax=%s %s; ", kmax, ok ? "all 100/0" : "MISMATCH");
  }
  return {pass, detail + "1000 samples each"};
}

Outcome worked_examples() {
  const auto gt1 = fixture("worked_example_row1_ground_truth.json");
  const auto gen1 = fixture("worked_example_row1_generated.json");
  const auto gt2 = fixture("worked_example_row2_ground_truth.json");
  const auto gen2 = fixture("worked_example_row2_generated.json");
  const double iou1 = interval_iou(gen1[0].interval(), gt1[0].interval());
  bool fields1 = true;
  for (Field f : kFields) {
    if (field_eligible(f, gt1[0])) fields1 = fields1 && field_correct(f, gen1[0], gt1[0]);
  }
  const bool hit1 = match_accuracy(align(gen1, gt1), gen1, gt1).overall == 100.0;
  const double iou2a = interval_iou(gen2[0].interval(), gt2[0].interval());
  const double iou2b = interval_iou(gen2[1].interval(), gt2[1].interval());
  const Alignment a2 = align(gen2, gt2);
  const bool hit2b = a2.matches.size() == 2 && is_hit(gen2[1], gt2[1]);
  const bool pass = std::abs(iou1 - 190.0 / 201.0) <= kIouTol && fields1 && hit1 &&
                    std::abs(iou2a - 200.0 / 205.0) <= kIouTol && iou2b == 1.0 && hit2b;
  return {pass, fmt("row1 IoU %.10f fields %s hit %s; row2 IoU %.10f, DROP IoU %.1f hit %s", iou1,
                    fields1 ? "ok" : "wrong", hit1 ? "yes" : "no", iou2a, iou2b, hit2b ? "yes" : "no")};
}

Outcome metric_fixtures() {
  const fs::path dir(TSDIFF_FIXTURES);
  const EvalReport r = evaluate_dataset(read_lists(dir / "opr_upr_predictions.jsonl"),
                                        read_lists(dir / "opr_upr_ground_truth.jsonl"));
  const EvalReport f = evaluate_dataset(read_lists(dir / "func_accuracy_predictions.jsonl"),
                                        read_lists(dir / "func_accuracy_ground_truth.jsonl"));
  const auto func = f.field(Field::Func);
  const bool pass = std::abs(r.opr - 8.33) <= kRateTol && std::abs(r.upr - 16.67) <= kRateTol && func && *func == 75.0;
  return {pass, fmt("OPR %.4f UPR %.4f func %.1f", r.opr, r.upr, func ? *func : -1.0)};
}

Outcome schema_properties() {
  Rng rng(2718);
  int round_trips = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const DifferenceRecord rec = testing::random_record(rng);
    const std::string text = serialize(ExplanationList{rec});
    const ExplanationList back = parse(text);
    if (back.size() == 1 && back[0] == rec && serialize(back) == text) ++round_trips;
  }
  const DifferenceRecord t1{DiffType::Type1, FuncId::Drop, 268, 268, Presence::Present, std::nullopt, std::nullopt};
  const DifferenceRecord t2{DiffType::Type2, FuncId::TriangleWave, 36, 237, std::nullopt, Param::Frequency,
                            Magnitude::Larger};
  int rejected = 0;
  const auto mutations = testing::nullability_mutations();
  for (const auto& m : mutations) {
    const std::string text = "[" + testing::raw_record_json(m.apply(m.needs_type1 ? t1 : t2)) + "]";
    try {
      parse(text);
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  bool unknown_rejected = false;
  try {
    std::string text = serialize(ExplanationList{t1});
    text.insert(text.size() - 2, ", \"note\": \"x\"");
    parse(text);
  } catch (const ParseError&) {
    unknown_rejected = true;
  }
  const bool pass = round_trips == kRoundTrips && rejected == static_cast<int>(mutations.size()) && unknown_rejected;
  return {pass, fmt("%d/%d round trips, %d/%zu mutations rejected, unknown key %s", round_trips, kRoundTrips, rejected,
                    mutations.size(), unknown_rejected ? "rejected" : "ACCEPTED")};
}

Outcome determinism() {
  TempDir dir;
  const std::vector<std::string> base{"generate", "--n", "1000", "--kmax", "4", "--seed", "31337"};
  auto run = [&](const std::string& out, const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--out", dir / out, "--threads", threads});
    return cli_run(args) == 0 ? read_file(fs::path(dir / out) / kManifestName) : std::string("<failed>");
  };
  const std::string a = run("a", "1");
  const std::string b = run("b", "1");
  const std::string c = run("c", "4");
  const bool rerun = a == b && a != "<failed>";
  const bool parallel = a == c;
  return {rerun && parallel, fmt("rerun %s, serial vs 4 threads %s (%zu bytes)", rerun ? "identical" : "DIFFERENT",
                                 parallel ? "identical" : "DIFFERENT", a.size())};
}

Outcome baseline_gates() {
  const auto t0 = Clock::now();

  // Noiseless single differences on a zero baseline, amplitude at the range midpoint.
  LibraryRanges mid;
  mid.amplitude = {mid.amplitude.mid(), mid.amplitude.mid()};
  const Catalog clean(kDefaultLength, mid);
  Rng rng(4242);
  int lsq_hits = 0;
  for (int n = 0; n < kGateTrials;) {
    const ElementaryDifference d = sample_difference(clean, rng);
    if (category_of(d.func) == Category::Fluctuation) continue;
    ++n;
    const auto& spec = clean.spec(d.func);
    TimeSeries ref(kDefaultLength, 0.0);
    TimeSeries tgt(kDefaultLength, 0.0);
    if (d.active_ref) ref = evaluate(spec, d.theta_ref, d.interval, kDefaultLength);
    if (d.active_tgt) tgt = evaluate(spec, d.theta_tgt, d.interval, kDefaultLength);
    if (func_recovered(explain_lsq(ref, tgt, {}, clean), to_record(d))) ++lsq_hits;
  }
  const double lsq_acc = static_cast<double>(lsq_hits) / kGateTrials;

  const int length = 2400;
  const Interval segment{200, 2199};
  const Catalog wide(length);
  int noise_hits = 0;
  for (int i = 0; i < kGateTrials; ++i) {
    const FuncId f = i % 2 ? FuncId::LaplaceNoise : FuncId::GaussianNoise;
    ParamVector theta;
    theta.set(Param::Amplitude, rng.uniform(0.5, 3.0));
    const TimeSeries ref(length, 0.0);
    const TimeSeries tgt = evaluate(wide.spec(f), theta, segment, length, rng.next());
    const ExplanationList pred = explain_lsq(ref, tgt, {}, wide);
    if (pred.size() == 1 && pred[0].func == f) ++noise_hits;
  }
  const double noise_acc = static_cast<double>(noise_hits) / kGateTrials;

  GenConfig pool_config;
  pool_config.seed = 1000;
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const RetrievalPool pool = RetrievalPool::build(PairGenerator(pool_config), kPoolSize, 0, threads);
  GenConfig query_config;
  query_config.seed = 2024;
  const PairGenerator queries(query_config);
  int retrieval_hits = 0;
  for (int i = 0; i < kQueries; ++i) {
    const PairSample s = queries.sample(static_cast<std::uint64_t>(i));
    if (func_recovered(explain_retrieval(s.reference, s.target, pool), s.ground_truth[0])) ++retrieval_hits;
  }
  const double p_value = binomial_upper_tail(kQueries, retrieval_hits, 1.0 / kNumFunctions);

  const double secs = seconds_since(t0);
  const bool pass = lsq_acc >= kLsqGate && noise_acc >= kNoiseGate && p_value < kRetrievalAlpha && secs < kGatesBudgetSec;
  return {pass, fmt("lsq func %.1f%% (>= %.0f%%), noise %.1f%% (>= %.0f%%), retrieval %d/%d p=%.2g (< %g), %.1fs (< %gs)",
                    100 * lsq_acc, 100 * kLsqGate, 100 * noise_acc, 100 * kNoiseGate, retrieval_hits, kQueries, p_value,
                    kRetrievalAlpha, secs, kGatesBudgetSec)};
}

Outcome monte_carlo() {
  Rng rng(8080);
  const int n = 10000;
  std::map<Category, int> by_category;
  int type1 = 0;
  int type2 = 0;
  int larger = 0;
  for (int i = 0; i < n; ++i) {
    const ElementaryDifference d = sample_difference(default_catalog(), rng);
    ++by_category[category_of(d.func)];
    if (d.diff_type == DiffType::Type1) {
      ++type1;
    } else {
      ++type2;
      if (to_record(d).magnitude == Magnitude::Larger) ++larger;
    }
  }
  double worst_category = 0.0;
  for (Category c : kCategories) worst_category = std::max(worst_category, std::abs(by_category[c] / double(n) - 0.25));
  const double type_split = type1 / double(n);
  const double larger_split = larger / double(type2);
  const bool pass = worst_category <= 0.02 && std::abs(type_split - 0.5) <= 0.02 && std::abs(larger_split - 0.5) <= 0.03;
  return {pass, fmt("max |category - 0.25| %.4f, TYPE1 share %.4f, LARGER share %.4f", worst_category, type_split,
                    larger_split)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"reconstruction", reconstruction},
      {"oracle_fixed_point", oracle_fixed_point},
      {"worked_examples", worked_examples},
      {"metric_fixtures", metric_fixtures},
      {"schema_properties", schema_properties},
      {"determinism", determinism},
      {"baseline_gates", baseline_gates},
      {"monte_carlo_protocol", monte_carlo},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
