#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <thread>

#include "tsdiff/config.hpp"
#include "tsdiff/dataset_io.hpp"
#include "tsdiff/errors.hpp"
#include "tsdiff/evaluator.hpp"
#include "tsdiff/explain.hpp"
#include "tsdiff/pairgen.hpp"
#include "tsdiff/schema.hpp"
#include "tsdiff/version.hpp"

namespace fs = std::filesystem;

namespace tsdiff::cli {
namespace {

// Bad flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string joined(const std::vector<std::string>& args) {
  std::string s = "tsdiff";
  for (const auto& a : args) s += " " + a;
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

// Runs fn(i) for i in [0, n) on `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += threads) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct GenerateFlags {
  std::size_t n = 1000;
  int kmin = 1;
  int kmax = 1;
  int length = kDefaultLength;
  std::optional<std::uint64_t> seed;
  std::string source;
  std::string config;
  std::string out;
  bool csv = false;
  bool plot = false;
  unsigned threads = 1;
};

// Config file first, then any flag given explicitly on the command line.
GenConfig resolve_config(const GenerateFlags& f, const CLI::App& cmd) {
  GenConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  if (cmd.count("--kmin")) c.k_min = f.kmin;
  if (cmd.count("--kmax")) c.k_max = f.kmax;
  if (cmd.count("--length")) c.length = f.length;
  if (cmd.count("--source")) c.source = BaselineSource::parse(f.source);
  if (!f.seed) throw UsageError("--seed is required");
  c.seed = *f.seed;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return c;
}

void add_generation_flags(CLI::App* cmd, GenerateFlags& f) {
  cmd->add_option("--kmin", f.kmin, "Minimum number of differences per pair");
  cmd->add_option("--kmax", f.kmax, "Maximum number of differences per pair");
  cmd->add_option("--length", f.length, "Series length T");
  cmd->add_option("--seed", f.seed, "Root seed (required)");
  cmd->add_option("--source", f.source, "random_walk | ar1 | sine_mix | piecewise | corpus:PATH");
  cmd->add_option("--config", f.config, "JSON config file");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::Range(1u, 256u));
}

int cmd_generate(const GenerateFlags& f, const CLI::App& cmd, const std::vector<std::string>& args,
                 std::ostream& out) {
  const auto t0 = Clock::now();
  const GenConfig config = resolve_config(f, cmd);
  const PairGenerator generator(config);
  const fs::path dir = f.out;
  ensure_dir(dir);
  if (f.csv) ensure_dir(dir / "series");
  if (f.plot) ensure_dir(dir / "plots");

  // Chunked so memory stays bounded for large n; lines stay in index order.
  constexpr std::size_t kChunk = 1024;
  std::string manifest;
  std::vector<std::string> lines;
  for (std::size_t lo = 0; lo < f.n; lo += kChunk) {
    const std::size_t count = std::min(kChunk, f.n - lo);
    lines.assign(count, {});
    parallel_for(count, f.threads, [&](std::size_t k) {
      const PairSample s = generator.sample(lo + k);
      std::optional<SeriesFiles> files;
      if (f.csv) {
        files = SeriesFiles{"series/" + s.id + "_ref.csv", "series/" + s.id + "_tgt.csv"};
        write_file_atomic(dir / files->ref, series_csv(s.reference));
        write_file_atomic(dir / files->tgt, series_csv(s.target));
      }
      if (f.plot) write_file_atomic(dir / "plots" / (s.id + ".csv"), overlay_csv(s.reference, s.target));
      lines[k] = manifest_line(s, files);
    });
    for (const auto& l : lines) manifest += l + "\n";
  }
  write_file_atomic(dir / kManifestName, manifest);

  RunManifest rm{joined(args), generator.config_hash(), config.seed, std::string(kVersion), {}, {}, 0.0};
  if (config.source.corpus) rm.inputs.push_back(config.source.corpus->string());
  if (!f.config.empty()) rm.inputs.push_back(f.config);
  rm.outputs.push_back((dir / kManifestName).string());
  if (f.csv) rm.outputs.push_back((dir / "series").string());
  if (f.plot) rm.outputs.push_back((dir / "plots").string());
  rm.duration_seconds = seconds_since(t0);
  write_file_atomic(dir / kRunManifestName, rm.to_json());
  out << "wrote " << f.n << " samples to " << (dir / kManifestName).string() << "\n";
  return kOk;
}

struct ExplainFlags {
  std::string method;
  std::string pool;
  std::string in;
  std::string out;
  unsigned threads = 1;
};

fs::path sidecar_manifest(const fs::path& file) { return fs::path(file.string() + ".run.json"); }

int cmd_explain(const ExplainFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = Clock::now();
  if (f.method == "retrieval" && f.pool.empty()) throw UsageError("--method retrieval requires --pool");
  const auto samples = read_manifest(f.in);
  std::optional<RetrievalPool> pool;
  if (f.method == "retrieval") pool = RetrievalPool::load(f.pool);

  std::vector<std::string> lines(samples.size());
  parallel_for(samples.size(), f.threads, [&](std::size_t i) {
    const auto& s = samples[i];
    ExplanationList list;
    if (f.method == "oracle") {
      list = s.ground_truth;
    } else if (f.method == "lsq") {
      const Catalog catalog(static_cast<int>(s.reference.size()));
      list = explain_lsq(s.reference, s.target, {}, catalog);
    } else {
      list = explain_retrieval(s.reference, s.target, *pool);
    }
    lines[i] = prediction_line(s.id, list);
  });
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  const fs::path file = f.out;
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  write_file_atomic(file, text);

  RunManifest rm{joined(args), "", std::nullopt, std::string(kVersion), {f.in}, {file.string()}, 0.0};
  if (!samples.empty()) {
    rm.config_hash = samples.front().provenance.config_hash;
    rm.seed = samples.front().provenance.seed;
  }
  if (pool) rm.inputs.push_back(f.pool);
  rm.duration_seconds = seconds_since(t0);
  write_file_atomic(sidecar_manifest(file), rm.to_json());
  out << "wrote " << samples.size() << " explanations to " << file.string() << "\n";
  return kOk;
}

struct EvaluateFlags {
  std::string pred;
  std::string gt;
  std::string out;
  double gate = kDefaultIouGate;
};

std::string percent_text(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

int cmd_evaluate(const EvaluateFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const auto t0 = Clock::now();
  const auto preds = read_lists(f.pred);
  const auto gts = read_lists(f.gt);
  const EvalReport report = evaluate_dataset(preds, gts, f.gate);
  const fs::path dir = f.out;
  ensure_dir(dir);
  write_file_atomic(dir / "report.json", report_to_json(report));
  write_file_atomic(dir / "report.txt", report_table(report, fs::path(f.pred).stem().string()));
  RunManifest rm{joined(args), "", std::nullopt, std::string(kVersion), {f.pred, f.gt},
                 {(dir / "report.json").string(), (dir / "report.txt").string()}, seconds_since(t0)};
  write_file_atomic(dir / kRunManifestName, rm.to_json());
  out << "match accuracy: " << percent_text(report.match_acc_overall) << "\n";
  return kOk;
}

struct ValidateFlags {
  std::string in;
  bool lenient = false;
};

int cmd_validate(const ValidateFlags& f, std::ostream& out) {
  const auto result = validate_text(read_file(f.in), f.lenient ? ParseMode::Lenient : ParseMode::Strict);
  for (const auto& p : result.problems) out << p << "\n";
  if (result.problems.empty()) {
    out << "ok: " << result.records << " records valid\n";
    return kOk;
  }
  out << result.problems.size() << (result.problems.size() == 1 ? " invalid entry" : " invalid entries") << "\n";
  return kFailure;
}

struct PoolFlags {
  GenerateFlags gen;
  std::uint64_t first = 0;
};

int cmd_build_pool(const PoolFlags& f, const CLI::App& cmd, const std::vector<std::string>& args,
                   std::ostream& out) {
  const auto t0 = Clock::now();
  const GenConfig config = resolve_config(f.gen, cmd);
  const PairGenerator generator(config);
  const RetrievalPool pool = RetrievalPool::build(generator, f.gen.n, f.first, f.gen.threads);
  const fs::path file = f.gen.out;
  if (file.has_parent_path()) ensure_dir(file.parent_path());
  pool.save(file);
  RunManifest rm{joined(args), generator.config_hash(), config.seed, std::string(kVersion), {}, {file.string()},
                 seconds_since(t0)};
  write_file_atomic(sidecar_manifest(file), rm.to_json());
  out << "wrote pool of " << pool.size() << " entries to " << file.string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize, explain and score time-series difference explanations", "tsdiff"};
  app.set_version_flag("--version", "tsdiff " + std::string(kVersion));
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "Generate a reference/target dataset with ground truth");
  generate->add_option("--n", gen.n, "Number of pairs");
  add_generation_flags(generate, gen);
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_flag("--csv", gen.csv, "Store series as sidecar CSV files instead of inline arrays");
  generate->add_flag("--plot", gen.plot, "Write per-sample ref,tgt overlay CSVs under plots/");

  ExplainFlags ex;
  auto* explain = app.add_subcommand("explain", "Explain every pair of a dataset");
  explain->add_option("--method", ex.method, "lsq | retrieval | oracle")
      ->required()
      ->check(CLI::IsMember({"lsq", "retrieval", "oracle"}));
  explain->add_option("--pool", ex.pool, "Retrieval pool file (retrieval only)");
  explain->add_option("--in", ex.in, "Dataset directory or manifest")->required();
  explain->add_option("--out", ex.out, "Predictions file (JSON lines)")->required();
  explain->add_option("--threads", ex.threads, "Worker threads")->check(CLI::Range(1u, 256u));

  EvaluateFlags ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate->add_option("--pred", ev.pred, "Predictions file")->required();
  evaluate->add_option("--gt", ev.gt, "Ground truth: manifest or predictions-format file")->required();
  evaluate->add_option("--out", ev.out, "Report directory")->required();
  evaluate->add_option("--iou-gate", ev.gate, "IoU threshold of a match")->check(CLI::Range(0.0, 1.0));

  ValidateFlags va;
  auto* validate_cmd = app.add_subcommand("validate", "Check explanation records against the schema");
  validate_cmd->add_option("--in", va.in, "JSON array file or JSON lines")->required();
  validate_cmd->add_flag("--lenient", va.lenient, "Accept any key order and missing null fields");

  PoolFlags pf;
  auto* build_pool = app.add_subcommand("build-pool", "Build a retrieval pool from generated pairs");
  build_pool->add_option("--n", pf.gen.n, "Number of pairs");
  add_generation_flags(build_pool, pf.gen);
  build_pool->add_option("--first", pf.first, "Index of the first generated pair");
  build_pool->add_option("--out", pf.gen.out, "Pool file")->required();

  std::string schema_out;
  auto* schema = app.add_subcommand("schema", "Print the record schema document");
  schema->add_option("--out", schema_out, "Write to a file instead of standard output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, *generate, args, out);
    if (*explain) return cmd_explain(ex, args, out);
    if (*evaluate) return cmd_evaluate(ev, args, out);
    if (*validate_cmd) return cmd_validate(va, out);
    if (*build_pool) return cmd_build_pool(pf, *build_pool, args, out);
    if (*schema) {
      if (schema_out.empty()) {
        out << schema_document();
      } else {
        write_file_atomic(schema_out, schema_document());
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace tsdiff::cli
