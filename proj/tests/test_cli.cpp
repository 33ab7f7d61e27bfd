#include <gtest/gtest.h>

#include <fstream>

#include "test_support.hpp"
#include "tsdiff/dataset_io.hpp"
#include "tsdiff/explain.hpp"
#include "tsdiff/schema.hpp"
#include "tsdiff/version.hpp"

namespace tsdiff {
namespace {

using testing::fixture;
using testing::run_cli;
using testing::TempDir;

bool contains(const std::string& text, const std::string& what) { return text.find(what) != std::string::npos; }

TEST(Cli, Version) {
  const auto r = run_cli({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "tsdiff " + std::string(kVersion) + "\n");
}

TEST(Cli, UnknownSubcommandOrFlag) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"generate", "--seed", "1", "--out", "x", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
}

TEST(Generate, RequiresSeed) {
  TempDir dir;
  const auto r = run_cli({"generate", "--n", "3", "--out", dir / "d"});
  EXPECT_EQ(r.code, cli::kUsage);
  EXPECT_FALSE(std::filesystem::exists(dir / "d/manifest.jsonl"));
}

TEST(Generate, RejectsBadK) {
  TempDir dir;
  for (auto args : std::vector<std::vector<std::string>>{{"--kmax", "0"}, {"--kmin", "3", "--kmax", "2"}, {"--kmin", "0"}}) {
    std::vector<std::string> full{"generate", "--n", "2", "--seed", "1", "--out", dir / "d"};
    full.insert(full.end(), args.begin(), args.end());
    const auto r = run_cli(full);
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_TRUE(contains(r.err, "kmax must be >= kmin >= 1")) << r.err;
  }
}

TEST(Generate, WritesManifestAndRunManifest) {
  TempDir dir;
  const auto r = run_cli({"generate", "--n", "50", "--seed", "7", "--out", dir / "d"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto entries = read_manifest(dir.path() / "d");
  ASSERT_EQ(entries.size(), 50u);
  for (const auto& e : entries) {
    EXPECT_EQ(e.ground_truth.size(), 1u);
    EXPECT_EQ(e.reference.size(), 300u);
  }
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "d" / kRunManifestName));
  EXPECT_TRUE(contains(read_file(dir.path() / "d" / kRunManifestName), "\"command\": \"tsdiff generate --n 50"));
}

TEST(Generate, ByteIdenticalAcrossRunsAndThreads) {
  TempDir dir;
  const std::vector<std::string> base{"generate", "--n", "120", "--kmax", "4", "--seed", "9", "--source", "sine_mix"};
  auto with = [&](const std::string& out, const std::string& threads) {
    auto args = base;
    args.insert(args.end(), {"--out", dir / out, "--threads", threads});
    return run_cli(args).code;
  };
  ASSERT_EQ(with("a", "1"), 0);
  ASSERT_EQ(with("b", "1"), 0);
  ASSERT_EQ(with("c", "4"), 0);
  const std::string a = read_file(dir.path() / "a" / kManifestName);
  EXPECT_EQ(a, read_file(dir.path() / "b" / kManifestName));
  EXPECT_EQ(a, read_file(dir.path() / "c" / kManifestName));
}

TEST(Generate, CsvAndPlotOutputs) {
  TempDir dir;
  ASSERT_EQ(run_cli({"generate", "--n", "3", "--seed", "2", "--csv", "--plot", "--out", dir / "d"}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "d/series/000001_ref.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "d/series/000001_tgt.csv"));
  EXPECT_EQ(read_file(dir.path() / "d/plots/000002.csv").substr(0, 8), "ref,tgt\n");
  const auto entries = read_manifest(dir.path() / "d");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[1].reference.size(), 300u);
}

TEST(Generate, ConfigFileWithOverride) {
  TempDir dir;
  std::ofstream(dir / "cfg.json") << R"({"length": 200, "kmax": 2, "seed": 5, "source": "piecewise"})";
  // The seed flag stays mandatory even when the file carries one.
  EXPECT_EQ(run_cli({"generate", "--n", "5", "--config", dir / "cfg.json", "--out", dir / "d"}).code, cli::kUsage);
  ASSERT_EQ(run_cli({"generate", "--n", "5", "--seed", "5", "--config", dir / "cfg.json", "--out", dir / "d"}).code, 0);
  const auto entries = read_manifest(dir.path() / "d");
  EXPECT_EQ(entries[0].reference.size(), 200u);
  EXPECT_EQ(entries[0].provenance.source, "piecewise");
  ASSERT_EQ(run_cli({"generate", "--n", "5", "--seed", "5", "--config", dir / "cfg.json", "--length", "150", "--out", dir / "e"}).code, 0);
  EXPECT_EQ(read_manifest(dir.path() / "e")[0].reference.size(), 150u);
  std::ofstream(dir / "bad.json") << R"({"lenght": 200})";
  EXPECT_EQ(run_cli({"generate", "--n", "1", "--seed", "5", "--config", dir / "bad.json", "--out", dir / "f"}).code, cli::kUsage);
}

TEST(Generate, UnreadableCorpusIsFailure) {
  TempDir dir;
  const auto r = run_cli({"generate", "--n", "1", "--seed", "1", "--source", "corpus:/nonexistent/x", "--out", dir / "d"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_TRUE(contains(r.err, "/nonexistent/x"));
}

TEST(Pipeline, OracleLoopIsPerfect) {
  TempDir dir;
  ASSERT_EQ(run_cli({"generate", "--n", "80", "--kmax", "4", "--seed", "3", "--out", dir / "d"}).code, 0);
  ASSERT_EQ(run_cli({"explain", "--method", "oracle", "--in", dir / "d", "--out", dir / "pred.jsonl"}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "pred.jsonl.run.json"));
  const auto r = run_cli({"evaluate", "--pred", dir / "pred.jsonl", "--gt", dir / "d", "--out", dir / "report"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "match accuracy: 100.0\n");
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "report/report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "report/report.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / kRunManifestName));
}

TEST(Explain, LsqWritesOneListPerSample) {
  TempDir dir;
  ASSERT_EQ(run_cli({"generate", "--n", "6", "--seed", "4", "--out", dir / "d"}).code, 0);
  ASSERT_EQ(run_cli({"explain", "--method", "lsq", "--in", dir / "d", "--out", dir / "p.jsonl"}).code, 0);
  const auto lists = read_lists(dir / "p.jsonl");
  const auto entries = read_manifest(dir.path() / "d");
  ASSERT_EQ(lists.size(), entries.size());
  for (std::size_t i = 0; i < lists.size(); ++i) EXPECT_EQ(lists[i].id, entries[i].id);
}

TEST(Explain, MethodAndPoolFlags) {
  TempDir dir;
  ASSERT_EQ(run_cli({"generate", "--n", "4", "--seed", "4", "--out", dir / "d"}).code, 0);
  EXPECT_EQ(run_cli({"explain", "--method", "magic", "--in", dir / "d", "--out", dir / "p"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"explain", "--method", "retrieval", "--in", dir / "d", "--out", dir / "p"}).code, cli::kUsage);

  ASSERT_EQ(run_cli({"build-pool", "--n", "40", "--seed", "8", "--out", dir / "pool.bin"}).code, 0);
  EXPECT_EQ(run_cli({"explain", "--method", "retrieval", "--pool", dir / "pool.bin", "--in", dir / "d", "--out",
                     dir / "p.jsonl"})
                .code,
            0);
  EXPECT_EQ(read_lists(dir / "p.jsonl").size(), 4u);

  {
    std::fstream f(dir / "pool.bin", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    f.put('\x11');
  }
  const auto r = run_cli({"explain", "--method", "retrieval", "--pool", dir / "pool.bin", "--in", dir / "d", "--out",
                          dir / "q.jsonl"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_TRUE(contains(r.err, "feature extractor")) << r.err;
}

TEST(Evaluate, FixtureReport) {
  TempDir dir;
  const auto r = run_cli({"evaluate", "--pred", fixture("opr_upr_predictions.jsonl").string(), "--gt",
                          fixture("opr_upr_ground_truth.jsonl").string(), "--out", dir / "r"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string table = read_file(dir.path() / "r/report.txt");
  EXPECT_TRUE(contains(table, "8.3")) << table;
  EXPECT_TRUE(contains(read_file(dir.path() / "r/report.json"), "8.33"));
}

TEST(Evaluate, MalformedPredictionReportsPosition) {
  TempDir dir;
  std::ofstream(dir / "bad.jsonl") << prediction_line("s00", {}) << "\n{\"id\": \"s01\", \"explanation\": [}\n";
  const auto r = run_cli({"evaluate", "--pred", dir / "bad.jsonl", "--gt", fixture("opr_upr_ground_truth.jsonl").string(),
                          "--out", dir / "r"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_TRUE(contains(r.err, "line 2")) << r.err;
  EXPECT_TRUE(contains(r.err, "column")) << r.err;
}

TEST(Evaluate, IdMismatch) {
  TempDir dir;
  std::ofstream(dir / "p.jsonl") << prediction_line("zz9", {}) << "\n";
  const auto r = run_cli({"evaluate", "--pred", dir / "p.jsonl", "--gt", fixture("opr_upr_ground_truth.jsonl").string(),
                          "--out", dir / "r"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_TRUE(contains(r.err, "zz9")) << r.err;
  EXPECT_TRUE(contains(r.err, "s00")) << r.err;
}

TEST(Validate, GeneratedFileIsValid) {
  TempDir dir;
  ASSERT_EQ(run_cli({"generate", "--n", "30", "--kmax", "4", "--seed", "5", "--out", dir / "d"}).code, 0);
  const auto r = run_cli({"validate", "--in", (dir.path() / "d" / kManifestName).string()});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "ok: ")) << r.out;
}

TEST(Validate, ParamOnType1) {
  TempDir dir;
  std::ofstream(dir / "bad.json") << R"([{"type": "TYPE1", "func": "DROP", "start": 268, "end": 268, )"
                                  << R"("presence": "PRESENT", "param": "AMPLITUDE", "magnitude": null}])";
  const auto r = run_cli({"validate", "--in", dir / "bad.json"});
  EXPECT_EQ(r.code, cli::kFailure);
  EXPECT_TRUE(contains(r.out, "param must be null for TYPE1")) << r.out;
}

TEST(Validate, LenientAcceptsReorderedKeys) {
  TempDir dir;
  std::ofstream(dir / "r.json") << R"([{"func": "DROP", "type": "TYPE1", "end": 268, "start": 268, )"
                                << R"("presence": "PRESENT"}])";
  EXPECT_EQ(run_cli({"validate", "--in", dir / "r.json"}).code, cli::kFailure);
  EXPECT_EQ(run_cli({"validate", "--in", dir / "r.json", "--lenient"}).code, 0);
  EXPECT_EQ(run_cli({"validate", "--in", dir / "missing.json"}).code, cli::kFailure);
}

TEST(Schema, PrintsDocument) {
  const auto r = run_cli({"schema"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, schema_document());
}

}  // namespace
}  // namespace tsdiff
