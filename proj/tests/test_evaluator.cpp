#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "generators.hpp"
#include "test_support.hpp"
#include "tsdiff/dataset_io.hpp"
#include "tsdiff/errors.hpp"
#include "tsdiff/evaluator.hpp"

namespace tsdiff {
namespace {

using testing::fixture;

DifferenceRecord rec(FuncId f, int s, int e, Presence p = Presence::Present) {
  return {DiffType::Type1, f, s, e, p, std::nullopt, std::nullopt};
}

DifferenceRecord rec2(FuncId f, int s, int e, Param p, Magnitude m) {
  return {DiffType::Type2, f, s, e, std::nullopt, p, m};
}

ExplanationList lenient_fixture(const char* name) { return parse(read_file(fixture(name)), ParseMode::Lenient); }

TEST(IntervalIou, Examples) {
  EXPECT_DOUBLE_EQ(interval_iou({36, 237}, {36, 237}), 1.0);
  EXPECT_DOUBLE_EQ(interval_iou({10, 20}, {15, 25}), 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(interval_iou({47, 237}, {36, 237}), 190.0 / 201.0);
  EXPECT_DOUBLE_EQ(interval_iou({40, 240}, {35, 240}), 200.0 / 205.0);
  EXPECT_DOUBLE_EQ(interval_iou({268, 268}, {268, 268}), 1.0);
  EXPECT_DOUBLE_EQ(interval_iou({268, 268}, {269, 269}), 0.0);
  EXPECT_DOUBLE_EQ(interval_iou({0, 10}, {20, 30}), 0.0);
}

TEST(IntervalIou, Properties) {
  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const int as = static_cast<int>(rng.uniform_int(0, 40));
    const int bs = static_cast<int>(rng.uniform_int(0, 40));
    const Interval a{as, as + static_cast<int>(rng.uniform_int(0, 20))};
    const Interval b{bs, bs + static_cast<int>(rng.uniform_int(0, 20))};
    const double iou = interval_iou(a, b);
    ASSERT_EQ(iou, interval_iou(b, a));
    ASSERT_GE(iou, 0.0);
    ASSERT_LE(iou, 1.0);
    ASSERT_EQ(iou == 1.0, a == b) << a.start << "," << a.end << " " << b.start << "," << b.end;
  }
}

TEST(Align, IdentityWithDistinctCategories) {
  const ExplanationList l{rec(FuncId::Drop, 268, 268), rec2(FuncId::Sinusoidal, 0, 99, Param::Frequency, Magnitude::Larger)};
  const Alignment a = align(l, l);
  EXPECT_EQ(a.matches.size(), 2u);
  EXPECT_TRUE(a.unmatched_pred.empty());
  EXPECT_TRUE(a.unmatched_gt.empty());
  EXPECT_FALSE(a.positional);
}

TEST(Align, PositionalFallbackWhenNoCategoryAgrees) {
  const Alignment a = align({rec(FuncId::LinearIncrease, 0, 100)}, {rec(FuncId::Spike, 50, 50)});
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_TRUE(a.positional);
  EXPECT_EQ(a.matches[0], std::make_pair(std::size_t{0}, std::size_t{0}));
}

TEST(Align, NoFallbackOnceSomethingMatched) {
  const ExplanationList gt{rec(FuncId::Spike, 5, 5), rec(FuncId::LinearIncrease, 0, 100)};
  const ExplanationList pred{rec(FuncId::Drop, 5, 5), rec(FuncId::Sinusoidal, 0, 100)};
  const Alignment a = align(pred, gt);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(a.unmatched_pred, std::vector<std::size_t>{1});
  EXPECT_EQ(a.unmatched_gt, std::vector<std::size_t>{1});
}

TEST(Align, TwoByOnePeriodic) {
  const ExplanationList gt{rec(FuncId::Sinusoidal, 0, 99), rec(FuncId::Sinusoidal, 200, 299)};
  const ExplanationList pred{rec(FuncId::SquareWave, 190, 299)};
  // Brute force over both assignments picks the larger IoU.
  const double iou0 = interval_iou(pred[0].interval(), gt[0].interval());
  const double iou1 = interval_iou(pred[0].interval(), gt[1].interval());
  const std::size_t best = iou1 > iou0 ? 1 : 0;
  const Alignment a = align(pred, gt);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0].second, best);
  EXPECT_EQ(best, 1u);
  EXPECT_EQ(a.unmatched_gt, std::vector<std::size_t>{0});
}

TEST(Align, TiesGoToLowerGtThenPredIndex) {
  const ExplanationList gt{rec(FuncId::Spike, 5, 5), rec(FuncId::Spike, 5, 5)};
  const ExplanationList pred{rec(FuncId::Drop, 5, 5)};
  EXPECT_EQ(align(pred, gt).matches[0].second, 0u);
  const ExplanationList pred2{rec(FuncId::Drop, 5, 5), rec(FuncId::Spike, 5, 5)};
  EXPECT_EQ(align(pred2, {rec(FuncId::Spike, 5, 5)}).matches[0].first, 0u);
}

TEST(Align, PartitionProperty) {
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const ExplanationList pred = testing::random_list(rng, 5);
    const ExplanationList gt = testing::random_list(rng, 5);
    const Alignment a = align(pred, gt);
    std::multiset<std::size_t> ps(a.unmatched_pred.begin(), a.unmatched_pred.end());
    std::multiset<std::size_t> gs(a.unmatched_gt.begin(), a.unmatched_gt.end());
    for (auto [p, g] : a.matches) {
      ps.insert(p);
      gs.insert(g);
      if (!a.positional) ASSERT_EQ(category_of(pred[p].func), category_of(gt[g].func));
    }
    ASSERT_LE(a.matches.size(), std::min(pred.size(), gt.size()));
    ASSERT_EQ(ps.size(), pred.size());
    ASSERT_EQ(gs.size(), gt.size());
    for (std::size_t k = 0; k < pred.size(); ++k) ASSERT_EQ(ps.count(k), 1u);
    for (std::size_t k = 0; k < gt.size(); ++k) ASSERT_EQ(gs.count(k), 1u);
  }
}

TEST(Align, SingleElementListsByBruteForce) {
  // Every pair of single-record lists over two categories.
  const std::vector<FuncId> funcs{FuncId::LinearIncrease, FuncId::Sigmoid, FuncId::Spike, FuncId::PositivePulse};
  for (FuncId pf : funcs) {
    for (FuncId gf : funcs) {
      const Alignment a = align({rec(pf, 0, 0)}, {rec(gf, 0, 0)});
      ASSERT_EQ(a.matches.size(), 1u);
      EXPECT_EQ(a.positional, category_of(pf) != category_of(gf));
    }
  }
  const Alignment none = align({}, {rec(FuncId::Spike, 0, 0)});
  EXPECT_TRUE(none.matches.empty());
  EXPECT_EQ(none.unmatched_gt.size(), 1u);
}

TEST(Fields, EligibilityRules) {
  const DifferenceRecord gt = rec2(FuncId::TriangleWave, 36, 237, Param::Frequency, Magnitude::Larger);
  DifferenceRecord pred = rec(FuncId::TriangleWave, 36, 237, Presence::Present);
  EXPECT_TRUE(field_eligible(Field::Type, gt));
  EXPECT_TRUE(field_eligible(Field::Func, gt));
  EXPECT_FALSE(field_eligible(Field::Presence, gt));
  EXPECT_TRUE(field_eligible(Field::Param, gt));
  EXPECT_TRUE(field_eligible(Field::Magnitude, gt));

  const ExplanationList p{pred};
  const ExplanationList g{gt};
  const auto acc = field_accuracies(align(p, g), p, g);
  EXPECT_EQ(acc[static_cast<std::size_t>(Field::Type)], 0.0);
  EXPECT_EQ(acc[static_cast<std::size_t>(Field::Func)], 100.0);
  EXPECT_FALSE(acc[static_cast<std::size_t>(Field::Presence)]);
  EXPECT_EQ(acc[static_cast<std::size_t>(Field::Param)], 0.0);
}

TEST(Match, GateAndFields) {
  const DifferenceRecord gt = rec(FuncId::LinearIncrease, 0, 100);
  EXPECT_TRUE(is_hit(rec(FuncId::LinearIncrease, 0, 80), gt));
  EXPECT_DOUBLE_EQ(interval_iou({0, 79}, {0, 100}), 0.79);
  EXPECT_FALSE(is_hit(rec(FuncId::LinearIncrease, 0, 79), gt));
  EXPECT_TRUE(is_hit(rec(FuncId::LinearIncrease, 0, 79), gt, 0.75));
  EXPECT_FALSE(is_hit(rec(FuncId::LinearIncrease, 0, 100, Presence::Absent), gt));
}

TEST(WorkedExample, Row1) {
  const auto gt = lenient_fixture("worked_example_row1_ground_truth.json");
  const auto gen = lenient_fixture("worked_example_row1_generated.json");
  const Alignment a = align(gen, gt);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_NEAR(interval_iou(gen[0].interval(), gt[0].interval()), 190.0 / 201.0, 1e-9);
  for (Field f : kFields) {
    if (field_eligible(f, gt[0])) EXPECT_TRUE(field_correct(f, gen[0], gt[0])) << to_string(f);
  }
  EXPECT_EQ(match_accuracy(a, gen, gt).overall, 100.0);
}

TEST(WorkedExample, Row2) {
  const auto gt = lenient_fixture("worked_example_row2_ground_truth.json");
  const auto gen = lenient_fixture("worked_example_row2_generated.json");
  const Alignment a = align(gen, gt);
  ASSERT_EQ(a.matches.size(), 2u);
  EXPECT_NEAR(interval_iou(gen[0].interval(), gt[0].interval()), 200.0 / 205.0, 1e-9);
  EXPECT_EQ(interval_iou(gen[1].interval(), gt[1].interval()), 1.0);
  EXPECT_TRUE(is_hit(gen[1], gt[1]));
  const auto m = match_accuracy(a, gen, gt);
  EXPECT_EQ(m.overall, 100.0);
  EXPECT_EQ(m.by_category[static_cast<std::size_t>(Category::Event)], 100.0);
  EXPECT_EQ(m.by_category[static_cast<std::size_t>(Category::Trend)], 100.0);
  EXPECT_FALSE(m.by_category[static_cast<std::size_t>(Category::Periodic)]);
}

TEST(Fixtures, OverAndUnderPrediction) {
  const EvalReport r = evaluate_dataset(read_lists(fixture("opr_upr_predictions.jsonl")),
                                        read_lists(fixture("opr_upr_ground_truth.jsonl")));
  EXPECT_EQ(r.counts.samples, 10u);
  EXPECT_EQ(r.counts.n_gt, 12u);
  EXPECT_EQ(r.counts.unmatched_pred, 1u);
  EXPECT_EQ(r.counts.unmatched_gt, 2u);
  EXPECT_NEAR(r.opr, 8.33, 0.01);
  EXPECT_NEAR(r.upr, 16.67, 0.01);
  EXPECT_DOUBLE_EQ(r.opr, 100.0 / 12.0);
}

TEST(Fixtures, FuncAccuracy) {
  const EvalReport r = evaluate_dataset(read_lists(fixture("func_accuracy_predictions.jsonl")),
                                        read_lists(fixture("func_accuracy_ground_truth.jsonl")));
  EXPECT_EQ(r.counts.n_matched, 4u);
  EXPECT_EQ(r.field(Field::Func), 75.0);
  EXPECT_EQ(r.field(Field::Type), 100.0);
}

TEST(Dataset, EmptyPredictions) {
  std::vector<IdentifiedList> gts;
  std::vector<IdentifiedList> preds;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    gts.push_back({std::to_string(i), {testing::random_record(rng)}});
    preds.push_back({std::to_string(i), {}});
  }
  const EvalReport r = evaluate_dataset(preds, gts);
  EXPECT_EQ(r.upr, 100.0);
  EXPECT_EQ(r.opr, 0.0);
  EXPECT_EQ(r.counts.n_matched, 0u);
  for (Field f : kFields) EXPECT_FALSE(r.field(f));
  EXPECT_FALSE(r.match_acc_overall);
  EXPECT_FALSE(r.mean_iou);
}

TEST(Dataset, OracleIsFixedPoint) {
  std::vector<IdentifiedList> gts;
  Rng rng(4);
  for (int i = 0; i < 300; ++i) gts.push_back({std::to_string(i), testing::random_list(rng, 4)});
  const EvalReport r = evaluate_dataset(gts, gts);
  for (Field f : kFields) EXPECT_EQ(r.field(f), 100.0) << to_string(f);
  EXPECT_EQ(r.mean_iou, 100.0);
  EXPECT_EQ(r.match_acc_overall, 100.0);
  EXPECT_EQ(r.opr, 0.0);
  EXPECT_EQ(r.upr, 0.0);
}

TEST(Dataset, IdMismatchNamesIds) {
  const std::vector<IdentifiedList> preds{{"a", {}}, {"b", {}}};
  const std::vector<IdentifiedList> gts{{"a", {}}, {"c", {}}};
  try {
    evaluate_dataset(preds, gts);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("b"), std::string::npos);
    EXPECT_NE(msg.find("c"), std::string::npos);
  }
}

TEST(Dataset, CorruptingOneFieldNeverHelps) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<IdentifiedList> gts;
    for (int i = 0; i < 5; ++i) gts.push_back({std::to_string(i), testing::random_list(rng, 3)});
    std::vector<IdentifiedList> preds = gts;
    for (auto& p : preds) {
      for (auto& r : p.list) {
        if (rng.uniform(0, 1) < 0.3) r.start = std::max(0, r.start - static_cast<int>(rng.uniform_int(0, 30)));
      }
    }
    const EvalReport before = evaluate_dataset(preds, gts);
    auto worse = preds;
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    for (std::size_t s = 0; s < worse.size(); ++s) {
      for (std::size_t k = 0; k < worse[s].list.size(); ++k) slots.emplace_back(s, k);
    }
    if (slots.empty()) continue;
    auto [s, k] = slots[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(slots.size()) - 1))];
    DifferenceRecord& r = worse[s].list[k];
    switch (rng.uniform_int(0, 2)) {
      case 0:
        r.magnitude = r.magnitude ? (*r.magnitude == Magnitude::Larger ? Magnitude::Smaller : Magnitude::Larger)
                                  : r.magnitude;
        r.presence = r.presence ? (*r.presence == Presence::Present ? Presence::Absent : Presence::Present)
                                : r.presence;
        break;
      case 1: {
        // Another function of the same category keeps the alignment unchanged.
        const auto same = default_catalog().in_category(category_of(r.func));
        for (FuncId f : same) {
          if (f != r.func && (!r.param || default_catalog().spec(f).is_modifiable(*r.param))) {
            r.func = f;
            break;
          }
        }
        break;
      }
      default:
        r.type = r.type == DiffType::Type1 ? DiffType::Type2 : DiffType::Type1;
    }
    const EvalReport after = evaluate_dataset(worse, gts);
    for (Field f : kFields) {
      if (before.field(f) && after.field(f)) ASSERT_LE(*after.field(f), *before.field(f));
    }
    if (before.match_acc_overall && after.match_acc_overall) {
      ASSERT_LE(*after.match_acc_overall, *before.match_acc_overall);
    }
  }
}

TEST(Accumulator, MergeIsOrderIndependent) {
  Rng rng(6);
  std::vector<std::pair<ExplanationList, ExplanationList>> pairs;
  for (int i = 0; i < 50; ++i) pairs.emplace_back(testing::random_list(rng, 3), testing::random_list(rng, 3));
  EvalAccumulator all;
  for (const auto& [p, g] : pairs) all.add(p, g);
  EvalAccumulator left;
  EvalAccumulator right;
  for (std::size_t i = 0; i < pairs.size(); ++i) (i % 2 ? right : left).add(pairs[i].first, pairs[i].second);
  right.merge(left);
  EXPECT_EQ(report_to_json(right.report()), report_to_json(all.report()));
}

TEST(Report, TableAndJson) {
  const EvalReport r = evaluate_dataset(read_lists(fixture("opr_upr_predictions.jsonl")),
                                        read_lists(fixture("opr_upr_ground_truth.jsonl")));
  const std::string table = report_table(r, "fixture");
  EXPECT_NE(table.find("OPR"), std::string::npos);
  EXPECT_NE(table.find("8.3"), std::string::npos);
  EXPECT_NE(table.find("16.7"), std::string::npos);
  EXPECT_NE(table.find("fixture"), std::string::npos);
  const std::string json = report_to_json(r);
  EXPECT_NE(json.find("\"opr\""), std::string::npos);
}

}  // namespace
}  // namespace tsdiff
