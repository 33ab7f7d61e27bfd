#pragma once

// Scoring of predicted explanations against ground truth: category-greedy
// alignment with positional fallback, field accuracies, interval IoU, match
// accuracy with an IoU gate, and over/under-prediction rates.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsdiff/schema.hpp"

namespace tsdiff {

inline constexpr double kDefaultIouGate = 0.8;

struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (pred index, gt index)
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;
  bool positional = false;  // true when the fallback pass produced the matches
};

/// Pass 1 greedily pairs same-category elements by descending IoU (ties: gt index,
/// then pred index). Only if pass 1 matches nothing, elements are paired by position.
Alignment align(const ExplanationList& pred, const ExplanationList& gt);

/// max(0, min(ends) - max(starts)) / (max(ends) - min(starts)); identical
/// single-point intervals score 1.
double interval_iou(const Interval& a, const Interval& b);

enum class Field : std::uint8_t { Type, Func, Presence, Param, Magnitude };
inline constexpr std::array<Field, 5> kFields{Field::Type, Field::Func, Field::Presence, Field::Param,
                                              Field::Magnitude};
std::string_view to_string(Field f);

/// Whether `f` is scored for a pair whose ground truth is `gt`.
bool field_eligible(Field f, const DifferenceRecord& gt);
bool field_correct(Field f, const DifferenceRecord& pred, const DifferenceRecord& gt);

/// Every eligible field correct and IoU >= gate.
bool is_hit(const DifferenceRecord& pred, const DifferenceRecord& gt, double iou_gate = kDefaultIouGate);

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  /// nullopt when nothing was eligible.
  std::optional<double> percent() const;
  void add(bool ok) {
    ++total;
    if (ok) ++correct;
  }
  Tally& operator+=(const Tally& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
};

using FieldAccuracies = std::array<std::optional<double>, kFields.size()>;

FieldAccuracies field_accuracies(const Alignment& alignment, const ExplanationList& pred, const ExplanationList& gt);

struct MatchAccuracy {
  std::optional<double> overall;
  std::array<std::optional<double>, kCategories.size()> by_category;  // indexed by Category
};

MatchAccuracy match_accuracy(const Alignment& alignment, const ExplanationList& pred, const ExplanationList& gt,
                             double iou_gate = kDefaultIouGate);

struct EvalCounts {
  std::size_t samples = 0;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  std::size_t n_matched = 0;
  std::size_t unmatched_pred = 0;
  std::size_t unmatched_gt = 0;
};

/// All values are percentages in [0, 100] at full precision.
struct EvalReport {
  FieldAccuracies field_acc;
  std::optional<double> mean_iou;
  std::optional<double> match_acc_overall;
  std::array<std::optional<double>, kCategories.size()> match_acc_by_category;
  double opr = 0.0;
  double upr = 0.0;
  EvalCounts counts;

  std::optional<double> field(Field f) const { return field_acc[static_cast<std::size_t>(f)]; }
  std::optional<double> category(Category c) const { return match_acc_by_category[static_cast<std::size_t>(c)]; }
};

/// Order-independent reduction over samples.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(double iou_gate = kDefaultIouGate) : iou_gate_(iou_gate) {}

  void add(const ExplanationList& pred, const ExplanationList& gt);
  void merge(const EvalAccumulator& other);
  EvalReport report() const;

 private:
  double iou_gate_;
  std::array<Tally, kFields.size()> fields_{};
  Tally hits_;
  std::array<Tally, kCategories.size()> category_hits_{};
  double iou_sum_ = 0.0;
  EvalCounts counts_;
};

struct IdentifiedList {
  std::string id;
  ExplanationList list;
};

/// Pairs predictions with ground truth by id. Throws DataError naming every id
/// present on one side only.
EvalReport evaluate_dataset(const std::vector<IdentifiedList>& predictions, const std::vector<IdentifiedList>& gts,
                            double iou_gate = kDefaultIouGate);

std::string report_to_json(const EvalReport& report);

/// Fixed-width table: Type Func Presence Param Magnitude IoU MatchAcc OPR UPR and the
/// four per-category match accuracies, one decimal; "-" for absent values.
std::string report_table(const EvalReport& report, std::string_view label = "run");

}  // namespace tsdiff
