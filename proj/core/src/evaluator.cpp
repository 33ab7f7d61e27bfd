#include "tsdiff/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "tsdiff/errors.hpp"

namespace tsdiff {
namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v);
  return buf;
}

}  // namespace

double interval_iou(const Interval& a, const Interval& b) {
  const int inter = std::min(a.end, b.end) - std::max(a.start, b.start);
  const int hull = std::max(a.end, b.end) - std::min(a.start, b.start);
  if (hull == 0) return 1.0;  // identical single points
  return static_cast<double>(std::max(0, inter)) / static_cast<double>(hull);
}

Alignment align(const ExplanationList& pred, const ExplanationList& gt) {
  struct Candidate {
    double iou;
    std::size_t gt;
    std::size_t pred;
  };
  std::vector<Candidate> candidates;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (category_of(gt[g].func) == category_of(pred[p].func)) {
        candidates.push_back({interval_iou(pred[p].interval(), gt[g].interval()), g, p});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    return std::tie(a.gt, a.pred) < std::tie(b.gt, b.pred);
  });

  Alignment out;
  std::vector<bool> pred_used(pred.size(), false);
  std::vector<bool> gt_used(gt.size(), false);
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = gt_used[c.gt] = true;
    out.matches.emplace_back(c.pred, c.gt);
  }
  if (out.matches.empty()) {
    out.positional = !pred.empty() && !gt.empty();
    for (std::size_t i = 0; i < std::min(pred.size(), gt.size()); ++i) {
      pred_used[i] = gt_used[i] = true;
      out.matches.emplace_back(i, i);
    }
  }
  std::sort(out.matches.begin(), out.matches.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) out.unmatched_pred.push_back(p);
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) out.unmatched_gt.push_back(g);
  }
  return out;
}

std::string_view to_string(Field f) {
  switch (f) {
    case Field::Type:
      return "type";
    case Field::Func:
      return "func";
    case Field::Presence:
      return "presence";
    case Field::Param:
      return "param";
    case Field::Magnitude:
      return "magnitude";
  }
  return "?";
}

bool field_eligible(Field f, const DifferenceRecord& gt) {
  switch (f) {
    case Field::Type:
    case Field::Func:
      return true;
    case Field::Presence:
      return gt.type == DiffType::Type1;
    case Field::Param:
    case Field::Magnitude:
      return gt.type == DiffType::Type2;
  }
  return false;
}

bool field_correct(Field f, const DifferenceRecord& pred, const DifferenceRecord& gt) {
  switch (f) {
    case Field::Type:
      return pred.type == gt.type;
    case Field::Func:
      return pred.func == gt.func;
    case Field::Presence:
      return pred.presence == gt.presence;
    case Field::Param:
      return pred.param == gt.param;
    case Field::Magnitude:
      return pred.magnitude == gt.magnitude;
  }
  return false;
}

bool is_hit(const DifferenceRecord& pred, const DifferenceRecord& gt, double iou_gate) {
  for (Field f : kFields) {
    if (field_eligible(f, gt) && !field_correct(f, pred, gt)) return false;
  }
  return interval_iou(pred.interval(), gt.interval()) >= iou_gate;
}

std::optional<double> Tally::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

FieldAccuracies field_accuracies(const Alignment& alignment, const ExplanationList& pred, const ExplanationList& gt) {
  std::array<Tally, kFields.size()> tallies{};
  for (const auto& [p, g] : alignment.matches) {
    for (Field f : kFields) {
      if (field_eligible(f, gt[g])) tallies[static_cast<std::size_t>(f)].add(field_correct(f, pred[p], gt[g]));
    }
  }
  FieldAccuracies out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tallies[i].percent();
  return out;
}

MatchAccuracy match_accuracy(const Alignment& alignment, const ExplanationList& pred, const ExplanationList& gt,
                             double iou_gate) {
  Tally overall;
  std::array<Tally, kCategories.size()> by_category{};
  for (const auto& [p, g] : alignment.matches) {
    const bool hit = is_hit(pred[p], gt[g], iou_gate);
    overall.add(hit);
    by_category[static_cast<std::size_t>(category_of(gt[g].func))].add(hit);
  }
  MatchAccuracy out;
  out.overall = overall.percent();
  for (std::size_t i = 0; i < by_category.size(); ++i) out.by_category[i] = by_category[i].percent();
  return out;
}

void EvalAccumulator::add(const ExplanationList& pred, const ExplanationList& gt) {
  const Alignment a = align(pred, gt);
  for (const auto& [p, g] : a.matches) {
    for (Field f : kFields) {
      if (field_eligible(f, gt[g])) fields_[static_cast<std::size_t>(f)].add(field_correct(f, pred[p], gt[g]));
    }
    iou_sum_ += interval_iou(pred[p].interval(), gt[g].interval());
    const bool hit = is_hit(pred[p], gt[g], iou_gate_);
    hits_.add(hit);
    category_hits_[static_cast<std::size_t>(category_of(gt[g].func))].add(hit);
  }
  counts_.samples += 1;
  counts_.n_gt += gt.size();
  counts_.n_pred += pred.size();
  counts_.n_matched += a.matches.size();
  counts_.unmatched_pred += a.unmatched_pred.size();
  counts_.unmatched_gt += a.unmatched_gt.size();
}

void EvalAccumulator::merge(const EvalAccumulator& o) {
  for (std::size_t i = 0; i < fields_.size(); ++i) fields_[i] += o.fields_[i];
  hits_ += o.hits_;
  for (std::size_t i = 0; i < category_hits_.size(); ++i) category_hits_[i] += o.category_hits_[i];
  iou_sum_ += o.iou_sum_;
  counts_.samples += o.counts_.samples;
  counts_.n_gt += o.counts_.n_gt;
  counts_.n_pred += o.counts_.n_pred;
  counts_.n_matched += o.counts_.n_matched;
  counts_.unmatched_pred += o.counts_.unmatched_pred;
  counts_.unmatched_gt += o.counts_.unmatched_gt;
}

EvalReport EvalAccumulator::report() const {
  EvalReport r;
  for (std::size_t i = 0; i < fields_.size(); ++i) r.field_acc[i] = fields_[i].percent();
  if (counts_.n_matched > 0) r.mean_iou = 100.0 * iou_sum_ / static_cast<double>(counts_.n_matched);
  r.match_acc_overall = hits_.percent();
  for (std::size_t i = 0; i < category_hits_.size(); ++i) r.match_acc_by_category[i] = category_hits_[i].percent();
  if (counts_.n_gt > 0) {
    r.opr = 100.0 * static_cast<double>(counts_.unmatched_pred) / static_cast<double>(counts_.n_gt);
    r.upr = 100.0 * static_cast<double>(counts_.unmatched_gt) / static_cast<double>(counts_.n_gt);
  }
  r.counts = counts_;
  return r;
}

EvalReport evaluate_dataset(const std::vector<IdentifiedList>& predictions, const std::vector<IdentifiedList>& gts,
                            double iou_gate) {
  std::map<std::string, const ExplanationList*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p.list).second) throw DataError("duplicate prediction id " + p.id);
  }
  std::set<std::string> gt_ids;
  std::vector<std::string> missing_pred;
  for (const auto& g : gts) {
    if (!gt_ids.insert(g.id).second) throw DataError("duplicate ground-truth id " + g.id);
    if (!by_id.count(g.id)) missing_pred.push_back(g.id);
  }
  std::vector<std::string> missing_gt;
  for (const auto& p : predictions) {
    if (!gt_ids.count(p.id)) missing_gt.push_back(p.id);
  }
  if (!missing_pred.empty() || !missing_gt.empty()) {
    std::string msg = "sample ids differ between predictions and ground truth";
    auto list = [](const std::vector<std::string>& ids) {
      std::string s;
      for (const auto& id : ids) s += (s.empty() ? "" : ", ") + id;
      return s;
    };
    if (!missing_pred.empty()) msg += "; missing from predictions: " + list(missing_pred);
    if (!missing_gt.empty()) msg += "; missing from ground truth: " + list(missing_gt);
    throw DataError(msg);
  }
  EvalAccumulator acc(iou_gate);
  for (const auto& g : gts) acc.add(*by_id.at(g.id), g.list);
  return acc.report();
}

std::string report_to_json(const EvalReport& r) {
  using Json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json fields;
  for (Field f : kFields) fields[std::string(to_string(f))] = opt(r.field(f));
  Json cats;
  for (Category c : kCategories) cats[std::string(to_string(c))] = opt(r.category(c));
  Json j;
  j["field_acc"] = fields;
  j["mean_iou"] = opt(r.mean_iou);
  j["match_acc_overall"] = opt(r.match_acc_overall);
  j["match_acc_by_category"] = cats;
  j["opr"] = r.opr;
  j["upr"] = r.upr;
  j["counts"] = {{"samples", r.counts.samples},
                 {"n_gt", r.counts.n_gt},
                 {"n_pred", r.counts.n_pred},
                 {"n_matched", r.counts.n_matched},
                 {"unmatched_pred", r.counts.unmatched_pred},
                 {"unmatched_gt", r.counts.unmatched_gt}};
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& r, std::string_view label) {
  const std::vector<std::string> header{"", "Type", "Func", "Presence", "Param", "Magnitude", "IoU", "MatchAcc",
                                        "OPR", "UPR", "Trend", "Periodic", "Fluctuation", "Event"};
  std::vector<std::string> row{std::string(label)};
  const std::array<const std::vector<std::string>*, 2> lines{&header, &row};
  for (Field f : kFields) row.push_back(cell(r.field(f)));
  row.push_back(cell(r.mean_iou));
  row.push_back(cell(r.match_acc_overall));
  row.push_back(cell(r.opr));
  row.push_back(cell(r.upr));
  for (Category c : kCategories) row.push_back(cell(r.category(c)));

  std::string out;
  for (const auto* line : lines) {
    for (std::size_t i = 0; i < line->size(); ++i) {
      const std::size_t width = std::max<std::size_t>(header[i].size(), i == 0 ? label.size() : 5);
      std::string v = (*line)[i];
      if (i == 0) {
        v.resize(width, ' ');
      } else {
        v.insert(0, width - std::min(width, v.size()), ' ');
      }
      out += (i == 0 ? "" : "  ") + v;
    }
    out += "\n";
  }
  return out;
}

}  // namespace tsdiff
