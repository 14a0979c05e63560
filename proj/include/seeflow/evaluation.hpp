#pragma once

// Fragment-level scoring of extracted steps against ground truth: IoU, time offset, greedy
// order-preserving matching, threshold sweeps, and trailer statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeflow/error.hpp"
#include "seeflow/steps.hpp"

namespace seeflow {

// Inclusive frame interval.
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval interval_of(const CodingStep& s) { return Interval{s.start_frame, s.end_frame}; }

inline bool overlaps(Interval r, Interval g) { return r.start <= g.end && g.start <= r.end; }

inline double fragment_iou(Interval r, Interval g) {
  if (!overlaps(r, g)) return 0.0;
  const std::size_t inter = std::min(r.end, g.end) - std::max(r.start, g.start) + 1;
  const std::size_t uni = r.length() + g.length() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

inline std::size_t time_offset(Interval r, Interval g) {
  if (!overlaps(r, g)) {
    throw Error(ErrorKind::NotOverlapping, "time offset is undefined for disjoint fragments [" +
                                               std::to_string(r.start) + "," + std::to_string(r.end) +
                                               "] and [" + std::to_string(g.start) + "," +
                                               std::to_string(g.end) + "]");
  }
  auto dist = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
  return std::min({dist(r.start, g.start), dist(r.end, g.start), dist(r.start, g.end), dist(r.end, g.end)});
}

struct FragmentMatch {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
  std::size_t time_offset = 0;
  bool type_agrees = true;

  friend bool operator==(const FragmentMatch&, const FragmentMatch&) = default;
};

inline void check_fragment_list(const std::vector<Interval>& list, const char* what) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].end < list[i].start) {
      throw Error(ErrorKind::InvalidFragmentList, std::string(what) + " fragment " + std::to_string(i) + " ends before it starts");
    }
    if (i > 0 && list[i].start <= list[i - 1].end) {
      throw Error(ErrorKind::InvalidFragmentList,
                  std::string(what) + " fragments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " are unordered or overlapping");
    }
  }
}

// Each prediction, in order, takes the overlapping ground-truth fragment with the highest IoU
// (earliest on ties) at or after the last matched one. Several predictions may share one
// ground-truth fragment.
inline std::vector<FragmentMatch> match_fragments(const std::vector<Interval>& preds,
                                                  const std::vector<Interval>& gts) {
  check_fragment_list(preds, "predicted");
  check_fragment_list(gts, "ground-truth");
  std::vector<FragmentMatch> matches;
  std::size_t from = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    while (from < gts.size() && gts[from].end < preds[i].start) ++from;
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t j = from; j < gts.size() && gts[j].start <= preds[i].end; ++j) {
      const double v = fragment_iou(preds[i], gts[j]);
      if (v > best_iou) {
        best_iou = v;
        best = j;
      }
    }
    if (!best) continue;
    matches.push_back(FragmentMatch{i, *best, best_iou, time_offset(preds[i], gts[*best]), true});
    from = *best;
  }
  return matches;
}

inline std::vector<FragmentMatch> match_steps(const std::vector<CodingStep>& preds,
                                              const std::vector<CodingStep>& gts) {
  std::vector<Interval> r, g;
  for (const auto& s : preds) r.push_back(interval_of(s));
  for (const auto& s : gts) g.push_back(interval_of(s));
  auto matches = match_fragments(r, g);
  for (auto& m : matches) m.type_agrees = preds[m.pred].type == gts[m.gt].type;
  return matches;
}

// ---- criteria and scores -------------------------------------------------------------------

struct Criterion {
  enum class Kind { Iou, Offset } kind = Kind::Iou;
  double tau = 0.0;
  // IoU: exact means iou == 1.0 instead of iou > tau. Offset: exact means offset == 0.
  bool exact = false;

  bool holds(const FragmentMatch& m) const {
    if (kind == Kind::Iou) return exact ? m.iou == 1.0 : m.iou > tau;
    return exact ? m.time_offset == 0 : static_cast<double>(m.time_offset) <= tau;
  }

  std::string label() const {
    if (exact) return kind == Kind::Iou ? "=1.0" : "=0";
    std::ostringstream os;
    os << (kind == Kind::Iou ? ">" : "<=") << tau;
    return os.str();
  }

  static Criterion iou(double tau) {
    if (tau < 0.0 || tau > 1.0) throw Error(ErrorKind::ParamError, "IoU threshold must be in [0,1]");
    return Criterion{Kind::Iou, tau, tau == 1.0};
  }
  static Criterion offset(double tau) {
    if (tau < 0.0) throw Error(ErrorKind::ParamError, "offset threshold must be >= 0");
    return Criterion{Kind::Offset, tau, tau == 0.0};
  }
};

inline std::vector<double> default_iou_sweep() { return {0.0, 0.3, 0.5, 0.7, 0.9, 1.0}; }
inline std::vector<double> default_offset_sweep() { return {0.0, 1.0, 3.0, 5.0, 7.0, 9.0}; }

struct Counts {
  std::size_t correct = 0;     // predictions judged correct
  std::size_t predicted = 0;
  std::size_t gt_covered = 0;  // distinct ground-truth steps with at least one correct match
  std::size_t gt = 0;

  Counts& operator+=(const Counts& o) {
    correct += o.correct;
    predicted += o.predicted;
    gt_covered += o.gt_covered;
    gt += o.gt;
    return *this;
  }
};

struct Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Score score_from_counts(const Counts& c) {
  if (c.predicted == 0 && c.gt == 0) return Score{1.0, 1.0, 1.0};
  Score s;
  s.precision = c.predicted == 0 ? 0.0 : static_cast<double>(c.correct) / static_cast<double>(c.predicted);
  s.recall = c.gt == 0 ? 0.0 : static_cast<double>(c.gt_covered) / static_cast<double>(c.gt);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

inline Counts count_correct(const std::vector<FragmentMatch>& matches, std::size_t n_pred, std::size_t n_gt,
                            const Criterion& criterion, bool type_check = true) {
  Counts c;
  c.predicted = n_pred;
  c.gt = n_gt;
  std::set<std::size_t> covered;
  for (const auto& m : matches) {
    if (!criterion.holds(m) || (type_check && !m.type_agrees)) continue;
    ++c.correct;
    covered.insert(m.gt);
  }
  c.gt_covered = covered.size();
  return c;
}

inline Score score(const std::vector<FragmentMatch>& matches, std::size_t n_pred, std::size_t n_gt,
                   const Criterion& criterion, bool type_check = true) {
  return score_from_counts(count_correct(matches, n_pred, n_gt, criterion, type_check));
}

// ---- trailer statistics --------------------------------------------------------------------

struct TrailerStats {
  std::size_t total_frames = 0;
  std::size_t extracted_frames = 0;
  std::size_t gt_frames = 0;
  std::size_t common_frames = 0;
  std::size_t union_frames = 0;

  double extracted_coverage() const { return ratio(extracted_frames, total_frames); }
  double gt_coverage() const { return ratio(gt_frames, total_frames); }
  double trailer_iou() const { return union_frames == 0 ? 1.0 : ratio(common_frames, union_frames); }
  double false_positive_rate() const { return ratio(extracted_frames - common_frames, extracted_frames); }
  double false_negative_rate() const { return ratio(gt_frames - common_frames, gt_frames); }

  TrailerStats& operator+=(const TrailerStats& o) {
    total_frames += o.total_frames;
    extracted_frames += o.extracted_frames;
    gt_frames += o.gt_frames;
    common_frames += o.common_frames;
    union_frames += o.union_frames;
    return *this;
  }

 private:
  static double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  }
};

inline std::set<std::size_t> frame_set(const std::vector<CodingStep>& steps) {
  std::set<std::size_t> frames;
  for (const auto& s : steps)
    for (std::size_t f = s.start_frame; f <= s.end_frame; ++f) frames.insert(f);
  return frames;
}

inline TrailerStats trailer_stats(const std::vector<CodingStep>& steps, const std::vector<CodingStep>& gt,
                                  std::size_t total_frames) {
  const auto e = frame_set(steps);
  const auto g = frame_set(gt);
  TrailerStats t;
  t.total_frames = total_frames;
  t.extracted_frames = e.size();
  t.gt_frames = g.size();
  for (std::size_t f : e) t.common_frames += g.count(f);
  t.union_frames = t.extracted_frames + t.gt_frames - t.common_frames;
  return t;
}

struct LengthStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::size_t short_count = 0;  // steps of at most kShortStepFrames frames

  static constexpr std::size_t kShortStepFrames = 5;
  double short_share() const { return count == 0 ? 0.0 : static_cast<double>(short_count) / static_cast<double>(count); }
};

inline LengthStats length_stats(const std::vector<CodingStep>& steps) {
  LengthStats s;
  s.count = steps.size();
  if (steps.empty()) return s;
  double sum = 0.0;
  for (const auto& st : steps) {
    sum += static_cast<double>(st.length());
    if (st.length() <= LengthStats::kShortStepFrames) ++s.short_count;
  }
  s.mean = sum / static_cast<double>(s.count);
  double sq = 0.0;
  for (const auto& st : steps) sq += (static_cast<double>(st.length()) - s.mean) * (static_cast<double>(st.length()) - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

// ---- reports -------------------------------------------------------------------------------

struct SweepRow {
  Criterion criterion;
  Counts counts;
  Score score;
};

struct SourceMatch {
  std::string source_id;
  FragmentMatch match;
};

struct EvaluationReport {
  std::vector<SweepRow> iou_rows;
  std::vector<SweepRow> offset_rows;
  std::vector<SourceMatch> matches;
  TrailerStats trailer;
  LengthStats predicted_lengths;
  LengthStats gt_lengths;
  bool type_check = true;
};

struct EvaluationConfig {
  std::vector<double> iou_sweep = default_iou_sweep();
  std::vector<double> offset_sweep = default_offset_sweep();
  bool type_check = true;
  // Frames per source for coverage; sources not listed use max end frame + 1 over both lists.
  std::map<std::string, std::size_t> total_frames;
};

inline std::map<std::string, std::vector<CodingStep>> by_source(const std::vector<CodingStep>& steps) {
  std::map<std::string, std::vector<CodingStep>> out;
  for (const auto& s : steps) out[s.source_id].push_back(s);
  for (auto& [id, list] : out)
    std::stable_sort(list.begin(), list.end(),
                     [](const CodingStep& a, const CodingStep& b) { return a.start_frame < b.start_frame; });
  return out;
}

inline EvaluationReport evaluate(const std::vector<CodingStep>& preds, const std::vector<CodingStep>& gts,
                                 const EvaluationConfig& config = {}) {
  std::vector<Criterion> iou_criteria, offset_criteria;
  for (double t : config.iou_sweep) iou_criteria.push_back(Criterion::iou(t));
  for (double t : config.offset_sweep) offset_criteria.push_back(Criterion::offset(t));

  EvaluationReport report;
  report.type_check = config.type_check;
  std::vector<Counts> iou_counts(iou_criteria.size()), offset_counts(offset_criteria.size());

  const auto pred_by = by_source(preds);
  const auto gt_by = by_source(gts);
  std::set<std::string> sources;
  for (const auto& [id, _] : pred_by) sources.insert(id);
  for (const auto& [id, _] : gt_by) sources.insert(id);

  static const std::vector<CodingStep> kNone;
  for (const auto& id : sources) {
    const auto& p = pred_by.contains(id) ? pred_by.at(id) : kNone;
    const auto& g = gt_by.contains(id) ? gt_by.at(id) : kNone;
    const auto matches = match_steps(p, g);
    for (const auto& m : matches) report.matches.push_back(SourceMatch{id, m});
    for (std::size_t k = 0; k < iou_criteria.size(); ++k)
      iou_counts[k] += count_correct(matches, p.size(), g.size(), iou_criteria[k], config.type_check);
    for (std::size_t k = 0; k < offset_criteria.size(); ++k)
      offset_counts[k] += count_correct(matches, p.size(), g.size(), offset_criteria[k], config.type_check);

    std::size_t total = 0;
    if (auto it = config.total_frames.find(id); it != config.total_frames.end()) {
      total = it->second;
    } else {
      for (const auto& s : p) total = std::max(total, s.end_frame + 1);
      for (const auto& s : g) total = std::max(total, s.end_frame + 1);
    }
    report.trailer += trailer_stats(p, g, total);
  }
  for (std::size_t k = 0; k < iou_criteria.size(); ++k)
    report.iou_rows.push_back(SweepRow{iou_criteria[k], iou_counts[k], score_from_counts(iou_counts[k])});
  for (std::size_t k = 0; k < offset_criteria.size(); ++k)
    report.offset_rows.push_back(
        SweepRow{offset_criteria[k], offset_counts[k], score_from_counts(offset_counts[k])});
  report.predicted_lengths = length_stats(preds);
  report.gt_lengths = length_stats(gts);
  return report;
}

inline nlohmann::json to_json(const SweepRow& row) {
  return nlohmann::json{{"threshold", row.criterion.label()}, {"tau", row.criterion.tau},
                        {"exact", row.criterion.exact},       {"precision", row.score.precision},
                        {"recall", row.score.recall},         {"f1", row.score.f1},
                        {"correct", row.counts.correct},      {"predicted", row.counts.predicted},
                        {"gt_matched", row.counts.gt_covered}, {"gt", row.counts.gt}};
}

inline nlohmann::json to_json(const LengthStats& s) {
  return nlohmann::json{{"count", s.count}, {"mean", s.mean}, {"std", s.stddev},
                        {"short_count", s.short_count}, {"short_share", s.short_share()}};
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["type_check"] = r.type_check;
  j["iou"] = nlohmann::json::array();
  for (const auto& row : r.iou_rows) j["iou"].push_back(to_json(row));
  j["offset"] = nlohmann::json::array();
  for (const auto& row : r.offset_rows) j["offset"].push_back(to_json(row));
  j["matches"] = nlohmann::json::array();
  for (const auto& m : r.matches) {
    j["matches"].push_back({{"source_id", m.source_id},
                            {"pred", m.match.pred},
                            {"gt", m.match.gt},
                            {"iou", m.match.iou},
                            {"time_offset", m.match.time_offset},
                            {"type_agrees", m.match.type_agrees}});
  }
  const auto& t = r.trailer;
  j["trailer"] = {{"total_frames", t.total_frames},
                  {"extracted_frames", t.extracted_frames},
                  {"gt_frames", t.gt_frames},
                  {"common_frames", t.common_frames},
                  {"union_frames", t.union_frames},
                  {"extracted_coverage", t.extracted_coverage()},
                  {"gt_coverage", t.gt_coverage()},
                  {"trailer_iou", t.trailer_iou()},
                  {"false_positive_rate", t.false_positive_rate()},
                  {"false_negative_rate", t.false_negative_rate()}};
  j["lengths"] = {{"predicted", to_json(r.predicted_lengths)}, {"gt", to_json(r.gt_lengths)}};
  return j;
}

// Table with the IoU sweep on the left and the time-offset sweep on the right, row by row.
inline std::string format_sweep_table(const nlohmann::json& report) {
  std::ostringstream os;
  auto cell = [&](const std::string& s, int w) { os << std::left << std::setw(w) << s; };
  auto num = [](double v) {
    std::ostringstream n;
    n << std::fixed << std::setprecision(3) << v;
    return n.str();
  };
  cell("IoU", 7); cell("Prec", 7); cell("Reca", 7); cell("F1", 7); os << "| ";
  cell("TO", 7); cell("Prec", 7); cell("Reca", 7); os << "F1\n";
  const auto& iou = report.at("iou");
  const auto& off = report.at("offset");
  const std::size_t n = std::max(iou.size(), off.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < iou.size()) {
      cell(iou[i].at("threshold").get<std::string>(), 7);
      cell(num(iou[i].at("precision").get<double>()), 7);
      cell(num(iou[i].at("recall").get<double>()), 7);
      cell(num(iou[i].at("f1").get<double>()), 7);
    } else {
      cell("", 28);
    }
    os << "| ";
    if (i < off.size()) {
      cell(off[i].at("threshold").get<std::string>(), 7);
      cell(num(off[i].at("precision").get<double>()), 7);
      cell(num(off[i].at("recall").get<double>()), 7);
      os << num(off[i].at("f1").get<double>());
    }
    os << '\n';
  }
  return os.str();
}

inline std::string format_summary(const nlohmann::json& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  const auto& t = report.at("trailer");
  os << "trailer: extracted coverage " << t.at("extracted_coverage").get<double>() << ", gt coverage "
     << t.at("gt_coverage").get<double>() << ", IoU " << t.at("trailer_iou").get<double>() << ", FP "
     << t.at("false_positive_rate").get<double>() << ", FN " << t.at("false_negative_rate").get<double>()
     << '\n';
  for (const char* side : {"predicted", "gt"}) {
    const auto& l = report.at("lengths").at(side);
    os << side << " steps: " << l.at("count").get<std::size_t>() << ", length "
       << std::setprecision(2) << l.at("mean").get<double>() << " +- " << l.at("std").get<double>()
       << " frames, <=5 frames " << std::setprecision(3) << l.at("short_share").get<double>() << '\n';
  }
  return os.str();
}

}  // namespace seeflow
