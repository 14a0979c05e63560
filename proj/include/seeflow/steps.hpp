#pragma once

// Coding-step identification: active-line location by vertical overlap and aggregation of
// continual coding-related actions into line-granularity steps.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "seeflow/action.hpp"
#include "seeflow/error.hpp"
#include "seeflow/geometry.hpp"
#include "seeflow/text.hpp"

namespace seeflow {

enum class StepType { EnterText, DeleteText, EditText, SelectText };

constexpr std::string_view step_type_name(StepType t) {
  switch (t) {
    case StepType::EnterText: return "enter";
    case StepType::DeleteText: return "delete";
    case StepType::EditText: return "edit";
    case StepType::SelectText: return "select";
  }
  return "edit";
}

inline std::optional<StepType> parse_step_type(std::string_view name) {
  for (StepType t : {StepType::EnterText, StepType::DeleteText, StepType::EditText, StepType::SelectText})
    if (step_type_name(t) == name) return t;
  return std::nullopt;
}

struct CodingStep {
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;  // inclusive
  double start_time_s = 0.0;
  double end_time_s = 0.0;
  StepType type = StepType::EditText;
  std::string text;
  std::string source_id;

  std::size_t length() const { return end_frame - start_frame + 1; }
  friend bool operator==(const CodingStep&, const CodingStep&) = default;
};

// ---- vertical overlap ----------------------------------------------------------------------

inline constexpr double kDefaultVoThreshold = 0.75;

// |R ∩ L| / |R ∪ L| over vertical extents. The union is the covering interval when the spans
// overlap or touch and the summed lengths when they are disjoint.
inline double vertical_overlap(Span region, Span lines) {
  if (region.y1 >= region.y2 || lines.y1 >= lines.y2) {
    throw Error(ErrorKind::InvalidSpan, "span [" + std::to_string(region.y1) + "," + std::to_string(region.y2) +
                                            "] vs [" + std::to_string(lines.y1) + "," +
                                            std::to_string(lines.y2) + "] is degenerate");
  }
  const int inter = std::min(region.y2, lines.y2) - std::max(region.y1, lines.y1);
  if (inter < 0) return 0.0;
  const int uni = std::max(region.y2, lines.y2) - std::min(region.y1, lines.y1);
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct ActiveLines {
  std::size_t first = 0;  // ordinals [first, last], contiguous
  std::size_t last = 0;
  double overlap_ratio = 0.0;

  std::size_t count() const { return last - first + 1; }
  friend bool operator==(const ActiveLines&, const ActiveLines&) = default;
};

inline Span run_span(const std::vector<TextLine>& lines, std::size_t first, std::size_t last) {
  Span s{lines[first].box.y1, lines[first].box.y2};
  for (std::size_t k = first + 1; k <= last; ++k) {
    s.y1 = std::min(s.y1, lines[k].box.y1);
    s.y2 = std::max(s.y2, lines[k].box.y2);
  }
  return s;
}

// Scans every run of consecutive lines; keeps the best vo, ties going to the topmost start and
// then the shorter run. Absent unless the best vo exceeds `threshold`.
inline std::optional<ActiveLines> locate_active_lines(const Rect& region,
                                                      const std::vector<TextLine>& lines,
                                                      double threshold = kDefaultVoThreshold) {
  std::optional<ActiveLines> best;
  const Span r = vertical_span(region);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i; j < lines.size(); ++j) {
      const double vo = vertical_overlap(r, run_span(lines, i, j));
      if (!best || vo > best->overlap_ratio) best = ActiveLines{i, j, vo};
    }
  }
  if (!best || !(best->overlap_ratio > threshold)) return std::nullopt;
  return best;
}

// ---- identification ------------------------------------------------------------------------

struct StepConfig {
  double vo_threshold = kDefaultVoThreshold;
  double line_match_threshold = kDefaultLineMatchThreshold;
  // Treat pop-up interactions like scrolls: keep aggregating when the active line survives.
  bool popup_bridge = false;
};

struct SequenceInfo {
  std::size_t frame_count = 0;
  double fps = 1.0;
  std::string source_id;
};

// How each coding-related event was consumed, for accounting checks.
enum class EventFate { NotCoding, InStep, DroppedNoActiveLine, DroppedAtBoundary };

struct IdentificationResult {
  std::vector<CodingStep> steps;
  std::vector<EventFate> fates;  // parallel to the input events
};

namespace detail {

struct ActiveLine {
  std::size_t frame = 0;
  std::size_t ordinal = 0;
  Rect box;
  std::string text;
};

inline std::string trimmed(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string join_lines(const std::vector<TextLine>& lines, const ActiveLines& run) {
  std::string out;
  for (std::size_t k = run.first; k <= run.last; ++k) {
    if (k != run.first) out += '\n';
    out += lines[k].text;
  }
  return out;
}

class StepScanner {
 public:
  StepScanner(const SequenceInfo& info, const std::vector<ActionEvent>& events,
              const std::vector<std::vector<TextLine>>& lines, const StepConfig& config)
      : info_(info), events_(events), lines_(lines), config_(config) {}

  IdentificationResult run() {
    result_.fates.assign(events_.size(), EventFate::NotCoding);
    std::size_t k = 0;
    while (k < events_.size()) {
      const ActionEvent& ev = events_[k];
      if (ev.frame_a_index < resume_frame_) {
        if (category_of(ev.action) == ActionCategory::CodingRelated)
          result_.fates[k] = EventFate::DroppedAtBoundary;
        ++k;
        continue;
      }
      if (category_of(ev.action) != ActionCategory::CodingRelated) {
        ++k;
        continue;
      }
      k = start_step(k);
    }
    return std::move(result_);
  }

 private:
  const std::vector<TextLine>& lines_at(std::size_t frame) const {
    if (frame >= lines_.size()) {
      throw Error(ErrorKind::MissingLines, "no text lines extracted for frame " + std::to_string(frame));
    }
    return lines_[frame];
  }

  static std::size_t locate_frame(const ActionEvent& ev) {
    return ev.action == ActionType::DeleteChars ? ev.frame_a_index : ev.frame_b_index;
  }

  std::optional<ActiveLines> locate(const ActionEvent& ev, std::size_t frame) const {
    return locate_active_lines(ev.region.box, lines_at(frame), config_.vo_threshold);
  }

  ActiveLine make_active(std::size_t frame, std::size_t ordinal) const {
    const TextLine& l = lines_at(frame)[ordinal];
    return ActiveLine{frame, ordinal, l.box, l.text};
  }

  bool vo_match(const ActiveLine& prev, const ActiveLine& cur) const {
    return vertical_overlap(vertical_span(prev.box), vertical_span(cur.box)) > config_.vo_threshold;
  }

  // Same line across frames: paired by text matching, or vertically overlapping above the
  // threshold.
  bool lines_match(const ActiveLine& prev, const ActiveLine& cur) const {
    if (prev.frame == cur.frame) return prev.ordinal == cur.ordinal || vo_match(prev, cur);
    if (vo_match(prev, cur)) return true;
    const auto m = match_text_lines(lines_at(prev.frame), lines_at(cur.frame), config_.line_match_threshold);
    return m.contains(prev.ordinal, cur.ordinal);
  }

  // Follows the active line into a later frame with the same two matching routes.
  std::optional<ActiveLine> carry(const ActiveLine& line, std::size_t frame) const {
    if (line.frame == frame) return line;
    const auto& target = lines_at(frame);
    const auto m = match_text_lines(lines_at(line.frame), target, config_.line_match_threshold);
    if (auto b = m.partner_of_a(line.ordinal)) return make_active(frame, *b);
    for (std::size_t j = 0; j < target.size(); ++j) {
      const ActiveLine cand = make_active(frame, j);
      if (vo_match(line, cand)) return cand;
    }
    return std::nullopt;
  }

  // Text-only match across a content-moving event.
  std::optional<ActiveLine> follow_across(const ActiveLine& line, const ActionEvent& ev) const {
    const auto before = carry(line, ev.frame_a_index);
    if (!before) return std::nullopt;
    const auto m = match_text_lines(lines_at(before->frame), lines_at(ev.frame_b_index),
                                    config_.line_match_threshold);
    if (auto b = m.partner_of_a(before->ordinal)) return make_active(ev.frame_b_index, *b);
    return std::nullopt;
  }

  CodingStep make_step(std::size_t start, std::size_t end, StepType type, std::string text) const {
    CodingStep s;
    s.start_frame = start;
    s.end_frame = end;
    s.start_time_s = static_cast<double>(start) / info_.fps;
    s.end_time_s = static_cast<double>(end) / info_.fps;
    s.type = type;
    s.text = std::move(text);
    s.source_id = info_.source_id;
    return s;
  }

  void emit(CodingStep step) {
    if (step.end_frame < step.start_frame + 1) {
      throw Error(ErrorKind::InvariantViolation, "coding step shorter than two frames");
    }
    resume_frame_ = step.end_frame + 1;
    result_.steps.push_back(std::move(step));
  }

  // Handles the coding event at k; returns the index of the next event to examine.
  std::size_t start_step(std::size_t k) {
    const ActionEvent& first = events_[k];
    const std::size_t frame = locate_frame(first);
    const auto active = locate(first, frame);
    if (!active) {
      result_.fates[k] = EventFate::DroppedNoActiveLine;
      return k + 1;
    }
    if (active->count() > 1) {
      StepType type = StepType::EnterText;
      if (first.action == ActionType::SelectChars) type = StepType::SelectText;
      if (first.action == ActionType::DeleteChars) type = StepType::DeleteText;
      result_.fates[k] = EventFate::InStep;
      emit(make_step(first.frame_a_index, first.frame_b_index, type, join_lines(lines_at(frame), *active)));
      return k + 1;
    }

    result_.fates[k] = EventFate::InStep;
    ActiveLine current = make_active(frame, active->first);
    std::size_t last_coding = k;
    bool all_select = first.action == ActionType::SelectChars;
    std::string last_nonempty = trimmed(current.text);

    std::size_t j = k + 1;
    for (; j < events_.size(); ++j) {
      const ActionEvent& ev = events_[j];
      const ActionCategory cat = category_of(ev.action);
      if (cat == ActionCategory::Skip) continue;
      if (cat == ActionCategory::NonCoding) {
        const bool bridge = is_bridgeable(ev.action) ||
                            (config_.popup_bridge && ev.action == ActionType::TriggerOrLeavePopup);
        if (!bridge) break;
        auto moved = follow_across(current, ev);
        if (!moved) break;
        current = *moved;
        continue;
      }
      const std::size_t f = locate_frame(ev);
      const auto act = locate(ev, f);
      if (!act || act->count() != 1) break;
      const ActiveLine cand = make_active(f, act->first);
      if (!lines_match(current, cand)) break;
      current = cand;
      last_coding = j;
      all_select = all_select && ev.action == ActionType::SelectChars;
      if (!trimmed(current.text).empty()) last_nonempty = trimmed(current.text);
      result_.fates[j] = EventFate::InStep;
    }

    const ActionEvent& last = events_[last_coding];
    const std::size_t start = first.frame_a_index;
    const std::size_t end = last.frame_b_index;

    const auto start_run = locate(first, start);
    const bool start_empty =
        !start_run || trimmed(join_lines(lines_at(start), *start_run)).empty();
    const auto end_run = locate(last, end);
    const bool end_empty = !end_run || trimmed(join_lines(lines_at(end), *end_run)).empty();

    StepType type;
    std::string text;
    if (start_empty && end_empty) {
      // Typed and then erased within one aggregation.
      type = StepType::DeleteText;
      text = last_nonempty;
    } else if (start_empty) {
      type = StepType::EnterText;
      text = join_lines(lines_at(end), *end_run);
    } else if (end_empty) {
      type = StepType::DeleteText;
      text = join_lines(lines_at(start), *start_run);
    } else if (all_select) {
      type = StepType::SelectText;
      text = join_lines(lines_at(end), *end_run);
    } else {
      type = StepType::EditText;
      text = join_lines(lines_at(end), *end_run);
    }
    emit(make_step(start, end, type, std::move(text)));
    return j;
  }

  const SequenceInfo& info_;
  const std::vector<ActionEvent>& events_;
  const std::vector<std::vector<TextLine>>& lines_;
  StepConfig config_;
  std::size_t resume_frame_ = 0;
  IdentificationResult result_;
};

}  // namespace detail

// Events must be ordered by frame_a_index. lines[f] holds the text lines of frame f.
inline IdentificationResult identify_steps_detailed(const SequenceInfo& info,
                                                    const std::vector<ActionEvent>& events,
                                                    const std::vector<std::vector<TextLine>>& lines,
                                                    const StepConfig& config = {}) {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].frame_b_index != events[i].frame_a_index + 1) {
      throw Error(ErrorKind::InvariantViolation, "event " + std::to_string(i) + " does not span consecutive frames");
    }
    if (i > 0 && events[i].frame_a_index <= events[i - 1].frame_a_index) {
      throw Error(ErrorKind::InvariantViolation, "events are not strictly ordered by frame");
    }
  }
  return detail::StepScanner(info, events, lines, config).run();
}

inline std::vector<CodingStep> identify_steps(const SequenceInfo& info,
                                              const std::vector<ActionEvent>& events,
                                              const std::vector<std::vector<TextLine>>& lines,
                                              const StepConfig& config = {}) {
  return identify_steps_detailed(info, events, lines, config).steps;
}

// ---- steps.jsonl / gt.jsonl ----------------------------------------------------------------

inline nlohmann::json step_to_json(const CodingStep& s) {
  return nlohmann::json{{"source_id", s.source_id},     {"start_frame", s.start_frame},
                        {"end_frame", s.end_frame},     {"start_s", s.start_time_s},
                        {"end_s", s.end_time_s},        {"type", std::string(step_type_name(s.type))},
                        {"text", s.text}};
}

inline void write_steps(std::ostream& out, const std::vector<CodingStep>& steps,
                        std::optional<std::string> provenance = std::nullopt) {
  for (const auto& s : steps) {
    auto j = step_to_json(s);
    if (provenance) j["provenance"] = *provenance;
    out << j.dump() << '\n';
  }
}

inline void write_steps_file(const std::filesystem::path& path, const std::vector<CodingStep>& steps,
                             std::optional<std::string> provenance = std::nullopt) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_steps(out, steps, std::move(provenance));
}

inline std::vector<CodingStep> parse_steps(std::istream& in, const std::string& origin) {
  std::vector<CodingStep> steps;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      CodingStep s;
      s.source_id = j.at("source_id").get<std::string>();
      s.start_frame = j.at("start_frame").get<std::size_t>();
      s.end_frame = j.at("end_frame").get<std::size_t>();
      s.start_time_s = j.value("start_s", static_cast<double>(s.start_frame));
      s.end_time_s = j.value("end_s", static_cast<double>(s.end_frame));
      const auto type = parse_step_type(j.at("type").get<std::string>());
      if (!type) throw Error(ErrorKind::SidecarFormat, where + ": unknown step type");
      s.type = *type;
      s.text = j.value("text", std::string{});
      if (s.end_frame < s.start_frame) throw Error(ErrorKind::SidecarFormat, where + ": end_frame < start_frame");
      steps.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SidecarFormat, where + ": " + e.what());
    }
  }
  return steps;
}

inline std::vector<CodingStep> load_steps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SidecarFormat, "cannot open " + path.string());
  return parse_steps(in, path.string());
}

}  // namespace seeflow
