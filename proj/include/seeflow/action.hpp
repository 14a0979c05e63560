#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seeflow/change_detection.hpp"
#include "seeflow/error.hpp"
#include "seeflow/frame.hpp"

namespace seeflow {

struct TextLine;

// Primitive HCI actions between two consecutive frames.
enum class ActionType {
  MoveCursor,
  MoveMouseEditable,
  MoveMouseNonEditable,
  EnterChars,
  DeleteChars,
  SelectChars,
  ScrollContent,
  TriggerOrLeavePopup,
  SwitchWindows,
  OtherAction,
};

inline constexpr std::array<ActionType, 10> kAllActionTypes = {
    ActionType::MoveCursor,    ActionType::MoveMouseEditable,   ActionType::MoveMouseNonEditable,
    ActionType::EnterChars,    ActionType::DeleteChars,         ActionType::SelectChars,
    ActionType::ScrollContent, ActionType::TriggerOrLeavePopup, ActionType::SwitchWindows,
    ActionType::OtherAction,
};

enum class ActionCategory { Skip, CodingRelated, NonCoding };

constexpr ActionCategory category_of(ActionType action) {
  switch (action) {
    case ActionType::MoveCursor:
    case ActionType::MoveMouseEditable:
    case ActionType::MoveMouseNonEditable:
      return ActionCategory::Skip;
    case ActionType::EnterChars:
    case ActionType::DeleteChars:
    case ActionType::SelectChars:
      return ActionCategory::CodingRelated;
    case ActionType::ScrollContent:
    case ActionType::TriggerOrLeavePopup:
    case ActionType::SwitchWindows:
    case ActionType::OtherAction:
      return ActionCategory::NonCoding;
  }
  return ActionCategory::NonCoding;
}

// Scrolls do not end an aggregation when the active line survives them.
constexpr bool is_bridgeable(ActionType action) { return action == ActionType::ScrollContent; }

constexpr std::string_view action_name(ActionType action) {
  switch (action) {
    case ActionType::MoveCursor: return "move_cursor";
    case ActionType::MoveMouseEditable: return "move_mouse_editable";
    case ActionType::MoveMouseNonEditable: return "move_mouse_non_editable";
    case ActionType::EnterChars: return "enter_chars";
    case ActionType::DeleteChars: return "delete_chars";
    case ActionType::SelectChars: return "select_chars";
    case ActionType::ScrollContent: return "scroll_content";
    case ActionType::TriggerOrLeavePopup: return "trigger_or_leave_popup";
    case ActionType::SwitchWindows: return "switch_windows";
    case ActionType::OtherAction: return "other_action";
  }
  return "other_action";
}

inline std::optional<ActionType> parse_action_name(std::string_view name) {
  for (ActionType a : kAllActionTypes)
    if (action_name(a) == name) return a;
  return std::nullopt;
}

struct ActionEvent {
  ActionType action = ActionType::OtherAction;
  ChangeRegion region;
  std::size_t frame_a_index = 0;
  std::size_t frame_b_index = 0;

  friend bool operator==(const ActionEvent&, const ActionEvent&) = default;
};

// A label read from an actions.jsonl sidecar; the region is recomputed from pixels.
struct ActionLabel {
  std::size_t frame_a = 0;
  std::size_t frame_b = 0;
  ActionType action = ActionType::OtherAction;

  friend bool operator==(const ActionLabel&, const ActionLabel&) = default;
};

inline std::vector<ActionLabel> parse_action_labels(std::istream& in, const std::string& origin) {
  std::vector<ActionLabel> labels;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SidecarFormat, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("frame_a") || !j.contains("frame_b") ||
        !j.contains("action") || !j["frame_a"].is_number_unsigned() ||
        !j["frame_b"].is_number_unsigned() || !j["action"].is_string()) {
      throw Error(ErrorKind::SidecarFormat, where + ": expected {frame_a, frame_b, action}");
    }
    ActionLabel label;
    label.frame_a = j["frame_a"].get<std::size_t>();
    label.frame_b = j["frame_b"].get<std::size_t>();
    if (label.frame_b != label.frame_a + 1) {
      throw Error(ErrorKind::SidecarFormat, where + ": frame_b must equal frame_a + 1");
    }
    const auto name = j["action"].get<std::string>();
    const auto action = parse_action_name(name);
    if (!action) throw Error(ErrorKind::UnknownAction, where + ": unknown action \"" + name + "\"");
    label.action = *action;
    if (!seen.emplace(label.frame_a, label.frame_b).second) {
      throw Error(ErrorKind::DuplicateEvent, where + ": pair (" + std::to_string(label.frame_a) +
                                                 "," + std::to_string(label.frame_b) +
                                                 ") listed twice");
    }
    labels.push_back(label);
  }
  std::sort(labels.begin(), labels.end(),
            [](const ActionLabel& a, const ActionLabel& b) { return a.frame_a < b.frame_a; });
  return labels;
}

inline std::vector<ActionLabel> load_action_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SidecarFormat, "cannot open " + path.string());
  return parse_action_labels(in, path.string());
}

inline void write_action_labels(std::ostream& out, const std::vector<ActionLabel>& labels) {
  for (const auto& l : labels) {
    nlohmann::json j{{"frame_a", l.frame_a}, {"frame_b", l.frame_b},
                     {"action", std::string(action_name(l.action))}};
    out << j.dump() << '\n';
  }
}

// Events carry an empty region; the pipeline attaches regions computed from pixels.
inline std::vector<ActionEvent> load_precomputed_actions(const std::filesystem::path& path) {
  std::vector<ActionEvent> events;
  for (const auto& l : load_action_labels(path)) {
    ActionEvent e;
    e.action = l.action;
    e.frame_a_index = l.frame_a;
    e.frame_b_index = l.frame_b;
    e.region.frame_a_index = l.frame_a;
    e.region.frame_b_index = l.frame_b;
    events.push_back(e);
  }
  return events;
}

// Perception context handed to a recognizer alongside the pixels.
struct ActionContext {
  const std::vector<TextLine>* lines_a = nullptr;
  const std::vector<TextLine>* lines_b = nullptr;
};

// Recognizer contract. nullopt means the backend reports no action for the pair.
class ActionBackend {
 public:
  virtual ~ActionBackend() = default;
  virtual std::optional<ActionType> recognize(const Frame& a, const Frame& b,
                                              const ChangeRegion& region,
                                              const ActionContext& context) const = 0;
};

// Echoes labels from a sidecar (synthesizer oracle or an external recognizer's output).
class PrecomputedActionBackend final : public ActionBackend {
 public:
  explicit PrecomputedActionBackend(const std::vector<ActionLabel>& labels) {
    for (const auto& l : labels) by_pair_.emplace(l.frame_a, l.action);
  }

  std::optional<ActionType> recognize(const Frame& a, const Frame&, const ChangeRegion&,
                                      const ActionContext&) const override {
    auto it = by_pair_.find(a.index());
    if (it == by_pair_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::size_t, ActionType> by_pair_;
};

}  // namespace seeflow
