#pragma once

// Synthetic screencasts: editing-session scripts rendered to frames in the built-in font, with
// exact ground-truth steps and oracle perception sidecars (actions.jsonl, text.jsonl).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "seeflow/action.hpp"
#include "seeflow/change_detection.hpp"
#include "seeflow/error.hpp"
#include "seeflow/font.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/frame_io.hpp"
#include "seeflow/layout.hpp"
#include "seeflow/steps.hpp"
#include "seeflow/text.hpp"
#include "seeflow/text_backend.hpp"

namespace seeflow {

// ---- scripts -------------------------------------------------------------------------------

struct CellRect {
  int row = 0;
  int col = 0;
  int rows = 1;
  int cols = 1;

  friend bool operator==(const CellRect&, const CellRect&) = default;
};

enum class ScriptEventKind { TypeChar, DeleteChar, SelectLines, Deselect, Scroll, SwitchWindow, Popup, Idle };

struct ScriptEvent {
  ScriptEventKind kind = ScriptEventKind::Idle;
  int line = 0;  // type_char, delete_char
  int col = 0;
  char ch = ' ';
  int first = 0;  // select_lines
  int last = 0;
  int lines = 0;  // scroll amount; positive moves the view down the buffer
  std::vector<std::string> buffer;  // switch_window
  bool show = true;                 // popup
  CellRect rect;

  static ScriptEvent type_char(int line, int col, char ch) {
    ScriptEvent e;
    e.kind = ScriptEventKind::TypeChar;
    e.line = line, e.col = col, e.ch = ch;
    return e;
  }
  static ScriptEvent delete_char(int line, int col) {
    ScriptEvent e;
    e.kind = ScriptEventKind::DeleteChar;
    e.line = line, e.col = col;
    return e;
  }
  static ScriptEvent select_lines(int first, int last) {
    ScriptEvent e;
    e.kind = ScriptEventKind::SelectLines;
    e.first = first, e.last = last;
    return e;
  }
  static ScriptEvent deselect() {
    ScriptEvent e;
    e.kind = ScriptEventKind::Deselect;
    return e;
  }
  static ScriptEvent scroll(int lines) {
    ScriptEvent e;
    e.kind = ScriptEventKind::Scroll;
    e.lines = lines;
    return e;
  }
  static ScriptEvent switch_window(std::vector<std::string> buffer) {
    ScriptEvent e;
    e.kind = ScriptEventKind::SwitchWindow;
    e.buffer = std::move(buffer);
    return e;
  }
  static ScriptEvent popup_show(CellRect rect) {
    ScriptEvent e;
    e.kind = ScriptEventKind::Popup;
    e.show = true, e.rect = rect;
    return e;
  }
  static ScriptEvent popup_hide() {
    ScriptEvent e;
    e.kind = ScriptEventKind::Popup;
    e.show = false;
    return e;
  }
  static ScriptEvent idle() { return ScriptEvent{}; }

  friend bool operator==(const ScriptEvent&, const ScriptEvent&) = default;
};

struct SessionScript {
  std::string source_id = "synth";
  double fps = 1.0;
  int width = 640;
  int height = 480;
  int cell_width = 8;
  int cell_height = 16;
  // Initial buffer; nullopt means one empty line per visible row.
  std::optional<std::vector<std::string>> buffer;
  std::vector<ScriptEvent> events;

  ScreenLayout layout() const { return ScreenLayout::make(width, height, cell_width, cell_height); }
  std::vector<std::string> initial_buffer() const {
    if (buffer) return *buffer;
    return std::vector<std::string>(static_cast<std::size_t>(layout().rows));
  }
};

inline const char* script_event_name(ScriptEventKind k) {
  switch (k) {
    case ScriptEventKind::TypeChar: return "type_char";
    case ScriptEventKind::DeleteChar: return "delete_char";
    case ScriptEventKind::SelectLines: return "select_lines";
    case ScriptEventKind::Deselect: return "deselect";
    case ScriptEventKind::Scroll: return "scroll";
    case ScriptEventKind::SwitchWindow: return "switch_window";
    case ScriptEventKind::Popup: return "popup";
    case ScriptEventKind::Idle: return "idle";
  }
  return "idle";
}

// Scripted event → recognizer label. nullopt for idle.
inline std::optional<ActionType> scripted_action(ScriptEventKind k) {
  switch (k) {
    case ScriptEventKind::TypeChar: return ActionType::EnterChars;
    case ScriptEventKind::DeleteChar: return ActionType::DeleteChars;
    case ScriptEventKind::SelectLines: return ActionType::SelectChars;
    case ScriptEventKind::Deselect: return ActionType::OtherAction;
    case ScriptEventKind::Scroll: return ActionType::ScrollContent;
    case ScriptEventKind::SwitchWindow: return ActionType::SwitchWindows;
    case ScriptEventKind::Popup: return ActionType::TriggerOrLeavePopup;
    case ScriptEventKind::Idle: return std::nullopt;
  }
  return std::nullopt;
}

inline nlohmann::json to_json(const ScriptEvent& e) {
  nlohmann::json j{{"type", script_event_name(e.kind)}};
  switch (e.kind) {
    case ScriptEventKind::TypeChar:
      j["line"] = e.line, j["col"] = e.col, j["ch"] = std::string(1, e.ch);
      break;
    case ScriptEventKind::DeleteChar:
      j["line"] = e.line, j["col"] = e.col;
      break;
    case ScriptEventKind::SelectLines:
      j["first"] = e.first, j["last"] = e.last;
      break;
    case ScriptEventKind::Scroll:
      j["lines"] = e.lines;
      break;
    case ScriptEventKind::SwitchWindow:
      j["buffer"] = e.buffer;
      break;
    case ScriptEventKind::Popup:
      j["action"] = e.show ? "show" : "hide";
      if (e.show) j["rect"] = {{"row", e.rect.row}, {"col", e.rect.col}, {"rows", e.rect.rows}, {"cols", e.rect.cols}};
      break;
    default:
      break;
  }
  return j;
}

inline nlohmann::json to_json(const SessionScript& s) {
  nlohmann::json j{{"source_id", s.source_id},
                   {"fps", s.fps},
                   {"canvas", {{"width", s.width}, {"height", s.height}}},
                   {"cell", {{"width", s.cell_width}, {"height", s.cell_height}}}};
  if (s.buffer) j["buffer"] = *s.buffer;
  j["events"] = nlohmann::json::array();
  for (const auto& e : s.events) j["events"].push_back(to_json(e));
  return j;
}

inline ScriptEvent parse_script_event(const nlohmann::json& j, std::size_t index) {
  const std::string where = "event " + std::to_string(index);
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "type_char") {
      const auto ch = j.at("ch").get<std::string>();
      if (ch.size() != 1) throw Error(ErrorKind::ScriptError, where + ": ch must be a single character");
      return ScriptEvent::type_char(j.at("line").get<int>(), j.at("col").get<int>(), ch[0]);
    }
    if (type == "delete_char") return ScriptEvent::delete_char(j.at("line").get<int>(), j.at("col").get<int>());
    if (type == "select_lines") return ScriptEvent::select_lines(j.at("first").get<int>(), j.at("last").get<int>());
    if (type == "deselect") return ScriptEvent::deselect();
    if (type == "scroll") return ScriptEvent::scroll(j.at("lines").get<int>());
    if (type == "switch_window") return ScriptEvent::switch_window(j.at("buffer").get<std::vector<std::string>>());
    if (type == "popup") {
      const auto action = j.at("action").get<std::string>();
      if (action == "hide") return ScriptEvent::popup_hide();
      if (action != "show") throw Error(ErrorKind::ScriptError, where + ": popup action must be show or hide");
      const auto& r = j.at("rect");
      return ScriptEvent::popup_show(
          CellRect{r.at("row").get<int>(), r.at("col").get<int>(), r.at("rows").get<int>(), r.at("cols").get<int>()});
    }
    if (type == "idle") return ScriptEvent::idle();
    throw Error(ErrorKind::ScriptError, where + ": unknown event type \"" + type + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ScriptError, where + ": " + e.what());
  }
}

inline SessionScript parse_script(const nlohmann::json& j) {
  SessionScript s;
  try {
    s.source_id = j.value("source_id", s.source_id);
    s.fps = j.value("fps", s.fps);
    if (j.contains("canvas")) {
      s.width = j["canvas"].at("width").get<int>();
      s.height = j["canvas"].at("height").get<int>();
    }
    if (j.contains("cell")) {
      s.cell_width = j["cell"].at("width").get<int>();
      s.cell_height = j["cell"].at("height").get<int>();
    }
    if (j.contains("buffer")) s.buffer = j["buffer"].get<std::vector<std::string>>();
    const auto& events = j.at("events");
    for (std::size_t i = 0; i < events.size(); ++i) s.events.push_back(parse_script_event(events[i], i));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ScriptError, std::string("script: ") + e.what());
  }
  return s;
}

inline SessionScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return parse_script(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ScriptError, path.string() + ": " + e.what());
  }
}

// ---- editor state --------------------------------------------------------------------------

struct EditorState {
  std::size_t window = 0;
  std::vector<std::string> buffer;
  int scroll = 0;  // buffer line shown in the top grid row
  std::optional<std::pair<int, int>> selection;  // inclusive buffer line range
  std::optional<CellRect> popup;

  // Buffer line shown in grid row `row`, if any.
  std::optional<int> line_at_row(int row) const {
    const int line = scroll + row;
    if (line < 0 || line >= static_cast<int>(buffer.size())) return std::nullopt;
    return line;
  }
  std::optional<int> row_of(int line, const ScreenLayout& layout) const {
    const int row = line - scroll;
    if (row < 0 || row >= layout.rows || line >= static_cast<int>(buffer.size())) return std::nullopt;
    return row;
  }
  bool selected(int line) const { return selection && line >= selection->first && line <= selection->second; }
  bool covered(int row, int col) const {
    return popup && row >= popup->row && row < popup->row + popup->rows && col >= popup->col &&
           col < popup->col + popup->cols;
  }
};

inline int max_scroll(const std::vector<std::string>& buffer, const ScreenLayout& layout) {
  return std::max(0, static_cast<int>(buffer.size()) - layout.rows);
}

// Applies one scripted event; ScriptError names the event index on invalid input.
inline void apply_event(EditorState& s, const ScriptEvent& e, std::size_t index, const ScreenLayout& layout) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::ScriptError, "event " + std::to_string(index) + " (" + script_event_name(e.kind) + "): " + msg);
  };
  auto check_line = [&](int line) {
    if (line < 0 || line >= static_cast<int>(s.buffer.size())) fail("line " + std::to_string(line) + " out of range");
  };
  switch (e.kind) {
    case ScriptEventKind::TypeChar: {
      check_line(e.line);
      auto& text = s.buffer[static_cast<std::size_t>(e.line)];
      if (e.col < 0 || e.col > static_cast<int>(text.size())) fail("column " + std::to_string(e.col) + " out of range");
      if (!font::is_printable(e.ch)) fail("character is not printable ASCII");
      if (static_cast<int>(text.size()) + 1 > layout.cols) fail("line would exceed " + std::to_string(layout.cols) + " columns");
      text.insert(text.begin() + e.col, e.ch);
      s.selection.reset();
      break;
    }
    case ScriptEventKind::DeleteChar: {
      check_line(e.line);
      auto& text = s.buffer[static_cast<std::size_t>(e.line)];
      if (e.col < 0 || e.col >= static_cast<int>(text.size())) fail("column " + std::to_string(e.col) + " out of range");
      text.erase(text.begin() + e.col);
      s.selection.reset();
      break;
    }
    case ScriptEventKind::SelectLines:
      check_line(e.first);
      check_line(e.last);
      if (e.first > e.last) fail("first line after last line");
      s.selection = std::pair{e.first, e.last};
      break;
    case ScriptEventKind::Deselect:
      if (!s.selection) fail("nothing is selected");
      s.selection.reset();
      break;
    case ScriptEventKind::Scroll: {
      const int target = s.scroll + e.lines;
      if (e.lines == 0 || target < 0 || target > max_scroll(s.buffer, layout)) {
        fail("scroll to line " + std::to_string(target) + " out of range");
      }
      s.scroll = target;
      break;
    }
    case ScriptEventKind::SwitchWindow:
      for (const auto& l : e.buffer) {
        if (static_cast<int>(l.size()) > layout.cols) fail("buffer line exceeds " + std::to_string(layout.cols) + " columns");
        for (char c : l)
          if (!font::is_printable(c)) fail("buffer contains a non-printable character");
      }
      s.window += 1;
      s.buffer = e.buffer;
      s.scroll = 0;
      s.selection.reset();
      s.popup.reset();
      break;
    case ScriptEventKind::Popup:
      if (e.show) {
        if (s.popup) fail("a popup is already shown");
        const auto& r = e.rect;
        if (r.rows < 1 || r.cols < 1 || r.row < 0 || r.col < 0 || r.row + r.rows > layout.rows ||
            r.col + r.cols > layout.cols) {
          fail("popup rectangle outside the text grid");
        }
        s.popup = r;
      } else {
        if (!s.popup) fail("no popup to hide");
        s.popup.reset();
      }
      break;
    case ScriptEventKind::Idle:
      break;
  }
}

inline EditorState initial_state(const SessionScript& script) {
  const auto layout = script.layout();
  EditorState s;
  s.buffer = script.initial_buffer();
  for (const auto& l : s.buffer) {
    if (static_cast<int>(l.size()) > layout.cols) {
      throw Error(ErrorKind::ScriptError, "initial buffer line exceeds " + std::to_string(layout.cols) + " columns");
    }
    for (char c : l)
      if (!font::is_printable(c)) throw Error(ErrorKind::ScriptError, "initial buffer contains a non-printable character");
  }
  return s;
}

// States before the first event and after each event.
inline std::vector<EditorState> replay(const SessionScript& script) {
  const auto layout = script.layout();
  std::vector<EditorState> states{initial_state(script)};
  states.reserve(script.events.size() + 1);
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    EditorState next = states.back();
    apply_event(next, script.events[i], i, layout);
    states.push_back(std::move(next));
  }
  return states;
}

// ---- rendering -----------------------------------------------------------------------------

inline constexpr Rgb kPopupBorder{128, 128, 128};
inline constexpr Rgb kPopupFill{255, 255, 224};

inline Rgb title_color(std::size_t window) {
  return Rgb{static_cast<std::uint8_t>(40 + (window * 53) % 160), static_cast<std::uint8_t>(60 + (window * 97) % 140),
             static_cast<std::uint8_t>(90 + (window * 31) % 120)};
}
inline Rgb status_color(std::size_t window) {
  const Rgb t = title_color(window);
  return Rgb{static_cast<std::uint8_t>(t.r / 2), static_cast<std::uint8_t>(t.g / 2), static_cast<std::uint8_t>(t.b / 2)};
}

inline void draw_glyph(Frame& f, const ScreenLayout& layout, int row, int col, char ch, Rgb bg, Rgb fg) {
  const Rect r = layout.cell_rect(row, col);
  const auto& g = font::glyph(ch);
  for (int y = 0; y < layout.cell_height; ++y) {
    const int gy = y * font::kGlyphHeight / layout.cell_height;
    for (int x = 0; x < layout.cell_width; ++x) {
      const int gx = x * font::kGlyphWidth / layout.cell_width;
      f.at(r.x1 + x, r.y1 + y) = font::ink(g, gx, gy) ? fg : bg;
    }
  }
}

inline Frame render_state(const EditorState& s, const ScreenLayout& layout, std::size_t index) {
  Frame f(index, layout.width, layout.height, kBackground);
  f.fill(layout.title_bar(), title_color(s.window));
  f.fill(layout.status_bar(), status_color(s.window));
  for (int row = 0; row < layout.rows; ++row) {
    const auto line = s.line_at_row(row);
    if (!line) continue;
    const auto& text = s.buffer[static_cast<std::size_t>(*line)];
    const bool sel = s.selected(*line);
    for (int col = 0; col < static_cast<int>(text.size()); ++col) {
      const char ch = text[static_cast<std::size_t>(col)];
      if (sel) {
        draw_glyph(f, layout, row, col, ch, inverted(kBackground), inverted(kForeground));
      } else if (ch != ' ') {
        draw_glyph(f, layout, row, col, ch, kBackground, kForeground);
      }
    }
  }
  if (s.popup) {
    const auto& p = *s.popup;
    const Rect a = layout.cell_rect(p.row, p.col);
    const Rect b = layout.cell_rect(p.row + p.rows - 1, p.col + p.cols - 1);
    const Rect box{a.x1, a.y1, b.x2, b.y2};
    f.fill(box, kPopupBorder);
    f.fill(Rect{box.x1 + 1, box.y1 + 1, box.x2 - 1, box.y2 - 1}, kPopupFill);
  }
  return f;
}

// Words as a perfect detector would report them: maximal runs of visible non-blank cells.
inline std::vector<WordBox> visible_words(const EditorState& s, const ScreenLayout& layout) {
  std::vector<WordBox> words;
  for (int row = 0; row < layout.rows; ++row) {
    const auto line = s.line_at_row(row);
    if (!line) continue;
    const auto& text = s.buffer[static_cast<std::size_t>(*line)];
    int start = -1;
    for (int col = 0; col <= static_cast<int>(text.size()); ++col) {
      const bool ink = col < static_cast<int>(text.size()) && text[static_cast<std::size_t>(col)] != ' ' &&
                       !s.covered(row, col);
      if (ink && start < 0) start = col;
      if (!ink && start >= 0) {
        words.push_back(WordBox{layout.word_box(row, start, col),
                                text.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(col - start))});
        start = -1;
      }
    }
  }
  return words;
}

// ---- ground truth --------------------------------------------------------------------------

namespace detail {

// Replays the step rules on editor states: rows stand in for line geometry and buffer lines
// for text identity. Assumes distinct lines never share text.
class GroundTruthReplay {
 public:
  GroundTruthReplay(const SessionScript& script, const std::vector<EditorState>& states,
                    const std::vector<bool>& visible)
      : script_(script), layout_(script.layout()), states_(states), visible_(visible) {}

  std::vector<CodingStep> run() {
    for (std::size_t i = 0; i < script_.events.size(); ++i) {
      const auto& e = script_.events[i];
      if (!visible_[i] || e.kind == ScriptEventKind::Idle) continue;
      if (open_ && !extend(i)) close();
      if (open_) continue;
      if (i < resume_) continue;
      if (is_coding(e.kind)) start(i);
    }
    if (open_) close();
    return steps_;
  }

 private:
  struct Open {
    std::size_t start_frame = 0;
    int first_row = 0;
    int row = 0;
    int last_row = 0;
    std::size_t end_frame = 0;
    bool all_select = true;
    std::string last_nonempty;
  };

  static bool is_coding(ScriptEventKind k) {
    return k == ScriptEventKind::TypeChar || k == ScriptEventKind::DeleteChar || k == ScriptEventKind::SelectLines;
  }

  // Text of the first line a perfect detector and merger would report in `row` of frame k.
  std::string row_text(std::size_t k, int row) const {
    std::vector<WordBox> words;
    for (auto& w : visible_words(states_[k], layout_))
      if (w.box.y1 == layout_.cell_rect(row, 0).y1) words.push_back(std::move(w));
    const auto lines = merge_word_boxes(std::move(words), k);
    return lines.empty() ? std::string{} : lines.front().text;
  }

  // Frame where the active line of event i is looked up, and the row it occupies there.
  std::pair<std::size_t, int> locus(std::size_t i) const {
    const auto& e = script_.events[i];
    const std::size_t frame = e.kind == ScriptEventKind::DeleteChar ? i : i + 1;
    const int line = e.kind == ScriptEventKind::SelectLines ? e.first : e.line;
    return {frame, line - states_[frame].scroll};
  }

  std::vector<int> selected_rows_with_text(std::size_t i) const {
    const auto& e = script_.events[i];
    std::vector<int> rows;
    for (int line = e.first; line <= e.last; ++line) {
      const int row = line - states_[i + 1].scroll;
      if (row < 0 || row >= layout_.rows) continue;
      if (!row_text(i + 1, row).empty()) rows.push_back(row);
    }
    return rows;
  }

  void emit(std::size_t start, std::size_t end, StepType type, std::string text) {
    CodingStep s;
    s.start_frame = start;
    s.end_frame = end;
    s.start_time_s = static_cast<double>(start) / script_.fps;
    s.end_time_s = static_cast<double>(end) / script_.fps;
    s.type = type;
    s.text = std::move(text);
    s.source_id = script_.source_id;
    steps_.push_back(std::move(s));
    resume_ = end + 1;
  }

  void start(std::size_t i) {
    const auto& e = script_.events[i];
    if (e.kind == ScriptEventKind::SelectLines) {
      const auto rows = selected_rows_with_text(i);
      if (rows.empty()) return;
      if (rows.size() > 1) {
        std::string text;
        for (std::size_t k = 0; k < rows.size(); ++k) {
          if (k) text += '\n';
          text += row_text(i + 1, rows[k]);
        }
        emit(i, i + 1, StepType::SelectText, std::move(text));
        return;
      }
      open_ = Open{i, rows[0], rows[0], rows[0], i + 1, true, row_text(i + 1, rows[0])};
      return;
    }
    const auto [frame, row] = locus(i);
    if (row < 0 || row >= layout_.rows) return;
    const std::string text = row_text(frame, row);
    if (text.empty()) return;
    open_ = Open{i, row, row, row, i + 1, false, text};
  }

  bool extend(std::size_t i) {
    const auto& e = script_.events[i];
    Open& o = *open_;
    if (is_coding(e.kind)) {
      int row;
      std::size_t frame;
      if (e.kind == ScriptEventKind::SelectLines) {
        const auto rows = selected_rows_with_text(i);
        if (rows.size() != 1) return false;
        row = rows[0];
        frame = i + 1;
      } else {
        std::tie(frame, row) = locus(i);
        if (row < 0 || row >= layout_.rows || row_text(frame, row).empty()) return false;
      }
      if (row != o.row) return false;
      o.last_row = row;
      o.end_frame = i + 1;
      o.all_select = o.all_select && e.kind == ScriptEventKind::SelectLines;
      if (auto t = row_text(frame, row); !t.empty()) o.last_nonempty = t;
      return true;
    }
    if (e.kind == ScriptEventKind::Scroll) {
      const auto line = states_[i].line_at_row(o.row);
      if (!line || row_text(i, o.row).empty()) return false;
      const auto row = states_[i + 1].row_of(*line, layout_);
      if (!row || row_text(i + 1, *row).empty()) return false;
      o.row = *row;
      return true;
    }
    return false;
  }

  void close() {
    const Open o = *open_;
    open_.reset();
    const std::string start_text = row_text(o.start_frame, o.first_row);
    const std::string end_text = row_text(o.end_frame, o.last_row);
    if (start_text.empty() && end_text.empty()) {
      emit(o.start_frame, o.end_frame, StepType::DeleteText, o.last_nonempty);
    } else if (start_text.empty()) {
      emit(o.start_frame, o.end_frame, StepType::EnterText, end_text);
    } else if (end_text.empty()) {
      emit(o.start_frame, o.end_frame, StepType::DeleteText, start_text);
    } else {
      emit(o.start_frame, o.end_frame, o.all_select ? StepType::SelectText : StepType::EditText, end_text);
    }
  }

  const SessionScript& script_;
  ScreenLayout layout_;
  const std::vector<EditorState>& states_;
  const std::vector<bool>& visible_;
  std::optional<Open> open_;
  std::size_t resume_ = 0;
  std::vector<CodingStep> steps_;
};

}  // namespace detail

// ---- sessions ------------------------------------------------------------------------------

struct SynthResult {
  FrameSequence frames;
  std::vector<ActionLabel> actions;
  WordsByFrame words;
  std::vector<CodingStep> ground_truth;
};

// `noise` > 0 adds uniform per-channel jitter in [-noise, noise] to the written pixels; the
// sidecars and ground truth describe the clean frames.
inline SynthResult render_session(const SessionScript& script, int noise = 0, std::uint64_t seed = 0) {
  if (noise < 0) throw Error(ErrorKind::ParamError, "noise must be >= 0");
  const auto layout = script.layout();
  const auto states = replay(script);

  SynthResult out;
  std::vector<Frame> frames;
  frames.reserve(states.size());
  for (std::size_t k = 0; k < states.size(); ++k) {
    frames.push_back(render_state(states[k], layout, k));
    out.words[k] = visible_words(states[k], layout);
  }
  std::vector<bool> visible(script.events.size(), false);
  for (std::size_t i = 0; i < script.events.size(); ++i) {
    visible[i] = !frames[i].same_pixels(frames[i + 1]);
    if (!visible[i]) continue;
    if (auto a = scripted_action(script.events[i].kind)) out.actions.push_back(ActionLabel{i, i + 1, *a});
  }
  out.ground_truth = detail::GroundTruthReplay(script, states, visible).run();

  if (noise > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> jitter(-noise, noise);
    auto px = [&](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(int(v) + jitter(rng), 0, 255)); };
    for (auto& f : frames)
      for (auto& p : f.pixels()) p = Rgb{px(p.r), px(p.g), px(p.b)};
  }
  out.frames = FrameSequence(std::move(frames), script.fps, script.source_id);
  return out;
}

// Scenario directory: frames, manifest.json, actions.jsonl, text.jsonl, gt.jsonl, script.json.
inline void write_scenario(const SynthResult& r, const SessionScript& script, const std::filesystem::path& dir) {
  write_frame_sequence(r.frames, dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("actions.jsonl");
    write_action_labels(out, r.actions);
  }
  {
    auto out = open("text.jsonl");
    write_text_sidecar(out, r.words);
  }
  {
    auto out = open("gt.jsonl");
    write_steps(out, r.ground_truth, "synth");
  }
  {
    auto out = open("script.json");
    out << to_json(script).dump(2) << '\n';
  }
}

// ---- random scripts ------------------------------------------------------------------------

struct StepMix {
  double enter = 0.365;
  double del = 0.005;
  double edit = 0.209;
  double select = 0.421;
};

struct RandomScriptParams {
  StepMix mix;
  std::size_t target_events = 200;
  std::size_t buffer_lines = 80;
  double filled_fraction = 0.5;  // initially non-empty share of buffer lines
  int max_line_chars = 36;
  int min_tokens = 1;           // tokens after the line id
  int max_tokens = 5;
  double multi_select_rate = 0.5;
  // Interruptions. Between-step events are drawn before each step; mid-step scrolls inside
  // enter/edit/delete steps keep the active line on screen.
  double scroll_rate = 0.0;
  double mid_step_scroll_rate = 0.0;
  double popup_rate = 0.0;
  double switch_rate = 0.0;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;
  std::string source_id = "synth";
};

namespace detail {

inline const std::vector<std::string>& token_pool() {
  static const std::vector<std::string> pool = {
      "int",  "x",     "=",      "return", "if",    "(a)",    "{",      "}",     "new",   "List",   "for",
      "i++",  "y;",    "void",   "run()",  "self",  "print",  "args",  "+",     "-",      "*",
      "0;",   "1);",   "count",  "data",   "map",   "put(k,", "v);",    "else",  "while", "true",   "null",
      "str",  "info",  "log",    "get()",  "set",   "class",  "public", "static", "def",  "import", "from",
      "main", "len",   "items",  "value",  "const", "let",    "=>",     "&&",    "||",    "node",   "next"};
  return pool;
}

class ScriptGenerator {
 public:
  explicit ScriptGenerator(const RandomScriptParams& p) : p_(p), rng_(p.seed) {}

  SessionScript generate() {
    validate();
    script_.source_id = p_.source_id;
    script_.width = p_.width;
    script_.height = p_.height;
    layout_ = script_.layout();
    if (p_.max_line_chars > layout_.cols) throw Error(ErrorKind::ParamError, "max_line_chars exceeds the text grid width");
    script_.buffer = make_buffer();
    state_ = initial_state(script_);

    while (script_.events.size() < p_.target_events) {
      interruptions();
      const auto type = choose_type();
      if (!type) {
        if (!unstick()) break;
        continue;
      }
      run_step(*type);
      ++counts_[static_cast<std::size_t>(*type)];
      ++steps_;
      idle(1 + static_cast<int>(uniform(0, 1)));
    }
    return script_;
  }

 private:
  void validate() const {
    const auto& m = p_.mix;
    for (double v : {m.enter, m.del, m.edit, m.select})
      if (v < 0.0) throw Error(ErrorKind::ParamError, "step-type probabilities must be non-negative");
    if (std::abs(m.enter + m.del + m.edit + m.select - 1.0) > 1e-6) {
      throw Error(ErrorKind::ParamError, "step-type probabilities must sum to 1");
    }
    for (double v : {p_.scroll_rate, p_.mid_step_scroll_rate, p_.popup_rate, p_.switch_rate, p_.multi_select_rate,
                     p_.filled_fraction})
      if (v < 0.0 || v > 1.0) throw Error(ErrorKind::ParamError, "rates must be in [0,1]");
    if (p_.min_tokens < 1 || p_.max_tokens < p_.min_tokens) throw Error(ErrorKind::ParamError, "invalid token range");
    if (p_.max_line_chars < 12) throw Error(ErrorKind::ParamError, "max_line_chars must be at least 12");
  }

  std::size_t uniform(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }
  bool chance(double p) { return p > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  // Ids are unique per session, which keeps distinct lines textually far apart.
  std::string line_head() {
    const char* indents[] = {"", "  ", "    "};
    std::ostringstream os;
    os << indents[uniform(0, 2)] << 'v' << std::setw(4) << std::setfill('0') << (next_id_++ % 10000);
    return os.str();
  }

  std::string tokens(std::size_t room, int min_count, int max_count) {
    std::string out;
    const int n = static_cast<int>(uniform(static_cast<std::size_t>(min_count), static_cast<std::size_t>(max_count)));
    const auto& pool = token_pool();
    for (int k = 0; k < n; ++k) {
      const std::string& tok = pool[uniform(0, pool.size() - 1)];
      if (out.size() + 1 + tok.size() > room) break;
      out += ' ';
      out += tok;
    }
    if (out.empty() && room >= 2) out = " x";
    return out;
  }

  std::string make_line() {
    std::string head = line_head();
    const std::size_t room = static_cast<std::size_t>(p_.max_line_chars) - head.size();
    return head + tokens(room, p_.min_tokens, p_.max_tokens);
  }

  std::vector<std::string> make_buffer() {
    std::vector<std::string> buf(std::max<std::size_t>(p_.buffer_lines, static_cast<std::size_t>(layout_.rows)));
    for (auto& l : buf)
      if (chance(p_.filled_fraction)) l = make_line();
    return buf;
  }

  void push(const ScriptEvent& e) {
    apply_event(state_, e, script_.events.size(), layout_);
    script_.events.push_back(e);
  }
  void idle(int n) {
    for (int k = 0; k < n; ++k) push(ScriptEvent::idle());
  }

  static bool has_ink(const std::string& s) { return s.find_first_not_of(' ') != std::string::npos; }

  std::vector<int> visible_lines(bool want_text) const {
    std::vector<int> out;
    for (int row = 0; row < layout_.rows; ++row) {
      const auto line = state_.line_at_row(row);
      if (!line || *line == last_line_) continue;
      if (has_ink(state_.buffer[static_cast<std::size_t>(*line)]) == want_text) out.push_back(*line);
    }
    return out;
  }

  bool feasible(StepType t) const {
    return !visible_lines(t != StepType::EnterText).empty();
  }

  // Stratified choice: the feasible type furthest below its quota.
  std::optional<StepType> choose_type() const {
    const double probs[] = {p_.mix.enter, p_.mix.del, p_.mix.edit, p_.mix.select};
    std::optional<StepType> best;
    double best_deficit = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      if (probs[k] <= 0.0) continue;
      const auto t = static_cast<StepType>(k);
      if (!feasible(t)) continue;
      const double deficit = probs[k] * static_cast<double>(steps_ + 1) - static_cast<double>(counts_[k]);
      if (!best || deficit > best_deficit) {
        best = t;
        best_deficit = deficit;
      }
    }
    if (!best) return std::nullopt;
    // Keep to the quota: wait for a line rather than substitute a type that is ahead of it.
    const std::size_t k = static_cast<std::size_t>(*best);
    if (probs[k] * static_cast<double>(steps_ + 1) - static_cast<double>(counts_[k]) <= 0.0) {
      for (std::size_t j = 0; j < 4; ++j)
        if (probs[j] > 0.0 && probs[j] * static_cast<double>(steps_ + 1) - static_cast<double>(counts_[j]) > 0.0)
          return std::nullopt;
    }
    return best;
  }

  bool do_scroll(int amount) {
    const int target = std::clamp(state_.scroll + amount, 0, max_scroll(state_.buffer, layout_));
    if (target == state_.scroll) return false;
    push(ScriptEvent::scroll(target - state_.scroll));
    return true;
  }

  int random_scroll_amount() {
    const int n = static_cast<int>(uniform(1, 5));
    return chance(0.5) ? n : -n;
  }

  void switch_window() {
    std::vector<std::string> buf(std::max<std::size_t>(p_.buffer_lines, static_cast<std::size_t>(layout_.rows)));
    for (auto& l : buf)
      if (chance(p_.filled_fraction)) l = make_line();
    push(ScriptEvent::switch_window(std::move(buf)));
    last_line_ = -1;
    idle(1);
  }

  bool unstick() {
    if (++stuck_ > 50) return false;
    const int amount = random_scroll_amount();
    if (do_scroll(amount) || do_scroll(-amount)) {
      idle(1);
      return true;
    }
    switch_window();
    return true;
  }

  void interruptions() {
    if (chance(p_.scroll_rate) && do_scroll(random_scroll_amount())) idle(1);
    if (chance(p_.popup_rate)) {
      const int rows = static_cast<int>(uniform(2, 5));
      const int cols = static_cast<int>(uniform(8, 24));
      const int row = static_cast<int>(uniform(0, static_cast<std::size_t>(layout_.rows - rows)));
      const int col = static_cast<int>(uniform(0, static_cast<std::size_t>(layout_.cols - cols)));
      push(ScriptEvent::popup_show(CellRect{row, col, rows, cols}));
      idle(static_cast<int>(uniform(0, 1)));
      push(ScriptEvent::popup_hide());
      idle(1);
      last_line_ = -1;
    }
    if (chance(p_.switch_rate)) switch_window();
  }

  int pick(const std::vector<int>& lines) { return lines[uniform(0, lines.size() - 1)]; }

  // Pushes a scroll that keeps `line` on screen when the line currently shows text.
  void maybe_mid_step_scroll(int line) {
    if (!chance(p_.mid_step_scroll_rate)) return;
    if (!has_ink(state_.buffer[static_cast<std::size_t>(line)])) return;
    const auto row = state_.row_of(line, layout_);
    if (!row) return;
    for (int tries = 0; tries < 6; ++tries) {
      const int amount = static_cast<int>(uniform(1, 3)) * (chance(0.5) ? 1 : -1);
      const int target = std::clamp(state_.scroll + amount, 0, max_scroll(state_.buffer, layout_));
      const int new_row = line - target;
      if (target == state_.scroll || new_row < 0 || new_row >= layout_.rows) continue;
      push(ScriptEvent::scroll(target - state_.scroll));
      return;
    }
  }

  void type_text(int line, const std::string& text, std::size_t scroll_after) {
    for (std::size_t k = 0; k < text.size(); ++k) {
      const int col = static_cast<int>(state_.buffer[static_cast<std::size_t>(line)].size());
      push(ScriptEvent::type_char(line, col, text[k]));
      if (k + 1 == scroll_after) maybe_mid_step_scroll(line);
    }
  }

  void delete_to(int line, std::size_t keep, std::size_t scroll_after) {
    std::size_t n = 0;
    while (state_.buffer[static_cast<std::size_t>(line)].size() > keep) {
      const int col = static_cast<int>(state_.buffer[static_cast<std::size_t>(line)].size()) - 1;
      push(ScriptEvent::delete_char(line, col));
      if (++n == scroll_after) maybe_mid_step_scroll(line);
    }
  }

  void run_step(StepType t) {
    stuck_ = 0;
    switch (t) {
      case StepType::EnterText: {
        const int line = pick(visible_lines(false));
        const std::string text = make_line();
        type_text(line, text, uniform(1, text.size()));
        last_line_ = line;
        break;
      }
      case StepType::DeleteText: {
        const int line = pick(visible_lines(true));
        const auto& cur = state_.buffer[static_cast<std::size_t>(line)];
        delete_to(line, 0, uniform(1, std::max<std::size_t>(1, cur.size() / 2)));
        last_line_ = line;
        break;
      }
      case StepType::EditText: {
        const int line = pick(visible_lines(true));
        const std::string cur = state_.buffer[static_cast<std::size_t>(line)];
        // Keep the head (indent + id) and possibly some tokens; drop the rest with its leading space.
        std::vector<std::size_t> cuts;
        const std::size_t head_end = cur.find(' ', cur.find_first_not_of(' '));
        for (std::size_t k = head_end; k != std::string::npos && k < cur.size(); k = cur.find(' ', k + 1))
          if (k > 0 && cur[k - 1] != ' ') cuts.push_back(k);
        const std::size_t keep = cuts.empty() ? cur.size() : cuts[uniform(0, cuts.size() - 1)];
        const std::string suffix = tokens(static_cast<std::size_t>(p_.max_line_chars) - keep, 1, 2);
        if (keep < cur.size()) delete_to(line, keep, uniform(1, cur.size() - keep));
        type_text(line, suffix, uniform(1, suffix.size()));
        last_line_ = line;
        break;
      }
      case StepType::SelectText: {
        const auto candidates = visible_lines(true);
        int first = pick(candidates);
        int last = first;
        if (chance(p_.multi_select_rate)) {
          std::vector<int> ends;
          for (int l : candidates)
            if (l > first && l - first <= 3) ends.push_back(l);
          if (!ends.empty()) last = pick(ends);
        }
        push(ScriptEvent::select_lines(first, last));
        idle(static_cast<int>(uniform(0, 1)));
        push(ScriptEvent::deselect());
        last_line_ = -1;
        break;
      }
    }
  }

  RandomScriptParams p_;
  std::mt19937_64 rng_;
  SessionScript script_;
  ScreenLayout layout_;
  EditorState state_;
  std::size_t counts_[4] = {0, 0, 0, 0};
  std::size_t steps_ = 0;
  std::size_t next_id_ = 1;
  int last_line_ = -1;
  int stuck_ = 0;
};

}  // namespace detail

inline SessionScript generate_random_script(const RandomScriptParams& params) {
  return detail::ScriptGenerator(params).generate();
}

}  // namespace seeflow
