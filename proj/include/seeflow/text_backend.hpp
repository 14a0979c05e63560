#pragma once

// Word detection / recognition backends and the text.jsonl sidecar.

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeflow/error.hpp"
#include "seeflow/font.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/layout.hpp"
#include "seeflow/text.hpp"

namespace seeflow {

class TextBackend {
 public:
  virtual ~TextBackend() = default;
  // Word boxes within the frame; recognition happens separately.
  virtual std::vector<Rect> detect_words(const Frame& frame) const = 0;
  // Text inside `box`, or "" when the backend sees nothing there.
  virtual std::string recognize_text(const Frame& frame, const Rect& box) const = 0;
};

inline void check_box_in_bounds(const Frame& frame, const Rect& box) {
  if (!box.valid() || !frame.bounds().contains(box)) {
    std::ostringstream msg;
    msg << "box " << box << " outside frame " << frame.index() << " (" << frame.width() << "x"
        << frame.height() << ")";
    throw Error(ErrorKind::BoundsError, msg.str());
  }
}

// Detect, recognize, and drop boxes that came back empty.
inline std::vector<WordBox> extract_words(const TextBackend& backend, const Frame& frame) {
  std::vector<WordBox> words;
  for (const Rect& box : backend.detect_words(frame)) {
    std::string text = backend.recognize_text(frame, box);
    if (!text.empty()) words.push_back(WordBox{box, std::move(text)});
  }
  return words;
}

inline std::vector<TextLine> extract_lines(const TextBackend& backend, const Frame& frame) {
  return merge_word_boxes(extract_words(backend, frame), frame.index());
}

// ---- text.jsonl ----------------------------------------------------------------------------

using WordsByFrame = std::map<std::size_t, std::vector<WordBox>>;

inline nlohmann::json word_to_json(const WordBox& w) {
  return nlohmann::json{{"x1", w.box.x1}, {"y1", w.box.y1}, {"x2", w.box.x2},
                        {"y2", w.box.y2}, {"text", w.text}};
}

inline void write_text_sidecar(std::ostream& out, const WordsByFrame& words) {
  for (const auto& [frame, list] : words) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : list) arr.push_back(word_to_json(w));
    out << nlohmann::json{{"frame", frame}, {"words", arr}}.dump() << '\n';
  }
}

inline WordsByFrame parse_text_sidecar(std::istream& in, const std::string& origin) {
  WordsByFrame result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      const auto frame = j.at("frame").get<std::size_t>();
      std::vector<WordBox> words;
      for (const auto& w : j.at("words")) {
        WordBox wb{Rect{w.at("x1").get<int>(), w.at("y1").get<int>(), w.at("x2").get<int>(),
                        w.at("y2").get<int>()},
                   w.at("text").get<std::string>()};
        if (!wb.box.valid() || wb.text.empty()) {
          throw Error(ErrorKind::SidecarFormat, where + ": degenerate word box");
        }
        words.push_back(std::move(wb));
      }
      if (!result.emplace(frame, std::move(words)).second) {
        throw Error(ErrorKind::SidecarFormat, where + ": frame " + std::to_string(frame) + " listed twice");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::SidecarFormat, where + ": " + e.what());
    }
  }
  return result;
}

inline WordsByFrame load_text_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SidecarFormat, "cannot open " + path.string());
  return parse_text_sidecar(in, path.string());
}

// Echoes recorded words (synthesizer oracle, or an external detector's output).
class SidecarTextBackend final : public TextBackend {
 public:
  explicit SidecarTextBackend(WordsByFrame words) : words_(std::move(words)) {}

  std::vector<Rect> detect_words(const Frame& frame) const override {
    std::vector<Rect> boxes;
    if (auto it = words_.find(frame.index()); it != words_.end())
      for (const auto& w : it->second) boxes.push_back(w.box);
    return boxes;
  }

  std::string recognize_text(const Frame& frame, const Rect& box) const override {
    check_box_in_bounds(frame, box);
    if (auto it = words_.find(frame.index()); it != words_.end())
      for (const auto& w : it->second)
        if (w.box == box) return w.text;
    return {};
  }

  bool has_frame(std::size_t index) const { return words_.contains(index); }

 private:
  WordsByFrame words_;
};

// ---- raster backend ------------------------------------------------------------------------

// Reads dark-on-light (or inverted) monospace glyphs drawn in the built-in font on a known cell
// grid. A test backend for synthesized frames, not a general OCR.
class RasterTextBackend final : public TextBackend {
 public:
  struct Cell {
    enum class Kind { Blank, Glyph, Unknown } kind = Kind::Unknown;
    char ch = ' ';
    bool inverted = false;
  };

  explicit RasterTextBackend(ScreenLayout layout) : layout_(layout) {}

  const ScreenLayout& layout() const { return layout_; }

  Cell classify(const Frame& frame, int row, int col) const {
    const Rect r = layout_.cell_rect(row, col);
    Cell cell;
    if (!frame.bounds().contains(r)) return cell;
    const Rgb corner = frame.at(r.x1, r.y1);
    Rgb bg, fg;
    if (corner == kBackground) {
      bg = kBackground;
      fg = kForeground;
    } else if (corner == inverted(kBackground)) {
      bg = inverted(kBackground);
      fg = inverted(kForeground);
      cell.inverted = true;
    } else {
      return cell;
    }
    for (int y = r.y1; y < r.y2; ++y)
      for (int x = r.x1; x < r.x2; ++x) {
        const Rgb p = frame.at(x, y);
        if (p != bg && p != fg) return cell;
      }

    font::Glyph mask{};
    for (int gy = 0; gy < font::kGlyphHeight; ++gy) {
      std::uint8_t bits = 0;
      for (int gx = 0; gx < font::kGlyphWidth; ++gx) {
        const int x = r.x1 + gx * layout_.cell_width / font::kGlyphWidth;
        const int y = r.y1 + gy * layout_.cell_height / font::kGlyphHeight;
        if (frame.at(x, y) == fg) bits = static_cast<std::uint8_t>(bits | (1U << gx));
      }
      mask[static_cast<std::size_t>(gy)] = bits;
    }
    const auto ch = font::lookup(mask);
    if (!ch) return cell;
    cell.ch = *ch;
    cell.kind = *ch == ' ' ? Cell::Kind::Blank : Cell::Kind::Glyph;
    return cell;
  }

  // Words are maximal runs of glyph cells within a grid row; blank and unreadable cells split.
  std::vector<Rect> detect_words(const Frame& frame) const override {
    std::vector<Rect> boxes;
    for (int row = 0; row < layout_.rows; ++row) {
      int run_start = -1;
      for (int col = 0; col <= layout_.cols; ++col) {
        const bool glyph = col < layout_.cols && classify(frame, row, col).kind == Cell::Kind::Glyph;
        if (glyph && run_start < 0) run_start = col;
        if (!glyph && run_start >= 0) {
          boxes.push_back(layout_.word_box(row, run_start, col));
          run_start = -1;
        }
      }
    }
    return boxes;
  }

  // Cells fully inside `box`, row by row; rows joined with '\n', each trimmed.
  std::string recognize_text(const Frame& frame, const Rect& box) const override {
    check_box_in_bounds(frame, box);
    std::string out;
    for (int row = 0; row < layout_.rows; ++row) {
      std::string line;
      bool any_cell = false;
      for (int col = 0; col < layout_.cols; ++col) {
        if (!box.contains(layout_.cell_rect(row, col))) continue;
        any_cell = true;
        const Cell c = classify(frame, row, col);
        line += c.kind == Cell::Kind::Glyph ? c.ch : ' ';
      }
      if (!any_cell) continue;
      const auto first = line.find_first_not_of(' ');
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(' ');
      if (!out.empty()) out += '\n';
      out += line.substr(first, last - first + 1);
    }
    return out;
  }

 private:
  ScreenLayout layout_;
};

}  // namespace seeflow
