#pragma once

// Rule-based action recognizer for rendered editor frames. Rules, first match wins:
//   popup   region is an opaque box (uniform 1 px border, uniform fill) newly shown or just hidden
//   switch  region covers > 90% of the frame and no text line survives
//   select  every changed pixel is the inverse of its old value, text unchanged, image darker
//   scroll  lines touching the region reappear shifted by the same whole number of rows
//   typing  at most one line on each side of the region; gained characters enter, lost delete
//   other   everything else (including a selection being cleared)

#include <cstdint>
#include <optional>
#include <vector>

#include "seeflow/action.hpp"
#include "seeflow/change_detection.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/text.hpp"

namespace seeflow {

struct HeuristicActionConfig {
  int cell_height = 16;
  double switch_area_fraction = 0.9;
  double line_match_threshold = kDefaultLineMatchThreshold;
};

class HeuristicActionBackend final : public ActionBackend {
 public:
  explicit HeuristicActionBackend(HeuristicActionConfig config = {}) : config_(config) {}

  std::optional<ActionType> recognize(const Frame& a, const Frame& b, const ChangeRegion& region,
                                      const ActionContext& context) const override {
    static const std::vector<TextLine> kNoLines;
    const auto& lines_a = context.lines_a ? *context.lines_a : kNoLines;
    const auto& lines_b = context.lines_b ? *context.lines_b : kNoLines;
    const Rect& r = region.box;

    if (is_opaque_box(b, r) || is_opaque_box(a, r)) return ActionType::TriggerOrLeavePopup;

    const auto matching = match_text_lines(lines_a, lines_b, config_.line_match_threshold);
    const double frac = static_cast<double>(r.area()) / static_cast<double>(a.bounds().area());
    if (frac > config_.switch_area_fraction && matching.pairs.empty()) return ActionType::SwitchWindows;

    const auto touched_a = touching(lines_a, r);
    const auto touched_b = touching(lines_b, r);

    if (all_inverted(a, b, r) && same_texts(lines_a, touched_a, lines_b, touched_b)) {
      return luminance(b, r) < luminance(a, r) ? ActionType::SelectChars : ActionType::OtherAction;
    }

    if (is_scroll(lines_a, lines_b, matching, r)) return ActionType::ScrollContent;

    if (touched_a.size() <= 1 && touched_b.size() <= 1 && !(touched_a.empty() && touched_b.empty())) {
      const std::size_t before = touched_a.empty() ? 0 : lines_a[touched_a[0]].char_count;
      const std::size_t after = touched_b.empty() ? 0 : lines_b[touched_b[0]].char_count;
      if (after > before) return ActionType::EnterChars;
      if (after < before) return ActionType::DeleteChars;
    }
    return ActionType::OtherAction;
  }

 private:
  static std::vector<std::size_t> touching(const std::vector<TextLine>& lines, const Rect& r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (lines[i].box.y1 < r.y2 && r.y1 < lines[i].box.y2) out.push_back(i);
    return out;
  }

  static bool same_texts(const std::vector<TextLine>& la, const std::vector<std::size_t>& ia,
                         const std::vector<TextLine>& lb, const std::vector<std::size_t>& ib) {
    if (ia.size() != ib.size()) return false;
    for (std::size_t k = 0; k < ia.size(); ++k)
      if (la[ia[k]].text != lb[ib[k]].text || la[ia[k]].box != lb[ib[k]].box) return false;
    return true;
  }

  static bool is_opaque_box(const Frame& f, const Rect& r) {
    if (r.width() < 3 || r.height() < 3) return false;
    const Rgb border = f.at(r.x1, r.y1);
    const Rgb fill = f.at(r.x1 + 1, r.y1 + 1);
    if (border == fill) return false;
    for (int y = r.y1; y < r.y2; ++y)
      for (int x = r.x1; x < r.x2; ++x) {
        const bool edge = x == r.x1 || x == r.x2 - 1 || y == r.y1 || y == r.y2 - 1;
        if (f.at(x, y) != (edge ? border : fill)) return false;
      }
    return true;
  }

  static bool all_inverted(const Frame& a, const Frame& b, const Rect& r) {
    for (int y = r.y1; y < r.y2; ++y)
      for (int x = r.x1; x < r.x2; ++x) {
        const Rgb pa = a.at(x, y);
        const Rgb pb = b.at(x, y);
        if (pa != pb && pb != inverted(pa)) return false;
      }
    return true;
  }

  static std::int64_t luminance(const Frame& f, const Rect& r) {
    std::int64_t sum = 0;
    for (int y = r.y1; y < r.y2; ++y)
      for (int x = r.x1; x < r.x2; ++x) {
        const Rgb p = f.at(x, y);
        sum += p.r + p.g + p.b;
      }
    return sum;
  }

  bool is_scroll(const std::vector<TextLine>& la, const std::vector<TextLine>& lb,
                 const LineMatching& m, const Rect& r) const {
    std::optional<int> shift;
    for (const auto& p : m.pairs) {
      const Rect& ba = la[p.a].box;
      const Rect& bb = lb[p.b].box;
      const bool involved = (ba.y1 < r.y2 && r.y1 < ba.y2) || (bb.y1 < r.y2 && r.y1 < bb.y2);
      if (!involved) continue;
      const int dy = bb.y1 - ba.y1;
      if (dy == 0 || dy % config_.cell_height != 0 || bb.x1 != ba.x1) return false;
      if (shift && *shift != dy) return false;
      shift = dy;
    }
    return shift.has_value();
  }

  HeuristicActionConfig config_;
};

}  // namespace seeflow
