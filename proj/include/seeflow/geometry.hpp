#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <ostream>

namespace seeflow {

// Axis-aligned pixel rectangle: top-left inclusive, bottom-right exclusive.
struct Rect {
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  constexpr int width() const { return x2 - x1; }
  constexpr int height() const { return y2 - y1; }
  constexpr std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * static_cast<std::int64_t>(height());
  }
  constexpr bool valid() const { return x1 < x2 && y1 < y2; }

  constexpr bool contains(int x, int y) const { return x >= x1 && x < x2 && y >= y1 && y < y2; }
  constexpr bool contains(const Rect& o) const {
    return o.x1 >= x1 && o.y1 >= y1 && o.x2 <= x2 && o.y2 <= y2;
  }
  constexpr bool intersects(const Rect& o) const {
    return x1 < o.x2 && o.x1 < x2 && y1 < o.y2 && o.y1 < y2;
  }

  friend constexpr auto operator<=>(const Rect&, const Rect&) = default;
};

constexpr Rect united(const Rect& a, const Rect& b) {
  return Rect{std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
              std::max(a.y2, b.y2)};
}

inline std::ostream& operator<<(std::ostream& os, const Rect& r) {
  return os << '(' << r.x1 << ',' << r.y1 << ',' << r.x2 << ',' << r.y2 << ')';
}

// Half-open vertical span [y1, y2).
struct Span {
  int y1 = 0;
  int y2 = 0;

  constexpr int length() const { return y2 - y1; }
  friend constexpr auto operator<=>(const Span&, const Span&) = default;
};

constexpr Span vertical_span(const Rect& r) { return Span{r.y1, r.y2}; }

}  // namespace seeflow
