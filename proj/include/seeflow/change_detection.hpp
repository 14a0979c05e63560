#pragma once

#include <cstdlib>
#include <optional>
#include <string>

#include "seeflow/error.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/geometry.hpp"

namespace seeflow {

// Tight bounding box of all pixels that differ between two consecutive frames.
struct ChangeRegion {
  Rect box;
  std::size_t frame_a_index = 0;
  std::size_t frame_b_index = 0;

  constexpr Span span() const { return vertical_span(box); }
  friend bool operator==(const ChangeRegion&, const ChangeRegion&) = default;
};

inline bool pixels_differ(Rgb a, Rgb b, int tolerance) {
  return std::abs(int(a.r) - int(b.r)) > tolerance || std::abs(int(a.g) - int(b.g)) > tolerance ||
         std::abs(int(a.b) - int(b.b)) > tolerance;
}

// Returns nullopt when no channel of any pixel differs by more than `tolerance`.
inline std::optional<ChangeRegion> diff_region(const Frame& a, const Frame& b, int tolerance = 0) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::DimensionMismatch, "frames " + std::to_string(a.index()) + " and " +
                                                  std::to_string(b.index()) + " differ in size");
  }
  if (tolerance < 0) throw Error(ErrorKind::ParamError, "diff tolerance must be >= 0");

  int x1 = a.width(), y1 = a.height(), x2 = -1, y2 = -1;
  for (int y = 0; y < a.height(); ++y) {
    const auto ra = a.row(y);
    const auto rb = b.row(y);
    for (int x = 0; x < a.width(); ++x) {
      if (pixels_differ(ra[static_cast<std::size_t>(x)], rb[static_cast<std::size_t>(x)], tolerance)) {
        x1 = std::min(x1, x);
        x2 = std::max(x2, x);
        y1 = std::min(y1, y);
        y2 = y;
      }
    }
  }
  if (x2 < 0) return std::nullopt;
  return ChangeRegion{Rect{x1, y1, x2 + 1, y2 + 1}, a.index(), b.index()};
}

}  // namespace seeflow
