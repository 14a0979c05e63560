#pragma once

#include <algorithm>

#include "seeflow/error.hpp"
#include "seeflow/frame.hpp"
#include "seeflow/geometry.hpp"

namespace seeflow {

inline constexpr Rgb kBackground{255, 255, 255};
inline constexpr Rgb kForeground{0, 0, 0};

// Editor screen geometry shared by the synthesizer and the raster text backend.
//
//   +-------------------------------+  title bar (bar_height px)
//   | 8px | text grid rows x cols   |
//   |     |                         |
//   +-------------------------------+  status bar (bar_height px)
//
// Bars take at least 5% of the height each, so the text grid never exceeds 90% of the frame.
struct ScreenLayout {
  int width = 640;
  int height = 480;
  int cell_width = 8;
  int cell_height = 16;
  int bar_height = 24;
  int origin_x = 8;
  int origin_y = 24;
  int rows = 27;
  int cols = 78;
  int word_pad = 1;  // word boxes extend this far left and right of their glyph cells

  static ScreenLayout make(int width, int height, int cell_width = 8, int cell_height = 16) {
    if (width <= 0 || height <= 0) throw Error(ErrorKind::ParamError, "canvas size must be positive");
    // Glyphs are drawn from the 8x16 font by nearest-neighbour upscaling.
    if (cell_width < 8 || cell_height < 16) {
      throw Error(ErrorKind::ParamError, "glyph cells must be at least 8x16 px");
    }
    ScreenLayout l;
    l.width = width;
    l.height = height;
    l.cell_width = cell_width;
    l.cell_height = cell_height;
    l.bar_height = std::max(cell_height, (height + 19) / 20);
    l.origin_x = cell_width;
    l.origin_y = l.bar_height;
    l.rows = (height - 2 * l.bar_height) / cell_height;
    l.cols = (width - 2 * l.origin_x) / cell_width;
    if (l.rows < 1 || l.cols < 1) throw Error(ErrorKind::ParamError, "canvas too small for one text cell");
    return l;
  }

  constexpr Rect cell_rect(int row, int col) const {
    const int x = origin_x + col * cell_width;
    const int y = origin_y + row * cell_height;
    return Rect{x, y, x + cell_width, y + cell_height};
  }

  // Box of the word occupying cells [col_begin, col_end) of `row`.
  constexpr Rect word_box(int row, int col_begin, int col_end) const {
    const int y = origin_y + row * cell_height;
    return Rect{origin_x + col_begin * cell_width - word_pad, y,
                origin_x + col_end * cell_width + word_pad, y + cell_height};
  }

  constexpr Rect text_area() const {
    return Rect{origin_x, origin_y, origin_x + cols * cell_width, origin_y + rows * cell_height};
  }
  constexpr Rect title_bar() const { return Rect{0, 0, width, bar_height}; }
  constexpr Rect status_bar() const { return Rect{0, height - bar_height, width, height}; }
};

}  // namespace seeflow
