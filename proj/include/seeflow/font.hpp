#pragma once

// Built-in 8x16 monospace bitmap font for printable ASCII.
//
// Every glyph keeps the one-pixel cell border blank and puts ink in the top-left and
// bottom-right corners of its 6x14 interior, so the ink bounding box of any glyph is exactly
// columns [1,7) and rows [1,15) of its cell. The remaining interior bits come from a fixed
// per-character hash; the table is injective (checked in tests), which makes rendered text
// exactly recoverable from pixels.

#include <array>
#include <cstdint>
#include <map>
#include <optional>

namespace seeflow::font {

inline constexpr int kGlyphWidth = 8;
inline constexpr int kGlyphHeight = 16;
inline constexpr char kFirstPrintable = 32;
inline constexpr char kLastPrintable = 126;

using Glyph = std::array<std::uint8_t, kGlyphHeight>;  // bit x of row y set = ink at (x, y)

namespace detail {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr Glyph make_glyph(char c) {
  Glyph g{};
  if (c == ' ') return g;
  std::uint64_t state = static_cast<std::uint64_t>(static_cast<unsigned char>(c)) * 0x100000001B3ULL;
  for (int y = 1; y <= 14; ++y) {
    state = splitmix(state);
    std::uint8_t row = 0;
    for (int x = 1; x <= 6; ++x) {
      // ~3/8 ink density.
      if (((state >> (3 * x)) & 7U) < 3U) row = static_cast<std::uint8_t>(row | (1U << x));
    }
    g[static_cast<std::size_t>(y)] = row;
  }
  g[1] = static_cast<std::uint8_t>(g[1] | (1U << 1));
  g[14] = static_cast<std::uint8_t>(g[14] | (1U << 6));
  return g;
}

constexpr auto make_table() {
  std::array<Glyph, kLastPrintable - kFirstPrintable + 1> table{};
  for (int c = kFirstPrintable; c <= kLastPrintable; ++c)
    table[static_cast<std::size_t>(c - kFirstPrintable)] = make_glyph(static_cast<char>(c));
  return table;
}

inline constexpr auto kTable = make_table();

}  // namespace detail

constexpr bool is_printable(char c) { return c >= kFirstPrintable && c <= kLastPrintable; }

constexpr const Glyph& glyph(char c) {
  return detail::kTable[static_cast<std::size_t>(c - kFirstPrintable)];
}

constexpr bool ink(const Glyph& g, int x, int y) {
  return (g[static_cast<std::size_t>(y)] >> x) & 1U;
}

// Reverse lookup; nullopt for masks that are not in the table.
inline std::optional<char> lookup(const Glyph& mask) {
  static const std::map<Glyph, char> reverse = [] {
    std::map<Glyph, char> m;
    for (int c = kFirstPrintable; c <= kLastPrintable; ++c)
      m.emplace(detail::kTable[static_cast<std::size_t>(c - kFirstPrintable)], static_cast<char>(c));
    return m;
  }();
  auto it = reverse.find(mask);
  if (it == reverse.end()) return std::nullopt;
  return it->second;
}

}  // namespace seeflow::font
