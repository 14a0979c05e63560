#pragma once

// Word boxes, text lines, and cross-frame line matching.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "seeflow/geometry.hpp"

namespace seeflow {

struct WordBox {
  Rect box;
  std::string text;

  std::size_t char_count() const { return text.size(); }
  friend bool operator==(const WordBox&, const WordBox&) = default;
};

struct TextLine {
  Rect box;
  std::string text;
  std::size_t char_count = 0;  // characters of the merged words, joining spaces excluded
  std::size_t frame_index = 0;
  std::size_t line_ordinal = 0;

  constexpr Span span() const { return vertical_span(box); }
  friend bool operator==(const TextLine&, const TextLine&) = default;
};

// Scan order used by the merger: top-to-bottom by y1, then left-to-right by x1. The remaining
// keys only make the order total so the output does not depend on input order.
inline bool scan_order_less(const WordBox& a, const WordBox& b) {
  return std::tie(a.box.y1, a.box.x1, a.box.x2, a.box.y2, a.text) <
         std::tie(b.box.y1, b.box.x1, b.box.x2, b.box.y2, b.text);
}

// The two word-box merging conditions, on the line built so far (`left`, `left_chars`
// characters) and the next box in scan order.
//   1. the horizontal middle line of `right` lies within [left.y1, left.y2];
//   2. the horizontal gap right.x1 - left.x2 is less than the average character width
//      ((right width) + (left width)) / (total characters).
// Both are evaluated in exact integer arithmetic.
inline bool mergeable(const Rect& left, std::size_t left_chars, const Rect& right,
                      std::size_t right_chars) {
  const long long mid2 = static_cast<long long>(right.y1) + right.y2;
  if (mid2 < 2LL * left.y1 || mid2 > 2LL * left.y2) return false;
  const long long num_c = static_cast<long long>(left_chars + right_chars);
  if (num_c == 0) return false;
  const long long gap = static_cast<long long>(right.x1) - left.x2;
  const long long widths = static_cast<long long>(right.width()) + left.width();
  return gap * num_c < widths;
}

// Words with empty text are ignored. Lines come out in scan order of their first word.
inline std::vector<TextLine> merge_word_boxes(std::vector<WordBox> words, std::size_t frame_index = 0) {
  std::erase_if(words, [](const WordBox& w) { return w.text.empty(); });
  std::sort(words.begin(), words.end(), scan_order_less);

  std::vector<TextLine> lines;
  for (const auto& w : words) {
    if (!lines.empty() &&
        mergeable(lines.back().box, lines.back().char_count, w.box, w.char_count())) {
      TextLine& cur = lines.back();
      cur.box = united(cur.box, w.box);
      cur.text += ' ';
      cur.text += w.text;
      cur.char_count += w.char_count();
      continue;
    }
    lines.push_back(TextLine{w.box, w.text, w.char_count(), frame_index, lines.size()});
  }
  return lines;
}

inline std::size_t longest_common_substring(std::string_view s, std::string_view t) {
  if (s.empty() || t.empty()) return 0;
  std::vector<std::size_t> prev(t.size() + 1, 0), cur(t.size() + 1, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    for (std::size_t j = 1; j <= t.size(); ++j) {
      cur[j] = s[i - 1] == t[j - 1] ? prev[j - 1] + 1 : 0;
      best = std::max(best, cur[j]);
    }
    std::swap(prev, cur);
  }
  return best;
}

// Longest-common-substring length over the longer string's length.
inline double text_similarity(std::string_view s, std::string_view t) {
  const std::size_t longest = std::max(s.size(), t.size());
  if (longest == 0 || s == t) return 1.0;
  return static_cast<double>(longest_common_substring(s, t)) / static_cast<double>(longest);
}

struct LinePair {
  std::size_t a = 0;
  std::size_t b = 0;
  double similarity = 0.0;

  friend bool operator==(const LinePair&, const LinePair&) = default;
};

struct LineMatching {
  std::vector<LinePair> pairs;

  std::optional<std::size_t> partner_of_a(std::size_t a) const {
    for (const auto& p : pairs)
      if (p.a == a) return p.b;
    return std::nullopt;
  }
  bool contains(std::size_t a, std::size_t b) const {
    return std::any_of(pairs.begin(), pairs.end(),
                       [&](const LinePair& p) { return p.a == a && p.b == b; });
  }
};

inline constexpr double kDefaultLineMatchThreshold = 0.95;

namespace detail {

inline constexpr double kSimilarityEps = 1e-9;

struct MatchScore {
  std::size_t count = 0;
  double similarity = 0.0;
};

inline bool better(const MatchScore& x, const MatchScore& y) {
  if (x.count != y.count) return x.count > y.count;
  return x.similarity > y.similarity + kSimilarityEps;
}

inline bool same_score(const MatchScore& x, const MatchScore& y) {
  return x.count == y.count && std::abs(x.similarity - y.similarity) <= kSimilarityEps;
}

}  // namespace detail

// Order-preserving matching of two line lists. A pair is admissible when its similarity
// reaches `threshold`. Picks maximum cardinality, then maximum total similarity, then the
// lexicographically smallest list of (a, b) pairs. Pair members are list positions.
inline LineMatching match_text_lines(const std::vector<TextLine>& lines_a,
                                     const std::vector<TextLine>& lines_b,
                                     double threshold = kDefaultLineMatchThreshold) {
  using detail::MatchScore;
  const std::size_t n = lines_a.size();
  const std::size_t m = lines_b.size();
  LineMatching result;
  if (n == 0 || m == 0) return result;

  std::vector<double> sim(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double la = static_cast<double>(lines_a[i].text.size());
      const double lb = static_cast<double>(lines_b[j].text.size());
      // The common substring is no longer than the shorter text; skip hopeless pairs.
      if (std::min(la, lb) < threshold * std::max(la, lb)) {
        sim[i * m + j] = -1.0;
        continue;
      }
      sim[i * m + j] = text_similarity(lines_a[i].text, lines_b[j].text);
    }
  auto admissible = [&](std::size_t i, std::size_t j) { return sim[i * m + j] >= threshold; };

  // best[i][j]: optimum over suffixes lines_a[i..], lines_b[j..].
  std::vector<MatchScore> best((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> MatchScore& { return best[i * (m + 1) + j]; };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      MatchScore v = at(i + 1, j);
      if (detail::better(at(i, j + 1), v)) v = at(i, j + 1);
      if (admissible(i, j)) {
        const MatchScore& rest = at(i + 1, j + 1);
        MatchScore take{rest.count + 1, rest.similarity + sim[i * m + j]};
        if (detail::better(take, v)) v = take;
      }
      at(i, j) = v;
    }
  }

  std::size_t i0 = 0, j0 = 0;
  MatchScore target = at(0, 0);
  while (target.count > 0) {
    bool found = false;
    for (std::size_t i = i0; i < n && !found; ++i) {
      for (std::size_t j = j0; j < m && !found; ++j) {
        if (!admissible(i, j)) continue;
        const MatchScore& rest = at(i + 1, j + 1);
        if (detail::same_score(MatchScore{rest.count + 1, rest.similarity + sim[i * m + j]}, target)) {
          result.pairs.push_back(LinePair{i, j, sim[i * m + j]});
          i0 = i + 1;
          j0 = j + 1;
          target = rest;
          found = true;
        }
      }
    }
    if (!found) break;
  }
  return result;
}

}  // namespace seeflow
