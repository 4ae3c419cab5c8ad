#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "mmtab/text.hpp"

namespace mmtab {

/// Average-advance text measurement. No shaping or kerning: widths are the
/// sum of per-glyph advances in 1/1000 em, which keeps layout identical on
/// every platform.
class FontMetrics {
 public:
  enum class Kind { Proportional, Monospace };

  static FontMetrics for_family(std::string_view family) {
    const std::string f = text::to_lower(family);
    auto has = [&](std::string_view needle) { return f.find(needle) != std::string::npos; };
    if (has("mono") || has("courier") || has("consolas") || has("menlo") || has("code"))
      return FontMetrics(Kind::Monospace, 1.0);
    if (has("verdana") || has("tahoma")) return FontMetrics(Kind::Proportional, 1.12);
    if (has("times") || has("georgia") || (has("serif") && !has("sans"))) return FontMetrics(Kind::Proportional, 0.92);
    if (has("calibri") || has("segoe")) return FontMetrics(Kind::Proportional, 0.94);
    return FontMetrics(Kind::Proportional, 1.0);
  }

  Kind kind() const { return kind_; }

  /// Advance of one code point in 1/1000 em.
  double advance(char32_t cp) const {
    if (kind_ == Kind::Monospace) return is_wide(cp) ? 1200.0 : 600.0;
    if (cp >= 32 && cp < 127) return scale_ * kSansAdvances[cp - 32];
    if (is_wide(cp)) return 1000.0;
    return scale_ * 556.0;
  }

  /// Width in pixels at `font_px`, rounded up.
  int width_px(std::string_view utf8, double font_px) const {
    double units = 0;
    for (char32_t cp : text::utf8_decode(utf8)) units += advance(cp);
    return static_cast<int>(std::ceil(units * font_px / 1000.0 - 1e-9));
  }

 private:
  FontMetrics(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  static bool is_wide(char32_t cp) {
    return (cp >= 0x1100 && cp <= 0x115F) || (cp >= 0x2E80 && cp <= 0xA4CF) || (cp >= 0xAC00 && cp <= 0xD7A3) ||
           (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0xFF00 && cp <= 0xFF60) || (cp >= 0x20000 && cp <= 0x3FFFD);
  }

  // Helvetica advances for U+0020..U+007E.
  static constexpr std::array<double, 95> kSansAdvances = {
      278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278,   // ' '../
      556, 556, 556, 556, 556, 556, 556, 556, 556, 556,                                 // 0..9
      278, 278, 584, 584, 584, 556, 1015,                                               // :..@
      667, 667, 722, 722, 667, 611, 778, 722, 278, 500, 667, 556, 833,                  // A..M
      722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667, 667, 611,                  // N..Z
      278, 278, 278, 469, 556, 333,                                                     // [..`
      556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500, 222, 833,                  // a..m
      556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500,                  // n..z
      334, 260, 334, 584,                                                               // {..~
  };

  Kind kind_;
  double scale_;
};

}  // namespace mmtab
