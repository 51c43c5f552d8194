#pragma once
#include <cstdio>
#include <stdexcept>
#include <string>

#include "carpet/sampler.hpp"

namespace carpet {

// One filled <rect> per rectangle, generation order, y axis flipped to
// mathematical orientation. Output is byte-identical for identical input.
inline std::string render_svg(const RectSet& set, int width_px = 800) {
  if (set.rects.empty()) throw std::invalid_argument("render_svg: empty RectSet");
  if (width_px < 1) throw std::invalid_argument("render_svg: width_px >= 1");

  std::string out;
  out.reserve(64 + set.rects.size() * 96);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
                "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
                width_px, width_px, width_px, width_px);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double s = static_cast<double>(width_px);
  for (const Rect& r : set.rects) {
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.6f\" y=\"%.6f\" width=\"%.6f\" height=\"%.6f\" "
                  "fill=\"#1f3552\"/>\n",
                  r.x * s, (1.0 - r.y - r.h) * s, r.w * s, r.h * s);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace carpet
