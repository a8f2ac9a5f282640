#pragma once

#include <cmath>
#include <vector>

#include "zsspec/contour.hpp"
#include "zsspec/geom.hpp"

namespace testing {

using zs::cplx;

inline zs::AnchorSet anchors(std::vector<cplx> pts) { return zs::AnchorSet(std::move(pts)); }

inline zs::Contour segment(cplx a, cplx b) {
  zs::Contour K;
  K.arcs.push_back(zs::make_segment(a, b));
  return K;
}

/// Segment from i down to the real axis, tilted by theta (radians) from the vertical.
inline zs::Contour tilted(double theta) { return segment({0.0, 1.0}, {std::tan(theta), 0.0}); }

inline zs::PolyContinuum polyline(std::vector<std::vector<cplx>> arcs) {
  std::vector<zs::Arc> out;
  for (auto& a : arcs) out.push_back(zs::Arc{std::move(a), false});
  return zs::make_continuum(std::move(out));
}

inline double deg(double d) { return d * zs::kPi / 180.0; }

}  // namespace testing
