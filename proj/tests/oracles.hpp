// Reference computations shared by the unit and acceptance tests. They avoid
// the formulas under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/geometry.hpp"
#include "kelvinprobe/probe.hpp"
#include "kelvinprobe/profiler.hpp"

namespace kp::oracle {

inline double point_segment_distance(Vec2 p, double x0, double x1, double y) {
  const double x = std::clamp(p.x, x0, x1);
  return std::hypot(p.x - x, p.y - y);
}

// Bisection on the radius of the disc tangent to xi from below. The discs are
// nested, so "avoids the cracks" is monotone in s.
inline double s_sigma_bruteforce(Vec2 xi, const CrackSet& cracks) {
  auto clear = [&](double s) {
    const Vec2 center{xi.x, xi.y - s};
    for (const auto& iv : cracks.intervals())
      if (point_segment_distance(center, iv.lo, iv.hi, cracks.line_height()) < s) return false;
    return true;
  };
  double lo = 0.0, hi = 1.0;
  while (clear(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (clear(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Crack [tip, end] carrying the leading-order jump 2 sqrt(r), r = x - tip,
// with stations graded quadratically towards the tip.
inline std::vector<CrackJump> synthetic_jump(double tip, double end, int stations) {
  CrackJump cj;
  cj.crack = {tip, end};
  for (int k = 0; k <= stations; ++k) {
    const double t = static_cast<double>(k) / stations;
    const double r = (end - tip) * t * t;
    cj.x.push_back(tip + r);
    cj.jump.push_back(2.0 * std::sqrt(r));
  }
  return {cj};
}

inline double synthetic_slope(const std::vector<CrackJump>& jumps, double c, Vec2 xi,
                              const std::vector<double>& taus) {
  IndicatorSamples s;
  s.xi = xi;
  for (double tau : taus) {
    const cplx v = indicator_from_jump(jumps, c, xi, tau);
    s.tau.push_back(tau);
    s.value.push_back(v);
    s.log_magnitude.push_back(std::log(std::abs(v)));
    s.valid.push_back(1);
  }
  return slope_estimate(s).slope;
}

}  // namespace kp::oracle
