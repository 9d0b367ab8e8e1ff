#include "kelvinprobe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kelvinprobe/error.hpp"

namespace kp {

SlabGeometry::SlabGeometry(double a, double b, double c, Vec2 origin_shift)
    : a_(a), b_(b), c_(c), shift_(origin_shift) {
  if (!(a > 0.0)) fail(ErrorCode::InvalidArgument, "slab width a must be positive");
  if (!(b > 0.0)) fail(ErrorCode::InvalidArgument, "slab height b must be positive");
  if (!(c > 0.0 && c < b)) fail(ErrorCode::InvalidArgument, "crack line height must satisfy 0 < c < b");
}

CrackSet CrackSet::create(std::vector<Interval> intervals, double line_height, double slab_width,
                          std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  CrackSet out;
  out.c_ = line_height;
  out.a_ = slab_width;
  for (auto& iv : intervals) {
    if (!(iv.lo < iv.hi)) {
      std::ostringstream os;
      os << "crack interval [" << iv.lo << ", " << iv.hi << "] is empty or inverted";
      fail(ErrorCode::InvalidArgument, os.str());
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& p, const Interval& q) { return p.lo < q.lo; });
  for (auto iv : intervals) {
    if (iv.lo < 0.0 || iv.hi > slab_width) {
      warn("crack interval clipped to the slab");
      iv.lo = std::max(iv.lo, 0.0);
      iv.hi = std::min(iv.hi, slab_width);
      if (!(iv.lo < iv.hi)) continue;
    }
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      warn("overlapping or touching crack intervals merged");
      out.intervals_.back().hi = std::max(out.intervals_.back().hi, iv.hi);
      continue;
    }
    out.intervals_.push_back(iv);
  }
  if (!out.intervals_.empty() && !out.reaches_edges())
    warn("crack set does not reach both lateral edges");
  return out;
}

std::vector<Interval> CrackSet::joined() const {
  std::vector<Interval> w;
  double cursor = 0.0;
  for (const auto& iv : intervals_) {
    if (iv.lo > cursor) w.push_back({cursor, iv.lo});
    cursor = iv.hi;
  }
  if (cursor < a_) w.push_back({cursor, a_});
  return w;
}

std::vector<double> CrackSet::tips() const {
  std::vector<double> t;
  for (const auto& iv : intervals_) {
    if (iv.lo > 0.0) t.push_back(iv.lo);
    if (iv.hi < a_) t.push_back(iv.hi);
  }
  return t;
}

bool CrackSet::in_crack(double x1) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x1](const Interval& iv) { return iv.contains(x1); });
}

bool CrackSet::reaches_edges() const {
  return !intervals_.empty() && intervals_.front().lo == 0.0 && intervals_.back().hi == a_;
}

double ProbingLine::standoff(double xi1_user) const {
  return std::min(max_standoff, std::max(std::abs(xi1_user - center) / slope_divisor, min_standoff));
}

double ProbingLine::height(double xi1, const SlabGeometry& geom) const {
  const double value = standoff(geom.x_to_user(xi1));
  if (reference == Reference::SlabTop) return geom.b() + value;
  return value - geom.origin_shift().y;
}

void ProbingLine::validate(const SlabGeometry& geom) const {
  if (!(min_standoff > 0.0) || !(max_standoff >= min_standoff) || !(slope_divisor > 0.0))
    fail(ErrorCode::InvalidArgument, "probing line needs 0 < min_standoff <= max_standoff and slope_divisor > 0");
  // The height is piecewise linear in x1, so checking the kinks and ends suffices.
  const double kinks[] = {0.0, geom.a(), geom.x_to_slab(center),
                          geom.x_to_slab(center - slope_divisor * min_standoff),
                          geom.x_to_slab(center + slope_divisor * min_standoff)};
  for (double x : kinks) {
    const double xc = std::clamp(x, 0.0, geom.a());
    if (!(height(xc, geom) > geom.b()))
      fail(ErrorCode::InvalidArgument, "probing line must lie strictly above the slab");
  }
}

Vec2 gamma_eps(double xi1, const ProbingLine& line, const SlabGeometry& geom) {
  return {xi1, line.height(xi1, geom)};
}

namespace {

// Distance along the crack line from x1 to the nearest crack point.
double distance_to_cracks(double x1, const CrackSet& cracks) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& iv : cracks.intervals()) {
    if (iv.contains(x1)) return 0.0;
    best = std::min(best, std::min(std::abs(x1 - iv.lo), std::abs(x1 - iv.hi)));
  }
  return best;
}

void require_above_line(Vec2 xi, const CrackSet& cracks) {
  if (!(xi.y > cracks.line_height()))
    fail(ErrorCode::Domain, "probe point must lie strictly above the crack line");
}

}  // namespace

double s_sigma_analytic(Vec2 xi, const CrackSet& cracks) {
  require_above_line(xi, cracks);
  const double h = xi.y - cracks.line_height();
  const double d = distance_to_cracks(xi.x, cracks);
  if (std::isinf(d)) return d;
  // A point (x, c) lies inside the disc exactly when s > ((x - xi1)^2 + h^2) / (2h).
  return (d * d + h * h) / (2.0 * h);
}

TipContact single_tip_contact(Vec2 xi, const CrackSet& cracks) {
  require_above_line(xi, cracks);
  const auto tips = cracks.tips();
  const double scale = std::max(1.0, cracks.slab_width());
  const double tol = 1e-12 * scale;
  const double d = distance_to_cracks(xi.x, cracks);
  if (std::isinf(d)) return {};

  auto tip_at = [&](double x) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < tips.size(); ++j)
      if (std::abs(tips[j] - x) <= tol) return j;
    return std::nullopt;
  };

  if (d <= tol) {
    // Tangent to the line at (xi1, c): a single point, which counts only if it is a tip.
    auto j = tip_at(xi.x);
    if (j) return {true, j};
    return {};
  }
  // Contact candidates sit at distance d on either side.
  auto left = tip_at(xi.x - d);
  auto right = tip_at(xi.x + d);
  const bool left_hit = left.has_value() || cracks.in_crack(xi.x - d);
  const bool right_hit = right.has_value() || cracks.in_crack(xi.x + d);
  if (left_hit && right_hit) return {};
  if (left) return {true, left};
  if (right) return {true, right};
  return {};
}

}  // namespace kp
