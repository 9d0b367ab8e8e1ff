#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 p, Vec2 q) { return {p.x + q.x, p.y + q.y}; }
inline Vec2 operator-(Vec2 p, Vec2 q) { return {p.x - q.x, p.y - q.y}; }
inline bool operator==(Vec2 p, Vec2 q) { return p.x == q.x && p.y == q.y; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Rectangle ]0,a[ x ]0,b[ with the interface line at height c. All math runs
// in this frame; `origin_shift` is added on output to obtain user coordinates.
class SlabGeometry {
 public:
  SlabGeometry(double a, double b, double c, Vec2 origin_shift = {});

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  Vec2 origin_shift() const { return shift_; }

  Vec2 to_user(Vec2 p) const { return p + shift_; }
  Vec2 to_slab(Vec2 p) const { return p - shift_; }
  double x_to_user(double x) const { return x + shift_.x; }
  double x_to_slab(double x) const { return x - shift_.x; }
  double perimeter() const { return 2.0 * (a_ + b_); }

 private:
  double a_, b_, c_;
  Vec2 shift_;
};

// Closed crack intervals on the line x2 = c, strictly ordered and disjoint.
// The complement inside [0,a] is the joined (welded) set W.
class CrackSet {
 public:
  CrackSet() = default;

  // Sorts, clips to [0,a] and merges overlapping or touching intervals. Each
  // merge or clip appends a message to `warnings` when given.
  static CrackSet create(std::vector<Interval> intervals, double line_height, double slab_width,
                         std::vector<std::string>* warnings = nullptr);

  const std::vector<Interval>& intervals() const { return intervals_; }
  double line_height() const { return c_; }
  double slab_width() const { return a_; }
  bool empty() const { return intervals_.empty(); }

  // Joined intervals of [0,a] not covered by cracks.
  std::vector<Interval> joined() const;
  // Interior tips: crack endpoints strictly inside ]0,a[.
  std::vector<double> tips() const;
  bool in_crack(double x1) const;
  // True when the first crack starts at 0 and the last ends at a.
  bool reaches_edges() const;

  friend bool operator==(const CrackSet&, const CrackSet&) = default;

 private:
  std::vector<Interval> intervals_;
  double c_ = 0.0;
  double a_ = 0.0;
};

// Horizontal locus of probe points above the slab. The standoff grows
// linearly away from `center` and is clamped to [min_standoff, max_standoff]:
//   standoff(x1) = min(max_standoff, max(|x1 - center| / slope_divisor, min_standoff))
// where x1 and center are user-frame abscissae.
struct ProbingLine {
  enum class Reference { SlabTop, UserOrigin };

  double min_standoff = 0.5;
  double max_standoff = 2.0;
  double slope_divisor = 2.5;
  double center = 0.0;
  // SlabTop: the value is a height above x2 = b. UserOrigin: the value is the
  // user-frame ordinate of the probe point.
  Reference reference = Reference::UserOrigin;

  double standoff(double xi1_user) const;
  // Slab-frame probe height for a slab-frame abscissa.
  double height(double xi1, const SlabGeometry& geom) const;
  // Throws unless every point of the line over [0,a] sits strictly above the slab.
  void validate(const SlabGeometry& geom) const;
};

// Slab-frame probe point on the line.
Vec2 gamma_eps(double xi1, const ProbingLine& line, const SlabGeometry& geom);

// Radius of the largest disc B_s(xi - s e2) that avoids the crack set.
// Infinite for an empty crack set.
double s_sigma_analytic(Vec2 xi, const CrackSet& cracks);

struct TipContact {
  bool single_tip = false;
  std::optional<std::size_t> tip_index;  // index into CrackSet::tips()
};

// Whether the closed maximal disc touches the crack set at exactly one interior tip.
TipContact single_tip_contact(Vec2 xi, const CrackSet& cracks);

}  // namespace kp
