#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kelvinprobe/geometry.hpp"
#include "kelvinprobe/probe.hpp"

namespace kp {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

// Optional tau window for the regression; the full grid is used by default.
struct SlopeWindow {
  std::optional<double> tau_lo;
  std::optional<double> tau_hi;
};

// Ordinary least squares of log|I| against tau over the valid samples.
// Throws ErrorCode::Numerical with fewer than three usable samples.
SlopeFit slope_estimate(const IndicatorSamples& samples, const SlopeWindow& window = {});

// Slope profile Phi(xi1) along the probing line. Positions are slab frame.
struct Profile {
  std::vector<double> xi1;
  std::vector<double> phi;  // NaN where the fit failed
  std::vector<double> r2;
  std::vector<char> valid;
  ProbingLine line;
};

struct SweepOptions {
  std::size_t threads = 1;
  SlopeWindow window;
};

Profile sweep_profile(const CauchyData& cauchy, const ProbingLine& line, const std::vector<double>& xi1_grid,
                      const std::vector<double>& tau_grid, const SweepOptions& opts = {});

struct ProfilePeak {
  std::size_t first = 0;  // plateau extent in grid indices
  std::size_t last = 0;
  double prominence = 0.0;
};

// Interior local maxima (plateaus allowed) whose prominence exceeds
// `prominence_fraction` of the profile's dynamic range. Grid endpoints never qualify.
std::vector<ProfilePeak> profile_maxima(const Profile& profile, double prominence_fraction = 0.02);

struct TipEstimate {
  std::optional<double> x_left;
  std::optional<double> x_right;
  double prominence_left = 0.0;
  double prominence_right = 0.0;

  std::optional<double> gap() const {
    if (x_left && x_right) return *x_right - *x_left;
    return std::nullopt;
  }
};

// Nearest qualifying maximum on each side of the pressure point (slab frame).
// Plateaus resolve to their outer end: leftmost point on the left, rightmost on the right.
TipEstimate detect_tips(const Profile& profile, double pressure_point, double prominence_fraction = 0.02);

// CSV: xi1,phi,r2,is_max with user-frame xi1.
void write_profile_csv(std::ostream& os, const Profile& profile, const SlabGeometry& geom,
                       double prominence_fraction = 0.02, const std::string& preamble = {});

struct ProfileCsv {
  std::vector<double> xi1_user;
  std::vector<double> phi;
  std::vector<double> r2;
  std::vector<char> is_max;
};
ProfileCsv read_profile_csv(std::istream& is);

// Standalone SVG line plot; markers are user-frame abscissae.
std::string profile_svg(const std::vector<double>& xi1_user, const std::vector<double>& phi,
                        const std::vector<double>& true_tips, const std::vector<double>& detected_tips,
                        const std::string& title);

}  // namespace kp
