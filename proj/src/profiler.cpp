#include "kelvinprobe/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/io.hpp"

namespace kp {

SlopeFit slope_estimate(const IndicatorSamples& s, const SlopeWindow& window) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < s.tau.size(); ++k) {
    if (!s.valid[k] || !std::isfinite(s.log_magnitude[k])) continue;
    if (window.tau_lo && s.tau[k] < *window.tau_lo) continue;
    if (window.tau_hi && s.tau[k] > *window.tau_hi) continue;
    xs.push_back(s.tau[k]);
    ys.push_back(s.log_magnitude[k]);
  }
  if (xs.size() < 3) fail(ErrorCode::Numerical, "fewer than three valid indicator samples");
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) fail(ErrorCode::Numerical, "degenerate tau samples");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.samples = xs.size();
  return fit;
}

Profile sweep_profile(const CauchyData& cauchy, const ProbingLine& line, const std::vector<double>& xi1_grid,
                      const std::vector<double>& tau_grid, const SweepOptions& opts) {
  const auto& geom = cauchy.mesh->geom;
  line.validate(geom);
  if (xi1_grid.empty() || tau_grid.empty()) fail(ErrorCode::InvalidArgument, "empty probing grid");
  for (std::size_t k = 1; k < xi1_grid.size(); ++k)
    if (!(xi1_grid[k] > xi1_grid[k - 1])) fail(ErrorCode::InvalidArgument, "xi1 grid must be strictly increasing");

  const std::size_t n = xi1_grid.size();
  Profile prof;
  prof.line = line;
  prof.xi1 = xi1_grid;
  prof.phi.assign(n, std::numeric_limits<double>::quiet_NaN());
  prof.r2.assign(n, std::numeric_limits<double>::quiet_NaN());
  prof.valid.assign(n, 0);

  auto work = [&](std::size_t k) {
    ProbeConfig cfg;
    cfg.xi = gamma_eps(xi1_grid[k], line, geom);
    cfg.tau_grid = tau_grid;
    try {
      const auto fit = slope_estimate(indicator(cauchy, cfg), opts.window);
      prof.phi[k] = fit.slope;
      prof.r2[k] = fit.r2;
      prof.valid[k] = 1;
    } catch (const Error&) {
      // Recorded as a gap in the profile.
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(opts.threads, 1, n);
  if (threads == 1) {
    for (std::size_t k = 0; k < n; ++k) work(k);
  } else {
    // Strided partition: each slot is written by exactly one worker.
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t k = t; k < n; k += threads) work(k);
      });
    for (auto& th : pool) th.join();
  }
  return prof;
}

std::vector<ProfilePeak> profile_maxima(const Profile& p, double prominence_fraction) {
  const std::size_t n = p.phi.size();
  std::vector<ProfilePeak> peaks;
  if (n < 3) return peaks;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < n; ++k)
    if (p.valid[k]) {
      lo = std::min(lo, p.phi[k]);
      hi = std::max(hi, p.phi[k]);
    }
  if (!(hi > lo)) return peaks;
  const double threshold = prominence_fraction * (hi - lo);

  std::size_t i = 1;
  while (i + 1 < n) {
    if (!p.valid[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && p.valid[j + 1] && p.phi[j + 1] == p.phi[i]) ++j;
    const double h = p.phi[i];
    const bool left_lower = p.valid[i - 1] && p.phi[i - 1] < h;
    const bool right_lower = j + 1 < n && p.valid[j + 1] && p.phi[j + 1] < h;
    if (left_lower && right_lower) {
      // Topographic prominence: the higher of the two valley floors reached
      // before the profile climbs above h (or ends).
      double left_min = h, right_min = h;
      for (std::size_t k = i; k-- > 0;) {
        if (!p.valid[k]) continue;
        if (p.phi[k] > h) break;
        left_min = std::min(left_min, p.phi[k]);
      }
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!p.valid[k]) continue;
        if (p.phi[k] > h) break;
        right_min = std::min(right_min, p.phi[k]);
      }
      const double prominence = h - std::max(left_min, right_min);
      if (prominence > threshold) peaks.push_back({i, j, prominence});
    }
    i = j + 1;
  }
  return peaks;
}

TipEstimate detect_tips(const Profile& p, double pressure_point, double prominence_fraction) {
  TipEstimate est;
  for (const auto& pk : profile_maxima(p, prominence_fraction)) {
    const double left_pos = p.xi1[pk.first];
    const double right_pos = p.xi1[pk.last];
    if (left_pos < pressure_point && (!est.x_left || left_pos > *est.x_left)) {
      est.x_left = left_pos;
      est.prominence_left = pk.prominence;
    }
    if (right_pos > pressure_point && (!est.x_right || right_pos < *est.x_right)) {
      est.x_right = right_pos;
      est.prominence_right = pk.prominence;
    }
  }
  return est;
}

void write_profile_csv(std::ostream& os, const Profile& p, const SlabGeometry& geom, double prominence_fraction,
                       const std::string& preamble) {
  std::vector<char> is_max(p.xi1.size(), 0);
  for (const auto& pk : profile_maxima(p, prominence_fraction))
    for (std::size_t k = pk.first; k <= pk.last; ++k) is_max[k] = 1;
  os << preamble << "xi1,phi,r2,is_max\n";
  for (std::size_t k = 0; k < p.xi1.size(); ++k)
    os << format_double(geom.x_to_user(p.xi1[k])) << ',' << format_double(p.phi[k]) << ','
       << format_double(p.r2[k]) << ',' << static_cast<int>(is_max[k]) << '\n';
}

ProfileCsv read_profile_csv(std::istream& is) {
  ProfileCsv out;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("xi1,phi", 0) != 0) fail(ErrorCode::Io, "profile CSV: unexpected header");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell[4];
    for (auto& c : cell)
      if (!std::getline(row, c, ',')) fail(ErrorCode::Io, "profile CSV: short row");
    try {
      out.xi1_user.push_back(std::stod(cell[0]));
      out.phi.push_back(cell[1] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell[1]));
      out.r2.push_back(cell[2] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell[2]));
      out.is_max.push_back(cell[3] == "1" ? 1 : 0);
    } catch (const std::exception&) {
      fail(ErrorCode::Io, "profile CSV: bad number in row '" + line + "'");
    }
  }
  if (!header) fail(ErrorCode::Io, "profile CSV: missing header");
  return out;
}

std::string profile_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<double>& true_tips, const std::vector<double>& detected_tips,
                        const std::string& title) {
  constexpr double W = 900, H = 320, L = 60, R = 20, T = 40, B = 40;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    x0 = std::min(x0, xs[k]);
    x1 = std::max(x1, xs[k]);
    if (std::isfinite(ys[k])) {
      y0 = std::min(y0, ys[k]);
      y1 = std::max(y1, ys[k]);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 = std::isfinite(y0) ? y0 - 0.5 : 0.0;
    y1 = y0 + 1.0;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  auto interp = [&](double x) {
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
      if (xs[k] <= x && x <= xs[k + 1] && std::isfinite(ys[k]) && std::isfinite(ys[k + 1])) {
        const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
        return ys[k] + t * (ys[k + 1] - ys[k]);
      }
    return std::numeric_limits<double>::quiet_NaN();
  };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xv << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << yv << "</text>\n";
  }
  for (double t : true_tips)
    os << "<line x1=\"" << px(t) << "\" y1=\"" << T << "\" x2=\"" << px(t) << "\" y2=\"" << H - B
       << "\" stroke=\"red\" stroke-width=\"1\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (std::isfinite(ys[k])) os << px(xs[k]) << ',' << py(ys[k]) << ' ';
  os << "\"/>\n";
  for (double t : detected_tips) {
    const double y = interp(t);
    if (std::isfinite(y)) os << "<circle cx=\"" << px(t) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"red\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace kp
