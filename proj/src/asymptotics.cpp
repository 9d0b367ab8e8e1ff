#include "kelvinprobe/asymptotics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "kelvinprobe/error.hpp"

namespace kp {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};
constexpr unsigned KRONROD_DEPTH = 15;
constexpr double KRONROD_RELATIVE = 1e-11;

using kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using legendre = boost::math::quadrature::gauss<double, 20>;

// Integrand in t = sqrt(r), dr = 2t dt, times exp(-shift). `shift` is the
// complex exponent at r = 0 so the scaled integrand stays bounded.
struct TipIntegrand {
  int n;
  cplx s0_zeta;
  double tau;
  cplx shift;

  cplx at_r(double r, double sqrt_r) const {
    const cplx w = r - s0_zeta;
    return std::pow(sqrt_r, 2 * n - 1) / (w * w) * std::exp(I_UNIT * tau / w - shift);
  }
  cplx operator()(double t) const { return 2.0 * t * at_r(t * t, t); }
};

TipIntegrand scaled_integrand(const OracleCase& c, double tau) {
  const double sa = std::sin(c.alpha), ca = std::cos(c.alpha);
  const cplx shift{tau / (2.0 * c.s0), tau * ca / (2.0 * c.s0 * (1.0 + sa))};
  return {c.n, c.s0 * c.zbar(), tau, shift};
}

double prefactor(const OracleCase& c, double tau) { return std::pow(tau, 0.5 * (2 * c.n + 1)); }

cplx fixed_rule(const TipIntegrand& f, double eta, double hmax, int split) {
  // Geometric panels towards the r^((2n-1)/2) endpoint, each further cut to
  // resolve the oscillation.
  constexpr int levels = 40;
  std::vector<double> breaks{0.0};
  for (int k = levels; k >= 0; --k) breaks.push_back(std::ldexp(eta, -k));
  cplx sum{};
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const int pieces = split * std::max(1, static_cast<int>(std::ceil((hi - lo) / hmax)));
    const double h = (hi - lo) / pieces;
    for (int q = 0; q < pieces; ++q)
      sum += legendre::integrate([&](double r) { return f.at_r(r, std::sqrt(r)); }, lo + q * h, lo + (q + 1) * h);
  }
  return sum;
}

}  // namespace

double OracleCase::eta() const {
  if (eta_prime) return *eta_prime;
  return 0.5 * s0 * (1.0 + std::sin(alpha)) / std::cos(alpha);
}

cplx OracleCase::zbar() const { return {-std::cos(alpha), -(1.0 + std::sin(alpha))}; }

void OracleCase::validate() const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "n must be a positive integer");
  if (!(s0 > 0.0)) fail(ErrorCode::InvalidArgument, "s0 must be positive");
  if (!(std::abs(alpha) < 0.5 * std::numbers::pi)) fail(ErrorCode::InvalidArgument, "alpha must lie in (-pi/2, pi/2)");
  if (!(eta() >= 0.0)) fail(ErrorCode::InvalidArgument, "eta' must be non-negative");
  for (std::size_t k = 0; k < tau_list.size(); ++k) {
    if (!(tau_list[k] > 0.0)) fail(ErrorCode::InvalidArgument, "tau values must be positive");
    if (k > 0 && !(tau_list[k] > tau_list[k - 1])) fail(ErrorCode::InvalidArgument, "tau list must be increasing");
  }
}

QuadratureResult tip_integral_raw(int n, double s0, cplx zeta, double eta, double tau) {
  if (n < 1 || !(s0 > 0.0) || !(eta >= 0.0)) fail(ErrorCode::InvalidArgument, "invalid tip integral parameters");
  if (eta == 0.0) return {};
  const TipIntegrand f{n, s0 * zeta, tau, {}};
  QuadratureResult out;
  out.value = kronrod::integrate(f, 0.0, std::sqrt(eta), KRONROD_DEPTH, KRONROD_RELATIVE, &out.error_estimate);
  return out;
}

QuadratureResult scaled_tip_integral(const OracleCase& c, double tau) {
  c.validate();
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  if (c.eta() == 0.0) return {};
  QuadratureResult out;
  out.value = kronrod::integrate(scaled_integrand(c, tau), 0.0, std::sqrt(c.eta()), KRONROD_DEPTH, KRONROD_RELATIVE,
                                 &out.error_estimate);
  if (!(out.error_estimate <= 1e-12)) {
    std::ostringstream msg;
    msg << "tip integral missed tolerance 1e-12 at tau=" << tau << " (estimate " << out.error_estimate << ")";
    fail(ErrorCode::Numerical, msg.str());
  }
  const double pf = prefactor(c, tau);
  out.value *= pf;
  out.error_estimate *= pf;
  return out;
}

QuadratureResult scaled_tip_integral_fixed(const OracleCase& c, double tau) {
  c.validate();
  if (!(tau > 0.0)) fail(ErrorCode::InvalidArgument, "tau must be positive");
  const double eta = c.eta();
  if (eta == 0.0) return {};
  const auto f = scaled_integrand(c, tau);
  // Local wavelength of exp(i tau / w) is at least 4 pi s0^2 (1 + sin alpha) / tau.
  const double hmax = std::min(0.25 * eta, std::numbers::pi * c.s0 * c.s0 * (1.0 + std::sin(c.alpha)) / tau);
  const cplx coarse = fixed_rule(f, eta, hmax, 1);
  const cplx fine = fixed_rule(f, eta, hmax, 2);
  const double pf = prefactor(c, tau);
  return {pf * fine, pf * std::abs(fine - coarse)};
}

cplx tip_limit_closed_form(const OracleCase& c) {
  c.validate();
  const double k = 2.0 * c.n - 1.0;
  const double mag = std::pow(c.s0, k) * std::pow(2.0, 0.5 * k) * std::pow(1.0 + std::sin(c.alpha), 0.5 * k) *
                     std::tgamma(0.5 * (2.0 * c.n + 1.0));
  return mag * std::polar(1.0, 0.5 * k * c.alpha - 0.5 * std::numbers::pi);
}

TipLimitReport verify_tip_limit(const OracleCase& c) {
  c.validate();
  if (c.tau_list.empty()) fail(ErrorCode::InvalidArgument, "empty tau list");
  TipLimitReport rep;
  rep.input = c;
  rep.limit = tip_limit_closed_form(c);
  for (double tau : c.tau_list) {
    const auto adaptive = scaled_tip_integral(c, tau);
    const auto fixed = scaled_tip_integral_fixed(c, tau);
    rep.rows.push_back({tau, adaptive.value, fixed.value, adaptive.error_estimate,
                        std::abs(adaptive.value / rep.limit - 1.0)});
  }

  std::vector<double> lx, ly;
  for (const auto& row : rep.rows)
    if (row.ratio_error > 0.0) {
      lx.push_back(std::log(row.tau));
      ly.push_back(std::log(row.ratio_error));
    }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      mx += lx[k];
      my += ly[k];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxx += (lx[k] - mx) * (lx[k] - mx);
      sxy += (lx[k] - mx) * (ly[k] - my);
    }
    rep.fitted_rate = sxy / sxx;
  }

  rep.monotone = true;
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (rep.rows[k].ratio_error > rep.rows[k - 1].ratio_error) rep.monotone = false;
  rep.slow = !rep.monotone || std::abs(c.alpha) > 1.2;
  rep.pass = rep.rows.back().ratio_error < 0.02;
  return rep;
}

std::string TipLimitReport::to_json() const {
  using nlohmann::json;
  json rows_json = json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"tau", r.tau},
                         {"scaled_re", r.scaled.real()},
                         {"scaled_im", r.scaled.imag()},
                         {"fixed_re", r.scaled_fixed.real()},
                         {"fixed_im", r.scaled_fixed.imag()},
                         {"quad_error", r.quad_error},
                         {"ratio_error", r.ratio_error}});
  json j{{"case", {{"n", input.n}, {"s0", input.s0}, {"alpha", input.alpha}, {"eta_prime", input.eta()}}},
         {"limit_re", limit.real()},
         {"limit_im", limit.imag()},
         {"rows", rows_json},
         {"fitted_rate", fitted_rate},
         {"monotone", monotone},
         {"slow", slow},
         {"pass", pass}};
  return j.dump(2) + "\n";
}

std::string TipLimitReport::to_text() const {
  std::ostringstream os;
  os << "tip integral oracle  n=" << input.n << " s0=" << input.s0 << " alpha=" << input.alpha
     << " eta'=" << input.eta() << "\n";
  os << "closed-form limit " << limit.real() << (limit.imag() < 0 ? " - " : " + ") << std::abs(limit.imag())
     << "i  |limit|=" << std::abs(limit) << "\n";
  os << std::setw(10) << "tau" << std::setw(16) << "|ratio-1|" << std::setw(16) << "fixed-adapt" << "\n";
  for (const auto& r : rows)
    os << std::setw(10) << r.tau << std::setw(16) << r.ratio_error << std::setw(16)
       << std::abs(r.scaled_fixed - r.scaled) << "\n";
  os << "fitted rate " << fitted_rate << (monotone ? "" : "  (not monotone)") << (slow ? "  [slow]" : "") << "\n";
  os << (pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

DichotomyReport verify_decay_dichotomy(double s, Vec2 xi, const std::vector<Vec2>& points) {
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "disc radius must be positive");
  DichotomyReport rep;
  rep.s = s;
  rep.xi = xi;
  rep.all_agree = true;
  const Vec2 center{xi.x, xi.y - s};
  for (const auto& x : points) {
    const Vec2 d = x - xi;
    const double r2 = d.x * d.x + d.y * d.y;
    if (r2 == 0.0) fail(ErrorCode::Domain, "point coincides with the probe point");
    const double dist = std::hypot(x.x - center.x, x.y - center.y);
    if (std::abs(dist - s) <= 1e-12 * s) fail(ErrorCode::Domain, "point lies on the probing circle");
    DichotomyPoint p;
    p.x = x;
    p.rate = -d.y / r2 - 0.5 / s;
    p.inside = dist < s;
    p.agrees = p.inside ? p.rate > 0.0 : p.rate < 0.0;
    rep.all_agree = rep.all_agree && p.agrees;
    rep.points.push_back(p);
  }
  return rep;
}

}  // namespace kp
