#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "kelvinprobe/geometry.hpp"

namespace kp {

using cplx = std::complex<double>;

// Parameters of the tip integral
//   I_n(tau) = int_0^eta r^((2n-1)/2) / (r - s0 zbar)^2 exp(i tau / (r - s0 zbar)) dr,
// with zbar = -cos(alpha) - i (1 + sin(alpha)).
struct OracleCase {
  int n = 1;
  double s0 = 1.0;
  double alpha = 0.0;
  std::optional<double> eta_prime;  // defaults to 0.5 s0 (1 + sin alpha) / cos alpha
  std::vector<double> tau_list{8.0, 16.0, 32.0, 64.0, 100.0};

  double eta() const;
  cplx zbar() const;
  void validate() const;
};

struct QuadratureResult {
  cplx value;
  double error_estimate = 0.0;
};

// Unscaled integral with an arbitrary complex parameter in place of zbar,
// adaptive Gauss-Kronrod after r = t^2. Meant for moderate tau.
QuadratureResult tip_integral_raw(int n, double s0, cplx zeta, double eta, double tau);

// tau^((2n+1)/2) e^(-tau/(2 s0)) e^(-i tau cos(alpha) / (2 s0 (1 + sin alpha))) I_n(tau).
// The exponential factors are folded into the integrand so nothing overflows.
// Adaptive Gauss-Kronrod 15 in t = sqrt(r); throws ErrorCode::Numerical with
// the achieved estimate when the absolute tolerance 1e-12 (on the
// e^(-tau/(2 s0)) scaled integral) is not met.
QuadratureResult scaled_tip_integral(const OracleCase& c, double tau);

// Same scaled quantity from composite 20-point Gauss-Legendre in r on panels
// graded geometrically towards r = 0. `error_estimate` is the change when
// every panel is halved.
QuadratureResult scaled_tip_integral_fixed(const OracleCase& c, double tau);

// -i s0^(2n-1) 2^((2n-1)/2) (1 + sin alpha)^((2n-1)/2) e^(i (2n-1) alpha / 2) Gamma((2n+1)/2)
cplx tip_limit_closed_form(const OracleCase& c);

struct TipLimitRow {
  double tau = 0.0;
  cplx scaled;        // adaptive route
  cplx scaled_fixed;  // independent fixed route
  double quad_error = 0.0;
  double ratio_error = 0.0;  // |scaled / limit - 1|
};

struct TipLimitReport {
  OracleCase input;
  cplx limit;
  std::vector<TipLimitRow> rows;
  double fitted_rate = 0.0;  // slope of log|ratio-1| against log tau
  bool monotone = false;     // |ratio-1| non-increasing along tau_list
  bool slow = false;         // near the alpha range boundary or not monotone
  bool pass = false;         // |ratio-1| < 0.02 at the largest tau

  std::string to_json() const;
  std::string to_text() const;
};

TipLimitReport verify_tip_limit(const OracleCase& c);

struct DichotomyPoint {
  Vec2 x;
  double rate = 0.0;  // (x - xi).(-e2) / |x - xi|^2 - 1/(2s)
  bool inside = false;
  bool agrees = false;
};

struct DichotomyReport {
  double s = 0.0;
  Vec2 xi;
  std::vector<DichotomyPoint> points;
  bool all_agree = false;
};

// Exact exponent rate of e^(-tau/(2s)) |v_tau(x)| for each point; a positive
// rate is expected strictly inside B_s(xi - s e2), a negative one outside.
// Points within 1e-12 s of the circle (or at xi) are rejected.
DichotomyReport verify_decay_dichotomy(double s, Vec2 xi, const std::vector<Vec2>& points);

}  // namespace kp
