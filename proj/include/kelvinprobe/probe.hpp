#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/geometry.hpp"

namespace kp {

using cplx = std::complex<double>;

// Kelvin-transformed exponential solution
//   v_tau(x; xi) = exp(-tau (x - xi).(e2 + i e1) / |x - xi|^2),
// harmonic away from xi. With z = (x1 - xi1) + i (x2 - xi2) this is exp(-i tau / z).
cplx v_tau(Vec2 x, Vec2 xi, double tau);

// Outward normal derivative of v_tau on a face of the rectangle. Throws if
// `x` does not lie on the tagged face.
cplx dv_dnu(Vec2 x, Side side, Vec2 xi, double tau, const SlabGeometry& geom);

// Partial derivative of v_tau in x2 (no orientation).
cplx dv_dx2(Vec2 x, Vec2 xi, double tau);

struct ProbeConfig {
  Vec2 xi;                          // slab frame, strictly above the slab
  std::vector<double> tau_grid;     // positive, strictly increasing
  std::optional<double> delta;      // partial-boundary cutoff: keep x2 > c - delta
  std::optional<double> sup_s_bound;  // assumed bound M on s_Sigma along the probing line

  // Height of the probe point above the slab top.
  double epsilon(const SlabGeometry& geom) const { return xi.y - geom.b(); }
  void validate(const SlabGeometry& geom) const;
};

struct IndicatorSamples {
  Vec2 xi;
  std::vector<double> tau;
  std::vector<cplx> value;
  std::vector<double> log_magnitude;  // NaN where the sample is below the floor
  std::vector<char> valid;
  bool trusted = true;
  std::string warning;

  std::size_t valid_count() const;
};

// Trapezoid rule over the outer boundary of g v_tau - u dv_tau/dnu, one value
// per tau, with u taken in its zero boundary-mean gauge. A sample is valid
// when |I| exceeds
//   1e-14 * boundary_length * max |g v_tau|.
IndicatorSamples indicator(const CauchyData& cauchy, const ProbeConfig& cfg);

// Same integrand restricted to the boundary part with x2 > c - delta. Edges
// crossing the cut are clipped with linear interpolation of g and u.
IndicatorSamples indicator_partial(const CauchyData& cauchy, const ProbeConfig& cfg);

// Crack-line representation  I = -int_Sigma (u+ - u-) dv_tau/dx2 ds,
// trapezoid over the jump stations with the derivative taken on x2 = c.
cplx indicator_from_jump(const std::vector<CrackJump>& jumps, double line_height, Vec2 xi, double tau);

// Gaussian noise on the trace with standard deviation level * max|u|, then
// re-normalised to zero boundary mean. Deterministic for a given seed.
CauchyData add_noise(const CauchyData& cauchy, double level, std::uint64_t seed);

// CSV: tau,re,im,log_abs,valid
void write_indicator_csv(std::ostream& os, const IndicatorSamples& s, const std::string& preamble = {});

}  // namespace kp
