#include "kelvinprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/io.hpp"

namespace kp {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};

cplx offset(Vec2 x, Vec2 xi) {
  const cplx z{x.x - xi.x, x.y - xi.y};
  if (z == cplx{}) fail(ErrorCode::Domain, "v_tau is singular at the probe point");
  return z;
}

// dv/dz = i tau / z^2 v, so d/dx1 = i tau / z^2 v and d/dx2 = -tau / z^2 v.
cplx normal_factor(Side side) {
  switch (side) {
    case Side::Top: return {-1.0, 0.0};
    case Side::Bottom: return {1.0, 0.0};
    case Side::Right: return I_UNIT;
    case Side::Left: return -I_UNIT;
  }
  return {};
}

bool on_side(Vec2 x, Side side, const SlabGeometry& g) {
  const double tol = 1e-12 * std::max(g.a(), g.b());
  const bool in_x = x.x >= -tol && x.x <= g.a() + tol;
  const bool in_y = x.y >= -tol && x.y <= g.b() + tol;
  switch (side) {
    case Side::Top: return std::abs(x.y - g.b()) <= tol && in_x;
    case Side::Bottom: return std::abs(x.y) <= tol && in_x;
    case Side::Right: return std::abs(x.x - g.a()) <= tol && in_y;
    case Side::Left: return std::abs(x.x) <= tol && in_y;
  }
  return false;
}

// Per-point data reused across the tau grid: exponent w with v = exp(-tau w),
// and 1/z^2.
struct PointKernel {
  cplx w;
  cplx inv_z2;
  // i/z = (x - xi).(e2 + i e1) / |x - xi|^2.
  explicit PointKernel(cplx z) : w(I_UNIT / z), inv_z2(1.0 / (z * z)) {}
  cplx v(double tau) const { return std::exp(-tau * w); }
};

struct EndpointSample {
  PointKernel kernel;
  double g;
  double u;
};

IndicatorSamples evaluate(const CauchyData& cauchy, const ProbeConfig& cfg, std::optional<double> cut) {
  const Mesh& mesh = *cauchy.mesh;
  cfg.validate(mesh.geom);
  if (cauchy.u.size() != mesh.boundary_nodes.size() || cauchy.g.edge_values.size() != mesh.boundary_edges.size())
    fail(ErrorCode::InvalidArgument, "Cauchy data does not match its mesh");

  // Quadrature segments: the whole edge, or the part above the cut.
  struct Segment {
    EndpointSample p, q;
    cplx normal;
    double length;
  };
  std::vector<Segment> segs;
  segs.reserve(mesh.boundary_edges.size());
  // The trace is only defined up to a constant; evaluate it in the zero-mean
  // gauge so the result does not depend on that constant even though the
  // discrete boundary sum of dv/dnu is not exactly zero.
  const double u_mean = boundary_integral(mesh, cauchy.u) / boundary_length(mesh);
  std::vector<PointKernel> node_kernels;
  node_kernels.reserve(mesh.boundary_nodes.size());
  for (int n : mesh.boundary_nodes) node_kernels.emplace_back(offset(mesh.nodes[n], cfg.xi));

  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    EndpointSample p{node_kernels[edge.ia], cauchy.g.edge_values[e][0], cauchy.u[edge.ia] - u_mean};
    EndpointSample q{node_kernels[edge.ib], cauchy.g.edge_values[e][1], cauchy.u[edge.ib] - u_mean};
    double length = edge.length;
    if (cut) {
      const double ya = mesh.nodes[edge.a].y, yb = mesh.nodes[edge.b].y;
      const bool in_a = ya > *cut, in_b = yb > *cut;
      if (!in_a && !in_b) continue;
      if (in_a != in_b) {
        // Vertical edge crossing the cut: keep the upper part.
        const double t = (*cut - ya) / (yb - ya);
        const Vec2 pa = mesh.nodes[edge.a], pb = mesh.nodes[edge.b];
        const Vec2 pc{pa.x + t * (pb.x - pa.x), *cut};
        EndpointSample mid{PointKernel(offset(pc, cfg.xi)), p.g + t * (q.g - p.g), p.u + t * (q.u - p.u)};
        if (in_a) {
          length *= t;
          q = mid;
        } else {
          length *= (1.0 - t);
          p = mid;
        }
      }
    }
    segs.push_back({p, q, normal_factor(edge.side), length});
  }

  IndicatorSamples out;
  out.xi = cfg.xi;
  out.tau = cfg.tau_grid;
  const double total_length = boundary_length(mesh);
  for (double tau : cfg.tau_grid) {
    cplx sum{};
    double max_gv = 0.0;
    for (const auto& s : segs) {
      auto integrand = [&](const EndpointSample& ep) {
        const cplx v = ep.kernel.v(tau);
        max_gv = std::max(max_gv, std::abs(ep.g * v));
        const cplx dv = s.normal * tau * ep.kernel.inv_z2 * v;
        return ep.g * v - ep.u * dv;
      };
      sum += 0.5 * s.length * (integrand(s.p) + integrand(s.q));
    }
    const double floor = 1e-14 * total_length * max_gv;
    const bool ok = std::abs(sum) > floor && std::isfinite(std::abs(sum));
    out.value.push_back(sum);
    out.valid.push_back(ok ? 1 : 0);
    out.log_magnitude.push_back(ok ? std::log(std::abs(sum)) : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace

cplx v_tau(Vec2 x, Vec2 xi, double tau) { return PointKernel(offset(x, xi)).v(tau); }

cplx dv_dnu(Vec2 x, Side side, Vec2 xi, double tau, const SlabGeometry& geom) {
  if (!on_side(x, side, geom)) fail(ErrorCode::InvalidArgument, std::string("point is not on the ") + side_name(side) + " face");
  const PointKernel k(offset(x, xi));
  return normal_factor(side) * tau * k.inv_z2 * k.v(tau);
}

cplx dv_dx2(Vec2 x, Vec2 xi, double tau) {
  const PointKernel k(offset(x, xi));
  return -tau * k.inv_z2 * k.v(tau);
}

void ProbeConfig::validate(const SlabGeometry& geom) const {
  if (!(xi.y > geom.b())) fail(ErrorCode::Domain, "probe point must lie strictly above the slab");
  for (std::size_t k = 0; k < tau_grid.size(); ++k) {
    if (!(tau_grid[k] > 0.0)) fail(ErrorCode::InvalidArgument, "tau values must be positive");
    if (k > 0 && !(tau_grid[k] > tau_grid[k - 1])) fail(ErrorCode::InvalidArgument, "tau grid must be strictly increasing");
  }
}

std::size_t IndicatorSamples::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

IndicatorSamples indicator(const CauchyData& cauchy, const ProbeConfig& cfg) { return evaluate(cauchy, cfg, std::nullopt); }

IndicatorSamples indicator_partial(const CauchyData& cauchy, const ProbeConfig& cfg) {
  if (!cfg.delta) fail(ErrorCode::InvalidArgument, "partial indicator needs a delta");
  const auto& geom = cauchy.mesh->geom;
  const double cut = geom.c() - *cfg.delta;
  auto out = evaluate(cauchy, cfg, cut < 0.0 ? std::nullopt : std::optional<double>(cut));
  if (!cfg.sup_s_bound) {
    out.trusted = false;
    out.warning = "no bound on s_Sigma supplied; delta condition unchecked";
  } else {
    const double rhs = geom.c() - (geom.b() + cfg.epsilon(geom) - 2.0 * *cfg.sup_s_bound);
    if (!(*cfg.delta > rhs)) {
      out.trusted = false;
      out.warning = "delta does not exceed c - (b + epsilon - 2M)";
    }
  }
  return out;
}

cplx indicator_from_jump(const std::vector<CrackJump>& jumps, double line_height, Vec2 xi, double tau) {
  cplx sum{};
  for (const auto& cj : jumps) {
    if (cj.x.size() != cj.jump.size()) fail(ErrorCode::InvalidArgument, "jump stations and values differ in length");
    for (std::size_t k = 0; k + 1 < cj.x.size(); ++k) {
      const double h = cj.x[k + 1] - cj.x[k];
      const cplx fa = cj.jump[k] * dv_dx2({cj.x[k], line_height}, xi, tau);
      const cplx fb = cj.jump[k + 1] * dv_dx2({cj.x[k + 1], line_height}, xi, tau);
      sum += 0.5 * h * (fa + fb);
    }
  }
  return -sum;
}

CauchyData add_noise(const CauchyData& cauchy, double level, std::uint64_t seed) {
  if (!(level >= 0.0)) fail(ErrorCode::InvalidArgument, "noise level must be non-negative");
  CauchyData out = cauchy;
  if (level == 0.0) return out;
  double umax = 0.0;
  for (double v : cauchy.u) umax = std::max(umax, std::abs(v));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, level * umax);
  for (auto& v : out.u) v += normal(rng);
  const double shift = boundary_integral(*out.mesh, out.u) / boundary_length(*out.mesh);
  for (auto& v : out.u) v -= shift;
  out.normalization += shift;
  return out;
}

void write_indicator_csv(std::ostream& os, const IndicatorSamples& s, const std::string& preamble) {
  os << preamble << "tau,re,im,log_abs,valid\n";
  for (std::size_t k = 0; k < s.tau.size(); ++k)
    os << format_double(s.tau[k]) << ',' << format_double(s.value[k].real()) << ','
       << format_double(s.value[k].imag()) << ',' << format_double(s.log_magnitude[k]) << ','
       << static_cast<int>(s.valid[k]) << '\n';
}

}  // namespace kp
