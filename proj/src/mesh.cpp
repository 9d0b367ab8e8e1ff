#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/io.hpp"

namespace kp {

const char* side_name(Side s) {
  switch (s) {
    case Side::Bottom: return "bottom";
    case Side::Right: return "right";
    case Side::Top: return "top";
    case Side::Left: return "left";
  }
  return "?";
}

Side side_from_name(const std::string& name) {
  if (name == "bottom") return Side::Bottom;
  if (name == "right") return Side::Right;
  if (name == "top") return Side::Top;
  if (name == "left") return Side::Left;
  fail(ErrorCode::InvalidArgument, "unknown boundary side '" + name + "'");
}

double perimeter_parameter(Vec2 p, const SlabGeometry& g) {
  const double a = g.a(), b = g.b();
  if (p.y == 0.0) return p.x;
  if (p.x == a) return a + p.y;
  if (p.y == b) return a + b + (a - p.x);
  return 2.0 * a + b + (b - p.y);
}

namespace {

// Sorted grid lines through every mandatory point, with the gaps between them
// split uniformly into pieces no longer than h.
std::vector<double> grid_lines(std::vector<double> mandatory, double lo, double hi, double h,
                               const std::vector<Interval>& min_two_pieces = {}) {
  for (auto& m : mandatory) m = std::clamp(m, lo, hi);
  std::sort(mandatory.begin(), mandatory.end());
  const double merge_tol = 1e-9 * (hi - lo);
  std::vector<double> pts;
  for (double m : mandatory)
    if (pts.empty() || m - pts.back() > merge_tol) pts.push_back(m);
  pts.front() = lo;
  pts.back() = hi;

  std::vector<double> lines{pts.front()};
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double p = pts[k], q = pts[k + 1];
    auto n = static_cast<long>(std::ceil((q - p) / h - 1e-9));
    for (const auto& iv : min_two_pieces)
      if (p >= iv.lo && q <= iv.hi) n = std::max(n, 2L);
    n = std::max(n, 1L);
    for (long i = 1; i < n; ++i) lines.push_back(p + (q - p) * static_cast<double>(i) / static_cast<double>(n));
    lines.push_back(q);
  }
  return lines;
}

struct GridPlan {
  std::vector<double> xs, ys;
  std::vector<char> active;  // per cell, row-major in j
  std::size_t nx = 0, ny = 0;
  std::size_t active_cells = 0;

  bool is_active(std::size_t i, std::size_t j) const { return active[j * nx + i] != 0; }
};

GridPlan plan_grid(const SlabGeometry& geom, const CrackSet& cracks, double width, double h) {
  const double a = geom.a(), b = geom.b(), c = geom.c();
  const double y_lo = c - 0.5 * width, y_hi = c + 0.5 * width;

  std::vector<double> xm{0.0, a};
  for (const auto& iv : cracks.intervals()) {
    xm.push_back(iv.lo);
    xm.push_back(iv.hi);
  }
  for (double t : cracks.tips())
    for (double off : {0.25 * h, 0.5 * h}) {
      if (t - off > 0.0) xm.push_back(t - off);
      if (t + off < a) xm.push_back(t + off);
    }

  std::vector<double> ym{0.0, b};
  std::vector<Interval> strip;
  if (!cracks.empty()) {
    ym.insert(ym.end(), {y_lo, y_hi, y_lo - 0.25 * h, y_lo - 0.5 * h, y_hi + 0.25 * h, y_hi + 0.5 * h});
    if (width >= h) ym.insert(ym.end(), {y_lo + 0.25 * h, y_hi - 0.25 * h});
    strip.push_back({y_lo, y_hi});
  }

  GridPlan plan;
  plan.xs = grid_lines(xm, 0.0, a, h);
  plan.ys = grid_lines(ym, 0.0, b, h, strip);
  plan.nx = plan.xs.size() - 1;
  plan.ny = plan.ys.size() - 1;
  plan.active.assign(plan.nx * plan.ny, 1);
  for (std::size_t j = 0; j < plan.ny; ++j) {
    const double yc = 0.5 * (plan.ys[j] + plan.ys[j + 1]);
    if (cracks.empty() || yc < y_lo || yc > y_hi) continue;
    for (std::size_t i = 0; i < plan.nx; ++i) {
      const double xc = 0.5 * (plan.xs[i] + plan.xs[i + 1]);
      if (cracks.in_crack(xc)) plan.active[j * plan.nx + i] = 0;
    }
  }
  plan.active_cells = static_cast<std::size_t>(std::count(plan.active.begin(), plan.active.end(), 1));
  return plan;
}

void finalize_boundary(Mesh& mesh) {
  std::vector<int> nodes;
  for (const auto& e : mesh.boundary_edges) {
    nodes.push_back(e.a);
    nodes.push_back(e.b);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(nodes.size());
  for (int n : nodes) keyed.emplace_back(perimeter_parameter(mesh.nodes[n], mesh.geom), n);
  std::sort(keyed.begin(), keyed.end());
  mesh.boundary_nodes.clear();
  mesh.arclength.clear();
  std::map<int, int> pos;
  for (const auto& [s, n] : keyed) {
    pos[n] = static_cast<int>(mesh.boundary_nodes.size());
    mesh.boundary_nodes.push_back(n);
    mesh.arclength.push_back(s);
  }
  for (auto& e : mesh.boundary_edges) {
    e.ia = pos.at(e.a);
    e.ib = pos.at(e.b);
    const Vec2 d = mesh.nodes[e.b] - mesh.nodes[e.a];
    e.length = std::hypot(d.x, d.y);
  }
}

}  // namespace

Mesh build_mesh(const SlabGeometry& geom, const CrackSet& cracks, double crack_width,
                std::size_t target_elements) {
  if (target_elements < 1000) fail(ErrorCode::InvalidArgument, "target_elements must be at least 1000");
  const double c = geom.c(), b = geom.b(), a = geom.a();
  if (!cracks.empty()) {
    if (!(crack_width > 0.0)) fail(ErrorCode::InvalidArgument, "crack width must be positive");
    if (!(crack_width < std::min(c, b - c)))
      fail(ErrorCode::InvalidArgument, "cavity would reach the top or bottom face: crack width too large");
    if (cracks.line_height() != c) fail(ErrorCode::InvalidArgument, "crack line height differs from geometry");
    if (cracks.slab_width() != a) fail(ErrorCode::InvalidArgument, "crack set built for a different slab width");
    const auto w = cracks.joined();
    if (w.empty()) fail(ErrorCode::InvalidArgument, "cracks cover the whole interface; the slab is disconnected");
    for (const auto& iv : w)
      if (iv.length() < 1e-9 * a) fail(ErrorCode::InvalidArgument, "cavities intersect each other");
  }

  const double target = static_cast<double>(target_elements);
  double h = std::sqrt(2.0 * a * b / target);
  GridPlan plan;
  for (int iter = 0; iter < 12; ++iter) {
    plan = plan_grid(geom, cracks, crack_width, h);
    const double ratio = 2.0 * static_cast<double>(plan.active_cells) / target;
    if (std::abs(ratio - 1.0) < 0.02) break;
    h *= std::sqrt(ratio);
  }

  Mesh mesh(geom);
  mesh.crack_width = cracks.empty() ? 0.0 : crack_width;
  const std::size_t nx = plan.nx, ny = plan.ny;
  std::vector<int> id((nx + 1) * (ny + 1), -1);
  auto node_index = [&](std::size_t i, std::size_t j) -> int& { return id[j * (nx + 1) + i]; };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      if (plan.is_active(i, j))
        for (auto [di, dj] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) node_index(i + di, j + dj) = 0;
  for (std::size_t j = 0; j <= ny; ++j)
    for (std::size_t i = 0; i <= nx; ++i)
      if (node_index(i, j) == 0) {
        node_index(i, j) = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back({plan.xs[i], plan.ys[j]});
      }

  // Diagonals mirror about the slab centre lines so symmetric data gives a
  // symmetric discretisation.
  mesh.triangles.reserve(2 * plan.active_cells);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      if (!plan.is_active(i, j)) continue;
      const int n00 = node_index(i, j), n10 = node_index(i + 1, j);
      const int n01 = node_index(i, j + 1), n11 = node_index(i + 1, j + 1);
      const double xc = 0.5 * (plan.xs[i] + plan.xs[i + 1]);
      const double yc = 0.5 * (plan.ys[j] + plan.ys[j + 1]);
      if ((xc < 0.5 * a) != (yc < 0.5 * b)) {
        mesh.triangles.push_back({n00, n10, n01});
        mesh.triangles.push_back({n10, n11, n01});
      } else {
        mesh.triangles.push_back({n00, n10, n11});
        mesh.triangles.push_back({n00, n11, n01});
      }
    }

  auto outer = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1, Side s) {
    BoundaryEdge e;
    e.a = node_index(i0, j0);
    e.b = node_index(i1, j1);
    e.side = s;
    mesh.boundary_edges.push_back(e);
  };
  for (std::size_t i = 0; i < nx; ++i)
    if (plan.is_active(i, 0)) outer(i, 0, i + 1, 0, Side::Bottom);
  for (std::size_t j = 0; j < ny; ++j)
    if (plan.is_active(nx - 1, j)) outer(nx, j, nx, j + 1, Side::Right);
  for (std::size_t i = nx; i-- > 0;)
    if (plan.is_active(i, ny - 1)) outer(i + 1, ny, i, ny, Side::Top);
  for (std::size_t j = ny; j-- > 0;)
    if (plan.is_active(0, j)) outer(0, j + 1, 0, j, Side::Left);

  // Faces between material and cavity cells, oriented with material on the left.
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      if (!plan.is_active(i, j)) continue;
      if (j + 1 < ny && !plan.is_active(i, j + 1))
        mesh.cavity_edges.push_back({node_index(i + 1, j + 1), node_index(i, j + 1)});
      if (j > 0 && !plan.is_active(i, j - 1)) mesh.cavity_edges.push_back({node_index(i, j), node_index(i + 1, j)});
      if (i + 1 < nx && !plan.is_active(i + 1, j))
        mesh.cavity_edges.push_back({node_index(i + 1, j), node_index(i + 1, j + 1)});
      if (i > 0 && !plan.is_active(i - 1, j)) mesh.cavity_edges.push_back({node_index(i, j + 1), node_index(i, j)});
    }

  for (const auto& iv : cracks.intervals())
    mesh.cavities.push_back({iv, c - 0.5 * crack_width, c + 0.5 * crack_width});
  finalize_boundary(mesh);
  return mesh;
}

std::size_t connected_components(const Mesh& mesh) {
  std::vector<int> parent(mesh.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> used(mesh.nodes.size(), 0);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) used[t[k]] = 1;
    parent[find(t[1])] = find(t[0]);
    parent[find(t[2])] = find(t[0]);
  }
  std::size_t count = 0;
  for (std::size_t n = 0; n < parent.size(); ++n)
    if (used[n] && find(static_cast<int>(n)) == static_cast<int>(n)) ++count;
  return count;
}

std::vector<BoundaryLoop> boundary_loops(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  std::map<int, int> next;
  for (const auto& [e, n] : directed)
    if (!directed.count({e.second, e.first})) next[e.first] = e.second;

  std::vector<BoundaryLoop> loops;
  std::map<int, bool> seen;
  for (const auto& [start, unused] : next) {
    if (seen[start]) continue;
    BoundaryLoop loop;
    int cur = start;
    while (!seen[cur]) {
      seen[cur] = true;
      loop.nodes.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) fail(ErrorCode::Internal, "open boundary chain");
      cur = it->second;
    }
    if (cur != start) fail(ErrorCode::Internal, "boundary chain does not close on its start");
    for (std::size_t k = 0; k < loop.nodes.size(); ++k) {
      const Vec2 p = mesh.nodes[loop.nodes[k]];
      const Vec2 q = mesh.nodes[loop.nodes[(k + 1) % loop.nodes.size()]];
      loop.signed_area += 0.5 * (p.x * q.y - q.x * p.y);
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

void write_mesh(std::ostream& os, const Mesh& m) {
  const auto& g = m.geom;
  const auto f = format_double;
  os << "kelvinprobe-mesh 1\n";
  os << "geometry " << f(g.a()) << ' ' << f(g.b()) << ' ' << f(g.c()) << ' ' << f(g.origin_shift().x) << ' '
     << f(g.origin_shift().y) << '\n';
  os << "crack_width " << f(m.crack_width) << '\n';
  os << "cavities " << m.cavities.size() << '\n';
  for (const auto& cv : m.cavities)
    os << f(cv.x.lo) << ' ' << f(cv.x.hi) << ' ' << f(cv.y_lo) << ' ' << f(cv.y_hi) << '\n';
  os << "nodes " << m.nodes.size() << '\n';
  for (const auto& p : m.nodes) os << f(p.x) << ' ' << f(p.y) << '\n';
  os << "triangles " << m.triangles.size() << '\n';
  for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os << "boundary_edges " << m.boundary_edges.size() << '\n';
  for (const auto& e : m.boundary_edges) os << e.a << ' ' << e.b << ' ' << side_name(e.side) << '\n';
  os << "cavity_edges " << m.cavity_edges.size() << '\n';
  for (const auto& e : m.cavity_edges) os << e[0] << ' ' << e[1] << '\n';
}

namespace {

std::size_t expect_section(std::istream& is, const std::string& name) {
  std::string tag;
  std::size_t n = 0;
  if (!(is >> tag >> n) || tag != name) fail(ErrorCode::Io, "mesh file: expected section '" + name + "'");
  return n;
}

}  // namespace

Mesh read_mesh(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "kelvinprobe-mesh" || version != 1)
    fail(ErrorCode::Io, "mesh file: bad header");
  std::string tag;
  double a, b, c, sx, sy, width;
  if (!(is >> tag >> a >> b >> c >> sx >> sy) || tag != "geometry") fail(ErrorCode::Io, "mesh file: bad geometry line");
  if (!(is >> tag >> width) || tag != "crack_width") fail(ErrorCode::Io, "mesh file: bad crack_width line");
  Mesh m(SlabGeometry(a, b, c, {sx, sy}));
  m.crack_width = width;
  m.cavities.resize(expect_section(is, "cavities"));
  for (auto& cv : m.cavities)
    if (!(is >> cv.x.lo >> cv.x.hi >> cv.y_lo >> cv.y_hi)) fail(ErrorCode::Io, "mesh file: bad cavity row");
  m.nodes.resize(expect_section(is, "nodes"));
  for (auto& p : m.nodes)
    if (!(is >> p.x >> p.y)) fail(ErrorCode::Io, "mesh file: bad node row");
  m.triangles.resize(expect_section(is, "triangles"));
  const auto n_nodes = static_cast<int>(m.nodes.size());
  auto check = [&](int idx) {
    if (idx < 0 || idx >= n_nodes) fail(ErrorCode::Io, "mesh file: node index out of range");
  };
  for (auto& t : m.triangles) {
    if (!(is >> t[0] >> t[1] >> t[2])) fail(ErrorCode::Io, "mesh file: bad triangle row");
    for (int k : t) check(k);
  }
  m.boundary_edges.resize(expect_section(is, "boundary_edges"));
  for (auto& e : m.boundary_edges) {
    std::string side;
    if (!(is >> e.a >> e.b >> side)) fail(ErrorCode::Io, "mesh file: bad boundary edge row");
    check(e.a);
    check(e.b);
    e.side = side_from_name(side);
  }
  m.cavity_edges.resize(expect_section(is, "cavity_edges"));
  for (auto& e : m.cavity_edges) {
    if (!(is >> e[0] >> e[1])) fail(ErrorCode::Io, "mesh file: bad cavity edge row");
    check(e[0]);
    check(e[1]);
  }
  finalize_boundary(m);
  return m;
}

double boundary_integral(const Mesh& mesh, const std::vector<double>& values) {
  double sum = 0.0;
  for (const auto& e : mesh.boundary_edges) sum += 0.5 * e.length * (values[e.ia] + values[e.ib]);
  return sum;
}

double boundary_length(const Mesh& mesh) {
  double sum = 0.0;
  for (const auto& e : mesh.boundary_edges) sum += e.length;
  return sum;
}

}  // namespace kp
