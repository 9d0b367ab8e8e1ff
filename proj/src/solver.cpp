#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "kelvinprobe/error.hpp"
#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/io.hpp"

namespace kp {

namespace {

void fill_node_view(const Mesh& mesh, NeumannData& g) {
  const std::size_t n = mesh.boundary_nodes.size();
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    sum[edge.ia] += g.edge_values[e][0];
    sum[edge.ib] += g.edge_values[e][1];
    ++count[edge.ia];
    ++count[edge.ib];
  }
  g.values.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    if (count[k]) g.values[k] = sum[k] / count[k];
}

}  // namespace

double flux_integral(const Mesh& mesh, const NeumannData& g) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e)
    sum += 0.5 * mesh.boundary_edges[e].length * (g.edge_values[e][0] + g.edge_values[e][1]);
  return sum;
}

NeumannData neumann_sin3(const Mesh& mesh, double exclusion, SupportMode mode) {
  const auto& geom = mesh.geom;
  const double a = geom.a(), b = geom.b();
  if (!(exclusion >= 0.0) || !(exclusion < 0.5 * std::min(a, b)))
    fail(ErrorCode::InvalidArgument, "corner exclusion must lie in [0, min(a,b)/2)");
  const double face = a - 2.0 * exclusion;
  const std::size_t n = mesh.boundary_nodes.size();

  std::vector<double> nodal(n, 0.0);
  std::vector<char> mask(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 p = mesh.nodes[mesh.boundary_nodes[k]];
    const bool clear_of_corners = std::min(p.x, a - p.x) > exclusion;
    double theta = 0.0;
    switch (mode) {
      case SupportMode::TopAndBottom:
        if (!clear_of_corners) continue;
        if (p.y == 0.0)
          theta = std::numbers::pi * (p.x - exclusion) / face;
        else if (p.y == b)
          theta = std::numbers::pi * (1.0 + (a - exclusion - p.x) / face);
        else
          continue;
        break;
      case SupportMode::TopOnly:
        if (!clear_of_corners || p.y != b) continue;
        theta = 2.0 * std::numbers::pi * (a - exclusion - p.x) / face;
        break;
      case SupportMode::Full:
        theta = 2.0 * std::numbers::pi * mesh.arclength[k] / geom.perimeter();
        break;
    }
    mask[k] = 1;
    nodal[k] = std::sin(3.0 * theta);
  }

  NeumannData g;
  g.support = mask;
  g.edge_values.resize(mesh.boundary_edges.size());
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    g.edge_values[e] = {nodal[edge.ia], nodal[edge.ib]};
  }
  // Shift on the support so the discrete integral vanishes.
  double support_measure = 0.0;
  for (const auto& edge : mesh.boundary_edges)
    support_measure += 0.5 * edge.length * (mask[edge.ia] + mask[edge.ib]);
  if (support_measure > 0.0) {
    const double mean = flux_integral(mesh, g) / support_measure;
    for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
      const auto& edge = mesh.boundary_edges[e];
      if (mask[edge.ia]) g.edge_values[e][0] -= mean;
      if (mask[edge.ib]) g.edge_values[e][1] -= mean;
    }
  }
  fill_node_view(mesh, g);
  return g;
}

NeumannData neumann_linear_x1(const Mesh& mesh) {
  NeumannData g;
  g.edge_values.resize(mesh.boundary_edges.size(), {0.0, 0.0});
  g.support.assign(mesh.boundary_nodes.size(), 0);
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    double v = 0.0;
    if (edge.side == Side::Right) v = 1.0;
    if (edge.side == Side::Left) v = -1.0;
    if (v == 0.0) continue;
    g.edge_values[e] = {v, v};
    g.support[edge.ia] = g.support[edge.ib] = 1;
  }
  fill_node_view(mesh, g);
  return g;
}

FieldSolution solve_neumann(std::shared_ptr<const Mesh> mesh_ptr, const NeumannData& g) {
  const Mesh& mesh = *mesh_ptr;
  if (g.edge_values.size() != mesh.boundary_edges.size())
    fail(ErrorCode::InvalidArgument, "Neumann data does not match the mesh boundary");
  if (connected_components(mesh) != 1) fail(ErrorCode::InvalidArgument, "mesh is not connected");

  const auto n = static_cast<Eigen::Index>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.triangles.size() * 9);
  for (const auto& t : mesh.triangles) {
    const Vec2 p0 = mesh.nodes[t[0]], p1 = mesh.nodes[t[1]], p2 = mesh.nodes[t[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    if (!(det > 0.0)) fail(ErrorCode::Numerical, "triangle with non-positive area");
    // Gradients of barycentric coordinates scaled by det.
    const double gx[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
    const double gy[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(t[i], t[j], (gx[i] * gx[j] + gy[i] * gy[j]) / (2.0 * det));
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());

  // Trapezoid (lumped) boundary load, so u^T f equals the trapezoid integral of g u.
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  double abs_sum = 0.0;
  for (std::size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
    const auto& edge = mesh.boundary_edges[e];
    f[edge.a] += 0.5 * edge.length * g.edge_values[e][0];
    f[edge.b] += 0.5 * edge.length * g.edge_values[e][1];
    abs_sum += 0.5 * edge.length * (std::abs(g.edge_values[e][0]) + std::abs(g.edge_values[e][1]));
  }
  if (std::abs(f.sum()) > 1e-10 * std::max(abs_sum, 1e-300))
    fail(ErrorCode::Numerical, "singular Neumann system: boundary flux is not mean-free");

  FieldSolution sol;
  sol.cauchy.mesh = mesh_ptr;
  sol.cauchy.g = g;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (abs_sum > 0.0) {
    // Pin node 0: zero its row and column, unit diagonal.
    const Eigen::Index pin = 0;
    Eigen::SparseMatrix<double> A = K;
    for (Eigen::Index col = 0; col < A.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it)
        if (it.row() == pin || it.col() == pin) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    Eigen::VectorXd rhs = f;
    rhs[pin] = 0.0;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::Numerical, "sparse factorisation failed");
    u = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::Numerical, "sparse solve failed");
    // Normwise backward error, so the bound does not depend on how stretched the cells are.
    double k_norm = 0.0;
    {
      Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(n);
      for (Eigen::Index col = 0; col < K.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) row_abs[it.row()] += std::abs(it.value());
      k_norm = row_abs.maxCoeff();
    }
    auto backward_error = [&] {
      return (K * u - f).lpNorm<Eigen::Infinity>() / (k_norm * u.lpNorm<Eigen::Infinity>() + f.lpNorm<Eigen::Infinity>());
    };
    sol.relative_residual = backward_error();
    // A couple of refinement sweeps recover digits lost in the factorisation.
    for (int sweep = 0; sweep < 3 && !(sol.relative_residual < 1e-14); ++sweep) {
      const Eigen::VectorXd r = rhs - A * u;
      u += ldlt.solve(r);
      sol.relative_residual = backward_error();
    }
    if (!(sol.relative_residual < 1e-10))
      fail(ErrorCode::Numerical, "linear solve did not reach relative residual 1e-10");
  }
  sol.energy = u.dot(K * u);

  sol.u_full.assign(u.data(), u.data() + n);
  std::vector<double> trace(mesh.boundary_nodes.size());
  for (std::size_t k = 0; k < trace.size(); ++k) trace[k] = sol.u_full[mesh.boundary_nodes[k]];
  const double shift = boundary_integral(mesh, trace) / boundary_length(mesh);
  for (auto& v : trace) v -= shift;
  for (auto& v : sol.u_full) v -= shift;
  sol.cauchy.u = std::move(trace);
  sol.cauchy.normalization = shift;
  return sol;
}

std::vector<CrackJump> crack_jump(const Mesh& mesh, const std::vector<double>& u_full) {
  if (u_full.size() != mesh.nodes.size()) fail(ErrorCode::InvalidArgument, "field size does not match mesh");
  std::vector<CrackJump> out;
  const double tol = 1e-12 * mesh.geom.a();
  for (const auto& cv : mesh.cavities) {
    std::vector<std::pair<double, int>> upper, lower;
    for (const auto& e : mesh.cavity_edges)
      for (int node : e) {
        const Vec2 p = mesh.nodes[node];
        if (p.x < cv.x.lo - tol || p.x > cv.x.hi + tol) continue;
        if (p.y == cv.y_hi) upper.emplace_back(p.x, node);
        if (p.y == cv.y_lo) lower.emplace_back(p.x, node);
      }
    for (auto* face : {&upper, &lower}) {
      std::sort(face->begin(), face->end());
      face->erase(std::unique(face->begin(), face->end()), face->end());
    }
    if (upper.size() != lower.size() || upper.empty())
      fail(ErrorCode::Numerical, "cavity faces cannot be paired");
    CrackJump cj;
    cj.crack = cv.x;
    for (std::size_t k = 0; k < upper.size(); ++k) {
      if (std::abs(upper[k].first - lower[k].first) > tol)
        fail(ErrorCode::Numerical, "cavity faces have non-matching stations");
      cj.x.push_back(upper[k].first);
      cj.jump.push_back(u_full[upper[k].second] - u_full[lower[k].second]);
    }
    out.push_back(std::move(cj));
  }
  return out;
}

void write_cauchy_csv(std::ostream& os, const CauchyData& data, const std::string& preamble) {
  const Mesh& mesh = *data.mesh;
  os << preamble << "arclength,x1,x2,g,u\n";
  for (std::size_t k = 0; k < mesh.boundary_nodes.size(); ++k) {
    const Vec2 p = mesh.geom.to_user(mesh.nodes[mesh.boundary_nodes[k]]);
    os << format_double(mesh.arclength[k]) << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
       << format_double(data.g.values[k]) << ',' << format_double(data.u[k]) << '\n';
  }
}

}  // namespace kp
