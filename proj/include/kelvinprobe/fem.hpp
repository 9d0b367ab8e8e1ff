#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "kelvinprobe/geometry.hpp"

namespace kp {

enum class Side { Bottom = 0, Right = 1, Top = 2, Left = 3 };

const char* side_name(Side s);
Side side_from_name(const std::string& name);

// Edge on the outer rectangle, oriented counterclockwise.
struct BoundaryEdge {
  int a = 0, b = 0;    // global node ids
  int ia = 0, ib = 0;  // positions in Mesh::boundary_nodes
  Side side = Side::Bottom;
  double length = 0.0;
};

// Rectangular hole modelling one crack interval.
struct Cavity {
  Interval x;
  double y_lo = 0.0;
  double y_hi = 0.0;
};

struct Mesh {
  explicit Mesh(SlabGeometry g) : geom(g) {}

  SlabGeometry geom;
  double crack_width = 0.0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::array<int, 2>> cavity_edges;
  // Nodes on the outer rectangle, sorted by their perimeter parameter
  // (counterclockwise from the origin corner).
  std::vector<int> boundary_nodes;
  std::vector<double> arclength;
  std::vector<Cavity> cavities;

  std::size_t element_count() const { return triangles.size(); }
};

// Perimeter parameter of a point on the rectangle, counterclockwise from (0,0).
double perimeter_parameter(Vec2 p, const SlabGeometry& geom);

// Tensor-product background grid with each crack cut out as a rectangular
// hole of height `crack_width`, graded towards the cavity corners. The element
// count lands within 25% of `target_elements`.
Mesh build_mesh(const SlabGeometry& geom, const CrackSet& cracks, double crack_width,
                std::size_t target_elements);

// Number of edge-connected triangle components.
std::size_t connected_components(const Mesh& mesh);

struct BoundaryLoop {
  std::vector<int> nodes;
  double signed_area = 0.0;
};
// All boundary loops of the triangulation, oriented with the domain on the left.
std::vector<BoundaryLoop> boundary_loops(const Mesh& mesh);

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

// Composite trapezoid rule over the outer boundary edges; `values` are indexed
// like Mesh::boundary_nodes.
double boundary_integral(const Mesh& mesh, const std::vector<double>& values);
double boundary_length(const Mesh& mesh);

// Flux samples. `edge_values[e]` holds g at the two ends of boundary edge e,
// so g may jump at the rectangle corners; `values` is the per-node view used
// for export (corner nodes carry the average of their two edges).
struct NeumannData {
  std::vector<std::array<double, 2>> edge_values;
  std::vector<double> values;
  std::vector<char> support;
};

// Trapezoid integral of g over the outer boundary.
double flux_integral(const Mesh& mesh, const NeumannData& g);

enum class SupportMode {
  TopAndBottom,  // both long faces minus the corner exclusion
  TopOnly,       // supp(g) on the top face only
  Full,          // the whole outer boundary
};

// g = sin(3 theta) with theta the arclength over the supported part scaled to
// [0, 2 pi], then shifted on the support so the trapezoid integral vanishes.
NeumannData neumann_sin3(const Mesh& mesh, double exclusion, SupportMode mode = SupportMode::TopAndBottom);

// Flux of the harmonic function h(x) = x1: +1 on the right face, -1 on the left.
NeumannData neumann_linear_x1(const Mesh& mesh);

struct CauchyData {
  std::shared_ptr<const Mesh> mesh;
  NeumannData g;
  std::vector<double> u;  // indexed like Mesh::boundary_nodes
  double normalization = 0.0;
};

struct FieldSolution {
  CauchyData cauchy;
  std::vector<double> u_full;  // all mesh nodes, same gauge as the trace
  double relative_residual = 0.0;  // ||K u - f|| / (||K|| ||u|| + ||f||), infinity norms
  double energy = 0.0;  // u^T K u
};

// P1 solution of the pure Neumann problem with insulated cavity faces. One
// node is pinned, then the whole field is shifted so the boundary integral of
// the trace vanishes.
FieldSolution solve_neumann(std::shared_ptr<const Mesh> mesh, const NeumannData& g);

// Trace differences u(x1, c + w/2) - u(x1, c - w/2) along each cavity.
struct CrackJump {
  Interval crack;
  std::vector<double> x;
  std::vector<double> jump;
};
std::vector<CrackJump> crack_jump(const Mesh& mesh, const std::vector<double>& u_full);

// CSV: arclength,x1,x2,g,u with user-frame coordinates.
void write_cauchy_csv(std::ostream& os, const CauchyData& data, const std::string& preamble = {});

}  // namespace kp
