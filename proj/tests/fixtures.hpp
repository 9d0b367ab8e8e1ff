// Small builders shared by the unit tests.
#pragma once

#include <memory>
#include <vector>

#include "kelvinprobe/fem.hpp"
#include "kelvinprobe/geometry.hpp"

namespace kp::fixture {

inline SlabGeometry slab() { return SlabGeometry(8.0, 0.4, 0.2, {-4.0, -0.2}); }

// Crack set from user-frame intervals on the reference slab.
inline CrackSet cracks_user(const std::vector<Interval>& user) {
  const auto g = slab();
  std::vector<Interval> in_slab;
  for (const auto& iv : user) in_slab.push_back({g.x_to_slab(iv.lo), g.x_to_slab(iv.hi)});
  return CrackSet::create(in_slab, g.c(), g.a());
}

inline CrackSet start_stage() { return cracks_user({{-4.0, -1.5}, {-1.0, 4.0}}); }

inline std::shared_ptr<const Mesh> mesh(const CrackSet& cracks, std::size_t elements = 6000) {
  return std::make_shared<const Mesh>(build_mesh(slab(), cracks, 0.04, elements));
}

inline FieldSolution solve_sin3(const std::shared_ptr<const Mesh>& m) {
  return solve_neumann(m, neumann_sin3(*m, 0.0));
}

}  // namespace kp::fixture
