#pragma once

#include <array>
#include <string>
#include <vector>

#include "optssr/reduction.hpp"
#include "optssr/tensor.hpp"

namespace optssr {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

/// Boundary condition labels. Bottom pins both velocity components; the two
/// side walls are vertical rollers (horizontal component pinned); Traction
/// and Free edges are unconstrained (traction data is not modelled yet, the
/// tag is kept for mesh interchange).
enum class BoundaryTag { Bottom, LeftSide, RightSide, Traction, Free };

/// One labeled boundary edge: corner nodes plus the generated midside node.
struct BoundaryEdge {
  int a = -1, b = -1, mid = -1;
  BoundaryTag tag = BoundaryTag::Free;
};

/// Drained material: strength, elasticity, unit weights (kN/m^3).
struct Material {
  Strength strength;
  Elasticity elastic{1.0, 0.0};
  double gamma_unsat = 0.0;
  double gamma_sat = 0.0;
};

/// Phreatic surface given as a piecewise-linear graph y = h(x); constant
/// extension outside the sampled range. Elements with centroid below the
/// surface weigh (gamma_sat - gamma_w).
struct WaterTable {
  std::vector<Vec2> points;  // x strictly increasing
  double gamma_w = 9.81;

  double height_at(double x) const;
};

/// Six-noded triangle mesh. Element connectivity lists the three corners
/// followed by the midside nodes of edges (0,1), (1,2), (2,0). Midside nodes
/// sit exactly at edge midpoints, so the geometric map stays affine.
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 6>> elements;
  std::vector<int> material;  // one id per element
  std::vector<BoundaryEdge> boundary;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }

  double area() const;
  double min_angle() const;  // radians, over corner triangles

  /// Structural checks: index ranges, positive orientation, conforming edges,
  /// every exterior edge labeled. Throws TopologyError on violation.
  void validate() const;
};

/// Where a node of a refined mesh came from: host element in the parent mesh
/// and barycentric coordinates inside it. Used to transfer fields.
struct NodeOrigin {
  int element = -1;
  std::array<double, 3> bary{};
};

struct Refinement {
  TriMesh mesh;
  std::vector<NodeOrigin> origins;  // one per node of the refined mesh
};

/// Benchmark geometry: 20 m high cross-section, 10 m high 45-degree slope
/// face between a level crest and toe bench, corners
/// (0,0)-(40,0)-(40,10)-(25,10)-(15,20)-(0,20). Single material id 0.
/// `target_size` is the requested edge length of the structured seed grid.
TriMesh build_homogeneous_slope(double target_size = 2.0);

/// Read a mesh from the `opt-ssr-mesh 1` text format (0-based indices).
/// Midside nodes are generated here, never read. Throws ParseError /
/// TopologyError.
TriMesh load_mesh(const std::string& path);

/// Write the corner-level mesh back to the same text format.
void save_mesh(const TriMesh& mesh, const std::string& path);

/// Refine the elements carrying the largest share of `indicator` (Dorfler
/// marking with the given mass fraction). Marked elements split into four
/// similar children; neighbours are closed with longest-edge bisections so
/// the result stays conforming. Throws QualityError if a child falls below
/// the 5-degree minimum angle.
Refinement refine(const TriMesh& mesh, const std::vector<double>& indicator,
                  double fraction);

/// Per-element gravity load (0, -gamma) with buoyancy below the water table.
std::vector<Vec2> body_load(const TriMesh& mesh, const std::vector<Material>& materials,
                            const WaterTable* water);

}  // namespace optssr
