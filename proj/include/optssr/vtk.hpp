#pragma once

#include <map>
#include <string>
#include <vector>

#include "optssr/mesh.hpp"

namespace optssr {

/// Output fields for visualization; names map in deterministic (sorted)
/// order. Nodal vectors are (x, y) pairs, padded with z = 0 on write.
struct FieldSet {
  std::map<std::string, std::vector<double>> nodal_scalars;
  std::map<std::string, std::vector<Vec2>> nodal_vectors;
  std::map<std::string, std::vector<double>> cell_scalars;
};

/// Legacy ASCII VTK (DataFile 3.0) with quadratic-triangle cells (type 22).
void export_vtk(const TriMesh& mesh, const FieldSet& fields, const std::string& path);

}  // namespace optssr
