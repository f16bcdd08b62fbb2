#include "optssr/vtk.hpp"

#include <fstream>

#include "optssr/errors.hpp"

namespace optssr {

void export_vtk(const TriMesh& mesh, const FieldSet& fields, const std::string& path) {
  for (const auto& [name, data] : fields.nodal_scalars) {
    if (data.size() != mesh.nodes.size()) {
      throw IoError("nodal scalar '" + name + "' has wrong length");
    }
  }
  for (const auto& [name, data] : fields.nodal_vectors) {
    if (data.size() != mesh.nodes.size()) {
      throw IoError("nodal vector '" + name + "' has wrong length");
    }
  }
  for (const auto& [name, data] : fields.cell_scalars) {
    if (data.size() != mesh.elements.size()) {
      throw IoError("cell scalar '" + name + "' has wrong length");
    }
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot write VTK file: " + path);
  out.precision(12);

  out << "# vtk DataFile Version 3.0\n";
  out << "opt-ssr output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.node_count() << " double\n";
  for (const auto& p : mesh.nodes) {
    out << p.x << " " << p.y << " 0\n";
  }

  const int ne = mesh.element_count();
  out << "CELLS " << ne << " " << 7 * ne << "\n";
  for (const auto& el : mesh.elements) {
    out << "6";
    for (int i : el) out << " " << i;
    out << "\n";
  }
  out << "CELL_TYPES " << ne << "\n";
  for (int e = 0; e < ne; ++e) out << "22\n";

  if (!fields.nodal_scalars.empty() || !fields.nodal_vectors.empty()) {
    out << "POINT_DATA " << mesh.node_count() << "\n";
    for (const auto& [name, data] : fields.nodal_scalars) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : data) out << v << "\n";
    }
    for (const auto& [name, data] : fields.nodal_vectors) {
      out << "VECTORS " << name << " double\n";
      for (const auto& v : data) out << v.x << " " << v.y << " 0\n";
    }
  }
  if (!fields.cell_scalars.empty()) {
    out << "CELL_DATA " << ne << "\n";
    for (const auto& [name, data] : fields.cell_scalars) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (double v : data) out << v << "\n";
    }
  }
  if (!out) throw IoError("failed while writing VTK file: " + path);
}

}  // namespace optssr
