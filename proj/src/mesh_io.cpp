#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "optssr/errors.hpp"
#include "optssr/mesh.hpp"

namespace optssr {

namespace {

const std::map<std::string, BoundaryTag>& tag_names() {
  static const std::map<std::string, BoundaryTag> names = {
      {"bottom", BoundaryTag::Bottom},
      {"left", BoundaryTag::LeftSide},
      {"right", BoundaryTag::RightSide},
      {"traction", BoundaryTag::Traction},
      {"free", BoundaryTag::Free},
  };
  return names;
}

std::string tag_to_name(BoundaryTag tag) {
  for (const auto& [name, t] : tag_names()) {
    if (t == tag) return name;
  }
  return "free";
}

/// Line-oriented reader that skips blanks and '#' comments and tracks the
/// line number for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const std::string& what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      const auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) {
        return std::istringstream(line);
      }
    }
    throw ParseError("unexpected end of file while reading " + what);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

}  // namespace

TriMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  LineReader reader(in);

  {
    auto line = reader.next("header");
    std::string magic;
    int version = 0;
    if (!(line >> magic >> version) || magic != "opt-ssr-mesh" || version != 1) {
      reader.fail("expected header 'opt-ssr-mesh 1'");
    }
  }

  TriMesh mesh;
  {
    auto line = reader.next("vertex count");
    std::string word;
    long n = -1;
    if (!(line >> word >> n) || word != "vertices" || n < 3) {
      reader.fail("expected 'vertices N' with N >= 3");
    }
    mesh.nodes.reserve(n);
    for (long i = 0; i < n; ++i) {
      auto row = reader.next("vertex");
      Vec2 p;
      if (!(row >> p.x >> p.y)) reader.fail("expected 'x y'");
      mesh.nodes.push_back(p);
    }
  }
  const long corners = mesh.node_count();
  {
    auto line = reader.next("element count");
    std::string word;
    long m = -1;
    if (!(line >> word >> m) || word != "elements" || m < 1) {
      reader.fail("expected 'elements M' with M >= 1");
    }
    mesh.elements.reserve(m);
    mesh.material.reserve(m);
    for (long i = 0; i < m; ++i) {
      auto row = reader.next("element");
      long v0, v1, v2, mat;
      if (!(row >> v0 >> v1 >> v2 >> mat)) {
        reader.fail("expected 'v1 v2 v3 material_id'");
      }
      if (v0 < 0 || v0 >= corners || v1 < 0 || v1 >= corners || v2 < 0 ||
          v2 >= corners) {
        reader.fail("element vertex index out of range");
      }
      if (mat < 0) reader.fail("material id must be non-negative");
      mesh.elements.push_back({static_cast<int>(v0), static_cast<int>(v1),
                               static_cast<int>(v2), -1, -1, -1});
      mesh.material.push_back(static_cast<int>(mat));
    }
  }
  {
    auto line = reader.next("boundary count");
    std::string word;
    long k = -1;
    if (!(line >> word >> k) || word != "boundary" || k < 1) {
      reader.fail("expected 'boundary K' with K >= 1");
    }
    mesh.boundary.reserve(k);
    for (long i = 0; i < k; ++i) {
      auto row = reader.next("boundary edge");
      long a, b;
      std::string name;
      if (!(row >> a >> b >> name)) reader.fail("expected 'v_a v_b tag'");
      if (a < 0 || a >= corners || b < 0 || b >= corners) {
        reader.fail("boundary vertex index out of range");
      }
      const auto it = tag_names().find(name);
      if (it == tag_names().end()) reader.fail("unknown boundary tag '" + name + "'");
      mesh.boundary.push_back(
          {static_cast<int>(a), static_cast<int>(b), -1, it->second});
    }
  }

  // Midside nodes are always generated, never part of the interchange format.
  {
    std::map<std::pair<int, int>, int> mids;
    auto mid_of = [&](int a, int b) {
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto it = mids.find(key);
      if (it != mids.end()) return it->second;
      const int id = mesh.node_count();
      mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
      mids.emplace(key, id);
      return id;
    };
    for (auto& el : mesh.elements) {
      el[3] = mid_of(el[0], el[1]);
      el[4] = mid_of(el[1], el[2]);
      el[5] = mid_of(el[2], el[0]);
    }
    for (auto& be : mesh.boundary) {
      const auto key = std::make_pair(std::min(be.a, be.b), std::max(be.a, be.b));
      const auto it = mids.find(key);
      if (it == mids.end()) {
        throw TopologyError("boundary label on a pair that is no element edge");
      }
      be.mid = it->second;
    }
  }

  mesh.validate();
  return mesh;
}

void save_mesh(const TriMesh& mesh, const std::string& path) {
  // Corner nodes come first in our meshes; count them from the elements.
  int corners = 0;
  for (const auto& el : mesh.elements) {
    corners = std::max({corners, el[0] + 1, el[1] + 1, el[2] + 1});
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file: " + path);
  out.precision(17);
  out << "opt-ssr-mesh 1\n";
  out << "vertices " << corners << "\n";
  for (int i = 0; i < corners; ++i) {
    out << mesh.nodes[i].x << " " << mesh.nodes[i].y << "\n";
  }
  out << "elements " << mesh.element_count() << "\n";
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    out << el[0] << " " << el[1] << " " << el[2] << " " << mesh.material[e] << "\n";
  }
  out << "boundary " << mesh.boundary.size() << "\n";
  for (const auto& be : mesh.boundary) {
    out << be.a << " " << be.b << " " << tag_to_name(be.tag) << "\n";
  }
  if (!out) throw IoError("failed while writing mesh file: " + path);
}

}  // namespace optssr
