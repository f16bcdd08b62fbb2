#include "optssr/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

using EdgeKey = std::pair<int, int>;

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

/// Local corner pairs of the three element edges, matching the midside slots
/// m01, m12, m20.
constexpr int kEdgeCorners[3][2] = {{0, 1}, {1, 2}, {2, 0}};

}  // namespace

double WaterTable::height_at(double x) const {
  if (points.empty()) return -1e300;
  if (x <= points.front().x) return points.front().y;
  if (x >= points.back().x) return points.back().y;
  for (size_t i = 1; i < points.size(); ++i) {
    if (x <= points[i].x) {
      const Vec2 a = points[i - 1], b = points[i];
      const double t = (x - a.x) / (b.x - a.x);
      return a.y + t * (b.y - a.y);
    }
  }
  return points.back().y;
}

double TriMesh::area() const {
  double total = 0.0;
  for (const auto& el : elements) {
    total += 0.5 * cross(nodes[el[0]], nodes[el[1]], nodes[el[2]]);
  }
  return total;
}

double TriMesh::min_angle() const {
  double worst = M_PI;
  for (const auto& el : elements) {
    for (int k = 0; k < 3; ++k) {
      const Vec2 o = nodes[el[k]];
      const Vec2 u = nodes[el[(k + 1) % 3]] - o;
      const Vec2 v = nodes[el[(k + 2) % 3]] - o;
      const double nu = std::hypot(u.x, u.y), nv = std::hypot(v.x, v.y);
      if (nu == 0.0 || nv == 0.0) return 0.0;
      const double c = std::clamp((u.x * v.x + u.y * v.y) / (nu * nv), -1.0, 1.0);
      worst = std::min(worst, std::acos(c));
    }
  }
  return worst;
}

void TriMesh::validate() const {
  const int n = node_count();
  if (material.size() != elements.size()) {
    throw TopologyError("material list length does not match element count");
  }

  std::map<EdgeKey, int> edge_mid;    // corner pair -> midside node
  std::map<EdgeKey, int> edge_count;  // corner pair -> adjacent elements
  for (size_t e = 0; e < elements.size(); ++e) {
    const auto& el = elements[e];
    for (int i : el) {
      if (i < 0 || i >= n) throw TopologyError("element node index out of range");
    }
    if (cross(nodes[el[0]], nodes[el[1]], nodes[el[2]]) <= 0.0) {
      throw TopologyError("element " + std::to_string(e) +
                          " is degenerate or negatively oriented");
    }
    for (int k = 0; k < 3; ++k) {
      const int a = el[kEdgeCorners[k][0]], b = el[kEdgeCorners[k][1]];
      const int mid = el[3 + k];
      const Vec2 want = 0.5 * (nodes[a] + nodes[b]);
      if (dist(nodes[mid], want) > 1e-9 * (1.0 + dist(nodes[a], nodes[b]))) {
        throw TopologyError("midside node off the edge midpoint in element " +
                            std::to_string(e));
      }
      const EdgeKey key = edge_key(a, b);
      auto [it, fresh] = edge_mid.emplace(key, mid);
      if (!fresh && it->second != mid) {
        throw TopologyError("neighbouring elements disagree on a midside node");
      }
      if (++edge_count[key] > 2) {
        throw TopologyError("edge shared by more than two elements");
      }
    }
  }

  std::map<EdgeKey, const BoundaryEdge*> labeled;
  for (const auto& be : boundary) {
    if (be.a < 0 || be.a >= n || be.b < 0 || be.b >= n) {
      throw TopologyError("boundary edge node index out of range");
    }
    const EdgeKey key = edge_key(be.a, be.b);
    const auto cnt = edge_count.find(key);
    if (cnt == edge_count.end() || cnt->second != 1) {
      throw TopologyError("boundary label on a non-exterior edge");
    }
    if (edge_mid.at(key) != be.mid) {
      throw TopologyError("boundary edge lists a wrong midside node");
    }
    if (!labeled.emplace(key, &be).second) {
      throw TopologyError("duplicate boundary label");
    }
  }
  for (const auto& [key, cnt] : edge_count) {
    if (cnt == 1 && labeled.find(key) == labeled.end()) {
      throw TopologyError("exterior edge without a boundary label");
    }
  }
}

namespace {

/// Append midside nodes for every corner-element edge; shared edges share the
/// node. Fills element slots 3..5 and the boundary mid entries.
void attach_midnodes(TriMesh& mesh) {
  std::map<EdgeKey, int> mids;
  auto mid_of = [&](int a, int b) {
    const EdgeKey key = edge_key(a, b);
    auto it = mids.find(key);
    if (it != mids.end()) return it->second;
    const int id = mesh.node_count();
    mesh.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    mids.emplace(key, id);
    return id;
  };
  for (auto& el : mesh.elements) {
    for (int k = 0; k < 3; ++k) {
      el[3 + k] = mid_of(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]]);
    }
  }
  for (auto& be : mesh.boundary) {
    const auto it = mids.find(edge_key(be.a, be.b));
    if (it == mids.end()) throw TopologyError("boundary label on a non-edge");
    be.mid = it->second;
  }
}

}  // namespace

TriMesh build_homogeneous_slope(double target_size) {
  if (!(target_size > 0.0)) throw ConfigError("mesh size must be positive");

  // Ground surface: 20 m crest for x <= 15, a 45-degree face down to the
  // 10 m bench at x = 25, flat to the right wall at x = 40.
  const auto surface = [](double x) {
    if (x <= 15.0) return 20.0;
    if (x >= 25.0) return 10.0;
    return 35.0 - x;
  };

  // Column abscissae: the three surface segments are meshed separately so
  // the slope crest and toe are grid points.
  std::vector<double> xs;
  const double spans[3][2] = {{0.0, 15.0}, {15.0, 25.0}, {25.0, 40.0}};
  for (const auto& span : spans) {
    const double len = span[1] - span[0];
    const int n = std::max(1, static_cast<int>(std::ceil(len / target_size)));
    for (int i = (span[0] == 0.0 ? 0 : 1); i <= n; ++i) {
      xs.push_back(span[0] + len * i / n);
    }
  }
  const int rows = std::max(1, static_cast<int>(std::ceil(20.0 / target_size)));
  const int cols = static_cast<int>(xs.size());

  TriMesh mesh;
  // Column-major node grid; every column spans [0, surface(x)].
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j <= rows; ++j) {
      mesh.nodes.push_back({xs[i], surface(xs[i]) * j / rows});
    }
  }
  const auto node = [&](int i, int j) { return i * (rows + 1) + j; };

  for (int i = 0; i + 1 < cols; ++i) {
    for (int j = 0; j < rows; ++j) {
      const int a = node(i, j), b = node(i + 1, j);
      const int c = node(i + 1, j + 1), d = node(i, j + 1);
      mesh.elements.push_back({a, b, c, -1, -1, -1});
      mesh.elements.push_back({a, c, d, -1, -1, -1});
    }
  }
  mesh.material.assign(mesh.elements.size(), 0);

  for (int i = 0; i + 1 < cols; ++i) {
    mesh.boundary.push_back({node(i, 0), node(i + 1, 0), -1, BoundaryTag::Bottom});
    mesh.boundary.push_back(
        {node(i, rows), node(i + 1, rows), -1, BoundaryTag::Free});
  }
  for (int j = 0; j < rows; ++j) {
    mesh.boundary.push_back({node(0, j), node(0, j + 1), -1, BoundaryTag::LeftSide});
    mesh.boundary.push_back(
        {node(cols - 1, j), node(cols - 1, j + 1), -1, BoundaryTag::RightSide});
  }

  attach_midnodes(mesh);
  mesh.validate();
  return mesh;
}

Refinement refine(const TriMesh& mesh, const std::vector<double>& indicator,
                  double fraction) {
  if (indicator.size() != mesh.elements.size()) {
    throw TopologyError("indicator length does not match element count");
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ConfigError("marking fraction must lie in (0, 1]");
  }

  const int ne = mesh.element_count();
  double total = 0.0;
  for (double v : indicator) {
    if (!(v >= 0.0)) throw ConfigError("indicator entries must be non-negative");
    total += v;
  }

  // Dorfler marking: smallest set of elements holding `fraction` of the mass.
  std::vector<int> order(ne);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicator[a] > indicator[b]; });
  std::vector<char> red(ne, 0);
  double acc = 0.0;
  for (int e : order) {
    if (total > 0.0 && acc >= fraction * total) break;
    red[e] = 1;
    acc += indicator[e];
  }

  // Edge marks and closure: an element with two or more marked edges turns
  // red; a single marked edge must be the longest one (else the longest is
  // marked as well), so the remaining bisections are longest-edge cuts.
  std::map<EdgeKey, char> marked;
  const auto longest_edge = [&](int e) {
    const auto& el = mesh.elements[e];
    int best = 0;
    double len = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double l =
          dist(mesh.nodes[el[kEdgeCorners[k][0]]], mesh.nodes[el[kEdgeCorners[k][1]]]);
      if (l > len * (1.0 + 1e-12)) {
        len = l;
        best = k;
      }
    }
    return best;
  };

  for (int e = 0; e < ne; ++e) {
    if (!red[e]) continue;
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      marked[edge_key(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]])] = 1;
    }
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (int e = 0; e < ne; ++e) {
      if (red[e]) continue;
      const auto& el = mesh.elements[e];
      int count = 0;
      std::array<bool, 3> has{};
      for (int k = 0; k < 3; ++k) {
        has[k] = marked.count(edge_key(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]])) > 0;
        count += has[k];
      }
      if (count >= 2) {
        red[e] = 1;
        for (int k = 0; k < 3; ++k) {
          marked[edge_key(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]])] = 1;
        }
        grew = true;
      } else if (count == 1) {
        const int le = longest_edge(e);
        if (!has[le]) {
          marked[edge_key(el[kEdgeCorners[le][0]], el[kEdgeCorners[le][1]])] = 1;
          grew = true;
        }
      }
    }
  }

  // Children reuse every parent node: midside nodes of split edges become
  // corners, midside nodes of surviving edges stay midside nodes.
  Refinement out;
  TriMesh& fine = out.mesh;
  fine.nodes = mesh.nodes;

  std::map<EdgeKey, int> old_mid;
  for (const auto& el : mesh.elements) {
    for (int k = 0; k < 3; ++k) {
      old_mid.emplace(edge_key(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]]), el[3 + k]);
    }
  }

  // Node provenance: host parent element plus barycentric coordinates.
  out.origins.assign(mesh.nodes.size(), NodeOrigin{});
  std::vector<char> origin_set(mesh.nodes.size(), 0);
  const auto corner_bary = [](int local) {
    std::array<double, 3> b{};
    b[local] = 1.0;
    return b;
  };
  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      if (!origin_set[el[k]]) {
        origin_set[el[k]] = 1;
        out.origins[el[k]] = {e, corner_bary(k)};
      }
      const int mid = el[3 + k];
      if (!origin_set[mid]) {
        origin_set[mid] = 1;
        std::array<double, 3> b{};
        b[kEdgeCorners[k][0]] = 0.5;
        b[kEdgeCorners[k][1]] = 0.5;
        out.origins[mid] = {e, b};
      }
    }
  }

  std::map<EdgeKey, int> new_mid;
  // Host element for newly created nodes, keyed by the child-edge pair.
  const auto child_mid = [&](int a, int b, int host, std::array<double, 3> ba,
                             std::array<double, 3> bb) {
    const EdgeKey key = edge_key(a, b);
    if (const auto it = old_mid.find(key); it != old_mid.end()) return it->second;
    if (const auto it = new_mid.find(key); it != new_mid.end()) return it->second;
    const int id = fine.node_count();
    fine.nodes.push_back(0.5 * (fine.nodes[a] + fine.nodes[b]));
    new_mid.emplace(key, id);
    NodeOrigin origin;
    origin.element = host;
    for (int i = 0; i < 3; ++i) origin.bary[i] = 0.5 * (ba[i] + bb[i]);
    out.origins.push_back(origin);
    return id;
  };

  // Barycentric coordinates (in the parent) of every parent node id used by
  // the children of element e.
  const auto emit_child = [&](int parent, std::array<int, 3> corners,
                              std::array<std::array<double, 3>, 3> bary) {
    std::array<int, 6> el{corners[0], corners[1], corners[2], -1, -1, -1};
    for (int k = 0; k < 3; ++k) {
      el[3 + k] = child_mid(corners[kEdgeCorners[k][0]], corners[kEdgeCorners[k][1]],
                            parent, bary[kEdgeCorners[k][0]], bary[kEdgeCorners[k][1]]);
    }
    fine.elements.push_back(el);
    fine.material.push_back(mesh.material[parent]);
  };

  for (int e = 0; e < ne; ++e) {
    const auto& el = mesh.elements[e];
    const std::array<std::array<double, 3>, 3> cb = {corner_bary(0), corner_bary(1),
                                                     corner_bary(2)};
    const std::array<std::array<double, 3>, 3> mb = {
        std::array<double, 3>{0.5, 0.5, 0.0}, std::array<double, 3>{0.0, 0.5, 0.5},
        std::array<double, 3>{0.5, 0.0, 0.5}};
    if (red[e]) {
      emit_child(e, {el[0], el[3], el[5]}, {cb[0], mb[0], mb[2]});
      emit_child(e, {el[3], el[1], el[4]}, {mb[0], cb[1], mb[1]});
      emit_child(e, {el[5], el[4], el[2]}, {mb[2], mb[1], cb[2]});
      emit_child(e, {el[3], el[4], el[5]}, {mb[0], mb[1], mb[2]});
      continue;
    }
    std::array<bool, 3> has{};
    int count = 0;
    for (int k = 0; k < 3; ++k) {
      has[k] = marked.count(edge_key(el[kEdgeCorners[k][0]], el[kEdgeCorners[k][1]])) > 0;
      count += has[k];
    }
    if (count == 0) {
      emit_child(e, {el[0], el[1], el[2]}, {cb[0], cb[1], cb[2]});
      continue;
    }
    // Single split edge k: bisect toward the opposite corner.
    const int k = has[0] ? 0 : (has[1] ? 1 : 2);
    const int a = kEdgeCorners[k][0], b = kEdgeCorners[k][1], c = 3 - a - b;
    emit_child(e, {el[a], el[3 + k], el[c]}, {cb[a], mb[k], cb[c]});
    emit_child(e, {el[3 + k], el[b], el[c]}, {mb[k], cb[b], cb[c]});
  }

  // Boundary labels follow the split edges.
  for (const auto& be : mesh.boundary) {
    if (marked.count(edge_key(be.a, be.b)) > 0) {
      const int m = be.mid;
      fine.boundary.push_back(
          {be.a, m, new_mid.at(edge_key(be.a, m)), be.tag});
      fine.boundary.push_back(
          {m, be.b, new_mid.at(edge_key(m, be.b)), be.tag});
    } else {
      fine.boundary.push_back(be);
    }
  }

  fine.validate();
  const double limit = 5.0 * M_PI / 180.0;
  if (fine.min_angle() < limit) {
    throw QualityError("refinement produced an element under the 5-degree "
                       "minimum angle");
  }
  return out;
}

std::vector<Vec2> body_load(const TriMesh& mesh, const std::vector<Material>& materials,
                            const WaterTable* water) {
  std::vector<Vec2> load(mesh.elements.size());
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const int mat = mesh.material[e];
    if (mat < 0 || mat >= static_cast<int>(materials.size())) {
      throw ConfigError("element references an unconfigured material id");
    }
    const auto& el = mesh.elements[e];
    const Vec2 c = (1.0 / 3.0) * (mesh.nodes[el[0]] + mesh.nodes[el[1]] + mesh.nodes[el[2]]);
    double gamma = materials[mat].gamma_unsat;
    if (water != nullptr && c.y < water->height_at(c.x)) {
      gamma = materials[mat].gamma_sat - water->gamma_w;
    }
    load[e] = {0.0, -gamma};
  }
  return load;
}

}  // namespace optssr
