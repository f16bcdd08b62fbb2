#include "optssr/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "optssr/errors.hpp"

namespace optssr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                        (v.front() == '\'' && v.back() == '\''))) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double to_number(const std::string& v, int line) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" +
                     v + "'");
  }
}

long to_integer(const std::string& v, int line) {
  try {
    size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" +
                     v + "'");
  }
}

std::vector<double> to_numbers(const std::string& v, int line) {
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_number(tok, line));
  return out;
}

void validate(const RunConfig& cfg) {
  if (cfg.materials.empty()) {
    throw ConfigError("at least one [material.<id>] block is required");
  }
  for (const auto& [id, m] : cfg.materials) {
    const std::string where = "material." + std::to_string(id) + ": ";
    if (!(m.cohesion >= 0.0)) throw ConfigError(where + "cohesion must be >= 0");
    if (!(m.friction >= 0.0) || !(m.friction < 90.0)) {
      throw ConfigError(where + "friction must lie in [0, 90) degrees");
    }
    if (!(m.dilatancy >= 0.0) || m.dilatancy > m.friction) {
      throw ConfigError(where + "dilatancy must lie in [0, friction] degrees");
    }
    if (!(m.youngs > 0.0)) throw ConfigError(where + "youngs must be positive (MPa)");
    if (!(m.poisson >= 0.0) || !(m.poisson < 0.5)) {
      throw ConfigError(where + "poisson must lie in [0, 0.5)");
    }
    if (!(m.gamma_unsat >= 0.0) || !(m.gamma_sat >= 0.0)) {
      throw ConfigError(where + "unit weights must be >= 0");
    }
  }
  if (!(cfg.mesh_size > 0.0)) throw ConfigError("mesh_size must be positive");
  if (cfg.levels < 1) throw ConfigError("levels must be at least 1");
  if (!(cfg.marking_fraction > 0.0) || cfg.marking_fraction > 1.0) {
    throw ConfigError("marking_fraction must lie in (0, 1]");
  }
  if (!cfg.alpha_auto && !(cfg.alpha > 0.0)) {
    throw ConfigError("alpha must be positive or 'auto'");
  }
  const SearchOptions& s = cfg.search;
  if (!(s.lambda_min > 0.0) || !(s.lambda_max > s.lambda_min)) {
    throw ConfigError("search window must satisfy 0 < lambda_min < lambda_max");
  }
  if (!(s.step > 0.0) || !(s.tol > 0.0)) {
    throw ConfigError("lambda_step and lambda_tol must be positive");
  }
  if (cfg.water) {
    const auto& pts = cfg.water->points;
    if (pts.size() < 2) throw ConfigError("water table needs at least two points");
    for (size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].x > pts[i - 1].x)) {
        throw ConfigError("water table x coordinates must be strictly increasing");
      }
    }
    if (!(cfg.water->gamma_w > 0.0)) throw ConfigError("gamma_w must be positive");
  }
}

}  // namespace

ReductionScheme parse_scheme(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (n == "associated") return ReductionScheme::Associated;
  if (n == "davis-a") return ReductionScheme::DavisA;
  if (n == "davis-b") return ReductionScheme::DavisB;
  if (n == "davis-c") return ReductionScheme::DavisC;
  throw ConfigError("unknown scheme '" + name +
                    "' (expected associated, davis-a, davis-b or davis-c)");
}

std::string scheme_name(ReductionScheme scheme) {
  switch (scheme) {
    case ReductionScheme::Associated:
      return "associated";
    case ReductionScheme::DavisA:
      return "davis-a";
    case ReductionScheme::DavisB:
      return "davis-b";
    case ReductionScheme::DavisC:
      return "davis-c";
  }
  return "associated";
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  std::string section;
  int material_id = -1;
  std::string line;
  int lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      material_id = -1;
      if (section.rfind("material.", 0) == 0) {
        material_id =
            static_cast<int>(to_integer(section.substr(std::string("material.").size()), lineno));
        if (material_id < 0) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": material id must be non-negative");
        }
        cfg.materials.emplace(material_id, MaterialConfig{});
        section = "material";
      } else if (section != "water") {
        throw ParseError("line " + std::to_string(lineno) + ": unknown section [" +
                         section + "]");
      } else {
        cfg.water.emplace();
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
    }

    if (section.empty()) {
      if (key == "problem") {
        cfg.problem = value;
      } else if (key == "mesh_size") {
        cfg.mesh_size = to_number(value, lineno);
      } else if (key == "scheme") {
        cfg.scheme = parse_scheme(value);
      } else if (key == "alpha") {
        if (value == "auto") {
          cfg.alpha_auto = true;
        } else {
          cfg.alpha = to_number(value, lineno);
          cfg.alpha_auto = false;
        }
      } else if (key == "levels") {
        cfg.levels = static_cast<int>(to_integer(value, lineno));
      } else if (key == "marking_fraction") {
        cfg.marking_fraction = to_number(value, lineno);
      } else if (key == "indicator") {
        if (value == "dissipation") {
          cfg.indicator = IndicatorKind::Dissipation;
        } else if (value == "shear-rate") {
          cfg.indicator = IndicatorKind::ShearRate;
        } else {
          throw ConfigError("unknown indicator '" + value + "'");
        }
      } else if (key == "out") {
        cfg.out_dir = value;
      } else if (key == "lambda_start") {
        cfg.search.lambda_start = to_number(value, lineno);
      } else if (key == "lambda_step") {
        cfg.search.step = to_number(value, lineno);
      } else if (key == "lambda_tol") {
        cfg.search.tol = to_number(value, lineno);
      } else if (key == "lambda_min") {
        cfg.search.lambda_min = to_number(value, lineno);
      } else if (key == "lambda_max") {
        cfg.search.lambda_max = to_number(value, lineno);
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown key '" + key +
                         "'");
      }
    } else if (section == "material") {
      MaterialConfig& m = cfg.materials.at(material_id);
      if (key == "cohesion") {
        m.cohesion = to_number(value, lineno);
      } else if (key == "friction") {
        m.friction = to_number(value, lineno);
      } else if (key == "dilatancy") {
        m.dilatancy = to_number(value, lineno);
      } else if (key == "youngs") {
        m.youngs = to_number(value, lineno);
      } else if (key == "poisson") {
        m.poisson = to_number(value, lineno);
      } else if (key == "gamma_unsat") {
        m.gamma_unsat = to_number(value, lineno);
      } else if (key == "gamma_sat") {
        m.gamma_sat = to_number(value, lineno);
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown material key '" +
                         key + "'");
      }
    } else {  // water
      if (key == "gamma_w") {
        cfg.water->gamma_w = to_number(value, lineno);
      } else if (key == "points") {
        const std::vector<double> xy = to_numbers(value, lineno);
        if (xy.size() < 4 || xy.size() % 2 != 0) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": water points must be 'x1 y1 x2 y2 ...'");
        }
        cfg.water->points.clear();
        for (size_t i = 0; i < xy.size(); i += 2) {
          cfg.water->points.push_back({xy[i], xy[i + 1]});
        }
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": unknown water key '" +
                         key + "'");
      }
    }
  }

  validate(cfg);
  return cfg;
}

std::vector<Material> make_materials(const RunConfig& cfg, const TriMesh& mesh) {
  int max_id = 0;
  for (int id : mesh.material) max_id = std::max(max_id, id);
  for (const auto& [id, m] : cfg.materials) max_id = std::max(max_id, id);

  // Slots the mesh never touches get inert placeholders.
  std::vector<Material> out(max_id + 1,
                            Material{Strength{}, Elasticity{1.0, 0.0}, 0.0, 0.0});
  const double rad = M_PI / 180.0;
  for (const auto& [id, m] : cfg.materials) {
    out[id] = Material{Strength{m.cohesion, m.friction * rad, m.dilatancy * rad},
                       Elasticity(m.youngs * 1000.0, m.poisson),  // MPa -> kPa
                       m.gamma_unsat, m.gamma_sat};
    out[id].strength.validate();
  }
  for (int id : mesh.material) {
    if (cfg.materials.find(id) == cfg.materials.end()) {
      throw ConfigError("mesh references material id " + std::to_string(id) +
                        " which is not configured");
    }
  }
  return out;
}

TriMesh make_mesh(const RunConfig& cfg) {
  if (cfg.problem == "homogeneous-slope") {
    return build_homogeneous_slope(cfg.mesh_size);
  }
  return load_mesh(cfg.problem);
}

}  // namespace optssr
