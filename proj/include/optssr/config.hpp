#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optssr/fos.hpp"
#include "optssr/mesh.hpp"

namespace optssr {

/// Material block as read from the config file (engineering units:
/// kPa, degrees, MPa, kN/m^3).
struct MaterialConfig {
  double cohesion = 0.0;
  double friction = 0.0;
  double dilatancy = 0.0;
  double youngs = 0.0;
  double poisson = 0.0;
  double gamma_unsat = 0.0;
  double gamma_sat = 0.0;
};

/// One solver run as described by a config file plus CLI overrides.
struct RunConfig {
  std::string problem = "homogeneous-slope";  // builtin name or mesh file path
  double mesh_size = 2.0;                     // builtin seed edge length (m)
  ReductionScheme scheme = ReductionScheme::Associated;
  double alpha = 1000.0;
  bool alpha_auto = false;
  int levels = 12;
  double marking_fraction = 0.2;
  IndicatorKind indicator = IndicatorKind::Dissipation;
  std::string out_dir = "out";
  SearchOptions search;
  std::map<int, MaterialConfig> materials;
  std::optional<WaterTable> water;
};

ReductionScheme parse_scheme(const std::string& name);  // ConfigError on bad name
std::string scheme_name(ReductionScheme scheme);

/// Parse the INI/TOML-style config format (see README). Throws ParseError for
/// syntax problems and ConfigError for invalid values (e.g. psi > phi).
RunConfig load_config(const std::string& path);

/// Validate and convert config materials to solver units (E MPa -> kPa,
/// angles degrees -> radians). The result is indexed by material id; ids the
/// mesh references must all be configured (ConfigError otherwise).
std::vector<Material> make_materials(const RunConfig& cfg, const TriMesh& mesh);

/// Build or load the requested problem geometry.
TriMesh make_mesh(const RunConfig& cfg);

}  // namespace optssr
