#pragma once

#include <string>

#include "optssr/config.hpp"

namespace optssr {

/// Process exit codes shared by the CLI subcommands.
enum ExitCode {
  kExitOk = 0,
  kExitFailure = 1,        // unexpected error
  kExitSearchFailure = 2,  // no feasible factor in the search window
  kExitConfig = 3,
  kExitMesh = 4,
  kExitOrdering = 5,  // scheme comparison violated the expected ordering
};

/// Run one adaptive solve and write summary.json, convergence.csv and
/// per-level failure_L<k>.vtk into cfg.out_dir. Returns an ExitCode.
int cmd_run(const RunConfig& cfg);

/// Run all four schemes on a shared mesh trajectory (the associated solve
/// drives refinement), write table.csv plus the run artifacts per scheme,
/// and check the Davis ordering. Returns an ExitCode.
int cmd_compare(const RunConfig& cfg);

/// Print mesh statistics (nodes, elements, materials, area, min angle,
/// boundary tag counts). Returns an ExitCode.
int cmd_mesh_info(const std::string& mesh_path);

}  // namespace optssr
