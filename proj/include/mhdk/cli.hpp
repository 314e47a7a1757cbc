#pragma once

#include "mhdk/postproc.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mhdk {

struct RunConfig {
  std::string command;  // mesh-info | convergence | precond | solve
  int n = 2;
  SubcubeSplit split = SubcubeSplit::Reflected;
  std::vector<int> levels{2, 4, 8, 16};
  int example = 1;
  double sigma = 1.0;
  std::vector<double> rm{1.0};
  double eps = 1e-10;
  double eps0 = 1e-3;
  int max_iter = 500;
  std::string csv_path;
  std::string json_path;
  std::string vtk_path;
  std::string history_path;  // precond: per-iteration residuals as CSV
};

// Throws InvalidArgument on out-of-range tolerances or malformed levels.
void validate(const RunConfig& config);

// Entity and DOF counts of the mesh with n subdivisions per axis.
nlohmann::json cmd_mesh_info(int n, SubcubeSplit split = SubcubeSplit::Reflected);

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  bool all_converged = true;
};
ConvergenceResult cmd_convergence(const RunConfig& config, std::ostream& log);

struct PrecondCell {
  int n = 0;
  double rm = 0.0;
  SolverReport report;
};
std::vector<PrecondCell> cmd_precond(const RunConfig& config, std::ostream& log);

struct SolveResult {
  nlohmann::json report;
  bool converged = false;
};
// Writes the VTK file itself when config.vtk_path is set.
SolveResult cmd_solve(const RunConfig& config, std::ostream& log);

// Full command-line entry point; returns the process exit code
// (0 iff every requested solve converged).
int run_cli(int argc, char** argv);

}  // namespace mhdk
