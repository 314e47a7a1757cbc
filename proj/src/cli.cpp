#include "mhdk/cli.hpp"

#include "mhdk/export.hpp"

#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace mhdk {

namespace {

const char* split_name(SubcubeSplit s) { return s == SubcubeSplit::Reflected ? "reflected" : "uniform"; }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << std::scientific << v;
  return s.str();
}

nlohmann::json energy_json(const EnergyBalance& e) {
  return {{"lhs1", e.lhs1}, {"rhs1", e.rhs1}, {"defect1", e.defect1()},
          {"lhs2", e.lhs2}, {"rhs2", e.rhs2}, {"defect2", e.defect2()}};
}

SolveOptions solve_options(const RunConfig& c) {
  SolveOptions o;
  o.eps = c.eps;
  o.max_iter = c.max_iter;
  o.preconditioner.inner_tol = c.eps0;
  return o;
}

void require_output(const std::string& path) {
  if (!path.empty() && !output_path_usable(path)) {
    throw std::runtime_error("output directory does not exist: " + path);
  }
}

}  // namespace

void validate(const RunConfig& c) {
  if (!(c.eps > 0.0 && c.eps < 1.0)) throw InvalidArgument("--eps must lie in (0,1)");
  if (!(c.eps0 > 0.0 && c.eps0 < 1.0)) throw InvalidArgument("--eps0 must lie in (0,1)");
  if (c.max_iter < 1) throw InvalidArgument("--max-iter must be positive");
  if (!(c.sigma > 0.0)) throw InvalidArgument("--sigma must be positive");
  if (c.rm.empty()) throw InvalidArgument("--rm needs at least one value");
  for (double r : c.rm) {
    if (!(r > 0.0)) throw InvalidArgument("--rm values must be positive");
  }
  if (c.n < 1) throw InvalidArgument("--n must be at least 1");
  if (c.levels.empty()) throw InvalidArgument("--levels needs at least one value");
  for (std::size_t k = 0; k < c.levels.size(); ++k) {
    if (!power_of_two(c.levels[k])) throw InvalidArgument("--levels must be powers of two");
    if (k > 0 && c.levels[k] <= c.levels[k - 1]) throw InvalidArgument("--levels must be ascending");
  }
  if (c.example < 1 || c.example > 3) throw InvalidArgument("--example must be 1, 2 or 3");
}

nlohmann::json cmd_mesh_info(int n, SubcubeSplit split) {
  const Mesh mesh = build_cube_mesh(n, split);
  const MixedSpaces s = build_mixed_spaces(mesh);
  const Index nd = s.D.total_dofs();
  const Index ns = s.S.total_dofs();
  const Index nc = s.C.total_dofs();
  const Index nr = s.R.total_dofs();
  nlohmann::json j = mesh_summary(mesh);
  j["dofs"] = {{"J", nd}, {"phi", ns}, {"A", nc}, {"r", nr}, {"J_phi", nd + ns}, {"A_r", nc + nr},
               {"total", nd + ns + nc + nr}};
  j["constrained"] = {{"A", s.C.num_constrained()}, {"r", s.R.num_constrained()}};
  return j;
}

ConvergenceResult cmd_convergence(const RunConfig& c, std::ostream& log) {
  if (c.example == 3) throw InvalidArgument("convergence: example 3 has no exact solution");
  ConvergenceResult out;
  for (int n : c.levels) {
    const ProblemSpec problem = example_by_id(c.example, c.sigma, c.rm.front());
    const ExactSolution& ex = *problem.exact;
    const Mesh mesh = build_cube_mesh(n, c.split);
    const MixedSpaces spaces = build_mixed_spaces(mesh, problem);
    const MhdSolution sol = solve_problem(problem, spaces, solve_options(c));

    ConvergenceRow row;
    row.n = n;
    row.h = mesh_size(mesh);
    row.iterations = sol.report.iterations;
    row.converged = sol.report.converged;
    row.e_J = error_norm(sol.J, ex.J);
    row.e_phi = error_norm(sol.phi, ex.phi);
    row.e_Acurl = error_norm(sol.A, ex.A, NormKind::HcurlFull, &ex.curl_A);
    row.e_AL2 = error_norm(sol.A, ex.A);
    row.divJ = div_norm(sol.J);
    out.rows.push_back(row);
    out.all_converged = out.all_converged && row.converged;
    log << "n=" << n << " iterations=" << row.iterations << (row.converged ? "" : " NOT CONVERGED")
        << " e_J=" << fmt(row.e_J) << " e_phi=" << fmt(row.e_phi) << " e_Acurl=" << fmt(row.e_Acurl)
        << " e_AL2=" << fmt(row.e_AL2) << " divJ=" << fmt(row.divJ) << '\n';
    if (!row.converged) break;
  }
  convergence_order(out.rows);
  return out;
}

std::vector<PrecondCell> cmd_precond(const RunConfig& c, std::ostream& log) {
  std::vector<PrecondCell> cells;
  for (int n : c.levels) {
    const Mesh mesh = build_cube_mesh(n, c.split);
    for (double rm : c.rm) {
      const ProblemSpec problem = example3(rm, c.sigma);
      const MixedSpaces spaces = build_mixed_spaces(mesh, problem);
      MhdSolution sol = solve_problem(problem, spaces, solve_options(c));
      log << "n=" << n << " Rm=" << rm << " iterations=" << sol.report.iterations
          << (sol.report.converged ? "" : " NOT CONVERGED") << " inner(M,F,L)=" << sol.report.inner_iterations_M
          << ',' << sol.report.inner_iterations_F << ',' << sol.report.inner_iterations_L << '\n';
      cells.push_back({n, rm, std::move(sol.report)});
    }
  }
  return cells;
}

SolveResult cmd_solve(const RunConfig& c, std::ostream& log) {
  const double rm = c.rm.front();
  const ProblemSpec problem = example_by_id(c.example, c.sigma, rm);
  const Mesh mesh = build_cube_mesh(c.n, c.split);
  const MixedSpaces spaces = build_mixed_spaces(mesh, problem);
  const MhdSolution sol = solve_problem(problem, spaces, solve_options(c));

  SolveResult out;
  out.converged = sol.report.converged;
  const double div_j = div_norm(sol.J);
  const double jump_b = b_div_check(mesh, recover_B(sol.A));
  const EnergyBalance energy = energy_check(sol, problem, spaces);
  nlohmann::json& j = out.report;
  j["example"] = c.example;
  j["n"] = c.n;
  j["split"] = split_name(c.split);
  j["h"] = mesh_size(mesh);
  j["sigma"] = c.sigma;
  j["rm"] = rm;
  j["solver"] = to_json(sol.report);
  j["divJ_L2"] = div_j;
  j["divB_max_jump"] = jump_b;
  j["r_L2"] = l2_norm(sol.r);
  j["A_L2"] = l2_norm(sol.A);
  j["energy"] = energy_json(energy);
  if (problem.exact) {
    const ExactSolution& ex = *problem.exact;
    j["errors"] = {{"J_L2", error_norm(sol.J, ex.J)},
                   {"phi_L2", error_norm(sol.phi, ex.phi)},
                   {"A_Hcurl", error_norm(sol.A, ex.A, NormKind::HcurlFull, &ex.curl_A)},
                   {"A_L2", error_norm(sol.A, ex.A)}};
  }
  log << "example " << c.example << " n=" << c.n << " Rm=" << rm << ": iterations=" << sol.report.iterations
      << (out.converged ? "" : " NOT CONVERGED") << " divJ=" << fmt(div_j) << " divB jump=" << fmt(jump_b)
      << " energy defects=" << fmt(energy.defect1()) << ',' << fmt(energy.defect2()) << '\n';
  if (!c.vtk_path.empty()) write_text_file(c.vtk_path, vtk_string(mesh, sol.J, sol.phi, sol.A));
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Mixed finite element solver for steady MHD kinematics on the unit cube"};
  app.set_config("--config", "", "TOML file with option defaults (command-line flags take precedence)");
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<int> levels;
  std::vector<double> rms;
  const std::map<std::string, SubcubeSplit> split_names{{"reflected", SubcubeSplit::Reflected},
                                                        {"uniform", SubcubeSplit::Uniform}};
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--split", cfg.split, "Subcube split: reflected or uniform")
        ->transform(CLI::CheckedTransformer(split_names, CLI::ignore_case));
  };

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--sigma", cfg.sigma, "Conductivity")->capture_default_str();
    sub->add_option("--rm", rms, "Magnetic Reynolds number(s), comma separated")->delimiter(',');
    sub->add_option("--eps", cfg.eps, "Outer FGMRES relative tolerance")->capture_default_str();
    sub->add_option("--eps0", cfg.eps0, "Inner CG relative tolerance")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "Maximum outer iterations")->capture_default_str();
    sub->add_option("--json", cfg.json_path, "JSON report path");
    add_split(sub);
  };

  CLI::App* mesh_info = app.add_subcommand("mesh-info", "Entity and DOF counts");
  mesh_info->add_option("--n", cfg.n, "Subdivisions per axis")->capture_default_str();
  mesh_info->add_option("--json", cfg.json_path, "JSON report path");
  add_split(mesh_info);

  CLI::App* conv = app.add_subcommand("convergence", "Error table for examples 1 and 2");
  conv->add_option("--example", cfg.example, "Example id (1 or 2)")->capture_default_str();
  conv->add_option("--levels", levels, "Mesh levels, comma separated")->delimiter(',');
  conv->add_option("--n", cfg.n, "Single mesh level (overrides --levels)");
  conv->add_option("--csv", cfg.csv_path, "CSV table path");
  add_common(conv);

  CLI::App* pre = app.add_subcommand("precond", "Outer iteration counts for example 3");
  pre->add_option("--levels", levels, "Mesh levels, comma separated")->delimiter(',');
  pre->add_option("--n", cfg.n, "Single mesh level (overrides --levels)");
  pre->add_option("--csv", cfg.csv_path, "Iteration table path");
  pre->add_option("--history", cfg.history_path, "Residual history CSV path");
  add_common(pre);

  CLI::App* solve = app.add_subcommand("solve", "Single solve with field export");
  solve->add_option("--example", cfg.example, "Example id (1, 2 or 3)")->capture_default_str();
  solve->add_option("--n", cfg.n, "Subdivisions per axis")->capture_default_str();
  solve->add_option("--vtk", cfg.vtk_path, "VTK output path");
  add_common(solve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    if (!levels.empty()) cfg.levels = levels;
    if (active->count("--n") > 0 && (active == conv || active == pre)) cfg.levels = {cfg.n};
    if (!rms.empty()) {
      cfg.rm = rms;
    } else if (active == pre) {
      cfg.rm = {1.0, 20.0, 50.0};
    }
    validate(cfg);
    require_output(cfg.csv_path);
    require_output(cfg.json_path);
    require_output(cfg.vtk_path);
    require_output(cfg.history_path);

    if (active == mesh_info) {
      const nlohmann::json j = cmd_mesh_info(cfg.n, cfg.split);
      std::cout << j.dump(2) << '\n';
      if (!cfg.json_path.empty()) write_text_file(cfg.json_path, j.dump(2) + "\n");
      return 0;
    }
    if (active == conv) {
      const ConvergenceResult res = cmd_convergence(cfg, std::cerr);
      const std::string csv = convergence_csv(res.rows);
      std::cout << csv;
      if (!cfg.csv_path.empty()) write_text_file(cfg.csv_path, csv);
      if (!cfg.json_path.empty()) {
        nlohmann::json j = {{"example", cfg.example}, {"split", split_name(cfg.split)},
                            {"sigma", cfg.sigma}, {"rm", cfg.rm.front()},
                            {"eps", cfg.eps}, {"eps0", cfg.eps0}, {"rows", convergence_json(res.rows)},
                            {"all_converged", res.all_converged}};
        write_text_file(cfg.json_path, j.dump(2) + "\n");
      }
      return res.all_converged ? 0 : 1;
    }
    if (active == pre) {
      const std::vector<PrecondCell> cells = cmd_precond(cfg, std::cerr);
      std::ostringstream table;
      std::ostringstream history;
      table << "n,h,rm,iterations,converged\n";
      history << "n,rm,iteration,relative_residual\n";
      nlohmann::json j = nlohmann::json::array();
      bool all = true;
      for (const PrecondCell& cell : cells) {
        const double h = std::sqrt(3.0) / cell.n;
        table << cell.n << ',' << h << ',' << cell.rm << ',' << cell.report.iterations << ','
              << (cell.report.converged ? 1 : 0) << '\n';
        for (std::size_t k = 0; k < cell.report.relative_residuals.size(); ++k) {
          history << cell.n << ',' << cell.rm << ',' << k << ',' << cell.report.relative_residuals[k] << '\n';
        }
        j.push_back({{"n", cell.n}, {"rm", cell.rm}, {"solver", to_json(cell.report)}});
        all = all && cell.report.converged;
      }
      std::cout << table.str();
      if (!cfg.csv_path.empty()) write_text_file(cfg.csv_path, table.str());
      if (!cfg.history_path.empty()) write_text_file(cfg.history_path, history.str());
      if (!cfg.json_path.empty()) write_text_file(cfg.json_path, j.dump(2) + "\n");
      return all ? 0 : 1;
    }
    const SolveResult res = cmd_solve(cfg, std::cerr);
    std::cout << res.report.dump(2) << '\n';
    if (!cfg.json_path.empty()) write_text_file(cfg.json_path, res.report.dump(2) + "\n");
    return res.converged ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mhdk
