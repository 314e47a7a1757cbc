#include <doctest.h>

#include "mhdk/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mhdk;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
};

// Runs the entry point with stdout and stderr captured.
CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "mhdk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  CliRun r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  r.out = out.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "mhdk_cli_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("mesh info counts") {
  const struct {
    int n;
    long j_phi, a_r, a_constrained, r_constrained;
  } cases[] = {{1, 60, 65, 36, 26}, {2, 408, 321, 144, 98}, {4, 2976, 1937, -1, -1}, {8, 22656, 13281, -1, -1}, {16, 176640, 97985, -1, -1}};
  for (const auto& c : cases) {
    CAPTURE(c.n);
    const nlohmann::json j = cmd_mesh_info(c.n);
    CHECK(j["dofs"]["J_phi"].get<long>() == c.j_phi);
    CHECK(j["dofs"]["A_r"].get<long>() == c.a_r);
    CHECK(j["dofs"]["total"].get<long>() == c.j_phi + c.a_r);
    if (c.a_constrained >= 0) {
      CHECK(j["constrained"]["A"].get<long>() == c.a_constrained);
      CHECK(j["constrained"]["r"].get<long>() == c.r_constrained);
    }
    CHECK(j["n"] == c.n);
  }
  const auto start = std::chrono::steady_clock::now();
  cmd_mesh_info(16);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1.0);
  CHECK(cmd_mesh_info(4, SubcubeSplit::Uniform)["dofs"]["J_phi"] == 2976);
  CHECK_THROWS_AS(cmd_mesh_info(0), InvalidArgument);
}

TEST_CASE("config validation") {
  RunConfig ok;
  CHECK_NOTHROW(validate(ok));
  auto bad = [&](auto mutate) {
    RunConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), InvalidArgument);
  };
  bad([](RunConfig& c) { c.eps = 0.0; });
  bad([](RunConfig& c) { c.eps = 1.0; });
  bad([](RunConfig& c) { c.eps0 = 1.5; });
  bad([](RunConfig& c) { c.max_iter = 0; });
  bad([](RunConfig& c) { c.sigma = -1.0; });
  bad([](RunConfig& c) { c.rm = {1.0, 0.0}; });
  bad([](RunConfig& c) { c.rm.clear(); });
  bad([](RunConfig& c) { c.n = 0; });
  bad([](RunConfig& c) { c.levels = {2, 6}; });
  bad([](RunConfig& c) { c.levels = {4, 2}; });
  bad([](RunConfig& c) { c.levels = {2, 2}; });
  bad([](RunConfig& c) { c.levels.clear(); });
  bad([](RunConfig& c) { c.example = 4; });
}

TEST_CASE("mesh-info command line") {
  const CliRun r = run({"mesh-info", "--n", "2"});
  CHECK(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["dofs"]["J_phi"] == 408);
  CHECK(j["split"] == "reflected");
  CHECK(run({"mesh-info", "--n", "2", "--split", "uniform"}).code == 0);
  CHECK(run({"mesh-info", "--n", "0"}).code == 2);
  CHECK(run({"mesh-info", "--split", "diagonal"}).code != 0);
  CHECK(run({}).code != 0);
  CHECK(run({"bogus"}).code != 0);
}

TEST_CASE("convergence on a single level") {
  const fs::path d = scratch_dir();
  const CliRun r = run({"convergence", "--example", "1", "--levels", "2", "--csv", (d / "c.csv").string(), "--json",
                        (d / "c.json").string()});
  CHECK(r.code == 0);
  const std::string csv = slurp(d / "c.csv");
  CHECK(csv == r.out);
  std::istringstream lines(csv);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "h,e_J,ord_J,e_phi,ord_phi,e_Acurl,ord_Acurl,e_AL2,ord_AL2,divJ");
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(row.find(",,") != std::string::npos);
  const nlohmann::json j = nlohmann::json::parse(slurp(d / "c.json"));
  CHECK(j["rows"].size() == 1);
  CHECK(j["rows"][0]["ord_J"].is_null());
  CHECK(j["all_converged"] == true);
  CHECK(j["rows"][0]["divJ"].get<double>() <= 1e-9);
  CHECK(run({"convergence", "--example", "3", "--levels", "2"}).code == 2);
}

TEST_CASE("identical configurations give identical files") {
  const fs::path d = scratch_dir();
  for (const char* tag : {"a", "b"}) {
    const std::string t(tag);
    REQUIRE(run({"convergence", "--example", "2", "--levels", "1,2", "--csv", (d / ("conv_" + t + ".csv")).string(),
                 "--json", (d / ("conv_" + t + ".json")).string()})
                .code == 0);
    REQUIRE(run({"precond", "--levels", "2", "--rm", "1,20", "--csv", (d / ("pre_" + t + ".csv")).string(), "--json",
                 (d / ("pre_" + t + ".json")).string(), "--history", (d / ("hist_" + t + ".csv")).string()})
                .code == 0);
    REQUIRE(run({"solve", "--example", "3", "--n", "2", "--rm", "20", "--json", (d / ("solve_" + t + ".json")).string(),
                 "--vtk", (d / ("solve_" + t + ".vtk")).string()})
                .code == 0);
  }
  for (const char* name : {"conv_%.csv", "conv_%.json", "pre_%.csv", "pre_%.json", "hist_%.csv", "solve_%.json", "solve_%.vtk"}) {
    std::string a(name), b(name);
    a.replace(a.find('%'), 1, "a");
    b.replace(b.find('%'), 1, "b");
    CAPTURE(a);
    const std::string ca = slurp(d / a);
    CHECK_FALSE(ca.empty());
    CHECK(ca == slurp(d / b));
  }
}

TEST_CASE("precond table and history") {
  const fs::path d = scratch_dir();
  const CliRun r = run({"precond", "--n", "2", "--rm", "1", "--csv", (d / "p.csv").string(), "--history",
                        (d / "h.csv").string()});
  CHECK(r.code == 0);
  std::istringstream table(slurp(d / "p.csv"));
  std::string header, row;
  std::getline(table, header);
  std::getline(table, row);
  CHECK(header == "n,h,rm,iterations,converged");
  CHECK(row.rfind("2,", 0) == 0);
  const std::string hist = slurp(d / "h.csv");
  CHECK(hist.rfind("n,rm,iteration,relative_residual\n2,1,0,1\n", 0) == 0);
}

TEST_CASE("solve writes a report and a vtk file") {
  const fs::path d = scratch_dir();
  const fs::path vtk = d / "ex1.vtk";
  const CliRun r = run({"solve", "--example", "1", "--n", "2", "--vtk", vtk.string()});
  CHECK(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["divJ_L2"].get<double>() <= 1e-9);
  CHECK(j["divB_max_jump"].get<double>() <= 1e-12);
  CHECK(j["energy"]["defect1"].get<double>() <= 1e-6);
  CHECK(j["energy"]["defect2"].get<double>() <= 1e-6);
  CHECK(j["errors"]["A_Hcurl"].get<double>() == doctest::Approx(9.8055e-2).epsilon(0.1));
  const std::string text = slurp(vtk);
  CHECK(text.find("CELLS 48 240") != std::string::npos);
  CHECK(text.find("CELL_DATA 48") != std::string::npos);
  CHECK(text.find("VECTORS B double") != std::string::npos);
  CHECK(text.find("VECTORS J double") != std::string::npos);
  CHECK(text.find("SCALARS phi double") != std::string::npos);
  const nlohmann::json j3 = nlohmann::json::parse(run({"solve", "--example", "3", "--n", "2"}).out);
  CHECK_FALSE(j3.contains("errors"));
}

TEST_CASE("bad output paths fail before any work") {
  const std::string missing = "/nonexistent_dir_mhdk/sub/out";
  CHECK(run({"solve", "--n", "2", "--vtk", missing + ".vtk"}).code == 2);
  CHECK_FALSE(fs::exists(missing + ".vtk"));
  CHECK(run({"convergence", "--levels", "2", "--csv", missing + ".csv"}).code == 2);
  CHECK(run({"precond", "--levels", "2", "--json", missing + ".json"}).code == 2);
  CHECK(run({"mesh-info", "--json", missing + ".json"}).code == 2);
  CHECK_FALSE(fs::exists("/nonexistent_dir_mhdk"));
}

TEST_CASE("exit code reports non-convergence") {
  CHECK(run({"precond", "--levels", "2", "--rm", "50", "--max-iter", "2"}).code == 1);
  CHECK(run({"solve", "--example", "2", "--n", "2", "--max-iter", "1"}).code == 1);
  CHECK(run({"solve", "--eps", "2"}).code == 2);
}

TEST_CASE("toml configuration with flag override") {
  const fs::path d = scratch_dir();
  const fs::path cfg = d / "run.toml";
  std::ofstream(cfg) << "[mesh-info]\nn = 4\n";
  const CliRun from_file = run({"--config", cfg.string(), "mesh-info"});
  REQUIRE(from_file.code == 0);
  CHECK(nlohmann::json::parse(from_file.out)["dofs"]["J_phi"] == 2976);
  const CliRun flag_wins = run({"--config", cfg.string(), "mesh-info", "--n", "2"});
  REQUIRE(flag_wins.code == 0);
  CHECK(nlohmann::json::parse(flag_wins.out)["dofs"]["J_phi"] == 408);
}
