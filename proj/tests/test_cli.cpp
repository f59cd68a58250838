#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "memheat/cli.hpp"
#include "memheat/io.hpp"

using namespace memheat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("memheat_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const std::string& command, const json& config, const fs::path& out_dir) {
  cli::RunConfig cfg;
  cfg.command = command;
  cfg.config = config;
  cfg.out_dir = out_dir;
  std::ostringstream out, err;
  const int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json expo = {{"family", "exponential"}, {"k0", 1.0}, {"tau_r", 1.0}};

}  // namespace

TEST_CASE("work on the unit indicator gives three method rows") {
  const fs::path d = scratch_dir("work");
  const json cfg = {{"kernel", expo}, {"process", {{"indicator", {{"length", 1.0}, {"value", {1.0}}}}}}};
  const auto r = run("work", cfg, d);
  REQUIRE(r.code == 0);
  std::ifstream in(d / "work.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "method,value,error_estimate");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double v = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::fabs(v - std::exp(-1.0)) <= 1e-8);
  }
  CHECK(rows == 3);
}

TEST_CASE("identical histories are equivalent") {
  const fs::path d = scratch_dir("equiv");
  const json cfg = {{"kernel", expo}, {"history", {{"constant", {1.0, 0.0, 0.0}}}},
                    {"history2", {{"constant", {1.0, 0.0, 0.0}}}}};
  const auto r = run("equiv", cfg, d);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("equivalent: true, max_residual: 0\n") == 0);
  CHECK(fs::exists(d / "equiv.csv"));
}

TEST_CASE("zero evolution writes all-zero CSV") {
  const fs::path d = scratch_dir("evolve");
  const json cfg = {{"kernel", expo}, {"evolve", {{"nx", 6}, {"dt", 0.1}, {"t_end", 0.5}}}};
  REQUIRE(run("evolve", cfg, d).code == 0);
  const auto u = io::read_table(d / "u.csv");
  CHECK(u.rows.size() == 6 * 7);
  for (const auto& row : u.rows) CHECK(row[2] == 0.0);
  const auto q = io::read_table(d / "q.csv");
  CHECK(q.header == std::vector<std::string>{"t", "x_face", "q"});
}

TEST_CASE("other commands produce their artifacts") {
  const fs::path d = scratch_dir("misc");
  const json abel = {{"family", "damped_abel"}, {"c", 1.0}, {"alpha", 0.5}, {"beta", 1.0}};
  CHECK(run("kernel-info", {{"kernel", abel}}, d).code == 0);
  CHECK(fs::exists(d / "kernel_info.csv"));
  CHECK(fs::exists(d / "kernel_samples.csv"));
  const auto f = run("flux", {{"kernel", abel}, {"history", {{"constant", {1.0}}}}, {"epsilon", 0.01}}, d);
  CHECK(f.code == 0);
  const auto t = io::read_table(d / "flux.csv");
  CHECK(std::fabs(t.rows[0][1] + std::sqrt(M_PI)) < 1e-8);
  CHECK(fs::exists(d / "fading_horizon.csv"));
  CHECK(run("spectrum", {{"kernel", expo}, {"process", {{"indicator", {{"length", 1.0}, {"value", {1.0}}}}}}}, d)
            .code == 0);
  CHECK(fs::exists(d / "spectrum.csv"));
}

TEST_CASE("failures map to exit codes and leave no output") {
  const fs::path d = scratch_dir("fail");
  const auto bad = run("kernel-info", {{"kernel", {{"family", "exponential"}, {"k0", -1.0}, {"tau_r", 1.0}}}}, d);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("kind=validation") != std::string::npos);
  CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);
  CHECK(run("nonsense", {{"kernel", expo}}, d).code == 2);
  CHECK(run("work", {{"kernel", expo}}, d).code == 2);

  // Unreachable decay target: the horizon search gives up.
  const auto na = run("flux", {{"kernel", expo}, {"history", {{"constant", {1.0}}}}, {"epsilon", 1e-30}}, d);
  CHECK(na.code == 3);
  CHECK(na.err.find("estimate=") != std::string::npos);
  CHECK(fs::is_empty(d));
}

TEST_CASE("the executable is deterministic for a fixed seed") {
  const fs::path d = scratch_dir("binary");
  const json cfg = {{"kernel", {{"family", "damped_abel"}, {"c", 1.0}, {"alpha", 0.5}, {"beta", 1.0}}},
                    {"history", {{"constant", {1.0, 0.0, 0.0}}}},
                    {"history2", {{"constant", {1.0, 0.5, 0.0}}}}};
  std::ofstream(d / "cfg.json") << cfg.dump();
  const std::string tool = MEMHEAT_TOOL;
  auto call = [&](const std::string& out) {
    const std::string cmd = tool + " equiv --config " + (d / "cfg.json").string() + " --out " +
                            (d / out).string() + " --seed 7 > /dev/null";
    return std::system(cmd.c_str());
  };
  REQUIRE(call("a") == 0);
  REQUIRE(call("b") == 0);
  CHECK(slurp(d / "a" / "equiv.csv") == slurp(d / "b" / "equiv.csv"));
  const std::string bad = tool + " work --config " + (d / "missing.json").string() + " 2> /dev/null";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == 2);
}
