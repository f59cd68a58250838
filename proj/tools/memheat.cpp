#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "memheat/cli.hpp"
#include "memheat/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Heat conduction with memory: flux, work, spectra and 1D evolution"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int threads = 1;
  double tol = 0.0;

  const char* commands[][2] = {
      {"kernel-info", "kernel mass, horizon and samples"},
      {"flux", "heat flux of a history, optionally along a process"},
      {"work", "thermal work of a process from a history"},
      {"spectrum", "one-sided Fourier transform and frequency-domain norms"},
      {"equiv", "equivalence of two histories"},
      {"evolve", "1D evolution with Dirichlet data"},
  };
  std::vector<CLI::App*> subs;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* tol_opt = nullptr;
  for (auto& [name, help] : commands) subs.push_back(app.add_subcommand(name, help));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  seed_opt = app.add_option("--seed", seed, "seed for probe processes");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  tol_opt = app.add_option("--tol", tol, "tolerance")->check(CLI::PositiveNumber);
  app.fallthrough();
  for (auto* s : subs) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : memheat::cli::BadInput;
  }

  memheat::cli::RunConfig cfg;
  for (auto* s : subs) {
    if (s->parsed()) cfg.command = s->get_name();
  }
  cfg.out_dir = out_dir;
  cfg.threads = threads;
  if (*seed_opt) cfg.seed = seed;
  if (*tol_opt) cfg.tol = tol;
  if (!config_path.empty()) {
    try {
      memheat::cli::load_config(cfg, config_path);
    } catch (const memheat::Error& e) {
      std::cerr << "memheat: error kind=" << e.kind() << " message=\"" << e.what() << "\"\n";
      return memheat::cli::BadInput;
    }
  }
  return memheat::cli::run(cfg, std::cout, std::cerr);
}
