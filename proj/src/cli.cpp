#include "memheat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "memheat/errors.hpp"
#include "memheat/evolution.hpp"
#include "memheat/flux.hpp"
#include "memheat/io.hpp"
#include "memheat/log.hpp"
#include "memheat/parallel.hpp"
#include "memheat/work.hpp"

namespace memheat::cli {
namespace {

using nlohmann::json;
using Files = std::vector<std::pair<fs::path, std::string>>;

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  return j.contains(key) ? j.at(key) : empty;
}

double get_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

RelaxationKernel kernel_of(const RunConfig& cfg) {
  if (!cfg.config.contains("kernel")) throw ValidationError("config has no 'kernel'");
  return io::kernel_from_json(cfg.config.at("kernel"), cfg.base_dir);
}

SampledField history_of(const RunConfig& cfg, const char* key = "history") {
  if (!cfg.config.contains(key)) return SampledField::zero();
  return io::field_from_json(cfg.config.at(key), cfg.base_dir);
}

Process process_of(const RunConfig& cfg) {
  if (!cfg.config.contains("process")) throw ValidationError("config has no 'process'");
  return io::process_from_json(cfg.config.at("process"), cfg.base_dir);
}

std::uint64_t seed_of(const RunConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (cfg.config.contains("seed")) return cfg.config.at("seed").get<std::uint64_t>();
  return 1;
}

double tol_of(const RunConfig& cfg, double fallback) {
  const double t = cfg.tol ? *cfg.tol : get_or(cfg.config, "tol", fallback);
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("tolerance must be positive");
  return t;
}

SpectralOptions spectral_options(const RunConfig& cfg) {
  const json& s = section(cfg.config, "spectral");
  SpectralOptions o;
  o.omega_max = get_or(s, "omega_max", o.omega_max);
  o.n_omega = static_cast<int>(get_or(s, "n_omega", o.n_omega));
  if (o.n_omega < 15) throw ValidationError("n_omega must be at least 15");
  return o;
}

fs::path out_file(const RunConfig& cfg, const char* name) { return cfg.out_dir / name; }

int kernel_info(const RunConfig& cfg, std::ostream& out, Files& files) {
  const RelaxationKernel k = kernel_of(cfg);
  io::CsvWriter info({"quantity", "value"});
  info.row("mass", {k.mass()});
  info.row("strength", {k.strength()});
  info.row("rate", {k.rate()});
  info.row("singularity_exponent", {k.singularity_exponent()});
  info.row("initial_value", {k.initial_value().value_or(HUGE_VAL)});
  info.row("truncation_horizon", {k.truncation_horizon()});
  files.emplace_back(out_file(cfg, "kernel_info.csv"), info.text());

  io::CsvWriter samples({"t", "k", "tail_mass", "cosine_transform"});
  const double h = k.truncation_horizon();
  constexpr int n = 200;
  for (int i = 0; i < n; ++i) {
    const double t = h * std::pow(1e-6, 1.0 - static_cast<double>(i) / (n - 1));
    samples.row({t, k(t), k.tail_mass(t), k.cosine_transform(t)});
  }
  files.emplace_back(out_file(cfg, "kernel_samples.csv"), samples.text());
  out << "family: " << to_string(k.family()) << ", mass: " << io::format_double(k.mass()) << '\n';
  return Ok;
}

int flux(const RunConfig& cfg, std::ostream& out, Files& files) {
  const RelaxationKernel k = kernel_of(cfg);
  const SampledField g = history_of(cfg);
  io::CsvWriter csv({"t", "qx", "qy", "qz", "quadrature_error", "truncation_point"});
  const FluxResult q0 = heat_flux(k, g);
  csv.row({0.0, q0.q[0], q0.q[1], q0.q[2], q0.quadrature_error, q0.truncation_point});
  if (cfg.config.contains("process")) {
    const Process p = process_of(cfg);
    const int n = static_cast<int>(get_or(cfg.config, "prolong_steps", 10));
    if (n < 1) throw ValidationError("prolong_steps must be positive");
    for (int i = 1; i <= n; ++i) {
      const double t = p.duration() * i / n;
      const FluxResult q = heat_flux_after(k, g, p, t);
      csv.row({t, q.q[0], q.q[1], q.q[2], q.quadrature_error, q.truncation_point});
    }
  }
  files.emplace_back(out_file(cfg, "flux.csv"), csv.text());
  out << "q: " << io::format_double(q0.q[0]) << ' ' << io::format_double(q0.q[1]) << ' '
      << io::format_double(q0.q[2]) << '\n';
  if (cfg.config.contains("epsilon")) {
    const double a = fading_memory_horizon(k, g, get_or(cfg.config, "epsilon", 0.0));
    io::CsvWriter h({"quantity", "value"});
    h.row("fading_memory_horizon", {a});
    files.emplace_back(out_file(cfg, "fading_horizon.csv"), h.text());
    out << "fading_memory_horizon: " << io::format_double(a) << '\n';
  }
  return Ok;
}

int work(const RunConfig& cfg, std::ostream& out, Files& files) {
  const RelaxationKernel k = kernel_of(cfg);
  const SampledField g = history_of(cfg);
  const Process p = process_of(cfg);
  std::vector<WorkResult> rows;
  if (g.is_zero()) {
    for (auto m : {WorkMethod::CausalDouble, WorkMethod::Swapped, WorkMethod::Symmetrized}) {
      rows.push_back(zero_history_work(k, p, m));
    }
  } else {
    rows.push_back(thermal_work(k, g, p));
    rows.push_back(thermal_work_definition(k, g, p, tol_of(cfg, 1e-11)));
    rows.push_back(spectral_work(k, g, p, spectral_options(cfg)));
  }
  io::CsvWriter csv({"method", "value", "error_estimate"});
  for (const auto& r : rows) {
    csv.row(to_string(r.method), {r.value, r.error_estimate});
    out << to_string(r.method) << ": " << io::format_double(r.value) << '\n';
  }
  files.emplace_back(out_file(cfg, "work.csv"), csv.text());
  return Ok;
}

int spectrum(const RunConfig& cfg, std::ostream& out, Files& files) {
  const RelaxationKernel k = kernel_of(cfg);
  const bool has_process = cfg.config.contains("process");
  const SampledField f = has_process ? process_of(cfg).g() : history_of(cfg);
  const json& s = section(cfg.config, "spectral");
  const double wmax = get_or(s, "omega_max", 50.0);
  const int n = static_cast<int>(get_or(s, "n_omega", 256));
  if (!(wmax > 0.0) || n < 2) throw ValidationError("spectrum needs omega_max > 0 and n_omega >= 2");
  std::vector<double> omega(n);
  // omega = 0 is skipped when the field has a nonzero constant tail.
  const bool skip_zero = f.tail() == Tail::Constant && !f.is_zero();
  for (int i = 0; i < n; ++i) omega[i] = skip_zero ? wmax * (i + 1) / n : wmax * i / (n - 1);
  const SpectralDensity d = fourier_plus(f, omega);
  io::CsvWriter csv({"omega", "k_c", "re_x", "im_x", "re_y", "im_y", "re_z", "im_z"});
  for (int i = 0; i < n; ++i) {
    const CVec3& v = d.values[i];
    csv.row({omega[i], k.cosine_transform(omega[i]), v[0].real(), v[0].imag(), v[1].real(), v[1].imag(),
             v[2].real(), v[2].imag()});
  }
  files.emplace_back(out_file(cfg, "spectrum.csv"), csv.text());

  io::CsvWriter summary({"quantity", "value", "error_estimate"});
  if (!skip_zero) {
    const SpectralValue nk = norm_k(k, f, spectral_options(cfg));
    summary.row("norm_k_squared", {nk.value, nk.error_estimate});
    out << "norm_k_squared: " << io::format_double(nk.value) << '\n';
  }
  if (has_process) {
    const WorkResult w = spectral_work(k, history_of(cfg), process_of(cfg), spectral_options(cfg));
    summary.row("spectral_work", {w.value, w.error_estimate});
    out << "spectral_work: " << io::format_double(w.value) << '\n';
  }
  files.emplace_back(out_file(cfg, "spectrum_summary.csv"), summary.text());
  return Ok;
}

int equiv(const RunConfig& cfg, std::ostream& out, Files& files) {
  const RelaxationKernel k = kernel_of(cfg);
  const SampledField g1 = history_of(cfg, "history");
  const SampledField g2 = history_of(cfg, "history2");
  const double tol = tol_of(cfg, 1e-6);
  const int count = static_cast<int>(get_or(cfg.config, "probes", 10));
  if (count < 1) throw ValidationError("probes must be positive");
  const EquivalenceReport r = equivalence_report(k, g1, g2, tol);
  const auto probes = random_probe_processes(seed_of(cfg), count);
  const WorkEquivalenceReport w = work_equivalence_report(k, g1, g2, probes, tol);
  io::CsvWriter csv({"quantity", "value"});
  csv.row("equivalent", {r.equivalent ? 1.0 : 0.0});
  csv.row("max_residual", {r.max_residual});
  csv.row("worst_tau", {r.worst_tau});
  csv.row("threshold", {r.threshold});
  csv.row("work_equivalent", {w.equivalent ? 1.0 : 0.0});
  csv.row("max_work_difference", {w.max_difference});
  files.emplace_back(out_file(cfg, "equiv.csv"), csv.text());

  const auto grid = default_tau_grid(k);
  const auto res = equivalence_residual(k, g1 - g2, grid);
  io::CsvWriter rcsv({"tau", "Rx", "Ry", "Rz"});
  for (std::size_t i = 0; i < grid.size(); ++i) rcsv.row({grid[i], res[i][0], res[i][1], res[i][2]});
  files.emplace_back(out_file(cfg, "equiv_residual.csv"), rcsv.text());
  out << "equivalent: " << (r.equivalent ? "true" : "false") << ", max_residual: " << r.max_residual
      << '\n';
  out << "work_equivalent: " << (w.equivalent ? "true" : "false")
      << ", max_work_difference: " << w.max_difference << '\n';
  return Ok;
}

std::vector<double> interpolate(const io::Table& t, const std::vector<double>& x) {
  if (t.rows.front().size() < 2) throw ValidationError("table needs two columns");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& rows = t.rows;
    if (x[i] <= rows.front()[0]) {
      out[i] = rows.front()[1];
      continue;
    }
    if (x[i] >= rows.back()[0]) {
      out[i] = rows.back()[1];
      continue;
    }
    auto it = std::upper_bound(rows.begin(), rows.end(), x[i],
                               [](double v, const std::vector<double>& r) { return v < r[0]; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (x[i] - a[0]) / (b[0] - a[0]);
    out[i] = (1.0 - w) * a[1] + w * b[1];
  }
  return out;
}

std::string selector(const json& j, const char* key) {
  if (!j.contains(key)) return "zero";
  if (j.at(key).is_number()) return "";
  return j.at(key).get<std::string>();
}

std::string table_path(const std::string& sel) {
  return sel.rfind("table:", 0) == 0 ? sel.substr(6) : std::string();
}

std::function<double(double)> boundary(const RunConfig& cfg, const json& e, const char* key) {
  const std::string sel = selector(e, key);
  if (sel == "zero") return {};
  if (sel.empty()) {
    const double c = e.at(key).get<double>();
    return [c](double) { return c; };
  }
  if (const std::string p = table_path(sel); !p.empty()) {
    auto table = std::make_shared<io::Table>(io::read_table(cfg.base_dir / p));
    return [table](double t) { return interpolate(*table, {t})[0]; };
  }
  throw ValidationError(std::string("unknown boundary selector for '") + key + "'");
}

EvolutionProblem evolution_problem(const RunConfig& cfg) {
  const json& e = section(cfg.config, "evolve");
  EvolutionProblem pr{.kernel = kernel_of(cfg)};
  pr.length = get_or(e, "length", 1.0);
  pr.nx = static_cast<int>(get_or(e, "nx", 50));
  pr.t_end = get_or(e, "t_end", 1.0);
  pr.dt = get_or(e, "dt", 0.01);
  pr.snapshot_stride = static_cast<int>(get_or(e, "snapshot_stride", 1));
  if (pr.nx < 3) throw ValidationError("nx must be at least 3");
  std::vector<double> x(pr.nx + 1);
  for (int i = 0; i <= pr.nx; ++i) x[i] = pr.length * i / pr.nx;

  const std::string init = selector(e, "initial");
  if (init == "zero") {
    pr.initial_u.assign(pr.nx + 1, 0.0);
  } else if (init == "sin_mode") {
    pr.initial_u.resize(pr.nx + 1);
    for (int i = 0; i < pr.nx; ++i) pr.initial_u[i] = std::sin(std::numbers::pi * i / pr.nx);
    pr.initial_u[pr.nx] = 0.0;
  } else if (const std::string p = table_path(init); !p.empty()) {
    pr.initial_u = interpolate(io::read_table(cfg.base_dir / p), x);
  } else {
    throw ValidationError("unknown initial selector '" + init + "'");
  }
  pr.left = boundary(cfg, e, "left");
  pr.right = boundary(cfg, e, "right");

  const std::string src = selector(e, "source");
  if (src == "sin_mode") {
    const double L = pr.length;
    pr.source = [L](double xx, double) { return std::sin(std::numbers::pi * xx / L); };
  } else if (const std::string p = table_path(src); !p.empty()) {
    auto table = std::make_shared<io::Table>(io::read_table(cfg.base_dir / p));
    pr.source = [table](double xx, double) { return interpolate(*table, {xx})[0]; };
  } else if (src != "zero") {
    throw ValidationError("unknown source selector '" + src + "'");
  }

  const std::string hist = selector(e, "history");
  if (hist == "steady") {
    const double dx = pr.dx();
    for (int f = 0; f < pr.nx; ++f) {
      const double g = (pr.initial_u[f + 1] - pr.initial_u[f]) / dx;
      pr.initial_history.push_back(SampledField::constant({g, 0.0, 0.0}, 1));
    }
  } else if (hist != "zero") {
    throw ValidationError("unknown history selector '" + hist + "'");
  }
  return pr;
}

int evolve_cmd(const RunConfig& cfg, std::ostream& out, Files& files) {
  const EvolutionProblem pr = evolution_problem(cfg);
  const EvolutionResult r = evolve(pr);
  io::CsvWriter u({"t", "x", "u"});
  io::CsvWriter q({"t", "x_face", "q"});
  for (std::size_t n = 0; n < r.times.size(); ++n) {
    for (std::size_t i = 0; i < r.x_nodes.size(); ++i) u.row({r.times[n], r.x_nodes[i], r.u[n][i]});
    for (std::size_t f = 0; f < r.x_faces.size(); ++f) q.row({r.times[n], r.x_faces[f], r.q[n][f]});
  }
  files.emplace_back(out_file(cfg, "u.csv"), u.text());
  files.emplace_back(out_file(cfg, "q.csv"), q.text());
  out << "steps: " << pr.steps() << ", snapshots: " << r.times.size()
      << ", max_abs_u_final: " << io::format_double(r.diagnostics.max_abs_u.back()) << '\n';
  return Ok;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

void load_config(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  try {
    cfg.config = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path.string() + "': " + e.what());
  }
  if (!cfg.config.is_object()) throw ValidationError("config must be a JSON object");
  cfg.base_dir = path.parent_path();
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.threads < 1) throw ValidationError("threads must be positive");
    set_thread_count(cfg.threads);
    Files files;
    int code = Ok;
    const std::string& c = cfg.command;
    if (c == "kernel-info") code = kernel_info(cfg, out, files);
    else if (c == "flux") code = flux(cfg, out, files);
    else if (c == "work") code = work(cfg, out, files);
    else if (c == "spectrum") code = spectrum(cfg, out, files);
    else if (c == "equiv") code = equiv(cfg, out, files);
    else if (c == "evolve") code = evolve_cmd(cfg, out, files);
    else throw ValidationError("unknown command '" + c + "'");
    io::write_all_atomic(files);
    return code;
  } catch (const StabilityFailure& e) {
    err << "memheat: error kind=" << e.kind() << " amplification=" << e.estimate()
        << " max_admissible_dt=" << e.max_admissible_dt() << " message=\"" << one_line(e.what())
        << "\"\n";
    return NumericalFailure;
  } catch (const QuadratureFailure& e) {
    err << "memheat: error kind=" << e.kind() << " estimate=" << e.estimate()
        << " best_value=" << e.best_value() << " message=\"" << one_line(e.what()) << "\"\n";
    return NumericalFailure;
  } catch (const Error& e) {
    if (e.numerical()) {
      err << "memheat: error kind=" << e.kind()
          << " estimate=" << static_cast<const NumericalError&>(e).estimate() << " message=\""
          << one_line(e.what()) << "\"\n";
      return NumericalFailure;
    }
    err << "memheat: error kind=" << e.kind() << " message=\"" << one_line(e.what()) << "\"\n";
    return BadInput;
  } catch (const json::exception& e) {
    err << "memheat: error kind=config message=\"" << one_line(e.what()) << "\"\n";
    return BadInput;
  } catch (const fs::filesystem_error& e) {
    err << "memheat: error kind=io message=\"" << one_line(e.what()) << "\"\n";
    return BadInput;
  } catch (const std::exception& e) {
    err << "memheat: error kind=internal message=\"" << one_line(e.what()) << "\"\n";
    return Failure;
  }
}

}  // namespace memheat::cli
