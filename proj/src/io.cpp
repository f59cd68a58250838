#include "memheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "memheat/errors.hpp"

namespace memheat::io {
namespace {

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Vec3 vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3) {
    throw ValidationError("expected an array of 1 to 3 numbers");
  }
  Vec3 v{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError("expected an array of numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

fs::path resolve(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path;
}

Tail parse_tail(const nlohmann::json& j) {
  if (!j.contains("tail")) return Tail::Zero;
  const std::string t = j.at("tail").get<std::string>();
  if (t == "zero") return Tail::Zero;
  if (t == "constant") return Tail::Constant;
  throw ValidationError("tail must be 'zero' or 'constant', got '" + t + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

int column_index(const Table& table, const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

RelaxationKernel kernel_from_json(const nlohmann::json& j, const fs::path& base) {
  if (!j.is_object() || !j.contains("family")) throw ValidationError("kernel needs a 'family'");
  const std::string family = j.at("family").get<std::string>();
  if (family == "exponential") return RelaxationKernel::exponential(number(j, "k0"), number(j, "tau_r"));
  if (family == "damped_abel") {
    return RelaxationKernel::damped_abel(number(j, "c"), number(j, "alpha"), number(j, "beta"));
  }
  if (family == "tabulated") {
    if (!j.contains("path")) throw ValidationError("tabulated kernel needs a 'path'");
    const Table t = read_table(resolve(j.at("path").get<std::string>(), base));
    std::vector<double> ts, ks;
    for (const auto& r : t.rows) {
      if (r.size() < 2) throw ValidationError("kernel table needs columns t,k");
      ts.push_back(r[0]);
      ks.push_back(r[1]);
    }
    return RelaxationKernel::tabulated(std::move(ts), std::move(ks));
  }
  throw ValidationError("unknown kernel family '" + family + "'");
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = parse_number(cells[i], row[i]);
    if (t.header.empty()) {
      if (numeric) throw ValidationError(path.string() + ": header row is missing");
      t.header = cells;
      continue;
    }
    if (!numeric) throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    if (row.size() != t.header.size()) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": row width differs from header");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw ValidationError("'" + path.string() + "' has no data rows");
  return t;
}

SampledField field_from_table(const Table& table, Tail tail) {
  const int rate_col = column_index(table, "theta_dot");
  std::vector<std::size_t> cols;
  for (std::size_t i = 1; i < table.header.size(); ++i) {
    if (static_cast<int>(i) != rate_col) cols.push_back(i);
  }
  if (cols.empty() || cols.size() > 3) throw ValidationError("field table needs 1 to 3 value columns");
  std::vector<double> s;
  std::vector<Vec3> v;
  for (const auto& r : table.rows) {
    s.push_back(r[0]);
    Vec3 x{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < cols.size(); ++i) x[i] = r[cols[i]];
    v.push_back(x);
  }
  return SampledField(std::move(s), std::move(v), tail);
}

SampledField field_from_json(const nlohmann::json& j, const fs::path& base) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "zero") return SampledField::zero();
    if (s.rfind("table:", 0) == 0) return field_from_table(read_table(resolve(s.substr(6), base)), Tail::Zero);
    throw ValidationError("unknown field selector '" + s + "'");
  }
  if (!j.is_object()) throw ValidationError("field must be a string or an object");
  if (j.contains("table")) {
    return field_from_table(read_table(resolve(j.at("table").get<std::string>(), base)), parse_tail(j));
  }
  if (j.contains("constant")) return SampledField::constant(vec3(j.at("constant")));
  if (j.contains("indicator")) {
    const auto& ind = j.at("indicator");
    return SampledField::indicator(number(ind, "length"), vec3(ind.at("value")));
  }
  if (j.contains("s") && j.contains("values")) {
    std::vector<double> s = j.at("s").get<std::vector<double>>();
    std::vector<Vec3> v;
    for (const auto& x : j.at("values")) v.push_back(vec3(x));
    return SampledField(std::move(s), std::move(v), parse_tail(j));
  }
  throw ValidationError("unrecognized field description");
}

Process process_from_json(const nlohmann::json& j, const fs::path& base) {
  // A table with a theta_dot column carries the temperature rate as well.
  std::string table;
  if (j.is_string() && j.get<std::string>().rfind("table:", 0) == 0) table = j.get<std::string>().substr(6);
  if (!table.empty()) {
    const Table t = read_table(resolve(table, base));
    SampledField g = field_from_table(t, Tail::Zero);
    const int rc = column_index(t, "theta_dot");
    if (rc < 0) return Process::from_gradient(std::move(g));
    std::vector<double> s, rate;
    for (const auto& r : t.rows) {
      s.push_back(r[0]);
      rate.push_back(r[rc]);
    }
    const double T = g.last_node();
    return Process(T, SampledField::scalar(std::move(s), rate, Tail::Zero), std::move(g));
  }
  if (j.is_object() && j.contains("gradient")) {
    SampledField g = field_from_json(j.at("gradient"), base);
    const double duration = j.contains("duration") ? number(j, "duration") : -1.0;
    if (!j.contains("theta_dot")) return Process::from_gradient(std::move(g), duration);
    const double T = duration > 0.0 ? duration : g.last_node();
    const double rate = number(j, "theta_dot");
    return Process(T, SampledField::indicator(T, {rate, 0.0, 0.0}, 1), std::move(g));
  }
  return Process::from_gradient(field_from_json(j, base));
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw ValidationError("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  if (values.size() + 1 != width_) throw ValidationError("CSV row width mismatch");
  text_ += label;
  for (double v : values) {
    text_ += ',';
    text_ += format_double(v);
  }
  text_ += '\n';
}

namespace {

fs::path temp_name(const fs::path& path) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  return tmp;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw ValidationError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& content) {
  write_all_atomic({{path, content}});
}

void write_all_atomic(const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> temps;
  try {
    for (const auto& [path, content] : files) {
      if (path.has_parent_path()) fs::create_directories(path.parent_path());
      temps.push_back(temp_name(path));
      write_file(temps.back(), content);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) fs::rename(temps[i], files[i].first);
}

}  // namespace memheat::io
