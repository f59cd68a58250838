#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "memheat/field.hpp"
#include "memheat/history.hpp"
#include "memheat/kernel.hpp"

namespace memheat::io {

namespace fs = std::filesystem;

/// Kernel from a JSON fragment:
///   {"family": "exponential", "k0": .., "tau_r": ..}
///   {"family": "damped_abel", "c": .., "alpha": .., "beta": ..}
///   {"family": "tabulated", "path": "<csv with columns t,k>"}
/// Relative paths are resolved against base.
RelaxationKernel kernel_from_json(const nlohmann::json& j, const fs::path& base = {});

/// Numeric CSV with a mandatory header row; '#' starts a comment.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
Table read_table(const fs::path& path);
/// Column position by header name, -1 when absent.
int column_index(const Table& table, const std::string& name);

/// Vector field from a table with columns t, gx[, gy, gz]; a theta_dot column
/// is skipped. Repeated abscissae encode jumps.
SampledField field_from_table(const Table& table, Tail tail);

/// Field selector:
///   "zero"                     zero field
///   "table:<path>"             CSV, Zero tail
///   {"table": path, "tail": "zero" | "constant"}
///   {"constant": [gx, gy, gz]}
///   {"indicator": {"length": L, "value": [gx, gy, gz]}}
///   {"s": [..], "values": [[..], ..], "tail": ..}
SampledField field_from_json(const nlohmann::json& j, const fs::path& base = {});

/// Process selector: a field selector for the gradient, or an object
/// {"gradient": <field>, "duration": T, "theta_dot": c}. A "table:<path>"
/// with a theta_dot column sets the temperature rate from that column.
Process process_from_json(const nlohmann::json& j, const fs::path& base = {});

/// Formats a value with 17 significant digits.
std::string format_double(double v);

/// CSV built in memory and written in one go.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  /// First column is a label, the rest numbers.
  void row(const std::string& label, const std::vector<double>& values);
  const std::string& text() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

/// Writes content to a temporary file next to path and renames it into place.
void write_atomic(const fs::path& path, const std::string& content);

/// Writes several files so that either all of them appear or none does.
void write_all_atomic(const std::vector<std::pair<fs::path, std::string>>& files);

}  // namespace memheat::io
