#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tradenet {

// Tabular artifact with a schema-version comment line above the header:
//   # tradenet-csv v1 schema=<name> seed=<seed> build=<id>
//   # params <json snapshot>            (when provided)
// Cells are written with %.17g so a rerun with the same inputs is
// byte-identical.
class CsvWriter {
 public:
  CsvWriter(std::string schema, std::vector<std::string> header);

  void set_meta(std::uint64_t seed, const std::string& extra = "");
  void set_params_line(std::string params_json);
  void add_row(const std::vector<std::string>& cells);
  void add_row_numeric(const std::vector<double>& cells);

  std::string to_string() const;
  // Atomic write: temp file in the target directory, then rename.
  void write(const std::filesystem::path& path) const;

  static std::string format_double(double v);

 private:
  std::string schema_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::uint64_t seed_ = 0;
  bool has_meta_ = false;
  std::string extra_meta_;
  std::string params_line_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Reads a CSV, skipping leading '#' comment lines. No quoting support; the
// formats written by this project never need it.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

std::string build_id();

void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace tradenet
