#include "tradenet/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tradenet {

CsvWriter::CsvWriter(std::string schema, std::vector<std::string> header)
    : schema_(std::move(schema)), header_(std::move(header)) {}

void CsvWriter::set_meta(std::uint64_t seed, const std::string& extra) {
  seed_ = seed;
  has_meta_ = true;
  extra_meta_ = extra;
}

void CsvWriter::set_params_line(std::string params_json) {
  params_line_ = std::move(params_json);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size())
    throw std::invalid_argument("CsvWriter: row width does not match header");
  rows_.push_back(cells);
}

void CsvWriter::add_row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> row;
  row.reserve(cells.size());
  for (double v : cells) row.push_back(format_double(v));
  add_row(row);
}

std::string CsvWriter::format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvWriter::to_string() const {
  std::ostringstream os;
  os << "# tradenet-csv v1 schema=" << schema_;
  if (has_meta_) os << " seed=" << seed_ << " build=" << build_id();
  if (!extra_meta_.empty()) os << " " << extra_meta_;
  os << "\n";
  if (!params_line_.empty()) os << "# params " << params_line_ << "\n";
  for (std::size_t i = 0; i < header_.size(); ++i)
    os << (i ? "," : "") << header_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

void CsvWriter::write(const std::filesystem::path& path) const {
  write_text_atomic(path, to_string());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp);
    os << text;
  }
  std::filesystem::rename(tmp, path);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream is(text);
  std::string line;
  bool saw_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!saw_header) {
      table.header = std::move(cells);
      saw_header = true;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_csv(buf.str());
}

std::string build_id() {
  // Stable identifier compiled into the binary; reruns must be byte-identical,
  // so nothing time-dependent can go here.
  return "tradenet-1.0.0";
}

}  // namespace tradenet
