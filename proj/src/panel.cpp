#include "tradenet/panel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "tradenet/csvio.hpp"
#include "tradenet/params.hpp"

namespace tradenet {

void TransactionPanel::validate() const {
  std::set<std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, int>> seen;
  for (const auto& t : records) {
    if (!(t.value > 0.0) || !(t.quantity > 0.0))
      throw DomainError("TransactionPanel: value and quantity must be > 0");
    if (!seen.insert({t.firm, t.supplier, t.product, t.country, t.period}).second)
      throw DomainError("TransactionPanel: duplicate (firm,supplier,product,country,period)");
  }
}

int TransactionPanel::min_period() const {
  int lo = records.empty() ? 0 : records.front().period;
  for (const auto& t : records) lo = std::min(lo, t.period);
  return lo;
}

int TransactionPanel::max_period() const {
  int hi = records.empty() ? 0 : records.front().period;
  for (const auto& t : records) hi = std::max(hi, t.period);
  return hi;
}

void TransactionPanel::write_csv(const std::filesystem::path& path, std::uint64_t seed) const {
  CsvWriter csv("transaction_panel",
                {"firm", "supplier", "product", "country", "period", "value", "quantity",
                 "unit_price", "covariate"});
  csv.set_meta(seed);
  for (const auto& t : records) {
    csv.add_row({std::to_string(t.firm), std::to_string(t.supplier), std::to_string(t.product),
                 std::to_string(t.country), std::to_string(t.period),
                 CsvWriter::format_double(t.value), CsvWriter::format_double(t.quantity),
                 CsvWriter::format_double(t.unit_price()),
                 t.covariate ? CsvWriter::format_double(*t.covariate) : ""});
  }
  csv.write(path);
}

TransactionPanel TransactionPanel::read_csv(const std::filesystem::path& path) {
  const CsvTable table = tradenet::read_csv(path);
  const int c_firm = table.column("firm");
  const int c_supplier = table.column("supplier");
  const int c_product = table.column("product");
  const int c_country = table.column("country");
  const int c_period = table.column("period");
  const int c_value = table.column("value");
  const int c_quantity = table.column("quantity");
  const int c_covariate = table.column("covariate");
  if (c_firm < 0 || c_supplier < 0 || c_product < 0 || c_country < 0 || c_period < 0 ||
      c_value < 0 || c_quantity < 0)
    throw std::runtime_error("transaction panel CSV: missing required column");

  TransactionPanel panel;
  panel.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Transaction t;
    t.firm = std::stoll(row[c_firm]);
    t.supplier = std::stoll(row[c_supplier]);
    t.product = std::stoll(row[c_product]);
    t.country = std::stoll(row[c_country]);
    t.period = std::stoi(row[c_period]);
    t.value = std::stod(row[c_value]);
    t.quantity = std::stod(row[c_quantity]);
    if (c_covariate >= 0 && !row[c_covariate].empty())
      t.covariate = std::stod(row[c_covariate]);
    panel.records.push_back(t);
  }
  panel.validate();
  return panel;
}

}  // namespace tradenet
