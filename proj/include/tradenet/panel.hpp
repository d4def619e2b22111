#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace tradenet {

// One import transaction: firm x supplier x product x country x period.
struct Transaction {
  std::int64_t firm = 0;
  std::int64_t supplier = 0;
  std::int64_t product = 0;
  std::int64_t country = 0;
  int period = 0;
  double value = 0.0;     // currency units
  double quantity = 0.0;  // physical units
  std::optional<double> covariate;  // e.g. log bilateral RER for (country, period)

  double unit_price() const { return value / quantity; }
};

// The import "instance": everything but the period.
struct InstanceKey {
  std::int64_t firm = 0;
  std::int64_t supplier = 0;
  std::int64_t product = 0;
  std::int64_t country = 0;

  auto operator<=>(const InstanceKey&) const = default;
};

inline InstanceKey instance_of(const Transaction& t) {
  return {t.firm, t.supplier, t.product, t.country};
}

struct TransactionPanel {
  std::vector<Transaction> records;

  // (firm, supplier, product, country, period) unique; value, quantity > 0.
  void validate() const;

  int min_period() const;
  int max_period() const;

  void write_csv(const std::filesystem::path& path, std::uint64_t seed = 0) const;
  // Unit prices are recomputed from value/quantity on load, never trusted.
  static TransactionPanel read_csv(const std::filesystem::path& path);
};

}  // namespace tradenet
