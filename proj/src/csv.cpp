#include <algorithm>
#include <fmt/format.h>
#include <numeric>

#include "fdcim/harness.hpp"

namespace fdcim::harness {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.6g}", v);
}

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header_.size()) {
    throw std::logic_error("CsvTable: row has " + std::to_string(row.size()) + " cells, header has " +
                           std::to_string(header_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
  out += "\n";

  std::vector<std::size_t> order(rows_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto id_col = std::find(header_.begin(), header_.end(), "case_id");
  if (id_col != header_.end()) {
    const auto c = static_cast<std::size_t>(id_col - header_.begin());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto* x = std::get_if<std::int64_t>(&rows_[a][c]);
      const auto* y = std::get_if<std::int64_t>(&rows_[b][c]);
      return x && y && *x < *y;
    });
  }
  for (std::size_t r : order) {
    const auto& row = rows_[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) out += std::to_string(v);
            else if constexpr (std::is_same_v<T, double>) out += format_number(v);
            else out += v;
          },
          row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace fdcim::harness
