#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "nhwind/bloch.hpp"

namespace nhwind {

// Row-oriented table with typed cells. Complex cells become paired
// <name>_re,<name>_im columns in CSV and {"re": .., "im": ..} in JSON.
class Table {
 public:
  using Cell = std::variant<double, cplx, std::int64_t, std::string>;

  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// %.17g rendering used for every real in CSV.
std::string format_real(double x);

nlohmann::ordered_json to_json(cplx z);

/// Writes through a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace nhwind
