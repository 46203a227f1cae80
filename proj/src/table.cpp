#include "nhwind/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "nhwind/errors.hpp"

namespace nhwind {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw PreconditionError("table row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json to_json(cplx z) {
  nlohmann::ordered_json j;
  j["re"] = z.real();
  j["im"] = z.imag();
  return j;
}

std::string Table::to_csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out << ',';
    const bool is_complex = !rows_.empty() && std::holds_alternative<cplx>(rows_.front()[c]);
    if (is_complex) {
      out << columns_[c] << "_re," << columns_[c] << "_im";
    } else {
      out << columns_[c];
    }
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out << format_real(v);
            } else if constexpr (std::is_same_v<T, cplx>) {
              out << format_real(v.real()) << ',' << format_real(v.imag());
            } else {
              out << v;
            }
          },
          row[c]);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json Table::to_json() const {
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, cplx>) {
              obj[columns_[c]] = nhwind::to_json(v);
            } else {
              obj[columns_[c]] = v;
            }
          },
          row[c]);
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

}  // namespace nhwind
