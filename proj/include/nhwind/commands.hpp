#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nhwind/berry.hpp"
#include "nhwind/bloch.hpp"
#include "nhwind/lattice.hpp"

namespace nhwind {

enum class Command { Bands, Winding, BandWindings, Reductio, Chain, Scan, Localize };
enum class Format { Csv, Json };

std::string_view to_string(Command c);
Command parse_command(std::string_view s);
Format parse_format(std::string_view s);

struct RunConfig {
  Command command = Command::Winding;
  std::string model = "lee";
  double v = 0.52;
  double r = 0.5;
  double gamma = 1.0;
  /// Unset: first-component gauge, or all three gauges for band-windings.
  std::optional<Gauge> gauge;
  int grid_size = kDefaultGrid;
  int n_cells = 30;
  std::vector<int> n_list{30, 100, 200, 400, 800};
  Boundary bc = Boundary::Open;
  /// Brillouin-zone factor A. Unset: period / 2pi for winding, and the
  /// reductio's own cases (1/2 for demo, 2 for lee) for reductio.
  std::optional<double> zones;
  /// Unset: CSV for tabular commands, JSON for winding reports.
  std::optional<Format> format;
  std::string out;

  /// Throws PreconditionError on non-finite parameters, grid_size < 64 or
  /// odd, n < 1, or an unknown model.
  void validate() const;
  Format effective_format() const;
};

BlochModel make_model(const RunConfig& config);
std::vector<int> parse_n_list(std::string_view s);

// Each command returns the serialized output in the configured format.
std::string cmd_bands(const RunConfig& config);
std::string cmd_winding(const RunConfig& config);
std::string cmd_band_windings(const RunConfig& config);
std::string cmd_reductio(const RunConfig& config);
std::string cmd_chain(const RunConfig& config);
std::string cmd_scan(const RunConfig& config);
std::string cmd_localize(const RunConfig& config);

std::string run_command(const RunConfig& config);

}  // namespace nhwind
