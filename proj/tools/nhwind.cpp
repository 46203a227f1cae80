// Command-line front end: one command per process, plot-ready CSV/JSON out.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "nhwind/commands.hpp"
#include "nhwind/errors.hpp"
#include "nhwind/table.hpp"

int main(int argc, char** argv) {
  using namespace nhwind;

  CLI::App app{"Winding numbers and finite-chain spectra of non-Hermitian two-band models"};
  RunConfig config;
  std::string command;
  std::string gauge;
  std::string bc = "open";
  std::string n_list;
  std::string format;
  double zones = 0.0;

  app.add_option("command", command, "bands | winding | band-windings | reductio | chain | scan | localize")
      ->required()
      ->check(CLI::IsMember({"bands", "winding", "band-windings", "reductio", "chain", "scan",
                             "localize"}));
  app.add_option("--model", config.model, "lee | demo")
      ->check(CLI::IsMember({"lee", "demo"}))
      ->capture_default_str();
  app.add_option("--v", config.v, "intracell coupling v")->capture_default_str();
  app.add_option("--r", config.r, "intercell amplitude r")->capture_default_str();
  app.add_option("--gamma", config.gamma, "non-Hermitian strength gamma")->capture_default_str();
  app.add_option("--gauge", gauge, "first | second | transpose")
      ->check(CLI::IsMember({"first", "second", "transpose"}));
  app.add_option("--grid", config.grid_size, "k samples per 2pi (even, >= 64)")
      ->capture_default_str();
  app.add_option("--n", config.n_cells, "unit cells for chain/localize")->capture_default_str();
  app.add_option("--n-list", n_list, "comma-separated unit-cell counts for scan");
  app.add_option("--bc", bc, "open | periodic")
      ->check(CLI::IsMember({"open", "periodic"}))
      ->capture_default_str();
  auto* zones_opt =
      app.add_option("--lee-normalization", zones, "Brillouin-zone factor A for the per-zone winding");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", config.out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  try {
    config.command = parse_command(command);
    if (!gauge.empty()) config.gauge = parse_gauge(gauge);
    config.bc = parse_boundary(bc);
    if (!n_list.empty()) config.n_list = parse_n_list(n_list);
    if (!format.empty()) config.format = parse_format(format);
    if (*zones_opt) config.zones = zones;

    const std::string output = run_command(config);
    if (config.out.empty()) {
      std::cout << output;
    } else {
      write_atomically(config.out, output);
    }
  } catch (const Error& e) {
    std::cerr << "nhwind: " << e.kind() << ": " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "nhwind: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
