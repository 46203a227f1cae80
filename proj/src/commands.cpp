#include "nhwind/commands.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "nhwind/errors.hpp"
#include "nhwind/table.hpp"

namespace nhwind {

using ojson = nlohmann::ordered_json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Bands: return "bands";
    case Command::Winding: return "winding";
    case Command::BandWindings: return "band-windings";
    case Command::Reductio: return "reductio";
    case Command::Chain: return "chain";
    case Command::Scan: return "scan";
    case Command::Localize: return "localize";
  }
  return "?";
}

Command parse_command(std::string_view s) {
  for (Command c : {Command::Bands, Command::Winding, Command::BandWindings, Command::Reductio,
                    Command::Chain, Command::Scan, Command::Localize}) {
    if (to_string(c) == s) return c;
  }
  throw PreconditionError("unknown command '" + std::string(s) + "'");
}

Format parse_format(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw PreconditionError("unknown format '" + std::string(s) + "'");
}

void RunConfig::validate() const {
  if (model != "lee" && model != "demo") {
    throw PreconditionError("unknown model '" + model + "' (expected lee or demo)");
  }
  if (!std::isfinite(v) || !std::isfinite(r) || !std::isfinite(gamma)) {
    throw PreconditionError("model parameters must be finite");
  }
  if (grid_size < 64 || grid_size % 2 != 0) {
    throw PreconditionError("--grid must be even and at least 64");
  }
  if (n_cells < 1) throw PreconditionError("--n must be at least 1");
  if (n_list.empty()) throw PreconditionError("--n-list must not be empty");
  for (int n : n_list) {
    if (n < 1) throw PreconditionError("--n-list entries must be at least 1");
  }
  if (zones && (!std::isfinite(*zones) || *zones == 0.0)) {
    throw PreconditionError("--lee-normalization must be finite and nonzero");
  }
}

Format RunConfig::effective_format() const {
  if (format) return *format;
  switch (command) {
    case Command::Winding:
    case Command::BandWindings:
    case Command::Reductio: return Format::Json;
    default: return Format::Csv;
  }
}

BlochModel make_model(const RunConfig& config) {
  if (config.model == "demo") return BlochModel::demo();
  if (config.model == "lee") return BlochModel::lee(config.v, config.r, config.gamma);
  throw PreconditionError("unknown model '" + config.model + "'");
}

std::vector<int> parse_n_list(std::string_view s) {
  std::vector<int> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const std::string_view item = s.substr(0, comma);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw PreconditionError("bad --n-list entry '" + std::string(item) + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ojson model_json(const RunConfig& config) {
  ojson m;
  m["name"] = config.model;
  if (config.model == "lee") {
    m["v"] = config.v;
    m["r"] = config.r;
    m["gamma"] = config.gamma;
  }
  return m;
}

ojson diagnostic_constants() {
  ojson c;
  c["edge_mode_energy"] = kEdgeModeEnergy;
  c["edge_mode_ipr"] = kEdgeModeIpr;
  c["max_edge_modes"] = kMaxEdgeModes;
  c["pairing_tol"] = kPairingTol;
  return c;
}

Gauge gauge_or_default(const RunConfig& config) {
  return config.gauge.value_or(Gauge::FirstComponentOne);
}

// Single-record outputs: JSON object, or a one-row CSV of the same fields.
std::string render_record(const RunConfig& config, const ojson& record) {
  if (config.effective_format() == Format::Json) return record.dump(2) + "\n";
  std::vector<std::string> names;
  std::vector<Table::Cell> cells;
  for (const auto& [key, value] : record.items()) {
    if (value.is_object() && value.contains("re") && value.contains("im") && value.size() == 2) {
      names.push_back(key);
      cells.emplace_back(cplx(value["re"].get<double>(), value["im"].get<double>()));
    } else if (value.is_object()) {
      for (const auto& [sub, subval] : value.items()) {
        names.push_back(key + "_" + sub);
        if (subval.is_number_integer()) {
          cells.emplace_back(subval.get<std::int64_t>());
        } else if (subval.is_number()) {
          cells.emplace_back(subval.get<double>());
        } else {
          cells.emplace_back(subval.is_string() ? subval.get<std::string>() : subval.dump());
        }
      }
    } else if (value.is_number_integer()) {
      names.push_back(key);
      cells.emplace_back(value.get<std::int64_t>());
    } else if (value.is_number()) {
      names.push_back(key);
      cells.emplace_back(value.get<double>());
    } else {
      names.push_back(key);
      cells.emplace_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  Table t(names);
  t.add_row(std::move(cells));
  return t.to_csv();
}

std::string render_table(const RunConfig& config, const ojson& meta, const Table& table) {
  if (config.effective_format() == Format::Csv) return table.to_csv();
  ojson doc;
  doc["meta"] = meta;
  doc["rows"] = table.to_json();
  return doc.dump(2) + "\n";
}

}  // namespace

std::string cmd_bands(const RunConfig& config) {
  const BlochModel model = make_model(config);
  const Gauge gauge = gauge_or_default(config);
  const LoopTrajectory traj = loop_period(model, Band::Plus, gauge, config.grid_size);

  Table t({"k", "e_tracked", "e_partner"});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const cplx trace = hk(model, traj.k_grid[i]).trace();
    t.add_row({traj.k_grid[i], traj.energies[i], trace - traj.energies[i]});
  }
  ojson meta;
  meta["command"] = "bands";
  meta["model"] = model_json(config);
  meta["gauge"] = to_string(gauge);
  meta["grid_size"] = config.grid_size;
  meta["period"] = traj.period;
  meta["period_over_2pi"] = std::lround(traj.period / (2.0 * std::numbers::pi));
  return render_table(config, meta, t);
}

std::string cmd_winding(const RunConfig& config) {
  const BlochModel model = make_model(config);
  const Gauge gauge = gauge_or_default(config);
  const LoopTrajectory traj = loop_period(model, Band::Plus, gauge, config.grid_size);
  const double zones = config.zones.value_or(traj.period / (2.0 * std::numbers::pi));
  const WindingReport rep = winding_report(model, gauge, config.grid_size, zones, true);

  ojson out;
  out["command"] = "winding";
  out["model"] = model_json(config);
  out["gauge"] = to_string(rep.gauge);
  out["grid_size"] = rep.grid_size;
  out["period"] = rep.period;
  out["raw_integral"] = to_json(rep.raw_integral);
  out["gamma_B"] = to_json(rep.gamma_b);
  out["w"] = to_json(rep.w);
  out["A"] = rep.zones;
  out["w_lee"] = to_json(rep.w_lee);
  out["w_plus"] = to_json(*rep.w_plus);
  out["w_minus"] = to_json(*rep.w_minus);
  return render_record(config, out);
}

std::string cmd_band_windings(const RunConfig& config) {
  const BlochModel model = make_model(config);
  std::vector<Gauge> gauges;
  if (config.gauge) {
    gauges.push_back(*config.gauge);
  } else {
    gauges = {Gauge::FirstComponentOne, Gauge::SecondComponentOne, Gauge::Transpose};
  }

  Table t({"gauge", "w_plus", "w_minus", "sum", "status"});
  int failures = 0;
  for (Gauge g : gauges) {
    try {
      const cplx wp = band_winding(model, Band::Plus, g, config.grid_size);
      const cplx wm = band_winding(model, Band::Minus, g, config.grid_size);
      t.add_row({std::string(to_string(g)), wp, wm, wp + wm, std::string("ok")});
    } catch (const Error& e) {
      // A lone requested gauge reports its failure through the exit code.
      if (config.gauge || ++failures == static_cast<int>(gauges.size())) throw;
      t.add_row({std::string(to_string(g)), cplx(kNaN, kNaN), cplx(kNaN, kNaN), cplx(kNaN, kNaN),
                 std::string(e.kind())});
    }
  }
  ojson meta;
  meta["command"] = "band-windings";
  meta["model"] = model_json(config);
  meta["grid_size"] = config.grid_size;
  if (config.effective_format() == Format::Json) {
    ojson doc;
    doc["meta"] = meta;
    doc["gauges"] = t.to_json();
    return doc.dump(2) + "\n";
  }
  return t.to_csv();
}

std::string cmd_reductio(const RunConfig& config) {
  const BlochModel model = make_model(config);
  const Gauge gauge = gauge_or_default(config);
  const double zones = config.zones.value_or(config.model == "demo" ? 0.5 : 2.0);
  const LoopTrajectory traj = loop_period(model, Band::Plus, gauge, config.grid_size);
  const cplx raw = loop_integral(traj);

  ojson out;
  out["command"] = "reductio";
  out["model"] = model_json(config);
  out["gauge"] = to_string(gauge);
  out["grid_size"] = config.grid_size;
  out["period"] = traj.period;
  out["A"] = zones;
  out["raw_integral"] = to_json(raw);
  out["w_eq2"] = to_json(winding_number(berry_phase(traj)));
  out["w_lee"] = to_json(winding_lee(traj, zones));
  return render_record(config, out);
}

std::string cmd_chain(const RunConfig& config) {
  const BlochModel model = make_model(config);
  ChainSpectrum s = chain_spectrum(model, config.n_cells, config.bc, {false, true});
  std::string left_status = "ok";
  try {
    const CMatrix h = build_chain(model, config.n_cells, config.bc);
    s.left_vectors = left_vectors(h, s);
    for (Eigen::Index i = 0; i < s.left_vectors.cols(); ++i) {
      s.left_iprs.push_back(ipr(s.left_vectors.col(i)));
    }
  } catch (const MatchFailure& e) {
    left_status = std::string("unavailable: ") + e.what();
  }

  Table t({"index", "eigenvalue", "ipr_right", "ipr_left", "class_right"});
  for (std::size_t i = 0; i < s.dim(); ++i) {
    t.add_row({static_cast<std::int64_t>(i), s.eigenvalues[i], s.iprs[i],
               s.left_iprs.empty() ? kNaN : s.left_iprs[i],
               std::string(to_string(classify(s.iprs[i], s.dim())))});
  }
  ojson meta;
  meta["command"] = "chain";
  meta["model"] = model_json(config);
  meta["n_cells"] = s.n_cells;
  meta["bc"] = to_string(s.bc);
  meta["dim"] = s.dim();
  meta["matrix_norm"] = s.matrix_norm;
  meta["max_abs_imag"] = s.max_abs_imag;
  meta["gap"] = s.gap;
  meta["edge_modes_excluded"] = s.edge_modes_excluded;
  meta["defectiveness"] = s.defectiveness;
  meta["left_vectors"] = left_status;
  meta["balancing"] = {{"method", "permute+scale"},
                       {"scale_min", s.balance_scale_min},
                       {"scale_max", s.balance_scale_max}};
  meta["constants"] = diagnostic_constants();
  return render_table(config, meta, t);
}

std::string cmd_scan(const RunConfig& config) {
  const BlochModel model = make_model(config);
  const std::vector<ScanSummary> primary = spectrum_scan(model, config.n_list, config.bc);
  const std::vector<ScanSummary> open =
      config.bc == Boundary::Open ? primary : spectrum_scan(model, config.n_list, Boundary::Open);
  const std::vector<ScanSummary> periodic =
      config.bc == Boundary::Periodic ? primary
                                      : spectrum_scan(model, config.n_list, Boundary::Periodic);

  Table t({"N", "max_abs_imag", "gap", "median_ipr_open", "median_ipr_periodic"});
  for (std::size_t i = 0; i < primary.size(); ++i) {
    t.add_row({static_cast<std::int64_t>(primary[i].n_cells), primary[i].max_abs_imag,
               primary[i].gap, open[i].median_ipr, periodic[i].median_ipr});
  }
  ojson meta;
  meta["command"] = "scan";
  meta["model"] = model_json(config);
  meta["bc"] = to_string(config.bc);
  meta["constants"] = diagnostic_constants();
  return render_table(config, meta, t);
}

std::string cmd_localize(const RunConfig& config) {
  const BlochModel model = make_model(config);
  const ChainSpectrum s = chain_spectrum(model, config.n_cells, config.bc, {true, false});
  const LocalizationProfile right = localization_profile(s.right_vectors);
  const LocalizationProfile left = localization_profile(s.left_vectors);

  Table t({"state", "eigenvalue", "vector", "site", "weight", "ipr", "class"});
  const auto emit = [&](const LocalizationProfile& p, const char* which, std::size_t i) {
    for (Eigen::Index j = 0; j < p.weights.rows(); ++j) {
      t.add_row({static_cast<std::int64_t>(i), s.eigenvalues[i], std::string(which),
                 static_cast<std::int64_t>(j), p.weights(j, static_cast<Eigen::Index>(i)),
                 p.iprs[i], std::string(to_string(p.classes[i]))});
    }
  };
  for (std::size_t i = 0; i < s.dim(); ++i) {
    emit(right, "right", i);
    emit(left, "left", i);
  }
  ojson meta;
  meta["command"] = "localize";
  meta["model"] = model_json(config);
  meta["n_cells"] = s.n_cells;
  meta["bc"] = to_string(s.bc);
  meta["median_ipr_right"] = median(right.iprs);
  meta["median_ipr_left"] = median(left.iprs);
  meta["extended_below"] = 3.0 / static_cast<double>(s.dim());
  meta["localized_above"] = kEdgeModeIpr;
  return render_table(config, meta, t);
}

std::string run_command(const RunConfig& config) {
  config.validate();
  switch (config.command) {
    case Command::Bands: return cmd_bands(config);
    case Command::Winding: return cmd_winding(config);
    case Command::BandWindings: return cmd_band_windings(config);
    case Command::Reductio: return cmd_reductio(config);
    case Command::Chain: return cmd_chain(config);
    case Command::Scan: return cmd_scan(config);
    case Command::Localize: return cmd_localize(config);
  }
  throw PreconditionError("unhandled command");
}

}  // namespace nhwind
