#pragma once

#include <optional>
#include <vector>

#include "nhwind/bloch.hpp"

namespace nhwind {

inline constexpr int kDefaultGrid = 8192;
inline constexpr double kClosureTol = 1e-8;
inline constexpr double kTrackingTieTol = 1e-10;
// Largest allowed |integrand| * dk on the grid. A gauge pole within half a
// step of a sample pushes this above 2.
inline constexpr double kResolutionLimit = 0.5;

/// Branch-tracked eigen-data on one closed loop k in [0, period).
///
/// Sample i sits at k = i * 2pi / grid_size; the loop has
/// grid_size * period / 2pi samples and the sample at k = period is the
/// sample at k = 0.
struct LoopTrajectory {
  BlochModel model;
  Gauge gauge = Gauge::FirstComponentOne;
  Band start_band = Band::Plus;
  int grid_size = kDefaultGrid;
  double period = 0.0;
  std::vector<double> k_grid;
  std::vector<cplx> energies;
  std::vector<Vec2> states;
  std::vector<Row2> left_states;

  double step() const;
  std::size_t size() const { return k_grid.size(); }
  /// True when the loop closes after 4pi, i.e. the bands braid.
  bool braided() const;
};

enum class DerivativeMethod { Analytic, FiniteDifference };

/// Tracks the start_band branch from k = 0 and returns the trajectory over
/// the detected period (2pi or 4pi).
///
/// Throws AmbiguousTracking when neither eigenvalue distance nor eigenvector
/// overlap separates the two candidates at some step, and NoClosure when the
/// gauge-fixed state has not returned after 4pi.
LoopTrajectory loop_period(const BlochModel& model, Band start_band, Gauge gauge,
                           int grid_size = kDefaultGrid);

// <<u|d_k u>> / <<u|u>> at every sample.
std::vector<cplx> connection_integrand(const LoopTrajectory& traj,
                                       DerivativeMethod method = DerivativeMethod::Analytic);

/// Raw closed-loop integral of <<u|d_k u>> / <<u|u>>, periodic trapezoid rule.
cplx loop_integral(const LoopTrajectory& traj,
                   DerivativeMethod method = DerivativeMethod::Analytic);

/// Biorthogonal Berry phase, gamma_B = -i * loop_integral.
///
/// The sign is the one under which gamma_B / pi over a braided 4pi loop is
/// the sum of the two per-band windings returned by band_winding.
cplx berry_phase(const LoopTrajectory& traj,
                 DerivativeMethod method = DerivativeMethod::Analytic);

cplx winding_number(cplx gamma_b);

/// Per-zone normalized winding, winding_number(berry_phase) / A, where A is
/// the number of Brillouin zones the loop traverses.
cplx winding_lee(const LoopTrajectory& traj, double zones);

/// (1/pi) * integral over [0, 2pi] of A(k) = -i <<u|d_k u>> / <<u|u>> along
/// the branch that starts on `band` at k = 0. Not gauge invariant.
cplx band_winding(const BlochModel& model, Band band, Gauge gauge,
                  int grid_size = kDefaultGrid);

struct SplitWinding {
  cplx w_plus;
  cplx w_minus;
  cplx w_total;
};

/// Splits the braided 4pi loop integral at k = 2pi. Requires a 4pi period.
SplitWinding split_check(const BlochModel& model, Gauge gauge, int grid_size = kDefaultGrid);

struct WindingReport {
  cplx raw_integral;
  cplx gamma_b;
  cplx w;
  cplx w_lee;
  double zones = 1.0;
  double period = 0.0;
  std::optional<cplx> w_plus;
  std::optional<cplx> w_minus;
  Gauge gauge = Gauge::FirstComponentOne;
  int grid_size = kDefaultGrid;
};

WindingReport winding_report(const BlochModel& model, Gauge gauge, int grid_size = kDefaultGrid,
                             double zones = 1.0, bool per_band = false);

}  // namespace nhwind
