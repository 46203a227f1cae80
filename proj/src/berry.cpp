#include "nhwind/berry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nhwind/errors.hpp"

namespace nhwind {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

struct Sample {
  double k = 0.0;
  cplx e;
  Vec2 u;
  Row2 l;
};

// Left eigenvectors normalized against the right pair, whatever the gauge's
// own choice of l is. Used for overlap tie-breaks only.
std::pair<Row2, Row2> biorthogonal_left(const EigenSystem2& es) {
  Mat2 u;
  u.col(0) = es.u_plus;
  u.col(1) = es.u_minus;
  const Mat2 inv = u.inverse();
  return {inv.row(0), inv.row(1)};
}

double normalized_overlap(const Row2& l, const Vec2& u) {
  return std::abs((l * u)(0)) / (l.norm() * u.norm());
}

class BranchTracker {
 public:
  BranchTracker(const BlochModel& model, Gauge gauge, int grid_size)
      : model_(model), gauge_(gauge), step_(kTwoPi / grid_size) {}

  double step() const { return step_; }

  Sample start(Band band) const {
    const EigenSystem2 es = eig2(hk(model_, 0.0), gauge_);
    return {0.0, es.energy(band), es.right(band), es.left(band)};
  }

  Sample advance(const Sample& prev, long index) const {
    const double k = static_cast<double>(index) * step_;
    const EigenSystem2 es = eig2(hk(model_, k), gauge_);
    const Band pick = closer_branch(es, prev, k);
    return {k, es.energy(pick), es.right(pick), es.left(pick)};
  }

  // Gauge-fixed eigenvector on the branch nearest to `e` at momentum k.
  Vec2 state_near(double k, cplx e) const {
    const EigenSystem2 es = eig2(hk(model_, k), gauge_);
    return std::abs(es.e_plus - e) <= std::abs(es.e_minus - e) ? es.u_plus : es.u_minus;
  }

 private:
  Band closer_branch(const EigenSystem2& es, const Sample& prev, double k) const {
    const double dp = std::abs(es.e_plus - prev.e);
    const double dm = std::abs(es.e_minus - prev.e);
    if (std::abs(dp - dm) > kTrackingTieTol * std::max(1.0, std::abs(prev.e))) {
      return dp < dm ? Band::Plus : Band::Minus;
    }
    // Energies cannot separate the branches; use the eigenvector overlap with
    // the previous state.
    const EigenSystem2 prev_es = eig2(hk(model_, prev.k), gauge_);
    const Band prev_band =
        std::abs(prev_es.e_plus - prev.e) <= std::abs(prev_es.e_minus - prev.e) ? Band::Plus
                                                                                 : Band::Minus;
    const auto [lp, lm] = biorthogonal_left(prev_es);
    const Row2& l_prev = prev_band == Band::Plus ? lp : lm;
    const double op = normalized_overlap(l_prev, es.u_plus);
    const double om = normalized_overlap(l_prev, es.u_minus);
    if (std::abs(op - om) <= kTrackingTieTol) {
      std::ostringstream msg;
      msg << "branches indistinguishable at k = " << k;
      throw AmbiguousTracking(msg.str());
    }
    return op > om ? Band::Plus : Band::Minus;
  }

  const BlochModel& model_;
  Gauge gauge_;
  double step_;
};

bool same_state(const Vec2& a, const Vec2& b, Gauge gauge) {
  const int free = 1 - fixed_component(gauge);
  return std::abs(a(free) - b(free)) <= kClosureTol * std::max(1.0, std::abs(b(free)));
}

std::vector<Sample> track(const BranchTracker& tracker, Band band, long steps) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(tracker.start(band));
  for (long i = 1; i <= steps; ++i) out.push_back(tracker.advance(out.back(), i));
  return out;
}

Vec2 finite_difference(const BranchTracker& tracker, double k, cplx e) {
  const double h = tracker.step();
  const Vec2 p1 = tracker.state_near(k + h, e);
  const Vec2 p2 = tracker.state_near(k + 2.0 * h, e);
  const Vec2 m1 = tracker.state_near(k - h, e);
  const Vec2 m2 = tracker.state_near(k - 2.0 * h, e);
  return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
}

// <<l|du>> / <<l|u>> per sample, with the norm and grid-resolution checks
// that turn gauge poles into GaugeSingular.
template <typename KAt, typename EAt, typename UAt, typename LAt>
std::vector<cplx> integrand(std::size_t n, const BlochModel& model, Gauge gauge,
                            const BranchTracker& tracker, DerivativeMethod method, KAt k_at,
                            EAt e_at, UAt u_at, LAt l_at) {
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = k_at(i);
    const Vec2& u = u_at(i);
    const Row2& l = l_at(i);
    const Vec2 du = method == DerivativeMethod::Analytic
                        ? state_derivative(hk(model, k), dhk(model, k), e_at(i), u, gauge)
                        : finite_difference(tracker, k, e_at(i));
    const cplx norm = (l * u)(0);
    if (std::abs(norm) < kGaugeSingularTol * l.norm() * u.norm()) {
      std::ostringstream msg;
      msg << "gauge '" << to_string(gauge) << "': <<u|u>> vanishes at k = " << k;
      throw GaugeSingular(msg.str());
    }
    f[i] = (l * du)(0) / norm;
    if (!(std::abs(f[i]) * tracker.step() <= kResolutionLimit)) {
      std::ostringstream msg;
      msg << "gauge '" << to_string(gauge) << "': connection has an unresolved pole near k = "
          << k;
      throw GaugeSingular(msg.str());
    }
  }
  return f;
}

}  // namespace

double LoopTrajectory::step() const { return kTwoPi / grid_size; }

bool LoopTrajectory::braided() const { return period > 1.5 * kTwoPi; }

LoopTrajectory loop_period(const BlochModel& model, Band start_band, Gauge gauge, int grid_size) {
  if (grid_size < 4 || grid_size % 2 != 0) {
    throw PreconditionError("grid_size must be even and at least 4");
  }
  const BranchTracker tracker(model, gauge, grid_size);
  const long n = grid_size;

  std::vector<Sample> samples = track(tracker, start_band, n);
  long period_steps = n;
  if (!same_state(samples[n].u, samples[0].u, gauge)) {
    samples.reserve(2 * static_cast<std::size_t>(n) + 1);
    for (long i = n + 1; i <= 2 * n; ++i) samples.push_back(tracker.advance(samples.back(), i));
    if (!same_state(samples[2 * n].u, samples[0].u, gauge)) {
      throw NoClosure("tracked state does not return to its start after 4pi");
    }
    period_steps = 2 * n;
  }

  LoopTrajectory traj;
  traj.model = model;
  traj.gauge = gauge;
  traj.start_band = start_band;
  traj.grid_size = grid_size;
  traj.period = static_cast<double>(period_steps) * tracker.step();
  traj.k_grid.reserve(period_steps);
  traj.energies.reserve(period_steps);
  traj.states.reserve(period_steps);
  traj.left_states.reserve(period_steps);
  for (long i = 0; i < period_steps; ++i) {
    traj.k_grid.push_back(samples[i].k);
    traj.energies.push_back(samples[i].e);
    traj.states.push_back(samples[i].u);
    traj.left_states.push_back(samples[i].l);
  }
  return traj;
}

std::vector<cplx> connection_integrand(const LoopTrajectory& traj, DerivativeMethod method) {
  const BranchTracker tracker(traj.model, traj.gauge, traj.grid_size);
  return integrand(
      traj.size(), traj.model, traj.gauge, tracker, method,
      [&](std::size_t i) { return traj.k_grid[i]; }, [&](std::size_t i) { return traj.energies[i]; },
      [&](std::size_t i) -> const Vec2& { return traj.states[i]; },
      [&](std::size_t i) -> const Row2& { return traj.left_states[i]; });
}

cplx loop_integral(const LoopTrajectory& traj, DerivativeMethod method) {
  const std::vector<cplx> f = connection_integrand(traj, method);
  cplx sum = 0.0;
  for (const cplx& v : f) sum += v;
  return sum * traj.step();
}

cplx berry_phase(const LoopTrajectory& traj, DerivativeMethod method) {
  return -kI * loop_integral(traj, method);
}

cplx winding_number(cplx gamma_b) { return gamma_b / std::numbers::pi; }

cplx winding_lee(const LoopTrajectory& traj, double zones) {
  if (zones == 0.0 || !std::isfinite(zones)) {
    throw PreconditionError("Brillouin-zone factor A must be finite and nonzero");
  }
  return winding_number(berry_phase(traj)) / zones;
}

cplx band_winding(const BlochModel& model, Band band, Gauge gauge, int grid_size) {
  if (grid_size < 4 || grid_size % 2 != 0) {
    throw PreconditionError("grid_size must be even and at least 4");
  }
  const BranchTracker tracker(model, gauge, grid_size);
  const std::vector<Sample> s = track(tracker, band, grid_size);
  const std::vector<cplx> f = integrand(
      s.size(), model, gauge, tracker, DerivativeMethod::Analytic,
      [&](std::size_t i) { return s[i].k; }, [&](std::size_t i) { return s[i].e; },
      [&](std::size_t i) -> const Vec2& { return s[i].u; },
      [&](std::size_t i) -> const Row2& { return s[i].l; });

  // The branch is not periodic on [0, 2pi]: plain composite trapezoid.
  cplx sum = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
  return -kI * sum * tracker.step() / std::numbers::pi;
}

SplitWinding split_check(const BlochModel& model, Gauge gauge, int grid_size) {
  const LoopTrajectory traj = loop_period(model, Band::Plus, gauge, grid_size);
  if (!traj.braided()) {
    throw PreconditionError("split_check needs a braided 4pi loop; model '" + model.label +
                            "' closes after 2pi");
  }
  const std::vector<cplx> f = connection_integrand(traj);
  const std::size_t half = f.size() / 2;

  cplx first = 0.5 * (f[0] + f[half]);
  for (std::size_t i = 1; i < half; ++i) first += f[i];
  cplx second = 0.5 * (f[half] + f[0]);
  for (std::size_t i = half + 1; i < f.size(); ++i) second += f[i];

  const double h = traj.step();
  SplitWinding out;
  out.w_plus = -kI * first * h / std::numbers::pi;
  out.w_minus = -kI * second * h / std::numbers::pi;
  out.w_total = out.w_plus + out.w_minus;

  const cplx whole = winding_number(berry_phase(traj));
  if (std::abs(out.w_total - whole) > 1e-8) {
    throw SolverFailure("split halves do not add up to the full-loop winding number");
  }
  return out;
}

WindingReport winding_report(const BlochModel& model, Gauge gauge, int grid_size, double zones,
                             bool per_band) {
  if (zones == 0.0 || !std::isfinite(zones)) {
    throw PreconditionError("Brillouin-zone factor A must be finite and nonzero");
  }
  const LoopTrajectory traj = loop_period(model, Band::Plus, gauge, grid_size);
  WindingReport rep;
  rep.gauge = gauge;
  rep.grid_size = grid_size;
  rep.period = traj.period;
  rep.zones = zones;
  rep.raw_integral = loop_integral(traj);
  rep.gamma_b = -kI * rep.raw_integral;
  rep.w = winding_number(rep.gamma_b);
  rep.w_lee = rep.w / zones;
  if (per_band) {
    rep.w_plus = band_winding(model, Band::Plus, gauge, grid_size);
    rep.w_minus = band_winding(model, Band::Minus, gauge, grid_size);
  }
  return rep;
}

}  // namespace nhwind
