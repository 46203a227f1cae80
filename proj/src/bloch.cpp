#include "nhwind/bloch.hpp"

#include <cmath>
#include <utility>

#include "nhwind/errors.hpp"

namespace nhwind {

namespace {
constexpr cplx kI{0.0, 1.0};
}

namespace pauli {
Mat2 identity() { return Mat2::Identity(); }
Mat2 sx() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Mat2 sy() {
  Mat2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}
Mat2 sz() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

BlochModel BlochModel::lee(double v, double r, double gamma) {
  BlochModel m;
  m.hop_zero = v * pauli::sx() + (kI * gamma / 2.0) * pauli::sz();
  m.hop_plus = (r / 2.0) * pauli::sx() - (kI * r / 2.0) * pauli::sz();
  m.hop_minus = (r / 2.0) * pauli::sx() + (kI * r / 2.0) * pauli::sz();
  m.label = "lee";
  return m;
}

BlochModel BlochModel::demo() {
  BlochModel m;
  m.hop_plus = 0.5 * pauli::sx() - 0.5 * kI * pauli::sy();
  m.hop_minus = 0.5 * pauli::sx() + 0.5 * kI * pauli::sy();
  m.label = "demo";
  return m;
}

BlochModel BlochModel::constant(const Mat2& h, std::string label) {
  BlochModel m;
  m.hop_zero = h;
  m.label = std::move(label);
  return m;
}

Mat2 hk(const BlochModel& model, double k) {
  const cplx phase = std::polar(1.0, k);
  return model.hop_minus * std::conj(phase) + model.hop_zero + model.hop_plus * phase;
}

Mat2 dhk(const BlochModel& model, double k) {
  const cplx phase = std::polar(1.0, k);
  return -kI * std::conj(phase) * model.hop_minus + kI * phase * model.hop_plus;
}

std::string_view to_string(Gauge g) {
  switch (g) {
    case Gauge::FirstComponentOne: return "first";
    case Gauge::SecondComponentOne: return "second";
    case Gauge::Transpose: return "transpose";
  }
  return "?";
}

std::string_view to_string(Band b) { return b == Band::Plus ? "plus" : "minus"; }

Gauge parse_gauge(std::string_view s) {
  if (s == "first") return Gauge::FirstComponentOne;
  if (s == "second") return Gauge::SecondComponentOne;
  if (s == "transpose") return Gauge::Transpose;
  throw PreconditionError("unknown gauge '" + std::string(s) + "'");
}

Band other(Band b) { return b == Band::Plus ? Band::Minus : Band::Plus; }

int fixed_component(Gauge g) { return g == Gauge::SecondComponentOne ? 1 : 0; }

namespace {

// Unnormalized right eigenvector for eigenvalue e, taken from whichever row
// of (H - e) gives the better-conditioned null vector.
Vec2 null_vector(const Mat2& h, cplx e) {
  const Vec2 from_row0(h(0, 1), e - h(0, 0));
  const Vec2 from_row1(e - h(1, 1), h(1, 0));
  return from_row0.norm() >= from_row1.norm() ? from_row0 : from_row1;
}

Vec2 fix_gauge(Vec2 u, Gauge gauge) {
  const int j = fixed_component(gauge);
  if (std::abs(u(j)) < kGaugeSingularTol * u.norm()) {
    throw GaugeSingular("gauge '" + std::string(to_string(gauge)) +
                        "': fixed eigenvector component vanishes");
  }
  return u / u(j);
}

}  // namespace

EigenSystem2 eig2(const Mat2& h, Gauge gauge) {
  const cplx half_trace = 0.5 * (h(0, 0) + h(1, 1));
  const cplx half_diff = 0.5 * (h(0, 0) - h(1, 1));
  const cplx root = std::sqrt(half_diff * half_diff + h(0, 1) * h(1, 0));

  EigenSystem2 es;
  es.gauge = gauge;
  es.e_plus = half_trace + root;
  es.e_minus = half_trace - root;

  Vec2 up = null_vector(h, es.e_plus);
  Vec2 um = null_vector(h, es.e_minus);
  const double scale = h.norm();
  if (up.norm() <= 1e-300 + 1e-14 * scale && um.norm() <= 1e-300 + 1e-14 * scale) {
    // H is a multiple of the identity: every vector is an eigenvector.
    up = Vec2(1.0, 0.0);
    um = Vec2(0.0, 1.0);
  }

  Mat2 unit;
  unit.col(0) = up.normalized();
  unit.col(1) = um.normalized();
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Mat2>(unit).singularValues();
  if (!(sv(1) >= kDefectiveTol * sv(0))) {
    throw Defective("2x2 eigenvector matrix is rank deficient (exceptional point)");
  }

  es.u_plus = fix_gauge(up, gauge);
  es.u_minus = fix_gauge(um, gauge);

  if (gauge == Gauge::Transpose) {
    es.l_plus = es.u_plus.transpose();
    es.l_minus = es.u_minus.transpose();
  } else {
    Mat2 u;
    u.col(0) = es.u_plus;
    u.col(1) = es.u_minus;
    const Mat2 inv = u.inverse();
    es.l_plus = inv.row(0);
    es.l_minus = inv.row(1);
  }
  return es;
}

cplx energy_derivative(const Mat2& h, const Mat2& dh, cplx e) {
  const cplx half_trace = 0.5 * (h(0, 0) + h(1, 1));
  const cplx d_half_trace = 0.5 * (dh(0, 0) + dh(1, 1));
  const cplx half_diff = 0.5 * (h(0, 0) - h(1, 1));
  const cplx d_half_diff = 0.5 * (dh(0, 0) - dh(1, 1));
  const cplx d_disc = 2.0 * half_diff * d_half_diff + dh(0, 1) * h(1, 0) + h(0, 1) * dh(1, 0);
  // e - half_trace is the branch of sqrt(disc) that e sits on.
  return d_half_trace + d_disc / (2.0 * (e - half_trace));
}

Vec2 state_derivative(const Mat2& h, const Mat2& dh, cplx e, const Vec2& u, Gauge gauge) {
  const int fixed = fixed_component(gauge);
  const int free = 1 - fixed;
  const cplx de = energy_derivative(h, dh, e);
  const Mat2 shifted = h - e * Mat2::Identity();
  const Vec2 rhs = -(dh - de * Mat2::Identity()) * u;
  const int row = std::abs(shifted(0, free)) >= std::abs(shifted(1, free)) ? 0 : 1;
  if (shifted(row, free) == cplx(0.0)) {
    throw GaugeSingular("gauge-fixed eigenvector derivative is undefined");
  }
  Vec2 du = Vec2::Zero();
  du(free) = rhs(row) / shifted(row, free);
  return du;
}

}  // namespace nhwind
