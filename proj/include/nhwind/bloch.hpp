#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace nhwind {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
/// Row vector acting from the left: <<l| H = E <<l|.
using Row2 = Eigen::RowVector2cd;

namespace pauli {
Mat2 identity();
Mat2 sx();
Mat2 sy();
Mat2 sz();
}  // namespace pauli

// Two-band Bloch Hamiltonian with nearest-cell hoppings:
//   H(k) = hop_minus e^{-ik} + hop_zero + hop_plus e^{+ik}
struct BlochModel {
  Mat2 hop_minus = Mat2::Zero();
  Mat2 hop_zero = Mat2::Zero();
  Mat2 hop_plus = Mat2::Zero();
  std::string label;

  /// H(k) = (v + r cos k) sx + (r sin k + i gamma/2) sz.
  static BlochModel lee(double v, double r, double gamma);
  /// H(k) = cos k sx + sin k sy.
  static BlochModel demo();
  /// k-independent model (hop_plus = hop_minus = 0).
  static BlochModel constant(const Mat2& h, std::string label = "constant");
};

Mat2 hk(const BlochModel& model, double k);
/// dH/dk, analytic from the Fourier blocks.
Mat2 dhk(const BlochModel& model, double k);

enum class Gauge { FirstComponentOne, SecondComponentOne, Transpose };
enum class Band { Plus, Minus };

std::string_view to_string(Gauge g);
std::string_view to_string(Band b);
Gauge parse_gauge(std::string_view s);
Band other(Band b);

struct EigenSystem2 {
  cplx e_plus;
  cplx e_minus;
  Vec2 u_plus;
  Vec2 u_minus;
  Row2 l_plus;
  Row2 l_minus;
  Gauge gauge = Gauge::FirstComponentOne;

  cplx energy(Band b) const { return b == Band::Plus ? e_plus : e_minus; }
  const Vec2& right(Band b) const { return b == Band::Plus ? u_plus : u_minus; }
  const Row2& left(Band b) const { return b == Band::Plus ? l_plus : l_minus; }
};

// Index of the component a gauge pins to one. Transpose pins the first
// component, matching the (1, psi) representative paired with l = u^T.
int fixed_component(Gauge g);

/// Closed-form eigensystem of a 2x2 matrix.
///
/// E_pm = tr/2 +- sqrt(disc) on the principal branch, where
/// disc = ((a - d)/2)^2 + b c. Right eigenvectors are scaled so the
/// component fixed by the gauge equals one. Left eigenvectors are u^T in the
/// Transpose gauge and rows of the inverse right-eigenvector matrix
/// otherwise.
///
/// Throws GaugeSingular when the fixed component is below 1e-12 of the
/// vector norm, and Defective when the normalized eigenvector matrix has
/// singular-value ratio below 1e-10.
EigenSystem2 eig2(const Mat2& h, Gauge gauge);

/// Eigenvalue derivative dE/dk for the eigenvalue `e` of `h`, from the
/// derivative of the characteristic discriminant.
cplx energy_derivative(const Mat2& h, const Mat2& dh, cplx e);

/// du/dk of the gauge-fixed right eigenvector `u` (fixed component held at
/// one), obtained from (H - E) u' = -(H' - E') u.
Vec2 state_derivative(const Mat2& h, const Mat2& dh, cplx e, const Vec2& u, Gauge gauge);

inline constexpr double kGaugeSingularTol = 1e-12;
inline constexpr double kDefectiveTol = 1e-10;

}  // namespace nhwind
