#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nhwind/bloch.hpp"

namespace nhwind {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Boundary { Open, Periodic };

std::string_view to_string(Boundary bc);
Boundary parse_boundary(std::string_view s);

// Fixed diagnostic constants, echoed into every output that uses them.
inline constexpr double kEdgeModeEnergy = 1e-4;
inline constexpr double kEdgeModeIpr = 0.1;
inline constexpr int kMaxEdgeModes = 2;
inline constexpr double kPairingTol = 1e-8;
inline constexpr double kResidualTol = 1e-9;

struct ChainSpectrum {
  int n_cells = 0;
  Boundary bc = Boundary::Open;
  double matrix_norm = 0.0;
  /// Sorted ascending by (Re, Im).
  std::vector<cplx> eigenvalues;
  /// Column i is the unit-norm right eigenvector for eigenvalues[i].
  CMatrix right_vectors;
  /// Column i is y_i with y_i^T H = lambda_i y_i^T and y_i^T v_j = delta_ij.
  /// Empty unless left vectors were requested.
  CMatrix left_vectors;
  std::vector<double> iprs;
  std::vector<double> left_iprs;
  double max_abs_imag = 0.0;
  double gap = 0.0;
  int edge_modes_excluded = 0;
  /// Negative when not computed.
  double defectiveness = -1.0;
  /// Diagonal scaling factors applied by the balancing step.
  double balance_scale_min = 1.0;
  double balance_scale_max = 1.0;

  std::size_t dim() const { return eigenvalues.size(); }
};

/// Real-space chain: hop_zero on the diagonal blocks, hop_plus on the
/// block superdiagonal, hop_minus on the block subdiagonal. Periodic adds
/// hop_plus at block (N, 1) and hop_minus at block (1, N).
CMatrix build_chain(const BlochModel& model, int n_cells, Boundary bc);

/// Full dense eigendecomposition (balanced Hessenberg QR). Fills
/// eigenvalues, right_vectors, iprs, max_abs_imag and the balancing
/// metadata; throws SolverFailure on non-convergence or when a residual
/// exceeds kResidualTol * ||H||.
ChainSpectrum eig_dense(const CMatrix& h);

/// Left eigenvectors y (y^T H = lambda y^T, i.e. right eigenvectors of H^T),
/// taken from the Schur form of H itself, paired to spectrum.eigenvalues by nearest eigenvalue and biorthonormalized against
/// spectrum.right_vectors. Throws MatchFailure when a pairing distance
/// exceeds kPairingTol * max(1, ||H||).
CMatrix left_vectors(const CMatrix& h, const ChainSpectrum& spectrum);

double ipr(const CVector& psi);

enum class Localization { Extended, Intermediate, Localized };
std::string_view to_string(Localization c);
/// Extended below 3/dim, Localized above kEdgeModeIpr.
Localization classify(double ipr, std::size_t dim);

struct LocalizationProfile {
  /// weights(j, i) = |psi_i(j)|^2 / sum_j |psi_i(j)|^2.
  Eigen::MatrixXd weights;
  std::vector<double> iprs;
  std::vector<Localization> classes;
};

LocalizationProfile localization_profile(const CMatrix& vectors);
LocalizationProfile localization_profile(const ChainSpectrum& spectrum);

/// min / max singular value of the unit-column right-eigenvector matrix.
double defectiveness(const ChainSpectrum& spectrum);

struct GapInfo {
  double gap = 0.0;
  int edge_modes_excluded = 0;
};

/// Drops up to kMaxEdgeModes states with |lambda| < kEdgeModeEnergy and
/// IPR > kEdgeModeIpr, then returns the distance between the smallest
/// non-negative and the largest negative real part of what remains (zero if
/// either side is empty).
GapInfo spectral_gap(const std::vector<cplx>& eigenvalues, const std::vector<double>& iprs);

double median(std::vector<double> values);

struct SpectrumOptions {
  bool left = false;
  bool defectiveness = false;
};

/// build_chain + eig_dense + gap, and optionally left vectors and
/// defectiveness.
ChainSpectrum chain_spectrum(const BlochModel& model, int n_cells, Boundary bc,
                             SpectrumOptions options = {});

struct ScanSummary {
  int n_cells = 0;
  Boundary bc = Boundary::Open;
  std::vector<cplx> eigenvalues;
  double max_abs_imag = 0.0;
  double gap = 0.0;
  int edge_modes_excluded = 0;
  double median_ipr = 0.0;
};

/// One independent task per N, run on `threads` workers (0: one per
/// hardware thread). Output order follows n_list regardless of scheduling.
std::vector<ScanSummary> spectrum_scan(const BlochModel& model, const std::vector<int>& n_list,
                                       Boundary bc, unsigned threads = 0);

}  // namespace nhwind
