#include "nhwind/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nhwind/errors.hpp"

namespace nhwind {

std::string_view to_string(Boundary bc) { return bc == Boundary::Open ? "open" : "periodic"; }

Boundary parse_boundary(std::string_view s) {
  if (s == "open") return Boundary::Open;
  if (s == "periodic") return Boundary::Periodic;
  throw PreconditionError("unknown boundary condition '" + std::string(s) + "'");
}

std::string_view to_string(Localization c) {
  switch (c) {
    case Localization::Extended: return "extended";
    case Localization::Intermediate: return "intermediate";
    case Localization::Localized: return "localized";
  }
  return "?";
}

CMatrix build_chain(const BlochModel& model, int n_cells, Boundary bc) {
  if (n_cells < 1) throw PreconditionError("n_cells must be at least 1");
  const Eigen::Index n = n_cells;
  CMatrix h = CMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index c = 0; c < n; ++c) {
    h.block<2, 2>(2 * c, 2 * c) = model.hop_zero;
    if (c + 1 < n) {
      h.block<2, 2>(2 * c, 2 * c + 2) = model.hop_plus;
      h.block<2, 2>(2 * c + 2, 2 * c) = model.hop_minus;
    }
  }
  if (bc == Boundary::Periodic) {
    h.block<2, 2>(2 * n - 2, 0) += model.hop_plus;
    h.block<2, 2>(0, 2 * n - 2) += model.hop_minus;
  }
  return h;
}

namespace {

struct RawEigen {
  std::vector<cplx> values;
  CMatrix vectors;
  CMatrix left;  // columns u with u^H A = lambda u^H; empty unless requested
  double scale_min = 1.0;
  double scale_max = 1.0;
};

// zgeevx with permutation + scaling balancing.
RawEigen geevx(CMatrix a, bool want_left) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  RawEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  lapack_int ilo = 0;
  lapack_int ihi = 0;
  std::vector<double> scale(n), rconde(n), rcondv(n);
  double abnrm = 0.0;
  cplx vl_dummy;
  if (want_left) out.left.resize(n, n);
  cplx* vl = want_left ? out.left.data() : &vl_dummy;
  const lapack_int info = LAPACKE_zgeevx(LAPACK_COL_MAJOR, 'B', want_left ? 'V' : 'N', 'V', 'N', n,
                                         a.data(), n, out.values.data(), vl, want_left ? n : 1,
                                         out.vectors.data(), n,
                                         &ilo, &ihi, scale.data(), &abnrm, rconde.data(),
                                         rcondv.data());
  if (info != 0) {
    std::ostringstream msg;
    msg << "zgeevx failed (info = " << info << ") for n = " << n << ", ||A||_1 = " << abnrm;
    throw SolverFailure(msg.str());
  }
  if (ihi >= ilo) {
    const auto first = scale.begin() + (ilo - 1);
    const auto last = scale.begin() + ihi;
    out.scale_min = *std::min_element(first, last);
    out.scale_max = *std::max_element(first, last);
  }
  return out;
}

// Unit norm, largest-magnitude component real and positive.
void canonical_phase(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    v.col(j).cwiseAbs2().maxCoeff(&imax);
    const cplx pivot = v(imax, j);
    v.col(j) *= std::abs(pivot) / pivot / v.col(j).norm();
  }
}

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

double ipr(const CVector& psi) {
  const Eigen::VectorXd p = psi.cwiseAbs2();
  const double total = p.sum();
  return p.squaredNorm() / (total * total);
}

ChainSpectrum eig_dense(const CMatrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw PreconditionError("eig_dense needs a non-empty square matrix");
  }
  if (!h.allFinite()) throw PreconditionError("eig_dense: matrix has non-finite entries");

  RawEigen raw = geevx(h, false);
  const Eigen::Index n = h.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return lex_less(raw.values[a], raw.values[b]);
  });

  ChainSpectrum s;
  s.n_cells = static_cast<int>(n / 2);
  s.matrix_norm = h.norm();
  s.eigenvalues.resize(n);
  s.right_vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.eigenvalues[i] = raw.values[order[i]];
    s.right_vectors.col(i) = raw.vectors.col(order[i]);
  }
  canonical_phase(s.right_vectors);
  s.balance_scale_min = raw.scale_min;
  s.balance_scale_max = raw.scale_max;

  const CVector lambda = Eigen::Map<const CVector>(s.eigenvalues.data(), n);
  const CMatrix residual = h * s.right_vectors - s.right_vectors * lambda.asDiagonal();
  const double worst = residual.colwise().norm().maxCoeff();
  if (!(worst <= kResidualTol * s.matrix_norm)) {
    std::ostringstream msg;
    msg << "eigenpair residual " << worst << " exceeds " << kResidualTol << " * ||H|| ("
        << s.matrix_norm << ")";
    throw SolverFailure(msg.str());
  }

  s.iprs.resize(n);
  s.max_abs_imag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    s.iprs[i] = ipr(s.right_vectors.col(i));
    s.max_abs_imag = std::max(s.max_abs_imag, std::abs(s.eigenvalues[i].imag()));
  }
  return s;
}

CMatrix left_vectors(const CMatrix& h, const ChainSpectrum& spectrum) {
  const Eigen::Index n = h.rows();
  if (static_cast<Eigen::Index>(spectrum.dim()) != n || spectrum.right_vectors.cols() != n) {
    throw PreconditionError("left_vectors: spectrum does not belong to this matrix");
  }
  // A separate QR run on H^T lands on a different, far less accurate
  // pseudospectral point for skin-effect chains (eigenvalues off by 1e-2 at
  // N = 30), so the left vectors come from the same Schur form as the right
  // ones: conj(u) with u^H H = lambda u^H is a right eigenvector of H^T.
  RawEigen raw = geevx(h, true);
  raw.vectors = raw.left.conjugate();
  const double tol = kPairingTol * std::max(1.0, h.norm());

  // Greedy nearest-eigenvalue pairing.
  std::vector<bool> used(n, false);
  CMatrix y(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = -1;
    double best_dist = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(raw.values[j] - spectrum.eigenvalues[i]);
      if (best < 0 || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best_dist > tol) {
      std::ostringstream msg;
      msg << "no transpose eigenvalue within " << tol << " of lambda_" << i << " = "
          << spectrum.eigenvalues[i] << " (closest at distance " << best_dist << ")";
      throw MatchFailure(msg.str());
    }
    used[best] = true;
    y.col(i) = raw.vectors.col(best);
  }

  // Biorthonormalize cluster by cluster: eigenvalues closer than tol form one
  // cluster and get Y_c <- Y_c (Y_c^T V_c)^{-T}.
  std::vector<Eigen::Index> cluster_of(n);
  std::iota(cluster_of.begin(), cluster_of.end(), 0);
  const auto root = [&](Eigen::Index i) {
    while (cluster_of[i] != i) i = cluster_of[i] = cluster_of[cluster_of[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(spectrum.eigenvalues[i] - spectrum.eigenvalues[j]) <= tol) {
        cluster_of[root(j)] = root(i);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> clusters(n);
  for (Eigen::Index i = 0; i < n; ++i) clusters[root(i)].push_back(i);

  for (const auto& members : clusters) {
    if (members.empty()) continue;
    const Eigen::Index m = static_cast<Eigen::Index>(members.size());
    CMatrix yc(n, m), vc(n, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      yc.col(c) = y.col(members[c]);
      vc.col(c) = spectrum.right_vectors.col(members[c]);
    }
    const CMatrix overlap = yc.transpose() * vc;
    Eigen::FullPivLU<CMatrix> lu(overlap);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) {
      throw MatchFailure("left/right overlap is singular for a near-degenerate cluster");
    }
    const CMatrix fixed = yc * lu.inverse().transpose();
    for (Eigen::Index c = 0; c < m; ++c) y.col(members[c]) = fixed.col(c);
  }
  return y;
}

Localization classify(double value, std::size_t dim) {
  if (value < 3.0 / static_cast<double>(dim)) return Localization::Extended;
  if (value > kEdgeModeIpr) return Localization::Localized;
  return Localization::Intermediate;
}

LocalizationProfile localization_profile(const CMatrix& vectors) {
  LocalizationProfile out;
  const Eigen::Index n = vectors.rows();
  out.weights.resize(n, vectors.cols());
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    const Eigen::VectorXd p = vectors.col(i).cwiseAbs2();
    out.weights.col(i) = p / p.sum();
    const double value = ipr(vectors.col(i));
    out.iprs.push_back(value);
    out.classes.push_back(classify(value, static_cast<std::size_t>(n)));
  }
  return out;
}

LocalizationProfile localization_profile(const ChainSpectrum& spectrum) {
  return localization_profile(spectrum.right_vectors);
}

double defectiveness(const ChainSpectrum& spectrum) {
  CMatrix a = spectrum.right_vectors;
  for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j).normalize();
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  std::vector<double> sv(std::min(m, n));
  cplx dummy;
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, sv.data(), &dummy, 1, &dummy, 1);
  if (info != 0) {
    throw SolverFailure("zgesdd failed (info = " + std::to_string(info) + ")");
  }
  return sv.back() / sv.front();
}

GapInfo spectral_gap(const std::vector<cplx>& eigenvalues, const std::vector<double>& iprs) {
  std::vector<std::size_t> by_modulus(eigenvalues.size());
  std::iota(by_modulus.begin(), by_modulus.end(), 0);
  std::stable_sort(by_modulus.begin(), by_modulus.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(eigenvalues[a]) < std::abs(eigenvalues[b]);
  });

  GapInfo info;
  std::vector<bool> excluded(eigenvalues.size(), false);
  for (std::size_t c = 0; c < by_modulus.size() && c < static_cast<std::size_t>(kMaxEdgeModes);
       ++c) {
    const std::size_t i = by_modulus[c];
    if (std::abs(eigenvalues[i]) < kEdgeModeEnergy && iprs[i] > kEdgeModeIpr) {
      excluded[i] = true;
      ++info.edge_modes_excluded;
    }
  }

  bool have_pos = false;
  bool have_neg = false;
  double lowest_pos = 0.0;
  double highest_neg = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (excluded[i]) continue;
    const double re = eigenvalues[i].real();
    if (re >= 0.0) {
      lowest_pos = have_pos ? std::min(lowest_pos, re) : re;
      have_pos = true;
    } else {
      highest_neg = have_neg ? std::max(highest_neg, re) : re;
      have_neg = true;
    }
  }
  info.gap = (have_pos && have_neg) ? lowest_pos - highest_neg : 0.0;
  return info;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

ChainSpectrum chain_spectrum(const BlochModel& model, int n_cells, Boundary bc,
                             SpectrumOptions options) {
  const CMatrix h = build_chain(model, n_cells, bc);
  ChainSpectrum s = eig_dense(h);
  s.n_cells = n_cells;
  s.bc = bc;
  const GapInfo g = spectral_gap(s.eigenvalues, s.iprs);
  s.gap = g.gap;
  s.edge_modes_excluded = g.edge_modes_excluded;
  if (options.left) {
    s.left_vectors = left_vectors(h, s);
    s.left_iprs.reserve(s.dim());
    for (Eigen::Index i = 0; i < s.left_vectors.cols(); ++i) {
      s.left_iprs.push_back(ipr(s.left_vectors.col(i)));
    }
  }
  if (options.defectiveness) s.defectiveness = defectiveness(s);
  return s;
}

std::vector<ScanSummary> spectrum_scan(const BlochModel& model, const std::vector<int>& n_list,
                                       Boundary bc, unsigned threads) {
  for (const int n : n_list) {
    if (n < 1) throw PreconditionError("spectrum_scan: every N must be at least 1");
  }
  // One task per N; each writes only its own slot, so the result does not
  // depend on scheduling.
  const auto summarize = [&](int n) {
    const ChainSpectrum s = chain_spectrum(model, n, bc);
    ScanSummary row;
    row.n_cells = n;
    row.bc = bc;
    row.eigenvalues = s.eigenvalues;
    row.max_abs_imag = s.max_abs_imag;
    row.gap = s.gap;
    row.edge_modes_excluded = s.edge_modes_excluded;
    row.median_ipr = median(s.iprs);
    return row;
  };
  const std::size_t workers =
      std::clamp<std::size_t>(threads ? threads : std::thread::hardware_concurrency(), 1,
                              std::max<std::size_t>(n_list.size(), 1));
  std::vector<ScanSummary> rows(n_list.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_list.size(); ++i) rows[i] = summarize(n_list[i]);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n_list.size(); i = next++) rows[i] = summarize(n_list[i]);
    }));
  }
  for (auto& f : pool) f.get();
  return rows;
}

}  // namespace nhwind
