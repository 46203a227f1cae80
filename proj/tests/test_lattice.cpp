#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nhwind/errors.hpp"
#include "nhwind/lattice.hpp"
#include "oracles.hpp"

using namespace nhwind;

namespace {

constexpr double kPi = std::numbers::pi;

BlochModel lee_default() { return BlochModel::lee(0.52, 0.5, 1.0); }

// Bloch-theorem reference: both eigenvalues of hk(k) at k = 2 pi m / N, from
// a general eigensolver.
std::vector<cplx> bloch_spectrum(const BlochModel& model, int n) {
  std::vector<cplx> out;
  for (int m = 0; m < n; ++m) {
    const std::vector<cplx> e = oracle::eigenvalues(hk(model, 2.0 * kPi * m / n));
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

}  // namespace

TEST_CASE("build_chain: structure") {
  const BlochModel lee = lee_default();
  CHECK((build_chain(lee, 1, Boundary::Open) - lee.hop_zero).norm() == 0.0);

  const BlochModel demo = BlochModel::demo();
  const CMatrix h = build_chain(demo, 2, Boundary::Open);
  REQUIRE(h.rows() == 4);
  CHECK(h.block(0, 0, 2, 2).norm() == 0.0);
  CHECK(h.block(2, 2, 2, 2).norm() == 0.0);
  CHECK((h.block(0, 2, 2, 2) - demo.hop_plus).norm() == 0.0);
  CHECK((h.block(2, 0, 2, 2) - demo.hop_minus).norm() == 0.0);

  const CMatrix p = build_chain(lee, 4, Boundary::Periodic);
  CHECK((p.block(6, 0, 2, 2) - lee.hop_plus).norm() == 0.0);
  CHECK((p.block(0, 6, 2, 2) - lee.hop_minus).norm() == 0.0);
  CHECK(build_chain(lee, 4, Boundary::Open).block(6, 0, 2, 2).norm() == 0.0);

  CHECK_THROWS_AS(build_chain(lee, 0, Boundary::Open), PreconditionError);
}

TEST_CASE("eig_dense: N = 3 periodic Lee chain matches Bloch energies") {
  const ChainSpectrum s = chain_spectrum(lee_default(), 3, Boundary::Periodic);
  CHECK(oracle::multiset_distance(s.eigenvalues, bloch_spectrum(lee_default(), 3)) < 1e-9);
}

TEST_CASE("property: periodic spectra equal the Bloch multiset for N <= 64") {
  const BlochModel models[] = {lee_default(), BlochModel::demo()};
  for (const BlochModel& model : models) {
    for (int n : {1, 2, 5, 8, 17, 32, 64}) {
      const ChainSpectrum s = chain_spectrum(model, n, Boundary::Periodic);
      CHECK(oracle::multiset_distance(s.eigenvalues, bloch_spectrum(model, n)) <= 1e-9);
    }
  }
}

TEST_CASE("eig_dense: open chain agrees with a general eigensolver") {
  for (int n : {2, 10, 30}) {
    const CMatrix h = build_chain(lee_default(), n, Boundary::Open);
    const ChainSpectrum s = eig_dense(h);
    CHECK(oracle::multiset_distance(s.eigenvalues, oracle::eigenvalues(h)) < 1e-9);
  }
}

TEST_CASE("eig_dense: ordering, residuals and unit vectors") {
  for (Boundary bc : {Boundary::Open, Boundary::Periodic}) {
    const CMatrix h = build_chain(lee_default(), 30, bc);
    const ChainSpectrum s = eig_dense(h);
    REQUIRE(s.dim() == 60u);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const CVector v = s.right_vectors.col(static_cast<Eigen::Index>(i));
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
      CHECK((h * v - s.eigenvalues[i] * v).norm() <= 1e-9 * h.norm());
      if (i > 0) {
        const cplx a = s.eigenvalues[i - 1];
        const cplx b = s.eigenvalues[i];
        CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
      }
    }
  }
}

TEST_CASE("left_vectors: biorthonormal to 1e-8 at N = 30") {
  for (Boundary bc : {Boundary::Open, Boundary::Periodic}) {
    const CMatrix h = build_chain(lee_default(), 30, bc);
    const ChainSpectrum s = chain_spectrum(lee_default(), 30, bc, {.left = true});
    CHECK(oracle::biorthonormality_defect(s.left_vectors, s.right_vectors) <= 1e-8);
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const CVector y = s.left_vectors.col(static_cast<Eigen::Index>(i));
      CHECK((h.transpose() * y - s.eigenvalues[i] * y).norm() <= 1e-9 * h.norm() * y.norm());
    }
  }
}

TEST_CASE("left_vectors: periodic chains are well conditioned, absolute check holds") {
  const ChainSpectrum s = chain_spectrum(lee_default(), 30, Boundary::Periodic, {.left = true});
  const CMatrix gram = s.left_vectors.transpose() * s.right_vectors;
  CHECK((gram - CMatrix::Identity(60, 60)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("left_vectors: MatchFailure on a defective matrix") {
  CMatrix j = CMatrix::Zero(2, 2);
  j(0, 1) = 1.0;
  j(0, 0) = 1e-3;
  // Eigenvalues 1e-3 and 0 are distinct, so this is fine...
  CHECK_NOTHROW(left_vectors(j, eig_dense(j)));
  // ...but pairing against a foreign spectrum is not.
  ChainSpectrum wrong = eig_dense(j);
  wrong.eigenvalues[0] += 1.0;
  CHECK_THROWS_AS(left_vectors(j, wrong), MatchFailure);
}

TEST_CASE("property: open spectra are invariant under diagonal similarity") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(1.0, 10.0);
  for (int n : {5, 12, 30}) {
    const CMatrix h = build_chain(lee_default(), n, Boundary::Open);
    const std::vector<cplx> base = eig_dense(h).eigenvalues;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd d(2 * n);
      for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = scale(rng);
      d(0) = 1.0;
      d(1) = 10.0;  // condition number exactly 10
      const CMatrix hd = d.cast<cplx>().asDiagonal() * h * d.cwiseInverse().cast<cplx>().asDiagonal();
      CHECK(oracle::multiset_distance(eig_dense(hd).eigenvalues, base) <= 1e-9);
    }
  }
}

TEST_CASE("ipr: bounds and trivial vectors") {
  const int dim = 20;
  const CVector uniform = CVector::Constant(dim, 1.0 / std::sqrt(dim));
  CHECK(std::abs(ipr(uniform) - 1.0 / dim) < 1e-15);
  CHECK(classify(ipr(uniform), dim) == Localization::Extended);

  CVector e1 = CVector::Zero(dim);
  e1(0) = 1.0;
  CHECK(ipr(e1) == 1.0);
  CHECK(classify(ipr(e1), dim) == Localization::Localized);
  CHECK(ipr(3.0 * e1) == 1.0);

  CHECK(classify(0.05, 100) == Localization::Intermediate);
  CHECK(classify(0.1, 100) == Localization::Intermediate);
  CHECK(classify(0.03, 100) == Localization::Intermediate);
  CHECK(classify(0.0299, 100) == Localization::Extended);

  for (Boundary bc : {Boundary::Open, Boundary::Periodic}) {
    const ChainSpectrum s = chain_spectrum(lee_default(), 30, bc, {.left = true});
    for (std::size_t i = 0; i < s.dim(); ++i) {
      CHECK(s.iprs[i] >= 1.0 / 60 - 1e-15);
      CHECK(s.iprs[i] <= 1.0 + 1e-15);
      CHECK(s.left_iprs[i] >= 1.0 / 60 - 1e-15);
      CHECK(s.left_iprs[i] <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("localization_profile: weights are normalized") {
  const ChainSpectrum s = chain_spectrum(lee_default(), 10, Boundary::Open);
  const LocalizationProfile p = localization_profile(s);
  REQUIRE(p.weights.cols() == 20);
  for (Eigen::Index i = 0; i < p.weights.cols(); ++i) {
    CHECK(std::abs(p.weights.col(i).sum() - 1.0) < 1e-13);
    CHECK(std::abs(p.weights.col(i).squaredNorm() - p.iprs[static_cast<std::size_t>(i)]) < 1e-13);
  }
}

TEST_CASE("defectiveness") {
  const ChainSpectrum id = eig_dense(CMatrix::Identity(4, 4));
  CHECK(std::abs(defectiveness(id) - 1.0) < 1e-12);

  CMatrix j = CMatrix::Zero(2, 2);
  j(0, 1) = 1.0;
  CHECK(defectiveness(eig_dense(j)) < 1e-8);

  const ChainSpectrum lee = chain_spectrum(lee_default(), 30, Boundary::Open, {.defectiveness = true});
  CHECK(lee.defectiveness >= 0.0);
  CHECK(lee.defectiveness <= 1.0);
}

TEST_CASE("spectral_gap: edge-mode exclusion") {
  const std::vector<cplx> ev{-2.0, -1.0, 1e-6, -1e-6, 0.5, 3.0};
  GapInfo g = spectral_gap(ev, {0.01, 0.01, 0.5, 0.5, 0.01, 0.01});
  CHECK(g.edge_modes_excluded == 2);
  CHECK(std::abs(g.gap - 1.5) < 1e-15);

  // Extended near-zero states are bulk.
  g = spectral_gap(ev, {0.01, 0.01, 0.01, 0.01, 0.01, 0.01});
  CHECK(g.edge_modes_excluded == 0);
  CHECK(std::abs(g.gap - 2e-6) < 1e-15);

  CHECK(spectral_gap({1.0, 2.0}, {0.01, 0.01}).gap == 0.0);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}

TEST_CASE("skin effect: open states localize, periodic states do not") {
  const BlochModel lee = lee_default();
  const ChainSpectrum open = chain_spectrum(lee, 30, Boundary::Open, {.left = true});
  const ChainSpectrum periodic = chain_spectrum(lee, 30, Boundary::Periodic, {.left = true});
  CHECK(median(open.iprs) / median(periodic.iprs) > 5.0);
  CHECK(median(open.left_iprs) / median(periodic.left_iprs) > 5.0);

  const BlochModel herm = BlochModel::lee(0.52, 0.5, 0.0);
  const double ratio = median(chain_spectrum(herm, 30, Boundary::Open).iprs) /
                       median(chain_spectrum(herm, 30, Boundary::Periodic).iprs);
  CHECK(ratio < 2.0);
  CHECK(ratio > 0.5);
}

TEST_CASE("periodic median IPR equals the Bloch-wave oracle") {
  const BlochModel lee = lee_default();
  const int n = 30;
  std::vector<double> expected;
  for (int m = 0; m < n; ++m) {
    const EigenSystem2 es = eig2(hk(lee, 2.0 * kPi * m / n), Gauge::FirstComponentOne);
    expected.push_back(oracle::bloch_ipr(es.u_plus, n));
    expected.push_back(oracle::bloch_ipr(es.u_minus, n));
  }
  const ChainSpectrum s = chain_spectrum(lee, n, Boundary::Periodic);
  CHECK(std::abs(median(s.iprs) - median(expected)) < 1e-9);
}

TEST_CASE("finite-size spectra at N = 30: real and gapped") {
  const ChainSpectrum s = chain_spectrum(lee_default(), 30, Boundary::Open);
  CHECK(s.max_abs_imag < 1e-6);
  CHECK(s.gap > 0.0);
  CHECK(std::abs(s.gap - 0.71659) < 1e-4);
}

TEST_CASE("spectrum_scan mirrors chain_spectrum") {
  const std::vector<ScanSummary> rows = spectrum_scan(lee_default(), {8, 20}, Boundary::Open);
  REQUIRE(rows.size() == 2u);
  for (const ScanSummary& row : rows) {
    const ChainSpectrum s = chain_spectrum(lee_default(), row.n_cells, Boundary::Open);
    CHECK(row.eigenvalues == s.eigenvalues);
    CHECK(row.gap == s.gap);
    CHECK(row.median_ipr == median(s.iprs));
  }
  CHECK_THROWS_AS(spectrum_scan(lee_default(), {0}, Boundary::Open), PreconditionError);
}

TEST_CASE("spectrum_scan: results do not depend on the worker count") {
  const std::vector<int> ns{40, 3, 25, 10, 1};
  const std::vector<ScanSummary> serial = spectrum_scan(lee_default(), ns, Boundary::Open, 1);
  const std::vector<ScanSummary> parallel = spectrum_scan(lee_default(), ns, Boundary::Open, 4);
  REQUIRE(parallel.size() == ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(parallel[i].n_cells == ns[i]);
    CHECK(parallel[i].eigenvalues == serial[i].eigenvalues);
    CHECK(parallel[i].gap == serial[i].gap);
    CHECK(parallel[i].median_ipr == serial[i].median_ipr);
  }
  CHECK(spectrum_scan(lee_default(), {}, Boundary::Open, 4).empty());
}
