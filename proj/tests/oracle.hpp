#pragma once

// Dense reference implementations for tests. Everything here is built from
// Kronecker products and explicit index sums over the full 2^N space, without
// touching the library's window or sector machinery.

#include "ilat/hilbert.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using ilat::cplx;
using ilat::Mat;
using ilat::Vec;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Single-qubit matrices in the (|up>, |down>) basis.
inline Mat sz() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }
inline Mat splus() { Mat m(2, 2); m << 0, 1, 0, 0; return m; }   // |down> -> |up>
inline Mat sminus() { Mat m(2, 2); m << 0, 0, 1, 0; return m; }  // |up> -> |down>
inline Mat eye2() { return Mat::Identity(2, 2); }

// op acting on site (1-based) of an n-site chain.
inline Mat site_op(const Mat& op, int site, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 1; k <= n; ++k) out = kron(out, k == site ? op : eye2());
  return out;
}

// H_latt built term by term from Kronecker products.
inline Mat hamiltonian(int n, double ga, double ma, double charge = 0.0, int q_lo = 1, int q_hi = 0) {
  const int d = 1 << n;
  Mat h = Mat::Zero(d, d);
  const Mat id = Mat::Identity(d, d);
  for (int link = 1; link < n; ++link) {
    Mat l = Mat::Zero(d, d);
    for (int k = 1; k <= link; ++k) l += 0.5 * (site_op(sz(), k, n) + (k % 2 == 0 ? 1.0 : -1.0) * id);
    if (link >= q_lo && link <= q_hi) l -= charge * id;
    h += 0.5 * ga * ga * l * l;
  }
  for (int k = 1; k <= n; ++k) h += 0.5 * ma * (k % 2 == 0 ? 1.0 : -1.0) * site_op(sz(), k, n);
  for (int k = 1; k < n; ++k) {
    const Mat hop = site_op(splus(), k, n) * site_op(sminus(), k + 1, n);
    h += 0.5 * (hop + hop.adjoint());
  }
  return h;
}

inline Mat link_field(int n, int link) {
  const int d = 1 << n;
  Mat l = Mat::Zero(d, d);
  for (int k = 1; k <= link; ++k) l += 0.5 * (site_op(sz(), k, n) + (k % 2 == 0 ? 1.0 : -1.0) * Mat::Identity(d, d));
  return l;
}

inline Mat momentum(int n) {
  const int d = 1 << n;
  Mat p = Mat::Zero(d, d);
  for (int k = 1; k + 2 <= n; ++k) {
    const Mat t = site_op(sminus(), k, n) * site_op(sz(), k + 1, n) * site_op(splus(), k + 2, n);
    p += cplx{0, -1} * (t - t.adjoint());
  }
  return p;
}

// Amplitudes in the full 2^N Kronecker basis.
inline Vec full_vector(const ilat::StateVector& s) {
  Vec v = Vec::Zero(Eigen::Index{1} << s.sites());
  for (std::size_t i = 0; i < s.basis().dim(); ++i) v[s.basis().config(i)] = s.amplitudes()[static_cast<Eigen::Index>(i)];
  return v;
}

// Reduced density matrix of sites first..last by an explicit sum over pairs
// of full-basis indices that agree outside the window.
inline Mat rdm(const Vec& psi, int n, int first, int last) {
  const int w = last - first + 1;
  const int low = n - last;  // bits below the window
  const std::uint64_t wmask = ((std::uint64_t{1} << w) - 1) << low;
  Mat rho = Mat::Zero(Eigen::Index{1} << w, Eigen::Index{1} << w);
  const std::uint64_t d = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < d; ++a) {
    if (psi[static_cast<Eigen::Index>(a)] == cplx{0}) continue;
    for (std::uint64_t b = 0; b < d; ++b) {
      if ((a & ~wmask) != (b & ~wmask)) continue;
      rho((a & wmask) >> low, (b & wmask) >> low) += psi[static_cast<Eigen::Index>(a)] * std::conj(psi[static_cast<Eigen::Index>(b)]);
    }
  }
  return rho;
}

inline double entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  double s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()[i];
    if (l > 1e-300) s -= l * std::log2(l);
  }
  return s;
}

inline double info(const Vec& psi, int n, int first, int last) {
  if (last < first) return 0.0;
  return (last - first + 1) - entropy_bits(rdm(psi, n, first, last));
}

// i(n, l) straight from the definition, label given as a site window.
inline double local_info(const Vec& psi, int n, int first, int last) {
  return info(psi, n, first, last) - info(psi, n, first, last - 1) - info(psi, n, first + 1, last) +
         info(psi, n, first + 1, last - 1);
}

inline Mat expm_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::exp(cplx{0, -es.eigenvalues()[i] * t});
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::VectorXd eigenvalues(const Mat& h) {
  return Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

// Restriction of a full-space operator to a basis.
inline Mat restrict(const Mat& op, const ilat::SectorBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  Mat out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = op(basis.config(static_cast<std::size_t>(i)), basis.config(static_cast<std::size_t>(j)));
  return out;
}

inline ilat::StateVector haar_state(const ilat::BasisPtr& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(static_cast<Eigen::Index>(basis->dim()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx{g(rng), g(rng)};
  return ilat::StateVector(basis, v);
}

}  // namespace oracle
