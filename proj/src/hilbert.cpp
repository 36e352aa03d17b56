#include "ilat/hilbert.hpp"

#include "ilat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace ilat {

namespace {

void check_sites(int n_sites) {
  if (n_sites < 2 || n_sites > kMaxSites) {
    throw SizeError("site count " + std::to_string(n_sites) + " outside 2.." +
                    std::to_string(kMaxSites));
  }
}

void check_window(int first_site, int last_site, int n_sites) {
  if (first_site < 1 || last_site > n_sites || first_site > last_site) {
    throw WindowError("window [" + std::to_string(first_site) + ", " + std::to_string(last_site) +
                      "] outside 1.." + std::to_string(n_sites));
  }
}

}  // namespace

SectorBasis::SectorBasis(int n_sites, std::optional<int> sector)
    : n_sites_(n_sites), sector_(sector) {
  check_sites(n_sites);
  const Config full = Config{1} << n_sites;
  if (!sector) {
    states_.resize(full);
    for (Config c = 0; c < full; ++c) states_[c] = c;
    return;
  }
  if (std::abs(*sector) > n_sites || (n_sites - *sector) % 2 != 0) {
    throw InvalidSectorError("magnetization " + std::to_string(*sector) +
                             " is not reachable with " + std::to_string(n_sites) + " sites");
  }
  const int downs = (n_sites - *sector) / 2;
  for (Config c = 0; c < full; ++c) {
    if (std::popcount(c) == downs) states_.push_back(c);
  }
}

std::optional<std::size_t> SectorBasis::index_of(Config c) const {
  if (!sector_) {
    if (c < states_.size()) return c;
    return std::nullopt;
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), c);
  if (it == states_.end() || *it != c) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

int SectorBasis::magnetization(Config c) const { return n_sites_ - 2 * std::popcount(c); }

BasisPtr build_sector_basis(int n_sites, std::optional<int> sector) {
  return std::make_shared<const SectorBasis>(n_sites, sector);
}

StateVector::StateVector(BasisPtr basis, Vec amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != basis_->dim()) {
    throw ShapeMismatchError("amplitude count " + std::to_string(amplitudes_.size()) +
                             " does not match basis dimension " + std::to_string(basis_->dim()));
  }
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NormalizationError("cannot normalize a state of norm " + std::to_string(norm));
  }
  amplitudes_ /= norm;
}

cplx inner(const StateVector& a, const StateVector& b) {
  if (!(a.basis() == b.basis())) throw ShapeMismatchError("inner product across different bases");
  return a.amplitudes().dot(b.amplitudes());
}

double overlap_probability(const StateVector& a, const StateVector& b) {
  return std::norm(inner(a, b));
}

StateVector basis_state(const BasisPtr& basis, Config c) {
  auto idx = basis->index_of(c);
  if (!idx) throw InvalidSectorError("configuration is not part of the basis sector");
  Vec amps = Vec::Zero(static_cast<Eigen::Index>(basis->dim()));
  amps[static_cast<Eigen::Index>(*idx)] = 1.0;
  return StateVector(basis, std::move(amps));
}

Config neel_config(int n_sites) {
  Config c = 0;
  for (int k = 2; k <= n_sites; k += 2) c |= Config{1} << (n_sites - k);
  return c;
}

StateVector neel_state(const BasisPtr& basis) {
  auto idx = basis->index_of(neel_config(basis->sites()));
  if (!idx) throw InvalidSectorError("staggered configuration is absent from the sector");
  return basis_state(basis, neel_config(basis->sites()));
}

StateVector reflect(const StateVector& state) {
  const auto& basis = state.basis();
  const int n = basis.sites();
  Vec out = Vec::Zero(state.amplitudes().size());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const Config c = basis.config(i);
    Config r = 0;
    for (int k = 1; k <= n; ++k) {
      if (c & basis.site_mask(k)) r |= basis.site_mask(n + 1 - k);
    }
    out[static_cast<Eigen::Index>(*basis.index_of(r))] = state.amplitudes()[static_cast<Eigen::Index>(i)];
  }
  return StateVector(state.basis_ptr(), std::move(out));
}

Ket embed_full(const Ket& ket) {
  if (ket.basis->is_full()) return ket;
  auto full = build_sector_basis(ket.basis->sites(), std::nullopt);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(full->dim()));
  for (std::size_t i = 0; i < ket.basis->dim(); ++i) {
    out[ket.basis->config(i)] = ket.amplitudes[static_cast<Eigen::Index>(i)];
  }
  return {full, std::move(out)};
}

std::optional<std::pair<Config, cplx>> apply_pauli_string(Config c, std::span<const PauliOp> ops,
                                                          int n_sites) {
  cplx coeff{1.0, 0.0};
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    if (it->site < 1 || it->site > n_sites) {
      throw WindowError("Pauli operator on site " + std::to_string(it->site) + " outside 1.." +
                        std::to_string(n_sites));
    }
    const Config mask = Config{1} << (n_sites - it->site);
    const bool down = (c & mask) != 0;
    switch (it->kind) {
      case Pauli::plus:
        if (!down) return std::nullopt;
        c ^= mask;
        break;
      case Pauli::minus:
        if (down) return std::nullopt;
        c ^= mask;
        break;
      case Pauli::z:
        if (down) coeff = -coeff;
        break;
      case Pauli::x:
        c ^= mask;
        break;
      case Pauli::y:
        // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
        coeff *= down ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
        c ^= mask;
        break;
    }
  }
  return std::make_pair(c, coeff);
}

Ket apply_pauli_string(const Ket& ket, std::span<const PauliOp> ops) {
  const auto& basis = *ket.basis;
  Vec out = Vec::Zero(ket.amplitudes.size());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const cplx amp = ket.amplitudes[static_cast<Eigen::Index>(i)];
    auto image = apply_pauli_string(basis.config(i), ops, basis.sites());
    if (!image) continue;
    auto j = basis.index_of(image->first);
    if (!j) {
      if (amp != 0.0) {
        throw SectorEscapeError("Pauli string maps the state out of magnetization sector " +
                                std::to_string(*basis.sector()));
      }
      continue;
    }
    out[static_cast<Eigen::Index>(*j)] += image->second * amp;
  }
  return {ket.basis, std::move(out)};
}

Label Label::at(double n, int ell) {
  const double doubled = 2.0 * n;
  const long rounded = std::lround(doubled);
  if (ell < 0 || std::abs(doubled - static_cast<double>(rounded)) > 1e-9 ||
      (rounded - ell) % 2 != 0) {
    throw LabelError("invalid information-lattice label (n=" + std::to_string(n) +
                     ", l=" + std::to_string(ell) + ")");
  }
  return {static_cast<int>(rounded), ell};
}

bool label_in_range(const Label& label, int n_sites) {
  return label.ell >= 0 && (label.twice_n - label.ell) % 2 == 0 && label.first_site() >= 1 &&
         label.last_site() <= n_sites;
}

Mat window_coefficients(const StateVector& state, int first_site, int last_site) {
  const auto& basis = state.basis();
  const int n = basis.sites();
  check_window(first_site, last_site, n);
  const int width = last_site - first_site + 1;
  const int right_bits = n - last_site;
  const Config window_mask = ((Config{1} << width) - 1);
  const Config right_mask = (Config{1} << right_bits) - 1;

  // Environment configuration = left bits followed by right bits.
  std::vector<std::int32_t> column(std::size_t{1} << (n - width), -1);
  std::vector<std::pair<Config, Config>> split(basis.dim());
  std::int32_t n_env = 0;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const Config c = basis.config(i);
    const Config w = (c >> right_bits) & window_mask;
    const Config env = ((c >> (right_bits + width)) << right_bits) | (c & right_mask);
    if (column[env] < 0) column[env] = n_env++;
    split[i] = {w, env};
  }
  Mat m = Mat::Zero(Eigen::Index{1} << width, n_env);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    m(split[i].first, column[split[i].second]) = state.amplitudes()[static_cast<Eigen::Index>(i)];
  }
  return m;
}

DensityMatrix partial_trace_contiguous(const StateVector& state, const Label& label) {
  if (!label_in_range(label, state.sites())) {
    throw WindowError("window (n=" + std::to_string(label.n()) + ", l=" + std::to_string(label.ell) +
                      ") does not fit in " + std::to_string(state.sites()) + " sites");
  }
  const Mat m = window_coefficients(state, label.first_site(), label.last_site());
  Mat rho = m * m.adjoint();
  return {label, std::move(rho)};
}

DensityMatrix trace_down(const DensityMatrix& rho, int first_site, int last_site) {
  const int lo = rho.window.first_site();
  const int hi = rho.window.last_site();
  if (first_site < lo || last_site > hi || first_site > last_site) {
    throw WindowError("sub-window is not contained in the density-matrix window");
  }
  const int width = hi - lo + 1;
  const int sub_width = last_site - first_site + 1;
  const int right = hi - last_site;
  const int left = first_site - lo;
  const Eigen::Index sub_dim = Eigen::Index{1} << sub_width;
  Mat out = Mat::Zero(sub_dim, sub_dim);
  const Config n_left = Config{1} << left;
  const Config n_right = Config{1} << right;
  for (Config l = 0; l < n_left; ++l) {
    for (Config r = 0; r < n_right; ++r) {
      for (Eigen::Index a = 0; a < sub_dim; ++a) {
        const Eigen::Index row = (l << (width - left)) | (a << right) | r;
        for (Eigen::Index b = 0; b < sub_dim; ++b) {
          const Eigen::Index col = (l << (width - left)) | (b << right) | r;
          out(a, b) += rho.matrix(row, col);
        }
      }
    }
  }
  return {Label::from_window(first_site, last_site), std::move(out)};
}

Eigen::VectorXd window_spectrum(const StateVector& state, int first_site, int last_site) {
  const Mat m = window_coefficients(state, first_site, last_site);
  const Mat gram = m.rows() <= m.cols() ? Mat(m * m.adjoint()) : Mat(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<Mat> solver(gram, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace ilat
