#include "ilat/info_lattice.hpp"

#include "ilat/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace ilat {

InfoLattice::InfoLattice(int n_sites, int max_scale) : n_sites_(n_sites), max_scale_(max_scale) {
  if (n_sites < 1) throw SizeError("information lattice needs at least one site");
  if (max_scale < 0 || max_scale > n_sites - 1) {
    throw LabelError("max scale " + std::to_string(max_scale) + " outside 0.." +
                     std::to_string(n_sites - 1));
  }
  values_.resize(static_cast<std::size_t>(max_scale) + 1);
  for (int ell = 0; ell <= max_scale; ++ell) {
    values_[static_cast<std::size_t>(ell)].assign(static_cast<std::size_t>(n_sites - ell), 0.0);
  }
}

std::size_t InfoLattice::slot(const Label& label) const {
  if (label.ell > max_scale_ || !label_in_range(label, n_sites_)) {
    throw LabelError("label (n=" + std::to_string(label.n()) + ", l=" + std::to_string(label.ell) +
                     ") is not on this lattice");
  }
  return static_cast<std::size_t>(label.first_site() - 1);
}

double InfoLattice::at(const Label& label) const {
  return values_[static_cast<std::size_t>(label.ell)][slot(label)];
}

void InfoLattice::set(const Label& label, double value) {
  values_[static_cast<std::size_t>(label.ell)][slot(label)] = value;
}

std::vector<Label> InfoLattice::labels_at(int ell) const {
  std::vector<Label> out;
  if (ell < 0 || ell > max_scale_) return out;
  for (int first = 1; first + ell <= n_sites_; ++first) {
    out.push_back(Label::from_window(first, first + ell));
  }
  return out;
}

void InfoLattice::for_each(const std::function<void(const Label&, double)>& visit) const {
  for (int ell = 0; ell <= max_scale_; ++ell) {
    const auto& row = values_[static_cast<std::size_t>(ell)];
    for (std::size_t s = 0; s < row.size(); ++s) {
      const int first = static_cast<int>(s) + 1;
      visit(Label::from_window(first, first + ell), row[s]);
    }
  }
}

double InfoLattice::total() const {
  double sum = 0.0;
  for (const auto& row : values_) {
    for (double v : row) sum += v;
  }
  return sum;
}

double InfoLattice::min_value() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : values_) {
    for (double v : row) lo = std::min(lo, v);
  }
  return lo;
}

double von_neumann_entropy_bits(const Eigen::VectorXd& eigenvalues) {
  double entropy = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < -kNegativeEigenvalueTolerance) {
      throw InvalidDensityError("density matrix has eigenvalue " + std::to_string(lambda));
    }
    if (lambda <= 0.0) continue;
    entropy -= lambda * std::log2(lambda);
  }
  return entropy;
}

double information_from_spectrum(const Eigen::VectorXd& eigenvalues, int qubits) {
  return static_cast<double>(qubits) - von_neumann_entropy_bits(eigenvalues);
}

double von_neumann_information(const DensityMatrix& rho) {
  const auto dim = rho.matrix.rows();
  if (dim != rho.matrix.cols() || dim == 0 || (dim & (dim - 1)) != 0) {
    throw InvalidDensityError("density matrix must be square with power-of-two dimension");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(rho.matrix, Eigen::EigenvaluesOnly);
  const int qubits = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));
  return information_from_spectrum(solver.eigenvalues(), qubits);
}

double window_information(const StateVector& state, int first_site, int last_site) {
  if (last_site < first_site) return 0.0;
  return information_from_spectrum(window_spectrum(state, first_site, last_site),
                                   last_site - first_site + 1);
}

double local_information(const StateVector& state, const Label& label) {
  if (!label_in_range(label, state.sites())) {
    throw LabelError("label (n=" + std::to_string(label.n()) + ", l=" + std::to_string(label.ell) +
                     ") does not fit in " + std::to_string(state.sites()) + " sites");
  }
  const int lo = label.first_site();
  const int hi = label.last_site();
  double value = window_information(state, lo, hi);
  if (label.ell >= 1) {
    value -= window_information(state, lo, hi - 1);
    value -= window_information(state, lo + 1, hi);
  }
  if (label.ell >= 2) value += window_information(state, lo + 1, hi - 1);
  return value;
}

InfoLattice full_info_lattice(const StateVector& state, int max_scale, int threads) {
  const int n = state.sites();
  InfoLattice lattice(n, max_scale);

  // window_info[l][first - 1] = I(rho) of sites first..first+l
  std::vector<std::vector<double>> window_info(static_cast<std::size_t>(max_scale) + 1);
  std::vector<std::pair<int, int>> jobs;
  for (int ell = 0; ell <= max_scale; ++ell) {
    window_info[static_cast<std::size_t>(ell)].resize(static_cast<std::size_t>(n - ell));
    for (int first = 1; first + ell <= n; ++first) jobs.emplace_back(ell, first);
  }
  auto run = [&](std::size_t job) {
    const auto [ell, first] = jobs[job];
    window_info[static_cast<std::size_t>(ell)][static_cast<std::size_t>(first - 1)] =
        window_information(state, first, first + ell);
  };

  const int workers = std::clamp(threads, 1, static_cast<int>(jobs.size()));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t j = next++; j < jobs.size() && !failed; j = next++) {
            try {
              run(j);
            } catch (...) {
              if (!failed.exchange(true)) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  auto info = [&](int ell, int first) {
    if (ell < 0) return 0.0;
    return window_info[static_cast<std::size_t>(ell)][static_cast<std::size_t>(first - 1)];
  };
  for (int ell = 0; ell <= max_scale; ++ell) {
    for (int first = 1; first + ell <= n; ++first) {
      double value = info(ell, first);
      if (ell >= 1) value -= info(ell - 1, first) + info(ell - 1, first + 1);
      if (ell >= 2) value += info(ell - 2, first + 1);
      lattice.set(Label::from_window(first, first + ell), value);
    }
  }
  return lattice;
}

ScaleProfile info_per_scale(const InfoLattice& lattice) {
  ScaleProfile profile(static_cast<std::size_t>(lattice.max_scale()) + 1, 0.0);
  lattice.for_each([&](const Label& label, double v) { profile[static_cast<std::size_t>(label.ell)] += v; });
  return profile;
}

ScaleProfile windowed_info_per_scale(const InfoLattice& lattice, double n_lo, double n_hi) {
  if (n_lo > n_hi || n_hi < 1.0 || n_lo > lattice.sites()) {
    throw WindowError("position window [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
                      "] is empty or outside the lattice");
  }
  ScaleProfile profile(static_cast<std::size_t>(lattice.max_scale()) + 1, 0.0);
  bool any = false;
  lattice.for_each([&](const Label& label, double v) {
    if (label.n() >= n_lo && label.n() <= n_hi) {
      profile[static_cast<std::size_t>(label.ell)] += v;
      any = true;
    }
  });
  if (!any) throw WindowError("position window contains no lattice labels");
  return profile;
}

InfoLattice info_difference(const InfoLattice& a, const InfoLattice& b) {
  if (a.sites() != b.sites() || a.max_scale() != b.max_scale()) {
    throw ShapeMismatchError("information lattices differ in size or max scale");
  }
  InfoLattice out(a.sites(), a.max_scale());
  a.for_each([&](const Label& label, double v) { out.set(label, v - b.at(label)); });
  return out;
}

std::optional<int> peak_scale(const ScaleProfile& profile, int exclude_below) {
  std::optional<int> best;
  double best_value = 0.0;
  for (std::size_t ell = static_cast<std::size_t>(std::max(exclude_below, 0)); ell < profile.size(); ++ell) {
    if (profile[ell] > best_value) {
      best_value = profile[ell];
      best = static_cast<int>(ell);
    }
  }
  return best;
}

std::vector<double> bipartite_entropy_profile(const StateVector& state) {
  const int n = state.sites();
  std::vector<double> entropy;
  entropy.reserve(static_cast<std::size_t>(n - 1));
  for (int cut = 1; cut < n; ++cut) {
    const Mat m = window_coefficients(state, 1, cut);
    Eigen::BDCSVD<Mat> svd(m);
    const Eigen::VectorXd weights = svd.singularValues().array().square();
    entropy.push_back(von_neumann_entropy_bits(weights));
  }
  return entropy;
}

}  // namespace ilat
