#include "ilat/schwinger.hpp"

#include "ilat/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ilat {

namespace {

// Guards floor(u t) against t landing a rounding error below a hop time.
constexpr double kHopSlack = 1e-9;

}  // namespace

void ModelParams::validate() const {
  if (sites < 2) throw SizeError("model needs at least 2 sites, got " + std::to_string(sites));
  if (!(ga > 0.0)) throw ConfigError("ga must be positive");
  if (!(ma >= 0.0)) throw ConfigError("ma must be non-negative");
}

void ChargeBackground::validate(int n_sites) const {
  if (!(charge >= 0.0)) throw ConfigError("external charge Q must be non-negative");
  if (!(speed >= 0.0)) throw ConfigError("light-cone speed u must be non-negative");
  if (center_left > center_right) throw ConfigError("center_left must not exceed center_right");
  if (center_left < 1 || center_right > n_sites - 1) {
    throw WindowError("initial charge window [" + std::to_string(center_left) + ", " +
                      std::to_string(center_right) + "] outside links 1.." +
                      std::to_string(n_sites - 1));
  }
  if (t_remove && !(*t_remove >= 0.0)) throw ConfigError("t_remove must be non-negative");
}

int ChargeBackground::hops_at(double t) const {
  return static_cast<int>(std::floor(speed * t + kHopSlack));
}

std::optional<LinkWindow> ChargeBackground::window_at(double t, int n_sites) const {
  if (t_remove && t >= *t_remove - kHopSlack) return std::nullopt;
  const int hops = hops_at(t);
  LinkWindow w{center_left - hops, center_right + hops};
  if (halt_at_edges) {
    w.first = std::max(w.first, 1);
    w.last = std::min(w.last, n_sites - 1);
  }
  if (w.first < 1 || w.last > n_sites - 1) {
    throw WindowError("charge window [" + std::to_string(w.first) + ", " + std::to_string(w.last) +
                      "] at t=" + std::to_string(t) + " leaves links 1.." +
                      std::to_string(n_sites - 1));
  }
  return w;
}

std::vector<double> ChargeBackground::change_times(double t_end, int n_sites) const {
  std::vector<double> times;
  const double stop = t_remove ? std::min(t_end, *t_remove) : t_end;
  if (speed > 0.0) {
    auto previous = window_at(0.0, n_sites);
    for (int k = 1;; ++k) {
      const double t = k / speed;
      if (t >= stop - kHopSlack) break;
      auto w = window_at(t, n_sites);
      if (w == previous) break;  // halted at both edges
      times.push_back(t);
      previous = w;
    }
  }
  if (t_remove && *t_remove > kHopSlack && *t_remove < t_end - kHopSlack) times.push_back(*t_remove);
  return times;
}

double ChargeBackground::first_motion_time() const {
  double t = speed > 0.0 ? 1.0 / speed : std::numeric_limits<double>::infinity();
  if (t_remove) t = std::min(t, *t_remove);
  return t;
}

double link_field(const SectorBasis& basis, Config c, int link) {
  double field = 0.0;
  for (int k = 1; k <= link; ++k) field += basis.spin_z(c, k) + (k % 2 == 0 ? 1.0 : -1.0);
  return 0.5 * field;
}

SparseOperator build_hamiltonian(const BasisPtr& basis, const ModelParams& params,
                                 const std::optional<ChargeBackground>& background, double t) {
  params.validate();
  if (basis->sites() != params.sites) {
    throw ShapeMismatchError("basis has " + std::to_string(basis->sites()) + " sites, model has " +
                             std::to_string(params.sites));
  }
  if (!(t >= 0.0)) throw ConfigError("Hamiltonian time must be non-negative");
  const int n = params.sites;
  std::optional<LinkWindow> window;
  double shift = 0.0;
  if (background) {
    background->validate(n);
    window = background->window_at(t, n);
    shift = background->charge;
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(basis->dim() * static_cast<std::size_t>(n));
  for (std::size_t col = 0; col < basis->dim(); ++col) {
    const Config c = basis->config(col);
    double diag = 0.0;
    double field = 0.0;
    for (int link = 1; link < n; ++link) {
      field += 0.5 * (basis->spin_z(c, link) + (link % 2 == 0 ? 1.0 : -1.0));
      const double shifted = (window && window->contains(link)) ? field - shift : field;
      diag += params.electric_scale() * shifted * shifted;
    }
    for (int k = 1; k <= n; ++k) {
      diag += 0.5 * params.ma * (k % 2 == 0 ? 1.0 : -1.0) * basis->spin_z(c, k);
    }
    triplets.emplace_back(static_cast<int>(col), static_cast<int>(col), diag);
    for (int k = 1; k < n; ++k) {
      if (basis->spin_z(c, k) == basis->spin_z(c, k + 1)) continue;
      const Config flipped = c ^ basis->site_mask(k) ^ basis->site_mask(k + 1);
      const auto row = *basis->index_of(flipped);
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), 0.5);
    }
  }
  const auto d = static_cast<Eigen::Index>(basis->dim());
  SparseMat m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(basis, std::move(m));
}

std::vector<double> electric_field_profile(const StateVector& state,
                                           const std::optional<ChargeBackground>& background,
                                           double t) {
  const auto& basis = state.basis();
  const int n = basis.sites();
  const double norm = state.amplitudes().norm();
  if (std::abs(norm - 1.0) > 1e-10) throw NormalizationError("field profile needs a normalized state");
  std::vector<double> profile(static_cast<std::size_t>(n - 1), 0.0);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const double p = std::norm(state.amplitudes()[static_cast<Eigen::Index>(i)]);
    if (p == 0.0) continue;
    const Config c = basis.config(i);
    double field = 0.0;
    for (int link = 1; link < n; ++link) {
      field += 0.5 * (basis.spin_z(c, link) + (link % 2 == 0 ? 1.0 : -1.0));
      profile[static_cast<std::size_t>(link - 1)] += p * field;
    }
  }
  if (background) {
    background->validate(n);
    if (auto window = background->window_at(t, n)) {
      for (int link = window->first; link <= window->last; ++link) {
        profile[static_cast<std::size_t>(link - 1)] -= background->charge;
      }
    }
  }
  return profile;
}

SparseOperator pseudo_momentum_operator(const BasisPtr& basis) {
  const int n = basis->sites();
  if (n < 3) throw SizeError("pseudo-momentum operator needs at least 3 sites");
  std::vector<PauliTerm> terms;
  const cplx minus_i{0.0, -1.0};
  for (int k = 1; k + 2 <= n; ++k) {
    terms.push_back({minus_i, {{k, Pauli::minus}, {k + 1, Pauli::z}, {k + 2, Pauli::plus}}});
    // h.c. of sigma^-_k sigma^z_{k+1} sigma^+_{k+2} is sigma^-_{k+2} sigma^z_{k+1} sigma^+_k
    terms.push_back({-minus_i, {{k + 2, Pauli::minus}, {k + 1, Pauli::z}, {k, Pauli::plus}}});
  }
  return assemble(basis, terms);
}

double critical_field(const ModelParams& params) {
  if (!(params.ga > 0.0)) throw ConfigError("ga must be positive");
  return (params.ma * params.ma) / (params.ga * params.ga);
}

double continuum_vector_mass(double g) {
  if (!(g > 0.0)) throw ConfigError("g must be positive");
  return g / std::sqrt(std::numbers::pi);
}

double continuum_scalar_mass(double g) { return 2.0 * continuum_vector_mass(g); }

}  // namespace ilat
