#pragma once

// Qubit-chain Hilbert spaces, states and contiguous-window reduced density
// matrices.
//
// Conventions used throughout the library:
//   * Sites are labelled 1..N. Storage is 0-based; site k lives in bit
//     (N - k) of a configuration, so site 1 is the most significant bit.
//   * Bit value 0 is spin up (sigma^z = +1), bit value 1 is spin down.
//     Ascending configuration integers are therefore lexicographic order with
//     up before down, and the full 2^N basis matches the Kronecker product
//     ordering of single-qubit states (|up>, |down>).
//   * A sector is the total magnetization sum_k sigma^z_k = N - 2 * (#down).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ilat {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Config = std::uint32_t;

inline constexpr int kMaxSites = 24;

class SectorBasis {
 public:
  SectorBasis(int n_sites, std::optional<int> sector);

  int sites() const { return n_sites_; }
  std::optional<int> sector() const { return sector_; }
  bool is_full() const { return !sector_.has_value(); }
  std::size_t dim() const { return states_.size(); }

  Config config(std::size_t index) const { return states_[index]; }
  const std::vector<Config>& configs() const { return states_; }
  std::optional<std::size_t> index_of(Config c) const;

  Config site_mask(int site) const { return Config{1} << (n_sites_ - site); }
  // +1 for up, -1 for down.
  int spin_z(Config c, int site) const { return (c & site_mask(site)) ? -1 : 1; }
  int magnetization(Config c) const;

  bool operator==(const SectorBasis& other) const {
    return n_sites_ == other.n_sites_ && sector_ == other.sector_;
  }

 private:
  int n_sites_;
  std::optional<int> sector_;
  std::vector<Config> states_;
};

using BasisPtr = std::shared_ptr<const SectorBasis>;

BasisPtr build_sector_basis(int n_sites, std::optional<int> sector);

// An amplitude vector with no normalization invariant. Produced by operator
// application and used for linear combinations.
struct Ket {
  BasisPtr basis;
  Vec amplitudes;
};

// Unit-norm pure state. Every constructor renormalizes.
class StateVector {
 public:
  StateVector(BasisPtr basis, Vec amplitudes);
  explicit StateVector(Ket ket) : StateVector(std::move(ket.basis), std::move(ket.amplitudes)) {}

  const SectorBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Vec& amplitudes() const { return amplitudes_; }
  int sites() const { return basis_->sites(); }
  Ket ket() const { return {basis_, amplitudes_}; }

 private:
  BasisPtr basis_;
  Vec amplitudes_;
};

cplx inner(const StateVector& a, const StateVector& b);
double overlap_probability(const StateVector& a, const StateVector& b);

StateVector basis_state(const BasisPtr& basis, Config c);

// Staggered configuration with sigma^z_k = (-1)^(k+1): up, down, up, down, ...
Config neel_config(int n_sites);
StateVector neel_state(const BasisPtr& basis);

// Site k of the result carries site N+1-k of the input.
StateVector reflect(const StateVector& state);

// Re-express a state in the unrestricted 2^N basis.
Ket embed_full(const Ket& ket);

enum class Pauli { plus, minus, z, x, y };

struct PauliOp {
  int site;
  Pauli kind;
};

// Applies the product ops[0] * ops[1] * ... * ops[k-1] to one configuration;
// the rightmost factor acts first. Returns the image configuration and its
// coefficient, or nothing when the product annihilates the configuration.
std::optional<std::pair<Config, cplx>> apply_pauli_string(Config c, std::span<const PauliOp> ops,
                                                          int n_sites);

// Linear action of a Pauli product on a ket. The result is not normalized and
// may be zero. Throws SectorEscapeError if a nonzero amplitude would leave a
// restricted sector.
Ket apply_pauli_string(const Ket& ket, std::span<const PauliOp> ops);

// Label (n, l) of the contiguous window of l+1 sites centred on n. The centre
// is stored doubled so half-integer positions stay exact.
struct Label {
  int twice_n;
  int ell;

  static Label from_window(int first_site, int last_site) {
    return {first_site + last_site, last_site - first_site};
  }
  // Throws LabelError when n and l have mismatched parity.
  static Label at(double n, int ell);

  double n() const { return twice_n / 2.0; }
  int first_site() const { return (twice_n - ell) / 2; }
  int last_site() const { return (twice_n + ell) / 2; }
  int size() const { return ell + 1; }
  bool operator==(const Label&) const = default;
};

bool label_in_range(const Label& label, int n_sites);

struct DensityMatrix {
  Label window;
  Mat matrix;
};

// Coefficient matrix M(w, e) = psi(config with window bits w and environment
// bits e). Rows are indexed by window configurations in the same bit
// convention as the full basis, columns by the environment configurations
// that actually occur.
Mat window_coefficients(const StateVector& state, int first_site, int last_site);

// rho = Tr_complement |psi><psi| on the window C^l_n, dimension 2^(l+1).
DensityMatrix partial_trace_contiguous(const StateVector& state, const Label& label);

// Trace out the boundary sites of a window density matrix down to the
// sub-window [first_site, last_site].
DensityMatrix trace_down(const DensityMatrix& rho, int first_site, int last_site);

// Nonzero spectrum of the window RDM, computed from whichever of M M^dag and
// M^dag M is smaller. Eigenvalues ascending.
Eigen::VectorXd window_spectrum(const StateVector& state, int first_site, int last_site);

}  // namespace ilat
