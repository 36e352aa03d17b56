#pragma once

#include "ilat/dynamics.hpp"
#include "ilat/info_lattice.hpp"
#include "ilat/schwinger.hpp"
#include "ilat/spectral.hpp"

#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

namespace ilat {

struct WavePacket {
  double center = 1.0;    // j, in sites
  double momentum = 0.0;  // k, in units of 1/a
  double width = 1.0;     // sigma, in units of a; 0 puts the packet on one link
};

// normalize[ prod_p sum_n phi_p(n) e^{-i n k_p} (s^+_n s^-_{n+1} - s^+_{n+1} s^-_n) |vacuum> ]
// with Gaussian phi_p(n) = exp(-(n - j_p)^2 / (2 sigma_p^2)), n = 1..N-1.
// Packets are applied in order and the product is normalized once.
StateVector prepare_meson_wavepacket(const StateVector& vacuum, std::span<const WavePacket> packets);
StateVector prepare_meson_wavepacket(const StateVector& vacuum, double center, double momentum,
                                     double width);

struct ScatteringConfig {
  ModelParams model{16, 1.0, 1e-5};
  std::vector<WavePacket> packets{{4.0, 0.7, 1.0}, {12.0, -0.7, 1.0}};
  double t_end = 16.0;
  double dt = 0.02;
  double sample_every = 0.5;
  int max_scale = 9;
  // I^cut sums labels with cut_n_lo <= n <= cut_n_hi over samples with
  // cut_t_lo <= t <= cut_t_hi.
  double cut_n_lo = 6.0;
  double cut_n_hi = 9.5;
  double cut_t_lo = 6.0;
  double cut_t_hi = 14.0;
  // Empty: a lattice snapshot at every sample.
  std::vector<double> snapshot_times;
  KrylovOptions krylov;
  LanczosOptions lanczos;
  int threads = 1;

  void validate() const;
};

struct StringConfig {
  ModelParams model{16, 0.5, 0.25};
  ChargeBackground background{2.0, 1.0, 6, 10, std::nullopt, true};
  double t_end = 20.0;
  double dt = 0.02;
  double sample_every = 0.5;
  int max_scale = 9;
  // Links averaged for the mean field.
  int field_lo = 7;
  int field_hi = 8;
  // Label centres summed for the partially integrated information per scale.
  double info_n_lo = 6.0;
  double info_n_hi = 11.0;
  int peak_exclude_below = 2;
  std::vector<double> snapshot_times;
  KrylovOptions krylov;
  LanczosOptions lanczos;
  int threads = 1;

  void validate() const;
};

// Fills the desk-scale defaults that depend on N: centred charge window,
// central field links and the centre window for the information sums.
void center_string_defaults(StringConfig& cfg);

struct LatticeSnapshot {
  double t;
  InfoLattice lattice;
};

struct ScaleRecord {
  double t;
  ScaleProfile profile;
};

struct ScatteringArtifacts {
  double vacuum_energy = 0.0;
  double initial_energy = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> entropy;  // S(n, t), n = 1..N-1
  std::vector<double> lattice_totals;        // sum of i(n, l, t) per sample with a lattice
  std::vector<LatticeSnapshot> snapshots;
  std::vector<ScaleRecord> icut;
  bool complete = true;
  std::string failure;
  std::optional<StateVector> final_state;
};

struct StringArtifacts {
  double vacuum_energy = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> field;    // physical L(n, t), n = 1..N-1
  std::vector<std::vector<double>> entropy;  // S(n, t)
  std::vector<double> lattice_totals;
  std::vector<LatticeSnapshot> snapshots;
  std::vector<ScaleRecord> ibar;
  std::vector<double> mean_field_shift;  // Lbar(t) - Lbar(0)
  std::vector<std::optional<int>> peak;  // l_max(t)
  bool complete = true;
  std::string failure;
  std::optional<StateVector> final_state;
};

// Ground state of the model without background, in the sector of the
// staggered configuration.
EigenResult solve_vacuum(const ModelParams& params, const LanczosOptions& options);

ScatteringArtifacts run_scattering(const ScatteringConfig& cfg, std::stop_token stop = {});
StringArtifacts run_string_quench(const StringConfig& cfg, std::stop_token stop = {});

}  // namespace ilat
