#include "ilat/protocols.hpp"

#include "ilat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ilat {

namespace {

bool wants_snapshot(const std::vector<double>& times, double t) {
  if (times.empty()) return true;
  return std::any_of(times.begin(), times.end(), [t](double s) { return std::abs(s - t) < 1e-9; });
}

void check_common(const ModelParams& model, double t_end, double dt, double sample_every, int max_scale) {
  model.validate();
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(sample_every > 0.0)) throw ConfigError("sample_every must be positive");
  if (max_scale < 0 || max_scale > model.sites - 1) {
    throw ConfigError("lmax must lie in 0.." + std::to_string(model.sites - 1));
  }
}

std::optional<int> staggered_sector(int n_sites) { return n_sites % 2 == 0 ? 0 : 1; }

}  // namespace

StateVector prepare_meson_wavepacket(const StateVector& vacuum, std::span<const WavePacket> packets) {
  const int n = vacuum.sites();
  Ket ket = vacuum.ket();
  for (const auto& packet : packets) {
    if (packet.center < 1.0 || packet.center > n - 1) {
      throw ConfigError("packet centre " + std::to_string(packet.center) + " outside links 1.." +
                        std::to_string(n - 1));
    }
    if (!(packet.width >= 0.0)) throw ConfigError("packet width must be non-negative");
    Vec sum = Vec::Zero(ket.amplitudes.size());
    for (int link = 1; link < n; ++link) {
      double envelope;
      if (packet.width == 0.0) {
        envelope = std::abs(link - packet.center) < 0.5 ? 1.0 : 0.0;
      } else {
        const double x = (link - packet.center) / packet.width;
        envelope = std::exp(-0.5 * x * x);
      }
      if (envelope == 0.0) continue;
      const cplx weight = envelope * std::exp(cplx{0.0, -link * packet.momentum});
      const PauliOp hop_left[] = {{link, Pauli::plus}, {link + 1, Pauli::minus}};
      const PauliOp hop_right[] = {{link + 1, Pauli::plus}, {link, Pauli::minus}};
      sum += weight * (apply_pauli_string(ket, hop_left).amplitudes -
                       apply_pauli_string(ket, hop_right).amplitudes);
    }
    ket.amplitudes = std::move(sum);
  }
  const double norm = ket.amplitudes.norm();
  if (!(norm > 1e-14)) throw DegeneratePacketError("wave-packet operator annihilates the vacuum");
  return StateVector(std::move(ket));
}

StateVector prepare_meson_wavepacket(const StateVector& vacuum, double center, double momentum,
                                     double width) {
  const WavePacket packet{center, momentum, width};
  return prepare_meson_wavepacket(vacuum, std::span<const WavePacket>(&packet, 1));
}

void ScatteringConfig::validate() const {
  check_common(model, t_end, dt, sample_every, max_scale);
  if (packets.empty()) throw ConfigError("scattering needs at least one packet");
  for (std::size_t a = 0; a < packets.size(); ++a) {
    const auto& p = packets[a];
    if (p.center < 1.0 || p.center > model.sites - 1) throw ConfigError("packet centre outside the chain");
    if (!(p.width >= 0.0)) throw ConfigError("packet width must be non-negative");
    for (std::size_t b = a + 1; b < packets.size(); ++b) {
      const auto& q = packets[b];
      if (std::abs(p.center - q.center) < 3.0 * (p.width + q.width)) {
        throw ConfigError("wave packets overlap within 3 sigma");
      }
    }
  }
  if (cut_n_lo > cut_n_hi || cut_t_lo > cut_t_hi) throw ConfigError("empty I^cut window");
  if (cut_n_hi < 1.0 || cut_n_lo > model.sites) throw ConfigError("I^cut window outside the chain");
}

void StringConfig::validate() const {
  check_common(model, t_end, dt, sample_every, max_scale);
  background.validate(model.sites);
  if (field_lo < 1 || field_hi > model.sites - 1 || field_lo > field_hi) {
    throw ConfigError("field-average window must be a link range inside 1.." +
                      std::to_string(model.sites - 1));
  }
  if (info_n_lo > info_n_hi || info_n_hi < 1.0 || info_n_lo > model.sites) {
    throw ConfigError("information window must lie inside the chain");
  }
  if (peak_exclude_below < 0) throw ConfigError("peak exclusion threshold must be non-negative");
}

void center_string_defaults(StringConfig& cfg) {
  const int n = cfg.model.sites;
  const int centre = n / 2;
  // Six links on 24 sites, scaled with N and rounded to an even count so the
  // window stays centred on link N/2.
  const int half = std::max(1, static_cast<int>(std::lround(1.5 * n / 12.0)));
  cfg.background.center_left = std::max(1, centre - half);
  cfg.background.center_right = std::min(n - 1, centre + half);
  cfg.field_lo = std::max(1, centre - 1);
  cfg.field_hi = centre;
  cfg.info_n_lo = std::max(1.0, centre - 2.0);
  cfg.info_n_hi = std::min(static_cast<double>(n), centre + 3.0);
}

EigenResult solve_vacuum(const ModelParams& params, const LanczosOptions& options) {
  params.validate();
  auto basis = build_sector_basis(params.sites, staggered_sector(params.sites));
  const SparseOperator h = build_hamiltonian(basis, params);
  LanczosOptions single = options;
  single.count = 1;
  return lanczos_lowest(h, single);
}

ScatteringArtifacts run_scattering(const ScatteringConfig& cfg, std::stop_token stop) {
  cfg.validate();
  ScatteringArtifacts out;
  const EigenResult vacuum = solve_vacuum(cfg.model, cfg.lanczos);
  out.vacuum_energy = vacuum.energies.front();
  const StateVector initial = prepare_meson_wavepacket(vacuum.states.front(), cfg.packets);
  const QuenchSchedule schedule = make_schedule(cfg.model, std::nullopt, cfg.t_end, cfg.dt, cfg.sample_every);
  out.initial_energy = build_hamiltonian(initial.basis_ptr(), cfg.model).expectation(initial);

  const Observer record = [&](double t, const StateVector& psi, const std::optional<ChargeBackground>&) {
    out.times.push_back(t);
    out.entropy.push_back(bipartite_entropy_profile(psi));
    const bool in_cut = t >= cfg.cut_t_lo - 1e-9 && t <= cfg.cut_t_hi + 1e-9;
    const bool snap = wants_snapshot(cfg.snapshot_times, t);
    if (!in_cut && !snap) return;
    InfoLattice lattice = full_info_lattice(psi, cfg.max_scale, cfg.threads);
    out.lattice_totals.push_back(lattice.total());
    if (in_cut) out.icut.push_back({t, windowed_info_per_scale(lattice, cfg.cut_n_lo, cfg.cut_n_hi)});
    if (snap) out.snapshots.push_back({t, std::move(lattice)});
  };
  const Trajectory trajectory = evolve(schedule, initial, std::span<const Observer>(&record, 1), cfg.krylov, stop);
  out.complete = trajectory.complete;
  out.failure = trajectory.failure;
  out.final_state = trajectory.final_state;
  return out;
}

StringArtifacts run_string_quench(const StringConfig& cfg, std::stop_token stop) {
  cfg.validate();
  StringArtifacts out;
  const EigenResult vacuum = solve_vacuum(cfg.model, cfg.lanczos);
  out.vacuum_energy = vacuum.energies.front();
  const QuenchSchedule schedule =
      make_schedule(cfg.model, cfg.background, cfg.t_end, cfg.dt, cfg.sample_every);

  std::optional<double> mean_field_at_start;
  const Observer record = [&](double t, const StateVector& psi, const std::optional<ChargeBackground>& bg) {
    out.times.push_back(t);
    auto field = electric_field_profile(psi, bg, t);
    double mean = 0.0;
    for (int link = cfg.field_lo; link <= cfg.field_hi; ++link) mean += field[static_cast<std::size_t>(link - 1)];
    mean /= static_cast<double>(cfg.field_hi - cfg.field_lo + 1);
    if (!mean_field_at_start) mean_field_at_start = mean;
    out.mean_field_shift.push_back(mean - *mean_field_at_start);
    out.field.push_back(std::move(field));
    out.entropy.push_back(bipartite_entropy_profile(psi));

    InfoLattice lattice = full_info_lattice(psi, cfg.max_scale, cfg.threads);
    out.lattice_totals.push_back(lattice.total());
    ScaleProfile partial = windowed_info_per_scale(lattice, cfg.info_n_lo, cfg.info_n_hi);
    out.peak.push_back(peak_scale(partial, cfg.peak_exclude_below));
    out.ibar.push_back({t, std::move(partial)});
    if (wants_snapshot(cfg.snapshot_times, t)) out.snapshots.push_back({t, std::move(lattice)});
  };
  const Trajectory trajectory =
      evolve(schedule, vacuum.states.front(), std::span<const Observer>(&record, 1), cfg.krylov, stop);
  out.complete = trajectory.complete;
  out.failure = trajectory.failure;
  out.final_state = trajectory.final_state;
  return out;
}

}  // namespace ilat
