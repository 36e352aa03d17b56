#include "ilat/errors.hpp"
#include "ilat/protocols.hpp"

#include "doctest.h"
#include "oracle.hpp"

using namespace ilat;

TEST_CASE("point packet on the strong-coupling vacuum is a local vector excitation") {
  auto basis = build_sector_basis(8, 0);
  const StateVector neel = neel_state(basis);
  const StateVector packet = prepare_meson_wavepacket(neel, 3.0, 0.0, 0.0);
  CHECK(packet.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-15));
  // link 3 joins sites 3 (up) and 4 (down); only the hop-right term survives
  const PauliOp flip[] = {{4, Pauli::plus}, {3, Pauli::minus}};
  const StateVector expected(apply_pauli_string(neel.ket(), flip));
  CHECK(overlap_probability(packet, expected) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("packets carry energy above the vacuum") {
  const ModelParams p{12, 1.0, 1e-5};
  const EigenResult vac = solve_vacuum(p, {});
  const StateVector psi = prepare_meson_wavepacket(vac.states.front(), 6.0, 0.7, 1.0);
  const SparseOperator h = build_hamiltonian(psi.basis_ptr(), p);
  CHECK(h.expectation(psi) - vac.energies.front() > 0.0);
  CHECK(psi.amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("degenerate and invalid packets") {
  auto full = build_sector_basis(4, std::nullopt);
  const StateVector all_up = basis_state(full, 0);
  CHECK_THROWS_AS(prepare_meson_wavepacket(all_up, 2.0, 0.3, 1.0), DegeneratePacketError);
  const StateVector neel = neel_state(build_sector_basis(4, 0));
  CHECK_THROWS_AS(prepare_meson_wavepacket(neel, 7.0, 0.3, 1.0), ConfigError);
  CHECK_THROWS_AS(prepare_meson_wavepacket(neel, 2.0, 0.3, -1.0), ConfigError);
}

TEST_CASE("config validation") {
  ScatteringConfig sc;
  CHECK_NOTHROW(sc.validate());
  sc.packets = {{4, 0.7, 1}, {7, -0.7, 1}};
  CHECK_THROWS_AS(sc.validate(), ConfigError);
  sc = {};
  sc.max_scale = 16;
  CHECK_THROWS_AS(sc.validate(), ConfigError);

  StringConfig st;
  CHECK_NOTHROW(st.validate());
  st.field_hi = 16;
  CHECK_THROWS_AS(st.validate(), ConfigError);

  StringConfig centred;
  centred.model.sites = 16;
  center_string_defaults(centred);
  CHECK(centred.background.center_left == 6);
  CHECK(centred.background.center_right == 10);
  CHECK(centred.field_lo == 7);
  CHECK(centred.field_hi == 8);
}

TEST_CASE("zero charge string run is stationary") {
  StringConfig cfg;
  cfg.model = {10, 0.5, 0.25};
  center_string_defaults(cfg);
  cfg.background.charge = 0.0;
  cfg.t_end = 2.0;
  cfg.max_scale = 4;
  const StringArtifacts run = run_string_quench(cfg);
  REQUIRE(run.complete);
  REQUIRE(run.times.size() == 5);
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    for (std::size_t n = 0; n < run.field[i].size(); ++n) {
      CHECK(std::abs(run.field[i][n] - run.field[0][n]) < 1e-9);
      CHECK(std::abs(run.entropy[i][n] - run.entropy[0][n]) < 1e-9);
    }
    CHECK(std::abs(run.mean_field_shift[i]) < 1e-9);
  }
}

TEST_CASE("string runs keep the lattice normalized and are mirror symmetric") {
  StringConfig cfg;
  cfg.model = {10, 1.0, 0.25};
  center_string_defaults(cfg);
  cfg.background.charge = 1.5;
  cfg.t_end = 3.0;
  cfg.max_scale = 9;
  const StringArtifacts run = run_string_quench(cfg);
  REQUIRE(run.complete);
  for (double total : run.lattice_totals) CHECK(total == doctest::Approx(10.0).epsilon(1e-8));
  for (const auto& snap : run.snapshots) CHECK(snap.lattice.min_value() > -1e-10);
  // the window [4, 6] on 9 links is centred; reflection combined with charge
  // conjugation is a symmetry, so S(n) and L(n) are mirror symmetric
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const auto& s = run.entropy[i];
    const auto& l = run.field[i];
    for (std::size_t n = 0; n < s.size(); ++n) {
      CHECK(std::abs(s[n] - s[s.size() - 1 - n]) < 1e-8);
      CHECK(std::abs(l[n] - l[l.size() - 1 - n]) < 1e-8);
    }
  }
}

TEST_CASE("scattering run") {
  ScatteringConfig cfg;
  cfg.model = {10, 1.0, 1e-5};
  cfg.packets = {{3, 0.7, 0.5}, {7, -0.7, 0.5}};
  cfg.t_end = 2.0;
  cfg.max_scale = 5;
  cfg.cut_n_lo = 4;
  cfg.cut_n_hi = 6.5;
  cfg.cut_t_lo = 1.0;
  cfg.cut_t_hi = 2.0;
  cfg.snapshot_times = {0.0, 2.0};
  const ScatteringArtifacts run = run_scattering(cfg);
  REQUIRE(run.complete);
  CHECK(run.initial_energy > run.vacuum_energy);
  CHECK(run.times.size() == 5);
  CHECK(run.snapshots.size() == 2);
  CHECK(run.icut.size() == 3);
  CHECK(run.icut.front().profile.size() == 6);
}
