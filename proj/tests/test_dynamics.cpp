#include "ilat/dynamics.hpp"
#include "ilat/errors.hpp"
#include "ilat/info_lattice.hpp"
#include "ilat/protocols.hpp"

#include "doctest.h"
#include "oracle.hpp"

#include <random>

using namespace ilat;

TEST_CASE("zero step returns the input") {
  std::mt19937_64 rng(1);
  auto basis = build_sector_basis(6, 0);
  const SparseOperator h = build_hamiltonian(basis, {6, 1.0, 0.25});
  const StateVector psi = oracle::haar_state(basis, rng);
  CHECK((krylov_step(h, psi, 0.0).amplitudes() - psi.amplitudes()).norm() < 1e-15);
}

TEST_CASE("krylov step matches the dense exponential") {
  std::mt19937_64 rng(2);
  auto full = build_sector_basis(4, std::nullopt);
  const SparseOperator h4 = build_hamiltonian(full, {4, 1.0, 0.25});
  const StateVector psi = oracle::haar_state(full, rng);
  const Vec exact = oracle::expm_hermitian(h4.dense(), 0.1) * psi.amplitudes();
  CHECK((krylov_step(h4, psi, 0.1).amplitudes() - exact).norm() < 1e-10);

  auto sector = build_sector_basis(10, 0);
  const SparseOperator h10 = build_hamiltonian(sector, {10, 1.3, 0.4});
  const StateVector phi = oracle::haar_state(sector, rng);
  for (double dt : {0.02, 0.3, 2.0}) {
    const Vec ref = oracle::expm_hermitian(h10.dense(), dt) * phi.amplitudes();
    CHECK((krylov_step(h10, phi, dt).amplitudes() - ref).norm() < 1e-10);
  }
}

TEST_CASE("step error when halving cannot reach the tolerance") {
  std::mt19937_64 rng(3);
  auto sector = build_sector_basis(10, 0);
  const SparseOperator h = build_hamiltonian(sector, {10, 1.0, 0.25});
  KrylovOptions opts;
  opts.krylov_dim = 2;
  opts.max_halvings = 1;
  opts.tol = 1e-14;
  CHECK_THROWS_AS(krylov_step(h, oracle::haar_state(sector, rng), 1.0, opts), StepError);
}

TEST_CASE("energy is conserved under a static hamiltonian") {
  std::mt19937_64 rng(4);
  auto sector = build_sector_basis(10, 0);
  const SparseOperator h = build_hamiltonian(sector, {10, 1.0, 0.25});
  StateVector psi = oracle::haar_state(sector, rng);
  const double e0 = h.expectation(psi);
  for (int i = 0; i < 100; ++i) psi = krylov_step(h, psi, 0.05);
  CHECK(std::abs(h.expectation(psi) - e0) / std::abs(e0) < 1e-8);
}

TEST_CASE("schedules") {
  const ModelParams p{16, 0.5, 0.25};
  ChargeBackground bg{.charge = 2.0, .speed = 1.0, .center_left = 6, .center_right = 10};
  bg.halt_at_edges = true;
  const QuenchSchedule s = make_schedule(p, bg, 20.0);
  REQUIRE(s.segments.size() == 6);
  CHECK(s.segments.back().t_start == doctest::Approx(5.0));
  CHECK(s.t_end() == 20.0);

  bg.t_remove = 3.5;
  const QuenchSchedule r = make_schedule(p, bg, 10.0);
  REQUIRE(r.segments.size() == 5);
  CHECK_FALSE(r.segments.back().background.has_value());
  CHECK(r.segments[3].t_end == doctest::Approx(3.5));

  bg.halt_at_edges = false;
  bg.t_remove.reset();
  CHECK_THROWS_AS(make_schedule(p, bg, 20.0), WindowError);
  CHECK_THROWS_AS(make_schedule(p, std::nullopt, 1.0, 0.0), ConfigError);
}

TEST_CASE("evolve samples, conserves and can be stopped") {
  auto sector = build_sector_basis(8, 0);
  const ModelParams p{8, 1.0, 0.25};
  const StateVector start = neel_state(sector);
  const QuenchSchedule s = make_schedule(p, std::nullopt, 2.0, 0.05, 0.5);

  const Trajectory bare = evolve(s, start, {});
  CHECK(bare.complete);
  REQUIRE(bare.final_state.has_value());
  const Vec ref = oracle::expm_hermitian(build_hamiltonian(sector, p).dense(), 2.0) * start.amplitudes();
  CHECK((bare.final_state->amplitudes() - ref).norm() < 1e-9);

  std::vector<double> seen;
  const Observer obs = [&](double t, const StateVector& psi, const std::optional<ChargeBackground>&) {
    seen.push_back(t);
    double mz = 0;
    for (std::size_t i = 0; i < psi.basis().dim(); ++i)
      mz += std::norm(psi.amplitudes()[static_cast<Eigen::Index>(i)]) * psi.basis().magnetization(psi.basis().config(i));
    CHECK(std::abs(mz) < 1e-10);
  };
  const Trajectory tr = evolve(s, start, std::span<const Observer>(&obs, 1));
  CHECK(seen == std::vector<double>{0, 0.5, 1.0, 1.5, 2.0});
  CHECK(tr.times == seen);

  std::stop_source source;
  source.request_stop();
  const Trajectory stopped = evolve(s, start, {}, {}, source.get_token());
  CHECK_FALSE(stopped.complete);
  CHECK_FALSE(stopped.failure.empty());
}

TEST_CASE("vacuum is stationary") {
  const ModelParams p{10, 1.0, 0.25};
  const EigenResult vac = solve_vacuum(p, {});
  const QuenchSchedule s = make_schedule(p, std::nullopt, 3.0, 0.05, 1.0);
  std::vector<std::vector<double>> fields, entropies;
  const Observer obs = [&](double, const StateVector& psi, const std::optional<ChargeBackground>&) {
    fields.push_back(electric_field_profile(psi));
    entropies.push_back(bipartite_entropy_profile(psi));
  };
  evolve(s, vac.states.front(), std::span<const Observer>(&obs, 1));
  for (std::size_t i = 1; i < fields.size(); ++i) {
    for (std::size_t n = 0; n < fields[i].size(); ++n) {
      CHECK(std::abs(fields[i][n] - fields[0][n]) < 1e-9);
      CHECK(std::abs(entropies[i][n] - entropies[0][n]) < 1e-9);
    }
  }
}

TEST_CASE("a changing background is applied per segment") {
  // with the window frozen until t=1 and then widened, a run in two halves
  // with explicitly built hamiltonians reproduces evolve
  const ModelParams p{8, 1.0, 0.25};
  ChargeBackground bg{.charge = 1.0, .speed = 1.0, .center_left = 3, .center_right = 5};
  auto sector = build_sector_basis(8, 0);
  const StateVector start = neel_state(sector);
  const QuenchSchedule s = make_schedule(p, bg, 1.5, 0.05, 1.5);
  const Trajectory tr = evolve(s, start, {});
  const Mat h0 = build_hamiltonian(sector, p, bg, 0.0).dense();
  const Mat h1 = build_hamiltonian(sector, p, bg, 1.0).dense();
  const Vec ref = oracle::expm_hermitian(h1, 0.5) * (oracle::expm_hermitian(h0, 1.0) * start.amplitudes());
  CHECK((tr.final_state->amplitudes() - ref).norm() < 1e-9);
}
