// Acceptance checks. One PASS/FAIL line per criterion; the exit code is
// nonzero if any selected criterion fails.
//
//   ilat_acceptance [--only ID]... [--configs DIR]

#include "ilat/config.hpp"
#include "ilat/dynamics.hpp"
#include "ilat/info_lattice.hpp"
#include "ilat/protocols.hpp"
#include "ilat/spectral.hpp"

#include "oracle.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace ilat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome()> run;
};

std::filesystem::path config_dir = ILAT_CONFIG_DIR;

// Smallest local information seen by any check; the SSA criterion reports it.
double ssa_min = 0.0;
int ssa_lattices = 0;

void record(const InfoLattice& lat) {
  const double m = lat.min_value();
  ssa_min = ssa_lattices == 0 ? m : std::min(ssa_min, m);
  ++ssa_lattices;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

StateVector bell_pair() {
  auto basis = build_sector_basis(2, std::nullopt);
  Vec v = Vec::Zero(4);
  v[0] = v[3] = 1.0;
  return StateVector(basis, v);
}

StateVector ghz(int n) {
  auto basis = build_sector_basis(n, std::nullopt);
  Vec v = Vec::Zero(static_cast<Eigen::Index>(basis->dim()));
  v[0] = v[v.size() - 1] = 1.0;
  return StateVector(basis, v);
}

Outcome analytic_identities() {
  double err = 0.0;
  for (int n : {2, 4, 8, 12}) {
    const InfoLattice lat = full_info_lattice(neel_state(build_sector_basis(n, 0)), n - 1);
    record(lat);
    lat.for_each([&](const Label& l, double v) { err = std::max(err, std::abs(v - (l.ell == 0 ? 1.0 : 0.0))); });
  }
  const InfoLattice b = full_info_lattice(bell_pair(), 1);
  record(b);
  err = std::max(err, std::abs(b.at(Label::at(1, 0))));
  err = std::max(err, std::abs(b.at(Label::at(2, 0))));
  err = std::max(err, std::abs(b.at(Label::at(1.5, 1)) - 2.0));
  return {err < 1e-12, fmt("max error %.2e", err)};
}

Outcome decomposition_identity() {
  std::mt19937_64 rng(2024);
  auto basis = build_sector_basis(8, std::nullopt);
  double err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector psi = oracle::haar_state(basis, rng);
    const InfoLattice lat = full_info_lattice(psi, 7);
    record(lat);
    for (int first = 1; first <= 8; ++first) {
      for (int last = first; last <= 8; ++last) {
        double sum = 0.0;
        lat.for_each([&](const Label& l, double v) {
          if (l.first_site() >= first && l.last_site() <= last) sum += v;
        });
        err = std::max(err, std::abs(sum - window_information(psi, first, last)));
      }
    }
  }
  return {err < 1e-9, fmt("20 states, max window error %.2e", err)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(77);
  const std::vector<std::pair<int, std::optional<int>>> cases = {
      {4, std::nullopt}, {5, std::nullopt}, {6, std::nullopt}, {6, 0}, {7, std::nullopt},
      {7, 1},            {8, std::nullopt}, {8, 0},            {8, 2}, {8, std::nullopt}};
  double err = 0.0;
  for (const auto& [n, sector] : cases) {
    const StateVector psi = oracle::haar_state(build_sector_basis(n, sector), rng);
    const Vec full = oracle::full_vector(psi);
    const InfoLattice lat = full_info_lattice(psi, n - 1);
    record(lat);
    lat.for_each([&](const Label& l, double v) {
      err = std::max(err, std::abs(v - oracle::local_info(full, n, l.first_site(), l.last_site())));
    });
  }
  return {err < 1e-10, fmt("10 states, max deviation %.2e", err)};
}

Outcome conservation() {
  const ModelParams p{12, 1.0, 0.25};
  auto basis = build_sector_basis(12, 0);
  const SparseOperator h = build_hamiltonian(basis, p);
  // a state far from any eigenstate: a meson pair on top of the vacuum
  const StateVector vac = solve_vacuum(p, {}).states.front();
  const WavePacket packets[] = {{3.0, 0.7, 1.0}, {9.0, -0.7, 1.0}};
  StateVector psi = prepare_meson_wavepacket(vac, packets);
  const double e0 = h.expectation(psi);
  KrylovOptions opts;
  opts.tol = 1e-12;
  double total_err = 0.0, drift = 0.0;
  for (int step = 1; step <= 200; ++step) {
    psi = krylov_step(h, psi, 0.05, opts);
    drift = std::max(drift, std::abs(h.expectation(psi) - e0) / std::abs(e0));
    const InfoLattice lat = full_info_lattice(psi, 11, 4);
    record(lat);
    total_err = std::max(total_err, std::abs(lat.total() - 12.0));
  }
  return {total_err < 1e-8 && drift < 1e-8,
          fmt("max |sum i - 12| %.2e, max relative energy drift %.2e", total_err, drift)};
}

Outcome spectral_correctness() {
  const ModelParams p{10, 1.0, 1e-5};
  const SparseOperator h = build_hamiltonian(build_sector_basis(10, 0), p);
  const Eigen::VectorXd dense = oracle::eigenvalues(h.dense());
  const EigenResult r = lowest_levels_by_deflation(h, 10, default_deflation_shift(p), {});
  double err = 0.0;
  for (int i = 0; i < 10; ++i) err = std::max(err, std::abs(r.energies[static_cast<std::size_t>(i)] - dense[i]));
  return {err < 1e-8, fmt("10 levels, max error %.2e", err)};
}

Outcome strong_coupling() {
  auto b12 = build_sector_basis(12, 0);
  const SparseOperator h = build_hamiltonian(b12, {12, 10.0, 0.0});
  const double overlap = overlap_probability(lanczos_lowest(h, {}).states.front(), neel_state(b12));

  const auto sc = strong_coupling_states(b12);
  const InfoLattice lv = full_info_lattice(sc.vector, 11);
  const InfoLattice ls = full_info_lattice(sc.scalar, 11);
  record(lv);
  record(ls);
  const ScaleProfile v = info_per_scale(lv);
  const ScaleProfile s = info_per_scale(ls);
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - s[i]));
  return {overlap > 0.99 && err < 1e-10,
          fmt("N=12: Neel overlap %.6f, max |I_V - I_S| %.2e", overlap, err)};
}

Outcome entropy_consistency() {
  std::mt19937_64 rng(5150);
  const int n = 8;
  auto basis = build_sector_basis(n, std::nullopt);
  double err = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const StateVector psi = oracle::haar_state(basis, rng);
    const auto s = bipartite_entropy_profile(psi);
    const InfoLattice lat = full_info_lattice(psi, n - 1);
    record(lat);
    for (int cut = 1; cut < n; ++cut) {
      // S(1..cut) = cut - sum of i inside the block
      double inside = 0.0;
      lat.for_each([&](const Label& l, double v) {
        if (l.last_site() <= cut) inside += v;
      });
      err = std::max(err, std::abs(s[static_cast<std::size_t>(cut - 1)] - (cut - inside)));
    }
  }
  return {err < 1e-10, fmt("10 states, max deviation %.2e", err)};
}

Outcome ssa_positivity() {
  // own corpus, so the check stands alone under --only
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    record(full_info_lattice(oracle::haar_state(build_sector_basis(8, std::nullopt), rng), 7));
    record(full_info_lattice(oracle::haar_state(build_sector_basis(10, 0), rng), 9));
  }
  record(full_info_lattice(ghz(8), 7));
  auto b12 = build_sector_basis(12, 0);
  const ModelParams p{12, 1.0, 0.25};
  const StateVector vac = solve_vacuum(p, {}).states.front();
  record(full_info_lattice(vac, 11));
  record(full_info_lattice(prepare_meson_wavepacket(vac, 6.0, 0.0, 1.0), 11));
  const auto sc = strong_coupling_states(b12);
  record(full_info_lattice(sc.vector, 11));
  record(full_info_lattice(sc.scalar, 11));

  StringConfig cfg = parse_string_config(ConfigFile::load(config_dir / "ci-string.ini"));
  const StringArtifacts run = run_string_quench(cfg);
  for (const auto& snap : run.snapshots) record(snap.lattice);
  return {ssa_min >= -1e-10, fmt("%.0f lattices, min i = %.2e", ssa_lattices, ssa_min)};
}

double central_entropy(const StringArtifacts& run, std::size_t sample, int n_sites) {
  return run.entropy[sample][static_cast<std::size_t>(n_sites / 2 - 1)];
}

double mean_field(const StringArtifacts& run, std::size_t sample, const StringConfig& cfg) {
  double sum = 0.0;
  for (int link = cfg.field_lo; link <= cfg.field_hi; ++link) sum += run.field[sample][static_cast<std::size_t>(link - 1)];
  return sum / (cfg.field_hi - cfg.field_lo + 1);
}

struct GateA {
  bool monotone = true;
  bool sign_kept = true;
  double worst_drop = 0.0;
  double worst_drop_t = 0.0;
  double s_end = 0.0;
};

GateA run_gate_a() {
  const StringConfig cfg = parse_string_config(ConfigFile::load(config_dir / "gate-a.ini"));
  const StringArtifacts run = run_string_quench(cfg);
  const int n = cfg.model.sites;
  GateA g;
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    const double lbar = mean_field(run, k, cfg);
    lo = std::min(lo, lbar);
    hi = std::max(hi, lbar);
    if (k == 0) continue;
    const double drop = central_entropy(run, k - 1, n) - central_entropy(run, k, n);
    if (drop > g.worst_drop) {
      g.worst_drop = drop;
      g.worst_drop_t = run.times[k];
    }
  }
  g.monotone = g.worst_drop <= 1e-12;
  g.sign_kept = lo > 0.0 || hi < 0.0;
  g.s_end = central_entropy(run, run.times.size() - 1, n);
  return g;
}

Outcome gate_a() {
  const GateA g = run_gate_a();
  std::string detail = g.monotone ? "central S monotone" : fmt("central S drops by %.3g at t=%.1f", g.worst_drop, g.worst_drop_t);
  detail += g.sign_kept ? ", Lbar keeps its sign" : ", Lbar changes sign";
  detail += fmt(", S_end %.4f", g.s_end);
  return {g.monotone && g.sign_kept, detail};
}

Outcome gate_b() {
  const double s_ref = run_gate_a().s_end;
  const StringConfig cfg = parse_string_config(ConfigFile::load(config_dir / "gate-b.ini"));
  const StringArtifacts run = run_string_quench(cfg);
  double s_max = 0.0;
  for (std::size_t k = 0; k < run.times.size(); ++k) s_max = std::max(s_max, central_entropy(run, k, cfg.model.sites));
  return {s_max <= s_ref, fmt("max central S %.4f vs weak-coupling endpoint %.4f", s_max, s_ref)};
}

double max_diff(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) d = std::max(d, std::abs(a[i][j] - b[i][j]));
  return d;
}

Outcome step_convergence() {
  StringConfig coarse = parse_string_config(ConfigFile::load(config_dir / "ci-string.ini"));
  StringConfig fine = coarse;
  fine.dt = coarse.dt / 2;
  const StringArtifacts a = run_string_quench(coarse);
  const StringArtifacts b = run_string_quench(fine);
  if (a.times != b.times) return {false, "sample times differ"};
  double d = std::max(max_diff(a.field, b.field), max_diff(a.entropy, b.entropy));
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    d = std::max(d, std::abs(a.lattice_totals[k] - b.lattice_totals[k]));
    d = std::max(d, std::abs(a.mean_field_shift[k] - b.mean_field_shift[k]));
    for (std::size_t l = 0; l < a.ibar[k].profile.size(); ++l)
      d = std::max(d, std::abs(a.ibar[k].profile[l] - b.ibar[k].profile[l]));
  }
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    a.snapshots[k].lattice.for_each(
        [&](const Label& l, double v) { d = std::max(d, std::abs(v - b.snapshots[k].lattice.at(l))); });
  }
  const bool peaks_equal = a.peak == b.peak;
  return {d < 1e-6 && peaks_equal,
          fmt("dt %.3g vs %.3g", coarse.dt, fine.dt) + fmt(", max change %.2e", d) +
              (peaks_equal ? "" : ", peak scale differs")};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      only.emplace_back(argv[++i]);
    } else if (arg == "--configs" && i + 1 < argc) {
      config_dir = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--only ID]... [--configs DIR]\n", argv[0]);
      return 2;
    }
  }

  // SSA last among the fast checks so it sees their lattices as well.
  const std::vector<Criterion> criteria = {
      {"analytic", "analytic identities (Neel, Bell)", analytic_identities},
      {"decomposition", "decomposition identity", decomposition_identity},
      {"oracle", "dense oracle equivalence", oracle_equivalence},
      {"conservation", "information and energy conservation", conservation},
      {"spectral", "Lanczos with deflation vs dense levels", spectral_correctness},
      {"strong-coupling", "strong-coupling limit", strong_coupling},
      {"entropy", "entropy consistency", entropy_consistency},
      {"ssa", "strong subadditivity", ssa_positivity},
      {"gate-a", "regime gate (a): weak coupling, unbroken string", gate_a},
      {"gate-b", "regime gate (b): string breaking bounds the entropy", gate_b},
      {"step-size", "step-size convergence", step_convergence},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%s] %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", c.id.c_str(), c.title.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
