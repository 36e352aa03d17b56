// ilat: command-line driver.
//
//   ilat spectrum    --config FILE [--out DIR] [--seed S]
//   ilat scatter     --config FILE [--out DIR] [--threads K] [--seed S] [--lmax L] [--preset fig7-desk]
//   ilat string      --config FILE [--out DIR] [--threads K] [--seed S] [--lmax L]
//   ilat infolattice --state FILE  [--out DIR] [--lmax L] [--threads K]
//   ilat make-state  --kind neel|bell|ghz|vacuum --sites N --output FILE
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
// 130 interrupted (partial outputs and an incomplete manifest are kept).

#include "ilat/config.hpp"
#include "ilat/errors.hpp"
#include "ilat/io.hpp"
#include "ilat/protocols.hpp"
#include "ilat/schwinger.hpp"
#include "ilat/spectral.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace ilat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInterrupted = 130;

volatile std::sig_atomic_t g_interrupted = 0;

extern "C" void on_sigint(int) { g_interrupted = 1; }

// Forwards SIGINT/SIGTERM to a stop_source from an ordinary thread, since
// request_stop is not async-signal-safe.
class InterruptWatch {
 public:
  InterruptWatch() {
    std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);
    watcher_ = std::jthread([this](std::stop_token own) {
      while (!own.stop_requested()) {
        if (g_interrupted) {
          source_.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
      }
    });
  }
  std::stop_token token() const { return source_.get_token(); }
  bool interrupted() const { return source_.stop_requested(); }

 private:
  std::stop_source source_;
  std::jthread watcher_;
};

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<int> seed;
  std::optional<int> lmax;
};

ConfigFile load_config(const CommonFlags& flags, const ConfigFile::Schema& schema) {
  ConfigFile file = flags.config.empty() ? ConfigFile::parse("") : ConfigFile::load(flags.config);
  file.apply_env_overrides(schema);
  if (flags.threads) file.set("run", "threads", std::to_string(*flags.threads));
  if (flags.seed) file.set("run", "seed", std::to_string(*flags.seed));
  if (flags.lmax) file.set("run", "lmax", std::to_string(*flags.lmax));
  return file;
}

fs::path output_dir(const CommonFlags& flags, const ConfigFile& file) {
  return flags.out.empty() ? parse_output_settings(file).dir : fs::path(flags.out);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

int finish_run(RunManifest& manifest, bool complete, const std::string& failure, bool interrupted) {
  manifest.finish(complete, failure);
  manifest.write();
  if (complete) return kExitOk;
  std::cerr << "ilat: run incomplete: " << failure << '\n';
  return interrupted ? kExitInterrupted : kExitNumerical;
}

int cmd_spectrum(const CommonFlags& flags) {
  ConfigFile file = load_config(flags, spectrum_schema());
  const SpectrumConfig cfg = parse_spectrum_config(file);
  const OutputSettings out = parse_output_settings(file);
  const fs::path dir = output_dir(flags, file);
  prepare_dir(dir);
  RunManifest manifest(dir, "spectrum", file.echo());
  manifest.write();

  auto basis = build_sector_basis(cfg.model.sites, cfg.model.sites % 2 == 0 ? 0 : 1);
  const SparseOperator h = build_hamiltonian(basis, cfg.model);
  const SparseOperator p = pseudo_momentum_operator(basis);
  const int levels = std::min<int>(cfg.levels, static_cast<int>(basis->dim()));
  const double shift = cfg.shift > 0.0 ? cfg.shift : default_deflation_shift(cfg.model);
  const EigenResult spectrum = lowest_levels_by_deflation(h, levels, shift, cfg.lanczos);
  const auto labels = classify_spectrum(spectrum, h, p, cfg.classify);
  emit_file(manifest, dir, "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, spectrum, labels); });
  if (out.save_state) {
    save_state(dir / "ground_state.json", spectrum.states.front());
    manifest.add_output("ground_state.json");
  }
  return finish_run(manifest, true, {}, false);
}

int cmd_scatter(const CommonFlags& flags, const std::string& preset) {
  ConfigFile file = load_config(flags, scatter_schema());
  const ScatteringConfig cfg = parse_scattering_config(file);
  const OutputSettings out = parse_output_settings(file);
  std::vector<std::pair<std::string, ScatteringConfig>> runs;
  if (preset.empty()) {
    runs.emplace_back("", cfg);
  } else if (preset == "fig7-desk") {
    // Four momenta straddling the inelastic threshold, packets at +-k.
    for (const char* k : {"0.7", "1.0", "1.2", "1.3"}) {
      ScatteringConfig run = cfg;
      for (auto& packet : run.packets) packet.momentum = (packet.momentum < 0.0 ? -1.0 : 1.0) * std::stod(k);
      run.validate();
      runs.emplace_back(std::string("_k") + k, run);
    }
  } else {
    throw ConfigError("unknown preset '" + preset + "'");
  }
  const fs::path dir = output_dir(flags, file);
  prepare_dir(dir);
  nlohmann::json echo = file.echo();
  if (!preset.empty()) echo["preset"] = preset;
  RunManifest manifest(dir, "scatter", echo);
  manifest.write();

  InterruptWatch watch;
  for (const auto& [suffix, run_cfg] : runs) {
    const ScatteringArtifacts run = run_scattering(run_cfg, watch.token());
    emit_scattering(manifest, dir, run, suffix);
    if (out.save_state && run.final_state) {
      save_state(dir / ("final_state" + suffix + ".json"), *run.final_state);
      manifest.add_output("final_state" + suffix + ".json");
    }
    if (!run.complete) return finish_run(manifest, false, run.failure, watch.interrupted());
  }
  return finish_run(manifest, true, {}, false);
}

int cmd_string(const CommonFlags& flags) {
  ConfigFile file = load_config(flags, string_schema());
  const StringConfig cfg = parse_string_config(file);
  const OutputSettings out = parse_output_settings(file);
  const fs::path dir = output_dir(flags, file);
  prepare_dir(dir);
  RunManifest manifest(dir, "string", file.echo());
  manifest.write();

  InterruptWatch watch;
  const StringArtifacts run = run_string_quench(cfg, watch.token());
  emit_string(manifest, dir, run);
  if (out.save_state && run.final_state) {
    save_state(dir / "final_state.json", *run.final_state);
    manifest.add_output("final_state.json");
  }
  return finish_run(manifest, run.complete, run.failure, watch.interrupted());
}

int cmd_infolattice(const std::string& state_path, const CommonFlags& flags) {
  const StateVector state = load_state(state_path);
  const int n = state.sites();
  const int lmax = flags.lmax.value_or(n - 1);
  if (lmax < 0 || lmax > n - 1) throw ConfigError("--lmax must lie in 0.." + std::to_string(n - 1));
  const int threads = flags.threads.value_or(1);
  if (threads < 1) throw ConfigError("--threads must be at least 1");
  const fs::path dir = flags.out.empty() ? fs::path("out") : fs::path(flags.out);
  prepare_dir(dir);
  nlohmann::json echo{{"state", state_path}, {"lmax", lmax}, {"threads", threads}};
  RunManifest manifest(dir, "infolattice", echo);
  manifest.write();

  std::vector<LatticeSnapshot> lattice{{0.0, full_info_lattice(state, lmax, threads)}};
  const std::vector<ScaleRecord> profile{{0.0, info_per_scale(lattice.front().lattice)}};
  const std::vector<double> times{0.0};
  const std::vector<std::vector<double>> entropy{bipartite_entropy_profile(state)};
  emit_file(manifest, dir, "infolattice.csv", [&](std::ostream& os) { write_info_lattice_csv(os, lattice); });
  emit_file(manifest, dir, "info_per_scale.csv", [&](std::ostream& os) { write_scale_profile_csv(os, profile); });
  emit_file(manifest, dir, "entropy.csv", [&](std::ostream& os) { write_link_table_csv(os, "S", times, entropy); });
  return finish_run(manifest, true, {}, false);
}

int cmd_make_state(const std::string& kind, int sites, double ga, double ma, const std::string& output) {
  if (sites < 2 || sites > kMaxSites) throw ConfigError("--sites must lie in 2.." + std::to_string(kMaxSites));
  std::optional<StateVector> state;
  if (kind == "neel") {
    state = neel_state(build_sector_basis(sites, sites % 2 == 0 ? 0 : 1));
  } else if (kind == "bell" || kind == "ghz") {
    // bell: (|up up> + |down down>)/sqrt2 on sites 1,2 with the rest up; ghz on all sites.
    auto basis = build_sector_basis(sites, std::nullopt);
    const Config all = (Config{1} << sites) - 1;
    const Config flipped = kind == "bell" ? (basis->site_mask(1) | basis->site_mask(2)) : all;
    Vec v = Vec::Zero(static_cast<Eigen::Index>(basis->dim()));
    v[0] = 1.0;
    v[static_cast<Eigen::Index>(flipped)] = 1.0;
    state = StateVector(basis, v);
  } else if (kind == "vacuum") {
    ModelParams params{sites, ga, ma};
    params.validate();
    state = solve_vacuum(params, {}).states.front();
  } else {
    throw ConfigError("unknown state kind '" + kind + "'");
  }
  save_state(output, *state);
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool evolving) {
  cmd->add_option("--config", flags.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "output directory (overrides [output] dir)");
  cmd->add_option("--seed", flags.seed, "Lanczos start-vector seed");
  if (evolving) {
    cmd->add_option("--threads", flags.threads, "worker threads for information lattices");
    cmd->add_option("--lmax", flags.lmax, "largest scale of the information lattice");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-lattice analysis of the lattice Schwinger model"};
  app.set_version_flag("--version", tool_version() + " (" + git_hash() + ")");
  app.require_subcommand(1);

  CommonFlags spectrum_flags, scatter_flags, string_flags, info_flags;
  std::string preset, state_path, kind, output;
  int sites = 0;
  double ga = 1.0, ma = 0.0;

  auto* spectrum = app.add_subcommand("spectrum", "lowest levels with meson classification");
  add_common(spectrum, spectrum_flags, false);
  auto* scatter = app.add_subcommand("scatter", "meson wave-packet collision");
  add_common(scatter, scatter_flags, true);
  scatter->add_option("--preset", preset, "named run set (fig7-desk)");
  auto* string = app.add_subcommand("string", "string-breaking quench with external charges");
  add_common(string, string_flags, true);
  auto* info = app.add_subcommand("infolattice", "information lattice of a saved state");
  info->add_option("--state", state_path, "state file")->required();
  info->add_option("--out", info_flags.out, "output directory");
  info->add_option("--lmax", info_flags.lmax, "largest scale");
  info->add_option("--threads", info_flags.threads, "worker threads");
  auto* make = app.add_subcommand("make-state", "write a reference state file");
  make->add_option("--kind", kind, "neel, bell, ghz or vacuum")->required();
  make->add_option("--sites", sites, "number of sites")->required();
  make->add_option("--ga", ga, "coupling (vacuum only)");
  make->add_option("--ma", ma, "mass (vacuum only)");
  make->add_option("--output", output, "state file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*spectrum) return cmd_spectrum(spectrum_flags);
    if (*scatter) return cmd_scatter(scatter_flags, preset);
    if (*string) return cmd_string(string_flags);
    if (*info) return cmd_infolattice(state_path, info_flags);
    if (*make) return cmd_make_state(kind, sites, ga, ma, output);
  } catch (const ConfigError& e) {
    std::cerr << "ilat: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidSectorError& e) {
    std::cerr << "ilat: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const WindowError& e) {
    std::cerr << "ilat: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SizeError& e) {
    std::cerr << "ilat: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "ilat: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "ilat: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
