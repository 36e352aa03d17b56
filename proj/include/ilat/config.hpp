#pragma once

// Run configuration files.
//
// INI format with [section] headers and `key = value` lines; '#' and ';'
// start comments, at the start of a line or after whitespace. Lists are comma separated. Every key may be overridden by
// an environment variable ILAT_<SECTION>_<KEY> (upper case), e.g.
// ILAT_MODEL_GA=0.5 or ILAT_BACKGROUND_T_REMOVE=12. Unknown sections or keys
// are rejected.
//
//   [model]       sites, ga, ma
//   [background]  charge, speed, center_left, center_right, t_remove, halt_at_edges
//   [packets]     centers, momenta, widths
//   [run]         t_end, dt, sample_every, lmax, krylov_dim, krylov_tol,
//                 lanczos_tol, seed, threads, snapshot_times
//   [analysis]    cut_n_lo, cut_n_hi, cut_t_lo, cut_t_hi            (scatter)
//                 field_lo, field_hi, info_n_lo, info_n_hi,
//                 peak_exclude_below                                (string)
//   [spectrum]    levels, tol, shift, gap_epsilon, p2_slack, overlap_floor,
//                 max_restarts
//   [output]      dir, save_state

#include "ilat/protocols.hpp"
#include "ilat/spectral.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ilat {

class ConfigFile {
 public:
  using Schema = std::map<std::string, std::set<std::string>>;

  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile parse(const std::string& text);

  // Reads ILAT_<SECTION>_<KEY> variables for every key of the schema.
  void apply_env_overrides(const Schema& schema, const std::string& prefix = "ILAT_");
  void check_schema(const Schema& schema) const;

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;

  nlohmann::json echo() const;

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> values_;
};

struct OutputSettings {
  std::filesystem::path dir = "out";
  bool save_state = false;
};

struct SpectrumConfig {
  ModelParams model{8, 1.0, 1e-5};
  int levels = 20;
  // 0 selects default_deflation_shift.
  double shift = 0.0;
  LanczosOptions lanczos;
  ClassifyOptions classify;

  void validate() const;
};

const ConfigFile::Schema& spectrum_schema();
const ConfigFile::Schema& scatter_schema();
const ConfigFile::Schema& string_schema();

SpectrumConfig parse_spectrum_config(const ConfigFile& file);
ScatteringConfig parse_scattering_config(const ConfigFile& file);
StringConfig parse_string_config(const ConfigFile& file);
OutputSettings parse_output_settings(const ConfigFile& file);

// Packets at N/4 and 3N/4 moving toward each other, t_end = N, and the
// central I^cut window scaled from a 40-site chain.
void scale_scattering_defaults(ScatteringConfig& cfg);

}  // namespace ilat
