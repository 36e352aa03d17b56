#pragma once

// File formats. All tables are UTF-8 CSV with a mandatory header row and '.'
// as decimal separator; numbers use the shortest round-trip representation,
// and half-integer lattice positions are written as decimals (1.5).

#include "ilat/errors.hpp"
#include "ilat/info_lattice.hpp"
#include "ilat/protocols.hpp"
#include "ilat/spectral.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <iosfwd>
#include <string>
#include <vector>

namespace ilat {

std::string format_number(double value);

// t,n,l,i
void write_info_lattice_csv(std::ostream& os, std::span<const LatticeSnapshot> snapshots);
// t,l,value
void write_scale_profile_csv(std::ostream& os, std::span<const ScaleRecord> records);
// t,n,<column> with one row per (t, n), n = 1..N-1. With with_change an extra
// column d<column> holds the value minus its value in the first row block.
void write_link_table_csv(std::ostream& os, const std::string& column, std::span<const double> times,
                          const std::vector<std::vector<double>>& table, bool with_change = false);
// t,<column>
void write_series_csv(std::ostream& os, const std::string& column, std::span<const double> times,
                      std::span<const double> values);
// t,l_max (empty cell when no peak)
void write_peak_csv(std::ostream& os, std::span<const double> times, std::span<const std::optional<int>> peaks);
// index,energy,gap,p2,overlap_V,overlap_S,tag,p_mean
void write_spectrum_csv(std::ostream& os, const EigenResult& spectrum, std::span<const StateLabel> labels);

// State snapshot: JSON object
//   {"format": "ilat-state", "version": 1, "N": .., "sector": int|null,
//    "bit_order": "site1-msb,bit0-up", "dim": .., "amplitudes": [[re, im], ...]}
// with amplitudes in basis order.
inline constexpr const char* kStateFormat = "ilat-state";
inline constexpr const char* kBitOrder = "site1-msb,bit0-up";

nlohmann::json state_to_json(const StateVector& state);
// Throws StateFileError on a malformed header or amplitude count.
StateVector state_from_json(const nlohmann::json& doc);
void save_state(const std::filesystem::path& path, const StateVector& state);
StateVector load_state(const std::filesystem::path& path);

class StateFileError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

std::string sha256_file(const std::filesystem::path& path);

std::string tool_version();
std::string git_hash();

// Written first with complete = false and rewritten when a run finishes, so a
// run that dies midway leaves an incomplete manifest behind.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string command, nlohmann::json config);

  void add_output(const std::string& relative_name);
  void finish(bool complete, const std::string& failure = {});
  void write() const;
  const nlohmann::json& config() const { return config_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
  nlohmann::json config_;
  std::string started_;
  std::string finished_;
  double wall_seconds_ = 0.0;
  std::chrono::steady_clock::time_point clock_start_;
  std::vector<std::string> outputs_;
  bool complete_ = false;
  std::string failure_;
};

// Writes the file through a stream callback and registers it in the manifest.
void emit_file(RunManifest& manifest, const std::filesystem::path& dir, const std::string& name,
               const std::function<void(std::ostream&)>& body);

void emit_scattering(RunManifest& manifest, const std::filesystem::path& dir, const ScatteringArtifacts& run,
                     const std::string& suffix = {});
void emit_string(RunManifest& manifest, const std::filesystem::path& dir, const StringArtifacts& run);

}  // namespace ilat
