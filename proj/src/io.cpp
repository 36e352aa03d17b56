#include "ilat/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#ifndef ILAT_GIT_HASH
#define ILAT_GIT_HASH "unknown"
#endif

namespace ilat {

namespace fs = std::filesystem;

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_info_lattice_csv(std::ostream& os, std::span<const LatticeSnapshot> snapshots) {
  os << "t,n,l,i\n";
  for (const auto& snap : snapshots) {
    snap.lattice.for_each([&](const Label& label, double v) {
      os << format_number(snap.t) << ',' << format_number(label.n()) << ',' << label.ell << ','
         << format_number(v) << '\n';
    });
  }
}

void write_scale_profile_csv(std::ostream& os, std::span<const ScaleRecord> records) {
  os << "t,l,value\n";
  for (const auto& rec : records) {
    for (std::size_t ell = 0; ell < rec.profile.size(); ++ell) {
      os << format_number(rec.t) << ',' << ell << ',' << format_number(rec.profile[ell]) << '\n';
    }
  }
}

void write_link_table_csv(std::ostream& os, const std::string& column, std::span<const double> times,
                          const std::vector<std::vector<double>>& table, bool with_change) {
  os << "t,n," << column;
  if (with_change) os << ",d" << column;
  os << '\n';
  for (std::size_t i = 0; i < times.size() && i < table.size(); ++i) {
    for (std::size_t n = 0; n < table[i].size(); ++n) {
      os << format_number(times[i]) << ',' << (n + 1) << ',' << format_number(table[i][n]);
      if (with_change) os << ',' << format_number(table[i][n] - table.front()[n]);
      os << '\n';
    }
  }
}

void write_series_csv(std::ostream& os, const std::string& column, std::span<const double> times,
                      std::span<const double> values) {
  os << "t," << column << '\n';
  for (std::size_t i = 0; i < times.size() && i < values.size(); ++i) {
    os << format_number(times[i]) << ',' << format_number(values[i]) << '\n';
  }
}

void write_peak_csv(std::ostream& os, std::span<const double> times, std::span<const std::optional<int>> peaks) {
  os << "t,l_max\n";
  for (std::size_t i = 0; i < times.size() && i < peaks.size(); ++i) {
    os << format_number(times[i]) << ',';
    if (peaks[i]) os << *peaks[i];
    os << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const EigenResult& spectrum, std::span<const StateLabel> labels) {
  os << "index,energy,gap,p2,overlap_V,overlap_S,tag,p_mean\n";
  for (std::size_t i = 0; i < spectrum.energies.size() && i < labels.size(); ++i) {
    const auto& l = labels[i];
    os << i << ',' << format_number(spectrum.energies[i]) << ',' << format_number(l.gap) << ','
       << format_number(l.p2) << ',' << format_number(l.overlap_vector) << ','
       << format_number(l.overlap_scalar) << ',' << to_string(l.tag) << ',' << format_number(l.p_mean)
       << '\n';
  }
}

nlohmann::json state_to_json(const StateVector& state) {
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < state.amplitudes().size(); ++i) {
    amps.push_back({state.amplitudes()[i].real(), state.amplitudes()[i].imag()});
  }
  nlohmann::json doc;
  doc["format"] = kStateFormat;
  doc["version"] = 1;
  doc["N"] = state.sites();
  doc["sector"] = state.basis().sector() ? nlohmann::json(*state.basis().sector()) : nlohmann::json(nullptr);
  doc["bit_order"] = kBitOrder;
  doc["dim"] = state.basis().dim();
  doc["amplitudes"] = std::move(amps);
  return doc;
}

StateVector state_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != kStateFormat) {
      throw StateFileError("not an ilat state file");
    }
    if (doc.at("bit_order").get<std::string>() != kBitOrder) {
      throw StateFileError("unsupported bit order '" + doc.at("bit_order").get<std::string>() + "'");
    }
    const int n = doc.at("N").get<int>();
    std::optional<int> sector;
    if (!doc.at("sector").is_null()) sector = doc.at("sector").get<int>();
    auto basis = build_sector_basis(n, sector);
    const auto dim = doc.at("dim").get<std::size_t>();
    const auto& amps = doc.at("amplitudes");
    if (dim != basis->dim() || !amps.is_array() || amps.size() != dim) {
      throw StateFileError("amplitude count does not match the declared basis dimension " +
                           std::to_string(basis->dim()));
    }
    Vec v(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      const auto& pair = amps[i];
      if (!pair.is_array() || pair.size() != 2) throw StateFileError("amplitudes must be [re, im] pairs");
      v[static_cast<Eigen::Index>(i)] = cplx{pair[0].get<double>(), pair[1].get<double>()};
    }
    if (std::abs(v.norm() - 1.0) > 1e-8) throw StateFileError("stored state is not normalized");
    return StateVector(basis, std::move(v));
  } catch (const StateFileError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw StateFileError(std::string("malformed state file: ") + e.what());
  } catch (const Error& e) {
    throw StateFileError(std::string("invalid state header: ") + e.what());
  }
}

void save_state(const fs::path& path, const StateVector& state) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << state_to_json(state).dump() << '\n';
}

StateVector load_state(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw StateFileError("cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw StateFileError(std::string("state file is not valid JSON: ") + e.what());
  }
  return state_from_json(doc);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(is.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::string tool_version() { return "0.1.0"; }
std::string git_hash() { return ILAT_GIT_HASH; }

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

RunManifest::RunManifest(fs::path dir, std::string command, nlohmann::json config)
    : dir_(std::move(dir)),
      command_(std::move(command)),
      config_(std::move(config)),
      started_(utc_now()),
      clock_start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_output(const std::string& relative_name) { outputs_.push_back(relative_name); }

void RunManifest::finish(bool complete, const std::string& failure) {
  complete_ = complete;
  failure_ = failure;
  finished_ = utc_now();
  wall_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start_).count();
}

void RunManifest::write() const {
  nlohmann::json doc;
  doc["command"] = command_;
  doc["config"] = config_;
  doc["tool_version"] = tool_version();
  doc["git_hash"] = git_hash();
  doc["started"] = started_;
  doc["finished"] = finished_.empty() ? nlohmann::json(nullptr) : nlohmann::json(finished_);
  doc["wall_time_s"] = wall_seconds_;
  doc["complete"] = complete_;
  if (!failure_.empty()) doc["failure"] = failure_;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& name : outputs_) {
    const fs::path p = dir_ / name;
    files.push_back({{"file", name}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
  }
  doc["outputs"] = std::move(files);
  std::ofstream os(dir_ / "manifest.json");
  if (!os) throw Error("cannot write manifest in " + dir_.string());
  os << doc.dump(2) << '\n';
}

void emit_file(RunManifest& manifest, const fs::path& dir, const std::string& name,
               const std::function<void(std::ostream&)>& body) {
  std::ofstream os(dir / name);
  if (!os) throw Error("cannot write " + (dir / name).string());
  body(os);
  os.close();
  manifest.add_output(name);
}

void emit_scattering(RunManifest& manifest, const fs::path& dir, const ScatteringArtifacts& run,
                     const std::string& suffix) {
  emit_file(manifest, dir, "entropy" + suffix + ".csv",
            [&](std::ostream& os) { write_link_table_csv(os, "S", run.times, run.entropy); });
  emit_file(manifest, dir, "infolattice" + suffix + ".csv",
            [&](std::ostream& os) { write_info_lattice_csv(os, run.snapshots); });
  emit_file(manifest, dir, "icut" + suffix + ".csv",
            [&](std::ostream& os) { write_scale_profile_csv(os, run.icut); });
}

void emit_string(RunManifest& manifest, const fs::path& dir, const StringArtifacts& run) {
  emit_file(manifest, dir, "field.csv", [&](std::ostream& os) { write_link_table_csv(os, "L", run.times, run.field, true); });
  emit_file(manifest, dir, "entropy.csv",
            [&](std::ostream& os) { write_link_table_csv(os, "S", run.times, run.entropy, true); });
  emit_file(manifest, dir, "infolattice.csv", [&](std::ostream& os) { write_info_lattice_csv(os, run.snapshots); });
  emit_file(manifest, dir, "ibar.csv", [&](std::ostream& os) { write_scale_profile_csv(os, run.ibar); });
  emit_file(manifest, dir, "mean_field.csv",
            [&](std::ostream& os) { write_series_csv(os, "Lbar_shift", run.times, run.mean_field_shift); });
  emit_file(manifest, dir, "lmax.csv", [&](std::ostream& os) { write_peak_csv(os, run.times, run.peak); });
}

}  // namespace ilat
