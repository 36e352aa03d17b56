#include "ilat/config.hpp"

#include "ilat/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ilat {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value)) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
  return value;
}

// Drops "; ..." and "# ..." tails that follow whitespace, so values may carry
// trailing comments.
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && std::isspace(static_cast<unsigned char>(line[i - 1]))) {
        line.erase(i);
        break;
      }
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  std::istringstream is(strip_inline_comments(text));
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ConfigFile file;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' appears outside any [section]");
    }
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError("nested keys are not supported");
      file.values_[section][key] = trim(value.data());
    }
    file.values_[section];  // keep empty sections visible to the schema check
  }
  return file;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

void ConfigFile::apply_env_overrides(const Schema& schema, const std::string& prefix) {
  for (const auto& [section, keys] : schema) {
    for (const auto& key : keys) {
      const std::string name = prefix + upper(section) + "_" + upper(key);
      if (const char* value = std::getenv(name.c_str())) values_[section][key] = trim(value);
    }
  }
}

void ConfigFile::check_schema(const Schema& schema) const {
  for (const auto& [section, keys] : values_) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : keys) {
      if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return raw(section, key).has_value();
}

void ConfigFile::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

std::optional<std::string> ConfigFile::raw(const std::string& section, const std::string& key) const {
  auto s = values_.find(section);
  if (s == values_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double fallback) const {
  auto v = raw(section, key);
  return v ? parse_double(*v, section + "." + key) : fallback;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  int value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(section + "." + key + ": expected an integer, got '" + *v + "'");
  }
  return value;
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = upper(trim(*v));
  if (t == "TRUE" || t == "YES" || t == "1" || t == "ON") return true;
  if (t == "FALSE" || t == "NO" || t == "0" || t == "OFF") return false;
  throw ConfigError(section + "." + key + ": expected a boolean, got '" + *v + "'");
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  return raw(section, key).value_or(fallback);
}

std::vector<double> ConfigFile::get_list(const std::string& section, const std::string& key,
                                         const std::vector<double>& fallback) const {
  auto v = raw(section, key);
  if (!v) return fallback;
  std::vector<double> out;
  if (trim(*v).empty()) return out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, section + "." + key));
  return out;
}

nlohmann::json ConfigFile::echo() const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [section, keys] : values_) {
    doc[section] = nlohmann::json::object();
    for (const auto& [key, value] : keys) doc[section][key] = value;
  }
  return doc;
}

namespace {

const std::set<std::string> kRunKeys{"t_end",      "dt",   "sample_every", "lmax",    "krylov_dim",
                                     "krylov_tol", "seed", "threads",      "lanczos_tol", "snapshot_times"};
const std::set<std::string> kModelKeys{"sites", "ga", "ma"};
const std::set<std::string> kOutputKeys{"dir", "save_state"};

ModelParams parse_model(const ConfigFile& file, ModelParams model) {
  model.sites = file.get_int("model", "sites", model.sites);
  model.ga = file.get_double("model", "ga", model.ga);
  model.ma = file.get_double("model", "ma", model.ma);
  try {
    model.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }
  return model;
}

template <class Cfg>
void parse_run(const ConfigFile& file, Cfg& cfg) {
  cfg.t_end = file.get_double("run", "t_end", cfg.t_end);
  cfg.dt = file.get_double("run", "dt", cfg.dt);
  cfg.sample_every = file.get_double("run", "sample_every", cfg.sample_every);
  cfg.max_scale = file.get_int("run", "lmax", cfg.max_scale);
  cfg.krylov.krylov_dim = file.get_int("run", "krylov_dim", cfg.krylov.krylov_dim);
  cfg.krylov.tol = file.get_double("run", "krylov_tol", cfg.krylov.tol);
  cfg.lanczos.tol = file.get_double("run", "lanczos_tol", cfg.lanczos.tol);
  cfg.lanczos.seed = static_cast<std::uint64_t>(file.get_int("run", "seed", static_cast<int>(cfg.lanczos.seed)));
  cfg.threads = file.get_int("run", "threads", cfg.threads);
  cfg.snapshot_times = file.get_list("run", "snapshot_times", cfg.snapshot_times);
  if (cfg.krylov.krylov_dim < 2) throw ConfigError("run.krylov_dim must be at least 2");
  if (cfg.threads < 1) throw ConfigError("run.threads must be at least 1");
}

template <class Cfg>
void validate_as_config(const Cfg& cfg) {
  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

void SpectrumConfig::validate() const {
  model.validate();
  if (levels < 1) throw ConfigError("spectrum.levels must be at least 1");
  if (shift < 0.0) throw ConfigError("spectrum.shift must be non-negative");
  if (!(lanczos.tol > 0.0)) throw ConfigError("spectrum.tol must be positive");
  if (model.sites < 3) throw ConfigError("spectrum classification needs at least 3 sites");
}

const ConfigFile::Schema& spectrum_schema() {
  static const ConfigFile::Schema schema{
      {"model", kModelKeys},
      {"spectrum", {"levels", "tol", "shift", "gap_epsilon", "p2_slack", "overlap_floor", "max_restarts"}},
      {"run", {"seed"}},
      {"output", kOutputKeys}};
  return schema;
}

const ConfigFile::Schema& scatter_schema() {
  static const ConfigFile::Schema schema{{"model", kModelKeys},
                                         {"packets", {"centers", "momenta", "widths"}},
                                         {"run", kRunKeys},
                                         {"analysis", {"cut_n_lo", "cut_n_hi", "cut_t_lo", "cut_t_hi"}},
                                         {"output", kOutputKeys}};
  return schema;
}

const ConfigFile::Schema& string_schema() {
  static const ConfigFile::Schema schema{
      {"model", kModelKeys},
      {"background", {"charge", "speed", "center_left", "center_right", "t_remove", "halt_at_edges"}},
      {"run", kRunKeys},
      {"analysis", {"field_lo", "field_hi", "info_n_lo", "info_n_hi", "peak_exclude_below"}},
      {"output", kOutputKeys}};
  return schema;
}

SpectrumConfig parse_spectrum_config(const ConfigFile& file) {
  file.check_schema(spectrum_schema());
  SpectrumConfig cfg;
  cfg.model = parse_model(file, cfg.model);
  cfg.levels = file.get_int("spectrum", "levels", cfg.levels);
  cfg.lanczos.tol = file.get_double("spectrum", "tol", cfg.lanczos.tol);
  cfg.lanczos.max_restarts = file.get_int("spectrum", "max_restarts", cfg.lanczos.max_restarts);
  cfg.lanczos.seed = static_cast<std::uint64_t>(file.get_int("run", "seed", 0));
  cfg.shift = file.get_double("spectrum", "shift", cfg.shift);
  cfg.classify.gap_epsilon = file.get_double("spectrum", "gap_epsilon", cfg.classify.gap_epsilon);
  cfg.classify.p2_slack = file.get_double("spectrum", "p2_slack", cfg.classify.p2_slack);
  cfg.classify.overlap_floor = file.get_double("spectrum", "overlap_floor", cfg.classify.overlap_floor);
  validate_as_config(cfg);
  return cfg;
}

void scale_scattering_defaults(ScatteringConfig& cfg) {
  const double n = cfg.model.sites;
  const double k = cfg.packets.empty() ? 0.7 : std::abs(cfg.packets.front().momentum);
  cfg.packets = {{std::round(n / 4.0), k, 1.0}, {std::round(3.0 * n / 4.0), -k, 1.0}};
  cfg.t_end = n;
  // Reference window 15 <= n < 25, 15 < t < 35 on a 40-site chain, scaled to N.
  cfg.cut_n_lo = std::round(15.0 * n / 40.0);
  cfg.cut_n_hi = std::round(25.0 * n / 40.0) - 0.5;
  cfg.cut_t_lo = std::round(15.0 * n / 40.0);
  cfg.cut_t_hi = std::round(35.0 * n / 40.0);
  cfg.max_scale = std::min(9, cfg.model.sites - 1);
}

ScatteringConfig parse_scattering_config(const ConfigFile& file) {
  file.check_schema(scatter_schema());
  ScatteringConfig cfg;
  cfg.model = parse_model(file, cfg.model);
  scale_scattering_defaults(cfg);

  std::vector<double> centers, momenta, widths;
  for (const auto& p : cfg.packets) {
    centers.push_back(p.center);
    momenta.push_back(p.momentum);
    widths.push_back(p.width);
  }
  centers = file.get_list("packets", "centers", centers);
  momenta = file.get_list("packets", "momenta", momenta);
  widths = file.get_list("packets", "widths", widths);
  if (widths.size() == 1 && centers.size() > 1) widths.assign(centers.size(), widths.front());
  if (centers.size() != momenta.size() || centers.size() != widths.size()) {
    throw ConfigError("packets.centers, packets.momenta and packets.widths must have equal lengths");
  }
  cfg.packets.clear();
  for (std::size_t i = 0; i < centers.size(); ++i) cfg.packets.push_back({centers[i], momenta[i], widths[i]});

  parse_run(file, cfg);
  cfg.cut_n_lo = file.get_double("analysis", "cut_n_lo", cfg.cut_n_lo);
  cfg.cut_n_hi = file.get_double("analysis", "cut_n_hi", cfg.cut_n_hi);
  cfg.cut_t_lo = file.get_double("analysis", "cut_t_lo", cfg.cut_t_lo);
  cfg.cut_t_hi = file.get_double("analysis", "cut_t_hi", cfg.cut_t_hi);
  validate_as_config(cfg);
  return cfg;
}

StringConfig parse_string_config(const ConfigFile& file) {
  file.check_schema(string_schema());
  StringConfig cfg;
  cfg.model = parse_model(file, cfg.model);
  cfg.max_scale = std::min(9, cfg.model.sites - 1);
  center_string_defaults(cfg);
  auto& bg = cfg.background;
  bg.charge = file.get_double("background", "charge", bg.charge);
  bg.speed = file.get_double("background", "speed", bg.speed);
  bg.center_left = file.get_int("background", "center_left", bg.center_left);
  bg.center_right = file.get_int("background", "center_right", bg.center_right);
  if (file.has("background", "t_remove") && !file.get_string("background", "t_remove", "").empty()) {
    bg.t_remove = file.get_double("background", "t_remove", 0.0);
  }
  bg.halt_at_edges = file.get_bool("background", "halt_at_edges", bg.halt_at_edges);

  parse_run(file, cfg);
  cfg.field_lo = file.get_int("analysis", "field_lo", cfg.field_lo);
  cfg.field_hi = file.get_int("analysis", "field_hi", cfg.field_hi);
  cfg.info_n_lo = file.get_double("analysis", "info_n_lo", cfg.info_n_lo);
  cfg.info_n_hi = file.get_double("analysis", "info_n_hi", cfg.info_n_hi);
  cfg.peak_exclude_below = file.get_int("analysis", "peak_exclude_below", cfg.peak_exclude_below);
  validate_as_config(cfg);
  return cfg;
}

OutputSettings parse_output_settings(const ConfigFile& file) {
  OutputSettings out;
  out.dir = file.get_string("output", "dir", out.dir.string());
  out.save_state = file.get_bool("output", "save_state", out.save_state);
  return out;
}

}  // namespace ilat
