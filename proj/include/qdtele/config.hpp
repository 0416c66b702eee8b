#pragma once

// JSON experiment configuration (schema "qdtele-config/1").
//
// Every physical quantity carries its unit in the key name. Dephasing times may
// be null to switch the process off; "window_ps" may be the string "full".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdtele/bsm.hpp"
#include "qdtele/noise.hpp"
#include "qdtele/qdsource.hpp"
#include "qdtele/teleport.hpp"

namespace qdtele::config {

using json = nlohmann::json;

inline constexpr const char* kSchema = "qdtele-config/1";

enum class Mode { Visibility, Teleport, Sweep, Tomography };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Visibility: return "visibility";
    case Mode::Teleport: return "teleport";
    case Mode::Sweep: return "sweep";
    case Mode::Tomography: return "tomography";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : {Mode::Visibility, Mode::Teleport, Mode::Sweep, Mode::Tomography})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct TomographySettings {
  std::uint64_t shots_per_basis = 1000000;
  std::size_t runs = 10000;
  PolLabel input = PolLabel::H;
  std::optional<std::filesystem::path> counts_csv;  // measured counts instead of simulated ones
};

struct SweepSettings {
  Fig5Defaults defaults;
  std::vector<Fig5Scenario> scenarios;
};

struct ExperimentConfig {
  Mode mode = Mode::Teleport;
  TeleportConfig teleport;
  ParameterBand band;
  bool has_band = false;
  std::vector<double> windows_ps;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  TomographySettings tomography;
  SweepSettings sweep;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(Violations v)
      : std::runtime_error(v.empty() ? "invalid config" : v.front().path + ": " + v.front().message),
        violations_(std::move(v)) {}
  const Violations& violations() const { return violations_; }

 private:
  Violations violations_;
};

namespace detail {

// Reads typed fields and records a violation per problem instead of stopping at the first.
class Reader {
 public:
  explicit Reader(Violations& out) : out_(out) {}

  const json* child(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object()) {
      out_.push_back({path, "expected an object"});
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) out_.push_back({join(path, key), "missing required field"});
      return nullptr;
    }
    return &*it;
  }

  void number(const json& obj, const std::string& key, const std::string& path, double& dst, bool required = false,
              bool null_is_infinite = false) {
    const json* v = child(obj, key, path, required);
    if (!v) return;
    if (v->is_null() && null_is_infinite) {
      dst = std::numeric_limits<double>::infinity();
    } else if (v->is_number()) {
      dst = v->get<double>();
    } else {
      out_.push_back({join(path, key), null_is_infinite ? "expected a number or null" : "expected a number"});
    }
  }

  void optional_number(const json& obj, const std::string& key, const std::string& path, std::optional<double>& dst) {
    const json* v = child(obj, key, path, false);
    if (!v || v->is_null()) return;
    if (v->is_number())
      dst = v->get<double>();
    else
      out_.push_back({join(path, key), "expected a number or null"});
  }

  template <typename Int>
  void integer(const json& obj, const std::string& key, const std::string& path, Int& dst) {
    const json* v = child(obj, key, path, false);
    if (!v) return;
    if (v->is_number_integer() && (std::is_signed_v<Int> || v->get<long long>() >= 0))
      dst = v->get<Int>();
    else
      out_.push_back({join(path, key), "expected a non-negative integer"});
  }

  void boolean(const json& obj, const std::string& key, const std::string& path, bool& dst) {
    const json* v = child(obj, key, path, false);
    if (!v) return;
    if (v->is_boolean())
      dst = v->get<bool>();
    else
      out_.push_back({join(path, key), "expected true or false"});
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path,
                                    bool required = false) {
    const json* v = child(obj, key, path, required);
    if (!v) return std::nullopt;
    if (v->is_string()) return v->get<std::string>();
    out_.push_back({join(path, key), "expected a string"});
    return std::nullopt;
  }

  void add(std::string path, std::string message) { out_.push_back({std::move(path), std::move(message)}); }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

 private:
  Violations& out_;
};

inline QdParams read_qd(Reader& r, const json& obj, const std::string& path) {
  QdParams p;
  r.number(obj, "tau_x_ps", path, p.tau_x_ps, true);
  r.number(obj, "tau_xx_ps", path, p.tau_xx_ps, true);
  r.number(obj, "fss_uev", path, p.fss_uev, true);
  r.number(obj, "t2_ps", path, p.t2_ps);
  r.number(obj, "tau_hv_ns", path, p.tau_hv_ns, false, true);
  r.number(obj, "tau_ss_ns", path, p.tau_ss_ns, false, true);
  r.number(obj, "linewidth_ghz", path, p.linewidth_ghz);
  r.optional_number(obj, "fourier_limit_ghz", path, p.fourier_limit_ghz);
  r.number(obj, "g2", path, p.g2);
  r.number(obj, "brightness", path, p.brightness);
  return p;
}

inline NoiseBudget read_noise(Reader& r, const json& obj, const std::string& path) {
  NoiseBudget b;
  r.number(obj, "signal_rate_hz", path, b.signal_rate_hz);
  r.number(obj, "raman_rate_hz", path, b.raman_rate_hz);
  r.integer(obj, "converters", path, b.converters);
  r.number(obj, "dark_rate_hz", path, b.dark_rate_hz);
  r.integer(obj, "bsm_detectors", path, b.bsm_detectors);
  r.number(obj, "receiver_dark_rate_hz", path, b.receiver_dark_rate_hz);
  r.integer(obj, "receiver_detectors", path, b.receiver_detectors);
  r.number(obj, "repetition_rate_hz", path, b.repetition_rate_hz);
  return b;
}

inline void read_pair(Reader& r, const json& obj, const std::string& key, const std::string& path,
                      std::array<double, 2>& dst) {
  const json* v = r.child(obj, key, path, false);
  if (!v) return;
  if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
    dst = {(*v)[0].get<double>(), (*v)[1].get<double>()};
  } else {
    r.add(Reader::join(path, key), "expected an array of two numbers");
  }
}

inline Fig5Scenario read_scenario(Reader& r, const json& obj, const std::string& path) {
  Fig5Scenario s;
  if (auto l = r.string(obj, "label", path, true)) s.label = *l;
  read_pair(r, obj, "linewidth_ghz", path, s.linewidth_ghz);
  read_pair(r, obj, "tau_xx_ps", path, s.tau_xx_ps);
  r.number(obj, "fss_uev", path, s.fss_uev);
  r.number(obj, "g2", path, s.g2);
  r.optional_number(obj, "visibility_override", path, s.visibility_override);
  return s;
}

inline std::vector<double> read_windows(Reader& r, const json& v, const std::string& path) {
  std::vector<double> out;
  if (!v.is_array() || v.empty()) {
    r.add(path, "expected a non-empty array of window widths in ps");
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number() || !(v[i].get<double>() > 0.0)) {
      r.add(path + "[" + std::to_string(i) + "]", "window must be a number > 0");
      continue;
    }
    out.push_back(v[i].get<double>());
  }
  if (!std::is_sorted(out.begin(), out.end())) r.add(path, "windows must be sorted ascending");
  return out;
}

}  // namespace detail

// Parses and validates; collects every violation. Never touches the filesystem beyond the
// caller-provided document.
inline ExperimentConfig from_json(const json& doc, Violations& violations) {
  using detail::Reader;
  Reader r(violations);
  ExperimentConfig cfg;
  if (!doc.is_object()) {
    r.add("$", "config root must be an object");
    return cfg;
  }
  if (auto schema = r.string(doc, "schema", "", true); schema && *schema != kSchema)
    r.add("schema", "unsupported schema '" + *schema + "', expected '" + kSchema + "'");
  if (auto mode = r.string(doc, "mode", "", true)) {
    if (auto m = parse_mode(*mode))
      cfg.mode = *m;
    else
      r.add("mode", "unknown mode '" + *mode + "'");
  }
  r.integer(doc, "seed", "", cfg.seed);
  if (auto out = r.string(doc, "output_dir", "")) cfg.output_dir = *out;

  TeleportConfig& t = cfg.teleport;
  if (const json* q = r.child(doc, "qd1", "", true)) t.qd1 = detail::read_qd(r, *q, "qd1");
  if (const json* q = r.child(doc, "qd2", "", true)) t.qd2 = detail::read_qd(r, *q, "qd2");
  if (const json* i = r.child(doc, "interference", "", false)) r.number(*i, "detuning_ghz", "interference", t.detuning_ghz);
  if (const json* n = r.child(doc, "noise", "", false)) t.noise = detail::read_noise(r, *n, "noise");
  if (const json* w = r.child(doc, "windows_ps", "", false)) cfg.windows_ps = detail::read_windows(r, *w, "windows_ps");

  if (const json* tp = r.child(doc, "teleport", "", cfg.mode == Mode::Teleport)) {
    if (auto in = r.string(*tp, "input", "teleport")) {
      try {
        t.input = basis_state(*in);
      } catch (const InputError&) {
        r.add("teleport.input", "unknown polarization label '" + *in + "'");
      }
    }
    if (auto o = r.string(*tp, "outcome", "teleport")) {
      try {
        t.outcome = parse_bell_outcome(*o);
      } catch (const InputError&) {
        r.add("teleport.outcome", "unknown Bell outcome '" + *o + "'");
      }
    }
    if (const json* w = r.child(*tp, "window_ps", "teleport", false)) {
      if (w->is_string() && w->get<std::string>() == "full")
        t.window_ps = std::numeric_limits<double>::infinity();
      else if (w->is_number())
        t.window_ps = w->get<double>();
      else
        r.add("teleport.window_ps", "expected a number or \"full\"");
    }
    r.number(*tp, "mode_overlap_mp", "teleport", t.mode_overlap_mp);
    r.optional_number(*tp, "coincidence_ratio_k", "teleport", t.coincidence_ratio_k);
    r.optional_number(*tp, "visibility_override", "teleport", t.visibility_override);
    r.boolean(*tp, "apply_correction", "teleport", t.apply_correction);
    if (const json* b = r.child(*tp, "band", "teleport", false)) {
      std::array<double, 2> mp{cfg.band.mp_lo, cfg.band.mp_hi}, tau{cfg.band.tau_lo_ns, cfg.band.tau_hi_ns};
      detail::read_pair(r, *b, "mode_overlap_mp", "teleport.band", mp);
      detail::read_pair(r, *b, "tau_ns", "teleport.band", tau);
      cfg.band = {mp[0], mp[1], tau[0], tau[1]};
      cfg.has_band = true;
      if (!(mp[0] >= 0.0 && mp[0] <= mp[1] && mp[1] <= 1.0))
        r.add("teleport.band.mode_overlap_mp", "must be an ordered interval inside [0, 1]");
      if (!(tau[0] > 0.0 && tau[0] <= tau[1])) r.add("teleport.band.tau_ns", "must be an ordered interval of times > 0");
    }
  }

  if (const json* tm = r.child(doc, "tomography", "", false)) {
    r.integer(*tm, "shots_per_basis", "tomography", cfg.tomography.shots_per_basis);
    r.integer(*tm, "runs", "tomography", cfg.tomography.runs);
    if (auto in = r.string(*tm, "input", "tomography")) {
      try {
        cfg.tomography.input = parse_pol_label(*in);
      } catch (const InputError&) {
        r.add("tomography.input", "unknown polarization label '" + *in + "'");
      }
    }
    if (auto p = r.string(*tm, "counts_csv", "tomography")) cfg.tomography.counts_csv = *p;
    if (cfg.tomography.shots_per_basis == 0) r.add("tomography.shots_per_basis", "must be > 0");
    if (cfg.tomography.runs < 2) r.add("tomography.runs", "must be >= 2");
  }

  if (const json* sw = r.child(doc, "sweep", "", cfg.mode == Mode::Sweep)) {
    Fig5Defaults& d = cfg.sweep.defaults;
    if (const json* dj = r.child(*sw, "defaults", "sweep", false)) {
      r.number(*dj, "tau_x_ps", "sweep.defaults", d.tau_x_ps);
      r.number(*dj, "t2_ps", "sweep.defaults", d.t2_ps);
      r.number(*dj, "tau_hv_ns", "sweep.defaults", d.tau_hv_ns, false, true);
      r.number(*dj, "tau_ss_ns", "sweep.defaults", d.tau_ss_ns, false, true);
      r.number(*dj, "brightness", "sweep.defaults", d.brightness);
      r.number(*dj, "detuning_ghz", "sweep.defaults", d.detuning_ghz);
      r.number(*dj, "birefringence_mp", "sweep.defaults", d.birefringence_mp);
      if (!(d.tau_x_ps > 0.0)) r.add("sweep.defaults.tau_x_ps", "must be > 0");
      if (!(d.brightness > 0.0 && d.brightness <= 1.0)) r.add("sweep.defaults.brightness", "must lie in (0, 1]");
      if (!(d.birefringence_mp >= 0.0 && d.birefringence_mp <= 1.0))
        r.add("sweep.defaults.birefringence_mp", "must lie in [0, 1]");
    }
    if (const json* sc = r.child(*sw, "scenarios", "sweep", cfg.mode == Mode::Sweep)) {
      if (!sc->is_array() || sc->empty()) {
        r.add("sweep.scenarios", "expected a non-empty array");
      } else {
        for (std::size_t i = 0; i < sc->size(); ++i) {
          const std::string path = "sweep.scenarios[" + std::to_string(i) + "]";
          Fig5Scenario s = detail::read_scenario(r, (*sc)[i], path);
          for (auto& v : validate(s, path + ".")) violations.push_back(std::move(v));
          cfg.sweep.scenarios.push_back(std::move(s));
        }
      }
    }
  }

  // Semantic checks on the assembled values.
  for (auto& v : validate(t.qd1, "qd1.")) violations.push_back(std::move(v));
  for (auto& v : validate(t.qd2, "qd2.")) violations.push_back(std::move(v));
  if (cfg.mode == Mode::Teleport || cfg.mode == Mode::Tomography) {
    for (auto& v : validate(t, "teleport.")) {
      if (v.path.rfind("teleport.qd", 0) == 0) continue;  // reported above
      if (v.path.rfind("teleport.noise.", 0) == 0) v.path.erase(0, std::string("teleport.").size());
      violations.push_back(std::move(v));
    }
  }
  if ((cfg.mode == Mode::Visibility || cfg.mode == Mode::Teleport) && cfg.windows_ps.empty() &&
      !doc.contains("windows_ps"))
    r.add("windows_ps", "missing required field");
  return cfg;
}

inline ExperimentConfig from_json_checked(const json& doc) {
  Violations v;
  ExperimentConfig cfg = from_json(doc, v);
  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

// Reads and parses a config file. Syntax errors become a single violation at "$".
inline json read_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({{"$", std::string("malformed JSON: ") + e.what()}});
  }
}

inline ExperimentConfig load(const std::filesystem::path& path) { return from_json_checked(read_document(path)); }

// Violations of a config file; empty when valid. Throws only when the file is unreadable.
inline Violations validate_file(const std::filesystem::path& path) {
  try {
    Violations v;
    (void)from_json(read_document(path), v);
    return v;
  } catch (const ConfigError& e) {
    return e.violations();
  }
}

inline json violations_to_json(const Violations& v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back({{"path", x.path}, {"message", x.message}});
  return arr;
}

}  // namespace qdtele::config
