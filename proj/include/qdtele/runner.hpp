#pragma once

// Dispatches a parsed ExperimentConfig to one of the four study types and
// writes its artifacts. Numbers are printed with a fixed format so that a
// given config and seed always produce byte-identical files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdtele/config.hpp"
#include "qdtele/tomography.hpp"

namespace qdtele::runner {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct RunOptions {
  std::optional<fs::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> windows_ps;
  unsigned workers = 0;  // 0 = hardware concurrency
};

inline std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

// JSON numbers go through the same formatter so reports diff cleanly.
inline json num(double x) {
  if (!std::isfinite(x)) return fmt(x);
  return json::parse(fmt(x));
}

inline json matrix_json(const Matrix2c& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < 2; ++r) {
    json rr = json::array(), ir = json::array();
    for (int c = 0; c < 2; ++c) {
      rr.push_back(num(m(r, c).real()));
      ir.push_back(num(m(r, c).imag()));
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"re", re}, {"im", im}};
}

// Inverse of matrix_json; validates the DensityMatrix invariants.
inline DensityMatrix2 matrix_from_json(const nlohmann::json& j) {
  Matrix2c m;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = Complex(j.at("re").at(r).at(c).get<double>(), j.at("im").at(r).at(c).get<double>());
  return DensityMatrix2::from_matrix(m);
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << body;
    written_.push_back(p);
  }

  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  const std::vector<fs::path>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s << (i ? "," : "") << cells[i];
    s << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s.str();
}

inline std::string matrix_csv(const Matrix2c& m) {
  std::vector<std::vector<std::string>> rows;
  const char* names[2] = {"H", "V"};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) rows.push_back({names[r], names[c], fmt(m(r, c).real()), fmt(m(r, c).imag())});
  return csv({"row", "col", "re", "im"}, rows);
}

inline std::string counts_csv(const TomographyCounts& c) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& basis : kTomographyBases)
    for (PolLabel l : basis) rows.push_back({std::string(to_string(l)), std::to_string(c[l])});
  return csv({"projection_label", "count"}, rows);
}

inline TomographyCounts parse_counts_csv(std::istream& in) {
  TomographyCounts out;
  std::array<bool, 6> seen{};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("projection_label", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InputError("counts CSV: expected 'label,count' in line '" + line + "'");
    const PolLabel l = parse_pol_label(line.substr(0, comma));
    std::size_t used = 0;
    const std::string value = line.substr(comma + 1);
    long long n = -1;
    try {
      n = std::stoll(value, &used);
    } catch (const std::exception&) {
    }
    if (n < 0 || used != value.size()) throw InputError("counts CSV: invalid count '" + value + "'");
    out[l] = static_cast<std::uint64_t>(n);
    seen[static_cast<std::size_t>(l)] = true;
  }
  for (std::size_t i = 0; i < 6; ++i)
    if (!seen[i]) throw InputError("counts CSV: missing projection " + std::string(to_string(static_cast<PolLabel>(i))));
  return out;
}

inline std::string window_label(double w) { return std::isinf(w) ? "full" : fmt(w); }

inline void run_visibility(const config::ExperimentConfig& cfg, ArtifactWriter& out) {
  const InterferenceModel m = interference_model(cfg.teleport);
  std::vector<std::vector<std::string>> rows;
  for (double w : cfg.windows_ps) rows.push_back({fmt(w), fmt(window_visibility(w, m))});
  out.text("visibility_curve.csv", csv({"window_ps", "visibility"}, rows));
}

inline void run_teleport(const config::ExperimentConfig& cfg, ArtifactWriter& out, unsigned workers) {
  const TeleportConfig& t = cfg.teleport;
  const TeleportEvaluation ev = evaluate_teleport(t);
  const ConjugateFidelities conj = conjugate_fidelities(t);
  const FidelityCurve curve = average_fidelity_curve(t, cfg.windows_ps, workers);
  const auto band = average_fidelity_band(t, cfg.windows_ps, cfg.band, workers);

  // Uncorrected photon-3 matrices for the three conjugate inputs.
  json matrices = json::object();
  for (PolLabel l : kConjugateInputs) {
    TeleportConfig ci = t;
    ci.input = basis_state(l);
    ci.apply_correction = false;
    const Matrix2c m = teleported_state(ci).matrix();
    out.text("rho_uncorrected_" + std::string(to_string(l)) + ".csv", matrix_csv(m));
    matrices[std::string(to_string(l))] = matrix_json(m);
  }

  std::vector<std::vector<std::string>> rows;
  json curve_json = json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    rows.push_back({fmt(p.window_ps), fmt(p.f_bar), fmt(p.fidelities.f_h), fmt(p.fidelities.f_d), fmt(p.fidelities.f_r),
                    fmt(p.visibility), fmt(p.k), fmt(band[i].f_bar_min), fmt(band[i].f_bar_max)});
    curve_json.push_back({{"window_ps", num(p.window_ps)},
                          {"f_bar", num(p.f_bar)},
                          {"f_h", num(p.fidelities.f_h)},
                          {"f_d", num(p.fidelities.f_d)},
                          {"f_r", num(p.fidelities.f_r)},
                          {"visibility", num(p.visibility)},
                          {"k", num(p.k)},
                          {"band_min", num(band[i].f_bar_min)},
                          {"band_max", num(band[i].f_bar_max)}});
  }
  out.text("fidelity_curve.csv",
           csv({"window_ps", "f_bar", "f_h", "f_d", "f_r", "visibility", "k", "band_min", "band_max"}, rows));

  const DensityMatrix4 pair = time_averaged_pair_state(t.pair_window, t.qd2);
  json report = {
      {"schema", "qdtele-report/1"},
      {"mode", "teleport"},
      {"window_ps", std::isinf(t.window_ps) ? json("full") : num(t.window_ps)},
      {"outcome", std::string(to_string(t.outcome))},
      {"apply_correction", t.apply_correction},
      {"visibility", num(ev.visibility)},
      {"k", num(ev.k)},
      {"mode_overlap_mp", num(t.mode_overlap_mp)},
      {"heralding_probability", num(ev.herald_probability)},
      {"pair_concurrence", num(concurrence(pair))},
      {"rho_out", matrix_json(ev.rho.matrix())},
      {"fidelity_to_input", num(fidelity(ev.rho, t.input))},
      {"conjugate", {{"f_h", num(conj.f_h)}, {"f_d", num(conj.f_d)}, {"f_r", num(conj.f_r)}, {"f_bar", num(conj.f_bar())}}},
      {"classical_threshold", num(units::kClassicalFidelityThreshold)},
      {"threshold_crossing_ps", curve.threshold_crossing_ps ? num(*curve.threshold_crossing_ps) : json(nullptr)},
      {"uncorrected_matrices", matrices},
      {"curve", curve_json}};
  out.json_file("teleport_report.json", report);
}

inline void run_sweep(const config::ExperimentConfig& cfg, ArtifactWriter& out, unsigned workers) {
  const auto rows = fig5_grid(cfg.sweep.scenarios, cfg.sweep.defaults, workers);
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    const auto& s = r.scenario;
    cells.push_back({s.label, fmt(s.linewidth_ghz[0]), fmt(s.linewidth_ghz[1]), fmt(s.tau_xx_ps[0]), fmt(s.tau_xx_ps[1]),
                     fmt(s.fss_uev), fmt(s.g2), fmt(r.visibility), fmt(r.k), fmt(r.mode_overlap_mp), fmt(r.f_bar)});
  }
  out.text("fig5_grid.csv", csv({"label", "linewidth1_ghz", "linewidth2_ghz", "tau_xx1_ps", "tau_xx2_ps", "fss_uev", "g2",
                                 "visibility", "k", "mode_overlap_mp", "f_bar"},
                                cells));
}

inline void run_tomography(const config::ExperimentConfig& cfg, ArtifactWriter& out, unsigned workers) {
  const auto& ts = cfg.tomography;
  TomographyCounts counts;
  std::optional<DensityMatrix2> truth;
  if (ts.counts_csv) {
    std::ifstream in(*ts.counts_csv);
    if (!in) throw InputError("cannot read counts CSV '" + ts.counts_csv->string() + "'");
    counts = parse_counts_csv(in);
  } else {
    TeleportConfig t = cfg.teleport;
    t.input = basis_state(ts.input);
    truth = teleported_state(t);
    counts = simulate_counts(*truth, ts.shots_per_basis, cfg.seed);
  }
  const PolState target = basis_state(ts.input);
  const DensityMatrix2 rho = reconstruct(counts);
  const auto sd = monte_carlo_errors(counts, {target}, ts.runs, cfg.seed, workers);

  out.text("tomography_counts.csv", counts_csv(counts));
  json report = {{"schema", "qdtele-report/1"},
                 {"mode", "tomography"},
                 {"seed", cfg.seed},
                 {"target", std::string(to_string(ts.input))},
                 {"runs", ts.runs},
                 {"rho", matrix_json(rho.matrix())},
                 {"fidelity", num(fidelity(rho, target))},
                 {"fidelity_std", num(sd[0])}};
  if (truth) {
    report["rho_model"] = matrix_json(truth->matrix());
    report["fidelity_model"] = num(fidelity(*truth, target));
  }
  out.json_file("tomography_report.json", report);
}

// Applies CLI overrides, then writes every artifact of the configured mode.
inline std::vector<fs::path> run(config::ExperimentConfig cfg, const RunOptions& opt = {}) {
  if (opt.output_dir) cfg.output_dir = *opt.output_dir;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.windows_ps) {
    Violations v;
    config::detail::Reader r(v);
    cfg.windows_ps = config::detail::read_windows(r, nlohmann::json(*opt.windows_ps), "windows_ps");
    if (!v.empty()) throw config::ConfigError(std::move(v));
  }
  const unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  ArtifactWriter out(cfg.output_dir);
  switch (cfg.mode) {
    case config::Mode::Visibility: run_visibility(cfg, out); break;
    case config::Mode::Teleport: run_teleport(cfg, out, workers); break;
    case config::Mode::Sweep: run_sweep(cfg, out, workers); break;
    case config::Mode::Tomography: run_tomography(cfg, out, workers); break;
  }
  return out.written();
}

}  // namespace qdtele::runner
