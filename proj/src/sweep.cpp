#include "chi3opo/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "chi3opo/entanglement.hpp"
#include "chi3opo/steady_state.hpp"

namespace chi3opo {

namespace {

constexpr const char* kArtifactVersion = "chi3opo 1.0.0";
const double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad numeric value for " + what + ": '" + s + "'");
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad integer value for " + what + ": '" + s + "'");
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("bad unsigned value for " + what + ": '" + s + "'");
}

bool is_param_key(const std::string& key) {
  return key == "f2" || key == "delta_p" || key == "d3";
}

void set_fixed_param(NormalizedParams& p, const std::string& key, double v) {
  if (key == "f2") {
    p.f2 = v;
  } else if (key == "delta_p") {
    p.delta_p = v;
  } else {
    p.d3 = v;
  }
}

void set_key(SweepConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mode") {
    cfg.mode = sweep_mode_from_string(value);
  } else if (is_param_key(key)) {
    if (value.find(':') != std::string::npos) {
      const auto parts = split(value, ':');
      if (parts.size() != 3) {
        throw std::invalid_argument("axis spec for " + key + " must be start:stop:count");
      }
      AxisSpec axis;
      axis.name = key;
      axis.start = parse_double(trim(parts[0]), key + " start");
      axis.stop = parse_double(trim(parts[1]), key + " stop");
      axis.count = parse_int(trim(parts[2]), key + " count");
      bool replaced = false;
      for (auto& a : cfg.axes) {
        if (a.name == key) {
          a = axis;
          replaced = true;
        }
      }
      if (!replaced) cfg.axes.push_back(axis);
    } else {
      std::erase_if(cfg.axes, [&](const AxisSpec& a) { return a.name == key; });
      set_fixed_param(cfg.fixed, key, parse_double(value, key));
    }
  } else if (key == "omega") {
    cfg.fixed.omega = parse_double(value, key);
  } else if (key == "gamma_ratio") {
    cfg.fixed.gamma_ratio = parse_double(value, key);
  } else if (key == "seed") {
    cfg.oracle.seed = parse_u64(value, key);
  } else if (key == "trajectories") {
    cfg.oracle.n_trajectories = parse_int(value, key);
  } else if (key == "duration") {
    cfg.oracle.duration = parse_double(value, key);
  } else if (key == "transient") {
    cfg.oracle.transient = parse_double(value, key);
  } else if (key == "dt") {
    cfg.oracle.dt = parse_double(value, key);
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "out") {
    cfg.output_path = value;
  } else if (key == "artifact") {
    // version echo in metadata blocks; nothing to set
  } else {
    throw std::invalid_argument("unknown config key: " + key);
  }
}

NormalizedParams point_params(const SweepConfig& cfg, int i0, int i1) {
  NormalizedParams p = cfg.fixed;
  set_fixed_param(p, cfg.axes[0].name, cfg.axes[0].value(i0));
  if (cfg.axes.size() > 1) set_fixed_param(p, cfg.axes[1].name, cfg.axes[1].value(i1));
  return p;
}

}  // namespace

std::string to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::kSteady:
      return "steady";
    case SweepMode::kDuan:
      return "duan";
    case SweepMode::kDuanRotated:
      return "duan_rotated";
    case SweepMode::kVlf:
      return "vlf";
    case SweepMode::kOracle:
      return "oracle";
  }
  return "steady";
}

SweepMode sweep_mode_from_string(const std::string& name) {
  if (name == "steady") return SweepMode::kSteady;
  if (name == "duan") return SweepMode::kDuan;
  if (name == "duan_rotated" || name == "duan-rot") return SweepMode::kDuanRotated;
  if (name == "vlf") return SweepMode::kVlf;
  if (name == "oracle") return SweepMode::kOracle;
  throw std::invalid_argument("unknown sweep mode: " + name);
}

double AxisSpec::value(int i) const {
  if (count <= 1) return start;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void SweepConfig::validate() const {
  if (axes.empty() || axes.size() > 2) {
    throw std::invalid_argument("sweep needs exactly one or two swept axes");
  }
  for (const auto& a : axes) {
    if (!is_param_key(a.name)) throw std::invalid_argument("unknown axis: " + a.name);
    if (a.count < 1) throw std::invalid_argument("axis count must be >= 1");
    if (!(a.start <= a.stop)) throw std::invalid_argument("axis start must be <= stop");
    if (a.name == "f2" && a.start < 0.0) throw std::invalid_argument("f2 axis must be >= 0");
  }
  if (axes.size() == 2 && axes[0].name == axes[1].name) {
    throw std::invalid_argument("swept axes must differ");
  }
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
  fixed.validate();
  oracle.validate();
}

SweepConfig parse_config_text(const std::string& text) {
  SweepConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

SweepConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(SweepConfig& cfg, const std::string& key, const std::string& value) {
  set_key(cfg, key, value);
}

std::vector<std::pair<std::string, std::string>> config_echo(const SweepConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> md;
  md.emplace_back("artifact", kArtifactVersion);
  md.emplace_back("mode", to_string(cfg.mode));
  for (const auto& a : cfg.axes) {
    md.emplace_back(a.name,
                    fmt17(a.start) + ":" + fmt17(a.stop) + ":" + std::to_string(a.count));
  }
  for (const char* name : {"f2", "delta_p", "d3"}) {
    bool swept = false;
    for (const auto& a : cfg.axes) swept = swept || a.name == name;
    if (swept) continue;
    const NormalizedParams& p = cfg.fixed;
    const double v = std::string(name) == "f2"   ? p.f2
                     : std::string(name) == "delta_p" ? p.delta_p
                                                      : p.d3;
    md.emplace_back(name, fmt17(v));
  }
  md.emplace_back("omega", fmt17(cfg.fixed.omega));
  md.emplace_back("gamma_ratio", fmt17(cfg.fixed.gamma_ratio));
  md.emplace_back("seed", std::to_string(cfg.oracle.seed));
  md.emplace_back("trajectories", std::to_string(cfg.oracle.n_trajectories));
  md.emplace_back("duration", fmt17(cfg.oracle.duration));
  md.emplace_back("transient", fmt17(cfg.oracle.transient));
  md.emplace_back("dt", fmt17(cfg.oracle.dt));
  md.emplace_back("format", cfg.format);
  if (!cfg.output_path.empty()) md.emplace_back("out", cfg.output_path);
  return md;
}

SweepConfig config_from_metadata(
    const std::vector<std::pair<std::string, std::string>>& metadata) {
  std::string text;
  for (const auto& [k, v] : metadata) text += k + " = " + v + "\n";
  return parse_config_text(text);
}

namespace {

void push_row(FigureDataset& d, std::vector<double> row, std::string note = "") {
  d.rows.push_back(std::move(row));
  d.notes.push_back(std::move(note));
}

// Branch preferred for single-state diagnostics: first stable oscillating
// branch, else first stable non-oscillating one.
int preferred_branch(const std::vector<SteadyState>& states) {
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].stable && states[i].branch_kind == BranchKind::kOscillating) {
      return static_cast<int>(i);
    }
  }
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].stable) return static_cast<int>(i);
  }
  return -1;
}

void steady_rows(FigureDataset& d, const NormalizedParams& p,
                 const std::vector<SteadyState>& states) {
  for (size_t b = 0; b < states.size(); ++b) {
    const SteadyState& s = states[b];
    push_row(d, {p.f2, p.delta_p, p.d3, static_cast<double>(b),
                 s.branch_kind == BranchKind::kOscillating ? 1.0 : 0.0, s.pump_photons(),
                 s.signal_photons(), s.pump.phase, s.signal.phase, s.idler.phase,
                 s.stable ? 1.0 : 0.0});
  }
}

void witness_rows(FigureDataset& d, SweepMode mode, const NormalizedParams& p,
                  const std::vector<SteadyState>& states) {
  const size_t n_values = d.columns.size() - 4;  // after f2, delta_p, d3, branch
  bool any_oscillating = false;
  for (size_t b = 0; b < states.size(); ++b) {
    const SteadyState& s = states[b];
    if (s.branch_kind != BranchKind::kOscillating) continue;
    any_oscillating = true;
    std::vector<double> row = {p.f2, p.delta_p, p.d3, static_cast<double>(b)};
    if (!s.stable) {
      row.resize(4 + n_values, kNan);
      row[4] = s.signal_photons();
      push_row(d, std::move(row), "skipped: unstable");
      continue;
    }
    WitnessReport w;
    try {
      w = evaluate_witnesses(linearize(s), p.omega);
    } catch (const std::domain_error&) {
      // The signal/idler subsystem alone can lose stability even when the
      // full state is stable (the pump response is what holds it); no
      // stationary witness spectrum exists there.
      row.resize(4 + n_values, kNan);
      row[4] = s.signal_photons();
      push_row(d, std::move(row), "skipped: unstable");
      continue;
    }
    row.push_back(s.signal_photons());
    switch (mode) {
      case SweepMode::kDuan:
        row.push_back(w.duan);
        row.push_back(w.duan_violated ? 1.0 : 0.0);
        break;
      case SweepMode::kDuanRotated:
        row.push_back(w.duan);
        row.push_back(w.rotation.theta_plus);
        row.push_back(w.rotation.theta_minus);
        row.push_back(w.c);
        row.push_back(w.duan_rotated);
        row.push_back(w.duan_rotated_violated ? 1.0 : 0.0);
        break;
      default:  // kVlf
        row.push_back(w.vlf[0].witness);
        row.push_back(w.vlf[1].witness);
        row.push_back(w.vlf[2].witness);
        row.push_back(w.vlf_violated[0] || w.vlf_violated[1] || w.vlf_violated[2] ? 1.0 : 0.0);
        break;
    }
    push_row(d, std::move(row));
  }
  if (!any_oscillating) {
    std::vector<double> row = {p.f2, p.delta_p, p.d3};
    row.resize(4 + n_values, kNan);
    push_row(d, std::move(row), "gap: below-threshold");
  }
}

void oracle_rows(FigureDataset& d, const SweepConfig& cfg, const NormalizedParams& p,
                 const std::vector<SteadyState>& states) {
  std::vector<double> row = {p.f2, p.delta_p, p.d3};
  const int b = preferred_branch(states);
  if (b < 0) {
    row.resize(d.columns.size(), kNan);
    push_row(d, std::move(row), "skipped: unstable");
    return;
  }
  const FluctuationSystem fs = linearize(states[static_cast<size_t>(b)]);
  SdeConfig sc = cfg.oracle;
  sc.frequencies = {p.omega};
  const SdeSpectrum est = simulate_linear(fs, sc)[0];
  const SpectralDensity analytic = output_spectrum(fs, p.omega);
  double max_z = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double se = std::max(est.std_error(i, j), 1e-15);
      max_z = std::max(max_z, std::abs(est.mean(i, j) - analytic.matrix(i, j)) / se);
    }
  }
  row.push_back(static_cast<double>(b));
  row.push_back(p.omega);
  row.push_back(max_z);
  row.push_back(max_z <= 3.0 ? 1.0 : 0.0);
  for (int i = 0; i < 6; ++i) row.push_back(analytic.matrix(i, i));
  for (int i = 0; i < 6; ++i) row.push_back(est.mean(i, i));
  for (int i = 0; i < 6; ++i) row.push_back(est.std_error(i, i));
  push_row(d, std::move(row));
}

std::vector<std::string> columns_for(SweepMode mode) {
  switch (mode) {
    case SweepMode::kSteady:
      return {"f2", "delta_p", "d3", "branch", "oscillating", "pump_photons",
              "signal_photons", "pump_phase", "signal_phase", "idler_phase", "stable"};
    case SweepMode::kDuan:
      return {"f2", "delta_p", "d3", "branch", "signal_photons", "duan", "violated"};
    case SweepMode::kDuanRotated:
      return {"f2", "delta_p", "d3", "branch", "signal_photons", "duan", "theta_plus",
              "theta_minus", "cos_factor", "duan_rotated", "violated"};
    case SweepMode::kVlf:
      return {"f2", "delta_p", "d3", "branch", "signal_photons", "vlf_p_si", "vlf_s_ip",
              "vlf_i_sp", "violated"};
    case SweepMode::kOracle:
      return {"f2", "delta_p", "d3", "branch", "omega", "max_z", "pass",
              "analytic_0", "analytic_1", "analytic_2", "analytic_3", "analytic_4",
              "analytic_5", "sde_0", "sde_1", "sde_2", "sde_3", "sde_4", "sde_5",
              "stderr_0", "stderr_1", "stderr_2", "stderr_3", "stderr_4", "stderr_5"};
  }
  return {};
}

}  // namespace

FigureDataset run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  FigureDataset d;
  d.metadata = config_echo(cfg);
  d.columns = columns_for(cfg.mode);

  const int n0 = cfg.axes[0].count;
  const int n1 = cfg.axes.size() > 1 ? cfg.axes[1].count : 1;
  for (int i0 = 0; i0 < n0; ++i0) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const NormalizedParams p = point_params(cfg, i0, i1);
      const std::vector<SteadyState> states = solve_all(p);
      switch (cfg.mode) {
        case SweepMode::kSteady:
          steady_rows(d, p, states);
          break;
        case SweepMode::kOracle:
          oracle_rows(d, cfg, p, states);
          break;
        default:
          witness_rows(d, cfg.mode, p, states);
          break;
      }
    }
  }
  return d;
}

std::string render_csv(const FigureDataset& d) {
  std::string out;
  for (const auto& [k, v] : d.metadata) out += "# " + k + " = " + v + "\n";
  for (size_t c = 0; c < d.columns.size(); ++c) {
    out += d.columns[c];
    out += ',';
  }
  out += "note\n";
  for (size_t r = 0; r < d.rows.size(); ++r) {
    for (double v : d.rows[r]) {
      out += fmt17(v);
      out += ',';
    }
    out += d.notes[r];
    out += '\n';
  }
  return out;
}

FigureDataset parse_csv_text(const std::string& text) {
  FigureDataset d;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) {
        d.metadata.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      }
      continue;
    }
    auto fields = split(line, ',');
    if (!have_header) {
      if (fields.empty() || fields.back() != "note") {
        throw std::invalid_argument("csv header must end with a note column");
      }
      fields.pop_back();
      d.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != d.columns.size() + 1) {
      throw std::invalid_argument("csv row has wrong field count: " + line);
    }
    std::vector<double> row(d.columns.size());
    for (size_t c = 0; c < d.columns.size(); ++c) row[c] = parse_double(fields[c], d.columns[c]);
    d.rows.push_back(std::move(row));
    d.notes.push_back(fields.back());
  }
  if (!have_header) throw std::invalid_argument("csv text has no header row");
  return d;
}

std::string render_json(const FigureDataset& d) {
  nlohmann::json j;
  j["metadata"] = nlohmann::json::array();
  for (const auto& [k, v] : d.metadata) j["metadata"].push_back({k, v});
  j["columns"] = d.columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : d.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (double v : row) {
      if (std::isnan(v)) {
        jr.push_back(nullptr);
      } else {
        jr.push_back(v);
      }
    }
    j["rows"].push_back(std::move(jr));
  }
  j["notes"] = d.notes;
  return j.dump(2) + "\n";
}

FigureDataset parse_json_text(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  FigureDataset d;
  for (const auto& kv : j.at("metadata")) {
    d.metadata.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
  }
  d.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& jr : j.at("rows")) {
    std::vector<double> row;
    row.reserve(jr.size());
    for (const auto& v : jr) row.push_back(v.is_null() ? kNan : v.get<double>());
    d.rows.push_back(std::move(row));
  }
  d.notes = j.at("notes").get<std::vector<std::string>>();
  return d;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void emit_csv(const FigureDataset& d, const std::string& path) {
  write_file(path, render_csv(d));
}

void emit_json(const FigureDataset& d, const std::string& path) {
  write_file(path, render_json(d));
}

FigureDataset parse_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv_text(ss.str());
}

int verify_point(const SweepConfig& cfg, std::ostream& out) {
  cfg.fixed.validate();
  cfg.oracle.validate();
  const NormalizedParams p = cfg.axes.empty() ? cfg.fixed : point_params(cfg, 0, 0);
  out << "verify at f2 = " << fmt17(p.f2) << ", delta_p = " << fmt17(p.delta_p)
      << ", d3 = " << fmt17(p.d3) << "\n";
  const std::vector<SteadyState> states = solve_all(p);
  const int b = preferred_branch(states);
  if (b < 0) {
    out << "FAIL  no stable branch at this point (unstable)\n";
    return 1;
  }
  const SteadyState& s = states[static_cast<size_t>(b)];
  out << "branch " << b
      << (s.branch_kind == BranchKind::kOscillating ? " (oscillating)" : " (non-oscillating)")
      << ", pump photons " << fmt17(s.pump_photons()) << ", signal photons "
      << fmt17(s.signal_photons()) << "\n";

  bool ok = true;
  const auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "PASS  " : "FAIL  ") << name << "  " << detail << "\n";
    ok = ok && pass;
  };

  const double resid = fixed_point_residual(s);
  check("fixed-point residual <= 1e-9", resid <= 1e-9, "residual = " + fmt17(resid));

  const FluctuationSystem fs = linearize(s);
  double min_margin = 0.0;
  bool first = true;
  for (double w : {p.omega, 1.0, 10.0}) {
    const double m = physicality_margin(output_spectrum(fs, w));
    if (first || m < min_margin) min_margin = m;
    first = false;
  }
  check("spectrum physicality >= -1e-9", min_margin >= -1e-9,
        "min eigenvalue margin = " + fmt17(min_margin));

  const SpectralDensity far = output_spectrum(fs, 1e6);
  const double shot_dev = (far.matrix - 0.5 * Eigen::MatrixXd::Identity(6, 6))
                              .cwiseAbs()
                              .maxCoeff();
  check("high-frequency shot-noise limit within 1e-3", shot_dev <= 1e-3,
        "max deviation = " + fmt17(shot_dev));

  SdeConfig sc = cfg.oracle;
  sc.frequencies = {p.omega};
  const SdeSpectrum est = simulate_linear(fs, sc)[0];
  const SpectralDensity analytic = output_spectrum(fs, p.omega);
  double max_z = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int jx = 0; jx < 6; ++jx) {
      const double se = std::max(est.std_error(i, jx), 1e-15);
      max_z = std::max(max_z, std::abs(est.mean(i, jx) - analytic.matrix(i, jx)) / se);
    }
  }
  check("stochastic oracle agrees within 3 sigma", max_z <= 3.0,
        "max |z| = " + fmt17(max_z) + " over " + std::to_string(sc.n_trajectories) +
            " trajectories");

  out << (ok ? "verify: all checks passed\n" : "verify: FAILURES present\n");
  return ok ? 0 : 1;
}

}  // namespace chi3opo
