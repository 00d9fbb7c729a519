// Declarative parameter sweeps over (F2, delta_p, d3) grids with CSV/JSON
// output.  A sweep config comes from a key = value file plus command-line
// overrides; every output embeds the config in its metadata so a result file
// can be reparsed into the config that produced it.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "chi3opo/params.hpp"
#include "chi3opo/sde.hpp"

namespace chi3opo {

enum class SweepMode { kSteady, kDuan, kDuanRotated, kVlf, kOracle };

std::string to_string(SweepMode mode);
SweepMode sweep_mode_from_string(const std::string& name);

// One swept parameter: `count` evenly spaced values on [start, stop].
struct AxisSpec {
  std::string name;  // "f2", "delta_p", or "d3"
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  double value(int i) const;
};

struct SweepConfig {
  SweepMode mode = SweepMode::kSteady;
  std::vector<AxisSpec> axes;  // one or two swept axes
  NormalizedParams fixed;      // values for unswept parameters + omega, gamma_ratio
  SdeConfig oracle;            // oracle-mode settings (seed, dt, duration, ...)
  std::string output_path;
  std::string format = "csv";  // "csv" or "json"

  void validate() const;  // throws std::invalid_argument
};

// Key = value config text ('#' comments, blank lines allowed).  Axis keys
// (f2, delta_p, d3) take either a scalar (fixed value) or start:stop:count
// (swept axis).  Unknown keys are rejected.
SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config_file(const std::string& path);
// Applies one key = value override on top of an existing config (flags win).
void apply_override(SweepConfig& cfg, const std::string& key, const std::string& value);
// Config echo in the same key = value syntax (what the metadata block holds).
std::vector<std::pair<std::string, std::string>> config_echo(const SweepConfig& cfg);

// Tabular result: numeric columns plus an optional free-text note per row
// (used for "gap: below-threshold" and "skipped: unstable" markers; those
// rows carry NaNs in the value columns).
struct FigureDataset {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;  // one per row
};

// Runs the configured sweep; deterministic (same config -> same dataset).
FigureDataset run_sweep(const SweepConfig& cfg);

// CSV: '#'-prefixed metadata preamble, header row, 17-significant-digit
// values (exact round trip), trailing "note" column.
std::string render_csv(const FigureDataset& d);
FigureDataset parse_csv_text(const std::string& text);
std::string render_json(const FigureDataset& d);
FigureDataset parse_json_text(const std::string& text);

// File variants; I/O errors mention the path.
void emit_csv(const FigureDataset& d, const std::string& path);
void emit_json(const FigureDataset& d, const std::string& path);
FigureDataset parse_csv(const std::string& path);

// Rebuilds the config from an emitted metadata block (round trip).
SweepConfig config_from_metadata(
    const std::vector<std::pair<std::string, std::string>>& metadata);

// Cross-checks the analytic spectra against the stochastic oracle and the
// invariant suite at the first grid point (or at the fixed parameters when no
// axis is swept).  Prints one line per check to `out`; returns 0 when
// everything passes, 1 otherwise (including a clean diagnostic when the
// targeted state is unstable).
int verify_point(const SweepConfig& cfg, std::ostream& out);

}  // namespace chi3opo
