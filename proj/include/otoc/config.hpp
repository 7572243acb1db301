#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "otoc/units.hpp"

namespace otoc::io {

// Raised for malformed or inconsistent run configurations; the CLI maps it
// to its validation exit code.  Messages name the offending field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One run of the laboratory: geometry, units, solver resolution, thermal
// ensemble grid, time grid, Monte Carlo budget, fit windows and output
// location.  Parsed from plain "key = value" text; see parse_config.
struct RunConfig {
  // geometry
  double a = 1.0;
  double ls = 1.0;
  // units
  double m = 0.5;
  double hbar = 1.0;
  // solver: grid step h = a / grid_divisions
  int grid_divisions = 288;
  int n_basis = 1200;
  int n_keep = 1000;
  // thermal grid in units of e0 = hbar^2 / (m a^2)
  std::vector<double> temperatures = {16.0, 32.0, 64.0, 128.0, 256.0};
  // shared dimensionless time grid: ell/a in [0, ell_max], `time_points`
  // samples including both ends
  double ell_max = 25.0;
  int time_points = 200;
  // Monte Carlo
  long mc_samples = 1'000'000;
  int mc_blocks = 100;
  std::uint64_t seed = 1;
  // reference stretching rate per unit length, in units of 1/a
  double lambda_g = 0.425;
  // growth-fit window in ell/a and the sampling point for temperature fits
  double fit_ell_lo = 0.4;
  double fit_ell_hi = 1.5;
  double xi_ell = 1.0;
  std::string output_dir = "out";

  domain::UnitSystem units() const { return {m, hbar}; }
  double e0() const { return units().e0(a); }
  double t0() const { return units().t0(a); }
  double h() const { return a / grid_divisions; }
  // absolute temperatures k_B T
  std::vector<double> kbt_values() const;
  // path lengths ell spanning [0, ell_max * a], shared by every series
  std::vector<double> ell_grid() const;
  // times realizing the ell grid at one temperature
  std::vector<double> t_grid(double kbt) const;
};

// Parse "key = value" text: '#' starts a comment, blank lines are skipped,
// every key must be known and appear at most once, numbers must parse
// exactly.  Lists (temperatures) are whitespace-separated.  Throws
// ConfigError with the line number and field name.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Field-level invariants: positivity, n_keep <= n_basis, nonempty grids.
void validate(const RunConfig& cfg);

// Canonical serialization (sorted keys, shortest round-trip numbers): the
// hash input and the format written next to artifacts.
std::string canonical_text(const RunConfig& cfg);

// FNV-1a 64-bit over the canonical text, rendered as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace otoc::io
