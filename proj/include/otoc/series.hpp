#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace otoc::io {

struct SeriesMeta {
  std::string label;     // e.g. "classical_otoc", "quantum_c", "quantum_o2"
  double kbt = 0.0;      // temperature of this series (0 = not thermal)
  double beta = 0.0;
  // Named scaling constants the figure scripts need (k_BT, m*a^2, ...).
  std::map<std::string, double> scales;
};

// A correlator sampled on a time grid; ell = vtilde * t is carried
// alongside so files are self-describing.  err holds one-sigma standard
// errors (zero for deterministic series).
struct OtocSeries {
  std::vector<double> t;
  std::vector<double> ell;
  std::vector<double> value;
  std::vector<double> err;
  SeriesMeta meta;

  std::size_t size() const { return t.size(); }
  void push(double ti, double elli, double v, double e = 0.0) {
    t.push_back(ti);
    ell.push_back(elli);
    value.push_back(v);
    err.push_back(e);
  }
};

// Shortest round-trip decimal representation (std::to_chars), so that
// rewriting a file that was just read is byte-identical.
std::string format_double(double v);

// CSV schema shared by every emitted series: header "t,ell,value,stderr".
void write_series_csv(const std::string& path, const OtocSeries& s);
OtocSeries read_series_csv(const std::string& path);

// Deterministic JSON sidecar (sorted keys, no timestamps): provenance
// fields such as config_hash, seed, code_version plus free-form numbers.
void write_sidecar(const std::string& path,
                   const std::map<std::string, std::string>& text_fields,
                   const std::map<std::string, double>& num_fields);

inline const char* code_version() { return "otoc-lab 1.0.0"; }

}  // namespace otoc::io
