#include "otoc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "otoc/series.hpp"

namespace otoc::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& v, int line, const std::string& key) {
  const std::string t = trim(v);
  const char* begin = t.data();
  const char* end = begin + t.size();
  double out = 0.0;
  auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    fail(line, "field '" + key + "': cannot parse number from '" + t + "'");
  return out;
}

long parse_integer(const std::string& v, int line, const std::string& key) {
  const std::string t = trim(v);
  const char* begin = t.data();
  const char* end = begin + t.size();
  long out = 0;
  auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    fail(line, "field '" + key + "': cannot parse integer from '" + t + "'");
  return out;
}

std::vector<double> parse_list(const std::string& v, int line,
                               const std::string& key) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_number(tok, line, key));
  if (out.empty()) fail(line, "field '" + key + "': empty list");
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::set<std::string> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "missing key before '='");
    if (val.empty()) fail(line, "field '" + key + "': missing value");
    if (!seen.insert(key).second)
      fail(line, "field '" + key + "' appears more than once");

    if (key == "a") cfg.a = parse_number(val, line, key);
    else if (key == "ls") cfg.ls = parse_number(val, line, key);
    else if (key == "m") cfg.m = parse_number(val, line, key);
    else if (key == "hbar") cfg.hbar = parse_number(val, line, key);
    else if (key == "grid_divisions")
      cfg.grid_divisions = int(parse_integer(val, line, key));
    else if (key == "n_basis") cfg.n_basis = int(parse_integer(val, line, key));
    else if (key == "n_keep") cfg.n_keep = int(parse_integer(val, line, key));
    else if (key == "temperatures") cfg.temperatures = parse_list(val, line, key);
    else if (key == "ell_max") cfg.ell_max = parse_number(val, line, key);
    else if (key == "time_points")
      cfg.time_points = int(parse_integer(val, line, key));
    else if (key == "mc_samples") cfg.mc_samples = parse_integer(val, line, key);
    else if (key == "mc_blocks")
      cfg.mc_blocks = int(parse_integer(val, line, key));
    else if (key == "seed")
      cfg.seed = std::uint64_t(parse_integer(val, line, key));
    else if (key == "lambda_g") cfg.lambda_g = parse_number(val, line, key);
    else if (key == "fit_ell_lo") cfg.fit_ell_lo = parse_number(val, line, key);
    else if (key == "fit_ell_hi") cfg.fit_ell_hi = parse_number(val, line, key);
    else if (key == "xi_ell") cfg.xi_ell = parse_number(val, line, key);
    else if (key == "output_dir") cfg.output_dir = val;
    else fail(line, "unknown field '" + key + "'");
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string("config: field '") + name +
                        "' must be positive and finite");
  };
  positive(cfg.a, "a");
  positive(cfg.ls, "ls");
  positive(cfg.m, "m");
  positive(cfg.hbar, "hbar");
  positive(cfg.ell_max, "ell_max");
  positive(cfg.lambda_g, "lambda_g");
  positive(cfg.fit_ell_lo, "fit_ell_lo");
  positive(cfg.fit_ell_hi, "fit_ell_hi");
  positive(cfg.xi_ell, "xi_ell");
  if (cfg.grid_divisions < 8)
    throw ConfigError("config: field 'grid_divisions' must be at least 8");
  if (cfg.n_basis < 1)
    throw ConfigError("config: field 'n_basis' must be positive");
  if (cfg.n_keep < 1)
    throw ConfigError("config: field 'n_keep' must be positive");
  if (cfg.n_keep > cfg.n_basis)
    throw ConfigError("config: field 'n_keep' (" +
                      std::to_string(cfg.n_keep) +
                      ") must not exceed 'n_basis' (" +
                      std::to_string(cfg.n_basis) + ")");
  if (cfg.temperatures.empty())
    throw ConfigError("config: field 'temperatures' must be a nonempty list");
  for (double t : cfg.temperatures)
    if (!(t > 0.0) || !std::isfinite(t))
      throw ConfigError(
          "config: field 'temperatures' entries must be positive and finite");
  if (cfg.time_points < 2)
    throw ConfigError("config: field 'time_points' must be at least 2");
  if (cfg.mc_samples < 1)
    throw ConfigError("config: field 'mc_samples' must be positive");
  if (cfg.mc_blocks < 2)
    throw ConfigError("config: field 'mc_blocks' must be at least 2");
  if (cfg.mc_blocks > cfg.mc_samples)
    throw ConfigError(
        "config: field 'mc_blocks' must not exceed 'mc_samples'");
  if (cfg.fit_ell_hi <= cfg.fit_ell_lo)
    throw ConfigError(
        "config: field 'fit_ell_hi' must exceed 'fit_ell_lo'");
  if (cfg.output_dir.empty())
    throw ConfigError("config: field 'output_dir' must not be empty");
}

std::vector<double> RunConfig::kbt_values() const {
  std::vector<double> out;
  out.reserve(temperatures.size());
  for (double t : temperatures) out.push_back(t * e0());
  return out;
}

std::vector<double> RunConfig::ell_grid() const {
  std::vector<double> out;
  out.reserve(std::size_t(time_points));
  for (int i = 0; i < time_points; ++i)
    out.push_back(ell_max * a * double(i) / double(time_points - 1));
  return out;
}

std::vector<double> RunConfig::t_grid(double kbt) const {
  const auto u = units();
  std::vector<double> out;
  out.reserve(std::size_t(time_points));
  for (double ell : ell_grid()) out.push_back(u.time_for_ell(ell, kbt));
  return out;
}

std::string canonical_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "a = " << format_double(cfg.a) << '\n';
  out << "ell_max = " << format_double(cfg.ell_max) << '\n';
  out << "fit_ell_hi = " << format_double(cfg.fit_ell_hi) << '\n';
  out << "fit_ell_lo = " << format_double(cfg.fit_ell_lo) << '\n';
  out << "grid_divisions = " << cfg.grid_divisions << '\n';
  out << "hbar = " << format_double(cfg.hbar) << '\n';
  out << "lambda_g = " << format_double(cfg.lambda_g) << '\n';
  out << "ls = " << format_double(cfg.ls) << '\n';
  out << "m = " << format_double(cfg.m) << '\n';
  out << "mc_blocks = " << cfg.mc_blocks << '\n';
  out << "mc_samples = " << cfg.mc_samples << '\n';
  out << "n_basis = " << cfg.n_basis << '\n';
  out << "n_keep = " << cfg.n_keep << '\n';
  out << "output_dir = " << cfg.output_dir << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "temperatures =";
  for (double t : cfg.temperatures) out << ' ' << format_double(t);
  out << '\n';
  out << "time_points = " << cfg.time_points << '\n';
  out << "xi_ell = " << format_double(cfg.xi_ell) << '\n';
  return out.str();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = canonical_text(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[std::size_t(i)] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

}  // namespace otoc::io
