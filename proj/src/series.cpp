#include "otoc/series.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace otoc::io {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_series_csv(const std::string& path, const OtocSeries& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "t,ell,value,stderr\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.t[i]) << ',' << format_double(s.ell[i]) << ','
        << format_double(s.value[i]) << ',' << format_double(s.err[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

OtocSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,ell,value,stderr")
    throw std::runtime_error(path + ": bad CSV header, expected 't,ell,value,stderr'");
  OtocSeries s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double cols[4];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int k = 0; k < 4; ++k) {
      auto res = std::from_chars(p, end, cols[k]);
      if (res.ec != std::errc{})
        throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
      p = res.ptr;
      if (k < 3) {
        if (p == end || *p != ',')
          throw std::runtime_error(path + ": expected 4 columns at line " + std::to_string(lineno));
        ++p;
      }
    }
    s.push(cols[0], cols[1], cols[2], cols[3]);
  }
  return s;
}

void write_sidecar(const std::string& path,
                   const std::map<std::string, std::string>& text_fields,
                   const std::map<std::string, double>& num_fields) {
  nlohmann::json j;
  for (const auto& [k, v] : text_fields) j[k] = v;
  for (const auto& [k, v] : num_fields) j[k] = v;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace otoc::io
