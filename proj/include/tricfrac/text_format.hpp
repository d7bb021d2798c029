#pragma once

#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace tricfrac {

// All user-facing numbers are printed at 17 significant digits so repeated
// runs emit byte-identical artifacts on IEEE-754 double platforms.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

inline std::string format_complex_pair(std::complex<double> z) {
  return "[" + format_double(z.real()) + "," + format_double(z.imag()) + "]";
}

inline std::string format_double_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  out += "]";
  return out;
}

inline std::string format_complex_array(const std::vector<std::complex<double>>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_complex_pair(values[i]);
  }
  out += "]";
  return out;
}

inline std::string format_bool_array(const std::vector<bool>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += values[i] ? "true" : "false";
  }
  out += "]";
  return out;
}

}  // namespace tricfrac
