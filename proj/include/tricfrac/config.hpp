#pragma once

#include <cstddef>
#include <cstdlib>

namespace tricfrac {

// Size cap for dense reference computations (inversion, Jacobi sweeps,
// full resolvents).  Overridable through TRICFRAC_DENSE_LIMIT; read once
// per process.
inline std::size_t dense_limit() {
  static const std::size_t value = [] {
    if (const char* env = std::getenv("TRICFRAC_DENSE_LIMIT")) {
      char* end = nullptr;
      const long parsed = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && parsed > 0) {
        return static_cast<std::size_t>(parsed);
      }
    }
    return static_cast<std::size_t>(500);
  }();
  return value;
}

}  // namespace tricfrac
