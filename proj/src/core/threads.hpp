#pragma once

#include <cstdlib>
#include <omp.h>

namespace rpcs {

// Thread-count resolution used everywhere a caller may pass 0 ("pick for me"):
// explicit request > RPC_THREADS env var > OpenMP default. Never returns < 1.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RPC_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v < 1 << 16) return static_cast<int>(v);
  }
  int hw = omp_get_max_threads();
  return hw > 0 ? hw : 1;
}

}  // namespace rpcs
