#pragma once

#include <chrono>
#include <cstdint>

namespace lowmem {

using SteadyTime = std::chrono::steady_clock::time_point;

inline SteadyTime now() { return std::chrono::steady_clock::now(); }

inline std::int64_t elapsed_ns(SteadyTime start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(now() - start).count();
}

}  // namespace lowmem
