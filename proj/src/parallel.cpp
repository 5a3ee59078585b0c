#include "tokex/parallel.hpp"

#include <cstdlib>
#include <string>

namespace tokex {

unsigned default_threads() {
  if (const char* env = std::getenv("TOKEX_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace tokex
