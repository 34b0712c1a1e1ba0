#include "equidist/parallel.hpp"

#include <cstdlib>
#include <string>

namespace equidist {

int default_threads() {
  if (const char* env = std::getenv("EQUIDIST_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace equidist
