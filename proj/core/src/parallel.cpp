#include "mango/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mango {

int default_worker_count() {
  if (const char* env = std::getenv("MANGO_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
      // fall through to hardware concurrency
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace mango
