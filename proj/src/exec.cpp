#include "mutualsec/exec.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace mutualsec {

namespace {

int env_thread_count() {
  const char* raw = std::getenv("MUTUALSEC_THREADS");
  if (raw != nullptr) {
    try {
      int n = std::stoi(raw);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

std::atomic<int> override_threads{0};

}  // namespace

int thread_count() {
  int n = override_threads.load(std::memory_order_relaxed);
  if (n > 0) return n;
  static const int from_env = env_thread_count();
  return from_env;
}

void set_thread_count(int n) { override_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace mutualsec
