#include <atomic>
#include <cstdlib>
#include <string>

#include "pacsyn/kernels.hpp"

namespace pacsyn::kernels {

#ifndef PACSYN_HAVE_AVX2_TU
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_supports_avx2() {
#if defined(PACSYN_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Backend initial_backend() {
  const bool avx2 = avx2_table() != nullptr && cpu_supports_avx2();
  if (const char* env = std::getenv("PACSYN_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return Backend::Scalar;
    if (value == "avx2" && avx2) return Backend::Avx2;
  }
  return avx2 ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

const KernelTable& active() {
  return active_backend() == Backend::Avx2 ? *avx2_table() : scalar_table();
}

bool select_backend(Backend backend) {
  if (backend == Backend::Avx2 && (avx2_table() == nullptr || !cpu_supports_avx2())) return false;
  current().store(backend, std::memory_order_relaxed);
  return true;
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace pacsyn::kernels
