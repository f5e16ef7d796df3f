#include <atomic>
#include <cstdlib>
#include <cstring>

#include "hombfc/simd/fringe.hpp"

namespace hombfc::simd {
namespace {

Backend detect() {
  if (const char* env = std::getenv("HOMBFC_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& selected() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool avx2_available() {
#if defined(HOMBFC_HAVE_AVX2_TU)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::avx2 && !avx2_available()) backend = Backend::scalar;
  selected().store(backend, std::memory_order_relaxed);
}

const char* to_string(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

void fringe_sums(const FringeInput& in, double tau, std::span<double> dark_out,
                 std::span<double> slope_out) {
#if defined(HOMBFC_HAVE_AVX2_TU)
  if (active_backend() == Backend::avx2) {
    fringe_sums_avx2(in, tau, dark_out, slope_out);
    return;
  }
#endif
  fringe_sums_scalar(in, tau, dark_out, slope_out);
}

}  // namespace hombfc::simd
