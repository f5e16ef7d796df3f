#pragma once

#include <cstddef>
#include <span>

// Binned fringe sums for the spectrally resolved likelihood.
//
// Given quadrature nodes with fringe frequency k_j = delta + 2 W_j and
// weight w_j (quadrature weight times comb density), each bin b covers the
// node range [offsets[b], offsets[b+1]) and receives
//
//   dark_out[b]  = sum_j w_j (1 - cos(k_j tau)) = sum_j 2 w_j sin^2(k_j tau / 2)
//   slope_out[b] = sum_j w_j k_j sin(k_j tau)
//
// Both come from the half angle so the dark sum has no cancellation near
// tau = 0.
// The scalar variant is the reference; the AVX2 variant evaluates sin/cos
// with its own polynomial kernels and is checked against it.

namespace hombfc::simd {

enum class Backend { scalar, avx2 };

struct FringeInput {
  std::span<const double> k;
  std::span<const double> w;
  std::span<const double> wk;  // w_j * k_j
  std::span<const std::size_t> offsets;
};

void fringe_sums_scalar(const FringeInput& in, double tau, std::span<double> dark_out,
                        std::span<double> slope_out);

#if defined(HOMBFC_HAVE_AVX2_TU)
void fringe_sums_avx2(const FringeInput& in, double tau, std::span<double> dark_out,
                      std::span<double> slope_out);
#endif

/// True when the AVX2 variant is compiled in and the CPU supports AVX2+FMA.
bool avx2_available();

/// Backend used by fringe_sums. Defaults to the best available one; the
/// environment variable HOMBFC_SIMD=scalar forces the reference path.
Backend active_backend();
void set_backend(Backend backend);
const char* to_string(Backend backend);

void fringe_sums(const FringeInput& in, double tau, std::span<double> dark_out,
                 std::span<double> slope_out);

}  // namespace hombfc::simd
