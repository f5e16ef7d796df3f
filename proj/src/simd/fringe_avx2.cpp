#include <immintrin.h>

#include <cmath>

#include "hombfc/simd/fringe.hpp"

namespace hombfc::simd {
namespace {

// Cody-Waite split of pi/2 into 33-bit pieces; q * kPio2Hi is exact for
// |q| < 2^20.
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Mid = 6.07710050630396597660e-11;
constexpr double kPio2Lo = 2.02226624871116645580e-21;

// Minimax kernels on [-pi/4, pi/4] (fdlibm k_sin / k_cos).
constexpr double kS1 = -1.66666666666666324348e-01;
constexpr double kS2 = 8.33333333332248946124e-03;
constexpr double kS3 = -1.98412698298579493134e-04;
constexpr double kS4 = 2.75573137070700676789e-06;
constexpr double kS5 = -2.50507602534068634195e-08;
constexpr double kS6 = 1.58969099521155010221e-10;

constexpr double kC1 = 4.16666666666666019037e-02;
constexpr double kC2 = -1.38888888888741095749e-03;
constexpr double kC3 = 2.48015872894767294178e-05;
constexpr double kC4 = -2.75573143513906633035e-07;
constexpr double kC5 = 2.08757232129817482790e-09;
constexpr double kC6 = -1.13596475577881948265e-11;

// Arguments beyond this fall back to libm.
constexpr double kMaxArgument = 1e5;

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

inline void sincos4(__m256d x, __m256d* sin_out, __m256d* cos_out) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(x, splat(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(q, splat(kPio2Hi), x);
  r = _mm256_fnmadd_pd(q, splat(kPio2Mid), r);
  r = _mm256_fnmadd_pd(q, splat(kPio2Lo), r);

  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_fmadd_pd(z, splat(kS6), splat(kS5));
  ps = _mm256_fmadd_pd(z, ps, splat(kS4));
  ps = _mm256_fmadd_pd(z, ps, splat(kS3));
  ps = _mm256_fmadd_pd(z, ps, splat(kS2));
  ps = _mm256_fmadd_pd(z, ps, splat(kS1));
  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_fmadd_pd(z, splat(kC6), splat(kC5));
  pc = _mm256_fmadd_pd(z, pc, splat(kC4));
  pc = _mm256_fmadd_pd(z, pc, splat(kC3));
  pc = _mm256_fmadd_pd(z, pc, splat(kC2));
  pc = _mm256_fmadd_pd(z, pc, splat(kC1));
  pc = _mm256_mul_pd(z, pc);  // C1 z + ... + C6 z^6
  const __m256d hz = _mm256_mul_pd(splat(0.5), z);
  const __m256d w = _mm256_sub_pd(splat(1.0), hz);
  const __m256d tail = _mm256_sub_pd(_mm256_sub_pd(splat(1.0), w), hz);
  const __m256d c = _mm256_add_pd(w, _mm256_fmadd_pd(z, pc, tail));

  // Quadrant selection on q mod 4.
  const __m256i qi = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(q));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d swap =
      _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(qi, one), one));
  const __m256i sin_flip = _mm256_slli_epi64(_mm256_and_si256(qi, two), 62);
  const __m256i cos_flip =
      _mm256_slli_epi64(_mm256_and_si256(_mm256_add_epi64(qi, one), two), 62);

  const __m256d sv = _mm256_blendv_pd(s, c, swap);
  const __m256d cv = _mm256_blendv_pd(c, s, swap);
  *sin_out = _mm256_xor_pd(sv, _mm256_castsi256_pd(sin_flip));
  *cos_out = _mm256_xor_pd(cv, _mm256_castsi256_pd(cos_flip));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

void fringe_sums_avx2(const FringeInput& in, double tau, std::span<double> dark_out,
                      std::span<double> slope_out) {
  const double half_tau = 0.5 * tau;
  double max_k = 0.0;
  for (const double k : in.k) max_k = std::fmax(max_k, std::fabs(k));
  if (max_k * std::fabs(half_tau) > kMaxArgument) {
    fringe_sums_scalar(in, tau, dark_out, slope_out);
    return;
  }

  const __m256d vhalf = splat(half_tau);
  const __m256d two = splat(2.0);
  const std::size_t bins = in.offsets.size() - 1;
  for (std::size_t b = 0; b < bins; ++b) {
    std::size_t j = in.offsets[b];
    const std::size_t end = in.offsets[b + 1];
    __m256d acc_dark = _mm256_setzero_pd();
    __m256d acc_slope = _mm256_setzero_pd();
    for (; j + 4 <= end; j += 4) {
      const __m256d x = _mm256_mul_pd(_mm256_loadu_pd(in.k.data() + j), vhalf);
      __m256d sv;
      __m256d cv;
      sincos4(x, &sv, &cv);
      const __m256d w2 = _mm256_mul_pd(two, _mm256_loadu_pd(in.w.data() + j));
      const __m256d wk2 = _mm256_mul_pd(two, _mm256_loadu_pd(in.wk.data() + j));
      acc_dark = _mm256_fmadd_pd(_mm256_mul_pd(w2, sv), sv, acc_dark);
      acc_slope = _mm256_fmadd_pd(_mm256_mul_pd(wk2, sv), cv, acc_slope);
    }
    double dark = hsum(acc_dark);
    double slope = hsum(acc_slope);
    for (; j < end; ++j) {
      const double x = in.k[j] * half_tau;
      const double s = std::sin(x);
      const double c = std::cos(x);
      dark += 2.0 * in.w[j] * s * s;
      slope += 2.0 * in.wk[j] * s * c;
    }
    dark_out[b] = dark;
    slope_out[b] = slope;
  }
}

}  // namespace hombfc::simd
