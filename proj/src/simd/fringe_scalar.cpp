#include <cmath>

#include "hombfc/simd/fringe.hpp"

namespace hombfc::simd {

void fringe_sums_scalar(const FringeInput& in, double tau, std::span<double> dark_out,
                        std::span<double> slope_out) {
  const double half_tau = 0.5 * tau;
  const std::size_t bins = in.offsets.size() - 1;
  for (std::size_t b = 0; b < bins; ++b) {
    double dark = 0.0;
    double slope = 0.0;
    for (std::size_t j = in.offsets[b]; j < in.offsets[b + 1]; ++j) {
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
