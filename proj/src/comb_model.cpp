#include "hombfc/comb_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "comb_internal.hpp"

namespace hombfc {
namespace {

constexpr double kPi = std::numbers::pi;

// theta = n pi + eps with |eps| <= pi/2. sin(m theta)/sin(theta) equals
// sign * sin(m eps)/sin(eps) with sign = (-1)^(n (m - 1)).
struct ReducedAngle {
  double eps;
  double sign;
};

ReducedAngle reduce(int m, double theta) {
  const double eps = std::remainder(theta, kPi);
  const double n = std::nearbyint((theta - eps) / kPi);
  const bool odd = std::fmod(std::fabs(n), 2.0) == 1.0 && (m - 1) % 2 != 0;
  return {eps, odd ? -1.0 : 1.0};
}

// Offsets 2k - m - 1 run over -(m-1), -(m-3), ..., m-1.
template <class Fn>
double sum_over_offsets(int m, Fn&& term) {
  double acc = 0.0;
  for (int k = 1; k <= m; ++k) acc += term(static_cast<double>(2 * k - m - 1));
  return acc;
}

}  // namespace

void CombParams::validate() const {
  if (m < 1) throw std::invalid_argument("m: mode number must be >= 1");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu: mode spacing must be > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma: bandwidth must be > 0");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta: detuning must be >= 0");
  if (!std::isfinite(phi)) throw std::invalid_argument("phi: phase must be finite");
}

void Channel::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma: loss must lie in [0, 1)");
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("visibility: must lie in [0, 1]");
  }
}

std::vector<double> mode_centers(const CombParams& params) {
  std::vector<double> centers;
  centers.reserve(static_cast<size_t>(params.m));
  for (int k = 1; k <= params.m; ++k) {
    centers.push_back(0.5 * (2 * k - params.m - 1) * params.mu);
  }
  return centers;
}

namespace detail {

ModeRange modes_near(const CombParams& params, double omega, double reach) {
  // c_k = (2k - m - 1) mu / 2  =>  k = (2 c / mu + m + 1) / 2
  const double lo = 0.5 * (2.0 * (omega - reach) / params.mu + params.m + 1);
  const double hi = 0.5 * (2.0 * (omega + reach) / params.mu + params.m + 1);
  ModeRange r;
  r.first = std::max(1, static_cast<int>(std::ceil(std::max(lo, -1.0e9))));
  r.last = std::min(params.m, static_cast<int>(std::floor(std::min(hi, 1.0e9))));
  return r;
}

double integrate_panels(const RealFunction& f, double lo, double hi, double step,
                        double origin, const QuadSpec& spec, double scale) {
  QuadSpec panel_spec = spec;
  panel_spec.abs_tol = std::max(spec.abs_tol, 1e-2 * spec.rel_tol * scale);
  // Panels are centered on origin + t * step, so every peak on that lattice
  // sits in the middle of its panel.
  double total = 0.0;
  double left = lo;
  double t = std::floor((lo - origin) / step - 0.5) + 1.0;
  for (;; t += 1.0) {
    const double boundary = origin + (t + 0.5) * step;
    if (boundary <= left) continue;
    const double right = std::min(boundary, hi);
    total += integrate(f, left, right, panel_spec);
    left = right;
    if (right >= hi) break;
  }
  return total;
}

double integrate_over_comb(const RealFunction& f, const CombParams& params,
                           const QuadSpec& spec, double scale) {
  const OmegaDomain dom = omega_domain(params);
  return integrate_panels(f, dom.lo, dom.hi, params.mu, 0.5 * (1 - params.m) * params.mu, spec,
                          scale);
}

double integrate_over_pair_lattice(const RealFunction& f, const CombParams& params,
                                   const QuadSpec& spec, double scale) {
  const OmegaDomain dom = omega_domain(params);
  return integrate_panels(f, dom.lo, dom.hi, 0.5 * params.mu, 0.0, spec, scale);
}

}  // namespace detail

double jsa_amplitude(const CombParams& params, double omega) {
  const double inv = 1.0 / (4.0 * params.sigma * params.sigma);
  const auto r = detail::modes_near(params, omega, 60.0 * params.sigma);
  double acc = 0.0;
  for (int k = r.first; k <= r.last; ++k) {
    const double d = 0.5 * (2 * k - params.m - 1) * params.mu - omega;
    acc += std::exp(-d * d * inv);
  }
  return acc;
}

double comb_density(const CombParams& params, double omega) {
  const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
  const auto r = detail::modes_near(params, omega, 40.0 * params.sigma);
  double acc = 0.0;
  for (int k = r.first; k <= r.last; ++k) {
    const double d = 0.5 * (2 * k - params.m - 1) * params.mu - omega;
    acc += std::exp(-d * d * inv);
  }
  return acc / (params.m * params.sigma * std::sqrt(2.0 * kPi));
}

OmegaDomain omega_domain(const CombParams& params) {
  const double edge = 0.5 * (params.m - 1) * params.mu + 8.0 * params.sigma;
  return {-edge, edge};
}

double spectral_norm(const CombParams& params, const QuadSpec& spec) {
  return detail::integrate_over_pair_lattice(
      [&](double w) {
        const double f = jsa_amplitude(params, w);
        return f * f;
      },
      params, spec);
}

double detail_factor(int m, double theta) {
  if (m == 1) return 1.0;
  const auto [eps, sign] = reduce(m, theta);
  if (std::fabs(std::sin(theta)) < kDetailSingularityGuard) {
    // m cos(n m pi)/cos(n pi) plus the leading curvature correction.
    const double mm = static_cast<double>(m);
    return sign * mm * (1.0 - (mm * mm - 1.0) * eps * eps / 6.0);
  }
  return sign * std::sin(m * eps) / std::sin(eps);
}

double detail_factor_derivative(int m, double theta) {
  if (m == 1) return 0.0;
  const auto [eps, sign] = reduce(m, theta);
  if (std::fabs(m * eps) < 0.5) {
    // -sum_j j sin(j eps): every term has the sign of eps, no cancellation.
    return -sign * sum_over_offsets(m, [eps](double j) { return j * std::sin(j * eps); });
  }
  const double s = std::sin(eps);
  const double c = std::cos(eps);
  return sign * (m * std::cos(m * eps) * s - std::sin(m * eps) * c) / (s * s);
}

double detail_factor_deficit(int m, double theta) {
  if (m == 1) return 0.0;
  const auto [eps, sign] = reduce(m, theta);
  if (sign > 0.0 && std::fabs(m * eps) < 1.0) {
    // m - sum_j cos(j eps) = 2 sum_j sin^2(j eps / 2)
    return 2.0 * sum_over_offsets(m, [eps](double j) {
             const double s = std::sin(0.5 * j * eps);
             return s * s;
           });
  }
  return m - detail_factor(m, theta);
}

CrossTermCheck cross_term_check(const CombParams& params) {
  CrossTermCheck out;
  if (params.m > 1) {
    const double r = params.mu / params.sigma;
    out.bound = params.m * std::exp(-r * r / 8.0);
  }
  out.warning = out.bound > kCrossTermWarnLevel;
  return out;
}

}  // namespace hombfc
