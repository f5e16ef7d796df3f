#include "hombfc/interference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "comb_internal.hpp"
#include "hombfc/fisher.hpp"

namespace hombfc {
namespace {

bool at_zero_delay(const CombParams& params, double tau) {
  return std::fabs(params.sigma * tau) < kZeroDelayGuard;
}

}  // namespace

InterferenceTerm interference_term(const CombParams& params, double tau) {
  const double s2 = params.sigma * params.sigma;
  const double m = params.m;
  const double theta = params.mu * tau;
  const double arg = params.delta * tau + (params.phi - std::numbers::pi);

  const double envelope = std::exp(-2.0 * s2 * tau * tau);
  const double envelope_deficit = -std::expm1(-2.0 * s2 * tau * tau);
  const double beat = std::cos(arg);
  const double half = std::sin(0.5 * arg);
  const double beat_deficit = 2.0 * half * half;
  const double comb = detail_factor(params.m, theta) / m;
  const double comb_deficit = detail_factor_deficit(params.m, theta) / m;
  const double comb_slope = params.mu * detail_factor_derivative(params.m, theta) / m;

  InterferenceTerm t;
  t.value = envelope * beat * comb;
  // 1 - abc = (1 - a) + a (1 - b) + a b (1 - c)
  t.deficit = envelope_deficit + envelope * beat_deficit + envelope * beat * comb_deficit;
  t.derivative = envelope * (-4.0 * s2 * tau * beat * comb -
                             params.delta * std::sin(arg) * comb + beat * comb_slope);
  return t;
}

double coincidence_mean(const CombParams& params, const Channel& channel, double tau) {
  const auto h = interference_term(params, tau);
  const double loss = 1.0 - channel.gamma;
  return 0.5 * loss * loss * (1.0 + channel.visibility * h.value);
}

double coincidence_mean_derivative(const CombParams& params, const Channel& channel,
                                   double tau) {
  const auto h = interference_term(params, tau);
  const double loss = 1.0 - channel.gamma;
  return 0.5 * loss * loss * channel.visibility * h.derivative;
}

OutcomeProbs outcome_probs(const CombParams& params, const Channel& channel, double tau) {
  const auto h = interference_term(params, tau);
  const double g = channel.gamma;
  const double v = channel.visibility;
  OutcomeProbs p;
  p.r2 = 0.5 * (1.0 - g) * (1.0 - g) * (1.0 + v * h.value);
  p.r1 = 0.5 * (1.0 - g) * ((1.0 + 3.0 * g - (1.0 - g) * v) + (1.0 - g) * v * h.deficit);
  p.r0 = g * g;
  return p;
}

OutcomeDerivs outcome_derivs(const CombParams& params, const Channel& channel, double tau) {
  OutcomeDerivs d;
  d.d2 = coincidence_mean_derivative(params, channel, tau);
  d.d1 = -d.d2;
  return d;
}

double sensitivity_delta_tau(const CombParams& params, const Channel& channel, double tau,
                             long long n_repeats) {
  if (n_repeats < 1) throw std::invalid_argument("n_repeats must be >= 1");
  const double n = static_cast<double>(n_repeats);
  if (at_zero_delay(params, tau) && channel.ideal() && params.phi == std::numbers::pi) {
    return 1.0 / std::sqrt(n * quantum_fisher_Q(params));
  }
  const auto h = interference_term(params, tau);
  const double g = channel.gamma;
  const double v = channel.visibility;
  const double loss2 = (1.0 - g) * (1.0 - g);
  const double mean = 0.5 * loss2 * (1.0 + v * h.value);
  const double complement = 0.5 * (g * (2.0 - g) + loss2 * ((1.0 - v) + v * h.deficit));
  const double slope = 0.5 * loss2 * v * h.derivative;
  if (slope == 0.0) {
    std::ostringstream msg;
    msg << "uninformative delay: coincidence slope vanishes at tau = " << tau;
    throw UninformativeDelay(msg.str(), tau);
  }
  return std::sqrt(mean * complement) / std::fabs(slope) / std::sqrt(n);
}

double sensitivity_ideal(const CombParams& params, double tau) {
  if (at_zero_delay(params, tau) && params.phi == std::numbers::pi) {
    return 1.0 / std::sqrt(quantum_fisher_Q(params));
  }
  const auto h = interference_term(params, tau);
  if (h.derivative == 0.0) {
    std::ostringstream msg;
    msg << "uninformative delay: coincidence slope vanishes at tau = " << tau;
    throw UninformativeDelay(msg.str(), tau);
  }
  return std::sqrt((1.0 + h.value) * h.deficit) / std::fabs(h.derivative);
}

ResolvedDensities resolved_densities(const CombParams& params, const Channel& channel,
                                     double tau, double omega) {
  const double g = channel.gamma;
  const double v = channel.visibility;
  const double p = comb_density(params, omega);
  const double fringe = std::cos((params.delta + 2.0 * omega) * tau);
  ResolvedDensities d;
  d.rho2 = 0.5 * (1.0 - g) * (1.0 - g) * (1.0 + v * fringe) * p;
  d.rho1 = 0.5 * (1.0 - g) * ((1.0 + 3.0 * g) - (1.0 - g) * v * fringe) * p;
  d.rho0 = g * g * p;
  return d;
}

double coincidence_oracle_exact(const CombParams& params, double tau, const QuadSpec& spec) {
  const double norm = spectral_norm(params, spec);
  const double overlap = detail::integrate_over_pair_lattice(
      [&](double w) {
        return jsa_amplitude(params, w) * jsa_amplitude(params, -w) *
               std::cos((params.delta + 2.0 * w) * tau + params.phi);
      },
      params, spec, norm);
  return 0.5 - 0.5 * overlap / norm;
}

double coincidence_exact_series(const CombParams& params, double tau) {
  const auto centers = mode_centers(params);
  const double inv = 1.0 / (8.0 * params.sigma * params.sigma);
  double norm = 0.0;
  double overlap = 0.0;
  for (const double ck : centers) {
    for (const double cj : centers) {
      const double gap = ck - cj;
      const double a = std::exp(-gap * gap * inv);
      if (a == 0.0) continue;
      norm += a;
      overlap += a * std::cos((params.delta + ck + cj) * tau + params.phi);
    }
  }
  const double envelope = std::exp(-2.0 * params.sigma * params.sigma * tau * tau);
  return 0.5 - 0.5 * envelope * overlap / norm;
}

}  // namespace hombfc
