#include "hombfc/fisher.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "comb_internal.hpp"

namespace hombfc {
namespace {

bool zero_delay_peak(const CombParams& params, double tau) {
  return std::fabs(params.sigma * tau) < kZeroDelayGuard && params.phi == std::numbers::pi;
}

// Loss/visibility prefactor V^2 (1-g)^2 (1+g).
double channel_gain(const Channel& ch) {
  const double g = ch.gamma;
  return ch.visibility * ch.visibility * (1.0 - g) * (1.0 - g) * (1.0 + g);
}

// Denominator of the non-resolved information, ((1 + V h)(1 + 3g - (1-g) V h)),
// arranged so each factor is a sum of non-negative terms.
double nonresolved_denominator(const Channel& ch, const InterferenceTerm& h) {
  const double g = ch.gamma;
  const double v = ch.visibility;
  const double plus = (1.0 - v) + v * (1.0 + h.value);
  const double minus = (1.0 + 3.0 * g - (1.0 - g) * v) + (1.0 - g) * v * h.deficit;
  return plus * minus;
}

// x / (offset + slope * x), with the offset == 0 limit taken explicitly so
// the removable 0/0 at fringe extrema never produces NaN.
double saturating_ratio(double x, double offset, double slope) {
  if (offset == 0.0) return slope == 0.0 ? 0.0 : 1.0 / slope;
  return x / (offset + slope * x);
}

}  // namespace

const char* to_string(Scheme scheme) {
  return scheme == Scheme::resolved ? "resolved" : "nonresolved";
}

double quantum_fisher_Q(const CombParams& params) {
  const double m = params.m;
  return (m * m - 1.0) * params.mu * params.mu / 3.0 + params.delta * params.delta +
         4.0 * params.sigma * params.sigma;
}

double quantum_fisher_Q_numeric(const CombParams& params, const QuadSpec& spec) {
  const double norm = spectral_norm(params, spec);
  const double edge = omega_domain(params).hi;
  const auto intensity = [&](double w) {
    const double f = jsa_amplitude(params, w);
    return f * f;
  };
  const double first = detail::integrate_over_pair_lattice(
      [&](double w) { return w * intensity(w); }, params, spec, norm * edge);
  const double second = detail::integrate_over_pair_lattice(
      [&](double w) { return w * w * intensity(w); }, params, spec);
  // 4 <(delta/2 + W)^2> = delta^2 + 4 delta <W> + 4 <W^2>
  const double d = params.delta;
  return d * d + 4.0 * d * first / norm + 4.0 * second / norm;
}

double quantum_fisher_Q_series(const CombParams& params) {
  const auto centers = mode_centers(params);
  const double s2 = params.sigma * params.sigma;
  const double inv = 1.0 / (8.0 * s2);
  double norm = 0.0;
  double first = 0.0;
  double second = 0.0;
  for (const double ck : centers) {
    for (const double cj : centers) {
      const double gap = ck - cj;
      const double a = std::exp(-gap * gap * inv);
      const double mid = 0.5 * (ck + cj);
      norm += a;
      first += a * mid;
      second += a * (mid * mid + s2);
    }
  }
  const double d = params.delta;
  return d * d + 4.0 * d * first / norm + 4.0 * second / norm;
}

double qcrb(const CombParams& params, long long n_repeats) {
  if (n_repeats < 1) throw std::invalid_argument("n_repeats must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(n_repeats) * quantum_fisher_Q(params));
}

double fisher_nonresolved(const CombParams& params, const Channel& channel, double tau) {
  if (channel.ideal() && zero_delay_peak(params, tau)) return quantum_fisher_Q(params);
  if (channel.visibility == 0.0) return 0.0;
  const auto h = interference_term(params, tau);
  return channel_gain(channel) * h.derivative * h.derivative /
         nonresolved_denominator(channel, h);
}

double fisher_nonresolved_ideal(const CombParams& params, double tau) {
  if (zero_delay_peak(params, tau)) return quantum_fisher_Q(params);
  const auto h = interference_term(params, tau);
  return h.derivative * h.derivative / ((1.0 + h.value) * h.deficit);
}

double fisher_resolved(const CombParams& params, const Channel& channel, double tau,
                       const QuadSpec& spec) {
  const double g = channel.gamma;
  const double v = channel.visibility;
  if (v == 0.0) return 0.0;
  const double gain = channel_gain(channel);
  const double bright_offset = 1.0 - v;
  const double dark_offset = 1.0 + 3.0 * g - (1.0 - g) * v;

  // Information per unit frequency, divided by the comb density. With
  // x = (delta + 2W) tau, sin^2 x / ((1 + V cos x)(1 + 3g - (1-g) V cos x))
  // is rewritten through cos^2(x/2) and sin^2(x/2).
  const auto weight = [&](double w) {
    const double k = params.delta + 2.0 * w;
    const double c = std::cos(0.5 * k * tau);
    const double s = std::sin(0.5 * k * tau);
    const double bright = saturating_ratio(2.0 * c * c, bright_offset, v);
    const double dark = saturating_ratio(2.0 * s * s, dark_offset, (1.0 - g) * v);
    return gain * k * k * bright * dark;
  };

  if (params.mu / params.sigma >= 10.0) {
    // Well separated modes: one Gaussian per panel.
    const double norm = 1.0 / (params.sigma * std::sqrt(2.0 * std::numbers::pi));
    const double inv = 1.0 / (2.0 * params.sigma * params.sigma);
    double total = 0.0;
    for (const double center : mode_centers(params)) {
      total += integrate(
          [&](double w) {
            const double d = w - center;
            return norm * std::exp(-d * d * inv) * weight(w);
          },
          center - 8.0 * params.sigma, center + 8.0 * params.sigma, spec);
    }
    return total / params.m;
  }
  return detail::integrate_over_comb(
      [&](double w) { return comb_density(params, w) * weight(w); }, params, spec);
}

double fisher_resolved_ideal(const CombParams& params) { return quantum_fisher_Q(params); }

FisherPoint fisher_point(const CombParams& params, const Channel& channel, double tau,
                         Scheme scheme, const QuadSpec& spec) {
  FisherPoint p;
  p.tau = tau;
  p.scheme = scheme;
  p.ideal = channel.ideal();
  p.value = scheme == Scheme::resolved ? fisher_resolved(params, channel, tau, spec)
                                       : fisher_nonresolved(params, channel, tau);
  return p;
}

double fi_ratio(const CombParams& params, const Channel& channel, double tau) {
  if (channel.ideal()) return 1.0;
  const double ideal = fisher_nonresolved_ideal(params, tau);
  if (!(ideal > kUninformativeFraction * quantum_fisher_Q(params))) {
    std::ostringstream msg;
    msg << "uninformative delay: ideal Fisher information vanishes at tau = " << tau;
    throw UninformativeDelay(msg.str(), tau);
  }
  if (zero_delay_peak(params, tau)) {
    return fisher_nonresolved(params, channel, tau) / ideal;
  }
  // The derivative factors cancel; what remains is a ratio of denominators.
  const auto h = interference_term(params, tau);
  return channel_gain(channel) * (1.0 + h.value) * h.deficit /
         nonresolved_denominator(channel, h);
}

EnhancementResult enhancement_factor(const CombParams& params, const Channel& channel,
                                     double tau, const QuadSpec& spec) {
  EnhancementResult out;
  out.resolved = fisher_resolved(params, channel, tau, spec);
  out.nonresolved = fisher_nonresolved(params, channel, tau);
  if (out.nonresolved > kUninformativeFraction * quantum_fisher_Q(params)) {
    out.factor = out.resolved / out.nonresolved;
  }
  return out;
}

double asymptotic_ratio(const Channel& channel) {
  return channel_gain(channel) / (1.0 + 3.0 * channel.gamma);
}

}  // namespace hombfc
