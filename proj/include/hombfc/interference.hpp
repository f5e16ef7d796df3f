#pragma once

#include <stdexcept>

#include "hombfc/comb_model.hpp"
#include "hombfc/numerics.hpp"

namespace hombfc {

/// Detector-click probabilities: both detectors (r2), exactly one (r1),
/// none (r0).
struct OutcomeProbs {
  double r2 = 0.0;
  double r1 = 0.0;
  double r0 = 0.0;
};

/// tau-derivatives of OutcomeProbs. d1 = -d2 and d0 = 0 identically.
struct OutcomeDerivs {
  double d2 = 0.0;
  double d1 = 0.0;
  double d0 = 0.0;
};

/// Spectral densities per unit frequency at a fixed (tau, omega).
struct ResolvedDensities {
  double rho2 = 0.0;
  double rho1 = 0.0;
  double rho0 = 0.0;
};

/// The delay carries no information at this point (vanishing slope of the
/// measured statistic), so the requested precision diverges.
class UninformativeDelay : public std::runtime_error {
 public:
  UninformativeDelay(const std::string& what, double tau)
      : std::runtime_error(what), tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

/// Normalised interference term
///   h(tau) = exp(-2 sigma^2 tau^2) cos(delta tau + phi - pi) D(mu tau) / m
/// with D the detail factor. h = 1 at zero delay in the peak convention.
/// `deficit` is 1 - h computed without cancellation, which the Fisher
/// information needs close to tau = 0.
struct InterferenceTerm {
  double value = 0.0;
  double deficit = 1.0;
  double derivative = 0.0;
};
InterferenceTerm interference_term(const CombParams& params, double tau);

/// Coincidence probability
///   <S> = (1-g)^2/2 (1 - V/m e^{-2 s^2 t^2} cos(delta t + phi) D(mu t)).
double coincidence_mean(const CombParams& params, const Channel& channel, double tau);

double coincidence_mean_derivative(const CombParams& params, const Channel& channel,
                                   double tau);

/// Three-outcome distribution. At phi = pi, r2 equals coincidence_mean.
OutcomeProbs outcome_probs(const CombParams& params, const Channel& channel, double tau);
OutcomeDerivs outcome_derivs(const CombParams& params, const Channel& channel, double tau);

/// Error-propagation precision sqrt(Var S) / |d<S>/dtau| / sqrt(N) of the
/// coincidence observable. Throws UninformativeDelay where the slope
/// vanishes. Below |sigma tau| < 1e-8 in the ideal channel the zero-delay
/// limit 1/sqrt(N Q) is returned.
double sensitivity_delta_tau(const CombParams& params, const Channel& channel, double tau,
                             long long n_repeats);

/// Lossless, unit-visibility precision for a single repetition.
double sensitivity_ideal(const CombParams& params, double tau);

/// Spectrally resolved densities R'_i(tau, omega). These are written for the
/// peak convention and ignore params.phi.
ResolvedDensities resolved_densities(const CombParams& params, const Channel& channel,
                                     double tau, double omega);

/// Lossless coincidence probability from the full multi-Gaussian amplitude,
/// cross terms included:
///   R = 1/2 - 1/2 * int f(W) f(-W) cos((delta + 2W) tau + phi) dW / N_f.
double coincidence_oracle_exact(const CombParams& params, double tau,
                                const QuadSpec& spec = {});

/// The same coincidence probability from the Gaussian pair expansion
///   f(W)^2 = sum_kj exp(-(c_k - c_j)^2 / (8 sigma^2)) exp(-(W - (c_k + c_j)/2)^2 / (2 sigma^2)),
/// integrated term by term. Independent of the quadrature; O(m^2).
double coincidence_exact_series(const CombParams& params, double tau);

/// Zero-delay threshold below which limit branches replace 0/0 forms.
inline constexpr double kZeroDelayGuard = 1e-8;

}  // namespace hombfc
