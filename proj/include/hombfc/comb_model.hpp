#pragma once

#include <numbers>
#include <vector>

#include "hombfc/numerics.hpp"

namespace hombfc {

/// Biphoton frequency comb probe: m frequency-pair modes of RMS width sigma,
/// spaced by mu, with signal/idler detuning delta and relative phase phi.
///
/// Frequencies (mu, delta, sigma) share one unit and delays are measured in
/// its inverse. With the default sigma = 1 everything is in units of sigma.
struct CombParams {
  int m = 1;
  double mu = 3.0;
  double sigma = 1.0;
  double delta = 0.0;
  double phi = std::numbers::pi;  // peak convention

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Imperfections: per-photon loss gamma and interference visibility.
struct Channel {
  double gamma = 0.0;
  double visibility = 1.0;

  void validate() const;
  bool ideal() const { return gamma == 0.0 && visibility == 1.0; }
};

/// Centers (2k - m - 1) mu / 2 for k = 1..m.
std::vector<double> mode_centers(const CombParams& params);

/// Unnormalised multi-mode Gaussian amplitude
/// f(W) = sum_k exp(-(c_k - W)^2 / (4 sigma^2)).
double jsa_amplitude(const CombParams& params, double omega);

/// Normalised single-photon spectral density of the comb with cross terms
/// dropped: (1/m) sum_k N(W; c_k, sigma). Integrates to one exactly.
double comb_density(const CombParams& params, double omega);

/// Integration window [min center - 8 sigma, max center + 8 sigma].
struct OmegaDomain {
  double lo;
  double hi;
};
OmegaDomain omega_domain(const CombParams& params);

/// N_f = integral of f(W)^2, cross terms included.
double spectral_norm(const CombParams& params, const QuadSpec& spec = {});

/// sin(m theta) / sin(theta), continuous through theta = n pi.
double detail_factor(int m, double theta);

/// d/dtheta of detail_factor.
double detail_factor_derivative(int m, double theta);

/// m - detail_factor(m, theta), evaluated without cancellation where the
/// factor approaches its maximum m.
double detail_factor_deficit(int m, double theta);

/// Below this |sin(theta)| the limit branch replaces the rational form.
inline constexpr double kDetailSingularityGuard = 1e-6;

/// Magnitude of the neighbouring-mode overlap m * exp(-mu^2 / (8 sigma^2))
/// dropped by the closed forms.
struct CrossTermCheck {
  double bound = 0.0;
  bool warning = false;
};
inline constexpr double kCrossTermWarnLevel = 1e-6;
CrossTermCheck cross_term_check(const CombParams& params);

}  // namespace hombfc
