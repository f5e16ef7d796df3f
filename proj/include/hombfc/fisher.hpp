#pragma once

#include <optional>

#include "hombfc/comb_model.hpp"
#include "hombfc/interference.hpp"
#include "hombfc/numerics.hpp"

namespace hombfc {

enum class Scheme { non_resolved, resolved };

const char* to_string(Scheme scheme);

struct FisherPoint {
  double tau = 0.0;
  double value = 0.0;
  Scheme scheme = Scheme::non_resolved;
  bool ideal = false;
};

/// Quantum Fisher information of the comb probe,
///   Q = (m^2 - 1) mu^2 / 3 + delta^2 + 4 sigma^2.
double quantum_fisher_Q(const CombParams& params);

/// Q from quadrature of the |f|^2-weighted moments of (delta/2 + W), with
/// the full amplitude (neighbouring-mode overlaps included). Agrees with
/// quantum_fisher_Q only as the overlaps vanish.
double quantum_fisher_Q_numeric(const CombParams& params, const QuadSpec& spec = {});

/// quantum_fisher_Q_numeric evaluated from the Gaussian pair expansion of
/// |f|^2 instead of quadrature.
double quantum_fisher_Q_series(const CombParams& params);

/// Quantum Cramer-Rao bound 1 / sqrt(N Q).
double qcrb(const CombParams& params, long long n_repeats);

/// Fisher information of the three-outcome (non-resolved) measurement.
double fisher_nonresolved(const CombParams& params, const Channel& channel, double tau);

/// fisher_nonresolved for a lossless, unit-visibility channel. Tends to Q
/// at zero delay.
double fisher_nonresolved_ideal(const CombParams& params, double tau);

/// Fisher information of the spectrally resolved measurement, integrated
/// over the comb spectrum. Uses the peak convention (phi = pi).
double fisher_resolved(const CombParams& params, const Channel& channel, double tau,
                       const QuadSpec& spec = {});

/// Ideal resolved Fisher information; equal to Q at every delay.
double fisher_resolved_ideal(const CombParams& params);

FisherPoint fisher_point(const CombParams& params, const Channel& channel, double tau,
                         Scheme scheme, const QuadSpec& spec = {});

/// Below this fraction of Q a Fisher information is treated as zero when it
/// appears in a denominator.
inline constexpr double kUninformativeFraction = 1e-12;

/// F / F_ideal for the non-resolved scheme. Throws UninformativeDelay where
/// F_ideal vanishes.
double fi_ratio(const CombParams& params, const Channel& channel, double tau);

/// F' / F. When F vanishes only the resolved value is reported.
struct EnhancementResult {
  double resolved = 0.0;
  double nonresolved = 0.0;
  std::optional<double> factor;
};
EnhancementResult enhancement_factor(const CombParams& params, const Channel& channel,
                                     double tau, const QuadSpec& spec = {});

/// Plateau of fi_ratio for large m: V^2 (1-g)^2 (1+g) / (1+3g).
double asymptotic_ratio(const Channel& channel);

}  // namespace hombfc
