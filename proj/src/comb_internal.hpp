#pragma once

#include "hombfc/comb_model.hpp"

namespace hombfc::detail {

struct ModeRange {
  int first = 1;
  int last = 0;
};

/// Modes whose centers lie within `reach` of omega.
ModeRange modes_near(const CombParams& params, double omega, double reach);

/// Sum of adaptive integrals over [lo, hi] split into panels of width step
/// centered on the lattice origin + t * step. `scale` bounds the magnitude
/// of the total; panels accept an absolute error of 1e-2 * rel_tol * scale
/// so that near-cancelling oscillatory panels terminate.
double integrate_panels(const RealFunction& f, double lo, double hi, double step,
                        double origin, const QuadSpec& spec, double scale = 0.0);

/// Integral over the truncated comb domain, one panel per mode center.
double integrate_over_comb(const RealFunction& f, const CombParams& params,
                           const QuadSpec& spec, double scale = 0.0);

/// As above but on the half-spacing lattice, where products of two comb
/// amplitudes (cross terms included) peak.
double integrate_over_pair_lattice(const RealFunction& f, const CombParams& params,
                                   const QuadSpec& spec, double scale = 0.0);

}  // namespace hombfc::detail
