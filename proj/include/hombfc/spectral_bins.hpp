#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hombfc/comb_model.hpp"

namespace hombfc {

inline constexpr int kDefaultSpectralBins = 64;

/// `bins` equal-width bins spanning omega_domain(params).
std::vector<double> uniform_bin_edges(const CombParams& params, int bins);

/// Bin containing omega; values outside the edges go to the first or last
/// bin.
std::size_t bin_index(std::span<const double> edges, double omega);

/// Per-bin click probabilities and their tau-derivatives. The one-click
/// derivative is -d2 bin by bin, and the untagged no-click probability is
/// tau-independent.
struct BinnedProbs {
  std::vector<double> p2;
  std::vector<double> p1;
  std::vector<double> d2;
  double p0 = 0.0;
};

/// Resolved outcome probabilities integrated over frequency bins
/// (peak convention). Each bin is covered by 8-point Gauss-Legendre panels
/// no wider than sigma / 4; the fringe sums run through the SIMD kernel.
class BinnedModel {
 public:
  BinnedModel(const CombParams& params, const Channel& channel, std::vector<double> edges);

  std::size_t bins() const { return edges_.size() - 1; }
  const std::vector<double>& edges() const { return edges_; }
  /// Comb density mass per bin.
  const std::vector<double>& mass() const { return mass_; }

  void evaluate(double tau, BinnedProbs& out) const;
  BinnedProbs evaluate(double tau) const;

  /// Fisher information of the binned record:
  ///   sum_b d2_b^2 (1 / p2_b + 1 / p1_b).
  /// Terms with a vanishing probability and vanishing slope contribute 0.
  double fisher(double tau) const;

 private:
  Channel channel_;
  std::vector<double> edges_;
  std::vector<double> k_;
  std::vector<double> w_;
  std::vector<double> wk_;
  std::vector<std::size_t> offsets_;
  std::vector<double> mass_;
};

/// Fisher information with `bins` uniform bins.
double fisher_resolved_binned(const CombParams& params, const Channel& channel, double tau,
                              int bins);

}  // namespace hombfc
