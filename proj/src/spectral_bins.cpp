#include "hombfc/spectral_bins.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "hombfc/simd/fringe.hpp"

namespace hombfc {
namespace {

constexpr int kNodesPerPanel = 8;
constexpr double kPanelWidth = 0.25;  // in units of sigma

struct TableDeleter {
  void operator()(gsl_integration_glfixed_table* t) const {
    gsl_integration_glfixed_table_free(t);
  }
};

}  // namespace

std::vector<double> uniform_bin_edges(const CombParams& params, int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  const auto dom = omega_domain(params);
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  const double width = (dom.hi - dom.lo) / bins;
  for (int i = 0; i <= bins; ++i) edges[i] = dom.lo + i * width;
  edges.back() = dom.hi;
  return edges;
}

std::size_t bin_index(std::span<const double> edges, double omega) {
  const std::size_t bins = edges.size() - 1;
  const auto it = std::upper_bound(edges.begin(), edges.end(), omega);
  if (it == edges.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - edges.begin()) - 1, bins - 1);
}

BinnedModel::BinnedModel(const CombParams& params, const Channel& channel,
                         std::vector<double> edges)
    : channel_(channel), edges_(std::move(edges)) {
  params.validate();
  channel.validate();
  if (edges_.size() < 2) throw std::invalid_argument("bin_edges needs at least two entries");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) {
      throw std::invalid_argument("bin_edges must be strictly increasing");
    }
  }

  std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
      gsl_integration_glfixed_table_alloc(kNodesPerPanel));
  const double max_panel = kPanelWidth * params.sigma;

  offsets_.push_back(0);
  for (std::size_t b = 0; b + 1 < edges_.size(); ++b) {
    const double lo = edges_[b];
    const double hi = edges_[b + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_panel)));
    const double width = (hi - lo) / panels;
    double mass = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * width;
      const double c = p + 1 == panels ? hi : a + width;
      for (int i = 0; i < kNodesPerPanel; ++i) {
        double x = 0.0;
        double wi = 0.0;
        gsl_integration_glfixed_point(a, c, i, &x, &wi, table.get());
        const double w = wi * comb_density(params, x);
        const double k = params.delta + 2.0 * x;
        k_.push_back(k);
        w_.push_back(w);
        wk_.push_back(w * k);
        mass += w;
      }
    }
    offsets_.push_back(k_.size());
    mass_.push_back(mass);
  }
}

void BinnedModel::evaluate(double tau, BinnedProbs& out) const {
  const std::size_t n = bins();
  out.p2.resize(n);
  out.p1.resize(n);
  out.d2.resize(n);
  // Reuse p1/d2 as scratch for the kernel's dark and slope sums.
  simd::FringeInput in{k_, w_, wk_, offsets_};
  simd::fringe_sums(in, tau, out.p1, out.d2);

  const double g = channel_.gamma;
  const double v = channel_.visibility;
  const double loss = 1.0 - g;
  const double bright_gain = 0.5 * loss * loss;
  const double dark_offset = 1.0 + 3.0 * g - loss * v;
  for (std::size_t b = 0; b < n; ++b) {
    const double dark = out.p1[b];
    const double slope = out.d2[b];
    const double mass = mass_[b];
    // (1 + V cos x) = (1 + V) - V (1 - cos x), and similarly for p1.
    out.p2[b] = std::max(0.0, bright_gain * ((1.0 + v) * mass - v * dark));
    out.p1[b] = 0.5 * loss * (dark_offset * mass + loss * v * dark);
    out.d2[b] = -bright_gain * v * slope;
  }
  out.p0 = g * g;
}

BinnedProbs BinnedModel::evaluate(double tau) const {
  BinnedProbs out;
  evaluate(tau, out);
  return out;
}

double BinnedModel::fisher(double tau) const {
  const auto p = evaluate(tau);
  double total = 0.0;
  for (std::size_t b = 0; b < bins(); ++b) {
    const double d = p.d2[b];
    if (d == 0.0) continue;
    const double sq = d * d;
    if (p.p2[b] > 0.0) total += sq / p.p2[b];
    if (p.p1[b] > 0.0) total += sq / p.p1[b];
  }
  return total;
}

double fisher_resolved_binned(const CombParams& params, const Channel& channel, double tau,
                              int bins) {
  return BinnedModel(params, channel, uniform_bin_edges(params, bins)).fisher(tau);
}

}  // namespace hombfc
