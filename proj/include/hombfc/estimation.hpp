#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hombfc/comb_model.hpp"
#include "hombfc/fisher.hpp"
#include "hombfc/spectral_bins.hpp"

namespace hombfc {

/// Counts of zero-, one- and two-click events.
struct MeasurementRecord {
  long long n0 = 0;
  long long n1 = 0;
  long long n2 = 0;

  long long n_total() const { return n0 + n1 + n2; }
  void validate() const;
};

/// Click counts per frequency bin. No-click events carry no frequency tag.
struct SpectralRecord {
  std::vector<double> bin_edges;
  std::vector<long long> counts2;
  std::vector<long long> counts1;
  long long n0 = 0;

  std::size_t bins() const { return counts2.size(); }
  long long n_total() const;
  /// Bin-summed counts.
  MeasurementRecord collapse() const;
  void validate() const;
};

struct SearchWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// The estimator found no score root in the window. `fallback` is the grid
/// maximiser of the log-likelihood, or NaN when the likelihood is flat.
class EstimationFailure : public std::runtime_error {
 public:
  EstimationFailure(const std::string& what, double fallback)
      : std::runtime_error(what), fallback_(fallback) {}
  double fallback() const noexcept { return fallback_; }

 private:
  double fallback_;
};

struct MleOptions {
  int grid_points = 801;
  double root_tol = 1e-11;
};

/// Multinomial draw of n_events outcomes with probabilities outcome_probs.
/// Generator: std::mt19937_64 seeded through std::seed_seq.
MeasurementRecord sample_nonresolved(const CombParams& params, const Channel& channel,
                                     double tau_true, long long n_events, std::uint64_t seed);

/// Per event: a mode drawn uniformly, W from its Gaussian, then the click
/// outcome from the conditional probabilities at W. W is binned on uniform
/// bins over omega_domain(params), clamped to the outer bins.
SpectralRecord sample_resolved(const CombParams& params, const Channel& channel,
                               double tau_true, long long n_events, int bins,
                               std::uint64_t seed);

double log_likelihood_nonresolved(const MeasurementRecord& record, const CombParams& params,
                                  const Channel& channel, double tau);
double log_likelihood_resolved(const SpectralRecord& record, const BinnedModel& model,
                               double tau);

/// N2 R1(tau) - N1 R2(tau). Its roots are the stationary points of the
/// likelihood away from extrema of R2.
double score_nonresolved(const MeasurementRecord& record, const CombParams& params,
                         const Channel& channel, double tau);

/// d log L / d tau of the binned record,
///   sum_b d2_b (N2_b / p2_b - N1_b / p1_b).
/// With a single bin its roots contain those of score_nonresolved.
double score_resolved(const SpectralRecord& record, const BinnedModel& model, double tau);

/// Maximum-likelihood delay within the window. Every root of the score on
/// the grid is refined with find_root and the one with the largest
/// likelihood is returned. Throws EstimationFailure when there is none.
double mle_nonresolved(const MeasurementRecord& record, const CombParams& params,
                       const Channel& channel, SearchWindow window,
                       const MleOptions& options = {});
double mle_resolved(const SpectralRecord& record, const CombParams& params,
                    const Channel& channel, SearchWindow window,
                    const MleOptions& options = {});
double mle_resolved(const SpectralRecord& record, const BinnedModel& model,
                    SearchWindow window, const MleOptions& options = {});

/// Window used by estimator_experiment. Non-resolved: the monotone lobe of
/// the coincidence curve that contains tau_true, at most 3 / sigma to either
/// side. Resolved: tau_true +- 0.5 / sigma. Both are clipped to tau >= 0,
/// since the likelihoods are even in tau.
SearchWindow default_window(const CombParams& params, double tau_true, Scheme scheme);

struct ExperimentOptions {
  int bins = kDefaultSpectralBins;
  std::optional<SearchWindow> window;
  MleOptions mle;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct EstimatorReport {
  Scheme scheme = Scheme::non_resolved;
  double tau_true = 0.0;
  long long n_events = 0;
  int n_trials = 0;
  std::uint64_t seed = 0;
  int n_failures = 0;
  /// Over successful trials; empty when fewer than two succeeded.
  std::optional<double> tau_hat_mean;
  std::optional<double> tau_hat_std;
  /// 1 / sqrt(n_events F) with F the scheme's Fisher information at tau_true.
  std::optional<double> crb_prediction;
  double fisher = 0.0;
  /// Resolved scheme only: Fisher information of the binned record.
  std::optional<double> fisher_binned;
  int bins = 0;
  SearchWindow window;
};

/// Runs n_trials independent estimates. Trial t draws from the seed
/// sequence {seed low word, seed high word, t}; trials may run concurrently
/// and are aggregated in trial order, so the report depends only on the
/// inputs.
EstimatorReport estimator_experiment(const CombParams& params, const Channel& channel,
                                     double tau_true, long long n_events, int n_trials,
                                     Scheme scheme, std::uint64_t seed,
                                     const ExperimentOptions& options = {});

}  // namespace hombfc
