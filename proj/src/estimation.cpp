#include "hombfc/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "hombfc/interference.hpp"
#include "hombfc/numerics.hpp"

namespace hombfc {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
}

// n log p with 0 log 0 = 0.
double xlogp(long long n, double p) {
  if (n == 0) return 0.0;
  return p > 0.0 ? static_cast<double>(n) * std::log(p)
                 : -std::numeric_limits<double>::infinity();
}

void check_events(long long n_events) {
  if (n_events < 1) throw std::invalid_argument("n_events must be >= 1");
}

void check_window(SearchWindow w) {
  if (!(w.lo < w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi)) {
    throw std::invalid_argument("search window must satisfy lo < hi");
  }
}

template <class Score, class LogL>
double maximise(const Score& score, const LogL& loglik, SearchWindow window,
                const MleOptions& options) {
  check_window(window);
  const int n = std::max(options.grid_points, 3);
  const double step = (window.hi - window.lo) / (n - 1);
  std::vector<double> grid(n);
  std::vector<double> s(n);
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  double fallback = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < n; ++i) {
    grid[i] = i + 1 == n ? window.hi : window.lo + i * step;
    s[i] = score(grid[i]);
    const double l = loglik(grid[i]);
    if (!std::isfinite(l)) continue;
    worst = std::min(worst, l);
    if (l > best) {
      best = l;
      fallback = grid[i];
    }
  }
  if (!std::isfinite(best) || best - worst <= 1e-12 * std::max(1.0, std::fabs(best))) {
    throw EstimationFailure("flat likelihood: the record carries no delay information",
                            std::numeric_limits<double>::quiet_NaN());
  }

  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    if (s[i] == 0.0) {
      roots.push_back(grid[i]);
      continue;
    }
    if (i + 1 < n && std::isfinite(s[i]) && std::isfinite(s[i + 1]) && s[i + 1] != 0.0 &&
        std::signbit(s[i]) != std::signbit(s[i + 1])) {
      roots.push_back(find_root(score, grid[i], grid[i + 1], options.root_tol));
    }
  }
  if (roots.empty()) {
    std::ostringstream msg;
    msg << "ambiguous or out-of-window: no score root in [" << window.lo << ", " << window.hi
        << "]";
    throw EstimationFailure(msg.str(), fallback);
  }
  double tau_hat = roots.front();
  double tau_hat_l = loglik(tau_hat);
  for (const double r : roots) {
    const double l = loglik(r);
    if (l > tau_hat_l) {
      tau_hat = r;
      tau_hat_l = l;
    }
  }
  return tau_hat;
}

// d/dtau of the coincidence curve, used to find the lobe boundaries.
double slope(const CombParams& params, double tau) {
  return interference_term(params, tau).derivative;
}

double lobe_edge(const CombParams& params, double start, double dir, double lo_bound,
                 double hi_bound) {
  const double step = 0.02 / (params.sigma + 0.5 * params.m * params.mu + params.delta);
  double ref = slope(params, start);
  if (ref == 0.0) ref = slope(params, std::clamp(start + dir * step, lo_bound, hi_bound));
  if (ref == 0.0) return start;
  double t = start;
  while (true) {
    const double next = std::clamp(t + dir * step, lo_bound, hi_bound);
    if (next == t) return t;
    const double s = slope(params, next);
    if (s == 0.0) return next;
    if (std::signbit(s) != std::signbit(ref)) {
      return find_root([&](double x) { return slope(params, x); }, std::min(t, next),
                       std::max(t, next), 1e-12 / params.sigma);
    }
    t = next;
  }
}

}  // namespace

void MeasurementRecord::validate() const {
  if (n0 < 0 || n1 < 0 || n2 < 0) throw std::invalid_argument("record counts must be >= 0");
  if (n_total() < 1) throw std::invalid_argument("record must contain at least one event");
}

long long SpectralRecord::n_total() const { return collapse().n_total(); }

MeasurementRecord SpectralRecord::collapse() const {
  MeasurementRecord r;
  r.n0 = n0;
  for (const long long c : counts1) r.n1 += c;
  for (const long long c : counts2) r.n2 += c;
  return r;
}

void SpectralRecord::validate() const {
  if (bin_edges.size() < 2) throw std::invalid_argument("bin_edges needs at least two entries");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) {
      throw std::invalid_argument("bin_edges must be strictly increasing");
    }
  }
  const std::size_t bins = bin_edges.size() - 1;
  if (counts2.size() != bins || counts1.size() != bins) {
    throw std::invalid_argument("count arrays must have one entry per bin");
  }
  for (std::size_t b = 0; b < bins; ++b) {
    if (counts2[b] < 0 || counts1[b] < 0) {
      throw std::invalid_argument("record counts must be >= 0");
    }
  }
  if (n0 < 0) throw std::invalid_argument("record counts must be >= 0");
  if (n_total() < 1) throw std::invalid_argument("record must contain at least one event");
}

MeasurementRecord sample_nonresolved(const CombParams& params, const Channel& channel,
                                     double tau_true, long long n_events, std::uint64_t seed) {
  params.validate();
  channel.validate();
  check_events(n_events);
  const auto p = outcome_probs(params, channel, tau_true);
  auto rng = make_engine(seed);

  MeasurementRecord r;
  const double p2 = std::clamp(p.r2, 0.0, 1.0);
  r.n2 = std::binomial_distribution<long long>(n_events, p2)(rng);
  const long long rest = n_events - r.n2;
  const double remaining = 1.0 - p2;
  const double p1 = remaining > 0.0 ? std::clamp(p.r1 / remaining, 0.0, 1.0) : 0.0;
  r.n1 = rest > 0 ? std::binomial_distribution<long long>(rest, p1)(rng) : 0;
  r.n0 = rest - r.n1;
  return r;
}

SpectralRecord sample_resolved(const CombParams& params, const Channel& channel,
                               double tau_true, long long n_events, int bins,
                               std::uint64_t seed) {
  params.validate();
  channel.validate();
  check_events(n_events);
  SpectralRecord r;
  r.bin_edges = uniform_bin_edges(params, bins);
  r.counts2.assign(bins, 0);
  r.counts1.assign(bins, 0);

  const auto centers = mode_centers(params);
  const double g = channel.gamma;
  const double v = channel.visibility;
  const double loss = 1.0 - g;
  auto rng = make_engine(seed);
  std::uniform_int_distribution<int> mode(0, params.m - 1);
  std::normal_distribution<double> spread(0.0, params.sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (long long e = 0; e < n_events; ++e) {
    const double omega = centers[mode(rng)] + spread(rng);
    const double fringe = std::cos((params.delta + 2.0 * omega) * tau_true);
    const double c2 = 0.5 * loss * loss * (1.0 + v * fringe);
    const double c1 = 0.5 * loss * ((1.0 + 3.0 * g) - loss * v * fringe);
    const double u = unit(rng);
    if (u < c2) {
      ++r.counts2[bin_index(r.bin_edges, omega)];
    } else if (u < c2 + c1) {
      ++r.counts1[bin_index(r.bin_edges, omega)];
    } else {
      ++r.n0;
    }
  }
  return r;
}

double log_likelihood_nonresolved(const MeasurementRecord& record, const CombParams& params,
                                  const Channel& channel, double tau) {
  const auto p = outcome_probs(params, channel, tau);
  return xlogp(record.n2, p.r2) + xlogp(record.n1, p.r1) + xlogp(record.n0, p.r0);
}

double log_likelihood_resolved(const SpectralRecord& record, const BinnedModel& model,
                               double tau) {
  const auto p = model.evaluate(tau);
  double total = xlogp(record.n0, p.p0);
  for (std::size_t b = 0; b < record.bins(); ++b) {
    total += xlogp(record.counts2[b], p.p2[b]) + xlogp(record.counts1[b], p.p1[b]);
  }
  return total;
}

double score_nonresolved(const MeasurementRecord& record, const CombParams& params,
                         const Channel& channel, double tau) {
  const auto p = outcome_probs(params, channel, tau);
  return static_cast<double>(record.n2) * p.r1 - static_cast<double>(record.n1) * p.r2;
}

double score_resolved(const SpectralRecord& record, const BinnedModel& model, double tau) {
  const auto p = model.evaluate(tau);
  double total = 0.0;
  for (std::size_t b = 0; b < record.bins(); ++b) {
    const double d = p.d2[b];
    if (d == 0.0) continue;
    if (record.counts2[b] > 0) total += d * static_cast<double>(record.counts2[b]) / p.p2[b];
    if (record.counts1[b] > 0) total -= d * static_cast<double>(record.counts1[b]) / p.p1[b];
  }
  return total;
}

double mle_nonresolved(const MeasurementRecord& record, const CombParams& params,
                       const Channel& channel, SearchWindow window,
                       const MleOptions& options) {
  record.validate();
  if (record.n1 + record.n2 < 1) {
    throw EstimationFailure("record has no click events",
                            std::numeric_limits<double>::quiet_NaN());
  }
  return maximise([&](double t) { return score_nonresolved(record, params, channel, t); },
                  [&](double t) { return log_likelihood_nonresolved(record, params, channel, t); },
                  window, options);
}

double mle_resolved(const SpectralRecord& record, const BinnedModel& model,
                    SearchWindow window, const MleOptions& options) {
  record.validate();
  if (record.bin_edges != model.edges()) {
    throw std::invalid_argument("record bin_edges differ from the model's");
  }
  const auto totals = record.collapse();
  if (totals.n1 + totals.n2 < 1) {
    throw EstimationFailure("record has no click events",
                            std::numeric_limits<double>::quiet_NaN());
  }
  return maximise([&](double t) { return score_resolved(record, model, t); },
                  [&](double t) { return log_likelihood_resolved(record, model, t); }, window,
                  options);
}

double mle_resolved(const SpectralRecord& record, const CombParams& params,
                    const Channel& channel, SearchWindow window, const MleOptions& options) {
  record.validate();
  const BinnedModel model(params, channel, record.bin_edges);
  return mle_resolved(record, model, window, options);
}

SearchWindow default_window(const CombParams& params, double tau_true, Scheme scheme) {
  params.validate();
  const double start = std::fabs(tau_true);
  if (scheme == Scheme::resolved) {
    return {std::max(0.0, start - 0.5 / params.sigma), start + 0.5 / params.sigma};
  }
  const double reach = 3.0 / params.sigma;
  const double lo_bound = std::max(0.0, start - reach);
  const double hi_bound = start + reach;
  SearchWindow w{lobe_edge(params, start, -1.0, lo_bound, hi_bound),
                 lobe_edge(params, start, 1.0, lo_bound, hi_bound)};
  if (!(w.lo < w.hi)) w = {lo_bound, hi_bound};
  return w;
}

EstimatorReport estimator_experiment(const CombParams& params, const Channel& channel,
                                     double tau_true, long long n_events, int n_trials,
                                     Scheme scheme, std::uint64_t seed,
                                     const ExperimentOptions& options) {
  params.validate();
  channel.validate();
  check_events(n_events);
  if (n_trials < 2) throw std::invalid_argument("n_trials must be >= 2");

  EstimatorReport report;
  report.scheme = scheme;
  report.tau_true = tau_true;
  report.n_events = n_events;
  report.n_trials = n_trials;
  report.seed = seed;
  report.window = options.window.value_or(default_window(params, tau_true, scheme));

  std::optional<BinnedModel> model;
  if (scheme == Scheme::resolved) {
    report.bins = options.bins;
    model.emplace(params, channel, uniform_bin_edges(params, options.bins));
    report.fisher = fisher_resolved(params, channel, tau_true);
    report.fisher_binned = model->fisher(tau_true);
  } else {
    report.fisher = fisher_nonresolved(params, channel, tau_true);
  }
  if (report.fisher > 0.0) {
    report.crb_prediction = 1.0 / std::sqrt(static_cast<double>(n_events) * report.fisher);
  }

  std::vector<std::optional<double>> estimates(n_trials);
  std::vector<std::exception_ptr> errors(n_trials);
  const auto run = [&](int trial) {
    const std::uint64_t s = trial_seed(seed, trial);
    try {
      if (scheme == Scheme::resolved) {
        const auto rec = sample_resolved(params, channel, tau_true, n_events, options.bins, s);
        estimates[trial] = mle_resolved(rec, *model, report.window, options.mle);
      } else {
        const auto rec = sample_nonresolved(params, channel, tau_true, n_events, s);
        estimates[trial] = mle_nonresolved(rec, params, channel, report.window, options.mle);
      }
    } catch (const EstimationFailure&) {
      estimates[trial].reset();
    } catch (...) {
      errors[trial] = std::current_exception();
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, static_cast<unsigned>(n_trials));
  if (threads == 1) {
    for (int t = 0; t < n_trials; ++t) run(t);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) {
      pool.emplace_back([&, id] {
        for (int t = static_cast<int>(id); t < n_trials; t += static_cast<int>(threads)) run(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  double sum = 0.0;
  int ok = 0;
  for (const auto& e : estimates) {
    if (!e) continue;
    sum += *e;
    ++ok;
  }
  report.n_failures = n_trials - ok;
  if (ok >= 2) {
    const double mean = sum / ok;
    double ss = 0.0;
    for (const auto& e : estimates) {
      if (e) ss += (*e - mean) * (*e - mean);
    }
    report.tau_hat_mean = mean;
    report.tau_hat_std = std::sqrt(ss / (ok - 1));
  }
  return report;
}

}  // namespace hombfc
