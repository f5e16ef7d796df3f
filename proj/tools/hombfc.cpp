// Command-line front end: QCRB report, Fisher-information sweeps, Monte
// Carlo MLE experiments and the oracle self-check.
//
// Exit codes: 0 success, 1 check or computation failure, 2 invalid input.

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hombfc/config.hpp"
#include "hombfc/estimation.hpp"
#include "hombfc/fisher.hpp"
#include "hombfc/records_json.hpp"
#include "hombfc/selfcheck.hpp"
#include "hombfc/simd/fringe.hpp"
#include "hombfc/sweep.hpp"

namespace {

using namespace hombfc;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string seed_text = "0";
  std::optional<double> sigma_hz;
  unsigned threads = 0;
};

struct GridOptions {
  double tau_min = 0.0;
  double tau_max = 3.0;
  int tau_points = 601;
};

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError("--seed: expected an integer in [0, 2^64), got '" + text + "'");
  }
  return value;
}

SweepContext make_context(const CommonOptions& common, bool config_required) {
  SweepContext ctx;
  if (common.config_path.empty()) {
    if (config_required) throw UsageError("--config is required");
    ctx.config = default_config();
  } else {
    ctx.config = load_config(common.config_path);
  }
  ctx.seed = parse_seed(common.seed_text);
  if (common.sigma_hz && !(*common.sigma_hz > 0.0)) {
    throw UsageError("--sigma-hz must be > 0");
  }
  ctx.sigma_hz = common.sigma_hz;
  ctx.threads = common.threads;
  return ctx;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw UsageError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void emit(const SweepResult& result, const CommonOptions& common) {
  Output out(common.out_path);
  if (common.format == "json") {
    write_json(result, out.stream());
  } else {
    write_csv(result, out.stream());
  }
}

TauGrid make_grid(const GridOptions& g) {
  TauGrid grid{g.tau_min, g.tau_max, g.tau_points};
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return grid;
}

void add_common(CLI::App* cmd, CommonOptions& common, bool with_format) {
  cmd->add_option("--config", common.config_path, "Key-value parameter file");
  cmd->add_option("--out", common.out_path, "Output path (default: stdout)");
  cmd->add_option("--seed", common.seed_text, "Seed echoed in metadata and used for sampling");
  cmd->add_option("--sigma-hz", common.sigma_hz,
                  "Angular frequency of sigma in s^-1; converts delays to seconds");
  cmd->add_option("--threads", common.threads, "Worker threads (0: all cores)");
  if (with_format) {
    cmd->add_option("--format", common.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

void add_grid(CLI::App* cmd, GridOptions& grid) {
  cmd->add_option("--tau-min", grid.tau_min, "First delay (units of 1/sigma)");
  cmd->add_option("--tau-max", grid.tau_max, "Last delay (units of 1/sigma)");
  cmd->add_option("--tau-points", grid.tau_points, "Number of delays");
}

int run_qcrb(const CommonOptions& common, long long n_repeats) {
  const auto ctx = make_context(common, true);
  if (n_repeats < 1) throw UsageError("--n must be >= 1");
  const double q = quantum_fisher_Q(ctx.config.params);
  double delta_tau = qcrb(ctx.config.params, n_repeats);
  double q_out = q;
  if (ctx.sigma_hz) {
    const double scale = *ctx.sigma_hz / ctx.config.params.sigma;
    delta_tau /= scale;
    q_out *= scale * scale;
  }
  Output out(common.out_path);
  auto& os = out.stream();
  if (common.format == "json") {
    Json j{{"metadata", run_metadata(ctx, "qcrb")},
           {"n_repeats", n_repeats},
           {"Q", q_out},
           {"delta_tau", delta_tau}};
    os << j.dump(2) << '\n';
  } else if (common.format == "csv") {
    os << "# " << run_metadata(ctx, "qcrb").dump() << '\n';
    os << "n_repeats,Q,delta_tau\n"
       << n_repeats << ',' << format_number(q_out) << ',' << format_number(delta_tau) << '\n';
  } else {
    os << "Q = " << format_number(q_out) << '\n'
       << "N = " << n_repeats << '\n'
       << "delta_tau = " << format_number(delta_tau) << '\n';
  }
  return kExitOk;
}

std::vector<Scheme> schemes_for(const std::string& name) {
  if (name == "resolved") return {Scheme::resolved};
  if (name == "nonresolved") return {Scheme::non_resolved};
  return {Scheme::non_resolved, Scheme::resolved};
}

SchemeSelection selection_for(const std::string& name) {
  if (name == "resolved") return SchemeSelection::resolved;
  if (name == "nonresolved") return SchemeSelection::nonresolved;
  return SchemeSelection::both;
}

struct MleCliOptions {
  std::string scheme = "both";
  std::optional<double> tau_true;
  long long n_events = 10000;
  int n_trials = 300;
  int bins = kDefaultSpectralBins;
  std::optional<double> window_lo;
  std::optional<double> window_hi;
};

int run_simulate(const CommonOptions& common, const MleCliOptions& o) {
  const auto ctx = make_context(common, true);
  if (!o.tau_true) throw UsageError("--tau-true is required");
  if (o.n_events < 1) throw UsageError("--n-events must be >= 1");
  if (o.n_trials < 2) throw UsageError("--n-trials must be >= 2");
  if (o.bins < 1) throw UsageError("--bins must be >= 1");
  if (o.window_lo.has_value() != o.window_hi.has_value()) {
    throw UsageError("--window-lo and --window-hi must be given together");
  }
  ExperimentOptions opts;
  opts.bins = o.bins;
  opts.threads = ctx.threads;
  if (o.window_lo) {
    if (!(*o.window_lo < *o.window_hi)) throw UsageError("--window-lo must be below --window-hi");
    opts.window = SearchWindow{*o.window_lo, *o.window_hi};
  }

  Json reports = Json::array();
  for (const auto scheme : schemes_for(o.scheme)) {
    auto rep = estimator_experiment(ctx.config.params, ctx.config.channel, *o.tau_true,
                                    o.n_events, o.n_trials, scheme, ctx.seed, opts);
    Json j = to_json(rep);
    if (ctx.sigma_hz) {
      const double scale = *ctx.sigma_hz / ctx.config.params.sigma;
      for (const char* key : {"tau_true", "tau_hat_mean", "tau_hat_std", "crb_prediction"}) {
        if (j[key].is_number()) j[key] = j[key].get<double>() / scale;
      }
      j["window"] = {rep.window.lo / scale, rep.window.hi / scale};
    }
    reports.push_back(std::move(j));
  }
  Json meta = run_metadata(ctx, "simulate-mle");
  meta["n_events"] = o.n_events;
  meta["n_trials"] = o.n_trials;
  meta["bins"] = o.bins;
  meta["generator"] = "mt19937_64 seeded by std::seed_seq{seed_lo, seed_hi, trial}";

  Output out(common.out_path);
  out.stream() << Json{{"metadata", meta}, {"reports", reports}}.dump(2) << '\n';
  return kExitOk;
}

int run_selfcheck_cmd(const CommonOptions& common) {
  const auto ctx = make_context(common, false);
  const auto report = run_selfcheck(ctx.config);
  Output out(common.out_path);
  auto& os = out.stream();
  if (common.format == "json") {
    Json checks = Json::array();
    for (const auto& c : report.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    Json j{{"metadata", run_metadata(ctx, "selfcheck")},
           {"simd_backend", simd::to_string(simd::active_backend())},
           {"warnings", report.warnings},
           {"checks", checks},
           {"passed", report.passed()}};
    os << j.dump(2) << '\n';
  } else {
    for (const auto& w : report.warnings) os << "WARNING " << w << '\n';
    for (const auto& c : report.checks) {
      os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
    if (const auto* f = report.first_failure()) {
      os << "selfcheck failed: " << f->name << '\n';
    } else {
      os << "selfcheck passed\n";
    }
  }
  if (const auto* f = report.first_failure()) {
    if (!common.out_path.empty()) std::cerr << "selfcheck failed: " << f->name << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timing-precision limits for Hong-Ou-Mandel interferometry with frequency combs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hombfc::version()));

  CommonOptions common;
  GridOptions grid;
  long long n_repeats = 1;
  std::string scheme = "both";
  std::vector<int> m_grid = default_m_grid();
  std::vector<double> tau_fixed = default_ratio_taus();
  bool reference_groups = false;
  MleCliOptions mle;

  auto* qcrb_cmd = app.add_subcommand("qcrb", "Quantum Fisher information and QCRB");
  add_common(qcrb_cmd, common, true);
  qcrb_cmd->add_option("--n", n_repeats, "Number of repetitions N");

  auto* fi_cmd = app.add_subcommand("fi-sweep", "sqrt(F) against delay for both schemes");
  add_common(fi_cmd, common, true);
  add_grid(fi_cmd, grid);
  fi_cmd->add_option("--scheme", scheme)->check(CLI::IsMember({"resolved", "nonresolved", "both"}));

  auto* ratio_cmd = app.add_subcommand("ratio-sweep", "F / F_ideal against mode number");
  add_common(ratio_cmd, common, true);
  ratio_cmd->add_option("--m-grid", m_grid, "Mode numbers")->delimiter(',');
  ratio_cmd->add_option("--tau-fixed", tau_fixed, "Fixed delays (units of 1/sigma)")
      ->delimiter(',');
  ratio_cmd->add_flag("--reference-groups", reference_groups,
                      "Add the (gamma, V) groups (0.01, 0.99), (0.1, 0.99), (0.4, 0.9)");

  auto* enh_cmd = app.add_subcommand("enhancement-sweep", "F'/F against delay");
  add_common(enh_cmd, common, true);
  add_grid(enh_cmd, grid);

  auto* mle_cmd = app.add_subcommand("simulate-mle", "Monte Carlo maximum-likelihood experiment");
  add_common(mle_cmd, common, false);
  mle_cmd->add_option("--scheme", mle.scheme)
      ->check(CLI::IsMember({"resolved", "nonresolved", "both"}));
  mle_cmd->add_option("--tau-true", mle.tau_true, "True delay (units of 1/sigma)");
  mle_cmd->add_option("--n-events", mle.n_events, "Events per trial");
  mle_cmd->add_option("--n-trials", mle.n_trials, "Number of trials");
  mle_cmd->add_option("--bins", mle.bins, "Frequency bins of the resolved record");
  mle_cmd->add_option("--window-lo", mle.window_lo, "Search window start");
  mle_cmd->add_option("--window-hi", mle.window_hi, "Search window end");

  auto* check_cmd = app.add_subcommand("selfcheck", "Run the oracle suites");
  add_common(check_cmd, common, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*qcrb_cmd) return run_qcrb(common, n_repeats);
    if (*fi_cmd) {
      const auto ctx = make_context(common, true);
      emit(fi_sweep(ctx, selection_for(scheme), make_grid(grid)), common);
      return kExitOk;
    }
    if (*ratio_cmd) {
      const auto ctx = make_context(common, true);
      emit(ratio_sweep(ctx, m_grid, tau_fixed, reference_groups), common);
      return kExitOk;
    }
    if (*enh_cmd) {
      const auto ctx = make_context(common, true);
      emit(enhancement_sweep(ctx, make_grid(grid)), common);
      return kExitOk;
    }
    if (*mle_cmd) return run_simulate(common, mle);
    if (*check_cmd) return run_selfcheck_cmd(common);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}
