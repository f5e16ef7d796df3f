#include "hombfc/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "comb_internal.hpp"
#include "hombfc/fisher.hpp"
#include "hombfc/interference.hpp"
#include "hombfc/simd/fringe.hpp"
#include "hombfc/spectral_bins.hpp"
#include "hombfc/sweep.hpp"

namespace hombfc {
namespace {

constexpr double kOracleTol = 1e-6;
constexpr double kSeriesTol = 1e-8;

std::vector<double> delays(double max, int points) {
  TauGrid grid{0.0, max, points};
  return grid.values();
}

double relative(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

std::string describe(const char* what, double value, double tol) {
  std::ostringstream s;
  s << what << " " << value << " (tolerance " << tol << ")";
  return s.str();
}

CheckResult check_quadrature(const RunConfig& cfg) {
  CheckResult r{"quadrature-accuracy", false, {}};
  const auto dom = omega_domain(cfg.params);
  try {
    const double mass =
        integrate([&](double w) { return comb_density(cfg.params, w); }, dom.lo, dom.hi, cfg.quad);
    // Narrow Lorentzian: a single Gauss-Kronrod pass cannot resolve it.
    const double width = 1e-2;
    const double peak = integrate([&](double x) { return 1.0 / (1.0 + (x / width) * (x / width)); },
                                  -1.0, 1.0, cfg.quad);
    const double err =
        std::max(std::fabs(mass - 1.0), std::fabs(peak - 2.0 * width * std::atan(1.0 / width)));
    r.passed = err <= 1e-8;
    r.detail = describe("max error", err, 1e-8);
  } catch (const QuadratureError& e) {
    r.detail = e.what();
  }
  return r;
}

CheckResult check_normalization(const RunConfig& cfg) {
  double worst = 0.0;
  for (const double tau : delays(3.0, 301)) {
    const auto p = outcome_probs(cfg.params, cfg.channel, tau);
    worst = std::max(worst, std::fabs(p.r2 + p.r1 + p.r0 - 1.0));
  }
  return {"normalization", worst <= 1e-12, describe("max |r2 + r1 + r0 - 1|", worst, 1e-12)};
}

CheckResult check_moment_oracle(const RunConfig& cfg, bool overlap,
                                std::vector<std::string>& warnings) {
  CheckResult r{"moment-oracle", false, {}};
  try {
    const double numeric = quantum_fisher_Q_numeric(cfg.params, cfg.quad);
    const double closed = quantum_fisher_Q(cfg.params);
    const double mismatch = relative(numeric, closed);
    if (!overlap) {
      r.passed = mismatch <= kOracleTol;
      r.detail = describe("relative mismatch", mismatch, kOracleTol);
      return r;
    }
    std::ostringstream w;
    w << "moment oracle differs from the closed-form Q by " << mismatch
      << " relative (Q = " << closed << ", with overlaps " << numeric << ")";
    warnings.push_back(w.str());
    const double series = relative(numeric, quantum_fisher_Q_series(cfg.params));
    r.passed = series <= kSeriesTol;
    r.detail = describe("relative mismatch to pair series", series, kSeriesTol);
  } catch (const QuadratureError& e) {
    r.detail = e.what();
  }
  return r;
}

CheckResult check_exact_oracle(const RunConfig& cfg, bool overlap,
                               std::vector<std::string>& warnings) {
  CheckResult r{"exact-jsa-oracle", false, {}};
  const Channel ideal;
  try {
    double closed_gap = 0.0;
    double series_gap = 0.0;
    for (const double tau : delays(3.0, 61)) {
      const double exact = coincidence_oracle_exact(cfg.params, tau, cfg.quad);
      closed_gap = std::max(closed_gap, std::fabs(exact - coincidence_mean(cfg.params, ideal, tau)));
      series_gap = std::max(series_gap, std::fabs(exact - coincidence_exact_series(cfg.params, tau)));
    }
    if (!overlap) {
      r.passed = closed_gap <= kOracleTol;
      r.detail = describe("max |exact - closed form|", closed_gap, kOracleTol);
      return r;
    }
    std::ostringstream w;
    w << "exact-amplitude coincidence differs from the closed form by up to " << closed_gap;
    warnings.push_back(w.str());
    r.passed = series_gap <= kSeriesTol;
    r.detail = describe("max |exact - pair series|", series_gap, kSeriesTol);
  } catch (const QuadratureError& e) {
    r.detail = e.what();
  }
  return r;
}

CheckResult check_marginalization(const RunConfig& cfg) {
  CheckResult r{"marginalization", false, {}};
  CombParams peak = cfg.params;
  peak.phi = std::numbers::pi;
  try {
    double worst = 0.0;
    for (const double tau : {0.0, 0.2, 0.7, 1.5}) {
      const auto p = outcome_probs(peak, cfg.channel, tau);
      const auto marginal = [&](auto pick) {
        return detail::integrate_over_comb(
            [&](double w) { return pick(resolved_densities(peak, cfg.channel, tau, w)); }, peak,
            cfg.quad, 1.0);
      };
      worst = std::max(worst, std::fabs(marginal([](const ResolvedDensities& d) { return d.rho2; }) - p.r2));
      worst = std::max(worst, std::fabs(marginal([](const ResolvedDensities& d) { return d.rho1; }) - p.r1));
      worst = std::max(worst, std::fabs(marginal([](const ResolvedDensities& d) { return d.rho0; }) - p.r0));
    }
    r.passed = worst <= 1e-8;
    r.detail = describe("max |integral - R_i|", worst, 1e-8);
  } catch (const QuadratureError& e) {
    r.detail = e.what();
  }
  return r;
}

// Differences are taken on the interference term itself: its magnitude
// decays with the envelope, so the rounding error of the difference
// quotient stays proportional to the slope being checked.
CheckResult check_derivatives(const RunConfig& cfg) {
  const auto& ch = cfg.channel;
  CombParams peak = cfg.params;
  peak.phi = std::numbers::pi;
  const double h = 1e-6 / peak.sigma;
  const double loss2 = (1.0 - ch.gamma) * (1.0 - ch.gamma);
  double slope_err = 0.0;
  double fisher_err = 0.0;
  for (const double tau : delays(3.0, 61)) {
    if (tau < 2.0 * h) continue;
    const double fd = finite_diff(
        [&](double t) { return interference_term(cfg.params, t).value; }, tau, h);
    const double mean_slope = 0.5 * loss2 * ch.visibility * fd;
    const double analytic = coincidence_mean_derivative(cfg.params, ch, tau);
    if (std::fabs(analytic) > 1e-6) slope_err = std::max(slope_err, relative(mean_slope, analytic));

    const auto probs = outcome_probs(peak, ch, tau);
    const double d2 =
        0.5 * loss2 * ch.visibility *
        finite_diff([&](double t) { return interference_term(peak, t).value; }, tau, h);
    double definitional = 0.0;
    if (probs.r2 > 0.0) definitional += d2 * d2 / probs.r2;
    if (probs.r1 > 0.0) definitional += d2 * d2 / probs.r1;
    const double closed = fisher_nonresolved(peak, ch, tau);
    if (closed > 1e-6 * quantum_fisher_Q(peak)) {
      fisher_err = std::max(fisher_err, relative(definitional, closed));
    }
  }
  const double worst = std::max(slope_err, fisher_err);
  return {"derivative-consistency", worst <= 1e-5,
          describe("max relative error", worst, 1e-5)};
}

CheckResult check_dominance(const RunConfig& cfg) {
  CheckResult r{"fisher-dominance", false, {}};
  try {
    const double q = quantum_fisher_Q(cfg.params);
    double worst = 0.0;
    for (const double tau : delays(3.0, 31)) {
      const double f = fisher_nonresolved(cfg.params, cfg.channel, tau);
      const double fr = fisher_resolved(cfg.params, cfg.channel, tau, cfg.quad);
      worst = std::max({worst, f - q, fr - q, f - fr});
    }
    r.passed = worst <= 1e-9;
    r.detail = describe("max violation", std::max(worst, 0.0), 1e-9);
  } catch (const QuadratureError& e) {
    r.detail = e.what();
  }
  return r;
}

CheckResult check_simd(const RunConfig& cfg) {
  if (!simd::avx2_available()) return {"simd-equivalence", true, "scalar backend only"};
  CombParams peak = cfg.params;
  peak.phi = std::numbers::pi;
  const BinnedModel model(peak, cfg.channel, uniform_bin_edges(peak, kDefaultSpectralBins));
  const auto previous = simd::active_backend();
  double worst = 0.0;
  for (const double tau : delays(3.0, 31)) {
    simd::set_backend(simd::Backend::scalar);
    const auto a = model.evaluate(tau);
    simd::set_backend(simd::Backend::avx2);
    const auto b = model.evaluate(tau);
    for (std::size_t i = 0; i < model.bins(); ++i) {
      worst = std::max({worst, std::fabs(a.p2[i] - b.p2[i]), std::fabs(a.p1[i] - b.p1[i])});
    }
  }
  simd::set_backend(previous);
  return {"simd-equivalence", worst <= 1e-13, describe("max |avx2 - scalar|", worst, 1e-13)};
}

}  // namespace

bool SelfcheckReport::passed() const { return first_failure() == nullptr; }

const CheckResult* SelfcheckReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

SelfcheckReport run_selfcheck(const RunConfig& config) {
  SelfcheckReport report;
  const auto cross = cross_term_check(config.params);
  if (cross.warning) {
    std::ostringstream w;
    w << "neighbouring modes overlap: cross-term bound " << cross.bound
      << " exceeds " << kCrossTermWarnLevel << "; closed forms are approximate";
    report.warnings.push_back(w.str());
  }
  report.checks.push_back(check_quadrature(config));
  report.checks.push_back(check_normalization(config));
  report.checks.push_back(check_moment_oracle(config, cross.warning, report.warnings));
  report.checks.push_back(check_exact_oracle(config, cross.warning, report.warnings));
  report.checks.push_back(check_marginalization(config));
  report.checks.push_back(check_derivatives(config));
  report.checks.push_back(check_dominance(config));
  report.checks.push_back(check_simd(config));
  return report;
}

}  // namespace hombfc
