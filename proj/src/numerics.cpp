#include "hombfc/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_roots.h>

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace hombfc {
namespace {

// GSL's default handler aborts the process; errors are reported through
// return codes instead. The handler is process-global, so install it once.
void disable_gsl_abort() {
  static const bool installed = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)installed;
}

double trampoline(double x, void* params) {
  return (*static_cast<const RealFunction*>(params))(x);
}

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

struct SolverDeleter {
  void operator()(gsl_root_fsolver* s) const { gsl_root_fsolver_free(s); }
};

}  // namespace

void QuadSpec::validate() const {
  constexpr double kMinRelTol = 50.0 * std::numeric_limits<double>::epsilon();
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0)) {
    throw std::invalid_argument("QuadSpec: tolerances must be non-negative");
  }
  if (abs_tol == 0.0 && rel_tol < kMinRelTol) {
    throw std::invalid_argument("QuadSpec: rel_tol below 50 machine epsilons needs abs_tol > 0");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("QuadSpec: max_subdivisions must be >= 1");
  }
}

QuadResult integrate_detailed(const RealFunction& f, double lo, double hi,
                              const QuadSpec& spec) {
  spec.validate();
  if (!(lo < hi)) {
    throw std::invalid_argument("integrate: requires lo < hi");
  }
  disable_gsl_abort();

  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> work(
      gsl_integration_workspace_alloc(static_cast<size_t>(spec.max_subdivisions)));
  gsl_function fn{&trampoline, const_cast<RealFunction*>(&f)};

  QuadResult out;
  const int status = gsl_integration_qag(&fn, lo, hi, spec.abs_tol, spec.rel_tol,
                                         static_cast<size_t>(spec.max_subdivisions),
                                         GSL_INTEG_GAUSS21, work.get(), &out.value,
                                         &out.error_bound);
  out.subdivisions = static_cast<int>(work->size);
  if (status != GSL_SUCCESS) {
    std::ostringstream msg;
    msg << "integrate: " << gsl_strerror(status) << " on [" << lo << ", " << hi
        << "] (estimate " << out.value << ", error bound " << out.error_bound << ")";
    throw QuadratureError(msg.str(), out.value, out.error_bound);
  }
  if (!std::isfinite(out.value)) {
    throw QuadratureError("integrate: non-finite integrand", out.value, out.error_bound);
  }
  return out;
}

double find_root(const RealFunction& g, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: tol must be positive");
  if (!(lo < hi)) throw std::invalid_argument("find_root: requires lo < hi");
  const double g_lo = g(lo);
  const double g_hi = g(hi);
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  if ((g_lo > 0.0) == (g_hi > 0.0)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << lo << ", " << hi << "]";
    throw BracketError(msg.str());
  }
  disable_gsl_abort();

  std::unique_ptr<gsl_root_fsolver, SolverDeleter> solver(
      gsl_root_fsolver_alloc(gsl_root_fsolver_brent));
  gsl_function fn{&trampoline, const_cast<RealFunction*>(&g)};
  gsl_root_fsolver_set(solver.get(), &fn, lo, hi);

  double root = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    if (gsl_root_fsolver_iterate(solver.get()) != GSL_SUCCESS) break;
    root = gsl_root_fsolver_root(solver.get());
    const double a = gsl_root_fsolver_x_lower(solver.get());
    const double b = gsl_root_fsolver_x_upper(solver.get());
    if (g(root) == 0.0 || b - a <= tol) return root;
  }
  return root;
}

double finite_diff(const RealFunction& f, double x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff: h must be positive");
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace hombfc
