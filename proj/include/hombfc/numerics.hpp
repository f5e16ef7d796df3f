#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace hombfc {

/// Tolerances for adaptive quadrature. Accepts an estimate once its error
/// bound is below max(abs_tol, rel_tol * |I|).
struct QuadSpec {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;

  /// Throws std::invalid_argument on a spec that can never be satisfied.
  void validate() const;
};

/// Quadrature did not reach the requested accuracy. Carries the best
/// estimate and its error bound so callers can decide whether to use it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// g(lo) and g(hi) have the same strict sign.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RealFunction = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error_bound = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive Gauss-Kronrod (21-point) integration over [lo, hi].
QuadResult integrate_detailed(const RealFunction& f, double lo, double hi,
                              const QuadSpec& spec = {});

inline double integrate(const RealFunction& f, double lo, double hi,
                        const QuadSpec& spec = {}) {
  return integrate_detailed(f, lo, hi, spec).value;
}

/// Bracketed root of g on [lo, hi] (Brent). The returned point lies in a
/// final bracket no wider than tol. Exact zeros at the endpoints are
/// returned directly.
double find_root(const RealFunction& g, double lo, double hi, double tol);

/// Central difference (f(x+h) - f(x-h)) / 2h.
double finite_diff(const RealFunction& f, double x, double h);

}  // namespace hombfc
