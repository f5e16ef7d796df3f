#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "hombfc/comb_model.hpp"
#include "support.hpp"

using namespace hombfc;

namespace {

CombParams comb(int m, double mu, double sigma = 1.0) {
  CombParams p;
  p.m = m;
  p.mu = mu;
  p.sigma = sigma;
  return p;
}

std::string message_of(const CombParams& p) {
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("comb_model") {

TEST_CASE("mode centers") {
  CHECK(mode_centers(comb(1, 3.0)) == std::vector<double>{0.0});
  CHECK(mode_centers(comb(2, 3.0)) == std::vector<double>{-1.5, 1.5});
  CHECK(mode_centers(comb(3, 2.0)) == std::vector<double>{-2.0, 0.0, 2.0});
}

TEST_CASE("joint spectral amplitude") {
  CHECK(jsa_amplitude(comb(1, 3.0), 0.0) == 1.0);
  // Two-term sum at the midpoint, each mode 1.5 sigma away.
  const double two_mode = std::exp(-1.5 * 1.5 / 4.0) + std::exp(-1.5 * 1.5 / 4.0);
  CHECK(jsa_amplitude(comb(2, 3.0), 0.0) == doctest::Approx(two_mode).epsilon(1e-15));
  CHECK(two_mode == doctest::Approx(1.13957).epsilon(1e-5));
}

TEST_CASE("amplitude is even in omega") {
  testing::Draws draws(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = draws.params(0.5);
    const double w = draws.uniform(-60.0, 60.0);
    CHECK(jsa_amplitude(p, w) == doctest::Approx(jsa_amplitude(p, -w)).epsilon(1e-14));
  }
}

TEST_CASE("comb density integrates to one") {
  testing::Draws draws(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = draws.params(0.5);
    const auto dom = omega_domain(p);
    const double mass = integrate([&](double w) { return comb_density(p, w); }, dom.lo, dom.hi,
                                  QuadSpec{0.0, 1e-12, 5000});
    CHECK(std::fabs(mass - 1.0) < 1e-10);
  }
}

TEST_CASE("omega domain spans eight widths past the outer modes") {
  const auto dom = omega_domain(comb(3, 4.0, 0.5));
  CHECK(dom.lo == doctest::Approx(-4.0 - 4.0));
  CHECK(dom.hi == doctest::Approx(4.0 + 4.0));
}

TEST_CASE("spectral norm") {
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  CHECK(spectral_norm(comb(1, 3.0)) == doctest::Approx(root2pi).epsilon(1e-12));
  CHECK(testing::rel_err(spectral_norm(comb(2, 20.0)), 2.0 * root2pi) < 1e-10);
  CHECK(spectral_norm(comb(2, 1.0)) > 2.0 * root2pi);
}

TEST_CASE("spectral norm tends to m sigma sqrt(2 pi) for separated modes") {
  for (const int m : {2, 5, 12}) {
    for (const double sigma : {0.5, 1.0, 2.0}) {
      const auto p = comb(m, 40.0 * sigma, sigma);
      CHECK(testing::rel_err(spectral_norm(p), m * sigma * std::sqrt(2.0 * std::numbers::pi)) < 1e-8);
    }
  }
}

TEST_CASE("detail factor values") {
  for (const int m : {1, 2, 3, 7, 20}) CHECK(detail_factor(m, 0.0) == m);
  CHECK(detail_factor(5, 1e-12) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(detail_factor(2, std::numbers::pi / 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  for (const double theta : {0.0, 0.3, 2.0, std::numbers::pi}) CHECK(detail_factor(1, theta) == 1.0);
  // Limit at theta = n pi: m cos(n m pi) / cos(n pi).
  CHECK(detail_factor(4, std::numbers::pi) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(detail_factor(5, std::numbers::pi) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(detail_factor(4, 2.0 * std::numbers::pi) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("detail factor matches the cosine sum and stays within [-m, m]") {
  testing::Draws draws(23);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = draws.integer(1, 30);
    const double theta = draws.uniform(-20.0, 20.0);
    double sum = 0.0;
    for (int k = 1; k <= m; ++k) sum += std::cos((2 * k - m - 1) * theta);
    const double d = detail_factor(m, theta);
    CHECK(std::fabs(d - sum) < 1e-11 * m * m);
    CHECK(std::fabs(d) <= m + 1e-12);
  }
}

TEST_CASE("detail factor is continuous across its removable singularities") {
  for (const int m : {2, 3, 6, 20}) {
    for (const double centre : {0.0, std::numbers::pi, -std::numbers::pi, 2.0 * std::numbers::pi}) {
      double prev = detail_factor(m, centre - 3e-6);
      for (int i = -299; i <= 300; ++i) {
        const double theta = centre + i * 1e-8;
        const double d = detail_factor(m, theta);
        CHECK(std::fabs(d - prev) < 1e-9 + 1e-8 * std::fabs(detail_factor_derivative(m, theta)));
        prev = d;
      }
      // Both sides of the guard agree.
      const double inside = detail_factor(m, centre + 0.99e-6);
      const double outside = detail_factor(m, centre + 1.01e-6);
      CHECK(std::fabs(inside - outside) < 1e-9);
    }
  }
}

TEST_CASE("detail factor derivative and deficit") {
  testing::Draws draws(24);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = draws.integer(1, 20);
    const double theta = draws.uniform(-6.0, 6.0);
    const double h = 1e-6;
    const double fd = (detail_factor(m, theta + h) - detail_factor(m, theta - h)) / (2.0 * h);
    CHECK(std::fabs(detail_factor_derivative(m, theta) - fd) < 1e-6 * m * m * m);
    CHECK(std::fabs(detail_factor_deficit(m, theta) - (m - detail_factor(m, theta))) < 1e-12 * m * m);
  }
  // Near theta = 0 the deficit keeps full relative accuracy:
  // m - D = (m^3 - m) theta^2 / 6 to leading order.
  for (const int m : {2, 5, 10}) {
    const double theta = 1e-7;
    const double expected = (m * m * m - m) * theta * theta / 6.0;
    CHECK(testing::rel_err(detail_factor_deficit(m, theta), expected) < 1e-6);
  }
}

TEST_CASE("cross-term check") {
  const auto overlapping = cross_term_check(comb(3, 3.0));
  CHECK(overlapping.warning);
  CHECK(overlapping.bound == doctest::Approx(3.0 * std::exp(-9.0 / 8.0)));
  const auto separated = cross_term_check(comb(2, 20.0));
  CHECK_FALSE(separated.warning);
  CHECK(cross_term_check(comb(1, 0.1)).bound == 0.0);
}

TEST_CASE("validation names the offending field") {
  CombParams p;
  p.m = 0;
  CHECK(message_of(p).rfind("m:", 0) == 0);
  p = CombParams{};
  p.mu = -1.0;
  CHECK(message_of(p).rfind("mu:", 0) == 0);
  p = CombParams{};
  p.sigma = 0.0;
  CHECK(message_of(p).rfind("sigma:", 0) == 0);
  p = CombParams{};
  p.delta = -0.5;
  CHECK(message_of(p).rfind("delta:", 0) == 0);
  CHECK_THROWS_AS((Channel{1.0, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Channel{0.1, 1.5}.validate()), std::invalid_argument);
  CHECK(Channel{}.ideal());
}

}
