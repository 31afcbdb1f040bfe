#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ipm/bounds.hpp"
#include "ipm/errors.hpp"

using namespace ipm;

namespace {

BoundParams params_of(double alpha, std::size_t d, double K = 1.0,
                      double lambda = 1.0, double L = 1.0) {
  BoundParams p;
  p.alpha = alpha;
  p.d = d;
  p.K = K;
  p.lambda = lambda;
  p.L = L;
  return p;
}

// Direct numeric minimization of f(tau) = tau + a * integral_tau^1 e^-beta
// over a fine tau grid; the independent oracle for the closed form.
double grid_minimum(double a, double beta, int points) {
  double best = 1e300;
  for (int k = 1; k <= points; ++k) {
    const double tau = static_cast<double>(k) / points;
    const double integral = std::abs(beta - 1.0) < 1e-12
                                ? std::log(1.0 / tau)
                                : (1.0 - std::pow(tau, 1.0 - beta)) /
                                      (1.0 - beta);
    best = std::min(best, tau + a * integral);
  }
  return best;
}

}  // namespace

TEST_CASE("entropy bound arithmetic") {
  CHECK(entropy_upper_bound(0.5, params_of(1, 1)) == doctest::Approx(2.0));
  CHECK(entropy_upper_bound(1.0, params_of(1, 1, 4.0, 2.5)) ==
        doctest::Approx(10.0));
  // Doubling alpha and d together leaves the exponent unchanged.
  CHECK(entropy_upper_bound(0.25, params_of(2, 2)) ==
        doctest::Approx(entropy_upper_bound(0.25, params_of(1, 1))));
  // Radius enters through eps/L.
  CHECK(entropy_upper_bound(1.0, params_of(1, 1, 1, 1, 2)) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(entropy_upper_bound(0.0, params_of(1, 1)), ConfigError);
  CHECK_THROWS_AS(entropy_upper_bound(0.5, params_of(-1, 1)), ConfigError);
}

TEST_CASE("plain chaining integral: finite below the critical ratio") {
  DudleyPlainResult r = dudley_plain(params_of(1, 1), 1.0, 1.0);
  REQUIRE(!r.diverges);
  CHECK(r.value == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  // Scaling by C and the subgaussian constant is linear.
  DudleyPlainResult r2 = dudley_plain(params_of(1, 1), 2.0, 3.0);
  CHECK(r2.value == doctest::Approx(6.0 * r.value).epsilon(1e-12));
}

TEST_CASE("plain chaining integral diverges iff d/alpha >= 2") {
  CHECK(dudley_plain(params_of(1.0, 2), 1, 1).diverges);
  CHECK(dudley_plain(params_of(2.0, 4), 1, 1).diverges);  // boundary
  CHECK(dudley_plain(params_of(0.5, 1), 1, 1).diverges);
  CHECK(!dudley_plain(params_of(0.6, 1), 1, 1).diverges);
  CHECK(!dudley_plain(params_of(1.0, 1), 1, 1).diverges);
  for (double alpha : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0})
    for (std::size_t d : {1u, 2u, 3u, 4u, 5u}) {
      const bool expected = static_cast<double>(d) / alpha >= 2.0;
      CHECK(dudley_plain(params_of(alpha, d), 1, 1).diverges == expected);
    }
}

TEST_CASE("truncation lemma closed form") {
  TruncationOptimum big = improved_dudley_closed_form(2.0, 0.5);
  CHECK(big.f_star == 1.0);
  CHECK(big.tau_star == 1.0);

  TruncationOptimum mid = improved_dudley_closed_form(0.25, 2.0);
  CHECK(mid.tau_star == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid.f_star == doctest::Approx(0.75).epsilon(1e-14));

  TruncationOptimum limit = improved_dudley_closed_form(std::exp(-1.0), 1.0);
  CHECK(limit.f_star == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));

  CHECK_THROWS_AS(improved_dudley_closed_form(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(improved_dudley_closed_form(1.0, 0.0), ConfigError);
}

TEST_CASE("closed form matches grid minimization on a log-spaced grid") {
  for (int ia = 0; ia < 20; ++ia) {
    for (int ib = 0; ib < 20; ++ib) {
      const double a = std::pow(10.0, -2.0 + 2.5 * ia / 19.0);
      const double beta = (ib == 10) ? 1.0 : std::pow(10.0, -1.0 + 1.5 * ib / 19.0);
      const double oracle = grid_minimum(a, beta, 100000);
      const double closed = improved_dudley_closed_form(a, beta).f_star;
      CHECK(closed == doctest::Approx(oracle).epsilon(1e-4).scale(1.0));
      CHECK(closed <= oracle + 1e-12);  // true minimum under-runs any grid
    }
  }
}

TEST_CASE("refined chaining value and monotonicity in a") {
  CHECK(dudley_refined_eval(1.5, 2.0) == 4.0);
  CHECK(dudley_refined_eval(0.25, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
  double prev = 0.0;
  for (double a = 0.01; a < 2.0; a *= 1.4) {
    const double v = dudley_refined_eval(a, 1.5);
    CHECK(v >= prev - 1e-14);
    prev = v;
  }
}

TEST_CASE("finite sample bound, displayed two-branch formula") {
  // Anchor: n=100, K=lambda=1, alpha=1, d=4 -> 12 * 100^(-1/4) * 2.
  const double v = finite_sample_bound(100, params_of(1, 4), BoundMode::TwoBranch);
  CHECK(v == doctest::Approx(12.0 * std::pow(100.0, -0.25) * 2.0).epsilon(1e-12));
  // The log option wins for huge n in the slow branch.
  const double w = finite_sample_bound(50, params_of(1, 4), BoundMode::TwoBranch);
  CHECK(w == doctest::Approx(12.0 * std::pow(50.0, -0.25) *
                             (1.0 + 0.5 * std::log(50.0 / 9.0)))
                 .epsilon(1e-12));
  CHECK_THROWS_AS(finite_sample_bound(0, params_of(1, 4), BoundMode::TwoBranch),
                  ConfigError);
}

TEST_CASE("branch formulas agree exactly at alpha = d/2") {
  for (std::size_t d : {1u, 2u, 3u, 4u, 6u}) {
    const double alpha = static_cast<double>(d) / 2.0;
    for (std::size_t n : {10u, 100u, 1000u, 100000u}) {
      // Evaluate both regime formulas by hand with the 1/0 = +inf convention:
      // the polynomial option is infinite on both sides, so each reduces to
      // its log option, and those coincide when alpha = d/2.
      const double kl = 1.0;
      const double nd = static_cast<double>(n);
      const double lhs = 12.0 * std::pow(kl / nd, alpha / d) *
                         (1.0 + 0.5 * std::log(nd / (9.0 * kl)));
      const double rhs = 12.0 * std::sqrt(kl / nd) *
                         (1.0 + (alpha / d) * std::log(nd / (9.0 * kl)));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      CHECK(finite_sample_bound(n, params_of(alpha, d), BoundMode::TwoBranch) ==
            doctest::Approx(lhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("composed bound is nonincreasing in n and positive") {
  for (double alpha : {0.5, 1.0, 2.0})
    for (std::size_t d : {1u, 2u, 4u}) {
      double prev = 1e300;
      for (std::size_t n = 10; n <= 1000000; n *= 3) {
        const double v =
            finite_sample_bound(n, params_of(alpha, d), BoundMode::Composed);
        CHECK(v > 0.0);
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
    }
}

TEST_CASE("modes agree up to bookkeeping slack for large n") {
  for (double alpha : {0.5, 1.0, 1.5})
    for (std::size_t d : {1u, 2u, 3u, 4u}) {
      BoundParams p = params_of(alpha, d);
      for (std::size_t n : {1000u, 100000u}) {
        if (n <= 100) continue;
        const double a = finite_sample_bound(n, p, BoundMode::TwoBranch);
        const double b = finite_sample_bound(n, p, BoundMode::Composed);
        CHECK(b <= 6.0 * a);
        CHECK(a <= 6.0 * b);
      }
    }
}

TEST_CASE("rate exponents across the three regimes") {
  RateExponent fast = rate_exponent(1.0, 1);
  CHECK(fast.p == 0.5);
  CHECK(!fast.has_log_factor);
  RateExponent boundary = rate_exponent(1.0, 2);
  CHECK(boundary.p == 0.5);
  CHECK(boundary.has_log_factor);
  RateExponent slow = rate_exponent(1.0, 4);
  CHECK(slow.p == 0.25);
  CHECK(!slow.has_log_factor);
  CHECK(rate_exponent(3.0, 2).p == 0.5);
  CHECK(!rate_exponent(3.0, 2).has_log_factor);
}

TEST_CASE("polynomial-entropy rates specialize to the class rates") {
  ExtensionSpec e4{1.0, 4.0};
  CHECK(extension_rate(e4).p == 0.25);
  CHECK(!extension_rate(e4).has_log_factor);
  ExtensionSpec e2{1.0, 2.0};
  CHECK(extension_rate(e2).p == 0.5);
  CHECK(extension_rate(e2).has_log_factor);
  ExtensionSpec e1{1.0, 1.0};
  CHECK(extension_rate(e1).p == 0.5);
  CHECK(!extension_rate(e1).has_log_factor);

  for (int i = 0; i < 30; ++i) {
    const double alpha = 0.1 + 0.09 * i;
    const std::size_t d = 1 + i % 5;
    ExtensionSpec ext{1.0, static_cast<double>(d) / alpha};
    RateExponent a = rate_exponent(alpha, d);
    RateExponent b = extension_rate(ext);
    // alpha/d and 1/(d/alpha) may differ in the last bit
    CHECK(a.p == doctest::Approx(b.p).epsilon(1e-14));
    CHECK(a.has_log_factor == b.has_log_factor);
  }
  ExtensionSpec bad{0.0, 1.0};
  CHECK_THROWS_AS(extension_rate(bad), ConfigError);
}

TEST_CASE("bound mode names round-trip") {
  CHECK(parse_bound_mode("branch") == BoundMode::TwoBranch);
  CHECK(parse_bound_mode("composed") == BoundMode::Composed);
  CHECK(bound_mode_name(BoundMode::TwoBranch) == "branch");
  CHECK(bound_mode_name(BoundMode::Composed) == "composed");
  CHECK_THROWS_AS(parse_bound_mode("verbatim"), ConfigError);
  CHECK(rate_branch_name(1.0, 4) == "alpha<d/2");
  CHECK(rate_branch_name(1.0, 2) == "alpha>=d/2");
  CHECK(rate_branch_name(2.0, 3) == "alpha>=d/2");
}

TEST_CASE("defaults carry the volume convention") {
  BoundParams p = BoundParams::defaults(0.5, 3);
  CHECK(p.K == 1.0);
  CHECK(p.lambda == doctest::Approx(27.0));
  CHECK(p.L == 1.0);
  CHECK_THROWS_AS(BoundParams::defaults(0.0, 3), ConfigError);
}
