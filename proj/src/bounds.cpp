#include "ipm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipm/errors.hpp"

namespace ipm {

BoundParams BoundParams::defaults(double alpha, std::size_t d, double L) {
  BoundParams p;
  p.alpha = alpha;
  p.d = d;
  p.K = 1.0;
  p.lambda = std::pow(3.0, static_cast<double>(d));
  p.L = L;
  p.validate();
  return p;
}

void BoundParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("bounds: alpha must be positive");
  if (d == 0) throw ConfigError("bounds: d must be at least 1");
  if (!(K > 0.0) || !std::isfinite(K))
    throw ConfigError("bounds: K must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("bounds: lambda must be positive");
  if (!(L > 0.0) || !std::isfinite(L))
    throw ConfigError("bounds: L must be positive");
}

void ExtensionSpec::validate() const {
  if (!(A > 0.0) || !std::isfinite(A))
    throw ConfigError("bounds: entropy amplitude A must be positive");
  if (!(p > 0.0) || !std::isfinite(p))
    throw ConfigError("bounds: entropy exponent p must be positive");
}

double entropy_upper_bound(double epsilon, const BoundParams& params) {
  params.validate();
  if (!(epsilon > 0.0)) throw ConfigError("bounds: epsilon must be positive");
  return params.K * params.lambda *
         std::pow(epsilon / params.L,
                  -static_cast<double>(params.d) / params.alpha);
}

DudleyPlainResult dudley_plain(const BoundParams& params, double subgauss_K,
                               double C) {
  params.validate();
  if (!(subgauss_K > 0.0)) throw ConfigError("bounds: subgauss_K must be positive");
  if (!(C > 0.0)) throw ConfigError("bounds: C must be positive");
  const double gamma = static_cast<double>(params.d) / (2.0 * params.alpha);
  DudleyPlainResult out;
  if (gamma >= 1.0) {
    out.diverges = true;
    return out;
  }
  // integral_0^{2L} sqrt(K*lambda) * (eps/L)^(-gamma) d eps
  //   = sqrt(K*lambda) * L^gamma * (2L)^(1-gamma) / (1-gamma)
  out.value = C * subgauss_K * std::sqrt(params.K * params.lambda) *
              std::pow(params.L, gamma) *
              std::pow(2.0 * params.L, 1.0 - gamma) / (1.0 - gamma);
  return out;
}

TruncationOptimum improved_dudley_closed_form(double a, double beta) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw ConfigError("bounds: a must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("bounds: beta must be positive");
  TruncationOptimum out;
  if (a >= 1.0) {
    out.tau_star = 1.0;
    out.f_star = 1.0;
    return out;
  }
  out.tau_star = std::pow(a, 1.0 / beta);
  if (std::abs(beta - 1.0) < 1e-12) {
    out.f_star = a * (1.0 + std::log(1.0 / a));
  } else {
    // tau* + (a/(1-beta)) * (1 - tau*^(1-beta)), written with expm1 for
    // stability as beta -> 1.
    out.f_star = out.tau_star -
                 (a / (1.0 - beta)) *
                     std::expm1(((1.0 - beta) / beta) * std::log(a));
  }
  return out;
}

double dudley_refined_eval(double a, double beta) {
  return 4.0 * improved_dudley_closed_form(a, beta).f_star;
}

BoundMode parse_bound_mode(const std::string& name) {
  if (name == "branch") return BoundMode::TwoBranch;
  if (name == "composed") return BoundMode::Composed;
  throw ConfigError("bounds: unknown mode '" + name +
                    "' (expected branch or composed)");
}

std::string bound_mode_name(BoundMode mode) {
  return mode == BoundMode::TwoBranch ? "branch" : "composed";
}

double finite_sample_bound(std::size_t n, const BoundParams& params,
                           BoundMode mode) {
  params.validate();
  if (n == 0) throw ConfigError("bounds: n must be at least 1");
  const double nd = static_cast<double>(n);
  const double d = static_cast<double>(params.d);
  const double kl = params.K * params.lambda;
  if (mode == BoundMode::Composed)
    return 2.0 *
           dudley_refined_eval(3.0 * std::sqrt(kl / nd),
                               d / (2.0 * params.alpha)) *
           params.L;

  const double log_term = std::log(nd / (9.0 * kl));
  const double inf = std::numeric_limits<double>::infinity();
  if (params.alpha < d / 2.0) {
    const double poly = d / (d - 2.0 * params.alpha);
    return 12.0 * std::pow(kl / nd, params.alpha / d) *
           std::min(poly, 1.0 + 0.5 * log_term);
  }
  const double denom = 2.0 * params.alpha - d;
  const double poly = denom > 0.0 ? 2.0 * params.alpha / denom : inf;
  return 12.0 * std::sqrt(kl / nd) *
         std::min(poly, 1.0 + (params.alpha / d) * log_term);
}

std::string rate_branch_name(double alpha, std::size_t d) {
  return alpha < static_cast<double>(d) / 2.0 ? "alpha<d/2" : "alpha>=d/2";
}

RateExponent rate_exponent(double alpha, std::size_t d) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ConfigError("bounds: alpha must be positive");
  if (d == 0) throw ConfigError("bounds: d must be at least 1");
  RateExponent out;
  const double ratio = alpha / static_cast<double>(d);
  out.p = std::min(ratio, 0.5);
  out.has_log_factor = (alpha == static_cast<double>(d) / 2.0);
  return out;
}

RateExponent extension_rate(const ExtensionSpec& spec) {
  spec.validate();
  RateExponent out;
  out.p = std::min(1.0 / spec.p, 0.5);
  out.has_log_factor = (spec.p == 2.0);
  return out;
}

}  // namespace ipm
