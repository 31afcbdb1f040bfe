#pragma once

#include <cstddef>
#include <string>

namespace ipm {

// Constants of the entropy bound logN(eps) <= K * lambda * (eps/L)^(-d/alpha).
// K is never pinned down analytically, so every bound below is "up to the
// entropy constant"; lambda defaults to 3^d, the max-norm volume of the unit
// cube blown up by 1 on each side.
struct BoundParams {
  double alpha = 1.0;
  std::size_t d = 1;
  double K = 1.0;
  double lambda = 3.0;
  double L = 1.0;

  static BoundParams defaults(double alpha, std::size_t d, double L = 1.0);
  void validate() const;
};

// Polynomial entropy profile logN(eps) <= A * eps^(-p).
struct ExtensionSpec {
  double A = 1.0;
  double p = 1.0;
  void validate() const;
};

double entropy_upper_bound(double epsilon, const BoundParams& params);

struct DudleyPlainResult {
  bool diverges = false;
  double value = 0.0;  // meaningful only when !diverges
};

// C * subgauss_K * integral_0^{2L} sqrt(logN(eps)) d eps; diverges at 0
// whenever d/alpha >= 2.
DudleyPlainResult dudley_plain(const BoundParams& params, double subgauss_K,
                               double C);

struct TruncationOptimum {
  double tau_star = 0.0;
  double f_star = 0.0;
};

// Exact minimizer and minimum of f(tau) = tau + a * integral_tau^1 eps^(-beta)
// d eps over tau in [0, 1].
TruncationOptimum improved_dudley_closed_form(double a, double beta);

// inf over tau of 4*tau + 4*a*integral_tau^1 eps^(-beta) d eps.
double dudley_refined_eval(double a, double beta);

enum class BoundMode { TwoBranch, Composed };

BoundMode parse_bound_mode(const std::string& name);
std::string bound_mode_name(BoundMode mode);

// TwoBranch evaluates the displayed finite-sample formula verbatim (it can go
// negative for very small n; callers should prefer Composed there).  Composed
// evaluates 2 * dudley_refined_eval(3*sqrt(K*lambda/n), d/(2*alpha)) * L,
// valid for all n.
double finite_sample_bound(std::size_t n, const BoundParams& params,
                           BoundMode mode);

// Which regime of the two-branch formula applies, for reporting.
std::string rate_branch_name(double alpha, std::size_t d);

struct RateExponent {
  double p = 0.0;
  bool has_log_factor = false;
};

RateExponent rate_exponent(double alpha, std::size_t d);
RateExponent extension_rate(const ExtensionSpec& spec);

}  // namespace ipm
