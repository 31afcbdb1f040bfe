#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipm/ipm.hpp"
#include "ipm/measures.hpp"

namespace ipm {

// Monte Carlo protocol for the convergence-rate study: draw n-point samples
// from a uniform lattice ground truth and measure the class distance back to
// the truth, replicated and seeded reproducibly.
struct RateExperimentConfig {
  HolderClassSpec spec;            // class parameters; spec.dim is the lattice dim
  std::size_t grid_per_axis = 32;  // k: ground truth has k^dim uniform atoms
  std::vector<std::size_t> n_list;  // strictly increasing, >= 3 entries
  std::size_t reps = 20;           // replications per n, >= 5
  std::uint64_t master_seed = 0;
  SolverOptions lp = default_lp();

  // Experiment solves run over the full lattice support, where larger
  // constraint batches amortize the lazy-generation rounds.
  static SolverOptions default_lp();
  void validate() const;
};

struct RunRecord {
  std::size_t n = 0;
  std::size_t rep = 0;
  double value = 0.0;
  std::uint64_t seed = 0;
};

// One record per (n, rep), sorted by (n, rep); value is the class distance
// between the empirical sample and the ground truth.  Deterministic given
// master_seed regardless of how tasks are scheduled (IPM_THREADS caps the
// worker count).  Any non-optimal solve aborts with its (n, rep, seed).
std::vector<RunRecord> run_rate_experiment(const RateExperimentConfig& config);

struct RateFit {
  double p_hat = 0.0;      // minus the slope of log(mean value) on log(n)
  double intercept = 0.0;
  double r_squared = 0.0;
  double stderr_p = 0.0;   // OLS standard error of the slope
};

// Least squares of log(mean value per n) against log(n); needs >= 3 distinct
// n values and positive means.
RateFit fit_exponent(const std::vector<RunRecord>& records);

struct SummaryRow {
  std::size_t n = 0;
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean over replications
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

struct SymmetrizationReport {
  std::size_t n = 0;
  double lhs_mean = 0.0;  // mean class distance sample-to-truth
  double lhs_se = 0.0;
  double rhs_mean = 0.0;  // 2 x mean sign-randomized supremum
  double rhs_se = 0.0;
  double margin = 0.0;    // rhs_mean + 3*combined se - lhs_mean
  bool pass = false;      // margin >= 0
};

// Empirical check that the mean distance is dominated by twice the mean
// sign-randomized supremum.  Runs at the largest n in config.n_list (must be
// <= 64), with config.reps samples and `sign_draws` sign vectors per sample.
SymmetrizationReport symmetrization_check(const RateExperimentConfig& config,
                                          std::size_t sign_draws);

enum class EmitFormat { Csv, Svg };

// Csv writes records.csv (n,rep,value,seed), summary.csv (n,mean,stderr) and
// fit.csv (p_hat,stderr_p,r2) under out_dir; Svg writes rates.svg, a log-log
// scatter with the fitted line plus the exponent-vs-alpha theory curve.
// Returns the paths written.
std::vector<std::string> emit_results(const std::vector<RunRecord>& records,
                                      const RateFit& fit,
                                      const RateExperimentConfig& config,
                                      const std::string& out_dir,
                                      EmitFormat format);

// Reads back a records.csv produced by emit_results.
std::vector<RunRecord> load_records_csv(const std::string& path);

}  // namespace ipm
