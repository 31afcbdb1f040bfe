#pragma once

#include <cstddef>
#include <vector>

namespace ipm {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* lp_status_name(LpStatus s);

// maximize objective . x  subject to  a x <= b, x >= 0.
struct LpProblem {
  std::vector<std::vector<double>> a;  // m rows of n coefficients
  std::vector<double> b;               // m right-hand sides
  std::vector<double> objective;       // n

  std::size_t rows() const { return a.size(); }
  std::size_t cols() const { return objective.size(); }
  void validate() const;  // throws ConfigError on shape mismatch / non-finite data
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

// Dense two-phase simplex on the full tableau.  Pivot choices break ties by
// lowest variable label, so repeated runs (and runs over permuted-but-equal
// data) are deterministic.  max_pivots = 0 picks a cap from the problem size;
// exceeding it yields LpStatus::IterationLimit.
LpSolution lp_solve(const LpProblem& prob, std::size_t max_pivots = 0);

}  // namespace ipm
