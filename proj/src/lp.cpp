#include "ipm/lp.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "ipm/errors.hpp"

namespace ipm {

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

void LpProblem::validate() const {
  if (objective.empty()) throw ConfigError("lp: empty objective");
  if (a.size() != b.size()) throw ConfigError("lp: row count mismatch");
  for (const auto& row : a) {
    if (row.size() != objective.size())
      throw ConfigError("lp: row width mismatch");
    for (double v : row)
      if (!std::isfinite(v)) throw ConfigError("lp: non-finite coefficient");
  }
  for (double v : b)
    if (!std::isfinite(v)) throw ConfigError("lp: non-finite rhs");
  for (double v : objective)
    if (!std::isfinite(v)) throw ConfigError("lp: non-finite objective");
}

namespace {

// Dictionary simplex on a dense (m+2) x (n+2) tableau.  Column n is the
// auxiliary feasibility variable (label -1), column n+1 the rhs; row m is
// the real objective, row m+1 the feasibility objective.  Entering and
// leaving choices compare (value, label) pairs so every tie resolves to the
// lowest variable label.
class Tableau {
 public:
  Tableau(const LpProblem& p, std::size_t max_pivots)
      : m_(static_cast<int>(p.rows())),
        n_(static_cast<int>(p.cols())),
        cap_(max_pivots),
        nonbasic_(n_ + 1),
        basic_(m_),
        d_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) d_[i][j] = p.a[i][j];
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      d_[i][n_] = -1.0;
      d_[i][n_ + 1] = p.b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_[m_][j] = -p.objective[j];
    }
    nonbasic_[n_] = -1;
    d_[m_ + 1][n_] = 1.0;
  }

  LpSolution run() {
    LpSolution sol;
    // Start feasibility phase only if some rhs is negative.
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!optimize(m_ + 1, /*skip_label=*/-2) || d_[m_ + 1][n_ + 1] < -kEps) {
        sol.status = hit_cap_ ? LpStatus::IterationLimit : LpStatus::Infeasible;
        sol.pivots = pivots_;
        return sol;
      }
      // Drive the auxiliary variable out of the basis if it lingers at zero.
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j)
          if (s == -1 || std::pair(d_[i][j], nonbasic_[j]) <
                             std::pair(d_[i][s], nonbasic_[s]))
            s = j;
        pivot(i, s);
      }
    }
    bool bounded = optimize(m_, /*skip_label=*/-1);
    sol.pivots = pivots_;
    if (hit_cap_) {
      sol.status = LpStatus::IterationLimit;
      return sol;
    }
    if (!bounded) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.value = d_[m_][n_ + 1];
    sol.x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < n_) sol.x[basic_[i]] = d_[i][n_ + 1];
    return sol;
  }

 private:
  static constexpr double kEps = 1e-9;

  // Pivot on row r, column s; standard product-form update.
  void pivot(int r, int s) {
    ++pivots_;
    double* ar = d_[r].data();
    const double inv = 1.0 / ar[s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(d_[i][s]) <= kEps) continue;
      double* ai = d_[i].data();
      const double factor = ai[s] * inv;
      for (int j = 0; j < n_ + 2; ++j) ai[j] -= ar[j] * factor;
      ai[s] = ar[s] * factor;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) d_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) d_[i][s] *= -inv;
    d_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  // Price on objective row `obj`; returns false when an improving column has
  // no blocking row (unbounded direction).
  bool optimize(int obj, int skip_label) {
    for (;;) {
      if (pivots_ >= cap_) {
        hit_cap_ = true;
        return true;
      }
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == skip_label) continue;
        if (s == -1 || std::pair(d_[obj][j], nonbasic_[j]) <
                           std::pair(d_[obj][s], nonbasic_[s]))
          s = j;
      }
      if (d_[obj][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] <= kEps) continue;
        if (r == -1 || std::pair(d_[i][n_ + 1] / d_[i][s], basic_[i]) <
                           std::pair(d_[r][n_ + 1] / d_[r][s], basic_[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::size_t cap_;
  std::size_t pivots_ = 0;
  bool hit_cap_ = false;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

LpSolution lp_solve(const LpProblem& prob, std::size_t max_pivots) {
  prob.validate();
  if (max_pivots == 0)
    max_pivots = 20000 + 50 * (prob.rows() + prob.cols());
  return Tableau(prob, max_pivots).run();
}

}  // namespace ipm
