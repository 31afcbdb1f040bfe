#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ipm/measures.hpp"

namespace ipm {

// How the smoothness budget of the test class is split.  The class is
// { f : sup-norm part + seminorm part within radius }, either as a sum
// (sup + seminorm <= L) or as separate caps (sup <= L and seminorm <= L).
enum class BallConvention { Sum, Max };

BallConvention parse_ball(const std::string& name);  // "sum" | "max"
std::string ball_name(BallConvention ball);

struct HolderClassSpec {
  double alpha = 1.0;           // smoothness order, in (0, 1]
  double radius = 1.0;          // class radius L
  std::size_t dim = 1;          // ambient dimension d
  Norm norm = Norm::MaxCoordinate;
  BallConvention ball = BallConvention::Sum;

  void validate() const;  // UnsupportedSmoothnessError for alpha > 1
};

enum class SolveStatus { Optimal, IterationLimit, Infeasible };
const char* solve_status_name(SolveStatus s);

struct SolverOptions {
  double tol = 1e-9;             // pair-constraint violation tolerance
  std::size_t max_rounds = 64;   // lazy constraint-generation rounds
  std::size_t batch = 256;       // most-violated pairs added per round
  std::size_t neighbor_seeds = 8;  // nearest neighbors seeding the arc set
  std::size_t max_pivots = 0;    // per inner flow solve; 0 picks automatically
};

struct IPMResult {
  double value = 0.0;
  std::vector<Point> support;    // merged union support, sorted
  std::vector<double> witness;   // optimal f at each support point
  double sup_budget = 0.0;       // m in the optimal budget split
  double seminorm_budget = 0.0;  // t in the optimal budget split
  SolveStatus status = SolveStatus::Optimal;
  std::size_t constraints_generated = 0;  // ordered pair constraints in play
  std::size_t rounds = 0;        // lazy rounds used
};

// Shared geometry for many solves over the same candidate support: sorted
// unique points plus the tie-inclusive k-nearest-neighbor pair list used to
// seed the constraint set.  Building this once and reusing it across repeats
// avoids re-deriving neighbor structure per solve.
struct SupportGraph {
  std::size_t dim = 0;
  Norm norm = Norm::Euclidean;
  std::vector<Point> points;                  // sorted, unique
  std::vector<std::pair<int, int>> seed_pairs;  // i < j

  static SupportGraph build(std::vector<Point> pts, Norm norm,
                            std::size_t neighbor_seeds = 8);
  // Index of a point known to be in `points` (binary search).
  std::size_t index_of(const Point& p) const;
};

// Largest integral difference  sup_f { P f - Q f }  over the chosen class.
// Exact on the merged support via lazy generation of pair constraints over a
// min-cost-flow representation; the sum convention additionally maximizes
// over the budget split.  Symmetric inputs give bitwise-equal values.
IPMResult holder_ipm(const DiscreteMeasure& p, const DiscreteMeasure& q,
                     const HolderClassSpec& spec, const SolverOptions& opts = {});

// Same solver, but over a prebuilt graph and explicit signed weights
// (indexed like graph.points).
IPMResult holder_ipm_on_graph(const SupportGraph& graph,
                              const std::vector<double>& weights,
                              const HolderClassSpec& spec,
                              const SolverOptions& opts = {});

// sup_f (1/n) sum_i sigma_i f(x_i) for given signs sigma in {-1, +1}^n.
IPMResult rademacher_sup(const std::vector<Point>& sample,
                         const std::vector<int>& signs,
                         const HolderClassSpec& spec,
                         const SolverOptions& opts = {});

struct OtResult {
  double value = 0.0;
  std::vector<double> coupling;  // row-major |p| x |q|
};

// Optimal-transport cost between probability measures via the coupling LP,
// solved with the dense simplex: an independent primal route used to
// cross-check the dual solver.  `cost` indexes the concatenated supports
// (p first, then q), as produced by cost_matrix on that point list.  Supports
// larger than `support_cap` are rejected (dense tableau).
OtResult ot_primal(const DiscreteMeasure& p, const DiscreteMeasure& q,
                   const Matrix& cost, std::size_t support_cap = 64);

}  // namespace ipm
