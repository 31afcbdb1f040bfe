#pragma once

#include <cstddef>
#include <vector>

namespace ipm {

// Primal network simplex for the uncapacitated min-cost flow problems that
// arise as duals of the discrepancy LPs in this project.  The node set is
// `real_nodes` real nodes plus one built-in virtual node; construction
// creates, for every real node i, a disposal arc (i -> virtual) and a
// creation arc (virtual -> i) whose shared unit cost is set via
// set_buffer_cost().  Additional "pair" arcs between real nodes are added by
// the caller.  Supplies live on real nodes; the virtual node absorbs the
// negated total, so the instance is always feasible.
//
// The basis starts from the star tree over the buffer arcs (a strongly
// feasible tree), stays strongly feasible via the classic last-blocking-arc
// leaving rule, and prices entering arcs in fixed-size blocks with
// lowest-index tie-breaking, so runs are deterministic.  Costs may be changed
// between optimize() calls: the current tree stays primal-feasible and the
// next call warm-starts from it.  Changing supplies rebuilds the basis.
//
// After the pivot loop, potentials and flows are recomputed exactly from the
// tree (assignments, no incremental drift) and every arc's reduced cost is
// re-verified; the solver resumes pivoting if verification fails.
class NetworkSimplex {
 public:
  enum class Status { Optimal, IterationLimit };

  explicit NetworkSimplex(std::size_t real_nodes);

  void set_supply(std::size_t node, double b);
  void set_buffer_cost(double m);

  // Adds tail -> head (real nodes, distinct); returns a pair-arc id.
  std::size_t add_pair_arc(std::size_t tail, std::size_t head, double cost);
  void set_pair_arc_cost(std::size_t id, double cost);
  std::size_t pair_arc_count() const { return arc_count() - 2 * n_; }

  Status optimize(std::size_t max_pivots = 0);  // 0: cap picked from size

  // Valid after optimize() returned Optimal.
  double total_cost() const { return total_cost_; }
  // Dual value of node i relative to the virtual node.
  double node_value(std::size_t i) const { return pi_[i] - pi_[n_]; }
  double pair_flow(std::size_t id) const { return flow_[2 * n_ + id]; }
  double buffer_flow_total() const;
  std::size_t pivot_count() const { return pivots_; }

 private:
  std::size_t arc_count() const { return tail_.size(); }
  void build_star_basis();
  void recompute_potentials();
  bool recompute_flows();      // false if the tree system went negative
  void refresh_dfs_order();
  bool pivot_loop(std::size_t max_pivots);
  void run_pivot(int entering);
  double reduced_cost(int a) const {
    return cost_[a] - pi_[tail_[a]] + pi_[head_[a]];
  }

  std::size_t n_;                   // real node count; virtual node index = n_
  std::vector<double> supply_;      // real nodes only
  std::vector<int> tail_, head_;
  std::vector<double> cost_, flow_;
  std::vector<char> in_tree_;

  std::vector<int> parent_, parent_arc_, depth_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> tree_adj_;  // tree arc ids per node
  std::vector<int> dfs_order_;              // parents before children

  bool basis_built_ = false;
  bool supplies_dirty_ = true;
  std::size_t pivots_ = 0;
  std::size_t price_cursor_ = 0;
  double total_cost_ = 0.0;
};

}  // namespace ipm
