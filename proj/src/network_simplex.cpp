#include "ipm/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipm/errors.hpp"

namespace ipm {

namespace {
constexpr double kPriceTol = 1e-12;   // entering threshold during pivoting
constexpr double kVerifyTol = 1e-9;   // post-solve reduced-cost guarantee
}  // namespace

NetworkSimplex::NetworkSimplex(std::size_t real_nodes) : n_(real_nodes) {
  if (n_ == 0) throw ConfigError("network simplex: need at least one node");
  supply_.assign(n_, 0.0);
  const std::size_t total = n_ + 1;
  parent_.assign(total, -1);
  parent_arc_.assign(total, -1);
  depth_.assign(total, 0);
  pi_.assign(total, 0.0);
  tree_adj_.assign(total, {});
  tail_.reserve(2 * n_);
  head_.reserve(2 * n_);
  for (std::size_t i = 0; i < n_; ++i) {
    tail_.push_back(static_cast<int>(i));   // disposal arc 2i
    head_.push_back(static_cast<int>(n_));
    tail_.push_back(static_cast<int>(n_));  // creation arc 2i+1
    head_.push_back(static_cast<int>(i));
  }
  cost_.assign(2 * n_, 0.0);
  flow_.assign(2 * n_, 0.0);
  in_tree_.assign(2 * n_, 0);
}

void NetworkSimplex::set_supply(std::size_t node, double b) {
  supply_.at(node) = b;
  supplies_dirty_ = true;
}

void NetworkSimplex::set_buffer_cost(double m) {
  for (std::size_t i = 0; i < 2 * n_; ++i) cost_[i] = m;
}

std::size_t NetworkSimplex::add_pair_arc(std::size_t tail, std::size_t head,
                                         double cost) {
  if (tail >= n_ || head >= n_ || tail == head)
    throw ConfigError("network simplex: bad pair arc endpoints");
  tail_.push_back(static_cast<int>(tail));
  head_.push_back(static_cast<int>(head));
  cost_.push_back(cost);
  flow_.push_back(0.0);
  in_tree_.push_back(0);
  return arc_count() - 1 - 2 * n_;
}

void NetworkSimplex::set_pair_arc_cost(std::size_t id, double cost) {
  cost_.at(2 * n_ + id) = cost;
}

double NetworkSimplex::buffer_flow_total() const {
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n_; ++i) s += flow_[i];
  return s;
}

void NetworkSimplex::build_star_basis() {
  const int root = static_cast<int>(n_);
  std::fill(flow_.begin(), flow_.end(), 0.0);
  std::fill(in_tree_.begin(), in_tree_.end(), 0);
  for (auto& adj : tree_adj_) adj.clear();
  parent_[root] = -1;
  parent_arc_[root] = -1;
  depth_[root] = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    // Positive supply drains through the disposal arc, negative supply is
    // fed by the creation arc; zero-supply nodes hang on the disposal arc,
    // which points at the root, keeping the tree strongly feasible.
    const int a = supply_[i] < 0.0 ? static_cast<int>(2 * i + 1)
                                   : static_cast<int>(2 * i);
    flow_[a] = std::abs(supply_[i]);
    in_tree_[a] = 1;
    parent_[i] = root;
    parent_arc_[i] = a;
    depth_[i] = 1;
    tree_adj_[i].push_back(a);
    tree_adj_[root].push_back(a);
  }
  basis_built_ = true;
  supplies_dirty_ = false;
}

void NetworkSimplex::recompute_potentials() {
  const int root = static_cast<int>(n_);
  pi_[root] = 0.0;
  refresh_dfs_order();
  for (int node : dfs_order_) {
    if (node == root) continue;
    const int a = parent_arc_[node];
    // Tree arcs have zero reduced cost: cost - pi[tail] + pi[head] = 0.
    if (head_[a] == node)
      pi_[node] = pi_[parent_[node]] - cost_[a];
    else
      pi_[node] = pi_[parent_[node]] + cost_[a];
  }
}

void NetworkSimplex::refresh_dfs_order() {
  const int root = static_cast<int>(n_);
  dfs_order_.clear();
  dfs_order_.reserve(n_ + 1);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    dfs_order_.push_back(u);
    for (int a : tree_adj_[u]) {
      int other = tail_[a] == u ? head_[a] : tail_[a];
      if (parent_[other] == u && parent_arc_[other] == a) stack.push_back(other);
    }
  }
}

bool NetworkSimplex::recompute_flows() {
  // Non-basic arcs sit exactly at zero; tree flows are the unique solution
  // of the tree system, obtained by eliminating leaves depth-first.
  for (std::size_t a = 0; a < arc_count(); ++a)
    if (!in_tree_[a]) flow_[a] = 0.0;
  std::vector<double> excess(n_ + 1, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    excess[i] = supply_[i];
    total += supply_[i];
  }
  excess[n_] = -total;
  for (auto it = dfs_order_.rbegin(); it != dfs_order_.rend(); ++it) {
    const int node = *it;
    if (node == static_cast<int>(n_)) continue;
    const int a = parent_arc_[node];
    double f = tail_[a] == node ? excess[node] : -excess[node];
    if (f < 0.0) {
      if (f < -1e-9) return false;
      f = 0.0;
    }
    flow_[a] = f;
    excess[parent_[node]] += excess[node];
    excess[node] = 0.0;
  }
  return true;
}

void NetworkSimplex::run_pivot(int entering) {
  ++pivots_;
  const int u = tail_[entering], w = head_[entering];

  // Climb both endpoints to the apex, recording path arcs (deepest first).
  std::vector<int> path_u, path_w;
  int a = u, b = w;
  while (a != b) {
    if (depth_[a] >= depth_[b]) {
      path_u.push_back(parent_arc_[a]);
      a = parent_[a];
    } else {
      path_w.push_back(parent_arc_[b]);
      b = parent_[b];
    }
  }

  // Traverse the cycle in the push direction starting at the apex: down the
  // u-side (apex-nearest arcs first), across the entering arc, up the
  // w-side.  Arcs oriented against the traversal block the push; among the
  // minimum-flow blockers the traversal-last one leaves, which preserves
  // strong feasibility.
  double theta = std::numeric_limits<double>::infinity();
  int leaving = -1;
  bool leaving_on_u_side = false;
  auto consider = [&](int arc, bool u_side) {
    if (flow_[arc] <= theta) {
      theta = flow_[arc];
      leaving = arc;
      leaving_on_u_side = u_side;
    }
  };
  for (auto it = path_u.rbegin(); it != path_u.rend(); ++it) {
    const int arc = *it;
    const int child = parent_[tail_[arc]] == head_[arc] ? tail_[arc] : head_[arc];
    if (tail_[arc] == child) consider(arc, true);  // points up: against travel
  }
  for (int arc : path_w) {
    const int child = parent_[tail_[arc]] == head_[arc] ? tail_[arc] : head_[arc];
    if (head_[arc] == child) consider(arc, false);  // points down: against travel
  }
  if (leaving < 0)
    throw NumericError("network simplex: unblocked improving cycle");

  // Push theta around the cycle.
  flow_[entering] += theta;
  for (int arc : path_u) {
    const int child = parent_[tail_[arc]] == head_[arc] ? tail_[arc] : head_[arc];
    flow_[arc] += tail_[arc] == child ? -theta : theta;
    if (flow_[arc] < 0.0) flow_[arc] = 0.0;
  }
  for (int arc : path_w) {
    const int child = parent_[tail_[arc]] == head_[arc] ? tail_[arc] : head_[arc];
    flow_[arc] += head_[arc] == child ? -theta : theta;
    if (flow_[arc] < 0.0) flow_[arc] = 0.0;
  }
  flow_[leaving] = 0.0;

  // Swap the arcs in the tree.
  const int q = parent_[tail_[leaving]] == head_[leaving] ? tail_[leaving]
                                                          : head_[leaving];
  auto drop = [&](int node, int arc) {
    auto& adj = tree_adj_[node];
    adj.erase(std::find(adj.begin(), adj.end(), arc));
  };
  drop(tail_[leaving], leaving);
  drop(head_[leaving], leaving);
  in_tree_[leaving] = 0;
  tree_adj_[u].push_back(entering);
  tree_adj_[w].push_back(entering);
  in_tree_[entering] = 1;

  // The severed subtree hangs under q; exactly one endpoint of the entering
  // arc lies inside it (the u-side endpoint iff the leaving arc was on the
  // u-side path).  Re-root the subtree at that endpoint.
  const int s_end = leaving_on_u_side ? u : w;
  const int o_end = leaving_on_u_side ? w : u;
  int node = s_end, prev = o_end, prev_arc = entering;
  while (node != -1) {
    const int next = node == q ? -1 : parent_[node];
    const int next_arc = node == q ? -1 : parent_arc_[node];
    parent_[node] = prev;
    parent_arc_[node] = prev_arc;
    prev = node;
    prev_arc = next_arc;
    node = next;
  }

  // Refresh depths and potentials inside the moved subtree only.
  std::vector<int> stack{s_end};
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    const int pa = parent_arc_[x];
    depth_[x] = depth_[parent_[x]] + 1;
    pi_[x] = head_[pa] == x ? pi_[parent_[x]] - cost_[pa]
                            : pi_[parent_[x]] + cost_[pa];
    for (int arc : tree_adj_[x]) {
      const int other = tail_[arc] == x ? head_[arc] : tail_[arc];
      if (parent_[other] == x && parent_arc_[other] == arc) stack.push_back(other);
    }
  }
}

bool NetworkSimplex::pivot_loop(std::size_t max_pivots) {
  const std::size_t arcs = arc_count();
  const std::size_t block =
      std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(arcs))) + 1);
  while (true) {
    if (pivots_ >= max_pivots) return false;
    int best = -1;
    double best_rc = -kPriceTol;
    std::size_t scanned = 0;
    while (scanned < arcs) {
      const std::size_t stop = std::min(price_cursor_ + block, arcs);
      for (std::size_t a = price_cursor_; a < stop; ++a) {
        if (in_tree_[a]) continue;
        const double rc = reduced_cost(static_cast<int>(a));
        if (rc < best_rc) {
          best_rc = rc;
          best = static_cast<int>(a);
        }
      }
      scanned += stop - price_cursor_;
      price_cursor_ = stop == arcs ? 0 : stop;
      if (best >= 0) break;
    }
    if (best < 0) return true;  // no arc prices out: optimal
    run_pivot(best);
  }
}

NetworkSimplex::Status NetworkSimplex::optimize(std::size_t max_pivots) {
  if (!basis_built_ || supplies_dirty_) build_star_basis();
  if (max_pivots == 0)
    max_pivots = 50000 + 40 * n_ + 4 * arc_count();
  max_pivots += pivots_;  // cap is per-call, counter is cumulative
  price_cursor_ = 0;

  recompute_potentials();
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (!pivot_loop(max_pivots)) return Status::IterationLimit;
    // Exact post-solve pass: rebuild potentials and flows from the tree,
    // then re-check optimality at the guaranteed tolerance.
    recompute_potentials();
    if (!recompute_flows())
      throw NumericError("network simplex: tree flow went negative");
    bool clean = true;
    for (std::size_t a = 0; a < arc_count() && clean; ++a)
      if (!in_tree_[a] && reduced_cost(static_cast<int>(a)) < -kVerifyTol)
        clean = false;
    if (clean) {
      double total = 0.0;
      for (std::size_t a = 0; a < arc_count(); ++a)
        if (flow_[a] != 0.0) total += cost_[a] * flow_[a];
      total_cost_ = total;
      return Status::Optimal;
    }
  }
  throw NumericError("network simplex: optimality verification kept failing");
}

}  // namespace ipm
