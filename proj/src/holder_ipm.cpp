#include "ipm/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>
#include <unordered_set>

#include "ipm/errors.hpp"
#include "ipm/lp.hpp"
#include "ipm/network_simplex.hpp"

namespace ipm {

BallConvention parse_ball(const std::string& name) {
  if (name == "sum") return BallConvention::Sum;
  if (name == "max") return BallConvention::Max;
  throw ConfigError("unknown ball convention '" + name + "' (expected sum or max)");
}

std::string ball_name(BallConvention ball) {
  return ball == BallConvention::Sum ? "sum" : "max";
}

void HolderClassSpec::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("class spec: alpha must be positive");
  if (alpha > 1.0)
    throw UnsupportedSmoothnessError(
        "class spec: alpha must lie in (0, 1]; higher smoothness orders are "
        "not supported");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw ConfigError("class spec: radius must be positive and finite");
  if (dim == 0) throw ConfigError("class spec: dimension must be at least 1");
}

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

SupportGraph SupportGraph::build(std::vector<Point> pts, Norm norm,
                                 std::size_t neighbor_seeds) {
  if (pts.empty()) throw ConfigError("support graph: no points");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  SupportGraph g;
  g.dim = pts[0].dim();
  g.norm = norm;
  for (const Point& p : pts)
    if (p.dim() != g.dim) throw ConfigError("support graph: mixed dimensions");

  const std::size_t n = pts.size();
  std::vector<double> flat(n * g.dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < g.dim; ++a) flat[i * g.dim + a] = pts[i].coords[a];

  auto dist = [&](std::size_t i, std::size_t j) {
    const double* x = flat.data() + i * g.dim;
    const double* y = flat.data() + j * g.dim;
    if (norm == Norm::MaxCoordinate) {
      double m = 0.0;
      for (std::size_t a = 0; a < g.dim; ++a) m = std::max(m, std::abs(x[a] - y[a]));
      return m;
    }
    double s = 0.0;
    for (std::size_t a = 0; a < g.dim; ++a) {
      double d = x[a] - y[a];
      s += d * d;
    }
    return std::sqrt(s);
  };

  g.points = std::move(pts);
  if (n >= 2 && neighbor_seeds > 0) {
    const std::size_t k = std::min(neighbor_seeds, n - 1);
    std::vector<double> row(n), scratch;
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) row[j] = dist(i, j);
      scratch.clear();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) scratch.push_back(row[j]);
      std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end());
      // Tie-inclusive cutoff: every point as close as the k-th neighbor is
      // seeded, so symmetric lattices keep their whole equidistant ring.
      const double cutoff = scratch[k - 1] + 1e-12;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && row[j] <= cutoff)
          pairs.emplace_back(static_cast<int>(std::min(i, j)),
                             static_cast<int>(std::max(i, j)));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    g.seed_pairs = std::move(pairs);
  }
  return g;
}

std::size_t SupportGraph::index_of(const Point& p) const {
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || !(*it == p))
    throw ConfigError("support graph: point not in graph");
  return static_cast<std::size_t>(it - points.begin());
}

namespace {

// Signals that an inner flow solve ran out of pivots; the engine then
// reports SolveStatus::IterationLimit with best-effort values.
struct PivotLimit {};

class Engine {
 public:
  Engine(const SupportGraph& graph, const std::vector<double>& weights,
         const HolderClassSpec& spec, const SolverOptions& opts)
      : g_(graph), w_(weights), spec_(spec), opts_(opts),
        n_(graph.points.size()), ns_(graph.points.size()) {
    if (w_.size() != n_)
      throw ConfigError("ipm: weight count does not match graph points");
    flat_.resize(n_ * g_.dim);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t a = 0; a < g_.dim; ++a)
        flat_[i * g_.dim + a] = g_.points[i].coords[a];
    for (std::size_t i = 0; i < n_; ++i) ns_.set_supply(i, w_[i]);
    for (const auto& [i, j] : g_.seed_pairs) add_pair(i, j);
  }

  IPMResult run() {
    IPMResult res;
    res.support = g_.points;
    const double L = spec_.radius;
    double t_star = L;
    bool certified = false;
    try {
      for (std::size_t round = 0; round < opts_.max_rounds; ++round) {
        res.rounds = round + 1;
        if (spec_.ball == BallConvention::Max) {
          solve_at(L, L);
          t_star = L;
        } else {
          t_star = maximize_over_split();
        }
        auto added = scan_and_add(t_star);
        if (added == 0) {
          certified = true;
          break;
        }
      }
    } catch (const PivotLimit&) {
      certified = false;
    }

    res.status = certified ? SolveStatus::Optimal : SolveStatus::IterationLimit;
    res.seminorm_budget = t_star;
    res.sup_budget = spec_.ball == BallConvention::Max ? L : L - t_star;
    res.witness.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) res.witness[i] = ns_.node_value(i);
    res.constraints_generated = ns_.pair_arc_count();

    double by_witness = 0.0;
    for (std::size_t i = 0; i < n_; ++i) by_witness += w_[i] * res.witness[i];
    if (certified) {
      res.value = ns_.total_cost();
      verify(res, by_witness);
      if (res.value < 0.0) {
        if (res.value < -1e-9)
          throw NumericError("ipm: certified value is negative");
        res.value = 0.0;
      }
    } else {
      res.value = by_witness;  // not certified; best available iterate
    }
    return res;
  }

 private:
  double pair_dist(std::size_t i, std::size_t j) const {
    const double* x = flat_.data() + i * g_.dim;
    const double* y = flat_.data() + j * g_.dim;
    if (g_.norm == Norm::MaxCoordinate) {
      double m = 0.0;
      for (std::size_t a = 0; a < g_.dim; ++a)
        m = std::max(m, std::abs(x[a] - y[a]));
      return m;
    }
    double s = 0.0;
    for (std::size_t a = 0; a < g_.dim; ++a) {
      double d = x[a] - y[a];
      s += d * d;
    }
    return std::sqrt(s);
  }

  void add_pair(int i, int j) {
    const double unit = snowflake(pair_dist(i, j), spec_.alpha);
    ns_.add_pair_arc(i, j, cur_t_ * unit);
    unit_.push_back(unit);
    ns_.add_pair_arc(j, i, cur_t_ * unit);
    unit_.push_back(unit);
    present_.insert(pair_key(i, j));
  }

  std::uint64_t pair_key(int i, int j) const {
    return static_cast<std::uint64_t>(i) * n_ + static_cast<std::uint64_t>(j);
  }

  void solve_at(double m, double t) {
    ns_.set_buffer_cost(m);
    for (std::size_t id = 0; id < unit_.size(); ++id)
      ns_.set_pair_arc_cost(id, t * unit_[id]);
    cur_t_ = t;
    if (ns_.optimize(opts_.max_pivots) != NetworkSimplex::Status::Optimal)
      throw PivotLimit{};
  }

  struct Eval {
    double phi;
    double grad;
  };

  Eval eval_split(double t) {
    solve_at(spec_.radius - t, t);
    double rate = 0.0;
    for (std::size_t id = 0; id < unit_.size(); ++id)
      rate += unit_[id] * ns_.pair_flow(id);
    return {ns_.total_cost(), rate - ns_.buffer_flow_total()};
  }

  // Exact maximization of the concave piecewise-linear split value
  // phi(t) = value with budgets (L - t, t) by intersecting tangents; each
  // evaluation warm-starts the flow solver at the new costs.
  double maximize_over_split() {
    const double L = spec_.radius;
    constexpr double kSlopeTol = 1e-11;
    double tl = 0.0, th = L;
    Eval lo = eval_split(tl);
    if (lo.grad <= kSlopeTol) return tl;
    Eval hi = eval_split(th);
    if (hi.grad >= -kSlopeTol) return th;

    double best_t = lo.phi >= hi.phi ? tl : th;
    double best_phi = std::max(lo.phi, hi.phi);
    for (int iter = 0; iter < 64; ++iter) {
      double t_mid = (hi.phi - lo.phi + lo.grad * tl - hi.grad * th) /
                     (lo.grad - hi.grad);
      if (!(t_mid > tl && t_mid < th)) t_mid = 0.5 * (tl + th);
      const double upper = lo.phi + lo.grad * (t_mid - tl);
      Eval mid = eval_split(t_mid);
      if (mid.phi > best_phi) {
        best_phi = mid.phi;
        best_t = t_mid;
      }
      if (mid.phi >= upper - 1e-12 * std::max(1.0, std::abs(upper)))
        return t_mid;  // tangent gap closed: exact maximum
      if (mid.grad > kSlopeTol) {
        tl = t_mid;
        lo = mid;
      } else if (mid.grad < -kSlopeTol) {
        th = t_mid;
        hi = mid;
      } else {
        return t_mid;  // zero supergradient: maximum
      }
    }
    eval_split(best_t);  // leave solver state at the best split seen
    return best_t;
  }

  // Full violation scan at the current iterate; adds (both directions of)
  // the most violated absent pairs, capped at opts_.batch.  Returns how many
  // pairs were added; zero means the iterate is feasible for every pair
  // constraint and hence optimal for the full problem.
  std::size_t scan_and_add(double t) {
    std::vector<double> f(n_);
    for (std::size_t i = 0; i < n_; ++i) f[i] = ns_.node_value(i);

    using Cand = std::tuple<double, int, int>;  // (violation, i, j)
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> heap;
    const double alpha = spec_.alpha;
    const std::size_t d = g_.dim;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      const double fi = f[i];
      const double* x = flat_.data() + i * d;
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double* y = flat_.data() + j * d;
        double dist;
        if (g_.norm == Norm::MaxCoordinate) {
          dist = std::abs(x[0] - y[0]);
          for (std::size_t a = 1; a < d; ++a)
            dist = std::max(dist, std::abs(x[a] - y[a]));
        } else {
          double s = 0.0;
          for (std::size_t a = 0; a < d; ++a) {
            double dd = x[a] - y[a];
            s += dd * dd;
          }
          dist = std::sqrt(s);
        }
        const double viol = std::abs(fi - f[j]) - t * snowflake(dist, alpha);
        if (viol <= opts_.tol) continue;
        Cand c(viol, static_cast<int>(i), static_cast<int>(j));
        if (heap.size() < opts_.batch) {
          heap.push(c);
        } else if (c > heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
    }

    std::vector<std::pair<int, int>> chosen;
    while (!heap.empty()) {
      auto [viol, i, j] = heap.top();
      heap.pop();
      if (!present_.count(pair_key(i, j))) chosen.emplace_back(i, j);
    }
    std::sort(chosen.begin(), chosen.end());
    for (const auto& [i, j] : chosen) add_pair(i, j);
    return chosen.size();
  }

  void verify(const IPMResult& res, double by_witness) const {
    const double scale = std::max(1.0, std::abs(res.value));
    if (std::abs(res.value - by_witness) > 1e-9 * scale)
      throw NumericError("ipm: witness value disagrees with flow optimum");
    const double m = res.sup_budget;
    for (double fi : res.witness)
      if (std::abs(fi) > m + 1e-8)
        throw NumericError("ipm: witness exceeds sup budget");
    const double L = spec_.radius;
    if (spec_.ball == BallConvention::Sum) {
      if (res.sup_budget + res.seminorm_budget > L + 1e-9)
        throw NumericError("ipm: budget split exceeds radius");
    } else {
      if (res.sup_budget > L + 1e-9 || res.seminorm_budget > L + 1e-9)
        throw NumericError("ipm: budget exceeds radius");
    }
  }

  const SupportGraph& g_;
  const std::vector<double>& w_;
  const HolderClassSpec& spec_;
  const SolverOptions& opts_;
  std::size_t n_;
  NetworkSimplex ns_;
  std::vector<double> flat_;
  std::vector<double> unit_;  // snowflake distance per pair arc id
  std::unordered_set<std::uint64_t> present_;
  double cur_t_ = 0.0;
};

IPMResult empty_result(const HolderClassSpec& spec) {
  IPMResult res;
  res.value = 0.0;
  res.status = SolveStatus::Optimal;
  res.sup_budget = spec.radius;
  res.seminorm_budget = 0.0;
  return res;
}

}  // namespace

IPMResult holder_ipm_on_graph(const SupportGraph& graph,
                              const std::vector<double>& weights,
                              const HolderClassSpec& spec,
                              const SolverOptions& opts) {
  spec.validate();
  if (weights.size() != graph.points.size())
    throw ConfigError("ipm: weight count does not match graph points");
  if (graph.points.empty()) return empty_result(spec);
  return Engine(graph, weights, spec, opts).run();
}

IPMResult holder_ipm(const DiscreteMeasure& p, const DiscreteMeasure& q,
                     const HolderClassSpec& spec, const SolverOptions& opts) {
  p.validate();
  q.validate();
  if (p.kind != MeasureKind::Probability || q.kind != MeasureKind::Probability)
    throw ConfigError("ipm: inputs must be probability measures");
  if (p.dim() != q.dim()) throw ConfigError("ipm: dimension mismatch");
  spec.validate();
  if (p.dim() != spec.dim)
    throw ConfigError("ipm: measure dimension does not match class spec");

  // Merge the union support, summing signed weights of coincident atoms.
  std::vector<std::pair<Point, double>> items;
  items.reserve(p.size() + q.size());
  for (std::size_t i = 0; i < p.size(); ++i) items.push_back({p.points[i], p.weights[i]});
  for (std::size_t j = 0; j < q.size(); ++j) items.push_back({q.points[j], -q.weights[j]});
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Point> points;
  std::vector<double> w;
  for (auto& [pt, weight] : items) {
    if (!points.empty() && points.back() == pt)
      w.back() += weight;
    else {
      points.push_back(std::move(pt));
      w.push_back(weight);
    }
  }
  // Drop exactly cancelled atoms; they carry no signal.
  std::size_t keep = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (w[i] != 0.0) {
      if (keep != i) {
        points[keep] = std::move(points[i]);
        w[keep] = w[i];
      }
      ++keep;
    }
  }
  points.resize(keep);
  w.resize(keep);
  if (points.empty()) return empty_result(spec);

  // Canonical orientation: flip signs so the first weight is positive.  The
  // class is symmetric under f -> -f, so the value is unchanged, and both
  // argument orders now run the identical computation (exact symmetry).
  bool flipped = false;
  if (w[0] < 0.0) {
    flipped = true;
    for (double& x : w) x = -x;
  }

  SupportGraph graph = SupportGraph::build(points, spec.norm, opts.neighbor_seeds);
  // Sorted unique inputs are unchanged by build(); weights stay aligned.
  IPMResult res = Engine(graph, w, spec, opts).run();
  if (flipped)
    for (double& fi : res.witness) fi = -fi;
  return res;
}

IPMResult rademacher_sup(const std::vector<Point>& sample,
                         const std::vector<int>& signs,
                         const HolderClassSpec& spec,
                         const SolverOptions& opts) {
  spec.validate();
  if (sample.empty()) throw ConfigError("rademacher: empty sample");
  if (sample[0].dim() != spec.dim)
    throw ConfigError("rademacher: sample dimension does not match class spec");
  if (sample.size() != signs.size())
    throw ConfigError("rademacher: sign count does not match sample size");
  for (int s : signs)
    if (s != 1 && s != -1) throw ConfigError("rademacher: signs must be +1 or -1");

  const double inv_n = 1.0 / static_cast<double>(sample.size());
  std::vector<std::pair<Point, double>> items;
  items.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i)
    items.push_back({sample[i], signs[i] * inv_n});
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Point> points;
  std::vector<double> w;
  for (auto& [pt, weight] : items) {
    if (!points.empty() && points.back() == pt)
      w.back() += weight;
    else {
      points.push_back(std::move(pt));
      w.push_back(weight);
    }
  }
  std::size_t keep = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (w[i] != 0.0) {
      if (keep != i) {
        points[keep] = std::move(points[i]);
        w[keep] = w[i];
      }
      ++keep;
    }
  }
  points.resize(keep);
  w.resize(keep);
  if (points.empty()) return empty_result(spec);

  SupportGraph graph = SupportGraph::build(points, spec.norm, opts.neighbor_seeds);
  return Engine(graph, w, spec, opts).run();
}

OtResult ot_primal(const DiscreteMeasure& p, const DiscreteMeasure& q,
                   const Matrix& cost, std::size_t support_cap) {
  p.validate();
  q.validate();
  if (p.kind != MeasureKind::Probability || q.kind != MeasureKind::Probability)
    throw ConfigError("ot: inputs must be probability measures");
  const std::size_t a = p.size(), b = q.size();
  if (a > support_cap || b > support_cap)
    throw SizeError("ot: support exceeds the dense-solver cap of " +
                    std::to_string(support_cap) + " points");
  if (cost.n != a + b)
    throw ConfigError("ot: cost matrix must index the concatenated supports");

  // Coupling LP over pi_{ij} >= 0: row sums equal p, column sums equal q
  // (the inequality pair is tight because total mass matches), minimizing
  // transport cost == maximizing its negation.
  LpProblem lp;
  lp.objective.assign(a * b, 0.0);
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j)
      lp.objective[i * b + j] = -cost.at(i, a + j);
  lp.a.assign(a + b, std::vector<double>(a * b, 0.0));
  lp.b.assign(a + b, 0.0);
  for (std::size_t i = 0; i < a; ++i) {
    for (std::size_t j = 0; j < b; ++j) lp.a[i][i * b + j] = 1.0;
    lp.b[i] = p.weights[i];
  }
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t i = 0; i < a; ++i) lp.a[a + j][i * b + j] = -1.0;
    lp.b[a + j] = -q.weights[j];
  }

  LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericError(std::string("ot: coupling solve ended ") +
                       lp_status_name(sol.status));

  // The marginals certify the coupling; verify before trusting the value.
  for (std::size_t i = 0; i < a; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < b; ++j) row += sol.x[i * b + j];
    if (std::abs(row - p.weights[i]) > 1e-7)
      throw NumericError("ot: coupling row marginal off");
  }
  for (std::size_t j = 0; j < b; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < a; ++i) col += sol.x[i * b + j];
    if (std::abs(col - q.weights[j]) > 1e-7)
      throw NumericError("ot: coupling column marginal off");
  }

  OtResult out;
  out.value = -sol.value;
  if (out.value < 0.0 && out.value > -1e-12) out.value = 0.0;
  out.coupling = std::move(sol.x);
  return out;
}

}  // namespace ipm
