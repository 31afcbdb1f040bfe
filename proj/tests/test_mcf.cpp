#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ipm/lp.hpp"
#include "ipm/network_simplex.hpp"

using namespace ipm;

namespace {

struct MiniRng {
  std::uint64_t s;
  explicit MiniRng(std::uint64_t seed) : s(seed) {}
  double next01() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * next01(); }
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(next01() * static_cast<double>(n)) % n;
  }
};

struct Instance {
  std::size_t n = 0;
  double buffer_cost = 1.0;
  std::vector<double> supply;
  std::vector<std::array<double, 3>> arcs;  // tail, head, cost
};

Instance random_instance(MiniRng& rng, std::size_t n, std::size_t extra_arcs) {
  Instance inst;
  inst.n = n;
  inst.buffer_cost = rng.range(0.05, 1.0);
  inst.supply.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    inst.supply[i] = rng.range(-1.0, 1.0);
    total += inst.supply[i];
  }
  inst.supply[n - 1] = -total;  // exact zero-sum
  for (std::size_t k = 0; k < extra_arcs; ++k) {
    std::size_t t = rng.index(n), h = rng.index(n);
    if (t == h) continue;
    inst.arcs.push_back({static_cast<double>(t), static_cast<double>(h),
                         rng.range(0.0, 1.0)});
  }
  return inst;
}

NetworkSimplex build(const Instance& inst) {
  NetworkSimplex ns(inst.n);
  ns.set_buffer_cost(inst.buffer_cost);
  for (std::size_t i = 0; i < inst.n; ++i) ns.set_supply(i, inst.supply[i]);
  for (const auto& a : inst.arcs)
    ns.add_pair_arc(static_cast<std::size_t>(a[0]),
                    static_cast<std::size_t>(a[1]), a[2]);
  return ns;
}

// Min-cost flow as a dense LP: flow variables on every arc (pair arcs plus
// one disposal and one creation arc per node through the virtual node),
// equality conservation at real nodes written as two inequalities.
double lp_min_cost(const Instance& inst) {
  const std::size_t pair = inst.arcs.size();
  const std::size_t nv = pair + 2 * inst.n;  // pair, disposal, creation
  LpProblem p;
  p.objective.assign(nv, 0.0);
  for (std::size_t k = 0; k < pair; ++k) p.objective[k] = -inst.arcs[k][2];
  for (std::size_t i = 0; i < inst.n; ++i) {
    p.objective[pair + i] = -inst.buffer_cost;
    p.objective[pair + inst.n + i] = -inst.buffer_cost;
  }
  for (std::size_t i = 0; i < inst.n; ++i) {
    std::vector<double> row(nv, 0.0);
    for (std::size_t k = 0; k < pair; ++k) {
      if (static_cast<std::size_t>(inst.arcs[k][0]) == i) row[k] += 1.0;
      if (static_cast<std::size_t>(inst.arcs[k][1]) == i) row[k] -= 1.0;
    }
    row[pair + i] += 1.0;           // disposal leaves i
    row[pair + inst.n + i] -= 1.0;  // creation enters i
    p.a.push_back(row);
    p.b.push_back(inst.supply[i]);
    for (auto& v : row) v = -v;
    p.a.push_back(row);
    p.b.push_back(-inst.supply[i]);
  }
  LpSolution s = lp_solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  return -s.value;
}

}  // namespace

TEST_CASE("two-node transfer routes through the cheaper option") {
  NetworkSimplex ns(2);
  ns.set_buffer_cost(1.0);
  ns.set_supply(0, 1.0);
  ns.set_supply(1, -1.0);
  std::size_t arc = ns.add_pair_arc(0, 1, 0.3);
  REQUIRE(ns.optimize() == NetworkSimplex::Status::Optimal);
  CHECK(ns.total_cost() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(ns.pair_flow(arc) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ns.buffer_flow_total() == doctest::Approx(0.0).epsilon(1e-12));

  // Cheaper buffer: dispose at 0 and create at 1 for 0.1 + 0.1 < 0.3.
  NetworkSimplex ns2(2);
  ns2.set_buffer_cost(0.1);
  ns2.set_supply(0, 1.0);
  ns2.set_supply(1, -1.0);
  ns2.add_pair_arc(0, 1, 0.3);
  REQUIRE(ns2.optimize() == NetworkSimplex::Status::Optimal);
  CHECK(ns2.total_cost() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ns2.buffer_flow_total() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero supplies cost nothing") {
  NetworkSimplex ns(3);
  ns.set_buffer_cost(0.5);
  ns.add_pair_arc(0, 1, 0.2);
  ns.add_pair_arc(1, 2, 0.2);
  REQUIRE(ns.optimize() == NetworkSimplex::Status::Optimal);
  CHECK(ns.total_cost() == 0.0);
}

TEST_CASE("matches the dense LP on random instances") {
  MiniRng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    Instance inst = random_instance(rng, 2 + trial % 4, 2 + trial % 7);
    NetworkSimplex ns = build(inst);
    REQUIRE(ns.optimize() == NetworkSimplex::Status::Optimal);
    const double oracle = lp_min_cost(inst);
    CHECK(ns.total_cost() == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("optimal potentials are feasible and complementary") {
  MiniRng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Instance inst = random_instance(rng, 3 + trial % 3, 4 + trial % 5);
    NetworkSimplex ns = build(inst);
    REQUIRE(ns.optimize() == NetworkSimplex::Status::Optimal);
    const double m = inst.buffer_cost;
    for (std::size_t i = 0; i < inst.n; ++i) {
      CHECK(ns.node_value(i) <= m + 1e-9);
      CHECK(ns.node_value(i) >= -m - 1e-9);
    }
    for (std::size_t k = 0; k < inst.arcs.size(); ++k) {
      const auto& a = inst.arcs[k];
      const double slack = a[2] - ns.node_value(static_cast<std::size_t>(a[0])) +
                           ns.node_value(static_cast<std::size_t>(a[1]));
      CHECK(slack >= -1e-9);
      if (ns.pair_flow(k) > 1e-9) CHECK(std::abs(slack) <= 1e-9);
    }
  }
}

TEST_CASE("flow conservation holds at every real node") {
  MiniRng rng(31);
  Instance inst = random_instance(rng, 5, 9);
  NetworkSimplex ns = build(inst);
  REQUIRE(ns.optimize() == NetworkSimplex::Status::Optimal);
  // Net pair-arc outflow per node; the residual must be served by buffer
  // arcs, whose total we can check in aggregate.
  std::vector<double> residual = inst.supply;
  for (std::size_t k = 0; k < inst.arcs.size(); ++k) {
    residual[static_cast<std::size_t>(inst.arcs[k][0])] -= ns.pair_flow(k);
    residual[static_cast<std::size_t>(inst.arcs[k][1])] += ns.pair_flow(k);
    CHECK(ns.pair_flow(k) >= -1e-12);
  }
  double buffered = 0.0;
  for (double r : residual) buffered += std::abs(r);
  CHECK(buffered == doctest::Approx(ns.buffer_flow_total()).epsilon(1e-9));
}

TEST_CASE("warm restart after cost changes matches a fresh solve") {
  MiniRng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = random_instance(rng, 4, 7);
    NetworkSimplex warm = build(inst);
    REQUIRE(warm.optimize() == NetworkSimplex::Status::Optimal);
    // Perturb every pair-arc cost and re-optimize in place.
    for (std::size_t k = 0; k < inst.arcs.size(); ++k) {
      inst.arcs[k][2] = rng.range(0.0, 1.0);
      warm.set_pair_arc_cost(k, inst.arcs[k][2]);
    }
    REQUIRE(warm.optimize() == NetworkSimplex::Status::Optimal);
    NetworkSimplex fresh = build(inst);
    REQUIRE(fresh.optimize() == NetworkSimplex::Status::Optimal);
    CHECK(warm.total_cost() == doctest::Approx(fresh.total_cost()).epsilon(1e-9));
  }
}

TEST_CASE("repeat solves are bitwise identical") {
  MiniRng rng(314);
  Instance inst = random_instance(rng, 5, 8);
  NetworkSimplex a = build(inst);
  NetworkSimplex b = build(inst);
  REQUIRE(a.optimize() == NetworkSimplex::Status::Optimal);
  REQUIRE(b.optimize() == NetworkSimplex::Status::Optimal);
  CHECK(a.total_cost() == b.total_cost());
  for (std::size_t k = 0; k < inst.arcs.size(); ++k)
    CHECK(a.pair_flow(k) == b.pair_flow(k));
  for (std::size_t i = 0; i < inst.n; ++i)
    CHECK(a.node_value(i) == b.node_value(i));
  CHECK(a.pivot_count() == b.pivot_count());
}
