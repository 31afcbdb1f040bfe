#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ipm/ipm.hpp"
#include "ipm/measures.hpp"

namespace ipm {

using BigInt = boost::multiprecision::cpp_int;

// Function given by values on a regular corner-aligned lattice
// { i*spacing : 0 <= i < nodes_per_axis }^dim over [0,1]^d.  Net members
// share one lattice, so it is held by shared pointer.
struct GridFunction {
  std::size_t dim = 0;
  std::size_t nodes_per_axis = 0;
  double spacing = 0.0;
  std::shared_ptr<const std::vector<Point>> lattice;
  std::vector<double> values;  // one per lattice node, odometer order

  const std::vector<Point>& nodes() const { return *lattice; }
  std::size_t node_count() const { return values.size(); }
  // Nearest-node extension (ties round to the higher index).
  double value_at(const Point& x) const;
};

// Resolution-dependent parameters of the net construction.
struct NetGeometry {
  double spacing = 0.0;            // h = (eps/L)^(1/alpha)
  std::size_t nodes_per_axis = 0;  // floor(1/h) + 1
  std::size_t value_levels = 0;    // 2*floor(L/eps) + 1 multiples of eps
  std::size_t level_step = 2;      // max level change between adjacent nodes
  std::size_t node_count = 0;      // nodes_per_axis^dim
};
NetGeometry net_geometry(const HolderClassSpec& spec, double eps);

// Exact cardinality of the lattice net at resolution eps, without
// materializing it: one-dimensional lattices use a level-occupancy dynamic
// program (any size); higher dimensions enumerate and are capped by
// `enum_cap` (SizeError beyond it).
BigInt holder_net_size(const HolderClassSpec& spec, double eps,
                       std::size_t enum_cap = 100000000);

// Natural log of a positive big integer, accurate to double precision.
double log_big(const BigInt& x);

// Materializes the net (lexicographic by quantized value levels).  The
// member count is established first; if it exceeds `cap`, a SizeError
// reporting the estimate is thrown.
std::vector<GridFunction> build_holder_net(const HolderClassSpec& spec,
                                           double eps,
                                           std::size_t cap = 10000000);

// True iff f has eps-quantized values and adjacent-node increments within
// the construction slack 2*eps (+ tolerance): the defining member property.
bool is_net_member(const GridFunction& f, const HolderClassSpec& spec,
                   double eps);

// max over node pairs of |f(x) - f(y)| / dist(x,y)^alpha; exact on the grid
// and a lower bound for the continuum seminorm.  Needs >= 2 nodes.
double holder_seminorm_on_grid(const GridFunction& f, double alpha, Norm norm);

struct EntropyPoint {
  double eps = 0.0;
  double log_size = 0.0;
};

struct EntropyProfile {
  std::vector<EntropyPoint> entries;  // eps strictly decreasing
  // Power-law fit log_size ~ fitted_constant * eps^(-fitted_exponent),
  // obtained by least squares of log(log_size) against log(1/eps); the
  // exponent estimates d/alpha.
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;
};

// Entropy curve from exact net counts (not materialized, so resolutions far
// beyond the build cap are fine in d=1).  Needs >= 3 distinct eps values.
EntropyProfile estimate_entropy(const HolderClassSpec& spec,
                                std::vector<double> epsilons);

// R * sqrt(2 log M) / n for a finite set of M vectors with largest Euclidean
// length R: the expected-maximum bound for a finite dictionary.
double massart_bound(const std::vector<std::vector<double>>& vectors,
                     std::size_t n);

struct CoveringCounts {
  std::size_t n_emp = 0;  // minimal cover count, empirical L2 pseudo-metric
  std::size_t n_sup = 0;  // minimal cover count, sup-norm on the grid
  bool exact = true;      // false when the greedy fallback was used
};

// Minimal closed-ball eps-cover cardinalities of a function dictionary under
// the empirical L2(sample) pseudo-metric and under the grid sup-norm.
// Dictionaries up to `exact_cap` use exhaustive minimal covers (where
// N_emp <= N_sup is guaranteed); larger ones fall back to greedy covers and
// set exact = false.
CoveringCounts covering_compare(const std::vector<Point>& sample,
                                const std::vector<GridFunction>& dictionary,
                                double eps, std::size_t exact_cap = 12);

}  // namespace ipm
