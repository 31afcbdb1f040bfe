#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ipm/errors.hpp"

namespace ipm {

// Ground-space norm used for distances between support points.
enum class Norm { Euclidean, MaxCoordinate };

Norm parse_norm(const std::string& name);          // "l2" | "linf"
std::string norm_name(Norm norm);

struct Point {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  bool operator==(const Point& o) const { return coords == o.coords; }
  bool operator<(const Point& o) const { return coords < o.coords; }
};

double distance(const Point& a, const Point& b, Norm norm);

// c = dist^alpha ("snowflake" metric; a metric exactly when alpha <= 1).
// Inline with fast paths: the hot constraint scans call this per pair.
inline double snowflake(double dist, double alpha) {
  if (alpha == 1.0) return dist;
  if (dist == 0.0) return 0.0;
  if (alpha == 0.5) return std::sqrt(dist);
  return std::pow(dist, alpha);
}

enum class MeasureKind { Probability, Signed };

// Finite measure given by atoms.  Probability: weights >= 0 summing to 1
// (tolerance 1e-9).  Signed: weights summing to 0, as in a difference of two
// probability measures.
struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> weights;
  MeasureKind kind = MeasureKind::Probability;

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.empty() ? 0 : points[0].dim(); }

  // Throws ConfigError on mismatched sizes/dims or violated weight rules.
  void validate() const;
};

// Uniform measure on the centered lattice {(i + 1/2)/k : 0 <= i < k}^d.
// Throws SizeError when k^d exceeds `max_points`.
DiscreteMeasure grid_measure(std::size_t d, std::size_t k,
                             std::size_t max_points = 65536);

// n i.i.d. draws from `base` in draw order (inverse-CDF over cumulative
// weights; fixed seed gives bit-identical output everywhere).
std::vector<Point> sample_points(const DiscreteMeasure& base, std::size_t n,
                                 std::uint64_t seed);

// Same draws, returned as the empirical measure with weights 1/n and
// coincident draws merged.
DiscreteMeasure sample_empirical(const DiscreteMeasure& base, std::size_t n,
                                 std::uint64_t seed);

// Dense square matrix, row-major.
struct Matrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit Matrix(std::size_t n_ = 0) : n(n_), a(n_ * n_, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Pairwise snowflake costs dist(x_i, x_j)^alpha.  alpha must lie in (0, 1];
// larger orders throw UnsupportedSmoothnessError.
Matrix cost_matrix(const std::vector<Point>& points, Norm norm, double alpha);

// CSV with header x1,...,xd,weight; one atom per row.
DiscreteMeasure load_measure_csv(const std::string& path, MeasureKind kind);
void save_measure_csv(const DiscreteMeasure& mu, const std::string& path);

}  // namespace ipm
