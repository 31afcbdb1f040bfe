#include "ipm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ipm/io.hpp"
#include "ipm/rng.hpp"

namespace ipm {

Norm parse_norm(const std::string& name) {
  if (name == "l2") return Norm::Euclidean;
  if (name == "linf") return Norm::MaxCoordinate;
  throw ConfigError("unknown norm '" + name + "' (expected l2 or linf)");
}

std::string norm_name(Norm norm) {
  return norm == Norm::Euclidean ? "l2" : "linf";
}

double distance(const Point& a, const Point& b, Norm norm) {
  if (a.dim() != b.dim()) throw ConfigError("distance: dimension mismatch");
  if (norm == Norm::Euclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
      double d = a.coords[i] - b.coords[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    m = std::max(m, std::abs(a.coords[i] - b.coords[i]));
  }
  return m;
}

void DiscreteMeasure::validate() const {
  if (points.size() != weights.size())
    throw ConfigError("measure: points/weights size mismatch");
  if (points.empty()) throw ConfigError("measure: must have at least one atom");
  const std::size_t d = points[0].dim();
  if (d == 0) throw ConfigError("measure: zero-dimensional points");
  for (const Point& p : points) {
    if (p.dim() != d) throw ConfigError("measure: inconsistent point dimensions");
    for (double c : p.coords) {
      if (!std::isfinite(c)) throw ConfigError("measure: non-finite coordinate");
    }
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw ConfigError("measure: non-finite weight");
    if (kind == MeasureKind::Probability && w < 0.0)
      throw ConfigError("measure: negative weight in probability measure");
    sum += w;
  }
  const double target = kind == MeasureKind::Probability ? 1.0 : 0.0;
  if (std::abs(sum - target) > 1e-9)
    throw ConfigError("measure: weights sum to " + std::to_string(sum) +
                      ", expected " + std::to_string(target));
}

DiscreteMeasure grid_measure(std::size_t d, std::size_t k, std::size_t max_points) {
  if (d == 0 || k == 0) throw ConfigError("grid_measure: need d >= 1 and k >= 1");
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > max_points / k)
      throw SizeError("grid_measure: k^d exceeds cap of " + std::to_string(max_points));
    total *= k;
  }
  DiscreteMeasure mu;
  mu.kind = MeasureKind::Probability;
  mu.points.reserve(total);
  const double w = 1.0 / static_cast<double>(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t p = 0; p < total; ++p) {
    Point pt;
    pt.coords.resize(d);
    for (std::size_t axis = 0; axis < d; ++axis) {
      pt.coords[axis] = (static_cast<double>(idx[axis]) + 0.5) / static_cast<double>(k);
    }
    mu.points.push_back(std::move(pt));
    // Odometer increment, last axis fastest: points come out in
    // lexicographic coordinate order.
    for (std::size_t axis = d; axis-- > 0;) {
      if (++idx[axis] < k) break;
      idx[axis] = 0;
    }
  }
  mu.weights.assign(total, w);
  return mu;
}

std::vector<Point> sample_points(const DiscreteMeasure& base, std::size_t n,
                                 std::uint64_t seed) {
  base.validate();
  if (base.kind != MeasureKind::Probability)
    throw ConfigError("sample_points: base must be a probability measure");
  if (n == 0) throw ConfigError("sample_points: need n >= 1");

  std::vector<double> cum(base.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    acc += base.weights[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;  // guard against rounding in the final bucket

  Rng rng(seed);
  std::vector<Point> draws;
  draws.reserve(n);
  for (std::size_t draw = 0; draw < n; ++draw) {
    double u = rng.uniform01();
    std::size_t idx = static_cast<std::size_t>(
        std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (idx >= base.size()) idx = base.size() - 1;
    draws.push_back(base.points[idx]);
  }
  return draws;
}

DiscreteMeasure sample_empirical(const DiscreteMeasure& base, std::size_t n,
                                 std::uint64_t seed) {
  // Count draws per atom; coincident draws merge via the point-keyed map.
  std::map<Point, std::size_t> counts;
  for (Point& pt : sample_points(base, n, seed)) counts[std::move(pt)] += 1;

  DiscreteMeasure emp;
  emp.kind = MeasureKind::Probability;
  emp.points.reserve(counts.size());
  emp.weights.reserve(counts.size());
  for (const auto& [pt, c] : counts) {
    emp.points.push_back(pt);
    emp.weights.push_back(static_cast<double>(c) / static_cast<double>(n));
  }
  return emp;
}

Matrix cost_matrix(const std::vector<Point>& points, Norm norm, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("cost_matrix: alpha must be positive");
  if (alpha > 1.0)
    throw UnsupportedSmoothnessError(
        "cost_matrix: alpha must lie in (0, 1]; higher smoothness orders are "
        "not supported");
  Matrix c(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double v = snowflake(distance(points[i], points[j], norm), alpha);
      c.at(i, j) = v;
      c.at(j, i) = v;
    }
  }
  return c;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + " value '" + s + "' in measure CSV");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DiscreteMeasure load_measure_csv(const std::string& path, MeasureKind kind) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty measure file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "weight")
    throw ConfigError(path + ": header must be x1,...,xd,weight");
  const std::size_t d = header.size() - 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (header[i] != "x" + std::to_string(i + 1))
      throw ConfigError(path + ": header must be x1,...,xd,weight");
  }

  DiscreteMeasure mu;
  mu.kind = kind;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != d + 1)
      throw ConfigError(path + ": expected " + std::to_string(d + 1) +
                        " columns, got " + std::to_string(cells.size()));
    Point pt;
    pt.coords.resize(d);
    for (std::size_t i = 0; i < d; ++i)
      pt.coords[i] = parse_double(cells[i], "coordinate");
    mu.points.push_back(std::move(pt));
    mu.weights.push_back(parse_double(cells[d], "weight"));
  }
  mu.validate();
  return mu;
}

void save_measure_csv(const DiscreteMeasure& mu, const std::string& path) {
  mu.validate();
  std::ostringstream out;
  const std::size_t d = mu.dim();
  for (std::size_t i = 0; i < d; ++i) out << "x" << (i + 1) << ",";
  out << "weight\n";
  for (std::size_t r = 0; r < mu.size(); ++r) {
    for (std::size_t i = 0; i < d; ++i)
      out << format_double(mu.points[r].coords[i]) << ",";
    out << format_double(mu.weights[r]) << "\n";
  }
  atomic_write_file(path, out.str());
}

}  // namespace ipm
