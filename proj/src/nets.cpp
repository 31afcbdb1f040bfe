#include "ipm/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipm/errors.hpp"

namespace ipm {

double GridFunction::value_at(const Point& x) const {
  if (x.dim() != dim) throw ConfigError("grid function: dimension mismatch");
  const std::size_t g = nodes_per_axis;
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim; ++a) {
    double idx = std::floor(x.coords[a] / spacing + 0.5);
    if (idx < 0.0) idx = 0.0;
    if (idx > static_cast<double>(g - 1)) idx = static_cast<double>(g - 1);
    flat = flat * g + static_cast<std::size_t>(idx);
  }
  return values[flat];
}

NetGeometry net_geometry(const HolderClassSpec& spec, double eps) {
  spec.validate();
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw ConfigError("net: eps must be positive and finite");
  const double L = spec.radius;
  NetGeometry g;
  g.spacing = std::pow(eps / L, 1.0 / spec.alpha);
  double axis = std::floor(1.0 / g.spacing + 1e-12) + 1.0;
  if (axis > 1e15) throw SizeError("net: lattice resolution out of range");
  g.nodes_per_axis = static_cast<std::size_t>(axis);
  const double v = std::floor(L / eps + 1e-12);
  g.value_levels = 2 * static_cast<std::size_t>(v) + 1;
  g.level_step = 2;  // adjacent nodes move at most L*h^alpha + eps = 2*eps
  g.node_count = 1;
  for (std::size_t a = 0; a < spec.dim; ++a) {
    if (g.node_count > (std::size_t(1) << 62) / g.nodes_per_axis)
      throw SizeError("net: lattice node count overflows");
    g.node_count *= g.nodes_per_axis;
  }
  return g;
}

namespace {

BigInt count_members_1d(const NetGeometry& geo) {
  const std::size_t lv = geo.value_levels;
  if (static_cast<double>(geo.nodes_per_axis) * static_cast<double>(lv) > 2e9)
    throw SizeError("net: counting grid too large");
  const int step = static_cast<int>(geo.level_step);
  std::vector<BigInt> cur(lv, 1);
  for (std::size_t node = 1; node < geo.nodes_per_axis; ++node) {
    std::vector<BigInt> nxt(lv, 0);
    for (std::size_t l = 0; l < lv; ++l) {
      if (cur[l].is_zero()) continue;
      const int lo = std::max(0, static_cast<int>(l) - step);
      const int hi = std::min(static_cast<int>(lv) - 1, static_cast<int>(l) + step);
      for (int t = lo; t <= hi; ++t) nxt[t] += cur[l];
    }
    cur.swap(nxt);
  }
  BigInt total = 0;
  for (const BigInt& c : cur) total += c;
  return total;
}

// Iterative lexicographic walk over level assignments; each node's level
// must stay within `step` of every already-assigned axis predecessor.
// Visits members in lexicographic order of the level sequence.  The visitor
// returns false to abort the walk.
template <typename Visitor>
void walk_members(const NetGeometry& geo, std::size_t dim, Visitor&& visit) {
  const std::size_t nodes = geo.node_count;
  const int lv = static_cast<int>(geo.value_levels);
  const int step = static_cast<int>(geo.level_step);
  const std::size_t g = geo.nodes_per_axis;

  // Axis strides in the odometer layout (last axis fastest).
  std::vector<std::size_t> stride(dim);
  std::size_t s = 1;
  for (std::size_t a = dim; a-- > 0;) {
    stride[a] = s;
    s *= g;
  }
  // Multi-index per flat node, to know which predecessors exist.
  std::vector<std::vector<std::size_t>> preds(nodes);
  {
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t p = 0; p < nodes; ++p) {
      for (std::size_t a = 0; a < dim; ++a)
        if (idx[a] > 0) preds[p].push_back(p - stride[a]);
      for (std::size_t a = dim; a-- > 0;) {
        if (++idx[a] < g) break;
        idx[a] = 0;
      }
    }
  }

  std::vector<int> level(nodes, -1), lo(nodes, 0), hi(nodes, 0);
  std::size_t pos = 0;
  while (true) {
    if (pos == nodes) {
      if (!visit(level)) return;
      --pos;
    }
    if (level[pos] < 0) {
      int l = 0, h = lv - 1;
      for (std::size_t pr : preds[pos]) {
        l = std::max(l, level[pr] - step);
        h = std::min(h, level[pr] + step);
      }
      lo[pos] = l;
      hi[pos] = h;
      level[pos] = l - 1;  // pre-increment position
    }
    ++level[pos];
    if (level[pos] > hi[pos] || lo[pos] > hi[pos]) {
      level[pos] = -1;
      if (pos == 0) return;
      --pos;
    } else {
      ++pos;
    }
  }
}

}  // namespace

BigInt holder_net_size(const HolderClassSpec& spec, double eps,
                       std::size_t enum_cap) {
  NetGeometry geo = net_geometry(spec, eps);
  if (spec.dim == 1) return count_members_1d(geo);
  BigInt count = 0;
  bool aborted = false;
  walk_members(geo, spec.dim, [&](const std::vector<int>&) {
    ++count;
    if (count > enum_cap) {
      aborted = true;
      return false;
    }
    return true;
  });
  if (aborted)
    throw SizeError("net: more than " + std::to_string(enum_cap) +
                    " members; exact enumeration capped");
  return count;
}

double log_big(const BigInt& x) {
  if (x <= 0) throw ConfigError("log_big: argument must be positive");
  const std::size_t b = boost::multiprecision::msb(x);
  if (b <= 52) return std::log(x.convert_to<double>());
  const BigInt top = x >> (b - 52);
  return std::log(top.convert_to<double>()) +
         static_cast<double>(b - 52) * std::log(2.0);
}

std::vector<GridFunction> build_holder_net(const HolderClassSpec& spec,
                                           double eps, std::size_t cap) {
  NetGeometry geo = net_geometry(spec, eps);
  BigInt size;
  if (spec.dim == 1) {
    size = count_members_1d(geo);
  } else {
    // Counting walk capped just above the build cap: enough to reject.
    size = 0;
    walk_members(geo, spec.dim, [&](const std::vector<int>&) {
      return ++size <= cap;
    });
  }
  if (size > cap) {
    std::string estimate = spec.dim == 1 ? size.str()
                                         : "more than " + std::to_string(cap);
    throw SizeError("net: estimated size " + estimate + " exceeds cap of " +
                    std::to_string(cap));
  }

  auto lattice = std::make_shared<std::vector<Point>>();
  lattice->reserve(geo.node_count);
  {
    std::vector<std::size_t> idx(spec.dim, 0);
    for (std::size_t p = 0; p < geo.node_count; ++p) {
      Point pt;
      pt.coords.resize(spec.dim);
      for (std::size_t a = 0; a < spec.dim; ++a)
        pt.coords[a] = static_cast<double>(idx[a]) * geo.spacing;
      lattice->push_back(std::move(pt));
      for (std::size_t a = spec.dim; a-- > 0;) {
        if (++idx[a] < geo.nodes_per_axis) break;
        idx[a] = 0;
      }
    }
  }

  const int v_half = static_cast<int>((geo.value_levels - 1) / 2);
  std::vector<GridFunction> net;
  net.reserve(size.convert_to<std::size_t>());
  walk_members(geo, spec.dim, [&](const std::vector<int>& levels) {
    GridFunction f;
    f.dim = spec.dim;
    f.nodes_per_axis = geo.nodes_per_axis;
    f.spacing = geo.spacing;
    f.lattice = lattice;
    f.values.resize(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
      f.values[i] = static_cast<double>(levels[i] - v_half) * eps;
    net.push_back(std::move(f));
    return true;
  });
  return net;
}

bool is_net_member(const GridFunction& f, const HolderClassSpec& spec,
                   double eps) {
  NetGeometry geo = net_geometry(spec, eps);
  if (f.dim != spec.dim || f.nodes_per_axis != geo.nodes_per_axis ||
      f.values.size() != geo.node_count)
    return false;
  const double slack = 1e-9;
  for (double v : f.values) {
    if (std::abs(v) > spec.radius + slack) return false;
    if (std::abs(v - std::round(v / eps) * eps) > slack) return false;
  }
  // Adjacent (axis-neighbor) increments within the construction budget.
  std::vector<std::size_t> stride(spec.dim);
  std::size_t s = 1;
  for (std::size_t a = spec.dim; a-- > 0;) {
    stride[a] = s;
    s *= f.nodes_per_axis;
  }
  std::vector<std::size_t> idx(spec.dim, 0);
  for (std::size_t p = 0; p < f.values.size(); ++p) {
    for (std::size_t a = 0; a < spec.dim; ++a)
      if (idx[a] > 0 &&
          std::abs(f.values[p] - f.values[p - stride[a]]) > 2 * eps + slack)
        return false;
    for (std::size_t a = spec.dim; a-- > 0;) {
      if (++idx[a] < f.nodes_per_axis) break;
      idx[a] = 0;
    }
  }
  return true;
}

double holder_seminorm_on_grid(const GridFunction& f, double alpha, Norm norm) {
  if (!(alpha > 0.0)) throw ConfigError("seminorm: alpha must be positive");
  if (alpha > 1.0)
    throw UnsupportedSmoothnessError("seminorm: alpha must lie in (0, 1]");
  const auto& pts = f.nodes();
  if (pts.size() < 2 || f.values.size() != pts.size())
    throw ConfigError("seminorm: need a grid with at least 2 nodes");
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dist = distance(pts[i], pts[j], norm);
      if (dist <= 0.0) continue;
      best = std::max(best, std::abs(f.values[i] - f.values[j]) /
                                snowflake(dist, alpha));
    }
  }
  return best;
}

EntropyProfile estimate_entropy(const HolderClassSpec& spec,
                                std::vector<double> epsilons) {
  for (double e : epsilons)
    if (!(e > 0.0) || !std::isfinite(e))
      throw ConfigError("entropy: eps values must be positive and finite");
  std::sort(epsilons.begin(), epsilons.end(), std::greater<double>());
  if (std::adjacent_find(epsilons.begin(), epsilons.end()) != epsilons.end())
    throw ConfigError("entropy: eps values must be distinct");
  if (epsilons.size() < 3)
    throw ConfigError("entropy: need at least 3 eps values for a fit");

  EntropyProfile profile;
  for (double e : epsilons) {
    BigInt n = holder_net_size(spec, e);
    if (n < 2)
      throw NumericError("entropy: net at eps=" + std::to_string(e) +
                         " is trivial; use a finer resolution");
    profile.entries.push_back({e, log_big(n)});
  }
  for (std::size_t i = 1; i < profile.entries.size(); ++i)
    if (profile.entries[i].log_size < profile.entries[i - 1].log_size - 1e-12)
      throw NumericError("entropy: counts are not monotone in eps");

  // Least squares of log(logN) on log(1/eps): the slope estimates the
  // entropy growth order d/alpha in logN ~ const * eps^(-d/alpha).
  const std::size_t n = profile.entries.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& e : profile.entries) {
    const double x = std::log(1.0 / e.eps);
    const double y = std::log(e.log_size);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = sxx - sx * sx / n;
  if (denom <= 0.0) throw NumericError("entropy: degenerate regression");
  profile.fitted_exponent = (sxy - sx * sy / n) / denom;
  profile.fitted_constant =
      std::exp(sy / n - profile.fitted_exponent * sx / n);
  return profile;
}

double massart_bound(const std::vector<std::vector<double>>& vectors,
                     std::size_t n) {
  if (vectors.empty()) throw ConfigError("massart: empty vector set");
  if (n == 0) throw ConfigError("massart: need n >= 1");
  double radius = 0.0;
  for (const auto& v : vectors) {
    if (v.empty()) throw ConfigError("massart: empty vector");
    double s = 0.0;
    for (double x : v) s += x * x;
    radius = std::max(radius, std::sqrt(s));
  }
  const double m = static_cast<double>(vectors.size());
  return radius * std::sqrt(2.0 * std::log(m)) / static_cast<double>(n);
}

namespace {

// Exact minimum cover by exhaustive subset search (closed eps-balls around
// dictionary elements).  Feasible because the caller caps M.
std::size_t exact_min_cover(const std::vector<std::vector<double>>& dist,
                            double eps) {
  const std::size_t m = dist.size();
  std::vector<std::uint32_t> ball(m, 0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i)
      if (dist[i][j] <= eps) ball[j] |= std::uint32_t(1) << i;
  const std::uint32_t full = m == 32 ? ~std::uint32_t(0)
                                     : (std::uint32_t(1) << m) - 1;
  std::size_t best = m;
  for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << m); ++mask) {
    const int k = __builtin_popcount(mask);
    if (static_cast<std::size_t>(k) >= best) continue;
    std::uint32_t covered = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (std::uint32_t(1) << j)) covered |= ball[j];
    if (covered == full) best = static_cast<std::size_t>(k);
  }
  return best;
}

std::size_t greedy_cover(const std::vector<std::vector<double>>& dist,
                         double eps) {
  const std::size_t m = dist.size();
  std::vector<char> covered(m, 0);
  std::size_t remaining = m, picks = 0;
  while (remaining > 0) {
    std::size_t best_j = 0, best_gain = 0;
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t gain = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (!covered[i] && dist[i][j] <= eps) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best_j = j;
      }
    }
    if (best_gain == 0) break;  // cannot happen: each point covers itself
    ++picks;
    for (std::size_t i = 0; i < m; ++i)
      if (dist[i][best_j] <= eps) {
        if (!covered[i]) --remaining;
        covered[i] = 1;
      }
  }
  return picks;
}

}  // namespace

CoveringCounts covering_compare(const std::vector<Point>& sample,
                                const std::vector<GridFunction>& dictionary,
                                double eps, std::size_t exact_cap) {
  if (dictionary.empty()) throw ConfigError("covering: empty dictionary");
  if (sample.empty()) throw ConfigError("covering: empty sample");
  if (!(eps >= 0.0)) throw ConfigError("covering: eps must be nonnegative");
  const GridFunction& first = dictionary.front();
  for (const GridFunction& f : dictionary) {
    if (f.dim != first.dim || f.nodes_per_axis != first.nodes_per_axis ||
        f.values.size() != first.values.size())
      throw ConfigError("covering: dictionary members on different grids");
  }
  for (const Point& x : sample)
    if (x.dim() != first.dim)
      throw ConfigError("covering: sample dimension mismatch");

  const std::size_t m = dictionary.size();
  if (exact_cap > 20) exact_cap = 20;  // bitmask search bound

  // Evaluate each member at the sample once.
  std::vector<std::vector<double>> at_sample(m, std::vector<double>(sample.size()));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t s = 0; s < sample.size(); ++s)
      at_sample[j][s] = dictionary[j].value_at(sample[s]);

  std::vector<std::vector<double>> emp(m, std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> sup(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double ss = 0.0;
      for (std::size_t s = 0; s < sample.size(); ++s) {
        const double d = at_sample[i][s] - at_sample[j][s];
        ss += d * d;
      }
      emp[i][j] = emp[j][i] = std::sqrt(ss / static_cast<double>(sample.size()));
      double mx = 0.0;
      for (std::size_t v = 0; v < first.values.size(); ++v)
        mx = std::max(mx, std::abs(dictionary[i].values[v] - dictionary[j].values[v]));
      sup[i][j] = sup[j][i] = mx;
    }
  }

  CoveringCounts out;
  if (m <= exact_cap) {
    out.n_emp = exact_min_cover(emp, eps);
    out.n_sup = exact_min_cover(sup, eps);
    out.exact = true;
  } else {
    out.n_emp = greedy_cover(emp, eps);
    out.n_sup = greedy_cover(sup, eps);
    out.exact = false;
  }
  return out;
}

}  // namespace ipm
