#include "ipm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "ipm/errors.hpp"
#include "ipm/io.hpp"
#include "ipm/rng.hpp"

namespace ipm {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t worker_count(std::size_t tasks) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("IPM_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1) n = static_cast<std::size_t>(v);
  }
  return std::min(n, std::max<std::size_t>(tasks, 1));
}

std::size_t lattice_size(std::size_t d, std::size_t k) {
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (k != 0 && total > (std::size_t(1) << 62) / k)
      throw ConfigError("experiment: lattice size overflows");
    total *= k;
  }
  return total;
}

}  // namespace

SolverOptions RateExperimentConfig::default_lp() {
  SolverOptions opts;
  opts.batch = 1024;
  return opts;
}

void RateExperimentConfig::validate() const {
  spec.validate();
  if (grid_per_axis == 0)
    throw ConfigError("experiment: grid_per_axis must be at least 1");
  if (n_list.size() < 3)
    throw ConfigError("experiment: n_list needs at least 3 entries");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw ConfigError("experiment: n must be at least 1");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw ConfigError("experiment: n_list must be strictly increasing");
  }
  const std::size_t atoms = lattice_size(spec.dim, grid_per_axis);
  // Saturation guard: past n ~ k^d the sample reproduces the lattice and the
  // distance plateaus, corrupting the fit window.  The single-atom lattice is
  // exempt (every value is exactly 0; useful as a degenerate check).
  if (atoms > 1 && n_list.back() * 16 > atoms)
    throw ConfigError(
        "experiment: max(n_list) exceeds lattice saturation guard k^d/16");
  if (reps < 5) throw ConfigError("experiment: reps must be at least 5");
  if (!(lp.tol > 0.0)) throw ConfigError("experiment: lp.tol must be positive");
}

std::vector<RunRecord> run_rate_experiment(const RateExperimentConfig& config) {
  config.validate();
  const DiscreteMeasure truth = grid_measure(config.spec.dim, config.grid_per_axis);
  const SupportGraph graph =
      SupportGraph::build(truth.points, config.spec.norm, config.lp.neighbor_seeds);
  const double atom_mass = truth.weights.front();

  const std::size_t tasks = config.n_list.size() * config.reps;
  std::vector<RunRecord> records(tasks);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::string first_error;
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks || failed.load()) return;
      const std::size_t n = config.n_list[t / config.reps];
      const std::size_t rep = t % config.reps;
      const std::uint64_t seed = derive_seed(config.master_seed, t);
      try {
        const DiscreteMeasure emp = sample_empirical(truth, n, seed);
        std::vector<double> w(graph.points.size(), -atom_mass);
        for (std::size_t i = 0; i < emp.size(); ++i)
          w[graph.index_of(emp.points[i])] += emp.weights[i];
        const IPMResult res =
            holder_ipm_on_graph(graph, w, config.spec, config.lp);
        if (res.status != SolveStatus::Optimal)
          throw NumericError(std::string("solve not optimal (") +
                             solve_status_name(res.status) + ")");
        records[t] = {n, rep, res.value, seed};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!failed.exchange(true))
          first_error = "experiment: n=" + std::to_string(n) +
                        " rep=" + std::to_string(rep) +
                        " seed=" + std::to_string(seed) + ": " + e.what();
        return;
      }
    }
  };

  const std::size_t nworkers = worker_count(tasks);
  if (nworkers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (std::size_t i = 0; i < nworkers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw NumericError(first_error);
  return records;  // task order is (n index, rep): already sorted by (n, rep)
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const RunRecord& r : records) by_n[r.n].push_back(r.value);
  std::vector<SummaryRow> out;
  out.reserve(by_n.size());
  for (const auto& [n, vals] : by_n) {
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double se = 0.0;
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / static_cast<double>(vals.size() - 1) /
                     static_cast<double>(vals.size()));
    }
    out.push_back({n, mean, se});
  }
  return out;
}

RateFit fit_exponent(const std::vector<RunRecord>& records) {
  const std::vector<SummaryRow> summary = summarize(records);
  if (summary.size() < 3)
    throw ConfigError("fit: need at least 3 distinct n values");
  std::vector<double> xs, ys;
  for (const SummaryRow& row : summary) {
    if (!(row.mean > 0.0))
      throw NumericError("fit: mean value at n=" + std::to_string(row.n) +
                         " is not positive; cannot fit a power law");
    xs.push_back(std::log(static_cast<double>(row.n)));
    ys.push_back(std::log(row.mean));
  }
  const double m = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    syy += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0)) throw NumericError("fit: degenerate n values");
  const double slope = sxy / sxx;
  RateFit fit;
  fit.p_hat = -slope;
  fit.intercept = ybar - slope * xbar;
  if (syy <= 0.0) {
    fit.r_squared = 1.0;
    fit.stderr_p = 0.0;
  } else {
    fit.r_squared = (sxy * sxy) / (sxx * syy);
    const double ssr = std::max(0.0, syy - slope * sxy);
    fit.stderr_p = std::sqrt(ssr / (m - 2.0) / sxx);
  }
  return fit;
}

SymmetrizationReport symmetrization_check(const RateExperimentConfig& config,
                                          std::size_t sign_draws) {
  config.validate();
  if (sign_draws < 100)
    throw ConfigError("symmetrization: need at least 100 sign draws");
  const std::size_t n = config.n_list.back();
  if (n > 64)
    throw ConfigError("symmetrization: largest n must be at most 64");

  const DiscreteMeasure truth = grid_measure(config.spec.dim, config.grid_per_axis);
  const SupportGraph graph =
      SupportGraph::build(truth.points, config.spec.norm, config.lp.neighbor_seeds);
  const double atom_mass = truth.weights.front();

  std::vector<double> lhs(config.reps), rhs(config.reps);
  for (std::size_t s = 0; s < config.reps; ++s) {
    const std::uint64_t seed = derive_seed(config.master_seed, s);
    const std::vector<Point> draws = sample_points(truth, n, seed);

    std::vector<double> w(graph.points.size(), -atom_mass);
    for (const Point& pt : draws)
      w[graph.index_of(pt)] += 1.0 / static_cast<double>(n);
    const IPMResult dist = holder_ipm_on_graph(graph, w, config.spec, config.lp);
    if (dist.status != SolveStatus::Optimal)
      throw NumericError("symmetrization: sample solve not optimal at rep " +
                         std::to_string(s));
    lhs[s] = dist.value;

    Rng sign_rng(derive_seed(seed, 1));
    std::vector<int> signs(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < sign_draws; ++k) {
      for (std::size_t i = 0; i < n; ++i) signs[i] = sign_rng.rademacher();
      const IPMResult rad = rademacher_sup(draws, signs, config.spec, config.lp);
      if (rad.status != SolveStatus::Optimal)
        throw NumericError("symmetrization: sign solve not optimal at rep " +
                           std::to_string(s));
      acc += rad.value;
    }
    rhs[s] = acc / static_cast<double>(sign_draws);
  }

  auto mean_se = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double se = 0.0;
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = std::sqrt(ss / static_cast<double>(v.size() - 1) /
                     static_cast<double>(v.size()));
    }
    return std::pair<double, double>(mean, se);
  };

  SymmetrizationReport report;
  report.n = n;
  auto [lm, ls] = mean_se(lhs);
  auto [rm, rs] = mean_se(rhs);
  report.lhs_mean = lm;
  report.lhs_se = ls;
  report.rhs_mean = 2.0 * rm;
  report.rhs_se = 2.0 * rs;
  const double combined = std::hypot(report.lhs_se, report.rhs_se);
  report.margin = report.rhs_mean + 3.0 * combined - report.lhs_mean;
  report.pass = report.margin >= 0.0;
  return report;
}

namespace {

std::string svg_document(const std::vector<SummaryRow>& summary,
                         const RateFit& fit,
                         const RateExperimentConfig& config) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 720 360\" "
         "font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"720\" height=\"360\" fill=\"white\"/>\n";

  // Left panel: log-log scatter of mean distance vs n with the fitted line.
  const double x0 = 60, x1 = 330, y0 = 310, y1 = 40;  // svg y grows downward
  double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
  std::vector<std::pair<double, double>> pts;
  for (const SummaryRow& row : summary) {
    if (!(row.mean > 0.0)) continue;
    const double lx = std::log10(static_cast<double>(row.n));
    const double ly = std::log10(row.mean);
    pts.push_back({lx, ly});
    lx_min = std::min(lx_min, lx);
    lx_max = std::max(lx_max, lx);
    ly_min = std::min(ly_min, ly);
    ly_max = std::max(ly_max, ly);
  }
  if (pts.empty()) {
    lx_min = 0;
    lx_max = 1;
    ly_min = -1;
    ly_max = 0;
  }
  if (lx_max - lx_min < 1e-9) lx_max = lx_min + 1;
  if (ly_max - ly_min < 1e-9) ly_max = ly_min + 1;
  const double pad_y = 0.08 * (ly_max - ly_min);
  ly_min -= pad_y;
  ly_max += pad_y;
  auto sx = [&](double lx) {
    return x0 + (lx - lx_min) / (lx_max - lx_min) * (x1 - x0);
  };
  auto sy = [&](double ly) {
    return y0 + (ly - ly_min) / (ly_max - ly_min) * (y1 - y0);
  };
  char buf[256];
  svg << "<g stroke=\"black\" fill=\"none\"><path d=\"";
  std::snprintf(buf, sizeof buf, "M %.2f %.2f L %.2f %.2f L %.2f %.2f", x0, y1,
                x0, y0, x1, y0);
  svg << buf << "\"/></g>\n";
  // Fitted line in log10 coordinates: log10(mean) = intercept/ln10 - p_hat*log10(n).
  const double ln10 = std::log(10.0);
  std::snprintf(buf, sizeof buf,
                "<polyline fill=\"none\" stroke=\"#c22\" points=\"%.2f,%.2f "
                "%.2f,%.2f\"/>\n",
                sx(lx_min), sy(fit.intercept / ln10 - fit.p_hat * lx_min),
                sx(lx_max), sy(fit.intercept / ln10 - fit.p_hat * lx_max));
  svg << buf;
  for (const auto& [lx, ly] : pts) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#225\"/>\n",
                  sx(lx), sy(ly));
    svg << buf;
  }
  svg << "<text x=\"170\" y=\"335\">log10 n</text>\n"
      << "<text x=\"14\" y=\"175\" transform=\"rotate(-90 14 175)\">log10 mean"
         " distance</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"28\">fitted exponent %.3f "
                "(stderr %.3f)</text>\n",
                x0, fit.p_hat, fit.stderr_p);
  svg << buf;

  // Right panel: theory exponent curve min(alpha/d, 1/2) with the fitted
  // point marked at this experiment's alpha.
  const double u0 = 420, u1 = 690, v0 = 310, v1 = 40;
  const double a_max = std::max(1.0, config.spec.alpha);
  const double p_max = 0.62;
  auto ux = [&](double a) { return u0 + a / a_max * (u1 - u0); };
  auto vy = [&](double p) { return v0 + p / p_max * (v1 - v0); };
  svg << "<g stroke=\"black\" fill=\"none\"><path d=\"";
  std::snprintf(buf, sizeof buf, "M %.2f %.2f L %.2f %.2f L %.2f %.2f", u0, v1,
                u0, v0, u1, v0);
  svg << buf << "\"/></g>\n<polyline fill=\"none\" stroke=\"#282\" points=\"";
  for (int i = 1; i <= 60; ++i) {
    const double a = a_max * i / 60.0;
    const double p = std::min(a / static_cast<double>(config.spec.dim), 0.5);
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", ux(a), vy(p));
    svg << buf;
  }
  svg << "\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#c22\"/>\n",
                ux(config.spec.alpha), vy(std::min(std::max(fit.p_hat, 0.0), p_max)));
  svg << buf;
  svg << "<text x=\"530\" y=\"335\">alpha</text>\n"
      << "<text x=\"378\" y=\"175\" transform=\"rotate(-90 378 175)\">exponent"
         "</text>\n"
      << "<text x=\"420\" y=\"28\">theory min(alpha/d, 1/2) vs fit</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::string> emit_results(const std::vector<RunRecord>& records,
                                      const RateFit& fit,
                                      const RateExperimentConfig& config,
                                      const std::string& out_dir,
                                      EmitFormat format) {
  if (records.empty()) throw ConfigError("emit: no records");
  std::string dir = out_dir;
  if (!dir.empty() && dir.back() != '/') dir += '/';
  std::vector<std::string> written;

  if (format == EmitFormat::Csv) {
    std::string rows = "n,rep,value,seed\n";
    for (const RunRecord& r : records)
      rows += std::to_string(r.n) + "," + std::to_string(r.rep) + "," +
              fmt(r.value) + "," + std::to_string(r.seed) + "\n";
    atomic_write_file(dir + "records.csv", rows);
    written.push_back(dir + "records.csv");

    std::string summary = "n,mean,stderr\n";
    for (const SummaryRow& row : summarize(records))
      summary += std::to_string(row.n) + "," + fmt(row.mean) + "," +
                 fmt(row.se) + "\n";
    atomic_write_file(dir + "summary.csv", summary);
    written.push_back(dir + "summary.csv");

    const std::string fit_row = "p_hat,stderr_p,r2\n" + fmt(fit.p_hat) + "," +
                                fmt(fit.stderr_p) + "," + fmt(fit.r_squared) +
                                "\n";
    atomic_write_file(dir + "fit.csv", fit_row);
    written.push_back(dir + "fit.csv");
  } else {
    atomic_write_file(dir + "rates.svg",
                      svg_document(summarize(records), fit, config));
    written.push_back(dir + "rates.svg");
  }
  return written;
}

std::vector<RunRecord> load_records_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "n,rep,value,seed")
    throw ConfigError("records csv: bad header in " + path);
  std::vector<RunRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    RunRecord r;
    if (!(row >> r.n >> r.rep >> r.value >> r.seed))
      throw ConfigError("records csv: bad row at line " +
                        std::to_string(lineno) + " in " + path);
    records.push_back(r);
  }
  return records;
}

}  // namespace ipm
