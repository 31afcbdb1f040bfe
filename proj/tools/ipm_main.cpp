#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipm/bounds.hpp"
#include "ipm/errors.hpp"
#include "ipm/experiments.hpp"
#include "ipm/io.hpp"
#include "ipm/ipm.hpp"
#include "ipm/measures.hpp"
#include "ipm/nets.hpp"
#include "ipm/rng.hpp"

namespace {

using namespace ipm;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size() || v[0] == '-')
      throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
  }
}

std::vector<std::size_t> parse_n_list(const std::string& v) {
  std::vector<std::size_t> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: empty entry in n_list");
    out.push_back(static_cast<std::size_t>(to_uint("n_list", item)));
  }
  if (out.empty()) throw ConfigError("config: n_list is empty");
  return out;
}

// Flat key=value file; '#' starts a comment, blank lines ignored, later
// occurrences of a key override earlier ones, unknown keys rejected.
std::map<std::string, std::string> read_flat_config(const std::string& path) {
  static const std::set<std::string> known = {
      "alpha", "radius",   "d",    "norm", "ball",   "grid_per_axis",
      "n_list", "reps",    "seed", "lp.tol", "lp.max_rounds", "out_dir"};
  std::map<std::string, std::string> kv;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value at line " +
                        std::to_string(lineno) + " of " + path);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + key + "' at line " +
                        std::to_string(lineno) + " of " + path);
    if (value.empty())
      throw ConfigError("config: empty value for '" + key + "' at line " +
                        std::to_string(lineno) + " of " + path);
    kv[key] = value;
  }
  return kv;
}

struct ExperimentCli {
  std::string config_path;
  std::string out_dir = "out";
  RateExperimentConfig cfg;

  // CLI-provided overrides (flags win over the config file).
  double alpha = 1.0, radius = 1.0, lp_tol = 1e-9;
  std::size_t d = 1, grid_per_axis = 32, reps = 20, lp_max_rounds = 64;
  std::uint64_t seed = 0;
  std::string norm = "linf", ball = "sum", n_list_text = "16,32,64";

  CLI::Option *o_alpha = nullptr, *o_radius = nullptr, *o_d = nullptr,
              *o_norm = nullptr, *o_ball = nullptr, *o_grid = nullptr,
              *o_nlist = nullptr, *o_reps = nullptr, *o_seed = nullptr,
              *o_tol = nullptr, *o_rounds = nullptr, *o_out = nullptr;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "flat key=value config file (keys: alpha radius d norm "
                    "ball grid_per_axis n_list reps seed lp.tol lp.max_rounds "
                    "out_dir)");
    o_alpha = cmd->add_option("--alpha", alpha, "smoothness in (0,1]");
    o_radius = cmd->add_option("--radius", radius, "class radius L");
    o_d = cmd->add_option("--d", d, "dimension");
    o_norm = cmd->add_option("--norm", norm, "ground norm: l2 or linf");
    o_ball = cmd->add_option("--ball", ball, "budget convention: sum or max");
    o_grid = cmd->add_option("--grid-per-axis", grid_per_axis,
                             "ground-truth lattice nodes per axis (key "
                             "grid_per_axis)");
    o_nlist = cmd->add_option("--n-list", n_list_text,
                              "comma-separated sample sizes (key n_list)");
    o_reps = cmd->add_option("--reps", reps, "replications per n");
    o_seed = cmd->add_option("--seed", seed, "master seed");
    o_tol = cmd->add_option("--lp-tol", lp_tol,
                            "constraint violation tolerance (key lp.tol)");
    o_rounds = cmd->add_option("--lp-max-rounds", lp_max_rounds,
                               "constraint generation round cap (key "
                               "lp.max_rounds)");
    o_out = cmd->add_option("--out-dir", out_dir, "output directory (key "
                            "out_dir)");
  }

  void resolve() {
    if (!config_path.empty()) {
      const auto kv = read_flat_config(config_path);
      auto get = [&](const char* k) { return kv.count(k) ? kv.at(k) : ""; };
      if (auto v = get("alpha"); !v.empty()) cfg.spec.alpha = to_double("alpha", v);
      if (auto v = get("radius"); !v.empty()) cfg.spec.radius = to_double("radius", v);
      if (auto v = get("d"); !v.empty()) cfg.spec.dim = to_uint("d", v);
      if (auto v = get("norm"); !v.empty()) cfg.spec.norm = parse_norm(v);
      if (auto v = get("ball"); !v.empty()) cfg.spec.ball = parse_ball(v);
      if (auto v = get("grid_per_axis"); !v.empty())
        cfg.grid_per_axis = to_uint("grid_per_axis", v);
      if (auto v = get("n_list"); !v.empty()) cfg.n_list = parse_n_list(v);
      if (auto v = get("reps"); !v.empty()) cfg.reps = to_uint("reps", v);
      if (auto v = get("seed"); !v.empty()) cfg.master_seed = to_uint("seed", v);
      if (auto v = get("lp.tol"); !v.empty()) cfg.lp.tol = to_double("lp.tol", v);
      if (auto v = get("lp.max_rounds"); !v.empty())
        cfg.lp.max_rounds = to_uint("lp.max_rounds", v);
      // the option writes straight into out_dir at parse time, so only
      // fall back to the config value when the flag was absent
      if (auto v = get("out_dir"); !v.empty() && o_out->count() == 0)
        out_dir = v;
    } else {
      cfg.n_list = parse_n_list(n_list_text);
    }
    if (o_alpha->count()) cfg.spec.alpha = alpha;
    if (o_radius->count()) cfg.spec.radius = radius;
    if (o_d->count()) cfg.spec.dim = d;
    if (o_norm->count()) cfg.spec.norm = parse_norm(norm);
    if (o_ball->count()) cfg.spec.ball = parse_ball(ball);
    if (o_grid->count()) cfg.grid_per_axis = grid_per_axis;
    if (o_nlist->count()) cfg.n_list = parse_n_list(n_list_text);
    if (o_reps->count()) cfg.reps = reps;
    if (o_seed->count()) cfg.master_seed = seed;
    if (o_tol->count()) cfg.lp.tol = lp_tol;
    if (o_rounds->count()) cfg.lp.max_rounds = lp_max_rounds;
    cfg.validate();
  }
};

int run_compute(const std::string& p_path, const std::string& q_path,
                const HolderClassSpec& partial_spec,
                const std::string& witness_path) {
  const DiscreteMeasure p = load_measure_csv(p_path, MeasureKind::Probability);
  const DiscreteMeasure q = load_measure_csv(q_path, MeasureKind::Probability);
  HolderClassSpec spec = partial_spec;
  spec.dim = p.dim();
  const IPMResult res = holder_ipm(p, q, spec);
  if (res.status != SolveStatus::Optimal)
    throw NumericError(std::string("compute: solve ended ") +
                       solve_status_name(res.status));
  std::cout << fmt(res.value) << "\n";
  if (!witness_path.empty()) {
    std::string csv = "index";
    for (std::size_t a = 1; a <= spec.dim; ++a)
      csv += ",x" + std::to_string(a);
    csv += ",f\n";
    for (std::size_t i = 0; i < res.support.size(); ++i) {
      csv += std::to_string(i);
      for (double c : res.support[i].coords) csv += "," + fmt(c);
      csv += "," + fmt(res.witness[i]) + "\n";
    }
    atomic_write_file(witness_path, csv);
  }
  return 0;
}

int run_rates(ExperimentCli& ex) {
  ex.resolve();
  const std::vector<RunRecord> records = run_rate_experiment(ex.cfg);
  for (const SummaryRow& row : summarize(records))
    std::cerr << "n=" << row.n << " mean=" << fmt(row.mean)
              << " stderr=" << fmt(row.se) << "\n";
  const RateFit fit = fit_exponent(records);
  emit_results(records, fit, ex.cfg, ex.out_dir, EmitFormat::Csv);
  emit_results(records, fit, ex.cfg, ex.out_dir, EmitFormat::Svg);
  std::cout << "p_hat,stderr_p,r2\n"
            << fmt(fit.p_hat) << "," << fmt(fit.stderr_p) << ","
            << fmt(fit.r_squared) << "\n";
  return 0;
}

int run_bounds(const std::vector<std::size_t>& ns, BoundParams params,
               bool lambda_set, const std::string& mode_name) {
  if (!lambda_set)
    params.lambda = std::pow(3.0, static_cast<double>(params.d));
  params.validate();
  const BoundMode mode = parse_bound_mode(mode_name);
  std::cout << "n,bound,mode,branch\n";
  for (std::size_t n : ns) {
    const double value = finite_sample_bound(n, params, mode);
    if (mode == BoundMode::TwoBranch && value <= 0.0)
      std::cerr << "warning: two-branch bound is nonpositive at n=" << n
                << " (small-n regime); prefer --mode composed\n";
    std::cout << n << "," << fmt(value) << "," << bound_mode_name(mode) << ","
              << rate_branch_name(params.alpha, params.d) << "\n";
  }
  return 0;
}

int run_entropy(const HolderClassSpec& spec, const std::vector<double>& eps) {
  const EntropyProfile profile = estimate_entropy(spec, eps);
  std::cout << "eps,log_size\n";
  for (const EntropyPoint& e : profile.entries)
    std::cout << fmt(e.eps) << "," << fmt(e.log_size) << "\n";
  std::cout << "# fitted_exponent=" << fmt(profile.fitted_exponent)
            << " fitted_constant=" << fmt(profile.fitted_constant) << "\n";
  return 0;
}

int run_rademacher(const std::string& sample_path, HolderClassSpec spec,
                   std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw ConfigError("rademacher: need at least 1 draw");
  const DiscreteMeasure sample =
      load_measure_csv(sample_path, MeasureKind::Probability);
  spec.dim = sample.dim();
  // Points with weight w stand for n*w coincident draws; signs are drawn per
  // listed point, which matches a sample file listing each draw once.
  Rng rng(seed);
  std::vector<int> signs(sample.points.size());
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    for (auto& s : signs) s = rng.rademacher();
    const IPMResult res = rademacher_sup(sample.points, signs, spec);
    if (res.status != SolveStatus::Optimal)
      throw NumericError(std::string("rademacher: solve ended ") +
                         solve_status_name(res.status));
    acc += res.value;
    acc2 += res.value * res.value;
  }
  const double mean = acc / static_cast<double>(draws);
  double se = 0.0;
  if (draws > 1) {
    const double var =
        std::max(0.0, (acc2 - acc * mean) / static_cast<double>(draws - 1));
    se = std::sqrt(var / static_cast<double>(draws));
  }
  std::cout << "mean,stderr\n" << fmt(mean) << "," << fmt(se) << "\n";
  return 0;
}

int run_symcheck(ExperimentCli& ex, std::size_t sign_draws) {
  ex.resolve();
  const SymmetrizationReport rep = symmetrization_check(ex.cfg, sign_draws);
  std::cout << "n,lhs_mean,rhs_mean,margin,pass\n"
            << rep.n << "," << fmt(rep.lhs_mean) << "," << fmt(rep.rhs_mean)
            << "," << fmt(rep.margin) << "," << (rep.pass ? "1" : "0") << "\n";
  if (!rep.pass) throw NumericError("symcheck: inequality violated");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holder-class distances between discrete measures: exact "
               "solver, entropy and chaining bounds, rate experiments"};
  app.require_subcommand(1);

  // compute
  auto* compute = app.add_subcommand(
      "compute", "exact class distance between two measure CSV files");
  std::string p_path, q_path, witness_path;
  HolderClassSpec cspec;
  std::string cnorm = "linf", cball = "sum";
  compute->add_option("--p", p_path, "first measure CSV (x1..xd,weight)")
      ->required();
  compute->add_option("--q", q_path, "second measure CSV")->required();
  compute->add_option("--alpha", cspec.alpha, "smoothness in (0,1]");
  compute->add_option("--radius", cspec.radius, "class radius L");
  compute->add_option("--norm", cnorm, "ground norm: l2 or linf");
  compute->add_option("--ball", cball, "budget convention: sum or max");
  compute->add_option("--witness", witness_path,
                      "write the optimal witness as CSV index,x1..xd,f");

  // rates
  auto* rates = app.add_subcommand(
      "rates", "Monte Carlo convergence-rate experiment against a lattice "
               "ground truth");
  ExperimentCli rates_cli;
  rates_cli.add_options(rates);

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "closed-form finite-sample upper bounds, CSV to stdout");
  std::vector<std::size_t> bn;
  BoundParams bparams;
  std::string bmode = "branch";
  bounds->add_option("--n", bn, "sample sizes")->required()->delimiter(',');
  bounds->add_option("--alpha", bparams.alpha, "smoothness");
  bounds->add_option("--d", bparams.d, "dimension");
  bounds->add_option("--K", bparams.K, "entropy constant");
  auto* blam = bounds->add_option("--lambda", bparams.lambda,
                                  "enlarged-support volume (default 3^d)");
  bounds->add_option("--L", bparams.L, "class radius");
  bounds->add_option("--mode", bmode, "branch (displayed formula) or composed");

  // entropy
  auto* entropy = app.add_subcommand(
      "entropy", "net sizes over a list of scales plus a growth-order fit");
  HolderClassSpec espec;
  std::string enorm = "linf", eball = "sum";
  std::vector<double> eeps;
  entropy->add_option("--alpha", espec.alpha, "smoothness in (0,1]");
  entropy->add_option("--radius", espec.radius, "class radius L");
  entropy->add_option("--d", espec.dim, "dimension");
  entropy->add_option("--eps", eeps, "net scales (at least 3)")
      ->required()
      ->delimiter(',');

  // rademacher
  auto* rademacher = app.add_subcommand(
      "rademacher", "mean sign-randomized supremum over a fixed sample");
  std::string rsample;
  HolderClassSpec rspec;
  std::string rnorm = "linf", rball = "sum";
  std::size_t rdraws = 100;
  std::uint64_t rseed = 0;
  rademacher->add_option("--sample", rsample, "sample CSV, one draw per row")
      ->required();
  rademacher->add_option("--alpha", rspec.alpha, "smoothness in (0,1]");
  rademacher->add_option("--radius", rspec.radius, "class radius L");
  rademacher->add_option("--norm", rnorm, "ground norm: l2 or linf");
  rademacher->add_option("--ball", rball, "budget convention: sum or max");
  rademacher->add_option("--draws", rdraws, "number of sign vectors");
  rademacher->add_option("--seed", rseed, "sign RNG seed");

  // symcheck
  auto* symcheck = app.add_subcommand(
      "symcheck", "empirical symmetrization-inequality check");
  ExperimentCli sym_cli;
  sym_cli.add_options(symcheck);
  std::size_t sign_draws = 100;
  symcheck->add_option("--sign-draws", sign_draws, "sign vectors per sample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(compute)) {
      cspec.norm = ipm::parse_norm(cnorm);
      cspec.ball = ipm::parse_ball(cball);
      return run_compute(p_path, q_path, cspec, witness_path);
    }
    if (app.got_subcommand(rates)) return run_rates(rates_cli);
    if (app.got_subcommand(bounds))
      return run_bounds(bn, bparams, blam->count() > 0, bmode);
    if (app.got_subcommand(entropy)) return run_entropy(espec, eeps);
    if (app.got_subcommand(rademacher)) {
      rspec.norm = ipm::parse_norm(rnorm);
      rspec.ball = ipm::parse_ball(rball);
      return run_rademacher(rsample, rspec, rdraws, rseed);
    }
    if (app.got_subcommand(symcheck)) return run_symcheck(sym_cli, sign_draws);
    std::cerr << app.help() << "\n";
    return 1;
  } catch (const ipm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ipm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {  // numeric failures and size blowups
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
