// gmlab: sample correlated graph pairs, estimate and centre them, match them,
// and run the seeded Monte-Carlo experiments.

#include "gmlab/config.hpp"
#include "gmlab/corr_er.hpp"
#include "gmlab/experiment.hpp"
#include "gmlab/faq.hpp"
#include "gmlab/graph_io.hpp"
#include "gmlab/matchability.hpp"
#include "gmlab/summarize.hpp"
#include "gmlab/usvt.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace gmlab;

struct UsvtFlags {
  std::optional<double> threshold;
  double scale = 2.01;
  std::optional<double> rhat;
  std::size_t elbows = 0;
  bool no_clip = false;
  bool no_hollow = false;

  void add(CLI::App* app) {
    app->add_option("--threshold", threshold, "explicit singular value threshold t");
    app->add_option("--scale", scale, "a in t = a sqrt(n r_hat)")->capture_default_str();
    app->add_option("--rhat", rhat, "r_hat in t = a sqrt(n r_hat); default d(1-d) from the graph density");
    app->add_option("--elbows", elbows, "use the profile-likelihood elbow rule with this many elbows");
    app->add_flag("--no-clip", no_clip, "do not clip the estimate to [0,1]");
    app->add_flag("--no-hollow", no_hollow, "keep the estimate's diagonal");
  }

  UsvtOptions options(const Matrix& g) const {
    UsvtOptions opts;
    opts.clip_to_unit = !no_clip;
    opts.hollow_output = !no_hollow;
    if (elbows > 0) {
      opts.rule = ElbowThreshold{elbows};
    } else if (threshold) {
      opts.rule = ExplicitThreshold{*threshold};
    } else {
      double r = rhat.value_or(0.0);
      if (!rhat) {
        const double n = static_cast<double>(g.rows());
        const double d = n > 1 ? (g.sum() - g.diagonal().sum()) / (n * (n - 1)) : 0.0;
        r = d * (1.0 - d);
      }
      opts.rule = ScaledThreshold{scale, r > 0.0 ? std::min(r, 1.0) : 1.0};
    }
    return opts;
  }
};

CorrSpec model_from_key_values(const KeyValues& kv) {
  auto get = [&](const char* key, const char* fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? std::string(fallback) : it->second;
  };
  const std::string model = get("model", "homogeneous");
  if (model == "homogeneous") {
    const double p = parse_double("p", get("p", "0.5"));
    return homogeneous_spec(parse_u64("n", get("n", "100")), p, parse_double("q", get("q", get("p", "0.5").c_str())),
                            parse_double("rho", get("rho", "0.5")));
  }
  if (model == "swapped_blocks") {
    return swapped_block_spec(parse_u64("n", get("n", "150")), parse_double("alpha", get("alpha", "1")));
  }
  if (model == "core_junk") {
    return core_junk_spec(parse_u64("n_core", get("n_core", "60")), parse_u64("n_junk", get("n_junk", "30")),
                          parse_double("alpha", get("alpha", "1")));
  }
  throw ParseError("unknown model '" + model + "' (expected homogeneous, swapped_blocks or core_junk)");
}

int run_sample(const std::string& config_path, const std::vector<std::string>& sets, std::uint64_t seed,
               const std::string& out) {
  KeyValues kv = config_path.empty() ? KeyValues{} : load_key_values(config_path);
  for (const auto& s : sets) apply_assignment(kv, s);
  const CorrSpec spec = model_from_key_values(kv);
  const GraphPair pair = sample_pair(spec, seed);
  save_graph(out + "_a.edges", pair.a, false);
  save_graph(out + "_b.edges", pair.b, false);
  std::cout << "n=" << pair.size() << " n_core=" << pair.n_core << " edges_a=" << pair.a.sum() / 2
            << " edges_b=" << pair.b.sum() / 2 << "\nwrote " << out << "_a.edges, " << out << "_b.edges\n";
  return 0;
}

int run_usvt(const std::string& graph, bool weighted, const UsvtFlags& flags, const std::string& out) {
  const Matrix a = load_graph(graph, weighted);
  const UsvtEstimate est = usvt_estimate(a, flags.options(a));
  std::cout << "n=" << a.rows() << " threshold=" << format_number(est.threshold_used)
            << " retained_rank=" << est.retained_rank << "\nsingular values:";
  for (std::size_t i = 0; i < std::min<std::size_t>(10, est.singular_values.size()); ++i) {
    std::cout << ' ' << format_number(est.singular_values[i]);
  }
  std::cout << '\n';
  if (!out.empty()) {
    save_matrix_csv(out, est.q_hat);
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

int run_match(const std::string& path_a, const std::string& path_b, bool weighted, const std::string& centering,
              const UsvtFlags& flags, const std::string& init, MatchOptions opts, std::uint64_t seed,
              const std::string& out) {
  Matrix a = load_graph(path_a, weighted);
  Matrix b = load_graph(path_b, weighted, static_cast<std::size_t>(a.rows()));
  if (b.rows() > a.rows()) a = load_graph(path_a, weighted, static_cast<std::size_t>(b.rows()));
  if (centering == "usvt") {
    a = center(a, usvt_estimate(a, flags.options(a)).q_hat);
    b = center(b, usvt_estimate(b, flags.options(b)).q_hat);
  } else if (centering != "none") {
    throw ParseError("--center must be none or usvt");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  if (init == "identity") opts.init = InitPermutation{Permutation::identity(n)};
  else if (init == "barycenter") opts.init = InitBarycenter{};
  else if (init == "random") opts.init = InitRandom{seed};
  else throw ParseError("--init must be identity, barycenter or random");
  opts.restart_seed = seed;
  const MatchResult res = faq_match(a, b, opts);
  std::cout << "objective=" << format_number(res.objective) << " trace_objective=" << format_number(res.trace_objective)
            << " iterations=" << res.iterations << " converged=" << (res.converged ? "true" : "false")
            << " init=" << res.init_label
            << " fraction_identity=" << format_number(accuracy(res.permutation, Permutation::identity(n))) << '\n';
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw Error("cannot open " + out + " for writing");
    f << "vertex,match\n";
    for (std::size_t i = 0; i < n; ++i) f << i << ',' << res.permutation[i] << '\n';
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

int run_oracle(const std::string& path_a, const std::string& path_b, bool weighted, std::size_t budget,
               std::size_t core) {
  Matrix a = load_graph(path_a, weighted);
  const Matrix b = load_graph(path_b, weighted, static_cast<std::size_t>(a.rows()));
  if (b.rows() != a.rows()) throw DimensionError("graphs have different vertex counts");
  const GmpArgmin best = brute_force_gmp(a, b);
  std::cout << "objective=" << format_number(best.objective) << " argmin_size=" << best.argmin.size() << '\n';
  for (const auto& p : best.argmin) std::cout << "  " << p.to_string() << '\n';
  std::cout << "exact=" << satisfies(best.argmin, ExactFlavor{})
            << " budget(" << budget << ")=" << satisfies(best.argmin, MovedBudgetFlavor{budget})
            << " core(" << core << ")=" << satisfies(best.argmin, CoreFlavor{core}) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gmlab: correlated graph matching laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t threads = 1;

  auto* sample = app.add_subcommand("sample", "sample a correlated graph pair");
  sample->add_option("--config", config_path, "model config (model, n, p, q, rho, alpha, n_core, n_junk)");
  sample->add_option("--set", sets, "key=value model override (repeatable)");
  sample->add_option("--seed", seed, "sampler seed")->capture_default_str();
  sample->add_option("--out", out, "output prefix for <prefix>_a.edges and <prefix>_b.edges")->required();

  std::string graph, graph_b;
  bool weighted = false;
  UsvtFlags usvt_flags;
  auto* usvt = app.add_subcommand("usvt", "estimate an edge-probability matrix by singular value thresholding");
  usvt->add_option("--graph", graph, "edge-list file")->required();
  usvt->add_flag("--weighted", weighted, "read edge weights");
  usvt_flags.add(usvt);
  usvt->add_option("--out", out, "write the estimate as CSV");

  std::string centering = "none";
  std::string init = "identity";
  MatchOptions match_opts;
  auto* match = app.add_subcommand("match", "match two graphs with the Frank-Wolfe relaxation");
  match->add_option("--a", graph, "first graph edge list")->required();
  match->add_option("--b", graph_b, "second graph edge list")->required();
  match->add_flag("--weighted", weighted, "read edge weights");
  match->add_option("--center", centering, "none or usvt")->capture_default_str();
  usvt_flags.add(match);
  match->add_option("--init", init, "identity, barycenter or random")->capture_default_str();
  match->add_option("--restarts", match_opts.restarts, "total runs; extra runs start at random interior points")
      ->capture_default_str();
  match->add_option("--max-iters", match_opts.max_iters)->capture_default_str();
  match->add_option("--rel-tol", match_opts.rel_tol)->capture_default_str();
  match->add_option("--seed", seed, "seed for random starts")->capture_default_str();
  match->add_option("--threads", threads, "threads for restarts")->capture_default_str();
  match->add_option("--out", out, "write vertex,match CSV");

  std::size_t budget = 0, core = 0;
  auto* oracle = app.add_subcommand("oracle", "exact graph matching by enumeration (n <= 8)");
  oracle->add_option("--a", graph, "first graph edge list")->required();
  oracle->add_option("--b", graph_b, "second graph edge list")->required();
  oracle->add_flag("--weighted", weighted, "read edge weights");
  oracle->add_option("--budget", budget, "allowed number of moved labels")->capture_default_str();
  oracle->add_option("--core", core, "number of core vertices")->capture_default_str();

  std::optional<std::uint64_t> exp_seed;
  std::optional<std::size_t> exp_threads, replicates;
  std::string exp_out, summary_out, experiment_kind;
  std::map<std::string, std::string> grid_flags;
  auto* experiment = app.add_subcommand("experiment", "run a seeded Monte-Carlo experiment, writing CSV");
  experiment->add_option("--config", config_path, "experiment config file (key = value)");
  experiment->add_option("--set", sets, "key=value override (repeatable)");
  experiment->add_option("--experiment", experiment_kind,
                         "center_cost, figure1_alpha_sweep, figure2_n_sweep, core_junk, noise_injection, pairwise_matrix");
  experiment->add_option("--seed", exp_seed, "master seed");
  experiment->add_option("--out", exp_out, "per-replicate CSV");
  experiment->add_option("--summary-out", summary_out, "grouped mean/sd CSV");
  experiment->add_option("--threads", exp_threads, "worker threads");
  experiment->add_option("--replicates", replicates, "replicates per grid point");
  for (const char* key : {"n", "alpha", "p", "q", "rho", "n_junk", "centering", "inits"}) {
    std::string flag = std::string("--") + key;
    for (auto& ch : flag) if (ch == '_') ch = '-';
    experiment->add_option_function<std::string>(
        flag, [&grid_flags, key](const std::string& v) { grid_flags[key] = v; }, std::string(key) + " grid (comma-separated)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample) return run_sample(config_path, sets, seed, out);
    if (*usvt) return run_usvt(graph, weighted, usvt_flags, out);
    if (*match) {
      match_opts.threads = threads;
      return run_match(graph, graph_b, weighted, centering, usvt_flags, init, match_opts, seed, out);
    }
    if (*oracle) return run_oracle(graph, graph_b, weighted, budget, core);
    if (*experiment) {
      KeyValues kv = config_path.empty() ? KeyValues{} : load_key_values(config_path);
      if (!experiment_kind.empty()) kv["experiment"] = experiment_kind;
      for (const auto& [k, v] : grid_flags) kv[k] = v;
      for (const auto& s : sets) apply_assignment(kv, s);
      if (exp_seed) kv["seed"] = std::to_string(*exp_seed);
      if (exp_threads) kv["threads"] = std::to_string(*exp_threads);
      if (replicates) kv["replicates"] = std::to_string(*replicates);
      if (!exp_out.empty()) kv["out"] = exp_out;
      if (!summary_out.empty()) kv["summary_out"] = summary_out;
      const ExperimentConfig config = config_from_key_values(kv);
      const auto rows = run_experiment(config);
      if (config.out.empty()) {
        write_rows_csv(std::cout, rows, config.timing);
      }
      std::cerr << "rows=" << rows.size() << '\n';
      return 0;
    }
  } catch (const gmlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
