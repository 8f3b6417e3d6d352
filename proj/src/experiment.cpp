#include "gmlab/experiment.hpp"

#include "gmlab/graph_io.hpp"
#include "gmlab/matchability.hpp"
#include "gmlab/noise.hpp"
#include "gmlab/parallel.hpp"
#include "gmlab/rng.hpp"
#include "gmlab/summarize.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <random>
#include <set>

namespace gmlab {

namespace {

template <typename Enum>
struct NamedValue {
  const char* name;
  Enum value;
};

constexpr NamedValue<ExperimentKind> kExperimentNames[] = {
    {"center_cost", ExperimentKind::kCenterCost},
    {"figure1_alpha_sweep", ExperimentKind::kFigure1AlphaSweep},
    {"figure2_n_sweep", ExperimentKind::kFigure2NSweep},
    {"core_junk", ExperimentKind::kCoreJunk},
    {"noise_injection", ExperimentKind::kNoiseInjection},
    {"pairwise_matrix", ExperimentKind::kPairwiseMatrix},
};
constexpr NamedValue<Centering> kCenteringNames[] = {
    {"none", Centering::kNone},
    {"oracle", Centering::kOracle},
    {"usvt", Centering::kUsvt},
};
constexpr NamedValue<InitKind> kInitNames[] = {
    {"identity", InitKind::kIdentity},
    {"block_swap", InitKind::kBlockSwap},
    {"barycenter", InitKind::kBarycenter},
    {"random", InitKind::kRandom},
};
constexpr NamedValue<RHatMode> kRHatNames[] = {
    {"variance", RHatMode::kVariance},
    {"max_entry", RHatMode::kMaxEntry},
    {"value", RHatMode::kValue},
};

template <typename Enum, std::size_t N>
std::string name_of(const NamedValue<Enum> (&table)[N], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "unknown";
}

template <typename Enum, std::size_t N>
Enum value_of(const NamedValue<Enum> (&table)[N], const std::string& name, const char* what) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  std::string options;
  for (const auto& entry : table) options += std::string(options.empty() ? "" : ", ") + entry.name;
  throw ParseError(std::string(what) + ": unknown value '" + name + "' (expected one of " + options + ")");
}

// Largest off-diagonal value of f(q(u, v)).
template <typename F>
double max_off_diagonal(const Matrix& q, F f) {
  double best = 0.0;
  for (Eigen::Index u = 0; u < q.rows(); ++u) {
    for (Eigen::Index v = 0; v < q.cols(); ++v) {
      if (u != v) best = std::max(best, f(q(u, v)));
    }
  }
  return best;
}

double density(const Matrix& g) {
  const double n = static_cast<double>(g.rows());
  if (n < 2) return 0.0;
  return (g.sum() - g.diagonal().sum()) / (n * (n - 1.0));
}

struct ArmInput {
  Centering centering;
  Matrix a;
  Matrix b;
};

// The centred inputs requested by the config. q1/q2 are empty when the
// generating model is unknown (loaded graphs), which rules out the oracle.
std::vector<ArmInput> build_arms(const ExperimentConfig& config, const Matrix& a, const Matrix& b, const Matrix* q1,
                                 const Matrix* q2) {
  std::vector<ArmInput> arms;
  for (Centering c : config.centering) {
    switch (c) {
      case Centering::kNone:
        arms.push_back({c, a, b});
        break;
      case Centering::kOracle:
        if (q1 == nullptr || q2 == nullptr) {
          throw ValidationError("oracle centering needs the generating model");
        }
        arms.push_back({c, center(a, hollow(*q1)), center(b, hollow(*q2))});
        break;
      case Centering::kUsvt: {
        const UsvtOptions oa = usvt_options_for(config, q1 ? *q1 : a, q1 != nullptr);
        const UsvtOptions ob = usvt_options_for(config, q2 ? *q2 : b, q2 != nullptr);
        arms.push_back({c, center(a, usvt_estimate(a, oa).q_hat), center(b, usvt_estimate(b, ob).q_hat)});
        break;
      }
    }
  }
  return arms;
}

MatchOptions match_options(const ExperimentConfig& config) {
  MatchOptions opts;
  opts.max_iters = config.max_iters;
  opts.rel_tol = config.rel_tol;
  opts.restarts = config.restarts;
  return opts;
}

struct TaskContext {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
};

// Matches every arm and appends one row per arm.
void match_arms(const ExperimentConfig& config, const TaskContext& ctx, const std::vector<ArmInput>& arms,
                const Permutation& truth, std::optional<std::size_t> core, std::vector<ExperimentRow>& rows) {
  const MatchOptions base = match_options(config);
  for (std::size_t k = 0; k < arms.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    const MatchResult res = best_of_inits(arms[k].a, arms[k].b, config.inits, base, derive_seed(ctx.seed, {100 + k}));
    const auto stop = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.experiment = ctx.experiment;
    row.params = ctx.params;
    row.replicate = ctx.replicate;
    row.centering = to_string(arms[k].centering);
    row.init = res.init_label;
    row.accuracy = accuracy(res.permutation, truth, core);
    row.objective = res.objective;
    row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    row.seed = ctx.seed;
    rows.push_back(std::move(row));
  }
}

// One unit of parallel work: a grid point and a replicate.
struct Task {
  std::vector<std::pair<std::string, double>> params;
  std::size_t grid_index = 0;
  std::size_t replicate = 0;
};

}  // namespace

std::string to_string(ExperimentKind k) { return name_of(kExperimentNames, k); }
std::string to_string(Centering c) { return name_of(kCenteringNames, c); }
std::string to_string(InitKind i) { return name_of(kInitNames, i); }
ExperimentKind parse_experiment_kind(const std::string& s) { return value_of(kExperimentNames, s, "experiment"); }
Centering parse_centering(const std::string& s) { return value_of(kCenteringNames, s, "centering"); }
InitKind parse_init_kind(const std::string& s) { return value_of(kInitNames, s, "inits"); }

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.alpha = {1.0};
  c.p = {0.5};
  c.rho = {0.9};
  c.q = {0.5};
  c.centering = {Centering::kNone, Centering::kOracle, Centering::kUsvt};
  c.inits = {InitKind::kIdentity};
  switch (kind) {
    case ExperimentKind::kCenterCost:
      c.n = {100};
      c.p = {0.1, 0.3, 0.5};
      c.rho = {0.1, 0.3, 0.5, 0.7, 0.9};
      c.centering = {Centering::kNone, Centering::kUsvt};
      break;
    case ExperimentKind::kFigure1AlphaSweep:
      c.n = {150};
      c.alpha = {0.75, 0.85, 0.95, 1.0};
      c.inits = {InitKind::kIdentity, InitKind::kBlockSwap};
      break;
    case ExperimentKind::kFigure2NSweep:
      c.n = {25, 50, 100, 150};
      c.inits = {InitKind::kIdentity, InitKind::kBlockSwap};
      break;
    case ExperimentKind::kCoreJunk:
      c.n = {60};
      c.n_junk = {15, 30, 60};
      break;
    case ExperimentKind::kNoiseInjection:
      c.n = {200};
      c.p = {0.3};
      c.rho = {0.7};
      c.q = {0.1, 0.3, 0.5, 0.7, 0.9};
      c.noise_subset = 50;
      c.centering = {Centering::kNone, Centering::kUsvt};
      c.usvt_hollow = false;
      break;
    case ExperimentKind::kPairwiseMatrix:
      c.n = {70};
      c.replicates = 1;
      c.centering = {Centering::kNone, Centering::kUsvt};
      c.usvt_elbows = 1;
      c.usvt_clip = false;
      c.usvt_hollow = false;
      c.weighted = true;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto nonempty = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string(what) + " grid must be nonempty");
  };
  nonempty(!n.empty(), "n");
  nonempty(!centering.empty(), "centering");
  nonempty(!inits.empty(), "inits");
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  if (threads < 1) throw ValidationError("threads must be >= 1");
  switch (experiment) {
    case ExperimentKind::kCenterCost:
      nonempty(!p.empty(), "p");
      nonempty(!rho.empty(), "rho");
      break;
    case ExperimentKind::kFigure1AlphaSweep:
    case ExperimentKind::kFigure2NSweep:
      nonempty(!alpha.empty(), "alpha");
      break;
    case ExperimentKind::kCoreJunk:
      nonempty(!n_junk.empty(), "n_junk");
      nonempty(!alpha.empty(), "alpha");
      break;
    case ExperimentKind::kNoiseInjection:
      nonempty(!q.empty(), "q");
      break;
    case ExperimentKind::kPairwiseMatrix:
      if (graphs.empty() && subjects < 2) throw ValidationError("pairwise_matrix needs at least two graphs");
      break;
  }
  if (usvt_elbows && *usvt_elbows < 1) throw ValidationError("usvt_elbows must be >= 1");
  if (!(usvt_a > 0.0)) throw ValidationError("usvt_a must be > 0");
  MatchOptions opts;
  opts.max_iters = max_iters;
  opts.rel_tol = rel_tol;
  opts.restarts = restarts;
  opts.validate();
}

ExperimentConfig config_from_key_values(const KeyValues& kv) {
  const auto kind_it = kv.find("experiment");
  if (kind_it == kv.end()) {
    throw ParseError("config is missing 'experiment'");
  }
  ExperimentConfig c = default_config(parse_experiment_kind(kind_it->second));
  for (const auto& [key, value] : kv) {
    if (key == "experiment") continue;
    if (key == "n") c.n = parse_size_list(key, value);
    else if (key == "alpha") c.alpha = parse_double_list(key, value);
    else if (key == "p") c.p = parse_double_list(key, value);
    else if (key == "q") c.q = parse_double_list(key, value);
    else if (key == "rho") c.rho = parse_double_list(key, value);
    else if (key == "n_junk") c.n_junk = parse_size_list(key, value);
    else if (key == "noise_subset") c.noise_subset = parse_u64(key, value);
    else if (key == "centering") {
      c.centering.clear();
      for (const auto& item : split_list(value)) c.centering.push_back(parse_centering(item));
    } else if (key == "inits") {
      c.inits.clear();
      for (const auto& item : split_list(value)) c.inits.push_back(parse_init_kind(item));
    } else if (key == "usvt_a") c.usvt_a = parse_double(key, value);
    else if (key == "usvt_rhat_mode") c.usvt_rhat_mode = value_of(kRHatNames, value, "usvt_rhat_mode");
    else if (key == "usvt_rhat") {
      c.usvt_rhat = parse_double(key, value);
      c.usvt_rhat_mode = RHatMode::kValue;
    } else if (key == "usvt_elbows") {
      const auto e = parse_u64(key, value);
      c.usvt_elbows = e == 0 ? std::nullopt : std::optional<std::size_t>(e);
    } else if (key == "usvt_clip") c.usvt_clip = parse_bool(key, value);
    else if (key == "usvt_hollow") c.usvt_hollow = parse_bool(key, value);
    else if (key == "max_iters") c.max_iters = parse_u64(key, value);
    else if (key == "rel_tol") c.rel_tol = parse_double(key, value);
    else if (key == "restarts") c.restarts = parse_u64(key, value);
    else if (key == "replicates") c.replicates = parse_u64(key, value);
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "threads") c.threads = parse_u64(key, value);
    else if (key == "timing") c.timing = parse_bool(key, value);
    else if (key == "graph_a") c.graph_a = value;
    else if (key == "graph_b") c.graph_b = value;
    else if (key == "graphs") c.graphs = split_list(value);
    else if (key == "weighted") c.weighted = parse_bool(key, value);
    else if (key == "subjects") c.subjects = parse_u64(key, value);
    else if (key == "out") c.out = value;
    else if (key == "summary_out") c.summary_out = value;
    else throw ParseError("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

UsvtOptions usvt_options_for(const ExperimentConfig& config, const Matrix& q_or_graph, bool from_model) {
  UsvtOptions opts;
  opts.clip_to_unit = config.usvt_clip;
  opts.hollow_output = config.usvt_hollow;
  if (config.usvt_elbows) {
    opts.rule = ElbowThreshold{*config.usvt_elbows};
    return opts;
  }
  double r_hat = config.usvt_rhat;
  if (config.usvt_rhat_mode != RHatMode::kValue) {
    const bool variance = config.usvt_rhat_mode == RHatMode::kVariance;
    if (from_model) {
      r_hat = variance ? max_off_diagonal(q_or_graph, [](double q) { return q * (1.0 - q); })
                       : max_off_diagonal(q_or_graph, [](double q) { return q; });
    } else {
      const double d = density(q_or_graph);
      r_hat = variance ? d * (1.0 - d) : d;
    }
  }
  // A degenerate model has nothing to estimate; any positive rule works.
  if (!(r_hat > 0.0)) r_hat = 1.0;
  opts.rule = ScaledThreshold{config.usvt_a, std::min(r_hat, 1.0)};
  return opts;
}

MatchResult best_of_inits(const Matrix& a, const Matrix& b, const std::vector<InitKind>& inits,
                          const MatchOptions& base, std::uint64_t seed) {
  if (inits.empty()) {
    throw ValidationError("best_of_inits needs at least one init");
  }
  const auto n = static_cast<std::size_t>(a.rows());
  std::optional<MatchResult> best;
  for (std::size_t k = 0; k < inits.size(); ++k) {
    MatchOptions opts = base;
    opts.restart_seed = derive_seed(seed, {k});
    switch (inits[k]) {
      case InitKind::kIdentity:
        opts.init = InitPermutation{Permutation::identity(n)};
        break;
      case InitKind::kBlockSwap:
        opts.init = InitPermutation{Permutation::block_swap(n)};
        break;
      case InitKind::kBarycenter:
        opts.init = InitBarycenter{};
        break;
      case InitKind::kRandom:
        opts.init = InitRandom{derive_seed(seed, {k, 1})};
        break;
    }
    MatchResult res = faq_match(a, b, opts);
    res.init_label = to_string(inits[k]);
    const double tol = best ? 1e-9 * std::max(1.0, std::abs(best->objective)) : 0.0;
    if (!best || res.objective < best->objective - tol) {
      best = std::move(res);
    }
  }
  return std::move(*best);
}

CorrSpec core_junk_spec(std::size_t n_core, std::size_t n_junk, double alpha) {
  std::vector<std::size_t> labels;
  labels.reserve(n_core + n_junk);
  for (std::size_t i = 0; i < n_core; ++i) labels.push_back(i < (n_core + 1) / 2 ? 0 : 1);
  for (std::size_t i = 0; i < n_junk; ++i) labels.push_back(i < (n_junk + 1) / 2 ? 0 : 1);
  Matrix q1(2, 2), q2(2, 2), r(2, 2);
  q1 << 0.8, 0.1, 0.1, 0.2;
  q2 << 0.2, 0.1, 0.1, 0.8;
  r << 0.25, 0.3, 0.3, 0.25;
  return with_core(labeled_sbm_spec(labels, q1, q2, alpha * r), n_core);
}

std::vector<Matrix> synthetic_subjects(std::size_t count, std::size_t n, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(n);
  auto block = [n](Eigen::Index u) { return static_cast<std::size_t>(u) * 3 / std::max<std::size_t>(n, 1); };
  Matrix intensity(m, m);
  for (Eigen::Index u = 0; u < m; ++u) {
    for (Eigen::Index v = 0; v < m; ++v) {
      intensity(u, v) = block(u) == block(v) ? 6.0 : 1.0;
    }
  }
  Matrix base = Matrix::Zero(m, m);
  for (Eigen::Index u = 0; u < m; ++u) {
    Substream rng(derive_seed(seed, {0, static_cast<std::uint64_t>(u)}));
    for (Eigen::Index v = u + 1; v < m; ++v) {
      std::poisson_distribution<int> draw(intensity(u, v));
      base(u, v) = base(v, u) = draw(rng.engine());
    }
  }
  std::vector<Matrix> out;
  for (std::size_t s = 0; s < count; ++s) {
    const std::vector<std::size_t> hubs = random_subset(n, std::max<std::size_t>(1, n / 10), derive_seed(seed, {1, s}));
    std::vector<double> boost(n, 1.0);
    for (std::size_t h : hubs) boost[h] = 3.0;
    Matrix w = Matrix::Zero(m, m);
    for (Eigen::Index u = 0; u < m; ++u) {
      Substream rng(derive_seed(seed, {2, s, static_cast<std::uint64_t>(u)}));
      for (Eigen::Index v = u + 1; v < m; ++v) {
        std::binomial_distribution<int> keep(static_cast<int>(base(u, v)), 0.8);
        std::poisson_distribution<int> extra(0.5 * intensity(u, v) * boost[u] * boost[v]);
        w(u, v) = w(v, u) = keep(rng.engine()) + extra(rng.engine());
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::string name = to_string(config.experiment);

  std::vector<Task> grid;
  // Grid points first; replicates are expanded below.
  std::vector<std::vector<std::pair<std::string, double>>> points;
  auto d = [](std::size_t x) { return static_cast<double>(x); };
  std::vector<Matrix> pairwise_graphs;
  switch (config.experiment) {
    case ExperimentKind::kCenterCost:
      for (std::size_t n : config.n)
        for (double p : config.p)
          for (double rho : config.rho) points.push_back({{"n", d(n)}, {"p", p}, {"rho", rho}});
      break;
    case ExperimentKind::kFigure1AlphaSweep:
    case ExperimentKind::kFigure2NSweep:
      for (std::size_t n : config.n)
        for (double alpha : config.alpha) points.push_back({{"n", d(n)}, {"alpha", alpha}});
      break;
    case ExperimentKind::kCoreJunk:
      for (std::size_t n : config.n)
        for (std::size_t nj : config.n_junk)
          for (double alpha : config.alpha) points.push_back({{"n_core", d(n)}, {"n_junk", d(nj)}, {"alpha", alpha}});
      break;
    case ExperimentKind::kNoiseInjection:
      for (std::size_t n : config.n)
        for (double p : config.p)
          for (double rho : config.rho)
            for (double q : config.q)
              points.push_back({{"n", d(n)}, {"p", p}, {"rho", rho}, {"q", q}, {"subset", d(config.noise_subset)}});
      break;
    case ExperimentKind::kPairwiseMatrix: {
      if (!config.graphs.empty()) {
        for (const auto& path : config.graphs) pairwise_graphs.push_back(load_graph(path, config.weighted));
      } else {
        pairwise_graphs = synthetic_subjects(config.subjects, config.n.front(), derive_seed(config.seed, {0xfeed}));
      }
      for (std::size_t i = 0; i < pairwise_graphs.size(); ++i)
        for (std::size_t j = i + 1; j < pairwise_graphs.size(); ++j)
          points.push_back({{"graph_i", d(i)}, {"graph_j", d(j)}, {"n", d(static_cast<std::size_t>(pairwise_graphs[i].rows()))}});
      break;
    }
  }
  for (std::size_t g = 0; g < points.size(); ++g) {
    for (std::size_t r = 0; r < config.replicates; ++r) {
      grid.push_back({points[g], g, r});
    }
  }

  std::optional<Matrix> observed_a;
  std::optional<Matrix> observed_b;
  if (config.experiment == ExperimentKind::kNoiseInjection && !config.graph_a.empty()) {
    observed_a = load_graph(config.graph_a, false);
    observed_b = load_graph(config.graph_b.empty() ? config.graph_a : config.graph_b, false,
                            static_cast<std::size_t>(observed_a->rows()));
    if (observed_b->rows() != observed_a->rows()) {
      throw DimensionError("graph_a and graph_b have different vertex counts");
    }
  }

  std::vector<std::vector<ExperimentRow>> results(grid.size());
  std::vector<std::exception_ptr> failures(grid.size());
  parallel_for(grid.size(), config.threads, [&](std::size_t t) {
    try {
      const Task& task = grid[t];
      auto param = [&](const char* key) {
        for (const auto& [k, v] : task.params) {
          if (k == key) return v;
        }
        throw std::logic_error(std::string("missing parameter ") + key);
      };
      TaskContext ctx{name, task.params, task.replicate,
                      derive_seed(config.seed, {task.grid_index, task.replicate})};
      auto& rows = results[t];
      switch (config.experiment) {
        case ExperimentKind::kCenterCost: {
          const auto n = static_cast<std::size_t>(param("n"));
          const double p = param("p");
          const CorrSpec spec = homogeneous_spec(n, p, p, param("rho"));
          const GraphPair pair = sample_pair(spec, derive_seed(ctx.seed, {0}));
          match_arms(config, ctx, build_arms(config, pair.a, pair.b, &spec.q1, &spec.q2), Permutation::identity(n),
                     std::nullopt, rows);
          break;
        }
        case ExperimentKind::kFigure1AlphaSweep:
        case ExperimentKind::kFigure2NSweep: {
          const auto n = static_cast<std::size_t>(param("n"));
          const CorrSpec spec = swapped_block_spec(n, param("alpha"));
          const GraphPair pair = sample_pair(spec, derive_seed(ctx.seed, {0}));
          match_arms(config, ctx, build_arms(config, pair.a, pair.b, &spec.q1, &spec.q2),
                     Permutation::identity(2 * n), std::nullopt, rows);
          break;
        }
        case ExperimentKind::kCoreJunk: {
          const auto nc = static_cast<std::size_t>(param("n_core"));
          const auto nj = static_cast<std::size_t>(param("n_junk"));
          const CorrSpec spec = core_junk_spec(nc, nj, param("alpha"));
          const GraphPair pair = sample_pair(spec, derive_seed(ctx.seed, {0}));
          match_arms(config, ctx, build_arms(config, pair.a, pair.b, &spec.q1, &spec.q2),
                     Permutation::identity(nc + nj), nc, rows);
          break;
        }
        case ExperimentKind::kNoiseInjection: {
          Matrix a, b;
          std::optional<CorrSpec> spec;
          if (observed_a) {
            a = *observed_a;
            b = *observed_b;
          } else {
            const auto n = static_cast<std::size_t>(param("n"));
            const double p = param("p");
            spec = homogeneous_spec(n, p, p, param("rho"));
            GraphPair pair = sample_pair(*spec, derive_seed(ctx.seed, {0}));
            a = std::move(pair.a);
            b = std::move(pair.b);
          }
          const auto n = static_cast<std::size_t>(a.rows());
          const auto subset = random_subset(n, std::min(config.noise_subset, n), derive_seed(ctx.seed, {1}));
          b = inject_block_noise(b, subset, param("q"), derive_seed(ctx.seed, {2}));
          // Centering uses the pre-noise model; oracle arms therefore do not
          // see the injected block.
          const Matrix* q1 = spec ? &spec->q1 : nullptr;
          const Matrix* q2 = spec ? &spec->q2 : nullptr;
          const std::vector<ArmInput> arms = build_arms(config, a, b, q1, q2);
          match_arms(config, ctx, arms, Permutation::identity(n), std::nullopt, rows);
          break;
        }
        case ExperimentKind::kPairwiseMatrix: {
          const auto i = static_cast<std::size_t>(param("graph_i"));
          const auto j = static_cast<std::size_t>(param("graph_j"));
          const Matrix& a = pairwise_graphs[i];
          const Matrix& b = pairwise_graphs[j];
          if (a.rows() != b.rows()) {
            throw DimensionError("pairwise graphs " + std::to_string(i) + " and " + std::to_string(j) +
                                 " have different vertex counts");
          }
          match_arms(config, ctx, build_arms(config, a, b, nullptr, nullptr),
                     Permutation::identity(static_cast<std::size_t>(a.rows())), std::nullopt, rows);
          break;
        }
      }
    } catch (...) {
      failures[t] = std::current_exception();
    }
  });

  std::vector<ExperimentRow> rows;
  std::exception_ptr failure;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (failures[t]) {
      failure = failures[t];
      break;
    }
    rows.insert(rows.end(), results[t].begin(), results[t].end());
  }
  if (!config.out.empty()) {
    write_rows_csv(config.out, rows, config.timing);
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  if (!config.summary_out.empty() && !rows.empty()) {
    write_summary_csv(config.summary_out, summarize(rows));
  }
  return rows;
}

void write_rows_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timing) {
  std::string current_header;
  for (const auto& row : rows) {
    std::string header = "experiment";
    for (const auto& [key, value] : row.params) header += "," + key;
    header += ",replicate,centering,init,accuracy,objective,seed";
    if (timing) header += ",runtime_ms";
    if (header != current_header) {
      out << header << '\n';
      current_header = header;
    }
    out << row.experiment;
    for (const auto& [key, value] : row.params) out << ',' << format_number(value);
    out << ',' << row.replicate << ',' << row.centering << ',' << row.init << ',' << format_number(row.accuracy) << ','
        << format_number(row.objective) << ',' << row.seed;
    if (timing) out << ',' << format_number(row.runtime_ms);
    out << '\n';
  }
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<ExperimentRow>& rows, bool timing) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  write_rows_csv(out, rows, timing);
}

}  // namespace gmlab
