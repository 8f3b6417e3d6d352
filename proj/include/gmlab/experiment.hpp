#pragma once

// Seeded Monte-Carlo experiment runners. Every (grid point, replicate) task
// owns the substream derive_seed(seed, {grid_index, replicate}); rows are
// emitted in (grid, replicate, centering) order whatever the thread count.

#include "gmlab/common.hpp"
#include "gmlab/config.hpp"
#include "gmlab/corr_er.hpp"
#include "gmlab/faq.hpp"
#include "gmlab/usvt.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gmlab {

enum class ExperimentKind {
  kCenterCost,
  kFigure1AlphaSweep,
  kFigure2NSweep,
  kCoreJunk,
  kNoiseInjection,
  kPairwiseMatrix,
};

enum class Centering { kNone, kOracle, kUsvt };

enum class InitKind { kIdentity, kBlockSwap, kBarycenter, kRandom };

/// How r_hat in t = a sqrt(n r_hat) is chosen for each graph.
enum class RHatMode {
  kVariance,  // max off-diagonal q (1 - q) of the generating Q
  kMaxEntry,  // max off-diagonal q
  kValue,     // usvt_rhat as given
};

std::string to_string(ExperimentKind k);
std::string to_string(Centering c);
std::string to_string(InitKind i);
ExperimentKind parse_experiment_kind(const std::string& s);
Centering parse_centering(const std::string& s);
InitKind parse_init_kind(const std::string& s);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kFigure1AlphaSweep;

  /// Vertices per block (figure1/2), core size (core_junk), or total
  /// vertices (center_cost, noise_injection, pairwise_matrix).
  std::vector<std::size_t> n;
  std::vector<double> alpha;
  std::vector<double> p;
  /// Noise edge probabilities (noise_injection).
  std::vector<double> q;
  std::vector<double> rho;
  std::vector<std::size_t> n_junk;
  std::size_t noise_subset = 50;

  std::vector<Centering> centering;
  std::vector<InitKind> inits;

  double usvt_a = 2.01;
  RHatMode usvt_rhat_mode = RHatMode::kVariance;
  double usvt_rhat = 1.0;
  /// Use the elbow rule with this many elbows instead of a threshold.
  std::optional<std::size_t> usvt_elbows;
  bool usvt_clip = true;
  bool usvt_hollow = true;

  std::size_t max_iters = 30;
  double rel_tol = 1e-6;
  std::size_t restarts = 1;

  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool timing = false;

  /// Optional observed graphs (noise_injection: graph_a, graph_b; pairwise: graphs).
  std::string graph_a;
  std::string graph_b;
  std::vector<std::string> graphs;
  bool weighted = false;
  std::size_t subjects = 6;

  std::string out;
  std::string summary_out;

  void validate() const;
};

/// Defaults for one experiment kind, before any overrides.
ExperimentConfig default_config(ExperimentKind kind);

/// Builds a config from key/value pairs; "experiment" is required and
/// unknown keys raise ParseError.
ExperimentConfig config_from_key_values(const KeyValues& kv);

struct ExperimentRow {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::size_t replicate = 0;
  std::string centering;
  std::string init;
  double accuracy = 0.0;
  double objective = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
};

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_rows_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timing);
void write_rows_csv(const std::filesystem::path& path, const std::vector<ExperimentRow>& rows, bool timing);

/// Matches (a, b) from each init and keeps the smallest Frobenius objective
/// (ties keep the earlier init).
MatchResult best_of_inits(const Matrix& a, const Matrix& b, const std::vector<InitKind>& inits,
                          const MatchOptions& base, std::uint64_t seed);

/// USVT options for a graph generated from q (or with observed density
/// when q is empty) under the config's threshold settings.
UsvtOptions usvt_options_for(const ExperimentConfig& config, const Matrix& q_or_graph, bool from_model);

/// Synthetic weighted subjects for pairwise_matrix: Poisson counts on a
/// shared three-block intensity, thinned per subject plus subject-specific
/// hub noise.
std::vector<Matrix> synthetic_subjects(std::size_t count, std::size_t n, std::uint64_t seed);

/// Core-junk spec: swapped-block marginals on n_core + n_junk vertices, each
/// of core and junk split evenly over the two blocks, correlation
/// alpha * [[0.25, 0.3], [0.3, 0.25]] on core pairs only.
CorrSpec core_junk_spec(std::size_t n_core, std::size_t n_junk, double alpha);

}  // namespace gmlab
