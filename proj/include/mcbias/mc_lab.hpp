#pragma once

// Seeded Monte Carlo experiment harness.
//
// Every trial draws from its own substream, so results do not depend on
// scheduling. The derivation path is
//
//   master_seed -> stream_id -> trial index -> role
//
// with roles kRoleData (Y_j), kRoleErrors (S_q), kRoleSynthesis (Z_q) and
// kRoleSynthesisAlt (Z_q of the second arm in variance comparisons).
// Per-trial statistics are stored by trial index and reduced in ascending
// order on one thread, which makes results bit-identical for any worker
// count.
//
// Standard errors come from the across-trial spread of the per-trial
// statistic. Relative biases divide by the analytic target variance when
// one exists (treated as exact), otherwise by the brute-force target
// estimate, with the delta method for the ratio.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcbias/analytics.hpp"
#include "mcbias/pipeline.hpp"

namespace mcbias {

inline constexpr std::uint64_t kRoleData = 0;
inline constexpr std::uint64_t kRoleErrors = 1;
inline constexpr std::uint64_t kRoleSynthesis = 2;
inline constexpr std::uint64_t kRoleSynthesisAlt = 3;

struct ExperimentConfig {
  ScalarScenario scenario;
  std::size_t trials = 10000;
  std::uint64_t master_seed = 0;
  /// Distinguishes independent experiments (e.g. points of a sweep) that
  /// share a master seed.
  std::uint64_t stream_id = 0;
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 1;
  /// Independent trial blocks used for the reldiff standard error.
  std::size_t blocks = 20;

  /// Throws ConfigError when trials < 2 or the scenario is invalid.
  void validate() const;
  RngStream trial_stream(std::size_t trial) const;
};

struct EstimateResult {
  std::string label;
  double point = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::optional<double> analytic_reference;
  std::optional<double> z_score;
  /// Auxiliary named values (component variances, targets) in output order.
  std::vector<std::pair<std::string, double>> extras;

  /// Sets the reference and z = (point - reference) / std_error.
  void set_reference(double reference);
  std::optional<double> extra(const std::string& name) const;
};

/// Relative bias of the replicate sample variance for one construction:
/// mean over trials of S^2 of the Q synthesized replicates, compared with
/// V[mean_j F(Y_j, S)]. Reference: analytics relbias when available.
EstimateResult estimate_combine_bias(const ExperimentConfig& cfg, Construction construction);

/// Brute-force V[mean_j F(Y_j, S)] from fresh (Y batch, single S) draws,
/// independent of both constructions.
EstimateResult estimate_target_variance_oracle(const ExperimentConfig& cfg);

/// V[mean_q M^C_q] - V[mean_q M^A_q] over paired trials (common Y, S, Z).
/// Reference: analytics mean_variance_gap.
EstimateResult estimate_mean_variance(const ExperimentConfig& cfg);

/// reldiff = (V[S^2_{M^C}] - V[S^2_{M^A}]) / (V[S^2_{M^C}] + V[S^2_{M^A}]).
/// Both arms share Y and S; their Z_q come from distinct roles. The
/// standard error is the spread of reldiff over cfg.blocks independent
/// trial blocks.
EstimateResult estimate_vardiff(const ExperimentConfig& cfg);

/// Empirical check of one of the five supporting lemmas on randomized
/// instances. Each result compares an estimate against its predicted value
/// (reference) and carries a z-score.
std::vector<EstimateResult> verify_lemma(int id, const ExperimentConfig& cfg);

enum class MapQuantity { psi, relbias_current };

struct MapConfig {
  MapQuantity quantity = MapQuantity::psi;
  std::vector<double> alphas{0.95};
  double lo = 0.0;
  double hi = 8.0;
  std::size_t points = 161;
  std::size_t j = 2;
  std::size_t workers = 1;
};

struct MapCell {
  double alpha;
  double a;
  double b;
  double value;
};

/// Exponential-kernel map over Y ~ Unif[a, b], S ~ Unif[1 - alpha, 1 + alpha]
/// for every grid pair a < b. Pure quadrature.
std::vector<MapCell> run_map(const MapConfig& cfg);

/// Runs fn(i) for i in [0, n) on `workers` threads (0 = hardware threads).
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace mcbias
