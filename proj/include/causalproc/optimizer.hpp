#pragma once

// Lower bounds on coherent information by local optimization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalproc/choi.hpp"
#include "causalproc/process.hpp"

namespace causalproc {

enum class StepRule { Fixed, Backtracking };

struct OptimizerConfig {
  int restarts = 8;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-7;
  StepRule step_rule = StepRule::Backtracking;
  std::uint64_t seed = 0;
  int threads = 1;
};

void check_config(const OptimizerConfig& cfg);

struct OptimizationResult {
  double value_bits = 0.0;
  /// Optimal input state (channel problems) or the family's output state.
  std::optional<LabeledOperator> argument;
  /// Real parameter vector (process families); empty for channel problems.
  std::vector<double> parameters;
  /// Target systems of `argument` (process families).
  Labels target;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> restart_values;
  std::string family;
};

/// S(N(rho)) - S(N_c(rho)) with N_c the complementary channel of the Kraus
/// set. The objective does not check the trace of rho.
double channel_ci_objective(const KrausSet& kraus, const Matrix& rho);
/// Gradient of the objective with respect to rho (Frobenius inner product),
/// with log eigenvalues floored at 1e-15.
Matrix channel_ci_gradient(const KrausSet& kraus, const Matrix& rho);
/// The same value computed on the purification: S(B) - S(BR) of
/// (N (x) id)(|psi><psi|), an independent route used for re-evaluation.
double channel_ci_via_purification(const QuantumMap& m, const Matrix& rho);

/// Euclidean projection onto density matrices (eigenvalues onto the simplex).
Matrix project_to_density(const Matrix& h);

OptimizationResult channel_coherent_information(const QuantumMap& m, const OptimizerConfig& cfg = {});

/// Parametric local-operation family. Every owner prepares one joint pure
/// state over all of its outputs and a reference of the same dimension
/// (when feed_outputs is false the outputs receive omega). When
/// input_channel_rank >= 2 every owner also applies a channel with that many
/// Kraus operators to all of its inputs.
struct LoFamily {
  bool feed_outputs = true;
  int input_channel_rank = 1;
  std::string describe() const;
};

inline constexpr std::size_t kFamilyDimensionCap = 4096;

/// Output state of the family at `parameters` (layout described by
/// lo_parameter_count). Reference systems are named "<owner>.ref".
LabeledOperator lo_family_state(const ProcessOperator& w, const LoFamily& family,
                                const std::vector<double>& parameters);
std::size_t lo_parameter_count(const ProcessOperator& w, const LoFamily& family);
/// Target systems of the family state for one owner.
Labels lo_target_systems(const ProcessOperator& w, const LoFamily& family, const std::string& owner);

OptimizationResult lo_optimized_ci(const ProcessOperator& w, const std::string& target_owner,
                                   const LoFamily& family = {}, const OptimizerConfig& cfg = {},
                                   const std::vector<std::vector<double>>& warm_starts = {});

/// (1/k) lo_optimized_ci on k copies with each owner's copies merged,
/// warm-started from the product of single-copy optima.
OptimizationResult regularized_ci_estimate(const ProcessOperator& w, const std::string& target_owner, int k,
                                           const LoFamily& family = {}, const OptimizerConfig& cfg = {});

/// max(0, I^target(rho)).
double hashing_lower_bound(const LabeledOperator& rho, const Labels& target);

/// Best achievable rate per copy over j = 1..k copies: hashing bound of the
/// reduced family state divided by j.
double entanglement_generation_bound(const ProcessOperator& w, const std::string& target_owner, int k,
                                     const LoFamily& family = {}, const OptimizerConfig& cfg = {});

}  // namespace causalproc
