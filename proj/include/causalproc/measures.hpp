#pragma once

// Entropic quantities in bits.

#include <utility>
#include <vector>

#include "causalproc/tensor.hpp"

namespace causalproc {

/// Eigenvalues in [-kEigenClampNegative, kEigenClampPositive] count as zero;
/// anything more negative is rejected.
inline constexpr double kEigenClampNegative = 1e-9;
inline constexpr double kEigenClampPositive = 1e-12;

struct Bipartition {
  Labels side_a;
  Labels side_b;
  Labels target;
};

/// Checks disjointness, coverage of `rho` and that the target is nonempty
/// and lies within one side.
void check_bipartition(const LabeledOperator& rho, const Bipartition& cut);

/// -sum lambda log2 lambda of a spectrum, with the clamp applied.
double entropy_of_spectrum(const std::vector<double>& eigenvalues);

double von_neumann_entropy(const LabeledOperator& rho);
/// S(target) - S(rho).
double coherent_information(const LabeledOperator& rho, const Labels& target);
/// S(rho) - S(conditioning).
double conditional_entropy(const LabeledOperator& rho, const Labels& conditioning);
double mutual_information(const LabeledOperator& rho, const Labels& x, const Labels& y);

/// (S_A, S_B) for a pure state.
std::pair<double, double> pure_state_symmetry_check(const LabeledOperator& rho, const Bipartition& cut);

/// Entropy of the reduction of a pure state vector onto `keep`.
double pure_state_entropy(const std::vector<SystemId>& systems, const Vector& psi, const Labels& keep);
/// Reduced density matrix of a pure state vector on `keep`, in the order of `keep`.
LabeledOperator reduce_pure_state(const std::vector<SystemId>& systems, const Vector& psi, const Labels& keep);

}  // namespace causalproc
