#pragma once

// CP maps in Choi form. The Choi operator of M : L(H_in) -> L(H_out) is
//
//   C = sum_ij M(|i><j|) (x) |i><j|,
//
// output factor first. This is the StandardChoi convention used for all
// composition. PaperNormalized operators carry an extra factor of the
// total output dimension so that process probabilities come out as
// Tr[(E_A (x) E_B ...)^T W] with a trace-one W.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalproc/rng.hpp"
#include "causalproc/tensor.hpp"

namespace causalproc {

enum class Normalization { StandardChoi, PaperNormalized };

using KrausSet = std::vector<Matrix>;

/// One tooth of a comb: systems consumed, then systems emitted.
struct Tooth {
  Labels inputs;
  Labels outputs;
  friend bool operator==(const Tooth&, const Tooth&) = default;
};

class QuantumMap {
 public:
  QuantumMap(LabeledOperator choi, std::vector<SystemId> inputs, std::vector<SystemId> outputs,
             Normalization normalization = Normalization::StandardChoi, std::optional<KrausSet> kraus = std::nullopt,
             std::vector<Tooth> teeth = {});

  const LabeledOperator& choi() const { return choi_; }
  const std::vector<SystemId>& inputs() const { return inputs_; }
  const std::vector<SystemId>& outputs() const { return outputs_; }
  Labels input_labels() const;
  Labels output_labels() const;
  std::size_t input_dim() const { return product_of_dims(inputs_); }
  std::size_t output_dim() const { return product_of_dims(outputs_); }
  Normalization normalization() const { return normalization_; }
  const std::optional<KrausSet>& kraus() const { return kraus_; }
  /// Empty means a single tooth (inputs -> outputs).
  const std::vector<Tooth>& teeth() const { return teeth_; }
  std::vector<Tooth> effective_teeth() const;

  double min_choi_eigenvalue() const;
  /// || Tr_out C - I_in ||_F in the StandardChoi domain.
  double trace_preservation_deviation() const;
  bool is_trace_preserving(double tol = 1e-9) const { return trace_preservation_deviation() <= tol; }
  bool is_completely_positive(double tol = 1e-9) const { return min_choi_eigenvalue() >= -tol; }

  QuantumMap with_teeth(std::vector<Tooth> teeth) const;

 private:
  LabeledOperator choi_;
  std::vector<SystemId> inputs_;
  std::vector<SystemId> outputs_;
  Normalization normalization_;
  std::optional<KrausSet> kraus_;
  std::vector<Tooth> teeth_;
};

QuantumMap choi_from_kraus(const KrausSet& kraus, std::vector<SystemId> inputs, std::vector<SystemId> outputs);
/// Minimal Kraus decomposition from the Choi spectrum (StandardChoi).
KrausSet kraus_from_choi(const QuantumMap& m, double eigen_cutoff = 1e-13);
/// The stored Kraus set when present, otherwise the spectral dilation.
KrausSet kraus_of(const QuantumMap& m);

QuantumMap to_paper_normalization(const QuantumMap& m);
QuantumMap to_standard(const QuantumMap& m);

/// Renames systems of a map (Choi, declared systems, Kraus and teeth agree).
QuantumMap relabel_map(const QuantumMap& m, const std::vector<std::pair<std::string, std::string>>& renames);

/// Link product of two operators over the labels they share:
/// Tr_S[(A^{T_S} (x) I)(I (x) B)], result ordered A-only then B-only systems.
LabeledOperator link_operators(const LabeledOperator& a, const LabeledOperator& b);

/// rho_out = Tr_in[C (I_out (x) rho^{T_in})]; systems of rho outside the
/// map's inputs are carried through, outputs are appended.
LabeledOperator apply_map(const QuantumMap& m, const LabeledOperator& rho);

/// Composite map of two StandardChoi maps wired over their shared labels.
QuantumMap link_product(const QuantumMap& a, const QuantumMap& b);

Matrix haar_random_unitary(int d, CounterRng& rng);
Matrix haar_random_unitary(int d, std::uint64_t seed, std::uint64_t stream = 0);

/// Two-tooth comb M then N, wired through `memory_label`.
QuantumMap memory_channel(const QuantumMap& first, const QuantumMap& second, const std::string& memory_label);

/// Largest violation of the comb normalization conditions
/// Tr_{out_k} C_k = C_{k-1} (x) I_{in_k}, C_0 = 1, over the map's teeth.
double comb_causality_deviation(const QuantumMap& comb);

// Channel constructors. All return trace-preserving StandardChoi maps with
// their Kraus sets attached.
QuantumMap identity_channel(int d, const std::string& in = "in", const std::string& out = "out");
QuantumMap unitary_channel(const Matrix& u, std::vector<SystemId> inputs, std::vector<SystemId> outputs);
QuantumMap unitary_channel(const Matrix& u, const std::string& in = "in", const std::string& out = "out");
/// rho -> (1 - p) rho + p I/d, realized with the Weyl (clock/shift) twirl.
QuantumMap depolarizing(double p, int d, const std::string& in = "in", const std::string& out = "out");
/// Output space is the input space plus one flag level (index d).
QuantumMap erasure(double p, int d, const std::string& in = "in", const std::string& out = "out");
/// rho -> (1 - p) rho + p diag(rho).
QuantumMap dephasing(double p, int d, const std::string& in = "in", const std::string& out = "out");
/// Completely dephase in the computational basis, then copy the value into
/// a second register.
QuantumMap classical_copy(int d, const std::string& in = "in", const std::string& out = "out",
                          const std::string& copy = "copy");
/// Discard the input and prepare `state` on the outputs.
QuantumMap replacement_channel(const LabeledOperator& state, std::vector<SystemId> inputs);

/// Normalized Choi state C / d_in of a unitary.
LabeledOperator unitary_choi_state(const Matrix& u, std::vector<SystemId> inputs, std::vector<SystemId> outputs);

}  // namespace causalproc
