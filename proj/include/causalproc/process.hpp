#pragma once

// Process operators over parties with (possibly several, possibly no) input
// and output systems. A party here is one tooth of a local laboratory; the
// `owner` field groups teeth that belong to the same laboratory after
// merging or local operations.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalproc/choi.hpp"
#include "causalproc/tensor.hpp"

namespace causalproc {

struct Party {
  std::string name;
  std::vector<SystemId> inputs;   // received from the process
  std::vector<SystemId> outputs;  // handed back to the process
  std::string owner;              // empty means the party owns itself

  const std::string& owner_name() const { return owner.empty() ? name : owner; }
  Labels input_labels() const;
  Labels output_labels() const;
  Labels labels() const;
  friend bool operator==(const Party&, const Party&) = default;
};

inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr double kValidityTolerance = 1e-8;

class ProcessOperator {
 public:
  ProcessOperator(LabeledOperator op, std::vector<Party> parties, bool extended = false);

  const LabeledOperator& op() const { return op_; }
  const std::vector<Party>& parties() const { return parties_; }
  /// True once a local operation has attached ancillary systems.
  bool extended() const { return extended_; }

  const Party& party(const std::string& name) const;
  bool has_party(const std::string& name) const;
  /// Distinct owners in order of first appearance.
  std::vector<std::string> owners() const;
  /// Teeth of one owner, in table order (which is their internal causal order).
  std::vector<Party> teeth_of(const std::string& owner) const;
  Labels systems_of_owner(const std::string& owner) const;

 private:
  LabeledOperator op_;
  std::vector<Party> parties_;
  bool extended_;
};

struct ValidityReport {
  double min_eigenvalue = 0.0;
  double trace_deviation = 0.0;
  double lv_residual = 0.0;
  bool psd_ok = false;
  bool trace_ok = false;
  bool lv_ok = false;
  bool valid() const { return psd_ok && trace_ok && lv_ok; }
};

/// One signed monomial of the projector polynomial: coefficient times the
/// map X -> omega^S (x) Tr_S X.
struct LvTerm {
  int coefficient;
  Labels replaced;  // sorted
};

std::vector<LvTerm> lv_expansion(const std::vector<Party>& parties);
LabeledOperator lv_project(const LabeledOperator& x, const std::vector<Party>& parties);
ValidityReport validate(const ProcessOperator& w);

struct ProbabilityResult {
  double value;  // clamped to [0, 1]
  double raw;
};

/// Elements keyed by party name; each must be PaperNormalized with inputs
/// and outputs equal to the party's.
ProbabilityResult probability(const ProcessOperator& w, const std::map<std::string, QuantumMap>& elements);

/// PaperNormalized "discard the input, prepare omega" element for a party.
QuantumMap trace_and_prepare_maximally_mixed(const Party& party);
/// PaperNormalized element of a party that discards its input and prepares
/// the normalized state `psi` (indexed over the party's outputs).
QuantumMap prepare_element(const Party& party, const Vector& psi);
/// PaperNormalized element that applies the effect `f` (over the party's
/// inputs) and prepares omega on its outputs.
QuantumMap measure_element(const Party& party, const Matrix& f);

/// One party per entry, each owning the listed systems as inputs.
ProcessOperator process_from_state(const LabeledOperator& rho,
                                   const std::vector<std::pair<std::string, Labels>>& assignment);
/// One party per system, named after the system label.
ProcessOperator process_from_state(const LabeledOperator& rho);

struct ChannelProcessOptions {
  /// State on the sender's input; omitted means the sender has no input.
  std::optional<LabeledOperator> sender_input;
  /// Systems on which the receiver outputs into omega; empty means none.
  std::vector<SystemId> receiver_output;
};

/// W = C/d_in (x) sigma (x) omega: the sender's output is the channel input,
/// the receiver's input is the channel output.
ProcessOperator process_from_channel(const QuantumMap& m, const std::string& from, const std::string& to,
                                     const ChannelProcessOptions& options = {});

/// Distinct parties per factor. On any label or name collision every label,
/// party name and owner gets a "_1" / "_2" suffix.
ProcessOperator tensor_processes(const ProcessOperator& w1, const ProcessOperator& w2);
/// k copies with suffixes "_1" ... "_k" (k = 1 returns w unchanged).
ProcessOperator tensor_power(const ProcessOperator& w, int k);

struct PartyGroup {
  std::string name;
  std::vector<std::string> members;
};

/// Coarse-grains owners. Members of a group are ordered by the signaling
/// they exhibit; a group whose members signal in both directions (directly
/// or through a cycle) is rejected.
ProcessOperator merge_parties(const ProcessOperator& w, const std::vector<PartyGroup>& groups);

/// Link a local comb into one party. The party's inputs must be consumed by
/// the comb's first tooth and its outputs produced by the last tooth. The
/// comb's remaining open systems become new parties of the same owner:
/// "<name>.0" emits the first tooth's open inputs, "<name>.j" receives tooth
/// j's open outputs and emits tooth j+1's open inputs.
ProcessOperator apply_local_operation(const ProcessOperator& w, const std::string& party, const QuantumMap& comb);

/// The density matrix carried by the same operator.
LabeledOperator reduce_to_state(const ProcessOperator& w);

/// Largest total-variation distance between the outcome distributions of
/// `to` (computational and Fourier measurements) when `from` reprepares
/// computational or Fourier basis states versus omega. Other parties are
/// traced out. Zero means no signaling detected by this family.
double signaling_probe(const ProcessOperator& w, const std::string& from, const std::string& to);

}  // namespace causalproc
