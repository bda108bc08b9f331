#pragma once

// Local operations with classical communication acting on processes.
// Every local action is a step owned by one side; steps of the same side
// may pass quantum memory forward, steps of different sides may only talk
// through classical wires, which are modeled as completely dephasing
// channels.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "causalproc/choi.hpp"
#include "causalproc/optimizer.hpp"
#include "causalproc/process.hpp"
#include "causalproc/rng.hpp"

namespace causalproc {

enum class Direction { None, Forward, Backward, TwoWay };

Direction parse_direction(const std::string& name);
std::string direction_name(Direction d);

inline constexpr int kMaxRounds = 4;

struct LoccSetting {
  Direction direction = Direction::None;
  int rounds = 0;
  int classical_dim = 2;
};

void check_setting(const LoccSetting& s);

struct ProtocolStep {
  std::string name;   // e.g. "A1"
  std::string owner;  // side the step belongs to
  QuantumMap map;     // StandardChoi, trace preserving
};

/// `label` is an output of step `from` and an input of step `to`.
struct ClassicalWire {
  std::string from;
  std::string to;
  std::string label;
  int dim = 2;
};

struct LoccProtocol {
  LoccSetting setting;
  /// Owners playing A and B; forward wires run from side_a to side_b.
  std::string side_a = "A";
  std::string side_b = "B";
  std::vector<ProtocolStep> steps;  // in execution order
  std::vector<ClassicalWire> wires;
};

/// Checks wiring: steps only read classical wires produced earlier, quantum
/// links between steps stay within one owner, wire directions and counts
/// respect the setting, every step is trace preserving.
void check_protocol(const ProcessOperator& w, const LoccProtocol& p);

/// Links every step into w (classical wires dephased), renormalizes, and
/// returns the process over the open systems. Each step contributes a party
/// "<step>.pre" emitting its open inputs and "<step>.post" receiving its
/// open outputs, owned by the step's owner. Parties of w whose systems are
/// all consumed disappear; partly consumed parties keep the rest.
ProcessOperator run_protocol(const ProcessOperator& w, const LoccProtocol& p);

struct SeparableTerm {
  double weight;
  ProcessOperator side_a;
  ProcessOperator side_b;
};

/// sum_i p_i W_A,i (x) W_B,i. All terms must share the same party tables.
ProcessOperator separable_process(const std::vector<SeparableTerm>& ensemble);

/// A measure on processes. `exact` marks measures for which monotonicity is
/// a theorem; the others are optimizer lower bounds.
struct Measure {
  std::string name;
  bool exact = false;
  std::function<double(const ProcessOperator&)> evaluate;
};

/// Coherent information of the operator with every system of `target_owner`
/// as target.
Measure state_ci_measure(const std::string& target_owner);
/// hashing_lower_bound after reduce_to_state, same target.
Measure hashing_measure(const std::string& target_owner);
/// lo_optimized_ci with a fixed family and configuration.
Measure lo_ci_measure(const std::string& target_owner, const LoFamily& family, const OptimizerConfig& cfg);

struct ProbeReport {
  std::string measure;
  bool exact = false;
  std::string setting;
  int samples = 0;
  double slack = 0.0;
  double before = 0.0;
  double max_increase = 0.0;
  double max_after = 0.0;
  /// Sample indices whose increase exceeds the slack.
  std::vector<int> flagged;
  /// Largest signaling measured between any two parties of the outputs
  /// other than the pair holding w, counted only when it goes both ways.
  double max_two_way_signaling = 0.0;
  bool passed() const { return !exact || flagged.empty(); }
};

/// Random protocol for the setting. Direction None gives one random channel
/// on the inputs of `target_owner`; otherwise the first sender applies a
/// random rank-1 instrument, messages alternate as the setting allows, and
/// receivers apply message-controlled random channels. Local randomness
/// uses Haar unitaries with a qubit ancilla.
LoccProtocol sample_protocol(const ProcessOperator& w, const LoccSetting& setting, const std::string& side_a,
                             const std::string& side_b, const std::string& target_owner, CounterRng& rng);

ProbeReport monotonicity_probe(const Measure& measure, const ProcessOperator& w, const LoccSetting& setting,
                               int samples, std::uint64_t seed, const std::string& side_a,
                               const std::string& side_b, const std::string& target_owner, double slack = 1e-8,
                               int threads = 1);

/// A party dissected into copies joined by identity channels.
struct PartyTimeline {
  Party original;
  std::vector<Party> copies;
  std::vector<QuantumMap> glue;  // glue[j]: copy j outputs -> copy j+1 inputs
};

/// Copy 1 receives the party's inputs and emits "<label>@1" for each input
/// system; copy j receives "<label>@(j-1)>" and emits "<label>@j"; the last
/// copy emits the party's outputs.
PartyTimeline fine_grain(const Party& party, int copies);

/// Links the copies' operations through the glue into one operation on the
/// original party; the teeth of the result are the copies' teeth in order.
QuantumMap coarse_grain(const PartyTimeline& timeline, const std::vector<QuantumMap>& copy_operations);

// Fixtures.

/// Bell measurement on (x, a) with the outcome sent on classical wire "m"
/// (dim 4), Pauli correction by B on (b, m) into "y". Applied to a process
/// holding a maximally entangled pair on A's input "a" and B's input "b".
LoccProtocol teleportation_protocol(const std::string& a = "a", const std::string& b = "b");
/// A measures "a" in the computational basis, keeps a copy on "a'" and
/// sends the value on "m"; B discards "b" and prepares the value on "y".
LoccProtocol measure_and_prepare_protocol(const std::string& a = "a", const std::string& b = "b");

}  // namespace causalproc
