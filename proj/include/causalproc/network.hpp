#pragma once

// Layered networks of unitary gates under a global time foliation.
//
// Wire ends are named
//   "p<s>"          past end of site s (enters the first gate on s)
//   "f<s>"          future end of site s (leaves the last gate on s)
//   "g<g>.in<k>"    k-th input of gate g
//   "g<g>.out<k>"   k-th output of gate g
// A region puts a set of ends on side A. A segment joining two gate ends is
// contracted when both ends sit on the same side and cut otherwise; a cut
// segment contributes both of its ends as open systems. Past and future
// ends are always open.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causalproc/tensor.hpp"

namespace causalproc {

struct Gate {
  int layer = 1;  // 1-based
  std::vector<int> sites;
  /// Exactly one of `unitary` and `haar_seed` is set.
  std::optional<Matrix> unitary;
  std::optional<std::uint64_t> haar_seed;
};

struct Region {
  /// Gate indices whose ends all belong to side A.
  std::vector<int> side_a_gates;
  /// Further ends on side A.
  Labels side_a_ends;
};

struct NetworkSpec {
  int width = 0;
  int layers = 0;
  int site_dim = 2;
  std::vector<Gate> gates;
  Region region;
};

/// 2^12 for qubits: the largest global pure state we build.
inline constexpr std::size_t kNetworkDimensionCap = 4096;

void check_network(const NetworkSpec& net);
Matrix gate_unitary(const NetworkSpec& net, std::size_t gate);
std::string gate_name(std::size_t gate);

/// Every wire end of the network, open or not.
Labels all_ends(const NetworkSpec& net);
bool end_on_side_a(const NetworkSpec& net, const std::string& end);

/// Pure global Choi state as a vector, together with the causal structure
/// of its open systems.
struct NetworkState {
  std::vector<SystemId> systems;
  Vector psi;
  Labels input_ends;   // past ends and cut consumer ends
  Labels output_ends;  // future ends and cut producer ends
  /// For each output end, the input ends in its causal past.
  std::map<std::string, Labels> past;
  Labels side_a;  // open systems on side A
};

NetworkState global_state(const NetworkSpec& net);
/// |psi><psi| of global_state. Only for small networks.
LabeledOperator global_choi(const NetworkSpec& net);
LabeledOperator reduced_operator(const NetworkSpec& net, const Labels& keep);
LabeledOperator reduced_operator(const NetworkState& state, const Labels& keep);

/// Coherent information with the side-A systems as target. The global state
/// is pure, so this is the entropy of side A.
double region_coherent_information(const NetworkSpec& net);
double region_coherent_information(const NetworkState& state);
/// log2 of the dimension of the side-A systems.
double region_max_bits(const NetworkState& state);

/// True when no kept output end lies in the causal future of a kept input end.
bool causally_closed(const NetworkState& state, const Labels& keep);

struct OmegaCheck {
  Labels kept;
  double deviation = 0.0;  // largest entry of |rho - omega|
  bool passed = false;
};

/// Reductions of the global state that must equal omega exactly: for every
/// subset I of input ends, I together with every output end outside the
/// causal future of I. Smaller qualifying sets are reductions of these.
std::vector<OmegaCheck> exact_omega_checks(const NetworkState& state, double tol = 1e-10);

/// Odd layers pair sites (0,1),(2,3),...; even layers pair (1,2),(3,4),...
/// Gate g draws its Haar seed from stream g of `seed`.
NetworkSpec build_brickwork(int layers, int width, std::uint64_t seed);
NetworkSpec build_brickwork(int layers, int width, const std::vector<Matrix>& unitaries);

/// Two-layer, four-site brickwork whose region cuts both internal segments:
/// side A holds p0, p1, g1.out0, g2.in0 and f2.
NetworkSpec fig6_small(std::uint64_t seed);

/// Same spec with every Haar seed replaced by one derived from (seed, sample).
NetworkSpec reseeded(const NetworkSpec& net, std::uint64_t seed, std::uint64_t sample);

// Single gates on inputs (a, b) and outputs (c, d).

/// Normalized Choi state of u over (c, d, a, b).
LabeledOperator gate_choi_state(const Matrix& u, int da, int db, int dc, int dd);
double gate_cut_ci(const Matrix& u, int da, int db, int dc, int dd, const Labels& target);
/// h (x) g with h: a -> c, g: b -> d. With `swap` the wires cross: h acts
/// a -> d and g acts b -> c (requires square factors of one dimension).
Matrix factorized_gate(const Matrix& h, const Matrix& g, bool swap);

}  // namespace causalproc
