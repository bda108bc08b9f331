// Regenerates the JSON files under fixtures/.
//   make_fixtures <output dir>

#include <fstream>
#include <iostream>

#include "causalproc/io.hpp"

using namespace causalproc;

namespace {

void write(const std::string& dir, const std::string& name, const Json& j) {
  std::ofstream out(dir + "/" + name);
  out << dump_deterministic(j);
}

LabeledOperator basis_state(const std::string& label, int k) {
  Vector v = Vector::Zero(2);
  v(k) = 1.0;
  return LabeledOperator::projector({{label, 2}}, v);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output dir>\n";
    return 1;
  }
  const std::string dir = argv[1];
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const LabeledOperator phi_plus = LabeledOperator::projector({{"a", 2}, {"b", 2}}, phi);
  write(dir, "state_phi_plus.json", process_to_json(process_from_state(phi_plus, {{"A", {"a"}}, {"B", {"b"}}})));

  const LabeledOperator omega = LabeledOperator::maximally_mixed({{"a", 2}, {"b", 2}});
  write(dir, "omega.json", process_to_json(process_from_state(omega, {{"A", {"a"}}, {"B", {"b"}}})));

  const LabeledOperator loop = identity_channel(2, "a2", "a1").choi().scaled(0.5);
  write(dir, "feedback_loop.json", process_to_json(ProcessOperator(loop, {Party{"A", {{"a1", 2}}, {{"a2", 2}}, ""}})));

  write(dir, "haar_choi.json", operator_to_json(gate_choi_state(haar_random_unitary(4, 7), 2, 2, 2, 2)));

  write(dir, "channel_identity.json", map_to_json(identity_channel(2)));
  write(dir, "channel_erasure.json", map_to_json(erasure(0.25, 2)));
  write(dir, "channel_depolarizing.json", map_to_json(depolarizing(1.0, 2)));

  write(dir, "channel_process_identity.json",
        process_to_json(process_from_channel(identity_channel(2, "x", "y"), "A", "B")));

  std::vector<SeparableTerm> terms;
  for (int k = 0; k < 2; ++k) {
    terms.push_back({0.5, process_from_state(basis_state("a", k), {{"A", {"a"}}}),
                     process_from_state(basis_state("b", k), {{"B", {"b"}}})});
  }
  write(dir, "separable.json", process_to_json(separable_process(terms)));

  write(dir, "fig6_small.json", network_to_json(fig6_small(0)));
  NetworkSpec id = build_brickwork(1, 2, std::vector<Matrix>{Matrix::Identity(4, 4)});
  id.region.side_a_ends = {"p0", "p1"};
  write(dir, "identity_network.json", network_to_json(id));

  write(dir, "optimizer_config.json", config_to_json(OptimizerConfig{}));
  return 0;
}
