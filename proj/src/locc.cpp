#include "causalproc/locc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "causalproc/measures.hpp"
#include "causalproc/parallel.hpp"

namespace causalproc {

namespace {

bool contains(const Labels& labels, const std::string& label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

/// Owner of the party holding `label` in w, and whether it is a party input.
struct Holder {
  std::string owner;
  bool is_input;
  int dim;
};

std::map<std::string, Holder> holders(const ProcessOperator& w) {
  std::map<std::string, Holder> out;
  for (const auto& p : w.parties()) {
    for (const auto& s : p.inputs) out[s.label] = {p.owner_name(), true, s.dim};
    for (const auto& s : p.outputs) out[s.label] = {p.owner_name(), false, s.dim};
  }
  return out;
}

const ClassicalWire* wire_for(const LoccProtocol& p, const std::string& label) {
  for (const auto& w : p.wires) {
    if (w.label == label) return &w;
  }
  return nullptr;
}

bool wire_allowed(const LoccProtocol& p, const std::string& from_owner, const std::string& to_owner) {
  if (from_owner == to_owner) return true;
  const bool forward = from_owner == p.side_a && to_owner == p.side_b;
  const bool backward = from_owner == p.side_b && to_owner == p.side_a;
  switch (p.setting.direction) {
    case Direction::None:
      return false;
    case Direction::Forward:
      return forward;
    case Direction::Backward:
      return backward;
    case Direction::TwoWay:
      return forward || backward;
  }
  return false;
}

/// Random isometry d -> 2d: the first d columns of a Haar unitary on d (x) C^2.
Matrix random_isometry(int d, CounterRng& rng) {
  const Matrix u = haar_random_unitary(2 * d, rng);
  Matrix v(2 * d, d);
  // Ancilla is the less significant factor, prepared in |0>.
  for (int i = 0; i < d; ++i) v.col(i) = u.col(2 * i);
  return v;
}

std::vector<SystemId> primed_systems(const std::vector<SystemId>& systems) {
  auto out = systems;
  for (auto& s : out) s.label += "'";
  return out;
}

/// Message-controlled map on (kept systems, message in) with an optional
/// outgoing message. Without an outgoing message every branch is a random
/// channel with two Kraus operators; with one, every branch is a random
/// rank-1 instrument whose outcome i is kept as |i mod d> and sent as
/// |i mod c>.
QuantumMap random_step_map(const std::vector<SystemId>& kept, const std::optional<SystemId>& message_in,
                           const std::optional<SystemId>& message_out, CounterRng& rng) {
  const int d = static_cast<int>(product_of_dims(kept));
  const int cin = message_in ? message_in->dim : 1;
  std::vector<SystemId> inputs = kept;
  if (message_in) inputs.push_back(*message_in);
  std::vector<SystemId> outputs = primed_systems(kept);
  if (message_out) outputs.push_back(*message_out);
  const int dout = static_cast<int>(product_of_dims(outputs));
  KrausSet kraus;
  for (int mu = 0; mu < cin; ++mu) {
    const Matrix v = random_isometry(d, rng);
    if (!message_out) {
      for (int k = 0; k < 2; ++k) {
        Matrix kr = Matrix::Zero(dout, d * cin);
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) kr(r, c * cin + mu) = v(r * 2 + k, c);
        }
        kraus.push_back(std::move(kr));
      }
      continue;
    }
    const int cout = message_out->dim;
    for (int i = 0; i < 2 * d; ++i) {
      Matrix kr = Matrix::Zero(dout, d * cin);
      const int row = (i % d) * cout + (i % cout);
      for (int c = 0; c < d; ++c) kr(row, c * cin + mu) = v(i, c);
      kraus.push_back(std::move(kr));
    }
  }
  return choi_from_kraus(kraus, inputs, outputs);
}

Matrix bell_vector(int index) {
  Matrix v = Matrix::Zero(4, 1);
  const double h = 1.0 / std::sqrt(2.0);
  switch (index) {
    case 0:
      v(0, 0) = h;
      v(3, 0) = h;
      break;
    case 1:
      v(0, 0) = h;
      v(3, 0) = -h;
      break;
    case 2:
      v(1, 0) = h;
      v(2, 0) = h;
      break;
    default:
      v(1, 0) = h;
      v(2, 0) = -h;
      break;
  }
  return v;
}

}  // namespace

Direction parse_direction(const std::string& name) {
  if (name == "none") return Direction::None;
  if (name == "forward") return Direction::Forward;
  if (name == "backward") return Direction::Backward;
  if (name == "two_way" || name == "two-way") return Direction::TwoWay;
  throw Error("unknown LOCC direction '" + name + "' (none, forward, backward, two_way)");
}

std::string direction_name(Direction d) {
  switch (d) {
    case Direction::None:
      return "none";
    case Direction::Forward:
      return "forward";
    case Direction::Backward:
      return "backward";
    case Direction::TwoWay:
      return "two_way";
  }
  return "none";
}

void check_setting(const LoccSetting& s) {
  if (s.rounds < 0 || s.rounds > kMaxRounds) {
    throw Error("LOCC rounds must lie in 0.." + std::to_string(kMaxRounds));
  }
  if (s.rounds == 0 && s.direction != Direction::None) throw Error("zero rounds require direction none");
  if (s.rounds > 0 && s.direction == Direction::None) throw Error("direction none allows no rounds");
  if (s.classical_dim < 2) throw Error("classical_dim must be >= 2");
}

void check_protocol(const ProcessOperator& w, const LoccProtocol& p) {
  check_setting(p.setting);
  const auto held = holders(w);
  std::map<std::string, std::size_t> produced;
  std::set<std::string> consumed;
  std::set<std::string> fresh_inputs;
  std::set<std::string> names;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& step = p.steps[i];
    if (!names.insert(step.name).second) throw Error("duplicate step name '" + step.name + "'");
    if (step.map.normalization() != Normalization::StandardChoi) {
      throw Error("step '" + step.name + "' must be StandardChoi");
    }
    const double tp = step.map.trace_preservation_deviation();
    if (tp > 1e-9) throw Error("step '" + step.name + "' is not trace preserving");
    for (const auto& s : step.map.inputs()) {
      if (!consumed.insert(s.label).second) throw Error("system '" + s.label + "' consumed twice");
      auto h = held.find(s.label);
      if (h != held.end()) {
        if (h->second.owner != step.owner) {
          throw Error("step '" + step.name + "' of " + step.owner + " consumes '" + s.label + "' held by " +
                      h->second.owner);
        }
        if (!h->second.is_input) throw Error("step '" + step.name + "' consumes process output '" + s.label + "'");
        continue;
      }
      auto prod = produced.find(s.label);
      if (prod == produced.end()) {
        fresh_inputs.insert(s.label);
        continue;
      }
      const auto& from = p.steps[prod->second];
      const ClassicalWire* wire = wire_for(p, s.label);
      if (wire) {
        if (wire->from != from.name || wire->to != step.name) {
          throw Error("classical wire '" + s.label + "' does not connect the declared steps");
        }
      } else if (from.owner != step.owner) {
        throw Error("quantum system '" + s.label + "' passes from " + from.owner + " to " + step.owner +
                    "; only classical communication is allowed between sides");
      }
    }
    for (const auto& s : step.map.outputs()) {
      auto h = held.find(s.label);
      if (h != held.end()) {
        if (h->second.owner != step.owner || h->second.is_input) {
          throw Error("step '" + step.name + "' cannot produce process system '" + s.label + "'");
        }
      }
      if (produced.count(s.label) || fresh_inputs.count(s.label) || consumed.count(s.label)) {
        throw Error("system '" + s.label + "' produced after being used (cyclic wiring)");
      }
      produced[s.label] = i;
    }
  }
  int forward = 0;
  int backward = 0;
  for (const auto& wire : p.wires) {
    auto from = std::find_if(p.steps.begin(), p.steps.end(), [&](const auto& s) { return s.name == wire.from; });
    auto to = std::find_if(p.steps.begin(), p.steps.end(), [&](const auto& s) { return s.name == wire.to; });
    if (from == p.steps.end() || to == p.steps.end()) throw Error("classical wire '" + wire.label + "' names unknown steps");
    if (from >= to) throw Error("classical wire '" + wire.label + "' runs backwards in execution order");
    if (!contains(from->map.output_labels(), wire.label) || !contains(to->map.input_labels(), wire.label)) {
      throw Error("classical wire '" + wire.label + "' is not an output of its source and an input of its sink");
    }
    if (!wire_allowed(p, from->owner, to->owner)) {
      throw Error("classical wire '" + wire.label + "' from " + from->owner + " to " + to->owner +
                  " is not permitted by direction " + direction_name(p.setting.direction));
    }
    if (from->owner != to->owner) ++(from->owner == p.side_a ? forward : backward);
  }
  if (forward + backward > p.setting.rounds) {
    throw Error("protocol sends " + std::to_string(forward + backward) + " messages but the setting allows " +
                std::to_string(p.setting.rounds));
  }
}

ProcessOperator run_protocol(const ProcessOperator& w, const LoccProtocol& p) {
  check_protocol(w, p);
  if (p.steps.empty()) return w;
  const auto held = holders(w);
  Labels all_inputs;
  Labels all_outputs;
  for (const auto& step : p.steps) {
    for (const auto& l : step.map.input_labels()) all_inputs.push_back(l);
    for (const auto& l : step.map.output_labels()) all_outputs.push_back(l);
  }
  LabeledOperator v = w.op();
  double factor = 1.0;
  std::vector<Party> fresh;
  Labels produced;
  for (const auto& step : p.steps) {
    QuantumMap m = step.map;
    for (const auto& wire : p.wires) {
      if (wire.from != step.name) continue;
      const std::string raw = wire.label + "#wire";
      m = link_product(relabel_map(m, {{wire.label, raw}}), dephasing(1.0, wire.dim, raw, wire.label));
    }
    Party pre{step.name + ".pre", {}, {}, step.owner};
    Party post{step.name + ".post", {}, {}, step.owner};
    for (const auto& s : step.map.inputs()) {
      if (held.count(s.label) || contains(produced, s.label)) continue;
      pre.outputs.push_back(s);
      factor /= s.dim;
    }
    for (const auto& s : step.map.outputs()) {
      produced.push_back(s.label);
      auto h = held.find(s.label);
      if (h != held.end()) {
        factor *= h->second.dim;
        continue;
      }
      if (!contains(all_inputs, s.label)) post.inputs.push_back(s);
    }
    v = link_operators(v, m.choi());
    if (!pre.outputs.empty()) fresh.push_back(std::move(pre));
    if (!post.inputs.empty()) fresh.push_back(std::move(post));
  }
  std::vector<Party> parties;
  for (const auto& q : w.parties()) {
    Party rest{q.name, {}, {}, q.owner};
    for (const auto& s : q.inputs) {
      if (!contains(all_inputs, s.label)) rest.inputs.push_back(s);
    }
    for (const auto& s : q.outputs) {
      if (!contains(all_outputs, s.label)) rest.outputs.push_back(s);
    }
    if (!rest.inputs.empty() || !rest.outputs.empty()) parties.push_back(std::move(rest));
  }
  parties.insert(parties.end(), fresh.begin(), fresh.end());
  return ProcessOperator(v.scaled(factor), std::move(parties), true);
}

ProcessOperator separable_process(const std::vector<SeparableTerm>& ensemble) {
  if (ensemble.empty()) throw Error("separable_process: empty ensemble");
  double total = 0.0;
  for (const auto& t : ensemble) {
    if (t.weight < 0.0) throw Error("separable_process: negative weight");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("separable_process: weights do not sum to 1");
  std::vector<Party> parties = ensemble.front().side_a.parties();
  parties.insert(parties.end(), ensemble.front().side_b.parties().begin(), ensemble.front().side_b.parties().end());
  LabeledOperator first = tensor(ensemble.front().side_a.op(), ensemble.front().side_b.op());
  Matrix acc = Matrix::Zero(first.matrix().rows(), first.matrix().cols());
  for (const auto& t : ensemble) {
    if (t.side_a.parties() != ensemble.front().side_a.parties() ||
        t.side_b.parties() != ensemble.front().side_b.parties()) {
      throw Error("separable_process: terms have different party tables");
    }
    const LabeledOperator term = permute_systems(tensor(t.side_a.op(), t.side_b.op()), first.labels());
    acc += t.weight * term.matrix();
  }
  return ProcessOperator(LabeledOperator(first.systems(), std::move(acc)), std::move(parties));
}

Measure state_ci_measure(const std::string& target_owner) {
  return {"state_ci", true, [target_owner](const ProcessOperator& w) {
            return coherent_information(w.op(), w.systems_of_owner(target_owner));
          }};
}

Measure hashing_measure(const std::string& target_owner) {
  return {"hashing", true, [target_owner](const ProcessOperator& w) {
            return hashing_lower_bound(reduce_to_state(w), w.systems_of_owner(target_owner));
          }};
}

Measure lo_ci_measure(const std::string& target_owner, const LoFamily& family, const OptimizerConfig& cfg) {
  return {"lo_ci", false, [target_owner, family, cfg](const ProcessOperator& w) {
            return lo_optimized_ci(w, target_owner, family, cfg).value_bits;
          }};
}

LoccProtocol sample_protocol(const ProcessOperator& w, const LoccSetting& setting, const std::string& side_a,
                             const std::string& side_b, const std::string& target_owner, CounterRng& rng) {
  check_setting(setting);
  LoccProtocol p;
  p.setting = setting;
  p.side_a = side_a;
  p.side_b = side_b;
  std::map<std::string, std::vector<SystemId>> kept;
  for (const auto& owner : {side_a, side_b}) {
    for (const auto& t : w.teeth_of(owner)) kept[owner].insert(kept[owner].end(), t.inputs.begin(), t.inputs.end());
  }
  std::map<std::string, int> counter;
  auto next_name = [&](const std::string& owner) { return owner + std::to_string(++counter[owner]); };

  if (setting.direction == Direction::None) {
    const auto& sys = kept[target_owner];
    if (sys.empty()) return p;
    p.steps.push_back({next_name(target_owner), target_owner, random_step_map(sys, std::nullopt, std::nullopt, rng)});
    return p;
  }
  std::map<std::string, std::optional<SystemId>> pending;
  std::map<std::string, std::string> pending_from;
  for (int r = 1; r <= setting.rounds; ++r) {
    std::string sender = side_a;
    if (setting.direction == Direction::Backward) sender = side_b;
    if (setting.direction == Direction::TwoWay && r % 2 == 0) sender = side_b;
    const std::string receiver = sender == side_a ? side_b : side_a;
    const SystemId message{"m" + std::to_string(r), setting.classical_dim};
    const std::string name = next_name(sender);
    p.steps.push_back({name, sender, random_step_map(kept[sender], pending[sender], message, rng)});
    if (pending[sender]) p.wires.push_back({pending_from[sender], name, pending[sender]->label, pending[sender]->dim});
    pending[sender].reset();
    kept[sender] = primed_systems(kept[sender]);
    pending[receiver] = message;
    pending_from[receiver] = name;
  }
  for (const auto& owner : {side_a, side_b}) {
    if (!pending[owner]) continue;
    const std::string name = next_name(owner);
    p.steps.push_back({name, owner, random_step_map(kept[owner], pending[owner], std::nullopt, rng)});
    p.wires.push_back({pending_from[owner], name, pending[owner]->label, pending[owner]->dim});
  }
  return p;
}

ProbeReport monotonicity_probe(const Measure& measure, const ProcessOperator& w, const LoccSetting& setting,
                               int samples, std::uint64_t seed, const std::string& side_a,
                               const std::string& side_b, const std::string& target_owner, double slack,
                               int threads) {
  if (samples < 0) throw Error("samples must be >= 0");
  ProbeReport report;
  report.measure = measure.name;
  report.exact = measure.exact && setting.direction == Direction::None;
  report.setting = direction_name(setting.direction);
  report.samples = samples;
  report.slack = slack;
  report.before = measure.evaluate(w);
  std::vector<double> after(static_cast<std::size_t>(samples));
  std::vector<double> two_way(static_cast<std::size_t>(samples), 0.0);
  parallel_for(after.size(), threads, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const LoccProtocol p = sample_protocol(w, setting, side_a, side_b, target_owner, rng);
    const ProcessOperator v = run_protocol(w, p);
    after[i] = measure.evaluate(v);
    const auto& parties = v.parties();
    for (std::size_t x = 0; x < parties.size(); ++x) {
      for (std::size_t y = x + 1; y < parties.size(); ++y) {
        if (parties[x].owner_name() == parties[y].owner_name()) continue;
        const double s = std::min(signaling_probe(v, parties[x].name, parties[y].name),
                                  signaling_probe(v, parties[y].name, parties[x].name));
        two_way[i] = std::max(two_way[i], s);
      }
    }
  });
  report.max_after = samples > 0 ? -1e300 : report.before;
  for (int i = 0; i < samples; ++i) {
    const double inc = after[static_cast<std::size_t>(i)] - report.before;
    report.max_increase = std::max(report.max_increase, inc);
    report.max_after = std::max(report.max_after, after[static_cast<std::size_t>(i)]);
    report.max_two_way_signaling = std::max(report.max_two_way_signaling, two_way[static_cast<std::size_t>(i)]);
    if (inc > slack) report.flagged.push_back(i);
  }
  return report;
}

PartyTimeline fine_grain(const Party& party, int copies) {
  if (copies < 1) throw Error("fine_grain: copies must be >= 1");
  PartyTimeline t;
  t.original = party;
  if (copies == 1) {
    t.copies.push_back(party);
    return t;
  }
  auto tagged = [&](const std::string& tag) {
    std::vector<SystemId> out = party.inputs;
    for (auto& s : out) s.label += tag;
    return out;
  };
  for (int j = 1; j <= copies; ++j) {
    Party c{party.name + std::to_string(j), {}, {}, party.owner_name()};
    c.inputs = j == 1 ? party.inputs : tagged("@" + std::to_string(j - 1) + ">");
    c.outputs = j == copies ? party.outputs : tagged("@" + std::to_string(j));
    t.copies.push_back(std::move(c));
    if (j < copies) {
      const auto from = tagged("@" + std::to_string(j));
      const auto to = tagged("@" + std::to_string(j) + ">");
      const auto d = static_cast<Eigen::Index>(product_of_dims(from));
      t.glue.push_back(unitary_channel(Matrix::Identity(d, d), from, to));
    }
  }
  return t;
}

QuantumMap coarse_grain(const PartyTimeline& timeline, const std::vector<QuantumMap>& ops) {
  if (ops.size() != timeline.copies.size()) throw Error("coarse_grain: one operation per copy is required");
  for (std::size_t j = 0; j < ops.size(); ++j) {
    for (const auto& l : timeline.copies[j].input_labels()) {
      if (!contains(ops[j].input_labels(), l)) throw Error("coarse_grain: copy operation misses input '" + l + "'");
    }
    for (const auto& l : timeline.copies[j].output_labels()) {
      if (!contains(ops[j].output_labels(), l)) throw Error("coarse_grain: copy operation misses output '" + l + "'");
    }
  }
  QuantumMap acc = to_standard(ops.front());
  for (std::size_t j = 0; j + 1 < ops.size(); ++j) {
    acc = link_product(acc, timeline.glue[j]);
    acc = link_product(acc, to_standard(ops[j + 1]));
  }
  std::vector<Tooth> teeth;
  const Labels ins = acc.input_labels();
  const Labels outs = acc.output_labels();
  for (const auto& op : ops) {
    for (const auto& t : op.effective_teeth()) {
      Tooth kept;
      for (const auto& l : t.inputs) {
        if (contains(ins, l)) kept.inputs.push_back(l);
      }
      for (const auto& l : t.outputs) {
        if (contains(outs, l)) kept.outputs.push_back(l);
      }
      if (!kept.inputs.empty() || !kept.outputs.empty()) teeth.push_back(std::move(kept));
    }
  }
  return acc.with_teeth(std::move(teeth));
}

LoccProtocol teleportation_protocol(const std::string& a, const std::string& b) {
  LoccProtocol p;
  p.setting = {Direction::Forward, 1, 4};
  KrausSet bell;
  for (int m = 0; m < 4; ++m) {
    Matrix k = Matrix::Zero(4, 4);
    k.row(m) = bell_vector(m).adjoint();
    bell.push_back(std::move(k));
  }
  // B's state after outcome m is M_m psi with M_m[y, x] = sqrt(2) conj(beta_m[x, y]);
  // the correction is M_m^dagger.
  KrausSet correct;
  for (int m = 0; m < 4; ++m) {
    const Matrix beta = bell_vector(m);
    Matrix mm(2, 2);
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) mm(y, x) = std::sqrt(2.0) * std::conj(beta(x * 2 + y, 0));
    }
    const Matrix u = mm.adjoint();
    Matrix k = Matrix::Zero(2, 8);
    for (int y = 0; y < 2; ++y) {
      for (int bb = 0; bb < 2; ++bb) k(y, bb * 4 + m) = u(y, bb);
    }
    correct.push_back(std::move(k));
  }
  p.steps.push_back({"A1", "A", choi_from_kraus(bell, {{"x", 2}, {a, 2}}, {{"m", 4}})});
  p.steps.push_back({"B1", "B", choi_from_kraus(correct, {{b, 2}, {"m", 4}}, {{"y", 2}})});
  p.wires.push_back({"A1", "B1", "m", 4});
  return p;
}

LoccProtocol measure_and_prepare_protocol(const std::string& a, const std::string& b) {
  LoccProtocol p;
  p.setting = {Direction::Forward, 1, 2};
  KrausSet measure;
  for (int i = 0; i < 2; ++i) {
    Matrix k = Matrix::Zero(4, 2);
    k(i * 2 + i, i) = 1.0;
    measure.push_back(std::move(k));
  }
  KrausSet prepare;
  for (int mu = 0; mu < 2; ++mu) {
    for (int j = 0; j < 2; ++j) {
      Matrix k = Matrix::Zero(2, 4);
      k(mu, j * 2 + mu) = 1.0;
      prepare.push_back(std::move(k));
    }
  }
  p.steps.push_back({"A1", "A", choi_from_kraus(measure, {{a, 2}}, {{a + "'", 2}, {"m", 2}})});
  p.steps.push_back({"B1", "B", choi_from_kraus(prepare, {{b, 2}, {"m", 2}}, {{"y", 2}})});
  p.wires.push_back({"A1", "B1", "m", 2});
  return p;
}

}  // namespace causalproc
