#include "causalproc/process.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace causalproc {

namespace {

Labels labels_of(const std::vector<SystemId>& systems) {
  Labels out;
  for (const auto& s : systems) out.push_back(s.label);
  return out;
}

bool contains(const Labels& labels, const std::string& label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

using Polynomial = std::map<Labels, int>;

Labels set_union(const Labels& a, const Labels& b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

Polynomial multiply(const Polynomial& p, const Polynomial& q) {
  Polynomial out;
  for (const auto& [kp, cp] : p) {
    for (const auto& [kq, cq] : q) out[set_union(kp, kq)] += cp * cq;
  }
  std::erase_if(out, [](const auto& item) { return item.second == 0; });
  return out;
}

Labels sorted(Labels l) {
  std::sort(l.begin(), l.end());
  return l;
}

/// Tr[X^T W] with X given as a tensor of elements in arbitrary system order.
double transpose_pairing(const LabeledOperator& x, const LabeledOperator& w) {
  const LabeledOperator aligned = permute_systems(x, w.labels());
  if (aligned.systems() != w.systems()) throw Error("element dimensions disagree with the process");
  return aligned.matrix().cwiseProduct(w.matrix()).sum().real();
}

ProcessOperator with_suffix(const ProcessOperator& w, const std::string& suffix) {
  std::vector<std::pair<std::string, std::string>> renames;
  for (const auto& l : w.op().labels()) renames.emplace_back(l, l + suffix);
  std::vector<Party> parties;
  for (const auto& p : w.parties()) {
    Party q = p;
    q.name += suffix;
    if (!q.owner.empty()) q.owner += suffix;
    for (auto& s : q.inputs) s.label += suffix;
    for (auto& s : q.outputs) s.label += suffix;
    parties.push_back(std::move(q));
  }
  return ProcessOperator(w.op().relabeled(renames), std::move(parties), w.extended());
}

std::vector<Vector> probe_basis(int d) {
  std::vector<Vector> out;
  for (int k = 0; k < d; ++k) {
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    out.push_back(std::move(v));
  }
  if (d > 1) {
    for (int k = 0; k < d; ++k) {
      Vector v(d);
      for (int j = 0; j < d; ++j) v(j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                                                    2.0 * std::numbers::pi * j * k / d);
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

Labels Party::input_labels() const { return labels_of(inputs); }
Labels Party::output_labels() const { return labels_of(outputs); }
Labels Party::labels() const {
  Labels l = input_labels();
  for (const auto& s : outputs) l.push_back(s.label);
  return l;
}

ProcessOperator::ProcessOperator(LabeledOperator op, std::vector<Party> parties, bool extended)
    : op_(std::move(op)), parties_(std::move(parties)), extended_(extended) {
  std::set<std::string> names;
  std::set<std::string> covered;
  for (const auto& p : parties_) {
    if (p.name.empty()) throw Error("party with empty name");
    if (!names.insert(p.name).second) throw Error("duplicate party name '" + p.name + "'");
    for (const auto& l : p.labels()) {
      if (!op_.has(l)) throw Error("party '" + p.name + "' refers to unknown system '" + l + "'");
      if (!covered.insert(l).second) throw Error("system '" + l + "' assigned to more than one party");
    }
    for (const auto& s : p.inputs) {
      if (op_.system(s.label).dim != s.dim) throw Error("party '" + p.name + "' declares wrong dim for '" + s.label + "'");
    }
    for (const auto& s : p.outputs) {
      if (op_.system(s.label).dim != s.dim) throw Error("party '" + p.name + "' declares wrong dim for '" + s.label + "'");
    }
  }
  for (const auto& s : op_.systems()) {
    if (!covered.count(s.label)) throw Error("system '" + s.label + "' is not assigned to any party");
  }
}

const Party& ProcessOperator::party(const std::string& name) const {
  for (const auto& p : parties_) {
    if (p.name == name) return p;
  }
  throw Error("unknown party '" + name + "'");
}

bool ProcessOperator::has_party(const std::string& name) const {
  return std::any_of(parties_.begin(), parties_.end(), [&](const Party& p) { return p.name == name; });
}

std::vector<std::string> ProcessOperator::owners() const {
  std::vector<std::string> out;
  for (const auto& p : parties_) {
    if (!contains(out, p.owner_name())) out.push_back(p.owner_name());
  }
  return out;
}

std::vector<Party> ProcessOperator::teeth_of(const std::string& owner) const {
  std::vector<Party> out;
  for (const auto& p : parties_) {
    if (p.owner_name() == owner) out.push_back(p);
  }
  if (out.empty()) throw Error("unknown party owner '" + owner + "'");
  return out;
}

Labels ProcessOperator::systems_of_owner(const std::string& owner) const {
  Labels out;
  for (const auto& p : teeth_of(owner)) {
    for (const auto& l : p.labels()) out.push_back(l);
  }
  return out;
}

std::vector<LvTerm> lv_expansion(const std::vector<Party>& parties) {
  Polynomial product{{Labels{}, 1}};
  Labels everything;
  for (const auto& p : parties) {
    const Labels a1 = sorted(p.input_labels());
    const Labels a2 = sorted(p.output_labels());
    Polynomial factor;
    factor[Labels{}] += 1;
    factor[a2] -= 1;
    factor[set_union(a1, a2)] += 1;
    std::erase_if(factor, [](const auto& item) { return item.second == 0; });
    product = multiply(product, factor);
    everything = set_union(everything, set_union(a1, a2));
  }
  Polynomial total{{Labels{}, 1}};
  for (const auto& [k, c] : product) total[k] -= c;
  total[everything] += 1;
  std::vector<LvTerm> out;
  for (const auto& [k, c] : total) {
    if (c != 0) out.push_back({c, k});
  }
  return out;
}

LabeledOperator lv_project(const LabeledOperator& x, const std::vector<Party>& parties) {
  std::set<std::string> covered;
  for (const auto& p : parties) {
    for (const auto& l : p.labels()) {
      if (!x.has(l)) throw Error("party '" + p.name + "' refers to system '" + l + "' absent from the operator");
      if (!covered.insert(l).second) throw Error("system '" + l + "' listed by two parties");
    }
  }
  if (covered.size() != x.systems().size()) throw Error("party table does not cover every system of the operator");
  Matrix acc = Matrix::Zero(x.matrix().rows(), x.matrix().cols());
  for (const auto& term : lv_expansion(parties)) {
    acc += static_cast<double>(term.coefficient) * replace_with_maximally_mixed(x, term.replaced).matrix();
  }
  return {x.systems(), std::move(acc)};
}

ValidityReport validate(const ProcessOperator& w) {
  ValidityReport r;
  const auto ev = eigvals_hermitian(w.op());
  r.min_eigenvalue = ev.front();
  r.trace_deviation = std::abs(w.op().trace() - Complex(1.0));
  r.lv_residual = frobenius_distance(w.op(), lv_project(w.op(), w.parties()));
  r.psd_ok = r.min_eigenvalue >= -kPsdTolerance;
  r.trace_ok = r.trace_deviation <= kTraceTolerance;
  r.lv_ok = r.lv_residual <= kValidityTolerance;
  return r;
}

ProbabilityResult probability(const ProcessOperator& w, const std::map<std::string, QuantumMap>& elements) {
  LabeledOperator x;
  for (const auto& p : w.parties()) {
    auto it = elements.find(p.name);
    if (it == elements.end()) throw Error("no instrument element given for party '" + p.name + "'");
    const QuantumMap& e = it->second;
    if (e.normalization() != Normalization::PaperNormalized) {
      throw Error("element for party '" + p.name + "' must be PaperNormalized");
    }
    if (e.inputs() != p.inputs || e.outputs() != p.outputs) {
      throw Error("element for party '" + p.name + "' does not act on the party's systems");
    }
    x = tensor(x, e.choi());
  }
  for (const auto& [name, e] : elements) {
    if (!w.has_party(name)) throw Error("element given for unknown party '" + name + "'");
  }
  const double raw = transpose_pairing(x, w.op());
  return {std::clamp(raw, 0.0, 1.0), raw};
}

QuantumMap trace_and_prepare_maximally_mixed(const Party& party) {
  std::vector<SystemId> systems = party.outputs;
  systems.insert(systems.end(), party.inputs.begin(), party.inputs.end());
  return QuantumMap(LabeledOperator::identity(systems), party.inputs, party.outputs, Normalization::PaperNormalized);
}

QuantumMap prepare_element(const Party& party, const Vector& psi) {
  const auto dout = static_cast<Eigen::Index>(product_of_dims(party.outputs));
  if (psi.size() != dout) throw Error("prepared state does not match the party's outputs");
  const LabeledOperator c = tensor(LabeledOperator::projector(party.outputs, psi).scaled(static_cast<double>(dout)),
                                   LabeledOperator::identity(party.inputs));
  return QuantumMap(c, party.inputs, party.outputs, Normalization::PaperNormalized);
}

QuantumMap measure_element(const Party& party, const Matrix& f) {
  const auto din = static_cast<Eigen::Index>(product_of_dims(party.inputs));
  if (f.rows() != din || f.cols() != din) throw Error("effect does not match the party's inputs");
  const LabeledOperator c =
      tensor(LabeledOperator::identity(party.outputs), LabeledOperator(party.inputs, f.transpose()));
  return QuantumMap(c, party.inputs, party.outputs, Normalization::PaperNormalized);
}

ProcessOperator process_from_state(const LabeledOperator& rho,
                                   const std::vector<std::pair<std::string, Labels>>& assignment) {
  const auto ev = eigvals_hermitian(rho);
  if (ev.front() < -kPsdTolerance) throw Error("state is not positive semidefinite");
  if (std::abs(rho.trace() - Complex(1.0)) > kTraceTolerance) throw Error("state does not have unit trace");
  std::vector<Party> parties;
  for (const auto& [name, labels] : assignment) parties.push_back({name, rho.systems_for(labels), {}, ""});
  return ProcessOperator(rho, std::move(parties));
}

ProcessOperator process_from_state(const LabeledOperator& rho) {
  std::vector<std::pair<std::string, Labels>> assignment;
  for (const auto& s : rho.systems()) assignment.push_back({s.label, {s.label}});
  return process_from_state(rho, assignment);
}

ProcessOperator process_from_channel(const QuantumMap& m, const std::string& from, const std::string& to,
                                     const ChannelProcessOptions& options) {
  const QuantumMap s = to_standard(m);
  const double tp = s.trace_preservation_deviation();
  if (tp > 1e-9) {
    std::ostringstream msg;
    msg << "channel is not trace preserving: ||Tr_out C - I|| = " << tp;
    throw Error(msg.str());
  }
  LabeledOperator w = s.choi().scaled(1.0 / static_cast<double>(s.input_dim()));
  Party sender{from, {}, s.inputs(), ""};
  Party receiver{to, s.outputs(), options.receiver_output, ""};
  if (options.sender_input) {
    w = tensor(w, *options.sender_input);
    sender.inputs = options.sender_input->systems();
  }
  if (!options.receiver_output.empty()) w = tensor(w, LabeledOperator::maximally_mixed(options.receiver_output));
  return ProcessOperator(std::move(w), {sender, receiver});
}

ProcessOperator tensor_processes(const ProcessOperator& w1, const ProcessOperator& w2) {
  bool collision = false;
  for (const auto& l : w2.op().labels()) collision = collision || w1.op().has(l);
  for (const auto& p : w2.parties()) collision = collision || w1.has_party(p.name);
  for (const auto& o : w2.owners()) collision = collision || contains(w1.owners(), o);
  const ProcessOperator a = collision ? with_suffix(w1, "_1") : w1;
  const ProcessOperator b = collision ? with_suffix(w2, "_2") : w2;
  std::vector<Party> parties = a.parties();
  parties.insert(parties.end(), b.parties().begin(), b.parties().end());
  return ProcessOperator(tensor(a.op(), b.op()), std::move(parties), a.extended() || b.extended());
}

ProcessOperator tensor_power(const ProcessOperator& w, int k) {
  if (k < 1) throw Error("tensor_power: k must be >= 1");
  if (k == 1) return w;
  ProcessOperator acc = with_suffix(w, "_1");
  for (int i = 2; i <= k; ++i) {
    const ProcessOperator next = with_suffix(w, "_" + std::to_string(i));
    std::vector<Party> parties = acc.parties();
    parties.insert(parties.end(), next.parties().begin(), next.parties().end());
    acc = ProcessOperator(tensor(acc.op(), next.op()), std::move(parties), w.extended());
  }
  return acc;
}

ProcessOperator merge_parties(const ProcessOperator& w, const std::vector<PartyGroup>& groups) {
  std::map<std::string, std::string> new_owner;
  std::vector<std::vector<std::string>> ordered_groups;
  for (const auto& g : groups) {
    if (g.members.empty()) throw Error("merge group '" + g.name + "' has no members");
    const std::size_t n = g.members.size();
    std::vector<std::vector<bool>> signals(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      if (new_owner.count(g.members[i])) throw Error("owner '" + g.members[i] + "' listed in two merge groups");
      new_owner[g.members[i]] = g.name;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double s = 0.0;
        for (const auto& pi : w.teeth_of(g.members[i])) {
          for (const auto& pj : w.teeth_of(g.members[j])) s = std::max(s, signaling_probe(w, pi.name, pj.name));
        }
        signals[i][j] = s > 1e-9;
      }
    }
    // Kahn ordering, ties broken by declaration order.
    std::vector<std::string> order;
    std::vector<bool> placed(n, false);
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t pick = n;
      for (std::size_t j = 0; j < n && pick == n; ++j) {
        if (placed[j]) continue;
        bool blocked = false;
        for (std::size_t i = 0; i < n; ++i) blocked = blocked || (!placed[i] && i != j && signals[i][j]);
        if (!blocked) pick = j;
      }
      if (pick == n) {
        throw Error("cannot merge group '" + g.name +
                    "': its members signal to each other in both directions, so the merged party has no definite "
                    "internal order (merging is restricted to states, channels and combs)");
      }
      placed[pick] = true;
      order.push_back(g.members[pick]);
    }
    ordered_groups.push_back(std::move(order));
  }
  std::vector<Party> parties;
  std::set<std::string> emitted;
  for (const auto& p : w.parties()) {
    auto it = new_owner.find(p.owner_name());
    if (it == new_owner.end()) {
      parties.push_back(p);
      continue;
    }
    if (!emitted.insert(it->second).second) continue;
    for (const auto& group : ordered_groups) {
      if (new_owner.at(group.front()) != it->second) continue;
      for (const auto& member : group) {
        for (auto tooth : w.teeth_of(member)) {
          tooth.owner = it->second;
          parties.push_back(std::move(tooth));
        }
      }
    }
  }
  return ProcessOperator(w.op(), std::move(parties), w.extended());
}

ProcessOperator apply_local_operation(const ProcessOperator& w, const std::string& party_name,
                                      const QuantumMap& comb) {
  const Party& p = w.party(party_name);
  const QuantumMap c = to_standard(comb);
  const double scale = std::max(1.0, std::abs(c.choi().trace()));
  if (c.min_choi_eigenvalue() < -1e-9 * scale) throw Error("local operation is not completely positive");
  const auto teeth = c.effective_teeth();
  for (const auto& s : p.inputs) {
    if (!contains(teeth.front().inputs, s.label)) {
      throw Error("party input '" + s.label + "' is not consumed by the first tooth of the local operation");
    }
  }
  for (const auto& s : p.outputs) {
    if (!contains(teeth.back().outputs, s.label)) {
      throw Error("party output '" + s.label + "' is not produced by the last tooth of the local operation");
    }
  }
  const Labels own = p.labels();
  for (const auto& s : c.choi().systems()) {
    if (contains(own, s.label)) {
      if (w.op().system(s.label).dim != s.dim) throw Error("dimension mismatch on '" + s.label + "'");
    } else if (w.op().has(s.label)) {
      throw Error("local operation system '" + s.label + "' collides with another party's system");
    }
  }
  auto open = [&](const Labels& labels) {
    std::vector<SystemId> out;
    for (const auto& l : labels) {
      if (!contains(own, l)) out.push_back(c.choi().system(l));
    }
    return out;
  };
  std::vector<Party> fresh;
  double new_output_dim = 1.0;
  for (std::size_t j = 0; j <= teeth.size(); ++j) {
    Party q{p.name + "." + std::to_string(j), {}, {}, p.owner_name()};
    if (j > 0) q.inputs = open(teeth[j - 1].outputs);
    if (j < teeth.size()) q.outputs = open(teeth[j].inputs);
    new_output_dim *= static_cast<double>(product_of_dims(q.outputs));
    if (!q.inputs.empty() || !q.outputs.empty()) fresh.push_back(std::move(q));
  }
  const double factor = static_cast<double>(product_of_dims(p.outputs)) / new_output_dim;
  LabeledOperator linked = link_operators(w.op(), c.choi()).scaled(factor);
  std::vector<Party> parties;
  for (const auto& q : w.parties()) {
    if (q.name == p.name) {
      parties.insert(parties.end(), fresh.begin(), fresh.end());
    } else {
      parties.push_back(q);
    }
  }
  return ProcessOperator(std::move(linked), std::move(parties), true);
}

LabeledOperator reduce_to_state(const ProcessOperator& w) { return w.op(); }

double signaling_probe(const ProcessOperator& w, const std::string& from, const std::string& to) {
  if (from == to) throw Error("signaling_probe needs two distinct parties");
  const Party& a = w.party(from);
  const Party& b = w.party(to);
  if (a.outputs.empty() || b.inputs.empty()) return 0.0;
  Labels keep = a.labels();
  for (const auto& l : b.labels()) keep.push_back(l);
  const LabeledOperator reduced = reduce_to(w.op(), keep);

  const int dout = static_cast<int>(product_of_dims(a.outputs));
  const int din = static_cast<int>(product_of_dims(b.inputs));
  const auto preparations = probe_basis(dout);
  const auto measurement = probe_basis(din);
  const std::size_t bases = din > 1 ? 2 : 1;

  auto distribution = [&](const QuantumMap& prep, std::size_t basis) {
    std::vector<double> out;
    for (int m = 0; m < din; ++m) {
      const Vector& v = measurement[basis * din + m];
      const QuantumMap f = measure_element(b, v * v.adjoint());
      out.push_back(transpose_pairing(tensor(prep.choi(), f.choi()), reduced));
    }
    return out;
  };

  double worst = 0.0;
  const QuantumMap baseline = trace_and_prepare_maximally_mixed(a);
  for (std::size_t basis = 0; basis < bases; ++basis) {
    const auto ref = distribution(baseline, basis);
    for (const auto& psi : preparations) {
      const auto dist = distribution(prepare_element(a, psi), basis);
      double tv = 0.0;
      for (std::size_t m = 0; m < dist.size(); ++m) tv += std::abs(dist[m] - ref[m]);
      worst = std::max(worst, tv / 2.0);
    }
  }
  return worst;
}

}  // namespace causalproc
