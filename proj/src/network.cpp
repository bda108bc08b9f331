#include "causalproc/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "causalproc/choi.hpp"
#include "causalproc/measures.hpp"
#include "causalproc/rng.hpp"
#include "index_map.hpp"

namespace causalproc {

namespace {

bool contains(const Labels& labels, const std::string& label) {
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  while (exp-- > 0) out *= base;
  return out;
}

/// Gate indices in foliation order (layer, then table order).
std::vector<std::size_t> foliation_order(const NetworkSpec& net) {
  std::vector<std::size_t> order(net.gates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return net.gates[x].layer < net.gates[y].layer; });
  return order;
}

struct Touch {
  std::size_t gate;
  std::size_t slot;
};

/// Gates touching each site, in foliation order.
std::vector<std::vector<Touch>> site_histories(const NetworkSpec& net) {
  std::vector<std::vector<Touch>> out(static_cast<std::size_t>(net.width));
  for (std::size_t g : foliation_order(net)) {
    const auto& sites = net.gates[g].sites;
    for (std::size_t k = 0; k < sites.size(); ++k) out[static_cast<std::size_t>(sites[k])].push_back({g, k});
  }
  return out;
}

std::string in_end(std::size_t g, std::size_t k) { return gate_name(g) + ".in" + std::to_string(k); }
std::string out_end(std::size_t g, std::size_t k) { return gate_name(g) + ".out" + std::to_string(k); }

std::optional<std::size_t> gate_of_end(const std::string& end) {
  if (end.size() < 2 || end[0] != 'g') return std::nullopt;
  const auto dot = end.find('.');
  if (dot == std::string::npos) return std::nullopt;
  return static_cast<std::size_t>(std::stoul(end.substr(1, dot - 1)));
}

Vector phi_plus(int d) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i) v(static_cast<Eigen::Index>(i) * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return v;
}

void append_pair(std::vector<SystemId>& systems, Vector& psi, const std::string& first, const std::string& second,
                 int d) {
  const Vector pair = phi_plus(d);
  Vector next(psi.size() * pair.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) next.segment(i * pair.size(), pair.size()) = psi(i) * pair;
  psi = std::move(next);
  systems.push_back({first, d});
  systems.push_back({second, d});
}

void apply_on(const std::vector<SystemId>& systems, Vector& psi, const Labels& targets, const Matrix& u) {
  const auto pos = detail::positions_of(systems, targets);
  const auto rest = detail::complement_positions(systems.size(), pos);
  const auto ft = detail::offsets_of(systems, pos);
  const auto fr = detail::offsets_of(systems, rest);
  Vector v(static_cast<Eigen::Index>(ft.size()));
  for (std::size_t base : fr) {
    for (std::size_t r = 0; r < ft.size(); ++r) v(static_cast<Eigen::Index>(r)) = psi(static_cast<Eigen::Index>(base + ft[r]));
    const Vector w = u * v;
    for (std::size_t r = 0; r < ft.size(); ++r) psi(static_cast<Eigen::Index>(base + ft[r])) = w(static_cast<Eigen::Index>(r));
  }
}

void rename(std::vector<SystemId>& systems, const std::string& from, const std::string& to) {
  for (auto& s : systems) {
    if (s.label == from) {
      s.label = to;
      return;
    }
  }
  throw Error("internal: no carrier '" + from + "'");
}

Labels merged(Labels a, const Labels& b) {
  for (const auto& l : b) {
    if (!contains(a, l)) a.push_back(l);
  }
  return a;
}

}  // namespace

std::string gate_name(std::size_t gate) { return "g" + std::to_string(gate); }

void check_network(const NetworkSpec& net) {
  if (net.width < 1) throw Error("network width must be >= 1");
  if (net.layers < 1) throw Error("network layers must be >= 1");
  if (net.site_dim < 2) throw Error("network site_dim must be >= 2");
  std::set<std::pair<int, int>> occupied;
  for (std::size_t g = 0; g < net.gates.size(); ++g) {
    const auto& gate = net.gates[g];
    if (gate.layer < 1 || gate.layer > net.layers) throw Error(gate_name(g) + ": layer out of range");
    if (gate.sites.empty()) throw Error(gate_name(g) + ": no sites");
    for (int s : gate.sites) {
      if (s < 0 || s >= net.width) throw Error(gate_name(g) + ": site out of range");
      if (!occupied.insert({gate.layer, s}).second) {
        throw Error(gate_name(g) + ": site " + std::to_string(s) + " already used in layer " + std::to_string(gate.layer));
      }
    }
    if (gate.unitary.has_value() == gate.haar_seed.has_value()) {
      throw Error(gate_name(g) + ": give exactly one of unitary and haar_seed");
    }
    if (gate.unitary) {
      const auto d = static_cast<Eigen::Index>(int_pow(static_cast<std::size_t>(net.site_dim), gate.sites.size()));
      const Matrix& u = *gate.unitary;
      if (u.rows() != d || u.cols() != d) throw Error(gate_name(g) + ": unitary has the wrong dimension");
      const double dev = (u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
      if (dev > 1e-9) throw Error(gate_name(g) + ": gate is not unitary");
    }
  }
  const Labels ends = all_ends(net);
  for (const auto& e : net.region.side_a_ends) {
    if (!contains(ends, e)) throw Error("region names unknown wire end '" + e + "'");
  }
  for (int g : net.region.side_a_gates) {
    if (g < 0 || static_cast<std::size_t>(g) >= net.gates.size()) throw Error("region names unknown gate");
  }
}

Matrix gate_unitary(const NetworkSpec& net, std::size_t gate) {
  const auto& g = net.gates.at(gate);
  if (g.unitary) return *g.unitary;
  const auto d = static_cast<int>(int_pow(static_cast<std::size_t>(net.site_dim), g.sites.size()));
  return haar_random_unitary(d, *g.haar_seed);
}

Labels all_ends(const NetworkSpec& net) {
  Labels out;
  for (int s = 0; s < net.width; ++s) out.push_back("p" + std::to_string(s));
  for (std::size_t g = 0; g < net.gates.size(); ++g) {
    for (std::size_t k = 0; k < net.gates[g].sites.size(); ++k) out.push_back(in_end(g, k));
    for (std::size_t k = 0; k < net.gates[g].sites.size(); ++k) out.push_back(out_end(g, k));
  }
  for (int s = 0; s < net.width; ++s) out.push_back("f" + std::to_string(s));
  return out;
}

bool end_on_side_a(const NetworkSpec& net, const std::string& end) {
  if (contains(net.region.side_a_ends, end)) return true;
  auto gate_in_a = [&](std::size_t g) {
    return std::find(net.region.side_a_gates.begin(), net.region.side_a_gates.end(), static_cast<int>(g)) !=
           net.region.side_a_gates.end();
  };
  if (auto g = gate_of_end(end)) return gate_in_a(*g);
  if (end.size() < 2 || (end[0] != 'p' && end[0] != 'f')) throw Error("unknown wire end '" + end + "'");
  const auto site = static_cast<std::size_t>(std::stoul(end.substr(1)));
  const auto history = site_histories(net);
  if (site >= history.size()) throw Error("unknown wire end '" + end + "'");
  if (history[site].empty()) return false;
  return gate_in_a(end[0] == 'p' ? history[site].front().gate : history[site].back().gate);
}

NetworkState global_state(const NetworkSpec& net) {
  check_network(net);
  const auto history = site_histories(net);
  const int d = net.site_dim;

  std::size_t cuts = 0;
  for (const auto& h : history) {
    for (std::size_t j = 1; j < h.size(); ++j) {
      if (end_on_side_a(net, out_end(h[j - 1].gate, h[j - 1].slot)) != end_on_side_a(net, in_end(h[j].gate, h[j].slot))) {
        ++cuts;
      }
    }
  }
  const std::size_t total = 2 * static_cast<std::size_t>(net.width) + 2 * cuts;
  if (total * std::log2(static_cast<double>(d)) > std::log2(static_cast<double>(kNetworkDimensionCap)) + 1e-12) {
    throw Error("network state exceeds the dimension cap of " + std::to_string(kNetworkDimensionCap));
  }

  NetworkState st;
  st.psi = Vector::Ones(1);
  std::vector<Labels> carrier_past(static_cast<std::size_t>(net.width));
  std::vector<std::size_t> position(static_cast<std::size_t>(net.width), 0);
  auto carrier = [](std::size_t s) { return "c" + std::to_string(s); };
  for (std::size_t s = 0; s < history.size(); ++s) {
    const std::string p = "p" + std::to_string(s);
    append_pair(st.systems, st.psi, p, carrier(s), d);
    st.input_ends.push_back(p);
    carrier_past[s] = {p};
  }
  for (std::size_t g : foliation_order(net)) {
    const auto& sites = net.gates[g].sites;
    Labels targets;
    Labels past;
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const auto s = static_cast<std::size_t>(sites[k]);
      const std::size_t j = position[s]++;
      if (j > 0) {
        const Touch prev = history[s][j - 1];
        const std::string producer = out_end(prev.gate, prev.slot);
        const std::string consumer = in_end(g, k);
        if (end_on_side_a(net, producer) != end_on_side_a(net, consumer)) {
          rename(st.systems, carrier(s), producer);
          st.output_ends.push_back(producer);
          st.past[producer] = carrier_past[s];
          append_pair(st.systems, st.psi, consumer, carrier(s), d);
          st.input_ends.push_back(consumer);
          carrier_past[s] = {consumer};
        }
      }
      targets.push_back(carrier(s));
      past = merged(past, carrier_past[s]);
    }
    apply_on(st.systems, st.psi, targets, gate_unitary(net, g));
    for (int s : sites) carrier_past[static_cast<std::size_t>(s)] = past;
  }
  for (std::size_t s = 0; s < history.size(); ++s) {
    const std::string f = "f" + std::to_string(s);
    rename(st.systems, carrier(s), f);
    st.output_ends.push_back(f);
    st.past[f] = carrier_past[s];
  }
  for (const auto& sys : st.systems) {
    if (end_on_side_a(net, sys.label)) st.side_a.push_back(sys.label);
  }
  return st;
}

LabeledOperator global_choi(const NetworkSpec& net) {
  const NetworkState st = global_state(net);
  return LabeledOperator::projector(st.systems, st.psi);
}

LabeledOperator reduced_operator(const NetworkState& state, const Labels& keep) {
  return reduce_pure_state(state.systems, state.psi, keep);
}

LabeledOperator reduced_operator(const NetworkSpec& net, const Labels& keep) {
  return reduced_operator(global_state(net), keep);
}

double region_coherent_information(const NetworkState& state) {
  return pure_state_entropy(state.systems, state.psi, state.side_a);
}

double region_coherent_information(const NetworkSpec& net) { return region_coherent_information(global_state(net)); }

double region_max_bits(const NetworkState& state) {
  double bits = 0.0;
  for (const auto& s : state.systems) {
    if (contains(state.side_a, s.label)) bits += std::log2(static_cast<double>(s.dim));
  }
  return bits;
}

bool causally_closed(const NetworkState& state, const Labels& keep) {
  for (const auto& x : keep) {
    auto it = state.past.find(x);
    if (it == state.past.end()) continue;
    for (const auto& y : keep) {
      if (contains(it->second, y)) return false;
    }
  }
  return true;
}

std::vector<OmegaCheck> exact_omega_checks(const NetworkState& state, double tol) {
  const std::size_t n = state.input_ends.size();
  if (n > 20) throw Error("too many input ends to enumerate");
  std::set<Labels> seen;
  std::vector<OmegaCheck> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Labels inputs;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) inputs.push_back(state.input_ends[i]);
    }
    Labels keep;
    for (const auto& s : state.systems) {
      if (contains(inputs, s.label)) {
        keep.push_back(s.label);
        continue;
      }
      auto it = state.past.find(s.label);
      if (it == state.past.end()) continue;
      const bool in_future =
          std::any_of(inputs.begin(), inputs.end(), [&](const std::string& y) { return contains(it->second, y); });
      if (!in_future) keep.push_back(s.label);
    }
    if (keep.empty() || !seen.insert(keep).second) continue;
    const LabeledOperator rho = reduced_operator(state, keep);
    const auto dim = static_cast<Eigen::Index>(rho.dim());
    const Matrix omega = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    OmegaCheck c;
    c.kept = keep;
    c.deviation = (rho.matrix() - omega).cwiseAbs().maxCoeff();
    c.passed = c.deviation <= tol;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::vector<std::vector<int>> brickwork_layout(int layers, int width) {
  if (layers < 1) throw Error("brickwork needs layers >= 1");
  if (width < 2 || width % 2 != 0) throw Error("brickwork width must be even and >= 2");
  std::vector<std::vector<int>> out;
  for (int l = 1; l <= layers; ++l) {
    for (int s = (l % 2 == 1 ? 0 : 1); s + 1 < width; s += 2) out.push_back({l, s, s + 1});
  }
  return out;
}

}  // namespace

NetworkSpec build_brickwork(int layers, int width, std::uint64_t seed) {
  NetworkSpec net;
  net.width = width;
  net.layers = layers;
  for (const auto& slot : brickwork_layout(layers, width)) {
    Gate g;
    g.layer = slot[0];
    g.sites = {slot[1], slot[2]};
    CounterRng rng(seed, net.gates.size());
    g.haar_seed = rng.next_u64();
    net.gates.push_back(std::move(g));
  }
  return net;
}

NetworkSpec build_brickwork(int layers, int width, const std::vector<Matrix>& unitaries) {
  NetworkSpec net;
  net.width = width;
  net.layers = layers;
  const auto layout = brickwork_layout(layers, width);
  if (unitaries.size() != layout.size()) {
    throw Error("brickwork needs " + std::to_string(layout.size()) + " unitaries, got " +
                std::to_string(unitaries.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    Gate g;
    g.layer = layout[i][0];
    g.sites = {layout[i][1], layout[i][2]};
    g.unitary = unitaries[i];
    net.gates.push_back(std::move(g));
  }
  check_network(net);
  return net;
}

NetworkSpec fig6_small(std::uint64_t seed) {
  NetworkSpec net = build_brickwork(2, 4, seed);
  net.region.side_a_ends = {"p0", "p1", "g1.out0", "g2.in0", "f2"};
  return net;
}

NetworkSpec reseeded(const NetworkSpec& net, std::uint64_t seed, std::uint64_t sample) {
  NetworkSpec out = net;
  const CounterRng base(seed, sample);
  for (std::size_t g = 0; g < out.gates.size(); ++g) {
    if (!out.gates[g].haar_seed) continue;
    CounterRng rng = base.substream(g);
    out.gates[g].haar_seed = rng.next_u64();
  }
  return out;
}

LabeledOperator gate_choi_state(const Matrix& u, int da, int db, int dc, int dd) {
  return unitary_choi_state(u, {{"a", da}, {"b", db}}, {{"c", dc}, {"d", dd}});
}

double gate_cut_ci(const Matrix& u, int da, int db, int dc, int dd, const Labels& target) {
  return coherent_information(gate_choi_state(u, da, db, dc, dd), target);
}

Matrix factorized_gate(const Matrix& h, const Matrix& g, bool swap) {
  const auto hr = h.rows();
  const auto hc = h.cols();
  const auto gr = g.rows();
  const auto gc = g.cols();
  Matrix u = Matrix::Zero(hr * gr, hc * gc);
  for (Eigen::Index i = 0; i < hc; ++i) {
    for (Eigen::Index j = 0; j < gc; ++j) {
      for (Eigen::Index x = 0; x < hr; ++x) {
        for (Eigen::Index y = 0; y < gr; ++y) {
          // Unswapped output (c, d) = (h out, g out); swapped (c, d) = (g out, h out).
          const Eigen::Index row = swap ? y * hr + x : x * gr + y;
          u(row, i * gc + j) = h(x, i) * g(y, j);
        }
      }
    }
  }
  return u;
}

}  // namespace causalproc
