#include "causalproc/choi.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "index_map.hpp"

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

const SystemId* find_system(const std::vector<SystemId>& systems, const std::string& label) {
  for (const auto& s : systems) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << what << ": parameter p = " << p << " outside [0, 1]";
    throw Error(msg.str());
  }
}

void check_dim(int d, const char* what) {
  if (d < 1) throw Error(std::string(what) + ": dimension must be >= 1, got " + std::to_string(d));
}

}  // namespace

QuantumMap::QuantumMap(LabeledOperator choi, std::vector<SystemId> inputs, std::vector<SystemId> outputs,
                       Normalization normalization, std::optional<KrausSet> kraus, std::vector<Tooth> teeth)
    : choi_(std::move(choi)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      normalization_(normalization),
      kraus_(std::move(kraus)),
      teeth_(std::move(teeth)) {
  std::vector<SystemId> expected = outputs_;
  expected.insert(expected.end(), inputs_.begin(), inputs_.end());
  if (choi_.systems() != expected) {
    if (choi_.systems().size() != expected.size()) {
      throw Error("Choi operator systems do not match declared inputs and outputs");
    }
    choi_ = permute_systems(choi_, labels_of(expected));
    if (choi_.systems() != expected) throw Error("Choi operator dimensions disagree with declared systems");
  }
  if (kraus_) {
    for (const auto& k : *kraus_) {
      if (static_cast<std::size_t>(k.rows()) != output_dim() || static_cast<std::size_t>(k.cols()) != input_dim()) {
        throw Error("Kraus operator shape does not match declared dimensions");
      }
    }
  }
  if (!teeth_.empty()) {
    Labels seen_in;
    Labels seen_out;
    for (const auto& t : teeth_) {
      for (const auto& l : t.inputs) {
        if (!find_system(inputs_, l)) throw Error("tooth input '" + l + "' is not a map input");
        seen_in.push_back(l);
      }
      for (const auto& l : t.outputs) {
        if (!find_system(outputs_, l)) throw Error("tooth output '" + l + "' is not a map output");
        seen_out.push_back(l);
      }
    }
    if (seen_in.size() != inputs_.size() || seen_out.size() != outputs_.size() ||
        std::set<std::string>(seen_in.begin(), seen_in.end()).size() != inputs_.size() ||
        std::set<std::string>(seen_out.begin(), seen_out.end()).size() != outputs_.size()) {
      throw Error("teeth must partition the map's inputs and outputs");
    }
  }
}

Labels QuantumMap::input_labels() const { return labels_of(inputs_); }
Labels QuantumMap::output_labels() const { return labels_of(outputs_); }

std::vector<Tooth> QuantumMap::effective_teeth() const {
  if (!teeth_.empty()) return teeth_;
  return {Tooth{input_labels(), output_labels()}};
}

double QuantumMap::min_choi_eigenvalue() const { return eigvals_hermitian(choi_).front(); }

double QuantumMap::trace_preservation_deviation() const {
  const QuantumMap std_map = to_standard(*this);
  const auto reduced = partial_trace(std_map.choi(), output_labels());
  return frobenius_distance(reduced, LabeledOperator::identity(inputs_));
}

QuantumMap QuantumMap::with_teeth(std::vector<Tooth> teeth) const {
  return QuantumMap(choi_, inputs_, outputs_, normalization_, kraus_, std::move(teeth));
}

QuantumMap choi_from_kraus(const KrausSet& kraus, std::vector<SystemId> inputs, std::vector<SystemId> outputs) {
  const auto din = static_cast<Eigen::Index>(product_of_dims(inputs));
  const auto dout = static_cast<Eigen::Index>(product_of_dims(outputs));
  if (kraus.empty()) throw Error("choi_from_kraus: empty Kraus set");
  Matrix c = Matrix::Zero(din * dout, din * dout);
  for (const auto& k : kraus) {
    if (k.rows() != dout || k.cols() != din) {
      std::ostringstream msg;
      msg << "choi_from_kraus: Kraus operator is " << k.rows() << "x" << k.cols() << ", expected " << dout << "x"
          << din;
      throw Error(msg.str());
    }
    Vector w(din * dout);
    for (Eigen::Index o = 0; o < dout; ++o) {
      for (Eigen::Index i = 0; i < din; ++i) w(o * din + i) = k(o, i);
    }
    c += w * w.adjoint();
  }
  std::vector<SystemId> systems = outputs;
  systems.insert(systems.end(), inputs.begin(), inputs.end());
  return QuantumMap(LabeledOperator(std::move(systems), std::move(c)), std::move(inputs), std::move(outputs),
                    Normalization::StandardChoi, kraus);
}

KrausSet kraus_from_choi(const QuantumMap& m, double eigen_cutoff) {
  const QuantumMap s = to_standard(m);
  const Matrix& c = s.choi().matrix();
  if (hermiticity_deviation(c) > kHermiticityTolerance) throw Error("kraus_from_choi: Choi operator not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((c + c.adjoint()) / 2.0);
  const auto din = static_cast<Eigen::Index>(s.input_dim());
  const auto dout = static_cast<Eigen::Index>(s.output_dim());
  const double top = std::max(solver.eigenvalues().maxCoeff(), 0.0);
  KrausSet out;
  for (Eigen::Index k = solver.eigenvalues().size(); k-- > 0;) {
    const double lambda = solver.eigenvalues()(k);
    if (lambda < -1e-9 * std::max(top, 1.0)) throw Error("kraus_from_choi: map is not completely positive");
    if (lambda <= eigen_cutoff * std::max(top, 1.0)) continue;
    Matrix kr(dout, din);
    for (Eigen::Index o = 0; o < dout; ++o) {
      for (Eigen::Index i = 0; i < din; ++i) kr(o, i) = std::sqrt(lambda) * solver.eigenvectors()(o * din + i, k);
    }
    out.push_back(std::move(kr));
  }
  if (out.empty()) throw Error("kraus_from_choi: map is zero");
  return out;
}

KrausSet kraus_of(const QuantumMap& m) {
  if (m.kraus() && m.normalization() == Normalization::StandardChoi) return *m.kraus();
  return kraus_from_choi(m);
}

QuantumMap to_paper_normalization(const QuantumMap& m) {
  if (m.normalization() == Normalization::PaperNormalized) return m;
  const double factor = static_cast<double>(m.output_dim());
  return QuantumMap(m.choi().scaled(factor), m.inputs(), m.outputs(), Normalization::PaperNormalized, m.kraus(),
                    m.teeth());
}

QuantumMap to_standard(const QuantumMap& m) {
  if (m.normalization() == Normalization::StandardChoi) return m;
  const double factor = 1.0 / static_cast<double>(m.output_dim());
  return QuantumMap(m.choi().scaled(factor), m.inputs(), m.outputs(), Normalization::StandardChoi, m.kraus(),
                    m.teeth());
}

QuantumMap relabel_map(const QuantumMap& m, const std::vector<std::pair<std::string, std::string>>& renames) {
  auto rename = [&](const std::string& l) {
    for (const auto& [from, to] : renames) {
      if (from == l) return to;
    }
    return l;
  };
  auto systems = [&](std::vector<SystemId> v) {
    for (auto& s : v) s.label = rename(s.label);
    return v;
  };
  std::vector<std::pair<std::string, std::string>> present;
  for (const auto& r : renames) {
    if (m.choi().has(r.first)) present.push_back(r);
  }
  std::vector<Tooth> teeth = m.teeth();
  for (auto& t : teeth) {
    for (auto& l : t.inputs) l = rename(l);
    for (auto& l : t.outputs) l = rename(l);
  }
  return QuantumMap(m.choi().relabeled(present), systems(m.inputs()), systems(m.outputs()), m.normalization(),
                    m.kraus(), std::move(teeth));
}

LabeledOperator link_operators(const LabeledOperator& a, const LabeledOperator& b) {
  std::vector<std::size_t> a_shared;
  std::vector<std::size_t> b_shared;
  for (std::size_t i = 0; i < a.systems().size(); ++i) {
    const auto& s = a.systems()[i];
    for (std::size_t j = 0; j < b.systems().size(); ++j) {
      if (b.systems()[j].label != s.label) continue;
      if (b.systems()[j].dim != s.dim) {
        throw Error("link: shared system '" + s.label + "' has dimension " + std::to_string(s.dim) + " vs " +
                    std::to_string(b.systems()[j].dim));
      }
      a_shared.push_back(i);
      b_shared.push_back(j);
    }
  }
  const auto a_rest = detail::complement_positions(a.systems().size(), a_shared);
  const auto b_rest = detail::complement_positions(b.systems().size(), b_shared);
  const auto fa = detail::offsets_of(a.systems(), a_rest);
  const auto ga = detail::offsets_of(a.systems(), a_shared);
  const auto fb = detail::offsets_of(b.systems(), b_rest);
  const auto gb = detail::offsets_of(b.systems(), b_shared);
  const auto da = static_cast<Eigen::Index>(fa.size());
  const auto db = static_cast<Eigen::Index>(fb.size());
  const auto ds = static_cast<Eigen::Index>(ga.size());

  // C[(a,b),(a',b')] = sum_{u,v} A[(a,u),(a',v)] B[(u,b),(v,b')]
  Matrix x(da * da, ds * ds);
  for (Eigen::Index v = 0; v < ds; ++v) {
    for (Eigen::Index u = 0; u < ds; ++u) {
      for (Eigen::Index ap = 0; ap < da; ++ap) {
        for (Eigen::Index ar = 0; ar < da; ++ar) {
          x(ar * da + ap, u * ds + v) = a.matrix()(static_cast<Eigen::Index>(fa[ar] + ga[u]),
                                                   static_cast<Eigen::Index>(fa[ap] + ga[v]));
        }
      }
    }
  }
  Matrix y(ds * ds, db * db);
  for (Eigen::Index bp = 0; bp < db; ++bp) {
    for (Eigen::Index br = 0; br < db; ++br) {
      for (Eigen::Index v = 0; v < ds; ++v) {
        for (Eigen::Index u = 0; u < ds; ++u) {
          y(u * ds + v, br * db + bp) = b.matrix()(static_cast<Eigen::Index>(gb[u] + fb[br]),
                                                   static_cast<Eigen::Index>(gb[v] + fb[bp]));
        }
      }
    }
  }
  const Matrix z = x * y;
  Matrix c(da * db, da * db);
  for (Eigen::Index bp = 0; bp < db; ++bp) {
    for (Eigen::Index ap = 0; ap < da; ++ap) {
      for (Eigen::Index br = 0; br < db; ++br) {
        for (Eigen::Index ar = 0; ar < da; ++ar) {
          c(ar * db + br, ap * db + bp) = z(ar * da + ap, br * db + bp);
        }
      }
    }
  }
  std::vector<SystemId> systems;
  for (auto p : a_rest) systems.push_back(a.systems()[p]);
  for (auto p : b_rest) {
    if (a.has(b.systems()[p].label)) throw Error("link: label '" + b.systems()[p].label + "' duplicated");
    systems.push_back(b.systems()[p]);
  }
  return {std::move(systems), std::move(c)};
}

LabeledOperator apply_map(const QuantumMap& m, const LabeledOperator& rho) {
  if (m.normalization() != Normalization::StandardChoi) throw Error("apply_map expects a StandardChoi map");
  for (const auto& s : m.inputs()) {
    if (!rho.has(s.label)) throw Error("apply_map: state lacks input system '" + s.label + "'");
    if (rho.system(s.label).dim != s.dim) throw Error("apply_map: dimension mismatch on '" + s.label + "'");
  }
  for (const auto& s : m.outputs()) {
    if (rho.has(s.label)) throw Error("apply_map: output label '" + s.label + "' already present in the state");
  }
  return link_operators(rho, m.choi());
}

QuantumMap link_product(const QuantumMap& a, const QuantumMap& b) {
  if (a.normalization() != Normalization::StandardChoi || b.normalization() != Normalization::StandardChoi) {
    throw Error("link_product composes StandardChoi maps only");
  }
  const Labels ai = a.input_labels();
  const Labels ao = a.output_labels();
  const Labels bi = b.input_labels();
  const Labels bo = b.output_labels();
  Labels forward;   // a -> b
  Labels backward;  // b -> a
  for (const auto& l : ao) {
    if (contains(bi, l)) forward.push_back(l);
    if (contains(bo, l)) throw Error("link_product: output '" + l + "' produced by both maps");
  }
  for (const auto& l : ai) {
    if (contains(bo, l)) backward.push_back(l);
    if (contains(bi, l)) throw Error("link_product: input '" + l + "' consumed by both maps");
  }
  if (!forward.empty() && !backward.empty()) {
    throw Error("link_product: cyclic composition requested (maps feed each other)");
  }
  const QuantumMap& first = backward.empty() ? a : b;
  const QuantumMap& second = backward.empty() ? b : a;
  const Labels& shared = backward.empty() ? forward : backward;

  std::vector<SystemId> inputs;
  std::vector<SystemId> outputs;
  for (const auto& s : first.inputs()) inputs.push_back(s);
  for (const auto& s : second.inputs()) {
    if (!contains(shared, s.label)) inputs.push_back(s);
  }
  for (const auto& s : first.outputs()) {
    if (!contains(shared, s.label)) outputs.push_back(s);
  }
  for (const auto& s : second.outputs()) outputs.push_back(s);
  for (const auto& l : shared) {
    if (find_system(first.outputs(), l)->dim != find_system(second.inputs(), l)->dim) {
      throw Error("link_product: dimension mismatch on shared system '" + l + "'");
    }
  }
  LabeledOperator c = link_operators(first.choi(), second.choi());
  return QuantumMap(std::move(c), std::move(inputs), std::move(outputs));
}

Matrix haar_random_unitary(int d, CounterRng& rng) {
  check_dim(d, "haar_random_unitary");
  Matrix g(d, d);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re, im) * scale;
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& packed = qr.matrixQR();
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex rkk = packed(k, k);
    const double mag = std::abs(rkk);
    q.col(k) *= mag > 0.0 ? rkk / mag : Complex(1.0);
  }
  return q;
}

Matrix haar_random_unitary(int d, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  return haar_random_unitary(d, rng);
}

QuantumMap memory_channel(const QuantumMap& first, const QuantumMap& second, const std::string& memory_label) {
  const SystemId* out = find_system(first.outputs(), memory_label);
  const SystemId* in = find_system(second.inputs(), memory_label);
  if (!out) throw Error("memory_channel: first map has no output '" + memory_label + "'");
  if (!in) throw Error("memory_channel: second map has no input '" + memory_label + "'");
  if (out->dim != in->dim) throw Error("memory_channel: memory '" + memory_label + "' dimension mismatch");
  for (const auto& s : first.outputs()) {
    if (s.label != memory_label && find_system(second.inputs(), s.label)) {
      throw Error("memory_channel: extra shared system '" + s.label + "'");
    }
  }
  for (const auto& s : second.outputs()) {
    if (find_system(first.inputs(), s.label)) throw Error("memory_channel: second map feeds back into the first");
  }
  QuantumMap joined = link_product(to_standard(first), to_standard(second));
  Tooth t1{first.input_labels(), {}};
  for (const auto& l : first.output_labels()) {
    if (l != memory_label) t1.outputs.push_back(l);
  }
  Tooth t2{{}, second.output_labels()};
  for (const auto& l : second.input_labels()) {
    if (l != memory_label) t2.inputs.push_back(l);
  }
  return joined.with_teeth({t1, t2});
}

double comb_causality_deviation(const QuantumMap& comb) {
  const QuantumMap s = to_standard(comb);
  const auto teeth = s.effective_teeth();
  LabeledOperator current = s.choi();
  double worst = 0.0;
  for (std::size_t k = teeth.size(); k-- > 0;) {
    const auto reduced = partial_trace(current, teeth[k].outputs);
    const auto in_systems = reduced.systems_for(teeth[k].inputs);
    const double din = static_cast<double>(product_of_dims(in_systems));
    const auto previous = partial_trace(reduced, teeth[k].inputs).scaled(1.0 / din);
    const auto rebuilt = tensor(previous, LabeledOperator::identity(in_systems));
    worst = std::max(worst, frobenius_distance(reduced, rebuilt));
    current = previous;
  }
  worst = std::max(worst, std::abs(current.trace() - Complex(1.0)));
  return worst;
}

QuantumMap identity_channel(int d, const std::string& in, const std::string& out) {
  check_dim(d, "identity_channel");
  return unitary_channel(Matrix::Identity(d, d), in, out);
}

QuantumMap unitary_channel(const Matrix& u, std::vector<SystemId> inputs, std::vector<SystemId> outputs) {
  if (u.rows() != u.cols()) throw Error("unitary_channel: matrix is not square");
  const double dev = (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
  if (dev > 1e-9) {
    std::ostringstream msg;
    msg << "unitary_channel: ||U^dagger U - I|| = " << dev;
    throw Error(msg.str());
  }
  return choi_from_kraus({u}, std::move(inputs), std::move(outputs));
}

QuantumMap unitary_channel(const Matrix& u, const std::string& in, const std::string& out) {
  const int d = static_cast<int>(u.rows());
  return unitary_channel(u, {{in, d}}, {{out, d}});
}

QuantumMap depolarizing(double p, int d, const std::string& in, const std::string& out) {
  check_probability(p, "depolarizing");
  check_dim(d, "depolarizing");
  const double dd = static_cast<double>(d) * d;
  const Complex w = std::polar(1.0, 2.0 * M_PI / d);
  KrausSet kraus;
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double weight = (a == 0 && b == 0) ? 1.0 - p + p / dd : p / dd;
      if (weight <= 0.0) continue;
      Matrix k = Matrix::Zero(d, d);
      for (int j = 0; j < d; ++j) k((j + a) % d, j) = std::pow(w, static_cast<double>(b * j));
      kraus.push_back(std::sqrt(weight) * k);
    }
  }
  return choi_from_kraus(kraus, {{in, d}}, {{out, d}});
}

QuantumMap erasure(double p, int d, const std::string& in, const std::string& out) {
  check_probability(p, "erasure");
  check_dim(d, "erasure");
  KrausSet kraus;
  if (p < 1.0) {
    Matrix k = Matrix::Zero(d + 1, d);
    k.topRows(d) = Matrix::Identity(d, d) * std::sqrt(1.0 - p);
    kraus.push_back(std::move(k));
  }
  if (p > 0.0) {
    for (int i = 0; i < d; ++i) {
      Matrix k = Matrix::Zero(d + 1, d);
      k(d, i) = std::sqrt(p);
      kraus.push_back(std::move(k));
    }
  }
  return choi_from_kraus(kraus, {{in, d}}, {{out, d + 1}});
}

QuantumMap dephasing(double p, int d, const std::string& in, const std::string& out) {
  check_probability(p, "dephasing");
  check_dim(d, "dephasing");
  KrausSet kraus;
  if (p < 1.0) kraus.push_back(Matrix::Identity(d, d) * std::sqrt(1.0 - p));
  if (p > 0.0) {
    for (int i = 0; i < d; ++i) {
      Matrix k = Matrix::Zero(d, d);
      k(i, i) = std::sqrt(p);
      kraus.push_back(std::move(k));
    }
  }
  return choi_from_kraus(kraus, {{in, d}}, {{out, d}});
}

QuantumMap classical_copy(int d, const std::string& in, const std::string& out, const std::string& copy) {
  check_dim(d, "classical_copy");
  KrausSet kraus;
  for (int i = 0; i < d; ++i) {
    Matrix k = Matrix::Zero(d * d, d);
    k(i * d + i, i) = 1.0;
    kraus.push_back(std::move(k));
  }
  return choi_from_kraus(kraus, {{in, d}}, {{out, d}, {copy, d}});
}

QuantumMap replacement_channel(const LabeledOperator& state, std::vector<SystemId> inputs) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver((state.matrix() + state.matrix().adjoint()) / 2.0);
  const auto din = static_cast<Eigen::Index>(product_of_dims(inputs));
  KrausSet kraus;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double lambda = solver.eigenvalues()(k);
    if (lambda < -1e-9) throw Error("replacement_channel: state is not positive semidefinite");
    if (lambda <= 1e-15) continue;
    for (Eigen::Index i = 0; i < din; ++i) {
      Matrix kr = Matrix::Zero(solver.eigenvectors().rows(), din);
      kr.col(i) = std::sqrt(lambda) * solver.eigenvectors().col(k);
      kraus.push_back(std::move(kr));
    }
  }
  if (kraus.empty()) throw Error("replacement_channel: zero state");
  return choi_from_kraus(kraus, std::move(inputs), state.systems());
}

LabeledOperator unitary_choi_state(const Matrix& u, std::vector<SystemId> inputs, std::vector<SystemId> outputs) {
  const double din = static_cast<double>(product_of_dims(inputs));
  return unitary_channel(u, std::move(inputs), std::move(outputs)).choi().scaled(1.0 / din);
}

}  // namespace causalproc
