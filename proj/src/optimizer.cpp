#include "causalproc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "causalproc/measures.hpp"
#include "causalproc/parallel.hpp"
#include "causalproc/rng.hpp"
#include "index_map.hpp"

namespace causalproc {

namespace {

constexpr double kLogFloor = 1e-15;
constexpr double kArmijo = 1e-4;

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) / 2.0; }

Matrix log2_floored(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  Eigen::VectorXd l = solver.eigenvalues();
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = std::log2(std::max(l(i), kLogFloor));
  return solver.eigenvectors() * l.asDiagonal() * solver.eigenvectors().adjoint();
}

double entropy_of(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return entropy_of_spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

Matrix apply_kraus(const KrausSet& kraus, const Matrix& rho) {
  Matrix out = Matrix::Zero(kraus.front().rows(), kraus.front().rows());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

Matrix complementary(const KrausSet& kraus, const Matrix& rho) {
  const auto n = static_cast<Eigen::Index>(kraus.size());
  Matrix out(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Matrix kr = kraus[k] * rho;
    for (Eigen::Index l = 0; l < n; ++l) out(k, l) = (kr * kraus[l].adjoint()).trace();
  }
  return out;
}

Matrix random_density(Eigen::Index d, CounterRng& rng) {
  Matrix g(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) g(r, c) = Complex(rng.normal(), rng.normal());
  }
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.conjugate()).sum().real(); }

struct RestartOutcome {
  double value = -std::numeric_limits<double>::infinity();
  Matrix rho;
  std::vector<double> params;
  int iterations = 0;
  bool converged = false;
};

std::size_t pick_winner(const std::vector<RestartOutcome>& outcomes) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    if (outcomes[i].value > outcomes[best].value) best = i;
  }
  return best;
}

RestartOutcome ascend_density(const KrausSet& kraus, Matrix rho, const OptimizerConfig& cfg) {
  RestartOutcome out;
  double f = channel_ci_objective(kraus, rho);
  double step = 1.0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    const Matrix g = channel_ci_gradient(kraus, rho);
    const double stationarity = (project_to_density(rho + g) - rho).norm();
    if (stationarity < cfg.gradient_tolerance) {
      out.converged = true;
      break;
    }
    if (cfg.step_rule == StepRule::Fixed) {
      rho = project_to_density(rho + 0.1 * g);
      f = channel_ci_objective(kraus, rho);
      continue;
    }
    double t = std::min(step * 2.0, 1e6);
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving, t /= 2.0) {
      const Matrix candidate = project_to_density(rho + t * g);
      const double fc = channel_ci_objective(kraus, candidate);
      if (fc >= f + kArmijo * inner(g, candidate - rho)) {
        accepted = fc >= f;
        if (accepted) {
          rho = candidate;
          f = fc;
          step = t;
        }
        break;
      }
    }
    if (!accepted) {
      // No ascent possible within double precision: the point is stationary
      // up to roundoff.
      out.converged = stationarity < std::sqrt(cfg.gradient_tolerance);
      break;
    }
  }
  out.rho = rho;
  out.value = channel_ci_objective(kraus, rho);
  return out;
}

// ---- local-operation families ----

struct OwnerLayout {
  std::string owner;
  std::vector<SystemId> inputs;
  std::vector<SystemId> outputs;
  std::size_t psi_offset = 0;
  std::size_t psi_count = 0;  // complex entries
  std::size_t channel_offset = 0;
  std::size_t channel_rows = 0;
  std::size_t channel_cols = 0;
};

std::vector<OwnerLayout> layout_of(const ProcessOperator& w, const LoFamily& family, std::size_t* total) {
  std::vector<OwnerLayout> out;
  std::size_t offset = 0;
  for (const auto& owner : w.owners()) {
    OwnerLayout l;
    l.owner = owner;
    for (const auto& t : w.teeth_of(owner)) {
      l.inputs.insert(l.inputs.end(), t.inputs.begin(), t.inputs.end());
      l.outputs.insert(l.outputs.end(), t.outputs.begin(), t.outputs.end());
    }
    const std::size_t dout = product_of_dims(l.outputs);
    if (family.feed_outputs && !l.outputs.empty()) {
      l.psi_offset = offset;
      l.psi_count = dout * dout;
      offset += 2 * l.psi_count;
    }
    const std::size_t din = product_of_dims(l.inputs);
    if (family.input_channel_rank >= 2 && !l.inputs.empty()) {
      l.channel_offset = offset;
      l.channel_rows = din * static_cast<std::size_t>(family.input_channel_rank);
      l.channel_cols = din;
      offset += 2 * l.channel_rows * l.channel_cols;
    }
    out.push_back(std::move(l));
  }
  if (total) *total = offset;
  return out;
}

Vector complex_block(const std::vector<double>& p, std::size_t offset, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = Complex(p[offset + 2 * i], p[offset + 2 * i + 1]);
  return v;
}

void store_block(std::vector<double>& p, std::size_t offset, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    p[offset + 2 * static_cast<std::size_t>(i)] = v(i).real();
    p[offset + 2 * static_cast<std::size_t>(i) + 1] = v(i).imag();
  }
}

/// Column-major flattening of G (rows x cols).
Matrix channel_isometry(const std::vector<double>& p, const OwnerLayout& l) {
  const Vector flat = complex_block(p, l.channel_offset, l.channel_rows * l.channel_cols);
  Matrix g = Eigen::Map<const Matrix>(flat.data(), static_cast<Eigen::Index>(l.channel_rows),
                                      static_cast<Eigen::Index>(l.channel_cols));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(g.adjoint() * g));
  Eigen::VectorXd s = solver.eigenvalues();
  if (s.minCoeff() <= 1e-14) throw Error("degenerate channel parameters");
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = 1.0 / std::sqrt(s(i));
  return g * solver.eigenvectors() * s.asDiagonal() * solver.eigenvectors().adjoint();
}

std::string ref_label(const std::string& owner) { return owner + ".ref"; }

std::vector<double> default_parameters(const std::vector<OwnerLayout>& layout, std::size_t total, int rank) {
  std::vector<double> p(total, 0.0);
  for (const auto& l : layout) {
    if (l.psi_count > 0) {
      const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(l.psi_count))));
      Vector psi = Vector::Zero(d * d);
      for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
      store_block(p, l.psi_offset, psi);
    }
    if (l.channel_rows > 0) {
      const auto rows = static_cast<Eigen::Index>(l.channel_rows);
      const auto cols = static_cast<Eigen::Index>(l.channel_cols);
      Matrix g = Matrix::Zero(rows, cols);
      // Equal-weight mixture of the identity over all Kraus slots keeps the
      // start away from the rank-deficient boundary.
      for (int k = 0; k < rank; ++k) g.block(k * cols, 0, cols, cols) = Matrix::Identity(cols, cols) / std::sqrt(rank * 1.0);
      store_block(p, l.channel_offset, Eigen::Map<const Vector>(g.data(), rows * cols));
    }
  }
  return p;
}

std::vector<double> random_parameters(std::size_t total, CounterRng& rng) {
  std::vector<double> p(total);
  for (auto& x : p) x = rng.normal();
  return p;
}

struct FamilyProblem {
  const ProcessOperator& w;
  LoFamily family;
  std::vector<OwnerLayout> layout;
  std::size_t total = 0;
  Labels target;
};

double family_objective(const FamilyProblem& prob, const std::vector<double>& p) {
  return coherent_information(lo_family_state(prob.w, prob.family, p), prob.target);
}

RestartOutcome ascend_parameters(const FamilyProblem& prob, std::vector<double> p, const OptimizerConfig& cfg) {
  RestartOutcome out;
  if (prob.total == 0) {
    out.value = family_objective(prob, p);
    out.params = p;
    out.converged = true;
    return out;
  }
  const double h = 1e-6;
  double f = family_objective(prob, p);
  double step = 1.0;
  int stalls = 0;
  std::vector<double> g(p.size());
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.iterations = it + 1;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double keep = p[i];
      p[i] = keep + h;
      const double up = family_objective(prob, p);
      p[i] = keep - h;
      const double down = family_objective(prob, p);
      p[i] = keep;
      g[i] = (up - down) / (2.0 * h);
      norm2 += g[i] * g[i];
    }
    if (std::sqrt(norm2) < cfg.gradient_tolerance) {
      out.converged = true;
      break;
    }
    double t = cfg.step_rule == StepRule::Fixed ? 0.05 : std::min(step * 2.0, 1e3);
    bool accepted = false;
    for (int halving = 0; halving < 50; ++halving, t /= 2.0) {
      std::vector<double> cand(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) cand[i] = p[i] + t * g[i];
      double fc = -std::numeric_limits<double>::infinity();
      try {
        fc = family_objective(prob, cand);
      } catch (const Error&) {
        continue;
      }
      if (fc >= f + kArmijo * t * norm2 || (cfg.step_rule == StepRule::Fixed && fc >= f)) {
        const double gain = fc - f;
        p = std::move(cand);
        f = fc;
        step = t;
        accepted = true;
        stalls = gain < 1e-13 ? stalls + 1 : 0;
        break;
      }
    }
    if (!accepted || stalls >= 20) {
      out.converged = std::sqrt(norm2) < std::sqrt(cfg.gradient_tolerance);
      break;
    }
  }
  out.params = p;
  out.value = family_objective(prob, p);
  return out;
}

Vector permute_vector(const std::vector<SystemId>& systems, const Vector& psi, const Labels& new_order) {
  const auto pos = detail::positions_of(systems, new_order);
  const auto map = detail::offsets_of(systems, pos);
  Vector out(psi.size());
  for (std::size_t i = 0; i < map.size(); ++i) out(static_cast<Eigen::Index>(i)) = psi(static_cast<Eigen::Index>(map[i]));
  return out;
}

/// Product warm start for the k-copy family from single-copy parameters.
std::vector<double> product_parameters(const ProcessOperator& single, const LoFamily& family_single,
                                       const std::vector<double>& p1, const ProcessOperator& merged,
                                       const LoFamily& family_k, int k) {
  std::size_t total1 = 0;
  std::size_t totalk = 0;
  const auto lay1 = layout_of(single, family_single, &total1);
  const auto layk = layout_of(merged, family_k, &totalk);
  std::vector<double> out(totalk, 0.0);
  for (const auto& lk : layk) {
    auto it = std::find_if(lay1.begin(), lay1.end(), [&](const OwnerLayout& l) { return l.owner == lk.owner; });
    if (it == lay1.end()) throw Error("warm start: owner '" + lk.owner + "' missing in the single copy");
    const OwnerLayout& l1 = *it;
    if (lk.psi_count > 0) {
      const Vector psi1 = complex_block(p1, l1.psi_offset, l1.psi_count);
      const int dout = static_cast<int>(product_of_dims(l1.outputs));
      std::vector<SystemId> systems;
      Vector psi = Vector::Ones(1);
      Labels refs;
      for (int c = 1; c <= k; ++c) {
        const std::string suffix = "_" + std::to_string(c);
        for (auto s : l1.outputs) {
          s.label += suffix;
          systems.push_back(s);
        }
        systems.push_back({"ref" + suffix, dout});
        refs.push_back("ref" + suffix);
        psi = Eigen::kroneckerProduct(psi, psi1).eval();
      }
      Labels order;
      for (const auto& s : lk.outputs) order.push_back(s.label);
      order.insert(order.end(), refs.begin(), refs.end());
      store_block(out, lk.psi_offset, permute_vector(systems, psi, order));
    }
    if (lk.channel_rows > 0) {
      const Matrix v1 = channel_isometry(p1, l1);
      const auto din1 = static_cast<Eigen::Index>(l1.channel_cols);
      const auto r1 = static_cast<Eigen::Index>(l1.channel_rows) / din1;
      // Kraus operators of the single copy, then their k-fold products.
      std::vector<Matrix> kraus1;
      for (Eigen::Index j = 0; j < r1; ++j) kraus1.push_back(v1.block(j * din1, 0, din1, din1));
      std::vector<Matrix> kraus{Matrix::Ones(1, 1)};
      for (int c = 0; c < k; ++c) {
        std::vector<Matrix> next;
        for (const auto& a : kraus) {
          for (const auto& b : kraus1) next.push_back(Eigen::kroneckerProduct(a, b).eval());
        }
        kraus = std::move(next);
      }
      std::vector<SystemId> systems;
      for (int c = 1; c <= k; ++c) {
        for (auto s : l1.inputs) {
          s.label += "_" + std::to_string(c);
          systems.push_back(s);
        }
      }
      Labels order;
      for (const auto& s : lk.inputs) order.push_back(s.label);
      const auto map = detail::offsets_of(systems, detail::positions_of(systems, order));
      const auto dk = static_cast<Eigen::Index>(lk.channel_cols);
      Matrix g = Matrix::Zero(static_cast<Eigen::Index>(lk.channel_rows), dk);
      for (std::size_t j = 0; j < kraus.size(); ++j) {
        for (Eigen::Index c = 0; c < dk; ++c) {
          for (Eigen::Index r = 0; r < dk; ++r) {
            g(static_cast<Eigen::Index>(j) * dk + r, c) =
                kraus[j](static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c]));
          }
        }
      }
      store_block(out, lk.channel_offset, Eigen::Map<const Vector>(g.data(), g.size()));
    }
  }
  return out;
}

/// Parameters of `smaller` re-expressed in a family with one more Kraus slot.
std::vector<double> embed_parameters(const ProcessOperator& w, const LoFamily& smaller, const LoFamily& larger,
                                     const std::vector<double>& p) {
  std::size_t ts = 0;
  std::size_t tl = 0;
  const auto ls = layout_of(w, smaller, &ts);
  const auto ll = layout_of(w, larger, &tl);
  std::vector<double> out(tl, 0.0);
  for (std::size_t o = 0; o < ll.size(); ++o) {
    if (ll[o].psi_count > 0) {
      store_block(out, ll[o].psi_offset, complex_block(p, ls[o].psi_offset, ls[o].psi_count));
    }
    if (ll[o].channel_rows > 0) {
      const auto d = static_cast<Eigen::Index>(ll[o].channel_cols);
      Matrix g = Matrix::Zero(static_cast<Eigen::Index>(ll[o].channel_rows), d);
      if (ls[o].channel_rows > 0) {
        g.topRows(static_cast<Eigen::Index>(ls[o].channel_rows)) = channel_isometry(p, ls[o]);
      } else {
        g.topRows(d) = Matrix::Identity(d, d);
      }
      store_block(out, ll[o].channel_offset, Eigen::Map<const Vector>(g.data(), g.size()));
    }
  }
  return out;
}

}  // namespace

void check_config(const OptimizerConfig& cfg) {
  if (cfg.restarts < 1) throw Error("optimizer: restarts must be >= 1");
  if (cfg.max_iterations < 1) throw Error("optimizer: max_iterations must be >= 1");
  if (!(cfg.gradient_tolerance > 0.0)) throw Error("optimizer: gradient_tolerance must be > 0");
}

double channel_ci_objective(const KrausSet& kraus, const Matrix& rho) {
  return entropy_of(apply_kraus(kraus, rho)) - entropy_of(complementary(kraus, rho));
}

Matrix channel_ci_gradient(const KrausSet& kraus, const Matrix& rho) {
  const Matrix l1 = log2_floored(apply_kraus(kraus, rho));
  const Matrix l2 = log2_floored(complementary(kraus, rho));
  const auto din = kraus.front().cols();
  Matrix g = Matrix::Zero(din, din);
  for (const auto& k : kraus) g -= k.adjoint() * l1 * k;
  const auto n = static_cast<Eigen::Index>(kraus.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = 0; l < n; ++l) g += l2(l, k) * kraus[l].adjoint() * kraus[k];
  }
  return hermitian_part(g);
}

double channel_ci_via_purification(const QuantumMap& m, const Matrix& rho) {
  const QuantumMap s = to_standard(m);
  const auto d = static_cast<Eigen::Index>(s.input_dim());
  if (rho.rows() != d) throw Error("input state dimension does not match the channel");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(rho));
  Vector psi = Vector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double lambda = std::max(solver.eigenvalues()(k), 0.0);
    for (Eigen::Index i = 0; i < d; ++i) psi(i * d + k) += std::sqrt(lambda) * solver.eigenvectors()(i, k);
  }
  std::vector<SystemId> systems = s.inputs();
  const std::string ref = "purification.ref";
  systems.push_back({ref, static_cast<int>(d)});
  const LabeledOperator out = apply_map(s, LabeledOperator::projector(systems, psi / psi.norm()));
  return coherent_information(out, s.output_labels());
}

Matrix project_to_density(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
  const Eigen::VectorXd& v = solver.eigenvalues();
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd lambda(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) lambda(i) = std::max(v(i) - theta, 0.0);
  return solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().adjoint();
}

OptimizationResult channel_coherent_information(const QuantumMap& m, const OptimizerConfig& cfg) {
  check_config(cfg);
  const QuantumMap s = to_standard(m);
  const double tp = s.trace_preservation_deviation();
  if (tp > 1e-9) {
    std::ostringstream msg;
    msg << "channel_coherent_information: map is not trace preserving (deviation " << tp << ")";
    throw Error(msg.str());
  }
  const KrausSet kraus = kraus_of(s);
  const auto d = static_cast<Eigen::Index>(s.input_dim());
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) {
    CounterRng rng(cfg.seed, r);
    outcomes[r] = ascend_density(kraus, random_density(d, rng), cfg);
  });
  const std::size_t best = pick_winner(outcomes);
  OptimizationResult res;
  res.argument = LabeledOperator(s.inputs(), outcomes[best].rho);
  res.value_bits = channel_ci_objective(kraus, outcomes[best].rho);
  res.iterations_used = outcomes[best].iterations;
  res.converged = outcomes[best].converged;
  for (const auto& o : outcomes) res.restart_values.push_back(o.value);
  res.family = "density matrices on the channel input";
  return res;
}

std::string LoFamily::describe() const {
  std::ostringstream out;
  out << (feed_outputs ? "pure states with reference on party outputs" : "maximally mixed party outputs");
  if (input_channel_rank >= 2) out << "; rank-" << input_channel_rank << " channels on party inputs";
  return out.str();
}

std::size_t lo_parameter_count(const ProcessOperator& w, const LoFamily& family) {
  std::size_t total = 0;
  layout_of(w, family, &total);
  return total;
}

Labels lo_target_systems(const ProcessOperator& w, const LoFamily& family, const std::string& owner) {
  const auto layout = layout_of(w, family, nullptr);
  for (const auto& l : layout) {
    if (l.owner != owner) continue;
    Labels out;
    for (const auto& s : l.inputs) out.push_back(s.label);
    if (l.psi_count > 0) out.push_back(ref_label(owner));
    if (out.empty()) throw Error("target owner '" + owner + "' holds no systems after the local operations");
    return out;
  }
  throw Error("unknown target owner '" + owner + "'");
}

LabeledOperator lo_family_state(const ProcessOperator& w, const LoFamily& family,
                                const std::vector<double>& parameters) {
  std::size_t total = 0;
  const auto layout = layout_of(w, family, &total);
  if (parameters.size() != total) throw Error("family parameter vector has the wrong length");
  std::size_t final_dim = 1;
  for (const auto& l : layout) {
    final_dim *= product_of_dims(l.inputs);
    if (l.psi_count > 0) final_dim *= product_of_dims(l.outputs);
  }
  if (final_dim > kFamilyDimensionCap) {
    throw Error("family output dimension " + std::to_string(final_dim) + " exceeds the cap of " +
                std::to_string(kFamilyDimensionCap));
  }
  LabeledOperator state = w.op();
  for (const auto& l : layout) {
    if (l.outputs.empty()) continue;
    Labels outs;
    for (const auto& s : l.outputs) outs.push_back(s.label);
    if (l.psi_count == 0) {
      state = partial_trace(state, outs);
      continue;
    }
    Vector psi = complex_block(parameters, l.psi_offset, l.psi_count);
    const double norm = psi.norm();
    if (norm <= 1e-12) throw Error("degenerate state parameters");
    psi /= norm;
    std::vector<SystemId> systems = l.outputs;
    systems.push_back({ref_label(l.owner), static_cast<int>(product_of_dims(l.outputs))});
    state = link_operators(state, LabeledOperator::projector(systems, psi))
                .scaled(static_cast<double>(product_of_dims(l.outputs)));
  }
  for (const auto& l : layout) {
    if (l.channel_rows == 0) continue;
    const Matrix v = channel_isometry(parameters, l);
    Labels order;
    for (const auto& s : l.inputs) order.push_back(s.label);
    for (const auto& s : state.systems()) {
      if (std::find(order.begin(), order.end(), s.label) == order.end()) order.push_back(s.label);
    }
    const LabeledOperator aligned = permute_systems(state, order);
    const auto din = static_cast<Eigen::Index>(l.channel_cols);
    const auto rest = static_cast<Eigen::Index>(aligned.dim()) / din;
    const Matrix id = Matrix::Identity(rest, rest);
    Matrix acc = Matrix::Zero(aligned.matrix().rows(), aligned.matrix().cols());
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(l.channel_rows) / din; ++j) {
      const Matrix k = Eigen::kroneckerProduct(Matrix(v.block(j * din, 0, din, din)), id).eval();
      acc += k * aligned.matrix() * k.adjoint();
    }
    state = LabeledOperator(aligned.systems(), std::move(acc));
  }
  const double tr = state.trace().real();
  if (std::abs(tr - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "family output has trace " << tr << "; the process does not look valid";
    throw Error(msg.str());
  }
  return state.scaled(1.0 / tr);
}

OptimizationResult lo_optimized_ci(const ProcessOperator& w, const std::string& target_owner,
                                   const LoFamily& family, const OptimizerConfig& cfg,
                                   const std::vector<std::vector<double>>& warm_starts) {
  check_config(cfg);
  if (family.input_channel_rank < 1) throw Error("input_channel_rank must be >= 1");
  FamilyProblem prob{w, family, {}, 0, {}};
  prob.layout = layout_of(w, family, &prob.total);
  prob.target = lo_target_systems(w, family, target_owner);

  std::vector<std::vector<double>> starts = warm_starts;
  for (const auto& s : starts) {
    if (s.size() != prob.total) throw Error("warm start has the wrong length");
  }
  if (warm_starts.empty() && family.input_channel_rank >= 2) {
    LoFamily smaller = family;
    smaller.input_channel_rank = family.input_channel_rank - 1;
    const auto prev = lo_optimized_ci(w, target_owner, smaller, cfg);
    starts.push_back(embed_parameters(w, smaller, family, prev.parameters));
  }
  const std::size_t warm = starts.size();
  const std::size_t count = warm + static_cast<std::size_t>(prob.total == 0 ? 1 : cfg.restarts);
  std::vector<RestartOutcome> outcomes(count);
  parallel_for(count, cfg.threads, [&](std::size_t r) {
    std::vector<double> start;
    if (r < warm) {
      start = starts[r];
    } else if (r == warm) {
      start = default_parameters(prob.layout, prob.total, family.input_channel_rank);
    } else {
      CounterRng rng(cfg.seed, r);
      start = random_parameters(prob.total, rng);
    }
    outcomes[r] = ascend_parameters(prob, std::move(start), cfg);
  });
  const std::size_t best = pick_winner(outcomes);
  OptimizationResult res;
  res.parameters = outcomes[best].params;
  res.argument = lo_family_state(w, family, res.parameters);
  res.target = prob.target;
  res.value_bits = coherent_information(*res.argument, prob.target);
  res.iterations_used = outcomes[best].iterations;
  res.converged = outcomes[best].converged;
  for (const auto& o : outcomes) res.restart_values.push_back(o.value);
  res.family = family.describe();
  return res;
}

OptimizationResult regularized_ci_estimate(const ProcessOperator& w, const std::string& target_owner, int k,
                                           const LoFamily& family, const OptimizerConfig& cfg) {
  if (k < 1 || k > 3) throw Error("regularized_ci_estimate: k must be in 1..3");
  OptimizationResult single = lo_optimized_ci(w, target_owner, family, cfg);
  if (k == 1) return single;
  std::vector<PartyGroup> groups;
  for (const auto& owner : w.owners()) {
    PartyGroup g{owner, {}};
    for (int c = 1; c <= k; ++c) g.members.push_back(owner + "_" + std::to_string(c));
    groups.push_back(std::move(g));
  }
  const ProcessOperator merged = merge_parties(tensor_power(w, k), groups);
  LoFamily family_k = family;
  if (family.input_channel_rank >= 2) {
    family_k.input_channel_rank = static_cast<int>(std::lround(std::pow(family.input_channel_rank, k)));
  }
  const auto warm = product_parameters(w, family, single.parameters, merged, family_k, k);
  OptimizationResult res = lo_optimized_ci(merged, target_owner, family_k, cfg, {warm});
  res.value_bits /= k;
  for (auto& v : res.restart_values) v /= k;
  res.family = family_k.describe() + "; " + std::to_string(k) + " copies";
  return res;
}

double hashing_lower_bound(const LabeledOperator& rho, const Labels& target) {
  return std::max(0.0, coherent_information(rho, target));
}

double entanglement_generation_bound(const ProcessOperator& w, const std::string& target_owner, int k,
                                     const LoFamily& family, const OptimizerConfig& cfg) {
  double best = 0.0;
  for (int j = 1; j <= k; ++j) {
    const auto res = regularized_ci_estimate(w, target_owner, j, family, cfg);
    best = std::max(best, hashing_lower_bound(*res.argument, res.target) / j);
  }
  return best;
}

}  // namespace causalproc
