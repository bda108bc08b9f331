#include "causalproc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "index_map.hpp"

namespace causalproc {

namespace {

void check_state(const LabeledOperator& rho) {
  const double dev = std::abs(rho.trace() - Complex(1.0));
  if (dev > 1e-9) {
    std::ostringstream msg;
    msg << "entropy: trace deviates from 1 by " << dev;
    throw Error(msg.str());
  }
}

}  // namespace

void check_bipartition(const LabeledOperator& rho, const Bipartition& cut) {
  std::set<std::string> a(cut.side_a.begin(), cut.side_a.end());
  std::set<std::string> b(cut.side_b.begin(), cut.side_b.end());
  for (const auto& l : a) {
    if (b.count(l)) throw Error("bipartition: system '" + l + "' on both sides");
  }
  if (a.size() + b.size() != rho.systems().size()) throw Error("bipartition does not cover the operator");
  for (const auto& s : rho.systems()) {
    if (!a.count(s.label) && !b.count(s.label)) throw Error("bipartition misses system '" + s.label + "'");
  }
  if (cut.target.empty()) throw Error("bipartition: empty target");
  const bool in_a = std::all_of(cut.target.begin(), cut.target.end(), [&](const auto& l) { return a.count(l) > 0; });
  const bool in_b = std::all_of(cut.target.begin(), cut.target.end(), [&](const auto& l) { return b.count(l) > 0; });
  if (!in_a && !in_b) throw Error("bipartition: target straddles both sides");
}

double entropy_of_spectrum(const std::vector<double>& eigenvalues) {
  double s = 0.0;
  for (double lambda : eigenvalues) {
    if (lambda < -kEigenClampNegative) {
      std::ostringstream msg;
      msg << "entropy: negative eigenvalue " << lambda;
      throw Error(msg.str());
    }
    if (lambda <= kEigenClampPositive) continue;
    s -= lambda * std::log2(lambda);
  }
  return s;
}

double von_neumann_entropy(const LabeledOperator& rho) {
  check_state(rho);
  return entropy_of_spectrum(eigvals_hermitian(rho));
}

double coherent_information(const LabeledOperator& rho, const Labels& target) {
  if (target.empty()) throw Error("coherent_information: empty target");
  return von_neumann_entropy(reduce_to(rho, target)) - von_neumann_entropy(rho);
}

double conditional_entropy(const LabeledOperator& rho, const Labels& conditioning) {
  return von_neumann_entropy(rho) - von_neumann_entropy(reduce_to(rho, conditioning));
}

double mutual_information(const LabeledOperator& rho, const Labels& x, const Labels& y) {
  for (const auto& l : x) {
    if (std::find(y.begin(), y.end(), l) != y.end()) throw Error("mutual_information: '" + l + "' in both sets");
  }
  if (x.size() + y.size() != rho.systems().size()) throw Error("mutual_information: x and y must cover the state");
  return von_neumann_entropy(reduce_to(rho, x)) + von_neumann_entropy(reduce_to(rho, y)) - von_neumann_entropy(rho);
}

std::pair<double, double> pure_state_symmetry_check(const LabeledOperator& rho, const Bipartition& cut) {
  check_bipartition(rho, cut);
  const double purity = (rho.matrix() * rho.matrix()).trace().real();
  if (purity < 1.0 - 1e-9) {
    std::ostringstream msg;
    msg << "pure_state_symmetry_check: purity " << purity << " below 1 - 1e-9";
    throw Error(msg.str());
  }
  return {von_neumann_entropy(reduce_to(rho, cut.side_a)), von_neumann_entropy(reduce_to(rho, cut.side_b))};
}

LabeledOperator reduce_pure_state(const std::vector<SystemId>& systems, const Vector& psi, const Labels& keep) {
  if (static_cast<std::size_t>(psi.size()) != product_of_dims(systems)) throw Error("state vector size mismatch");
  const auto kept = detail::positions_of(systems, keep);
  const auto rest = detail::complement_positions(systems.size(), kept);
  const auto fk = detail::offsets_of(systems, kept);
  const auto fr = detail::offsets_of(systems, rest);
  Matrix m(static_cast<Eigen::Index>(fk.size()), static_cast<Eigen::Index>(fr.size()));
  for (std::size_t c = 0; c < fr.size(); ++c) {
    for (std::size_t r = 0; r < fk.size(); ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = psi(static_cast<Eigen::Index>(fk[r] + fr[c]));
    }
  }
  std::vector<SystemId> out;
  for (auto p : kept) out.push_back(systems[p]);
  return {std::move(out), m * m.adjoint()};
}

double pure_state_entropy(const std::vector<SystemId>& systems, const Vector& psi, const Labels& keep) {
  return von_neumann_entropy(reduce_pure_state(systems, psi, keep));
}

}  // namespace causalproc
