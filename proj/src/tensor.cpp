#include "causalproc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "index_map.hpp"

namespace causalproc {

namespace detail {

std::vector<std::size_t> positions_of(const std::vector<SystemId>& systems, const Labels& labels) {
  std::vector<std::size_t> pos;
  pos.reserve(labels.size());
  for (const auto& label : labels) {
    auto it = std::find_if(systems.begin(), systems.end(),
                           [&](const SystemId& s) { return s.label == label; });
    if (it == systems.end()) throw Error("unknown system label '" + label + "'");
    auto p = static_cast<std::size_t>(it - systems.begin());
    if (std::find(pos.begin(), pos.end(), p) != pos.end()) {
      throw Error("system label '" + label + "' listed twice");
    }
    pos.push_back(p);
  }
  return pos;
}

std::vector<std::size_t> complement_positions(std::size_t n, const std::vector<std::size_t>& taken) {
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(taken.begin(), taken.end(), i) == taken.end()) rest.push_back(i);
  }
  return rest;
}

}  // namespace detail

using detail::complement_positions;
using detail::offsets_of;
using detail::positions_of;

std::size_t product_of_dims(const std::vector<SystemId>& systems) {
  std::size_t d = 1;
  for (const auto& s : systems) d *= static_cast<std::size_t>(s.dim);
  return d;
}

LabeledOperator::LabeledOperator() : matrix_(Matrix::Ones(1, 1)) {}

LabeledOperator::LabeledOperator(std::vector<SystemId> systems, Matrix matrix)
    : systems_(std::move(systems)), matrix_(std::move(matrix)) {
  std::set<std::string> seen;
  for (const auto& s : systems_) {
    if (s.dim < 1) throw Error("system '" + s.label + "' has dimension " + std::to_string(s.dim));
    if (!seen.insert(s.label).second) throw Error("duplicate system label '" + s.label + "'");
  }
  const auto d = static_cast<Eigen::Index>(product_of_dims(systems_));
  if (matrix_.rows() != d || matrix_.cols() != d) {
    std::ostringstream msg;
    msg << "matrix is " << matrix_.rows() << "x" << matrix_.cols() << " but systems require side " << d;
    throw Error(msg.str());
  }
}

LabeledOperator LabeledOperator::identity(std::vector<SystemId> systems) {
  const auto d = static_cast<Eigen::Index>(product_of_dims(systems));
  return {std::move(systems), Matrix::Identity(d, d)};
}

LabeledOperator LabeledOperator::maximally_mixed(std::vector<SystemId> systems) {
  const auto d = static_cast<Eigen::Index>(product_of_dims(systems));
  return {std::move(systems), Matrix::Identity(d, d) / static_cast<double>(d)};
}

LabeledOperator LabeledOperator::projector(std::vector<SystemId> systems, const Vector& psi) {
  return {std::move(systems), psi * psi.adjoint()};
}

Labels LabeledOperator::labels() const {
  Labels out;
  out.reserve(systems_.size());
  for (const auto& s : systems_) out.push_back(s.label);
  return out;
}

bool LabeledOperator::has(const std::string& label) const {
  return std::any_of(systems_.begin(), systems_.end(), [&](const SystemId& s) { return s.label == label; });
}

std::size_t LabeledOperator::index_of(const std::string& label) const {
  return positions_of(systems_, {label}).front();
}

const SystemId& LabeledOperator::system(const std::string& label) const {
  return systems_[index_of(label)];
}

std::vector<SystemId> LabeledOperator::systems_for(const Labels& labels) const {
  std::vector<SystemId> out;
  for (auto p : positions_of(systems_, labels)) out.push_back(systems_[p]);
  return out;
}

LabeledOperator LabeledOperator::scaled(Complex factor) const { return {systems_, matrix_ * factor}; }

LabeledOperator LabeledOperator::adjoint() const { return {systems_, matrix_.adjoint()}; }

LabeledOperator LabeledOperator::relabeled(
    const std::vector<std::pair<std::string, std::string>>& renames) const {
  auto systems = systems_;
  for (const auto& [from, to] : renames) {
    systems[index_of(from)].label = to;
  }
  return {std::move(systems), matrix_};
}

namespace {

const LabeledOperator& check_same_labels(const LabeledOperator& a, const LabeledOperator& b) {
  auto la = a.labels();
  auto lb = b.labels();
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) throw Error("operators act on different system sets");
  return b;
}

Matrix aligned(const LabeledOperator& a, const LabeledOperator& b) {
  check_same_labels(a, b);
  if (a.systems() == b.systems()) return b.matrix();
  auto pb = permute_systems(b, a.labels());
  if (pb.systems() != a.systems()) throw Error("system dimensions disagree between operands");
  return pb.matrix();
}

}  // namespace

LabeledOperator operator+(const LabeledOperator& a, const LabeledOperator& b) {
  return {a.systems(), a.matrix() + aligned(a, b)};
}

LabeledOperator operator-(const LabeledOperator& a, const LabeledOperator& b) {
  return {a.systems(), a.matrix() - aligned(a, b)};
}

double frobenius_distance(const LabeledOperator& a, const LabeledOperator& b) {
  return (a.matrix() - aligned(a, b)).norm();
}

LabeledOperator tensor(const LabeledOperator& a, const LabeledOperator& b) {
  auto systems = a.systems();
  for (const auto& s : b.systems()) {
    if (a.has(s.label)) throw Error("tensor: system label '" + s.label + "' appears in both factors");
    systems.push_back(s);
  }
  Matrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return {std::move(systems), std::move(m)};
}

LabeledOperator partial_trace(const LabeledOperator& a, const Labels& subset) {
  if (subset.empty()) return a;
  const auto traced = positions_of(a.systems(), subset);
  const auto kept = complement_positions(a.systems().size(), traced);
  const auto fk = offsets_of(a.systems(), kept);
  const auto ft = offsets_of(a.systems(), traced);
  const auto dk = static_cast<Eigen::Index>(fk.size());
  Matrix out = Matrix::Zero(dk, dk);
  const Matrix& m = a.matrix();
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      Complex acc = 0.0;
      for (std::size_t t : ft) acc += m(static_cast<Eigen::Index>(fk[r] + t), static_cast<Eigen::Index>(fk[c] + t));
      out(r, c) = acc;
    }
  }
  std::vector<SystemId> systems;
  for (auto p : kept) systems.push_back(a.systems()[p]);
  return {std::move(systems), std::move(out)};
}

LabeledOperator reduce_to(const LabeledOperator& a, const Labels& keep) {
  const auto kept = positions_of(a.systems(), keep);
  Labels traced;
  for (auto p : complement_positions(a.systems().size(), kept)) traced.push_back(a.systems()[p].label);
  return partial_trace(a, traced);
}

LabeledOperator permute_systems(const LabeledOperator& a, const Labels& new_order) {
  if (new_order.size() != a.systems().size()) {
    throw Error("permute_systems: new order lists " + std::to_string(new_order.size()) + " labels, operator has " +
                std::to_string(a.systems().size()));
  }
  const auto pos = positions_of(a.systems(), new_order);
  const auto map = offsets_of(a.systems(), pos);
  const auto d = static_cast<Eigen::Index>(map.size());
  Matrix out(d, d);
  const Matrix& m = a.matrix();
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      out(r, c) = m(static_cast<Eigen::Index>(map[r]), static_cast<Eigen::Index>(map[c]));
    }
  }
  std::vector<SystemId> systems;
  for (auto p : pos) systems.push_back(a.systems()[p]);
  return {std::move(systems), std::move(out)};
}

LabeledOperator transpose(const LabeledOperator& a, const Labels& subset) {
  if (subset.empty()) return a;
  const auto tp = positions_of(a.systems(), subset);
  if (tp.size() == a.systems().size()) return {a.systems(), a.matrix().transpose()};
  const auto kept = complement_positions(a.systems().size(), tp);
  const auto fk = offsets_of(a.systems(), kept);
  const auto ft = offsets_of(a.systems(), tp);
  const Matrix& m = a.matrix();
  Matrix out(m.rows(), m.cols());
  for (std::size_t rk : fk) {
    for (std::size_t ck : fk) {
      for (std::size_t rt : ft) {
        for (std::size_t ct : ft) {
          out(static_cast<Eigen::Index>(rk + rt), static_cast<Eigen::Index>(ck + ct)) =
              m(static_cast<Eigen::Index>(rk + ct), static_cast<Eigen::Index>(ck + rt));
        }
      }
    }
  }
  return {a.systems(), std::move(out)};
}

LabeledOperator replace_with_maximally_mixed(const LabeledOperator& a, const Labels& subset) {
  if (subset.empty()) return a;
  const auto tp = positions_of(a.systems(), subset);
  const auto kept = complement_positions(a.systems().size(), tp);
  const auto fk = offsets_of(a.systems(), kept);
  const auto ft = offsets_of(a.systems(), tp);
  const Matrix reduced = partial_trace(a, subset).matrix() / static_cast<double>(ft.size());
  Matrix out = Matrix::Zero(a.matrix().rows(), a.matrix().cols());
  for (std::size_t t : ft) {
    for (std::size_t c = 0; c < fk.size(); ++c) {
      for (std::size_t r = 0; r < fk.size(); ++r) {
        out(static_cast<Eigen::Index>(fk[r] + t), static_cast<Eigen::Index>(fk[c] + t)) =
            reduced(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return {a.systems(), std::move(out)};
}

double hermiticity_deviation(const Matrix& m) { return (m - m.adjoint()).norm(); }

std::vector<double> eigvals_hermitian(const Matrix& m) {
  const double dev = hermiticity_deviation(m);
  if (dev > kHermiticityTolerance) {
    std::ostringstream msg;
    msg << "operator is not Hermitian: ||A - A^dagger||_F = " << dev;
    throw Error(msg.str());
  }
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> eigvals_hermitian(const LabeledOperator& a) { return eigvals_hermitian(a.matrix()); }

}  // namespace causalproc
