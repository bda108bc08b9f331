#include <gtest/gtest.h>

#include "causalproc/measures.hpp"
#include "causalproc/optimizer.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace causalproc;

namespace {

/// Traceless Hermitian direction of unit Frobenius norm.
Matrix random_direction(Eigen::Index d, CounterRng& rng) {
  Matrix h = gen::random_hermitian(d, rng);
  h -= Matrix::Identity(d, d) * (h.trace() / static_cast<double>(d));
  return h / h.norm();
}

/// Projection onto density matrices by bisection on the shift.
Matrix projection_oracle(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  const Eigen::VectorXd v = es.eigenvalues();
  double lo = v.minCoeff() - 1.0;
  double hi = v.maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::max(v(i) - mid, 0.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  Eigen::VectorXd lambda(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) lambda(i) = std::max(v(i) - 0.5 * (lo + hi), 0.0);
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

OptimizerConfig small_config(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Optimizer, GradientMatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng(seed);
    const Eigen::Index din = 2 + static_cast<Eigen::Index>(seed % 2);
    const KrausSet k = gen::random_kraus(din, 2, 2 + static_cast<Eigen::Index>(seed % 2), rng);
    const Matrix rho = gen::random_density({{"x", static_cast<int>(din)}}, rng).matrix();
    const Matrix dir = random_direction(din, rng);
    const double h = 1e-5;
    const double fd = (channel_ci_objective(k, rho + h * dir) - channel_ci_objective(k, rho - h * dir)) / (2 * h);
    const double an = channel_ci_gradient(k, rho).cwiseProduct(dir.conjugate()).sum().real();
    EXPECT_LE(std::abs(an - fd), 1e-4 * std::max(std::abs(fd), 1e-3)) << "seed " << seed;
  }
}

TEST(Optimizer, ObjectiveAgreesWithPurificationRoute) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed);
    const QuantumMap m = gen::random_channel({{"in", 2}}, {{"out", 2}}, 2, rng);
    const Matrix rho = gen::random_density({{"in", 2}}, rng).matrix();
    EXPECT_NEAR(channel_ci_objective(*m.kraus(), rho), channel_ci_via_purification(m, rho), 1e-9);
  }
}

TEST(Optimizer, ProjectionMatchesBisection) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const Matrix h = gen::random_hermitian(4, rng);
    const Matrix p = project_to_density(h);
    EXPECT_LT((p - projection_oracle(h)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
  }
}

TEST(Optimizer, ChannelValues) {
  const auto id = channel_coherent_information(identity_channel(2), small_config(1));
  EXPECT_NEAR(id.value_bits, 1.0, 1e-6);
  const auto er = channel_coherent_information(erasure(0.25, 2), small_config(1));
  EXPECT_NEAR(er.value_bits, (1 - 2 * 0.25) * 1.0, 1e-4);
  const auto dep = channel_coherent_information(depolarizing(1.0, 2), small_config(1));
  EXPECT_NEAR(dep.value_bits, 0.0, 1e-6);
  for (const auto& r : {id, er, dep}) {
    ASSERT_TRUE(r.argument.has_value());
    for (double v : r.restart_values) EXPECT_NEAR(v, r.value_bits, 1e-6);
  }
}

TEST(Optimizer, ReportedOptimaReEvaluate) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(seed);
    const QuantumMap m = gen::random_channel({{"in", 2}}, {{"out", 2}}, 2, rng);
    const auto r = channel_coherent_information(m, small_config(seed));
    EXPECT_NEAR(channel_ci_via_purification(m, r.argument->matrix()), r.value_bits, 1e-8);
  }
  const ProcessOperator w = process_from_channel(erasure(0.25, 2, "x", "y"), "A", "B");
  const auto r = lo_optimized_ci(w, "B", {}, small_config(2));
  EXPECT_NEAR(coherent_information(lo_family_state(w, {}, r.parameters), r.target), r.value_bits, 1e-8);
}

TEST(Optimizer, LoFamilyOnChannelProcesses) {
  const ProcessOperator id = process_from_channel(identity_channel(2, "x", "y"), "A", "B");
  EXPECT_NEAR(lo_optimized_ci(id, "B", {}, small_config(3)).value_bits, 1.0, 1e-6);
  const ProcessOperator er = process_from_channel(erasure(0.25, 2, "x", "y"), "A", "B");
  EXPECT_NEAR(lo_optimized_ci(er, "B", {}, small_config(3)).value_bits, 0.5, 1e-4);
  EXPECT_NEAR(regularized_ci_estimate(er, "B", 2, {}, small_config(3)).value_bits, 0.5, 1e-4);
}

TEST(Optimizer, FamilyStateIsNormalized) {
  CounterRng rng(4);
  const ProcessOperator w = gen::random_valid_process(2, rng);
  LoFamily fam;
  fam.input_channel_rank = 2;
  std::vector<double> p(lo_parameter_count(w, fam));
  for (auto& x : p) x = rng.normal();
  const auto st = lo_family_state(w, fam, p);
  EXPECT_NEAR(st.trace().real(), 1.0, 1e-12);
  EXPECT_GE(eigvals_hermitian(st).front(), -1e-12);
}

TEST(Optimizer, HashingBounds) {
  Vector singlet = Vector::Zero(4);
  singlet(1) = 1.0 / std::sqrt(2.0);
  singlet(2) = -1.0 / std::sqrt(2.0);
  EXPECT_NEAR(hashing_lower_bound(LabeledOperator::projector({{"a", 2}, {"b", 2}}, singlet), {"b"}), 1.0, 1e-12);
  EXPECT_EQ(hashing_lower_bound(LabeledOperator::maximally_mixed({{"a", 2}, {"b", 2}}), {"b"}), 0.0);
}

TEST(Optimizer, ThreadCountDoesNotChangeResults) {
  OptimizerConfig one = small_config(5);
  OptimizerConfig four = one;
  four.threads = 4;
  const auto a = channel_coherent_information(erasure(0.3, 2), one);
  const auto b = channel_coherent_information(erasure(0.3, 2), four);
  EXPECT_EQ(a.restart_values, b.restart_values);
  EXPECT_EQ(a.value_bits, b.value_bits);
}

TEST(Optimizer, Errors) {
  OptimizerConfig bad;
  bad.restarts = 0;
  EXPECT_THROW(check_config(bad), Error);
  const ProcessOperator w = process_from_channel(identity_channel(2, "x", "y"), "A", "B");
  EXPECT_THROW(regularized_ci_estimate(w, "B", 4), Error);
  EXPECT_THROW(lo_optimized_ci(w, "Z"), Error);
}
