#include <gtest/gtest.h>

#include "causalproc/measures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace causalproc;

TEST(Measures, EntropyMatchesJacobiOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const LabeledOperator rho = gen::random_density({{"a", 2}, {"b", 3}}, rng, 1 + static_cast<Eigen::Index>(seed % 6));
    EXPECT_NEAR(von_neumann_entropy(rho), oracle::entropy_bits(rho.matrix()), 1e-9);
  }
}

TEST(Measures, CoherentInformationMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const LabeledOperator rho = gen::random_density({{"a", 2}, {"b", 2}, {"c", 2}}, rng, 3);
    EXPECT_NEAR(coherent_information(rho, {"a", "c"}),
                oracle::coherent_information(rho.matrix(), {2, 2, 2}, {true, false, true}), 1e-9);
  }
}

TEST(Measures, KnownValues) {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  const auto bell = LabeledOperator::projector({{"a", 2}, {"b", 2}}, phi);
  EXPECT_NEAR(coherent_information(bell, {"b"}), 1.0, 1e-12);
  EXPECT_NEAR(coherent_information(LabeledOperator::maximally_mixed({{"a", 2}, {"b", 2}}), {"b"}), -1.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(LabeledOperator::maximally_mixed({{"a", 5}})), std::log2(5.0), 1e-12);
  EXPECT_NEAR(mutual_information(bell, {"a"}, {"b"}), 2.0, 1e-12);
  EXPECT_NEAR(entropy_of_spectrum({0.5, 0.5, -1e-10}), 1.0, 1e-12);
  EXPECT_THROW(entropy_of_spectrum({1.1, -0.1}), Error);
}

TEST(Measures, PureStateSymmetry) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const Vector psi = gen::random_pure(12, rng);
    const auto rho = LabeledOperator::projector({{"a", 3}, {"b", 2}, {"c", 2}}, psi);
    const auto [sa, sb] = pure_state_symmetry_check(rho, {{"a"}, {"b", "c"}, {"a"}});
    EXPECT_NEAR(sa, sb, 1e-8);
    EXPECT_NEAR(pure_state_entropy(rho.systems(), psi, {"b", "c"}), sa, 1e-9);
  }
}

TEST(Measures, MutualInformationIsNonNegativeAndZeroOnProducts) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const auto rho = gen::random_density({{"a", 2}, {"b", 3}}, rng);
    EXPECT_GE(mutual_information(rho, {"a"}, {"b"}), -1e-9);
    const auto prod = tensor(gen::random_density({{"a", 2}}, rng), gen::random_density({{"b", 3}}, rng));
    EXPECT_NEAR(mutual_information(prod, {"a"}, {"b"}), 0.0, 1e-9);
  }
}

TEST(Measures, DataProcessingOnTargetSide) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const auto rho = gen::random_density({{"a", 2}, {"b", 2}}, rng, 2);
    const double before = coherent_information(rho, {"b"});
    for (int k = 0; k < 10; ++k) {
      const QuantumMap m = gen::random_channel({{"b", 2}}, {{"b'", 2}}, 1 + k % 3, rng);
      EXPECT_LE(coherent_information(apply_map(m, rho), {"b'"}), before + 1e-8);
    }
  }
}

TEST(Measures, ReducePureStateMatchesPartialTrace) {
  CounterRng rng(3);
  const Vector psi = gen::random_pure(8, rng);
  const std::vector<SystemId> sys = {{"a", 2}, {"b", 2}, {"c", 2}};
  const auto full = LabeledOperator::projector(sys, psi);
  EXPECT_LT(frobenius_distance(reduce_pure_state(sys, psi, {"c", "a"}), reduce_to(full, {"c", "a"})), 1e-13);
}

TEST(Measures, Errors) {
  const auto rho = LabeledOperator::maximally_mixed({{"a", 2}, {"b", 2}});
  EXPECT_THROW(coherent_information(rho, {"z"}), Error);
  EXPECT_THROW(mutual_information(rho, {"a"}, {"a"}), Error);
  EXPECT_THROW(von_neumann_entropy(rho.scaled(2.0)), Error);
}
