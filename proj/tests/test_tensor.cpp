#include <gtest/gtest.h>

#include "causalproc/tensor.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace causalproc;

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

LabeledOperator random_operator(const std::vector<SystemId>& systems, CounterRng& rng) {
  const auto d = static_cast<Eigen::Index>(product_of_dims(systems));
  return {systems, gen::ginibre(d, d, rng)};
}

const std::vector<SystemId> kSystems = {{"a", 2}, {"b", 3}, {"c", 2}};

}  // namespace

TEST(Tensor, KroneckerMatchesLoopOracle) {
  CounterRng rng(1);
  const auto a = random_operator({{"a", 2}, {"b", 3}}, rng);
  const auto b = random_operator({{"c", 2}}, rng);
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.labels(), (Labels{"a", "b", "c"}));
  EXPECT_LT(max_abs(ab.matrix() - oracle::kron(a.matrix(), b.matrix())), 1e-14);
}

TEST(Tensor, PartialTraceMatchesIndexSum) {
  CounterRng rng(2);
  const auto a = random_operator(kSystems, rng);
  const std::vector<int> dims = {2, 3, 2};
  const std::vector<std::pair<Labels, std::vector<bool>>> cases = {
      {{"a"}, {true, false, false}}, {{"b"}, {false, true, false}}, {{"a", "c"}, {true, false, true}},
      {{"b", "c"}, {false, true, true}}, {{"a", "b", "c"}, {true, true, true}}};
  for (const auto& [subset, mask] : cases) {
    const auto got = partial_trace(a, subset);
    EXPECT_LT(max_abs(got.matrix() - oracle::partial_trace(a.matrix(), dims, mask)), 1e-12);
  }
}

TEST(Tensor, PartialTracePreservesTrace) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CounterRng rng(seed);
    const auto a = random_operator(kSystems, rng);
    const auto r = partial_trace(a, {"b"});
    EXPECT_LT(std::abs(r.trace() - a.trace()), 1e-12 * std::max(1.0, std::abs(a.trace())));
  }
}

TEST(Tensor, ReduceToIsComplementaryTrace) {
  CounterRng rng(3);
  const auto a = random_operator(kSystems, rng);
  EXPECT_LT(frobenius_distance(reduce_to(a, {"a", "c"}), partial_trace(a, {"b"})), 1e-13);
}

TEST(Tensor, PermuteRoundTrip) {
  CounterRng rng(4);
  const auto a = random_operator(kSystems, rng);
  const auto p = permute_systems(a, {"c", "a", "b"});
  EXPECT_EQ(p.labels(), (Labels{"c", "a", "b"}));
  EXPECT_LT(frobenius_distance(permute_systems(p, {"a", "b", "c"}), a), 1e-15);
  // Entry check against explicit digits.
  const std::vector<int> dims = {2, 3, 2};
  const std::vector<int> pdims = {2, 2, 3};
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t c = 0; c < 12; ++c) {
      const auto dr = oracle::digits(r, dims);
      const auto dc = oracle::digits(c, dims);
      const std::size_t pr = oracle::index_of({dr[2], dr[0], dr[1]}, pdims);
      const std::size_t pc = oracle::index_of({dc[2], dc[0], dc[1]}, pdims);
      EXPECT_EQ(p.matrix()(static_cast<Eigen::Index>(pr), static_cast<Eigen::Index>(pc)),
                a.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
  }
}

TEST(Tensor, EigenvaluesMatchJacobiAndArePermutationInvariant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed);
    const LabeledOperator h(kSystems, gen::random_hermitian(12, rng));
    const auto ev = eigvals_hermitian(h);
    const auto ref = oracle::hermitian_eigenvalues(h.matrix());
    const auto perm = eigvals_hermitian(permute_systems(h, {"b", "c", "a"}));
    ASSERT_EQ(ev.size(), ref.size());
    for (std::size_t i = 0; i < ev.size(); ++i) {
      EXPECT_NEAR(ev[i], ref[i], 1e-10);
      EXPECT_NEAR(ev[i], perm[i], 1e-10);
    }
  }
}

TEST(Tensor, KroneckerAssociativity) {
  CounterRng rng(5);
  const auto a = random_operator({{"a", 2}}, rng);
  const auto b = random_operator({{"b", 3}}, rng);
  const auto c = random_operator({{"c", 2}}, rng);
  EXPECT_LT(frobenius_distance(tensor(tensor(a, b), c), tensor(a, tensor(b, c))), 1e-12);
}

TEST(Tensor, ReplaceWithOmegaIsIdempotentAndCommutes) {
  CounterRng rng(6);
  const auto a = random_operator(kSystems, rng);
  const auto once = replace_with_maximally_mixed(a, {"b"});
  EXPECT_LT(frobenius_distance(replace_with_maximally_mixed(once, {"b"}), once), 1e-12);
  const auto xy = replace_with_maximally_mixed(replace_with_maximally_mixed(a, {"a"}), {"c"});
  const auto yx = replace_with_maximally_mixed(replace_with_maximally_mixed(a, {"c"}), {"a"});
  EXPECT_LT(frobenius_distance(xy, yx), 1e-12);
  // Oracle: omega_b (x) Tr_b A, reordered.
  const auto tr = oracle::partial_trace(a.matrix(), {2, 3, 2}, {false, true, false});
  const Matrix omega = Matrix::Identity(3, 3) / 3.0;
  Matrix expect(12, 12);
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t c = 0; c < 12; ++c) {
      const auto dr = oracle::digits(r, {2, 3, 2});
      const auto dc = oracle::digits(c, {2, 3, 2});
      expect(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          omega(dr[1], dc[1]) * tr(dr[0] * 2 + dr[2], dc[0] * 2 + dc[2]);
    }
  }
  EXPECT_LT(max_abs(once.matrix() - expect), 1e-13);
}

TEST(Tensor, PartialTransposeMatchesDigitSwap) {
  CounterRng rng(7);
  const auto a = random_operator({{"a", 2}, {"b", 3}}, rng);
  const auto t = transpose(a, {"b"});
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) {
      const auto dr = oracle::digits(r, {2, 3});
      const auto dc = oracle::digits(c, {2, 3});
      const auto sr = oracle::index_of({dr[0], dc[1]}, {2, 3});
      const auto sc = oracle::index_of({dc[0], dr[1]}, {2, 3});
      EXPECT_EQ(t.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
                a.matrix()(static_cast<Eigen::Index>(sr), static_cast<Eigen::Index>(sc)));
    }
  }
}

TEST(Tensor, Errors) {
  EXPECT_THROW(LabeledOperator({{"a", 2}, {"a", 2}}, Matrix::Identity(4, 4)), Error);
  EXPECT_THROW(LabeledOperator({{"a", 2}}, Matrix::Identity(3, 3)), Error);
  const auto w = LabeledOperator::identity({{"a", 2}});
  EXPECT_THROW(partial_trace(w, {"z"}), Error);
  EXPECT_THROW(tensor(w, w), Error);
  EXPECT_THROW(eigvals_hermitian(LabeledOperator({{"a", 2}}, (Matrix(2, 2) << 0, 1, 0, 0).finished())), Error);
}
