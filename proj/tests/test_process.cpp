#include <gtest/gtest.h>

#include "causalproc/process.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace causalproc;

namespace {

const std::vector<int> kDims = {2, 2, 2, 2};  // a1 a2 b1 b2

Party party_a() { return {"A", {{"a1", 2}}, {{"a2", 2}}, ""}; }
Party party_b() { return {"B", {{"b1", 2}}, {{"b2", 2}}, ""}; }
std::vector<SystemId> all_systems() { return {{"a1", 2}, {"a2", 2}, {"b1", 2}, {"b2", 2}}; }

/// omega^X (x) Tr_X W on the four-qubit ordering a1 a2 b1 b2, by loops.
Matrix replace(const Matrix& w, const std::vector<bool>& x) {
  const Matrix tr = oracle::partial_trace(w, kDims, x);
  double dx = 1.0;
  for (bool b : x) dx *= b ? 2.0 : 1.0;
  Matrix out = Matrix::Zero(16, 16);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) {
      const auto dr = oracle::digits(r, kDims);
      const auto dc = oracle::digits(c, kDims);
      bool diag = true;
      std::vector<int> kr;
      std::vector<int> kc;
      std::vector<int> kd;
      for (std::size_t k = 0; k < 4; ++k) {
        if (x[k]) {
          diag = diag && dr[k] == dc[k];
        } else {
          kr.push_back(dr[k]);
          kc.push_back(dc[k]);
          kd.push_back(2);
        }
      }
      if (!diag) continue;
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          tr(static_cast<Eigen::Index>(oracle::index_of(kr, kd)), static_cast<Eigen::Index>(oracle::index_of(kc, kd))) / dx;
    }
  }
  return out;
}

/// The bipartite projector written out term by term.
Matrix lv_oracle(const Matrix& w) {
  const bool T = true;
  const bool F = false;
  return replace(w, {F, T, F, F}) + replace(w, {F, F, F, T}) - replace(w, {F, T, F, T}) - replace(w, {F, F, T, T}) +
         replace(w, {F, T, T, T}) - replace(w, {T, T, F, F}) + replace(w, {T, T, F, T});
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Process, LvMatchesBipartiteFormula) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterRng rng(seed);
    const LabeledOperator x(all_systems(), gen::random_hermitian(16, rng));
    const LabeledOperator p = lv_project(x, {party_a(), party_b()});
    EXPECT_LT(max_abs(p.matrix() - lv_oracle(x.matrix())), 1e-12);
  }
}

TEST(Process, LvExpansionHasSevenTermsForTwoParties) {
  EXPECT_EQ(lv_expansion({party_a(), party_b()}).size(), 7u);
  // One party with input and output: ω on the output only.
  const auto one = lv_expansion({party_a()});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].coefficient, 1);
  EXPECT_EQ(one[0].replaced, (Labels{"a2"}));
}

TEST(Process, LvIsIdempotentLinearAndTracePreserving) {
  const std::vector<Party> parties = {party_a(), party_b()};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng rng(seed);
    const LabeledOperator x(all_systems(), gen::random_hermitian(16, rng));
    const LabeledOperator y(all_systems(), gen::random_hermitian(16, rng));
    const double alpha = rng.normal();
    const auto px = lv_project(x, parties);
    EXPECT_LT(frobenius_distance(lv_project(px, parties), px), 1e-10);
    const auto lin = lv_project(x + y.scaled(alpha), parties);
    EXPECT_LT(frobenius_distance(lin, px + lv_project(y, parties).scaled(alpha)), 1e-10);
    EXPECT_LT(std::abs(px.trace() - x.trace()), 1e-10);
  }
}

TEST(Process, StateAndChannelProcessesAreValid) {
  for (int kind = 0; kind < 3; ++kind) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CounterRng rng(seed * 3 + static_cast<std::uint64_t>(kind));
      const ProcessOperator w = gen::random_valid_process(kind, rng);
      const ValidityReport r = validate(w);
      EXPECT_TRUE(r.valid()) << "kind " << kind << " seed " << seed << " lv " << r.lv_residual;
    }
  }
}

TEST(Process, TensorOfValidProcessesIsValid) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CounterRng rng(seed);
    const ProcessOperator w = gen::random_valid_process(1, rng);
    EXPECT_TRUE(validate(tensor_processes(w, w)).valid());
  }
}

TEST(Process, FeedbackLoopIsInvalid) {
  const LabeledOperator loop = identity_channel(2, "a2", "a1").choi().scaled(0.5);
  const ValidityReport r = validate(ProcessOperator(loop, {party_a()}));
  EXPECT_FALSE(r.valid());
  EXPECT_GT(r.lv_residual, 0.1);
  EXPECT_TRUE(r.psd_ok);
  EXPECT_TRUE(r.trace_ok);
}

TEST(Process, ProbabilitiesSumToOne) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CounterRng rng(1000 + seed);
    const ProcessOperator w = gen::random_valid_process(static_cast<int>(seed % 3), rng);
    std::vector<std::vector<QuantumMap>> instruments;
    for (const auto& p : w.parties()) instruments.push_back(gen::random_instrument(p, 2, rng));
    double total = 0.0;
    const std::size_t n = w.parties().size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::map<std::string, QuantumMap> elements;
      for (std::size_t i = 0; i < n; ++i) elements.emplace(w.parties()[i].name, instruments[i][(mask >> i) & 1]);
      const ProbabilityResult pr = probability(w, elements);
      EXPECT_GT(pr.raw, -1e-12);
      total += pr.raw;
    }
    EXPECT_NEAR(total, 1.0, 1e-9) << "seed " << seed;
  }
}

TEST(Process, ProbabilityMatchesBornRuleOnStates) {
  CounterRng rng(7);
  const LabeledOperator rho = gen::random_density({{"a", 2}, {"b", 2}}, rng);
  const ProcessOperator w = process_from_state(rho, {{"A", {"a"}}, {"B", {"b"}}});
  const Matrix fa = gen::random_density({{"x", 2}}, rng).matrix();
  const Matrix fb = gen::random_density({{"x", 2}}, rng).matrix();
  const double expect = (oracle::kron(fa, fb) * rho.matrix()).trace().real();
  const auto pr = probability(w, {{"A", measure_element(w.party("A"), fa)}, {"B", measure_element(w.party("B"), fb)}});
  EXPECT_NEAR(pr.raw, expect, 1e-13);
}

TEST(Process, ProbabilityMatchesChannelOutput) {
  CounterRng rng(8);
  const KrausSet k = gen::random_kraus(2, 2, 2, rng);
  const QuantumMap m = choi_from_kraus(k, {{"x", 2}}, {{"y", 2}});
  const ProcessOperator w = process_from_channel(m, "C", "D");
  const Vector psi = gen::random_pure(2, rng);
  const Matrix f = gen::random_density({{"x", 2}}, rng).matrix();
  const Matrix out = oracle::kraus_apply(k, psi * psi.adjoint());
  const auto pr = probability(w, {{"C", prepare_element(w.party("C"), psi)}, {"D", measure_element(w.party("D"), f)}});
  EXPECT_NEAR(pr.raw, (f * out).trace().real(), 1e-13);
}

TEST(Process, LocalCombsKeepValidity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng(seed);
    const ProcessOperator w = gen::random_valid_process(0, rng);
    const QuantumMap first = gen::random_channel({{"a", 2}}, {{"m", 2}, {"t", 2}}, 2, rng);
    const QuantumMap second = gen::random_channel({{"m", 2}, {"u", 2}}, {{"v", 2}}, 2, rng);
    const ProcessOperator w2 = apply_local_operation(w, "A", memory_channel(first, second, "m"));
    const ValidityReport r = validate(w2);
    EXPECT_TRUE(r.valid()) << "seed " << seed << " lv " << r.lv_residual << " tr " << r.trace_deviation;
    EXPECT_TRUE(w2.extended());
    EXPECT_TRUE(w2.has_party("A.1"));
  }
}

TEST(Process, SignalingFollowsTheChannel) {
  const ProcessOperator w = process_from_channel(identity_channel(2, "x", "y"), "C", "D");
  EXPECT_GT(signaling_probe(w, "C", "D"), 0.4);
  EXPECT_NEAR(signaling_probe(w, "D", "C"), 0.0, 1e-12);
  const ProcessOperator fully_mixed = process_from_channel(depolarizing(1.0, 2, "x", "y"), "C", "D");
  EXPECT_NEAR(signaling_probe(fully_mixed, "C", "D"), 0.0, 1e-12);
}

TEST(Process, MergeOrdersByCausality) {
  const ProcessOperator w = process_from_channel(identity_channel(2, "x", "y"), "C", "D");
  const ProcessOperator merged = merge_parties(w, {{"CD", {"D", "C"}}});
  EXPECT_TRUE(validate(merged).valid());
  const auto teeth = merged.teeth_of("CD");
  ASSERT_EQ(teeth.size(), 2u);
  EXPECT_EQ(teeth[0].output_labels(), (Labels{"x"}));
}

TEST(Process, TensorPowerOfStateIsValid) {
  CounterRng rng(9);
  const ProcessOperator w = gen::random_valid_process(0, rng);
  const ProcessOperator w3 = tensor_power(w, 3);
  EXPECT_EQ(w3.parties().size(), 6u);
  EXPECT_TRUE(validate(w3).valid());
}

TEST(Process, Errors) {
  const LabeledOperator rho = LabeledOperator::maximally_mixed({{"a", 2}, {"b", 2}});
  EXPECT_THROW(ProcessOperator(rho, {Party{"A", {{"a", 2}}, {}, ""}}), Error);
  EXPECT_THROW(ProcessOperator(rho, {Party{"A", {{"a", 3}}, {}, ""}, Party{"B", {{"b", 2}}, {}, ""}}), Error);
  const ProcessOperator w = process_from_state(rho);
  EXPECT_THROW(probability(w, {}), Error);
  EXPECT_THROW(probability(w, {{"a", depolarizing(1.0, 2)}, {"b", depolarizing(1.0, 2)}}), Error);
}
