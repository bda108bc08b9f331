#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "causalproc/io.hpp"
#include "generators.hpp"

using namespace causalproc;

namespace {

std::string fixture(const std::string& name) { return std::string(CAUSALPROC_FIXTURES) + "/" + name; }

}  // namespace

TEST(Io, OperatorRoundTrip) {
  CounterRng rng(1);
  const LabeledOperator rho = gen::random_density({{"a", 2}, {"b", 3}}, rng);
  const LabeledOperator back = operator_from_json(Json::parse(dump_deterministic(operator_to_json(rho))));
  EXPECT_EQ(back.labels(), rho.labels());
  EXPECT_EQ((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Io, MapRoundTripKeepsKraus) {
  const QuantumMap m = erasure(0.25, 2);
  const QuantumMap back = map_from_json(Json::parse(dump_deterministic(map_to_json(m))));
  EXPECT_EQ(frobenius_distance(back.choi(), m.choi()), 0.0);
  EXPECT_TRUE(back.kraus().has_value());
}

TEST(Io, ProcessRoundTrip) {
  CounterRng rng(2);
  const ProcessOperator w = gen::random_valid_process(2, rng);
  const ProcessOperator back = process_from_json(process_to_json(w));
  ASSERT_EQ(back.parties().size(), w.parties().size());
  for (std::size_t i = 0; i < w.parties().size(); ++i) {
    EXPECT_EQ(back.parties()[i].name, w.parties()[i].name);
    EXPECT_EQ(back.parties()[i].input_labels(), w.parties()[i].input_labels());
    EXPECT_EQ(back.parties()[i].output_labels(), w.parties()[i].output_labels());
  }
  EXPECT_EQ(frobenius_distance(back.op(), w.op()), 0.0);
}

TEST(Io, NetworkRoundTripPreservesHash) {
  const NetworkSpec net = fig6_small(3);
  const NetworkSpec back = network_from_json(Json::parse(dump_deterministic(network_to_json(net))));
  EXPECT_EQ(spec_hash(back), spec_hash(net));
  EXPECT_EQ(back.region.side_a_ends, net.region.side_a_ends);
}

TEST(Io, ConfigParsing) {
  const OptimizerConfig cfg = config_from_json(read_json_file(fixture("optimizer_config.json")));
  EXPECT_EQ(cfg.restarts, 8);
  EXPECT_EQ(cfg.max_iterations, 2000);
  EXPECT_THROW(config_from_json(Json{{"restart", 3}}), Error);
  EXPECT_THROW(config_from_json(Json{{"step_rule", "newton"}}), Error);
  EXPECT_EQ(config_from_json(Json::object()).restarts, OptimizerConfig{}.restarts);
}

TEST(Io, DeterministicWriterFormat) {
  Json j = Json::object();
  j["x"] = 0.1;
  j["list"] = {1, 2.5};
  j["nan"] = std::nan("");
  EXPECT_EQ(dump_deterministic(j), "{\n  \"x\": 0.10000000000000001,\n  \"list\": [1, 2.5],\n  \"nan\": null\n}\n");
}

TEST(Io, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Io, MalformedInput) {
  const std::string path = testing::TempDir() + "causalproc_truncated.json";
  {
    std::ofstream out(path);
    out << "{\"systems\": [";
  }
  EXPECT_THROW(read_json_file(path), Error);
  std::remove(path.c_str());
  EXPECT_THROW(read_json_file(fixture("does_not_exist.json")), Error);
  EXPECT_THROW(operator_from_json(Json{{"systems", Json::array()}}), Error);
  Json bad = read_json_file(fixture("state_phi_plus.json"));
  bad["parties"][0]["input"] = "zz";
  EXPECT_THROW(process_from_json(bad), Error);
}
