#include "causalproc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "CLI11.hpp"
#include "causalproc/io.hpp"
#include "causalproc/locc.hpp"
#include "causalproc/measures.hpp"
#include "causalproc/network.hpp"
#include "causalproc/optimizer.hpp"
#include "causalproc/parallel.hpp"

namespace causalproc {

namespace {

Labels split_labels(const std::string& s) {
  Labels out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

struct Stats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  for (double x : xs) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(xs.size()));
  return s;
}

Json stats_json(const std::vector<double>& xs) {
  const Stats s = stats_of(xs);
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"stddev", s.stddev}};
}

/// Bins of width 1/8 bit; values within 1e-9 of a bin edge land in the upper bin.
Json histogram_json(const std::vector<double>& xs) {
  const double width = 0.125;
  std::map<long, int> counts;
  for (double x : xs) ++counts[static_cast<long>(std::floor((x + 1e-9) / width))];
  Json bins = Json::array();
  for (const auto& [k, n] : counts) bins.push_back({{"lower", static_cast<double>(k) * width}, {"count", n}});
  return {{"bin_width", width}, {"bins", std::move(bins)}};
}

OptimizerConfig load_config(const std::string& path, std::uint64_t seed, int threads) {
  OptimizerConfig cfg = path.empty() ? OptimizerConfig{} : config_from_json(read_json_file(path));
  cfg.seed = seed;
  cfg.threads = threads;
  check_config(cfg);
  return cfg;
}

int cmd_validate(const std::string& file, std::string& out) {
  const ValidityReport r = validate(process_from_json(read_json_file(file)));
  out = dump_deterministic(report_to_json(r));
  return r.valid() ? 0 : 2;
}

int cmd_ci(const std::string& file, const std::string& target, std::string& out) {
  const LabeledOperator rho = operator_from_json(read_json_file(file));
  const Labels t = split_labels(target);
  const double s_target = von_neumann_entropy(partial_trace(rho, [&] {
    Labels rest;
    for (const auto& l : rho.labels()) {
      if (std::find(t.begin(), t.end(), l) == t.end()) rest.push_back(l);
    }
    return rest;
  }()));
  const double s_whole = von_neumann_entropy(rho);
  Json j = {{"value_bits", coherent_information(rho, t)},
            {"target", t},
            {"entropies", {{"target", s_target}, {"whole", s_whole}}}};
  out = dump_deterministic(j);
  return 0;
}

int cmd_channel_q(const std::string& file, const OptimizerConfig& cfg, std::string& out) {
  const QuantumMap m = map_from_json(read_json_file(file));
  const OptimizationResult r = channel_coherent_information(m, cfg);
  Json j = result_to_json(r);
  j["config"] = config_to_json(cfg);
  out = dump_deterministic(j);
  return 0;
}

int cmd_process_ci(const std::string& file, const std::string& owner, int copies, const LoFamily& family,
                   const OptimizerConfig& cfg, std::string& out) {
  const ProcessOperator w = process_from_json(read_json_file(file));
  const OptimizationResult r =
      copies == 1 ? lo_optimized_ci(w, owner, family, cfg) : regularized_ci_estimate(w, owner, copies, family, cfg);
  Json j = result_to_json(r);
  j["target_owner"] = owner;
  j["copies"] = copies;
  j["config"] = config_to_json(cfg);
  out = dump_deterministic(j);
  return 0;
}

int cmd_random_unitary_exp(const std::string& dims_text, const std::string& cut_text, const std::string& mode,
                           int samples, std::uint64_t seed, int threads, std::string& out) {
  std::vector<int> dims;
  for (const auto& d : split_labels(dims_text)) dims.push_back(std::stoi(d));
  if (dims.size() != 4 || std::any_of(dims.begin(), dims.end(), [](int d) { return d < 1; })) {
    throw Error("--dims needs four positive dimensions a,b,c,d");
  }
  const int da = dims[0], db = dims[1], dc = dims[2], dd = dims[3];
  if (da * db != dc * dd) throw Error("a unitary needs |ab| = |cd|");
  if (mode == "aligned" && (da != dc || db != dd)) throw Error("aligned mode needs |a| = |c| and |b| = |d|");
  if (mode == "swap" && (da != dd || db != dc)) throw Error("swap mode needs |a| = |d| and |b| = |c|");
  if (mode != "haar" && mode != "aligned" && mode != "swap") throw Error("--mode must be haar, aligned or swap");
  const Labels cut = split_labels(cut_text);
  const std::map<std::string, int> dim_of = {{"a", da}, {"b", db}, {"c", dc}, {"d", dd}};
  double cut_bits = 0.0;
  for (const auto& l : cut) {
    auto it = dim_of.find(l);
    if (it == dim_of.end()) throw Error("--cut labels must be among a, b, c, d");
    cut_bits += std::log2(static_cast<double>(it->second));
  }
  const double threshold = cut_bits - 1.0;
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), threads, [&](std::size_t i) {
    CounterRng rng(seed, i);
    Matrix u;
    if (mode == "haar") {
      u = haar_random_unitary(da * db, rng);
    } else {
      const Matrix h = haar_random_unitary(da, rng);
      const Matrix g = haar_random_unitary(db, rng);
      u = factorized_gate(h, g, mode == "swap");
    }
    values[i] = gate_cut_ci(u, da, db, dc, dd, cut);
  });
  const auto passed = std::count_if(values.begin(), values.end(), [&](double v) { return v > threshold; });
  Json j = {{"mode", mode},
            {"dims", dims},
            {"cut", cut},
            {"samples", samples},
            {"seed", seed},
            {"threshold_bits", threshold},
            {"pass_count", passed},
            {"pass_fraction", samples > 0 ? static_cast<double>(passed) / samples : 0.0},
            {"ci_bits", stats_json(values)},
            {"histogram", histogram_json(values)}};
  out = dump_deterministic(j);
  return 0;
}

int cmd_network_exp(const std::string& file, int samples, std::uint64_t seed, int threads, std::string& out) {
  const NetworkSpec spec = network_from_json(read_json_file(file));
  const double tol = 1e-10;
  std::vector<double> ci(static_cast<std::size_t>(samples));
  std::vector<double> worst(ci.size(), 0.0);
  std::vector<std::size_t> checked(ci.size(), 0);
  std::vector<std::size_t> failed(ci.size(), 0);
  double max_bits = region_max_bits(global_state(spec));
  parallel_for(ci.size(), threads, [&](std::size_t i) {
    const NetworkState st = global_state(reseeded(spec, seed, i));
    ci[i] = region_coherent_information(st);
    for (const auto& c : exact_omega_checks(st, tol)) {
      ++checked[i];
      worst[i] = std::max(worst[i], c.deviation);
      if (!c.passed) ++failed[i];
    }
  });
  std::size_t total_checked = 0;
  std::size_t total_failed = 0;
  for (std::size_t i = 0; i < ci.size(); ++i) {
    total_checked += checked[i];
    total_failed += failed[i];
  }
  const auto near_max =
      std::count_if(ci.begin(), ci.end(), [&](double v) { return v >= max_bits - 2.0 - 1e-12; });
  Json stats = stats_json(ci);
  stats["values"] = ci;
  Json j = {{"spec_hash", hex64(spec_hash(spec))},
            {"samples", samples},
            {"seed", seed},
            {"region_max_bits", max_bits},
            {"region_ci_bits", std::move(stats)},
            {"fraction_within_2_bits", samples > 0 ? static_cast<double>(near_max) / samples : 0.0},
            {"exact_omega_checks",
             {{"tolerance", tol},
              {"checked", total_checked},
              {"failed", total_failed},
              {"max_deviation", worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end())},
              {"all_passed", total_failed == 0}}}};
  out = dump_deterministic(j);
  return 0;
}

struct ProbeArgs {
  std::string file;
  std::string setting = "none";
  int rounds = -1;
  int classical_dim = 2;
  std::string measure = "state_ci";
  std::string side_a = "A";
  std::string side_b = "B";
  std::string target = "B";
  double slack = 1e-8;
  std::string config;
};

int cmd_locc_probe(const ProbeArgs& a, int samples, std::uint64_t seed, int threads, std::string& out) {
  const ProcessOperator w = process_from_json(read_json_file(a.file));
  LoccSetting setting;
  setting.direction = parse_direction(a.setting);
  setting.rounds = a.rounds >= 0 ? a.rounds : (setting.direction == Direction::None ? 0 : 1);
  setting.classical_dim = a.classical_dim;
  Measure m;
  if (a.measure == "state_ci") {
    m = state_ci_measure(a.target);
  } else if (a.measure == "hashing") {
    m = hashing_measure(a.target);
  } else if (a.measure == "lo_ci") {
    OptimizerConfig cfg = load_config(a.config, seed, 1);
    m = lo_ci_measure(a.target, LoFamily{}, cfg);
  } else {
    throw Error("--measure must be state_ci, hashing or lo_ci");
  }
  const ProbeReport r = monotonicity_probe(m, w, setting, samples, seed, a.side_a, a.side_b, a.target, a.slack, threads);
  Json j = probe_to_json(r);
  j["rounds"] = setting.rounds;
  j["seed"] = seed;
  out = dump_deterministic(j);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"causalproc: quantum process validation, measures and experiments"};
  app.require_subcommand(1);
  int threads = default_thread_count();
  app.add_option("--threads", threads, "Worker threads (default: CAUSALPROC_THREADS or 1)")->check(CLI::PositiveNumber);

  std::string file;
  std::string target;
  std::string config;
  std::uint64_t seed = 0;
  int samples = 0;

  auto* validate_cmd = app.add_subcommand("validate", "Check a process operator; exit 2 when invalid");
  validate_cmd->add_option("file", file, "Process JSON")->required();

  auto* ci_cmd = app.add_subcommand("ci", "Coherent information of an operator");
  ci_cmd->add_option("file", file, "Operator or process JSON")->required();
  ci_cmd->add_option("--target", target, "Comma-separated target labels")->required();

  auto* q_cmd = app.add_subcommand("channel-q", "Optimized channel coherent information");
  q_cmd->add_option("file", file, "Map JSON")->required();
  q_cmd->add_option("--config", config, "Optimizer config JSON");
  q_cmd->add_option("--seed", seed, "Seed")->required();

  std::string owner;
  int copies = 1;
  int rank = 1;
  bool mixed_outputs = false;
  auto* pci_cmd = app.add_subcommand("process-ci", "Local-operation lower bound on process coherent information");
  pci_cmd->add_option("file", file, "Process JSON")->required();
  pci_cmd->add_option("--target-owner", owner, "Owner whose systems form the target")->required();
  pci_cmd->add_option("--copies", copies, "Copies for the regularized estimate (1..3)")->check(CLI::Range(1, 3));
  pci_cmd->add_option("--rank", rank, "Kraus rank of the input channels")->check(CLI::PositiveNumber);
  pci_cmd->add_flag("--mixed-outputs", mixed_outputs, "Feed omega into party outputs");
  pci_cmd->add_option("--config", config, "Optimizer config JSON");
  pci_cmd->add_option("--seed", seed, "Seed")->required();

  std::string dims = "2,2,2,2";
  std::string cut = "a,c";
  std::string mode = "haar";
  auto* ru_cmd = app.add_subcommand("random-unitary-exp", "Cut coherent information of single random gates");
  ru_cmd->add_option("--dims", dims, "Dimensions a,b,c,d");
  ru_cmd->add_option("--cut", cut, "Target labels among a,b,c,d");
  ru_cmd->add_option("--mode", mode, "haar | aligned | swap");
  ru_cmd->add_option("--samples", samples, "Samples")->required()->check(CLI::NonNegativeNumber);
  ru_cmd->add_option("--seed", seed, "Seed")->required();

  auto* net_cmd = app.add_subcommand("network-exp", "Region coherent information over reseeded networks");
  net_cmd->add_option("--spec", file, "Network JSON")->required();
  net_cmd->add_option("--samples", samples, "Samples")->required()->check(CLI::NonNegativeNumber);
  net_cmd->add_option("--seed", seed, "Seed")->required();

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("locc-probe", "Sample LOCC protocols and track a measure");
  probe_cmd->add_option("--process", probe.file, "Process JSON")->required();
  probe_cmd->add_option("--setting", probe.setting, "none | forward | backward | two_way");
  probe_cmd->add_option("--rounds", probe.rounds, "Messages (default 0 for none, else 1)");
  probe_cmd->add_option("--classical-dim", probe.classical_dim, "Message alphabet size");
  probe_cmd->add_option("--measure", probe.measure, "state_ci | hashing | lo_ci");
  probe_cmd->add_option("--side-a", probe.side_a, "Owner on side A");
  probe_cmd->add_option("--side-b", probe.side_b, "Owner on side B");
  probe_cmd->add_option("--target", probe.target, "Owner holding the target");
  probe_cmd->add_option("--slack", probe.slack, "Allowed increase before flagging");
  probe_cmd->add_option("--config", probe.config, "Optimizer config JSON (lo_ci)");
  probe_cmd->add_option("--samples", samples, "Samples")->required()->check(CLI::NonNegativeNumber);
  probe_cmd->add_option("--seed", seed, "Seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string result;
  try {
    int code = 0;
    if (*validate_cmd) {
      code = cmd_validate(file, result);
    } else if (*ci_cmd) {
      code = cmd_ci(file, target, result);
    } else if (*q_cmd) {
      code = cmd_channel_q(file, load_config(config, seed, threads), result);
    } else if (*pci_cmd) {
      LoFamily family;
      family.feed_outputs = !mixed_outputs;
      family.input_channel_rank = rank;
      code = cmd_process_ci(file, owner, copies, family, load_config(config, seed, threads), result);
    } else if (*ru_cmd) {
      code = cmd_random_unitary_exp(dims, cut, mode, samples, seed, threads, result);
    } else if (*net_cmd) {
      code = cmd_network_exp(file, samples, seed, threads, result);
    } else if (*probe_cmd) {
      code = cmd_locc_probe(probe, samples, seed, threads, result);
    }
    out << result << std::flush;
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace causalproc
