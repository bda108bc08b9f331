#include "causalproc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace causalproc {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(std::string("missing field '") + name + "'");
  return j.at(name);
}

Labels labels_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array()) throw Error("expected a label, a label list or null");
  Labels out;
  for (const auto& x : j) {
    if (!x.is_string()) throw Error("labels must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

Json labels_to_json(const Labels& labels) {
  if (labels.empty()) return nullptr;
  if (labels.size() == 1) return labels.front();
  Json out = Json::array();
  for (const auto& l : labels) out.push_back(l);
  return out;
}

Json label_list(const Labels& labels) {
  Json out = Json::array();
  for (const auto& l : labels) out.push_back(l);
  return out;
}

Json number_list(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(x);
  return out;
}

void write_value(std::ostringstream& out, const Json& j, int depth);

bool has_object(const Json& j) {
  if (j.is_object()) return true;
  if (!j.is_array()) return false;
  for (const auto& x : j) {
    if (has_object(x)) return true;
  }
  return false;
}

void write_scalar(std::ostringstream& out, const Json& j) {
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
      out << "null";
      return;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out << buf;
    return;
  }
  out << j.dump();
}

void write_value(std::ostringstream& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad << Json(it.key()).dump() << ": ";
      write_value(out, it.value(), depth + 1);
    }
    out << "\n" << close_pad << "}";
    return;
  }
  if (j.is_array()) {
    if (!has_object(j)) {
      out << "[";
      bool first = true;
      for (const auto& x : j) {
        if (!first) out << ", ";
        first = false;
        write_value(out, x, depth + 1);
      }
      out << "]";
      return;
    }
    out << "[\n";
    bool first = true;
    for (const auto& x : j) {
      if (!first) out << ",\n";
      first = false;
      out << pad;
      write_value(out, x, depth + 1);
    }
    out << "\n" << close_pad << "]";
    return;
  }
  write_scalar(out, j);
}

std::vector<SystemId> systems_from_json(const Json& j) {
  if (!j.is_array()) throw Error("'systems' must be an array");
  std::vector<SystemId> out;
  for (const auto& s : j) {
    const int dim = field(s, "dim").get<int>();
    if (dim < 1) throw Error("system dims must be >= 1");
    out.push_back({field(s, "label").get<std::string>(), dim});
  }
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw Error("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw Error("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& x = row[static_cast<std::size_t>(c)];
      if (x.is_number()) {
        m(r, c) = x.get<double>();
      } else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
        m(r, c) = Complex(x[0].get<double>(), x[1].get<double>());
      } else {
        throw Error("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json operator_to_json(const LabeledOperator& op) {
  Json systems = Json::array();
  for (const auto& s : op.systems()) systems.push_back({{"label", s.label}, {"dim", s.dim}});
  return {{"systems", std::move(systems)}, {"matrix", matrix_to_json(op.matrix())}};
}

LabeledOperator operator_from_json(const Json& j) {
  return LabeledOperator(systems_from_json(field(j, "systems")), matrix_from_json(field(j, "matrix")));
}

Json map_to_json(const QuantumMap& m) {
  Json out = operator_to_json(m.choi());
  out["inputs"] = label_list(m.input_labels());
  out["outputs"] = label_list(m.output_labels());
  out["normalization"] = m.normalization() == Normalization::StandardChoi ? "standard" : "paper";
  if (m.kraus()) {
    Json ks = Json::array();
    for (const auto& k : *m.kraus()) ks.push_back(matrix_to_json(k));
    out["kraus"] = std::move(ks);
  }
  if (!m.teeth().empty()) {
    Json teeth = Json::array();
    for (const auto& t : m.teeth()) teeth.push_back({{"inputs", label_list(t.inputs)}, {"outputs", label_list(t.outputs)}});
    out["teeth"] = std::move(teeth);
  }
  return out;
}

QuantumMap map_from_json(const Json& j) {
  const LabeledOperator choi = operator_from_json(j);
  auto inputs = choi.systems_for(labels_from_json(field(j, "inputs")));
  auto outputs = choi.systems_for(labels_from_json(field(j, "outputs")));
  Normalization norm = Normalization::StandardChoi;
  if (j.contains("normalization")) {
    const auto name = j.at("normalization").get<std::string>();
    if (name == "paper") {
      norm = Normalization::PaperNormalized;
    } else if (name != "standard") {
      throw Error("normalization must be 'standard' or 'paper'");
    }
  }
  std::optional<KrausSet> kraus;
  if (j.contains("kraus")) {
    KrausSet ks;
    for (const auto& k : j.at("kraus")) ks.push_back(matrix_from_json(k));
    kraus = std::move(ks);
  }
  std::vector<Tooth> teeth;
  if (j.contains("teeth")) {
    for (const auto& t : j.at("teeth")) {
      teeth.push_back({labels_from_json(field(t, "inputs")), labels_from_json(field(t, "outputs"))});
    }
  }
  return QuantumMap(choi, std::move(inputs), std::move(outputs), norm, std::move(kraus), std::move(teeth));
}

Json party_to_json(const Party& p) {
  Json out = {{"name", p.name}, {"input", labels_to_json(p.input_labels())}, {"output", labels_to_json(p.output_labels())}};
  if (!p.owner.empty()) out["owner"] = p.owner;
  return out;
}

Json process_to_json(const ProcessOperator& w) {
  Json out = operator_to_json(w.op());
  Json parties = Json::array();
  for (const auto& p : w.parties()) parties.push_back(party_to_json(p));
  out["parties"] = std::move(parties);
  if (w.extended()) out["extended"] = true;
  return out;
}

ProcessOperator process_from_json(const Json& j) {
  const LabeledOperator op = operator_from_json(j);
  const Json& parties = field(j, "parties");
  if (!parties.is_array()) throw Error("'parties' must be an array");
  std::vector<Party> out;
  for (const auto& p : parties) {
    Party party;
    party.name = field(p, "name").get<std::string>();
    if (p.contains("input")) party.inputs = op.systems_for(labels_from_json(p.at("input")));
    if (p.contains("output")) party.outputs = op.systems_for(labels_from_json(p.at("output")));
    if (p.contains("owner")) party.owner = p.at("owner").get<std::string>();
    out.push_back(std::move(party));
  }
  const bool extended = j.contains("extended") && j.at("extended").get<bool>();
  return ProcessOperator(op, std::move(out), extended);
}

Json network_to_json(const NetworkSpec& net) {
  Json gates = Json::array();
  for (const auto& g : net.gates) {
    Json gj = {{"layer", g.layer}, {"sites", g.sites}};
    if (g.unitary) {
      gj["unitary"] = matrix_to_json(*g.unitary);
    } else {
      gj["unitary"] = {{"haar_seed", g.haar_seed.value_or(0)}};
    }
    gates.push_back(std::move(gj));
  }
  Json region = {{"side_a_gates", net.region.side_a_gates}, {"side_a_ends", label_list(net.region.side_a_ends)}};
  return {{"width", net.width},       {"layers", net.layers}, {"site_dim", net.site_dim},
          {"gates", std::move(gates)}, {"region", std::move(region)}};
}

NetworkSpec network_from_json(const Json& j) {
  NetworkSpec net;
  net.width = field(j, "width").get<int>();
  net.layers = field(j, "layers").get<int>();
  if (j.contains("site_dim")) net.site_dim = j.at("site_dim").get<int>();
  for (const auto& gj : field(j, "gates")) {
    Gate g;
    g.layer = field(gj, "layer").get<int>();
    g.sites = field(gj, "sites").get<std::vector<int>>();
    const Json& u = field(gj, "unitary");
    if (u.is_object()) {
      g.haar_seed = field(u, "haar_seed").get<std::uint64_t>();
    } else {
      g.unitary = matrix_from_json(u);
    }
    net.gates.push_back(std::move(g));
  }
  if (j.contains("region")) {
    const Json& r = j.at("region");
    if (r.contains("side_a_gates")) net.region.side_a_gates = r.at("side_a_gates").get<std::vector<int>>();
    if (r.contains("side_a_ends")) net.region.side_a_ends = labels_from_json(r.at("side_a_ends"));
  }
  check_network(net);
  return net;
}

Json config_to_json(const OptimizerConfig& cfg) {
  return {{"restarts", cfg.restarts},
          {"max_iterations", cfg.max_iterations},
          {"gradient_tolerance", cfg.gradient_tolerance},
          {"step_rule", cfg.step_rule == StepRule::Fixed ? "fixed" : "backtracking"},
          {"seed", cfg.seed}};
}

OptimizerConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw Error("optimizer config must be an object");
  OptimizerConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "restarts") {
      cfg.restarts = it->get<int>();
    } else if (key == "max_iterations") {
      cfg.max_iterations = it->get<int>();
    } else if (key == "gradient_tolerance") {
      cfg.gradient_tolerance = it->get<double>();
    } else if (key == "step_rule") {
      const auto rule = it->get<std::string>();
      if (rule == "fixed") {
        cfg.step_rule = StepRule::Fixed;
      } else if (rule == "backtracking") {
        cfg.step_rule = StepRule::Backtracking;
      } else {
        throw Error("step_rule must be 'fixed' or 'backtracking'");
      }
    } else if (key == "seed") {
      cfg.seed = it->get<std::uint64_t>();
    } else if (key == "threads") {
      cfg.threads = it->get<int>();
    } else {
      throw Error("unknown optimizer config field '" + key + "'");
    }
  }
  check_config(cfg);
  return cfg;
}

Json report_to_json(const ValidityReport& r) {
  return {{"valid", r.valid()},
          {"min_eigenvalue", r.min_eigenvalue},
          {"trace_deviation", r.trace_deviation},
          {"lv_residual", r.lv_residual},
          {"psd_ok", r.psd_ok},
          {"trace_ok", r.trace_ok},
          {"lv_ok", r.lv_ok}};
}

Json result_to_json(const OptimizationResult& r) {
  Json out = {{"value_bits", r.value_bits},
              {"iterations_used", r.iterations_used},
              {"converged", r.converged},
              {"restart_values", number_list(r.restart_values)},
              {"family", r.family}};
  if (!r.target.empty()) out["target"] = label_list(r.target);
  if (!r.parameters.empty()) out["parameters"] = number_list(r.parameters);
  if (r.argument) out["argument"] = operator_to_json(*r.argument);
  return out;
}

Json probe_to_json(const ProbeReport& r) {
  return {{"measure", r.measure},
          {"exact", r.exact},
          {"setting", r.setting},
          {"samples", r.samples},
          {"slack", r.slack},
          {"before", r.before},
          {"max_increase", r.max_increase},
          {"max_after", r.max_after},
          {"flagged", r.flagged},
          {"max_two_way_signaling", r.max_two_way_signaling},
          {"passed", r.passed()}};
}

std::string dump_deterministic(const Json& j) {
  std::ostringstream out;
  write_value(out, j, 0);
  out << "\n";
  return out.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed JSON in '" + path + "': " + e.what());
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t spec_hash(const NetworkSpec& net) { return fnv1a64(dump_deterministic(network_to_json(net))); }

}  // namespace causalproc
