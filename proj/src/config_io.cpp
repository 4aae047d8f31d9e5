#include "mfc/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>

#include "mfc/errors.hpp"

namespace mfc {

// ---------------------------------------------------------------------------
// Builtins

LinearTrackingProblem LinearSystemConfig::to_problem(double tolerance) const {
  LinearTrackingProblem p;
  p.a = a;
  p.b = b;
  p.controllers = stagger_params(base_params, std::max<std::size_t>(b.size(), 1), stagger_rho);
  p.controllers.resize(b.size());
  p.filters.assign(b.size(), FirstOrderFilter(tau));
  p.horizon = horizon;
  p.tolerance = tolerance;
  return p;
}

void RunConfig::validate() const {
  try {
    if (decimate == 0) throw ValidationError("decimate must be at least 1");
    if (!(std::isfinite(tolerance) && tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    if (mode == RunMode::kTrain) {
      scenario.validate();
    } else {
      system.to_problem(tolerance).validate();
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }
}

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"fig4", "Fig. 4", "short-term behavior, initial training data, W7 dropped"},
      {"fig5", "Fig. 5", "training data changes: x1=0.15, x2=0.7 at k1, then y_train=0.6 at k2"},
      {"fig6", "Fig. 6", "topology change: W4 dropped at k1"},
      {"fig7", "Fig. 7",
       "x1=0.15, x2=0.8 at k1, W7 dropped at k2, then y_train=0.6 at k3"},
      {"linsolve3", "Fig. 2", "3x3 linear system solved by one controller per unknown"},
  };
  return catalog;
}

RunConfig builtin_config(const std::string& name) {
  RunConfig cfg;
  if (name == "linsolve3") {
    const LinearTrackingProblem p = linsolve3_problem();
    cfg.mode = RunMode::kLinsolve;
    cfg.system.a = p.a;
    cfg.system.b = p.b;
    cfg.system.base_params = p.controllers.front();
    cfg.system.stagger_rho = 0.5;
    cfg.system.tau = p.filters.front().tau;
    cfg.system.horizon = p.horizon;
    cfg.tolerance = p.tolerance;
    return cfg;
  }
  const auto& catalog = builtin_catalog();
  const std::vector<Scenario> scenarios = builtin_scenarios();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (catalog[i].name == name) {
      cfg.mode = RunMode::kTrain;
      cfg.scenario = scenarios[i];
      return cfg;
    }
  }
  throw ValidationError("unknown builtin '" + name + "'");
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "";
  return "line " + std::to_string(mark.line + 1) + ": ";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& key, const std::string& msg) {
  throw ValidationError(where(node) + "'" + key + "': " + msg);
}

void check_keys(const YAML::Node& node, const std::string& context,
                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) fail(node, context, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kv.first, key, "unknown key in " + context);
    }
  }
}

double to_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    fail(node, key, "expected a number, got '" + node.Scalar() + "'");
  }
}

std::uint64_t to_count(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a non-negative integer");
  const std::string& s = node.Scalar();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(node, key, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::string to_string(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail(node, key, "expected a string");
  return node.Scalar();
}

std::vector<double> to_vector(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) fail(node, key, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(to_double(item, key));
  return out;
}

/// 1-based label in the file -> 0-based index.
std::size_t to_index(const YAML::Node& node, const std::string& key, std::size_t count) {
  const std::uint64_t label = to_count(node, key);
  if (label < 1 || label > count) {
    fail(node, key, "index " + std::to_string(label) + " out of range 1.." + std::to_string(count));
  }
  return static_cast<std::size_t>(label - 1);
}

ControllerParams parse_controller(const YAML::Node& node, ControllerParams p) {
  check_keys(node, "controller", {"kp", "ki", "k_alpha", "k_beta", "dt", "decay"});
  if (node["kp"]) p.kp = to_double(node["kp"], "kp");
  if (node["ki"]) p.ki = to_double(node["ki"], "ki");
  if (node["k_alpha"]) p.k_alpha = to_double(node["k_alpha"], "k_alpha");
  if (node["k_beta"]) p.k_beta = to_double(node["k_beta"], "k_beta");
  if (node["dt"]) p.dt = to_double(node["dt"], "dt");
  if (node["decay"]) {
    const std::string decay = to_string(node["decay"], "decay");
    if (decay == "time") {
      p.decay = InitDecay::kElapsedTime;
    } else if (decay == "iteration") {
      p.decay = InitDecay::kIteration;
    } else {
      fail(node["decay"], "decay", "expected 'time' or 'iteration'");
    }
  }
  try {
    p.validate();
  } catch (const InvalidParams& e) {
    // Point at the first offending key when there is one.
    for (const char* key : {"kp", "ki", "dt", "k_alpha", "k_beta"}) {
      if (node[key] && std::string(e.what()).find(key) != std::string::npos) {
        fail(node[key], key, e.what());
      }
    }
    fail(node, "controller", e.what());
  }
  return p;
}

NodeKind to_kind(const YAML::Node& node) {
  const std::string kind = to_string(node, "kind");
  if (kind == "input") return NodeKind::kInput;
  if (kind == "hidden") return NodeKind::kHidden;
  if (kind == "output") return NodeKind::kOutput;
  fail(node, "kind", "expected input, hidden or output");
}

FeedforwardNet parse_network(const YAML::Node& node, const FeedforwardNet& current) {
  check_keys(node, "network", {"w_max", "nodes", "edges", "weights", "disabled"});
  double w_max = current.w_max();
  if (node["w_max"]) w_max = to_double(node["w_max"], "w_max");

  std::vector<Node> nodes = current.nodes();
  std::vector<Edge> edges = current.edges();
  if (node["nodes"]) {
    if (!node["edges"]) fail(node, "network", "'nodes' requires 'edges'");
    const YAML::Node& list = node["nodes"];
    if (!list.IsSequence()) fail(list, "nodes", "expected a list");
    nodes.clear();
    for (const auto& item : list) {
      check_keys(item, "node", {"id", "kind"});
      if (!item["id"] || !item["kind"]) fail(item, "node", "needs 'id' and 'kind'");
      nodes.push_back({to_string(item["id"], "id"), to_kind(item["kind"])});
    }
  }
  if (node["edges"]) {
    const YAML::Node& list = node["edges"];
    if (!list.IsSequence()) fail(list, "edges", "expected a list");
    const std::size_t q = list.size();
    edges.clear();
    auto find_node = [&](const YAML::Node& ref, const std::string& key) {
      const std::string id = to_string(ref, key);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return i;
      }
      fail(ref, key, "unknown node '" + id + "'");
    };
    for (const auto& item : list) {
      check_keys(item, "edge", {"from", "to", "weight"});
      if (!item["from"] || !item["to"] || !item["weight"]) {
        fail(item, "edge", "needs 'from', 'to' and 'weight'");
      }
      edges.push_back({find_node(item["from"], "from"), find_node(item["to"], "to"),
                       to_index(item["weight"], "weight", q)});
    }
  }

  FeedforwardNet net = [&] {
    try {
      return FeedforwardNet(nodes, edges, w_max);
    } catch (const Error& e) {
      fail(node, "network", e.what());
    }
  }();

  if (node["weights"]) {
    const std::vector<double> w = to_vector(node["weights"], "weights");
    if (w.size() != net.weight_count()) fail(node["weights"], "weights", "length must equal the edge count");
    net.set_weights(w);
  } else if (!node["nodes"] && !node["edges"]) {
    net.set_weights(current.weights());
  }
  if (node["disabled"]) {
    const YAML::Node& list = node["disabled"];
    if (!list.IsSequence()) fail(list, "disabled", "expected a list of weight labels");
    for (const auto& item : list) net.set_mask(to_index(item, "disabled", net.weight_count()), false);
  }
  return net;
}

void parse_sample(const YAML::Node& node, TrainingSample& sample) {
  check_keys(node, "sample", {"x", "y"});
  if (node["x"]) sample.x = to_vector(node["x"], "x");
  if (node["y"]) {
    sample.y = to_double(node["y"], "y");
    if (!(std::abs(sample.y) < 1.0)) fail(node["y"], "y", "|y_train| must be < 1 (tanh output)");
  }
}

ScenarioEvent parse_event(const YAML::Node& node, const FeedforwardNet& net) {
  check_keys(node, "event", {"at", "set_input", "set_reference", "drop", "restore"});
  if (!node["at"]) fail(node, "event", "missing 'at'");
  ScenarioEvent event;
  event.at = to_count(node["at"], "at");
  int actions = 0;
  if (const YAML::Node& n = node["set_input"]) {
    ++actions;
    check_keys(n, "set_input", {"input", "value"});
    if (!n["input"] || !n["value"]) fail(n, "set_input", "needs 'input' and 'value'");
    event.action = SetInput{to_index(n["input"], "input", net.input_count()), to_double(n["value"], "value")};
  }
  if (const YAML::Node& n = node["set_reference"]) {
    ++actions;
    const double v = to_double(n, "set_reference");
    if (!(std::abs(v) < 1.0)) fail(n, "set_reference", "|y_train| must be < 1 (tanh output)");
    event.action = SetReference{v};
  }
  if (const YAML::Node& n = node["drop"]) {
    ++actions;
    event.action = DropWeight{to_index(n, "drop", net.weight_count())};
  }
  if (const YAML::Node& n = node["restore"]) {
    ++actions;
    event.action = RestoreWeight{to_index(n, "restore", net.weight_count())};
  }
  if (actions != 1) fail(node, "event", "needs exactly one of set_input, set_reference, drop, restore");
  return event;
}

Matrix parse_matrix(const YAML::Node& node) {
  if (!node.IsSequence()) fail(node, "a", "expected a list of rows");
  Matrix a;
  for (const auto& row : node) a.push_back(to_vector(row, "a"));
  return a;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ParseError("config must be a YAML mapping");
  check_keys(root, "config",
             {"mode", "builtin", "output", "decimate", "tolerance", "controller", "stagger_rho",
              "tau", "psi0", "horizon", "network", "sample", "events", "system"});

  RunConfig cfg;
  if (root["builtin"]) {
    const std::string name = to_string(root["builtin"], "builtin");
    try {
      cfg = builtin_config(name);
    } catch (const ValidationError& e) {
      fail(root["builtin"], "builtin", e.what());
    }
  }
  if (root["mode"]) {
    const std::string mode = to_string(root["mode"], "mode");
    RunMode parsed;
    if (mode == "train") {
      parsed = RunMode::kTrain;
    } else if (mode == "linsolve") {
      parsed = RunMode::kLinsolve;
    } else {
      fail(root["mode"], "mode", "expected 'train' or 'linsolve'");
    }
    if (root["builtin"] && parsed != cfg.mode) fail(root["mode"], "mode", "conflicts with the builtin's mode");
    cfg.mode = parsed;
  }
  const bool train = cfg.mode == RunMode::kTrain;

  if (root["output"]) cfg.output = to_string(root["output"], "output");
  if (root["decimate"]) {
    cfg.decimate = to_count(root["decimate"], "decimate");
    if (cfg.decimate == 0) fail(root["decimate"], "decimate", "must be at least 1");
  }
  if (root["tolerance"]) {
    cfg.tolerance = to_double(root["tolerance"], "tolerance");
    if (!(cfg.tolerance > 0.0)) fail(root["tolerance"], "tolerance", "must be positive");
  }

  if (root["controller"]) {
    if (train) {
      cfg.scenario.base_params = parse_controller(root["controller"], cfg.scenario.base_params);
    } else {
      cfg.system.base_params = parse_controller(root["controller"], cfg.system.base_params);
    }
  }
  if (root["stagger_rho"]) {
    const double rho = to_double(root["stagger_rho"], "stagger_rho");
    if (!(rho > 0.0 && rho <= 1.0)) fail(root["stagger_rho"], "stagger_rho", "must lie in (0, 1]");
    (train ? cfg.scenario.stagger_rho : cfg.system.stagger_rho) = rho;
  }
  if (root["tau"]) {
    const double tau = to_double(root["tau"], "tau");
    if (!(tau > 0.0)) fail(root["tau"], "tau", "must be positive");
    (train ? cfg.scenario.tau : cfg.system.tau) = tau;
  }
  if (root["horizon"]) {
    const std::uint64_t horizon = to_count(root["horizon"], "horizon");
    if (horizon == 0) fail(root["horizon"], "horizon", "must be at least 1");
    (train ? cfg.scenario.horizon : cfg.system.horizon) = horizon;
  }

  for (const char* key : {"psi0", "network", "sample", "events"}) {
    if (!train && root[key]) fail(root[key], key, "only valid in train mode");
  }
  if (train && root["system"]) fail(root["system"], "system", "only valid in linsolve mode");

  if (train) {
    Scenario& sc = cfg.scenario;
    if (root["psi0"]) sc.psi0 = to_double(root["psi0"], "psi0");
    if (root["network"]) sc.net = parse_network(root["network"], sc.net);
    if (root["sample"]) parse_sample(root["sample"], sc.initial_sample);
    if (sc.initial_sample.x.size() != sc.net.input_count()) {
      fail(root["sample"] ? root["sample"] : root, "sample",
           "needs " + std::to_string(sc.net.input_count()) + " input values");
    }
    if (root["events"]) {
      const YAML::Node& list = root["events"];
      if (!list.IsSequence()) fail(list, "events", "expected a list");
      sc.events.clear();
      for (const auto& item : list) {
        ScenarioEvent event = parse_event(item, sc.net);
        if (!sc.events.empty() && event.at < sc.events.back().at) {
          fail(item, "at", "events must be listed in iteration order");
        }
        if (event.at > sc.horizon) {
          fail(item["at"], "at", "event at " + std::to_string(event.at) + " lies beyond the horizon " +
                                     std::to_string(sc.horizon));
        }
        sc.events.push_back(event);
      }
    }
  } else if (root["system"]) {
    const YAML::Node& sys = root["system"];
    check_keys(sys, "system", {"a", "b"});
    if (sys["a"]) cfg.system.a = parse_matrix(sys["a"]);
    if (sys["b"]) cfg.system.b = to_vector(sys["b"], "b");
    const std::size_t n = cfg.system.b.size();
    if (n == 0) fail(sys, "b", "must not be empty");
    if (cfg.system.a.size() != n) fail(sys, "a", "needs one row per entry of b");
    for (const Vector& row : cfg.system.a) {
      if (row.size() != n) fail(sys["a"], "a", "must be square with the size of b");
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

void emit_vector(YAML::Emitter& out, const std::vector<double>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double x : v) out << format_double(x);
  out << YAML::EndSeq;
}

void emit_controller(YAML::Emitter& out, const ControllerParams& p) {
  out << YAML::Key << "controller" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kp" << YAML::Value << format_double(p.kp);
  out << YAML::Key << "ki" << YAML::Value << format_double(p.ki);
  out << YAML::Key << "k_alpha" << YAML::Value << format_double(p.k_alpha);
  out << YAML::Key << "k_beta" << YAML::Value << format_double(p.k_beta);
  out << YAML::Key << "dt" << YAML::Value << format_double(p.dt);
  out << YAML::Key << "decay" << YAML::Value
      << (p.decay == InitDecay::kElapsedTime ? "time" : "iteration");
  out << YAML::EndMap;
}

const char* kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInput: return "input";
    case NodeKind::kOutput: return "output";
    case NodeKind::kHidden: break;
  }
  return "hidden";
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  const bool train = cfg.mode == RunMode::kTrain;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << (train ? "train" : "linsolve");
  if (!cfg.output.empty()) out << YAML::Key << "output" << YAML::Value << cfg.output;
  out << YAML::Key << "decimate" << YAML::Value << std::to_string(cfg.decimate);
  out << YAML::Key << "tolerance" << YAML::Value << format_double(cfg.tolerance);

  if (train) {
    const Scenario& sc = cfg.scenario;
    emit_controller(out, sc.base_params);
    out << YAML::Key << "stagger_rho" << YAML::Value << format_double(sc.stagger_rho);
    out << YAML::Key << "tau" << YAML::Value << format_double(sc.tau);
    out << YAML::Key << "psi0" << YAML::Value << format_double(sc.psi0);
    out << YAML::Key << "horizon" << YAML::Value << std::to_string(sc.horizon);

    const FeedforwardNet& net = sc.net;
    out << YAML::Key << "network" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "w_max" << YAML::Value << format_double(net.w_max());
    out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
    for (const Node& n : net.nodes()) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id << YAML::Key
          << "kind" << YAML::Value << kind_name(n.kind) << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
    for (const Edge& e : net.edges()) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value
          << net.nodes()[e.from].id << YAML::Key << "to" << YAML::Value << net.nodes()[e.to].id
          << YAML::Key << "weight" << YAML::Value << std::to_string(e.weight + 1) << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "weights" << YAML::Value;
    emit_vector(out, net.weights());
    std::vector<std::string> disabled;
    for (std::size_t i = 0; i < net.weight_count(); ++i) {
      if (!net.enabled(i)) disabled.push_back(std::to_string(i + 1));
    }
    if (!disabled.empty()) out << YAML::Key << "disabled" << YAML::Value << YAML::Flow << disabled;
    out << YAML::EndMap;

    out << YAML::Key << "sample" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "x" << YAML::Value;
    emit_vector(out, sc.initial_sample.x);
    out << YAML::Key << "y" << YAML::Value << format_double(sc.initial_sample.y);
    out << YAML::EndMap;

    out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
    for (const ScenarioEvent& ev : sc.events) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "at" << YAML::Value << std::to_string(ev.at);
      std::visit(
          [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SetInput>) {
              out << YAML::Key << "set_input" << YAML::Value << YAML::BeginMap << YAML::Key << "input"
                  << YAML::Value << std::to_string(a.index + 1) << YAML::Key << "value" << YAML::Value
                  << format_double(a.value) << YAML::EndMap;
            } else if constexpr (std::is_same_v<T, SetReference>) {
              out << YAML::Key << "set_reference" << YAML::Value << format_double(a.value);
            } else if constexpr (std::is_same_v<T, DropWeight>) {
              out << YAML::Key << "drop" << YAML::Value << std::to_string(a.index + 1);
            } else {
              out << YAML::Key << "restore" << YAML::Value << std::to_string(a.index + 1);
            }
          },
          ev.action);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  } else {
    const LinearSystemConfig& sys = cfg.system;
    emit_controller(out, sys.base_params);
    out << YAML::Key << "stagger_rho" << YAML::Value << format_double(sys.stagger_rho);
    out << YAML::Key << "tau" << YAML::Value << format_double(sys.tau);
    out << YAML::Key << "horizon" << YAML::Value << std::to_string(sys.horizon);
    out << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "a" << YAML::Value << YAML::BeginSeq;
    for (const Vector& row : sys.a) emit_vector(out, row);
    out << YAML::EndSeq;
    out << YAML::Key << "b" << YAML::Value;
    emit_vector(out, sys.b);
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Traces

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

void finish_output(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw IoError("failed writing '" + path + "'");
}

}  // namespace

void write_trace(std::ostream& os, const std::vector<TraceRecord>& records,
                 std::size_t weight_count, std::uint64_t decimation) {
  if (decimation == 0) throw InvalidParams("decimation must be at least 1");
  os << "k,t,y,y_ref";
  for (std::size_t i = 1; i <= weight_count; ++i) os << ",w" << i;
  for (std::size_t i = 1; i <= weight_count; ++i) os << ",u" << i;
  os << '\n';
  for (const TraceRecord& r : records) {
    if (r.k % decimation != 0) continue;
    os << r.k << ',' << format_double(r.t) << ',' << format_double(r.y) << ','
       << format_double(r.y_ref);
    for (double w : r.w) os << ',' << format_double(w);
    for (double u : r.u) os << ',' << format_double(u);
    os << '\n';
  }
}

void write_trace(const std::string& path, const std::vector<TraceRecord>& records,
                 std::size_t weight_count, std::uint64_t decimation) {
  std::ofstream os = open_output(path);
  write_trace(os, records, weight_count, decimation);
  finish_output(os, path);
}

void write_linsolve_trace(std::ostream& os, const LinearSolveResult& result, const Vector& b,
                          std::uint64_t decimation) {
  if (decimation == 0) throw InvalidParams("decimation must be at least 1");
  const std::size_t n = b.size();
  os << 'k';
  for (const char* prefix : {"y", "b", "x"}) {
    for (std::size_t i = 1; i <= n; ++i) os << ',' << prefix << i;
  }
  os << '\n';
  for (std::size_t idx = 0; idx < result.x_trace.size(); ++idx) {
    const std::uint64_t k = idx + 1;
    if (k % decimation != 0) continue;
    os << k;
    for (double v : result.y_trace[idx]) os << ',' << format_double(v);
    for (double v : b) os << ',' << format_double(v);
    for (double v : result.x_trace[idx]) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_linsolve_trace(const std::string& path, const LinearSolveResult& result,
                          const Vector& b, std::uint64_t decimation) {
  std::ofstream os = open_output(path);
  write_linsolve_trace(os, result, b, decimation);
  finish_output(os, path);
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t begin = 0;
    while (true) {
      const std::size_t comma = s.find(',', begin);
      out.push_back(s.substr(begin, comma - begin));
      if (comma == std::string::npos) break;
      begin = comma + 1;
    }
    return out;
  };
  if (!std::getline(is, line)) throw IoError("empty CSV input");
  table.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line)) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw IoError("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.header.size()) {
      throw IoError("CSV line " + std::to_string(line_no) + ": wrong column count");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace mfc
