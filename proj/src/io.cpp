#include "gasflow/io.hpp"

#include <algorithm>
#include <cmath>

namespace gasflow {

namespace {

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw SchemaError("expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string("'") + what + "' must be a number");
  return j.get<double>();
}

std::string string_field(const Json& j, const char* what) {
  if (!j.is_string()) throw SchemaError(std::string("'") + what + "' must be a string");
  return j.get<std::string>();
}

const Json& array_field(const Json& obj, const char* key) {
  const Json& arr = field(obj, key);
  if (!arr.is_array()) throw SchemaError(std::string("'") + key + "' must be an array");
  return arr;
}

Json potentials_object(const GasNetwork& net, const Eigen::VectorXd& values) {
  Json obj = Json::object();
  for (Index i = 0; i < net.num_nodes(); ++i) obj[net.node(i).id] = values[i];
  return obj;
}

Eigen::VectorXd node_vector_from(const GasNetwork& net, const Json& obj, const char* what) {
  if (!obj.is_object()) throw SchemaError(std::string("'") + what + "' must be an object");
  Eigen::VectorXd out(net.num_nodes());
  std::vector<char> seen(static_cast<std::size_t>(net.num_nodes()), 0);
  for (const auto& [id, value] : obj.items()) {
    const Index i = net.node_index(id);
    out[i] = number(value, what);
    seen[static_cast<std::size_t>(i)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw ValidationError(ValidationKind::kSizeMismatch,
                          std::string("'") + what + "' must cover every node");
  }
  return out;
}

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

GasNetwork network_from_json(const Json& doc) {
  try {
    const Json& bounds = field(doc, "bounds");
    GasNetwork net(PotentialInterval{number(field(bounds, "pi_min"), "pi_min"),
                                     number(field(bounds, "pi_max"), "pi_max")});
    for (const Json& n : array_field(doc, "nodes")) {
      std::optional<double> fixed;
      if (n.is_object() && n.contains("fixed_potential") && !n["fixed_potential"].is_null()) {
        fixed = number(n["fixed_potential"], "fixed_potential");
      }
      net.add_node(string_field(field(n, "id"), "id"), number(field(n, "balance"), "balance"),
                   fixed);
    }
    for (const Json& a : array_field(doc, "arcs")) {
      net.add_arc(string_field(field(a, "id"), "id"), string_field(field(a, "tail"), "tail"),
                  string_field(field(a, "head"), "head"), number(field(a, "beta"), "beta"));
    }
    net.validate();
    return net;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed network: ") + e.what());
  }
}

GasNetwork parse_network(std::string_view text) { return network_from_json(parse_json(text)); }

Json network_to_json(const GasNetwork& net) {
  std::vector<Index> nodes(static_cast<std::size_t>(net.num_nodes()));
  std::vector<Index> arcs(static_cast<std::size_t>(net.num_arcs()));
  for (Index i = 0; i < net.num_nodes(); ++i) nodes[static_cast<std::size_t>(i)] = i;
  for (Index a = 0; a < net.num_arcs(); ++a) arcs[static_cast<std::size_t>(a)] = a;
  std::sort(nodes.begin(), nodes.end(),
            [&](Index x, Index y) { return net.node(x).id < net.node(y).id; });
  std::sort(arcs.begin(), arcs.end(),
            [&](Index x, Index y) { return net.arc(x).id < net.arc(y).id; });

  Json doc;
  doc["bounds"] = {{"pi_min", net.bounds().pi_min}, {"pi_max", net.bounds().pi_max}};
  doc["nodes"] = Json::array();
  for (Index i : nodes) {
    const Node& n = net.node(i);
    Json jn = {{"id", n.id}, {"balance", n.balance}};
    jn["fixed_potential"] = n.fixed_potential ? Json(*n.fixed_potential) : Json(nullptr);
    doc["nodes"].push_back(std::move(jn));
  }
  doc["arcs"] = Json::array();
  for (Index a : arcs) {
    const Arc& arc = net.arc(a);
    doc["arcs"].push_back({{"id", arc.id},
                           {"tail", net.node(arc.tail).id},
                           {"head", net.node(arc.head).id},
                           {"beta", arc.beta}});
  }
  return doc;
}

std::string serialize_network(const GasNetwork& net) { return network_to_json(net).dump(2); }

Json solution_to_json(const GasNetwork& net, const StationarySolution& sol) {
  Json flows = Json::object();
  for (Index a = 0; a < net.num_arcs(); ++a) flows[net.arc(a).id] = sol.flow[a];
  return {{"potentials", potentials_object(net, sol.potentials)},
          {"flows", flows},
          {"primal", sol.primal_objective},
          {"dual", sol.dual_objective},
          {"residual", sol.residual},
          {"iterations", sol.iterations}};
}

Json maxflow_to_json(const GasNetwork& net, const MaxFlowResult& result) {
  return {{"value", result.value},
          {"gap", result.gap},
          {"bracket_width", result.bracket_width},
          {"target", result.target == BisectionTarget::kTerminalGap ? "terminal_gap" : "full_range"},
          {"solution", solution_to_json(net, result.solution)}};
}

Json report_to_json(const KStageReport& report) {
  Json doc = {{"feasible", report.feasible},
              {"max_balance_error", report.max_balance_error},
              {"max_bound_violation", report.max_bound_violation},
              {"is_stationary", report.is_stationary}};
  doc["st_value"] = report.st_value ? Json(*report.st_value) : Json(nullptr);
  return doc;
}

Json kstage_to_json(const GasNetwork& net, const StagePotentials& stages,
                    const BalanceVector& target_b) {
  Json doc;
  doc["k"] = stages.size();
  doc["stages"] = Json::array();
  for (const auto& pi : stages) doc["stages"].push_back(potentials_object(net, pi));
  doc["target_b"] = potentials_object(net, target_b);
  return doc;
}

KStageDocument kstage_from_json(const GasNetwork& net, const Json& doc) {
  try {
    KStageDocument out;
    for (const Json& stage : array_field(doc, "stages")) {
      out.stages.push_back(node_vector_from(net, stage, "stages"));
    }
    if (doc.contains("k") && doc["k"].get<std::size_t>() != out.stages.size()) {
      throw SchemaError("'k' does not match the number of stages");
    }
    out.target_b = doc.contains("target_b") ? node_vector_from(net, doc["target_b"], "target_b")
                                            : net.balances();
    return out;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed k-stage document: ") + e.what());
  }
}

Json x3c_to_json(const reduction::X3CInstance& inst) {
  Json triples = Json::array();
  for (const auto& t : inst.triples) triples.push_back({t[0], t[1], t[2]});
  return {{"elements", inst.elements}, {"triples", triples}};
}

reduction::X3CInstance x3c_from_json(const Json& doc) {
  try {
    reduction::X3CInstance inst;
    for (const Json& e : array_field(doc, "elements")) {
      inst.elements.push_back(string_field(e, "elements"));
    }
    for (const Json& t : array_field(doc, "triples")) {
      if (!t.is_array() || t.size() != 3) throw SchemaError("each triple needs three elements");
      inst.triples.push_back({string_field(t[0], "triples"), string_field(t[1], "triples"),
                              string_field(t[2], "triples")});
    }
    inst.validate();
    return inst;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed X3C instance: ") + e.what());
  }
}

Json reduction_sidecar_to_json(const reduction::ReducedInstance& red) {
  Json decision = Json::object();
  for (std::size_t c = 0; c < red.decision_nodes.size(); ++c) {
    decision[std::to_string(c)] = red.decision_nodes[c];
  }
  Json elements = Json::object();
  for (const auto& [e, nodes] : red.element_nodes) elements[e] = {nodes.first, nodes.second};
  return {{"decision_nodes", decision},
          {"element_nodes", elements},
          {"forced_potentials", red.forced_potentials},
          {"instance", x3c_to_json(red.source)}};
}

reduction::ReducedInstance reduction_from_json(const GasNetwork& net, const Json& sidecar) {
  try {
    reduction::ReducedInstance red;
    red.network = net;
    red.target_b = net.balances();
    red.source = x3c_from_json(field(sidecar, "instance"));
    const Json& decision = field(sidecar, "decision_nodes");
    red.decision_nodes.resize(red.source.triples.size());
    for (std::size_t c = 0; c < red.source.triples.size(); ++c) {
      red.decision_nodes[c] = string_field(field(decision, std::to_string(c).c_str()), "decision_nodes");
      net.node_index(red.decision_nodes[c]);
    }
    if (sidecar.contains("element_nodes")) {
      for (const auto& [e, pair] : sidecar["element_nodes"].items()) {
        red.element_nodes[e] = {pair.at(0).get<std::string>(), pair.at(1).get<std::string>()};
      }
    }
    if (sidecar.contains("forced_potentials")) {
      for (const auto& [id, value] : sidecar["forced_potentials"].items()) {
        red.forced_potentials[id] = number(value, "forced_potentials");
      }
    }
    return red;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed reduction sidecar: ") + e.what());
  }
}

}  // namespace gasflow
