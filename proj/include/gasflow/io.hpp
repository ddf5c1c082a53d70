#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "gasflow/kstage.hpp"
#include "gasflow/maxflow.hpp"
#include "gasflow/reduction.hpp"

namespace gasflow {

using Json = nlohmann::json;

/// Parses and validates a network document
///   {"bounds": {"pi_min", "pi_max"},
///    "nodes": [{"id", "balance", "fixed_potential": number|null}],
///    "arcs":  [{"id", "tail", "head", "beta"}]}
/// Throws SchemaError for malformed input and ValidationError for a
/// document that violates a network invariant.
GasNetwork parse_network(std::string_view text);

/// Canonical JSON: nodes and arcs sorted by id, shortest round-trip floats.
std::string serialize_network(const GasNetwork& net);
Json network_to_json(const GasNetwork& net);
GasNetwork network_from_json(const Json& doc);

Json solution_to_json(const GasNetwork& net, const StationarySolution& sol);
Json maxflow_to_json(const GasNetwork& net, const MaxFlowResult& result);
Json report_to_json(const KStageReport& report);

struct KStageDocument {
  StagePotentials stages;
  BalanceVector target_b;
};

/// {"k": n, "stages": [{node: potential}], "target_b": {node: balance}}
Json kstage_to_json(const GasNetwork& net, const StagePotentials& stages,
                    const BalanceVector& target_b);
/// Missing target_b defaults to the network balances.
KStageDocument kstage_from_json(const GasNetwork& net, const Json& doc);

/// {"elements": [s], "triples": [[s, s, s]]}
Json x3c_to_json(const reduction::X3CInstance& inst);
reduction::X3CInstance x3c_from_json(const Json& doc);

/// Decode sidecar of a reduced instance; "decision_nodes" maps the triple
/// index (as a string key) to the node id.
Json reduction_sidecar_to_json(const reduction::ReducedInstance& red);
reduction::ReducedInstance reduction_from_json(const GasNetwork& net, const Json& sidecar);

/// Parses text as JSON, mapping parse failures to SchemaError.
Json parse_json(std::string_view text);

}  // namespace gasflow
