#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gasflow/gallery.hpp"
#include "gasflow/io.hpp"

namespace gasflow::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write file " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

GasNetwork load_network(const std::string& path) { return parse_network(read_file(path)); }

struct Options {
  std::string net;
  std::string stages;
  std::string source;
  std::string sink;
  std::string which;
  std::string in;
  std::string out;
  std::string reduced;
  double tol = 1e-9;
  int k = 2;
  int budget = 64;
  std::uint64_t seed = 0;
  int q = 4;
  double eps = 0.5;
  int ell = 2;
};

CommandResult ok(const Json& doc) { return {kOk, doc.dump(2)}; }

CommandResult cmd_solve_stationary(const Options& o) {
  const GasNetwork net = load_network(o.net);
  SolverConfig cfg;
  cfg.balance_tol = o.tol;
  return ok(solution_to_json(net, solve_b_flow(net, std::nullopt, cfg)));
}

CommandResult cmd_max_st_flow(const Options& o) {
  const GasNetwork net = load_network(o.net);
  return ok(maxflow_to_json(net, max_stationary_st_flow(net, o.source, o.sink)));
}

CommandResult cmd_verify(const Options& o) {
  const GasNetwork net = load_network(o.net);
  const KStageDocument doc = kstage_from_json(net, parse_json(read_file(o.stages)));
  const KStageReport report = verify_kstage(net, doc.stages, doc.target_b, net.bounds(), o.tol);
  return {report.feasible ? kOk : kNotFound, report_to_json(report).dump(2)};
}

SearchConfig search_config(const GasNetwork& net, const Options& o) {
  SearchConfig cfg;
  cfg.budget = o.budget;
  cfg.seed = o.seed;
  cfg.structured_starts = gallery::structured_starts(net, o.k);
  return cfg;
}

CommandResult cmd_search_kstage(const Options& o) {
  const GasNetwork net = load_network(o.net);
  const SearchResult res = search_kstage_max_st(net, o.source, o.sink, o.k, search_config(net, o));
  BalanceVector target = BalanceVector::Zero(net.num_nodes());
  target[net.node_index(o.source)] = res.value;
  target[net.node_index(o.sink)] = -res.value;
  Json doc = kstage_to_json(net, res.stages, target);
  doc["value"] = res.value;
  doc["best_start"] = res.best_start;
  doc["feasible_starts"] = res.feasible_starts;
  return ok(doc);
}

CommandResult cmd_search_bflow(const Options& o) {
  const GasNetwork net = load_network(o.net);
  const auto stages = search_kstage_b_feasible(net, net.balances(), o.k, search_config(net, o));
  if (!stages) return {kNotFound, Json{{"found", false}}.dump(2)};
  Json doc = kstage_to_json(net, *stages, net.balances());
  doc["found"] = true;
  return ok(doc);
}

CommandResult cmd_gen(const Options& o) {
  const fs::path dir(o.out);
  Json files = Json::array();
  auto emit = [&](const std::string& name, const Json& doc) {
    write_file(dir / name, doc.dump(2));
    files.push_back((dir / name).string());
  };
  if (o.which == "example1") {
    const auto ex = gallery::gen_example1();
    emit("network.json", network_to_json(ex.network));
    emit("stages.json", kstage_to_json(ex.network, ex.stages, ex.target_b));
  } else if (o.which == "example2" || o.which == "serial") {
    const bool serial = o.which == "serial";
    const GasNetwork net = serial ? gallery::gen_serial(o.ell) : gallery::gen_example2();
    const StagePotentials stages =
        serial ? gallery::gen_serial_instationary(o.ell) : gallery::gen_example2_instationary();
    BalanceVector target = BalanceVector::Zero(net.num_nodes());
    target[net.node_index("s")] = 2.0 - std::sqrt(2.0);
    target[net.node_index("t")] = -(2.0 - std::sqrt(2.0));
    emit("network.json", network_to_json(net));
    emit("stages.json", kstage_to_json(net, stages, target));
  } else if (o.which == "example3") {
    const auto ex = gallery::gen_example3({o.q, o.eps});
    emit("network.json", network_to_json(ex.network));
    emit("stages.json", kstage_to_json(ex.network, ex.stages, ex.network.balances()));
    emit("stationary.json",
         kstage_to_json(ex.network, {ex.stationary, ex.stationary}, ex.network.balances()));
  } else if (o.which == "x3c-demo") {
    const reduction::X3CInstance inst{{"1", "2", "3"}, {{"1", "2", "3"}}};
    const auto red = reduction::reduce_x3c(inst);
    emit("instance.json", x3c_to_json(inst));
    emit("network.json", network_to_json(red.network));
    emit("decode.json", reduction_sidecar_to_json(red));
    emit("stages.json",
         kstage_to_json(red.network, reduction::assemble_witness(red, {0}), red.target_b));
  } else {
    std::cerr << "unknown instance '" << o.which << "'\n";
    return {kInputError, ""};
  }
  return ok(Json{{"files", files}});
}

CommandResult cmd_reduce(const Options& o) {
  const auto inst = x3c_from_json(parse_json(read_file(o.in)));
  const auto red = reduction::reduce_x3c(inst);
  const fs::path dir(o.out);
  write_file(dir / "network.json", serialize_network(red.network));
  write_file(dir / "decode.json", reduction_sidecar_to_json(red).dump(2));
  return ok(Json{{"nodes", red.network.num_nodes()},
                 {"arcs", red.network.num_arcs()},
                 {"files", {(dir / "network.json").string(), (dir / "decode.json").string()}}});
}

CommandResult cmd_check_x3c(const Options& o) {
  const auto inst = x3c_from_json(parse_json(read_file(o.in)));
  const auto cover = reduction::solve_x3c_bruteforce(inst);
  if (!cover) return {kNotFound, Json{{"cover", nullptr}}.dump(2)};
  return ok(Json{{"cover", *cover}});
}

CommandResult cmd_decode(const Options& o) {
  const fs::path dir(o.reduced);
  const GasNetwork net = load_network((dir / "network.json").string());
  const auto red = reduction_from_json(net, parse_json(read_file((dir / "decode.json").string())));
  const KStageDocument doc = kstage_from_json(net, parse_json(read_file(o.stages)));
  const KStageReport report = verify_kstage(net, doc.stages, red.target_b, net.bounds(), o.tol);
  if (!report.feasible) {
    std::cerr << "stages do not form a feasible 2-stage flow for this instance\n";
    return {kNotFound, Json{{"cover", nullptr}, {"verify", report_to_json(report)}}.dump(2)};
  }
  const auto cover = reduction::decode_cover(red, doc.stages);
  if (!cover) return {kNotFound, Json{{"cover", nullptr}}.dump(2)};
  return ok(Json{{"cover", *cover}});
}

CommandResult cmd_profile(const Options& o) {
  const GasNetwork net = load_network(o.net);
  const KStageDocument doc = kstage_from_json(net, parse_json(read_file(o.stages)));
  std::ostringstream csv;
  csv.precision(17);
  csv << "node,stage,potential\n";
  for (Index v = 0; v < net.num_nodes(); ++v) {
    for (std::size_t i = 0; i < doc.stages.size(); ++i) {
      csv << net.node(v).id << ',' << i + 1 << ',' << doc.stages[i][v] << '\n';
    }
  }
  write_file(o.out, csv.str());
  return ok(Json{{"rows", net.num_nodes() * static_cast<Index>(doc.stages.size())},
                 {"file", o.out}});
}

}  // namespace

CommandResult run(int argc, const char* const* argv) {
  CLI::App app{"Stationary and k-stage gas network flows"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve-stationary", "Solve the stationary b-flow");
  solve->add_option("--net", o.net)->required();
  solve->add_option("--tol", o.tol);

  auto* maxflow = app.add_subcommand("max-st-flow", "Maximum stationary s-t-flow");
  maxflow->add_option("--net", o.net)->required();
  maxflow->add_option("--source", o.source)->required();
  maxflow->add_option("--sink", o.sink)->required();

  auto* verify = app.add_subcommand("verify-kstage", "Verify a k-stage flow");
  verify->add_option("--net", o.net)->required();
  verify->add_option("--stages", o.stages)->required();
  verify->add_option("--tol", o.tol);

  auto* search = app.add_subcommand("search-kstage", "Search a maximum k-stage s-t-flow");
  search->add_option("--net", o.net)->required();
  search->add_option("--source", o.source)->required();
  search->add_option("--sink", o.sink)->required();
  search->add_option("--k", o.k)->required();
  search->add_option("--budget", o.budget)->required();
  search->add_option("--seed", o.seed)->required();

  auto* bflow = app.add_subcommand("search-bflow", "Search a feasible k-stage b-flow");
  bflow->add_option("--net", o.net)->required();
  bflow->add_option("--k", o.k)->required();
  bflow->add_option("--budget", o.budget)->required();
  bflow->add_option("--seed", o.seed)->required();

  auto* gen = app.add_subcommand("gen", "Write a gallery instance");
  gen->add_option("--which", o.which)
      ->required()
      ->check(CLI::IsMember({"example1", "example2", "example3", "serial", "x3c-demo"}));
  gen->add_option("--q", o.q);
  gen->add_option("--eps", o.eps);
  gen->add_option("--ell", o.ell);
  gen->add_option("--out", o.out)->required();

  auto* reduce = app.add_subcommand("reduce-x3c", "Reduce an X3C instance");
  reduce->add_option("--in", o.in)->required();
  reduce->add_option("--out", o.out)->required();

  auto* check = app.add_subcommand("check-x3c", "Brute-force an X3C instance");
  check->add_option("--in", o.in)->required();

  auto* decode = app.add_subcommand("decode-cover", "Decode a cover from 2-stage potentials");
  decode->add_option("--reduced", o.reduced)->required();
  decode->add_option("--stages", o.stages)->required();
  decode->add_option("--tol", o.tol);

  auto* profile = app.add_subcommand("profile", "Per-node potential trajectories as CSV");
  profile->add_option("--net", o.net)->required();
  profile->add_option("--stages", o.stages)->required();
  profile->add_option("--out", o.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cerr << app.help();
    return {kOk, ""};
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return {kInputError, ""};
  }

  try {
    if (solve->parsed()) return cmd_solve_stationary(o);
    if (maxflow->parsed()) return cmd_max_st_flow(o);
    if (verify->parsed()) return cmd_verify(o);
    if (search->parsed()) return cmd_search_kstage(o);
    if (bflow->parsed()) return cmd_search_bflow(o);
    if (gen->parsed()) return cmd_gen(o);
    if (reduce->parsed()) return cmd_reduce(o);
    if (check->parsed()) return cmd_check_x3c(o);
    if (decode->parsed()) return cmd_decode(o);
    if (profile->parsed()) return cmd_profile(o);
  } catch (const NonConvergence& e) {
    std::cerr << e.what() << '\n';
    return {kNumericalFailure, ""};
  } catch (const ZeroFlow& e) {
    std::cerr << e.what() << '\n';
    return {kNumericalFailure, ""};
  } catch (const NoFeasiblePoint& e) {
    std::cerr << e.what() << '\n';
    return {kNotFound, ""};
  } catch (const DecodeError& e) {
    std::cerr << e.what() << '\n';
    return {kNotFound, ""};
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return {kInputError, ""};
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return {kInputError, ""};
  }
  return {kInputError, ""};
}

}  // namespace gasflow::cli
