#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "gasflow/gallery.hpp"
#include "gasflow/io.hpp"

using namespace gasflow;
namespace fs = std::filesystem;

namespace {

cli::CommandResult call(std::vector<std::string> args) {
  args.insert(args.begin(), "gasflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gasflow_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(call({}).exit_code == cli::kInputError);
    CHECK(call({"bogus"}).exit_code == cli::kInputError);
    CHECK(call({"max-st-flow", "--net", "x.json"}).exit_code == cli::kInputError);
    CHECK(call({"gen", "--which", "nope", "--out", "x"}).exit_code == cli::kInputError);
  }

  TEST_CASE("bad input files exit 2") {
    const fs::path dir = scratch("bad");
    write(dir / "broken.json", "{\"bounds\":");
    CHECK(call({"solve-stationary", "--net", (dir / "broken.json").string()}).exit_code ==
          cli::kInputError);
    CHECK(call({"solve-stationary", "--net", (dir / "missing.json").string()}).exit_code ==
          cli::kInputError);
    write(dir / "unbalanced.json",
          R"({"bounds": {"pi_min": 0, "pi_max": 4}, "nodes": [{"id": "s", "balance": 1},
              {"id": "t", "balance": 0}], "arcs": [{"id": "a", "tail": "s", "head": "t", "beta": 1}]})");
    CHECK(call({"solve-stationary", "--net", (dir / "unbalanced.json").string()}).exit_code ==
          cli::kInputError);
  }

  TEST_CASE("gen, max-st-flow and verify on example 2") {
    const fs::path dir = scratch("ex2");
    REQUIRE(call({"gen", "--which", "example2", "--out", dir.string()}).exit_code == cli::kOk);
    const auto mf = call({"max-st-flow", "--net", (dir / "network.json").string(), "--source", "s",
                          "--sink", "t"});
    REQUIRE(mf.exit_code == cli::kOk);
    CHECK(std::abs(Json::parse(mf.payload)["value"].get<double>() -
                   gallery::example2_max_flow_value()) < 1e-6);
    const auto v = call({"verify-kstage", "--net", (dir / "network.json").string(), "--stages",
                         (dir / "stages.json").string()});
    REQUIRE(v.exit_code == cli::kOk);
    const Json rep = Json::parse(v.payload);
    CHECK(rep["feasible"].get<bool>());
    CHECK(rep["st_value"].get<double>() == doctest::Approx(2.0 - std::sqrt(2.0)));
  }

  TEST_CASE("infeasible stages exit 1") {
    const fs::path dir = scratch("infeasible");
    REQUIRE(call({"gen", "--which", "example1", "--out", dir.string()}).exit_code == cli::kOk);
    Json doc = Json::parse(slurp(dir / "stages.json"));
    doc["stages"][0]["u"] = 5.0;
    write(dir / "bad.json", doc.dump());
    CHECK(call({"verify-kstage", "--net", (dir / "network.json").string(), "--stages",
                (dir / "bad.json").string()})
              .exit_code == cli::kNotFound);
  }

  TEST_CASE("solve-stationary output") {
    const fs::path dir = scratch("solve");
    write(dir / "net.json",
          R"({"bounds": {"pi_min": 0, "pi_max": 4}, "nodes": [{"id": "s", "balance": 1},
              {"id": "t", "balance": -1}], "arcs": [{"id": "a", "tail": "s", "head": "t", "beta": 1}]})");
    const auto r = call({"solve-stationary", "--net", (dir / "net.json").string()});
    REQUIRE(r.exit_code == cli::kOk);
    const Json sol = Json::parse(r.payload);
    CHECK(sol["flows"]["a"].get<double>() == doctest::Approx(1.0));
    CHECK(sol["primal"].get<double>() == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("search-kstage is reproducible") {
    const fs::path dir = scratch("search");
    REQUIRE(call({"gen", "--which", "example2", "--out", dir.string()}).exit_code == cli::kOk);
    const std::vector<std::string> args{"search-kstage", "--net", (dir / "network.json").string(),
                                        "--source", "s", "--sink", "t", "--k", "2",
                                        "--budget", "4", "--seed", "7"};
    const auto a = call(args);
    const auto b = call(args);
    REQUIRE(a.exit_code == cli::kOk);
    CHECK(a.payload == b.payload);
    CHECK(Json::parse(a.payload)["value"].get<double>() <=
          2.0 * gallery::example2_max_flow_value() + 1e-4);
  }

  TEST_CASE("x3c tooling") {
    const fs::path dir = scratch("x3c");
    write(dir / "yes.json", R"({"elements": ["1","2","3","4","5","6"],
        "triples": [["1","2","4"], ["1","2","3"], ["2","5","6"], ["4","5","6"]]})");
    write(dir / "no.json", R"({"elements": ["1","2","3","4","5","6"],
        "triples": [["1","2","3"], ["3","4","5"]]})");
    const auto yes = call({"check-x3c", "--in", (dir / "yes.json").string()});
    REQUIRE(yes.exit_code == cli::kOk);
    CHECK(Json::parse(yes.payload)["cover"] == Json({1, 3}));
    CHECK(call({"check-x3c", "--in", (dir / "no.json").string()}).exit_code == cli::kNotFound);

    const fs::path red = dir / "reduced";
    REQUIRE(call({"reduce-x3c", "--in", (dir / "yes.json").string(), "--out", red.string()})
                .exit_code == cli::kOk);
    const GasNetwork net = parse_network(slurp(red / "network.json"));
    const auto sidecar = reduction_from_json(net, parse_json(slurp(red / "decode.json")));
    write(dir / "witness.json",
          kstage_to_json(net, reduction::assemble_witness(sidecar, {1, 3}), net.balances()).dump());
    const auto dec = call({"decode-cover", "--reduced", red.string(), "--stages",
                           (dir / "witness.json").string()});
    REQUIRE(dec.exit_code == cli::kOk);
    CHECK(Json::parse(dec.payload)["cover"] == Json({1, 3}));

    write(dir / "wrong.json",
          kstage_to_json(net, reduction::assemble_witness(sidecar, {0}), net.balances()).dump());
    CHECK(call({"decode-cover", "--reduced", red.string(), "--stages",
                (dir / "wrong.json").string()})
              .exit_code == cli::kNotFound);
  }

  TEST_CASE("x3c demo bundle decodes") {
    const fs::path dir = scratch("demo");
    REQUIRE(call({"gen", "--which", "x3c-demo", "--out", dir.string()}).exit_code == cli::kOk);
    const auto dec = call({"decode-cover", "--reduced", dir.string(), "--stages",
                           (dir / "stages.json").string()});
    REQUIRE(dec.exit_code == cli::kOk);
    CHECK(Json::parse(dec.payload)["cover"] == Json({0}));
  }

  TEST_CASE("example 3 bundle and profile") {
    const fs::path dir = scratch("ladder");
    REQUIRE(call({"gen", "--which", "example3", "--q", "4", "--eps", "0.5", "--out", dir.string()})
                .exit_code == cli::kOk);
    for (const char* f : {"network.json", "stages.json", "stationary.json"}) {
      CHECK(fs::exists(dir / f));
      if (std::string(f) != "network.json") {
        CHECK(call({"verify-kstage", "--net", (dir / "network.json").string(), "--stages",
                    (dir / f).string()})
                  .exit_code == cli::kOk);
      }
    }
    const fs::path csv = dir / "profile.csv";
    REQUIRE(call({"profile", "--net", (dir / "network.json").string(), "--stages",
                  (dir / "stages.json").string(), "--out", csv.string()})
                .exit_code == cli::kOk);
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "node,stage,potential");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 10 * 2);
  }

  TEST_CASE("search-bflow on the ladder") {
    const fs::path dir = scratch("bflow");
    REQUIRE(call({"gen", "--which", "example3", "--q", "4", "--eps", "0.5", "--out", dir.string()})
                .exit_code == cli::kOk);
    const auto r = call({"search-bflow", "--net", (dir / "network.json").string(), "--k", "2",
                         "--budget", "8", "--seed", "1"});
    REQUIRE(r.exit_code == cli::kOk);
    CHECK(Json::parse(r.payload)["found"].get<bool>());
  }

  TEST_CASE("terminals in different components exit 2") {
    const fs::path dir = scratch("zero");
    write(dir / "net.json",
          R"({"bounds": {"pi_min": 0, "pi_max": 4}, "nodes": [{"id": "s", "balance": 0},
              {"id": "t", "balance": 0}, {"id": "x", "balance": 0}],
              "arcs": [{"id": "a", "tail": "s", "head": "x", "beta": 1}]})");
    const auto r = call({"max-st-flow", "--net", (dir / "net.json").string(), "--source", "s",
                         "--sink", "t"});
    CHECK(r.exit_code == cli::kInputError);
    CHECK(r.payload.empty());
  }
}
