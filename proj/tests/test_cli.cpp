#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "elicit/cli.hpp"

using namespace elicit;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json invoke_json(const std::vector<std::string>& args) {
  const auto r = invoke(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return Json::parse(r.out);
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::path(ELICIT_TEST_TMP) / name;
  std::ofstream(path) << text;
  return path.string();
}

std::map<std::string, std::string> csv_fields(const std::string& csv) {
  std::map<std::string, std::string> fields;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# elicit-csv v1");
  std::getline(in, line);
  EXPECT_EQ(line, "field,value");
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    fields[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return fields;
}

}  // namespace

TEST(Cli, ThresholdCarExample) {
  const auto doc = invoke_json({"threshold", "--prior", "uniform:0:80000", "--c", "200"});
  EXPECT_EQ(doc["command"], "threshold");
  EXPECT_DOUBLE_EQ(doc["threshold"].get<double>(), 10000.0);
  EXPECT_DOUBLE_EQ(doc["mean"].get<double>(), 40000.0);
  EXPECT_EQ(doc["truthful"], true);
  EXPECT_EQ(doc["seed"], 0);
}

TEST(Cli, ThresholdVerdictIsStrict) {
  const auto doc = invoke_json({"threshold", "--prior", "uniform:0:20", "--c", "2.5"});
  EXPECT_EQ(doc["truthful"], false);
  EXPECT_FALSE(invoke_json({"threshold", "--prior", "uniform:0:20"}).contains("truthful"));
}

TEST(Cli, PriorAsJsonRecord) {
  const auto doc = invoke_json({"threshold", "--prior", R"({"family":"two_point","q":0.3,"high":10})"});
  EXPECT_NEAR(doc["threshold"].get<double>(), 2.1, 1e-12);
}

TEST(Cli, DesignGc) {
  const auto doc =
      invoke_json({"design", "--prior", "uniform:0:80000", "--c", "200", "--target", "gc", "--margin", "1"});
  EXPECT_NEAR(doc["p"].get<double>(), 0.0201, 1e-15);
  EXPECT_NEAR(doc["u_net"].get<double>(), 201.0, 1e-9);
  EXPECT_NEAR(doc["principal_loss"].get<double>(), 201.0, 1e-9);
  EXPECT_FALSE(doc.contains("principal_loss_se"));
}

TEST(Cli, DesignTargets) {
  const auto gstar = invoke_json({"design", "--prior", "uniform:0:20", "--target", "gstar"});
  EXPECT_NEAR(gstar["u_net"].get<double>(), 2.5, 1e-12);
  const auto g0 = invoke_json({"design", "--prior", "uniform:0:20", "--target", "g0", "--delta", "0"});
  EXPECT_EQ(g0["p"].get<double>(), 0.0);
  EXPECT_EQ(g0["u_net"].get<double>(), 0.0);
  const auto step = invoke_json({"design", "--prior", "uniform:0:20", "--target", "step", "--t", "10", "--p", "0.5"});
  EXPECT_NEAR(step["u_net"].get<double>(), 1.25, 1e-12);
  const auto gzu = invoke_json(
      {"design", "--prior", "uniform:0:80", "--target", "gzu", "--u", "8", "--cost-prior", "uniform:0:10"});
  EXPECT_NEAR(gzu["reserve_offer"].get<double>(), 4.0, 1e-9);
  EXPECT_NEAR(gzu["expected_loss"].get<double>(), 6.4, 1e-9);
}

TEST(Cli, OptimizeModes) {
  const auto steps = invoke_json({"optimize", "--prior", "uniform:0:20", "--mode", "steps"});
  EXPECT_NEAR(steps["t_star"].get<double>(), 10.0, 0.02);
  EXPECT_NEAR(steps["value"].get<double>(), 2.5, 1e-9);
  const auto lattice =
      invoke_json({"optimize", "--prior", "uniform:0:20", "--mode", "lattice", "--n-grid", "21", "--n-levels", "2"});
  EXPECT_NEAR(lattice["value"].get<double>(), 2.5, 1e-12);
  EXPECT_EQ(lattice["candidates"], 22);
  const auto dp = invoke_json({"optimize", "--prior", "uniform:0:20", "--mode", "lattice", "--n-grid", "21",
                               "--n-levels", "4", "--method", "dp"});
  EXPECT_LE(dp["value"].get<double>(), 2.5 + 1e-12);
  const auto minloss = invoke_json({"optimize", "--prior", "uniform:0:20", "--mode", "minloss", "--c-target", "0.1"});
  EXPECT_NEAR(minloss["loss"].get<double>(), 0.1, 1e-3);
  EXPECT_EQ(minloss["certified"], false);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(invoke({}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold", "--bogus"}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold", "--prior", "uniform:5:1"}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold", "--prior", "cauchy:0:1"}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold"}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"design", "--prior", "uniform:0:20", "--c", "3"}).code, cli::kThresholdExceeded);
  EXPECT_EQ(invoke({"optimize", "--prior", "uniform:0:20", "--mode", "minloss", "--c-target", "3"}).code,
            cli::kThresholdExceeded);
  EXPECT_EQ(invoke({"optimize", "--prior", "uniform:0:20", "--mode", "lattice", "--n-grid", "40", "--n-levels", "30"})
                .code,
            cli::kSizeError);
  const auto help = invoke({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
}

TEST(Cli, ComparisonFailureExitCode) {
  const auto config = write_temp("failing.json", R"({
    "prior": {"family": "uniform", "lo": 0, "hi": 20},
    "agent": {"c": 0.2},
    "mechanism": {"kind": "secret_reserve", "epsilon": 0, "cdf": {"target": "gc", "margin": 0.3}},
    "run": {"n_trials": 2000, "seed": 1, "sigmas": 1e-6}
  })");
  const auto r = invoke({"simulate", "--config", config});
  EXPECT_EQ(r.code, cli::kComparisonFailed);
  EXPECT_NE(r.err.find("disagree"), std::string::npos);
  EXPECT_NO_THROW(Json::parse(r.out));
}

TEST(Cli, RejectsUnknownKeys) {
  const auto top = write_temp("unknown_top.json", R"({"prior": {"family": "uniform", "lo": 0, "hi": 20}, "extra": 1})");
  EXPECT_EQ(invoke({"threshold", "--config", top}).code, cli::kConfigError);
  const auto nested =
      write_temp("unknown_nested.json", R"({"prior": {"family": "uniform", "lo": 0, "hi": 20, "mode": 3}})");
  const auto r = invoke({"threshold", "--config", nested});
  EXPECT_EQ(r.code, cli::kConfigError);
  EXPECT_NE(r.err.find("mode"), std::string::npos);
  const auto agent = write_temp("unknown_agent.json",
                                R"({"prior": {"family": "uniform", "lo": 0, "hi": 20}, "agent": {"cost": 1}})");
  EXPECT_EQ(invoke({"threshold", "--config", agent}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold", "--config", write_temp("bad.json", "{not json")}).code, cli::kConfigError);
  EXPECT_EQ(invoke({"threshold", "--config", "/nonexistent/elicit.json"}).code, cli::kConfigError);
}

TEST(Cli, FlagsOverrideConfig) {
  const auto config = write_temp("override.json", R"({
    "prior": {"family": "uniform", "lo": 0, "hi": 20},
    "agent": {"c": 1},
    "run": {"seed": 5}
  })");
  const auto base = invoke_json({"threshold", "--config", config});
  EXPECT_EQ(base["c"].get<double>(), 1.0);
  EXPECT_EQ(base["seed"], 5);
  const auto over = invoke_json({"threshold", "--config", config, "--c", "3", "--seed", "9", "--prior", "uniform:0:40"});
  EXPECT_EQ(over["c"].get<double>(), 3.0);
  EXPECT_EQ(over["seed"], 9);
  EXPECT_DOUBLE_EQ(over["threshold"].get<double>(), 5.0);
  EXPECT_EQ(over["truthful"], true);
}

TEST(Cli, CsvCarriesTheSameNumbers) {
  const std::vector<std::string> args{"design", "--prior", "triangular:0:7", "--c", "0.3", "--margin", "0.05"};
  const auto json = invoke_json(args);
  auto csv_args = args;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto csv = invoke(csv_args);
  ASSERT_EQ(csv.code, 0) << csv.err;
  const auto fields = csv_fields(csv.out);
  EXPECT_EQ(fields.at("u_net"), json["u_net"].dump());
  EXPECT_EQ(fields.at("threshold"), json["threshold"].dump());
  EXPECT_EQ(fields.at("p"), json["p"].dump());
  EXPECT_EQ(fields.at("target"), "gc");
  EXPECT_EQ(fields.at("cdf.atoms.0.1"), json["cdf"]["atoms"][0][1].dump());
  EXPECT_EQ(fields.at("cdf.atoms.1.0"), "never");
  EXPECT_EQ(fields.at("seed"), "0");
}

TEST(Cli, CsvFlattening) {
  const Json doc{{"a", 1.5}, {"b", {{"c", "x,y"}, {"d", Json::array({1, 2})}}}, {"e", true}};
  EXPECT_EQ(cli::to_csv(doc), "# elicit-csv v1\nfield,value\na,1.5\nb.c,\"x,y\"\nb.d.0,1\nb.d.1,2\ne,true\n");
}

TEST(Cli, DesignFeedsSimulate) {
  const auto design = invoke_json({"design", "--prior", "uniform:0:20", "--c", "0.2", "--margin", "0.3"});
  Json config{{"prior", {{"family", "uniform"}, {"lo", 0}, {"hi", 20}}},
              {"agent", {{"c", 0.2}}},
              {"mechanism", {{"kind", "secret_reserve"}, {"epsilon", 0.0}, {"cdf", design["cdf"]}}},
              {"run", {{"n_trials", 200000}, {"seed", 42}}}};
  const auto path = write_temp("roundtrip.json", config.dump());
  const auto doc = invoke_json({"simulate", "--config", path});
  EXPECT_EQ(doc["seed"], 42);
  EXPECT_EQ(doc["comparison"]["pass"], true);
  EXPECT_NEAR(doc["analytic"]["principal_loss"].get<double>(), 0.5, 1e-12);
  EXPECT_EQ(doc["batch"]["n_trials"], 200000);
}

TEST(Cli, SimulateIsReproducibleAndDumps) {
  const auto dump = (std::filesystem::path(ELICIT_TEST_TMP) / "dump.jsonl").string();
  const std::vector<std::string> args{"simulate", "--config", std::string(ELICIT_SOURCE_DIR) + "/docs/examples/car.json",
                                      "--n-trials", "500", "--seed", "7", "--dump", dump};
  const auto a = invoke(args);
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = invoke(args);
  EXPECT_EQ(a.out, b.out);
  std::ifstream in(dump);
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    const auto j = Json::parse(line);
    EXPECT_EQ(j["trial"], n);
    ++n;
  }
  EXPECT_EQ(n, 500u);
}
