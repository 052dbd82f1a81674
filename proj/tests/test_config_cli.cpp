#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "modalctl/config.hpp"
#include "modalctl/propagator.hpp"
#include "modalctl/synthesis.hpp"

using namespace modalctl;
using nlohmann::json;

namespace {

std::string bin_path() {
  const char* bin = std::getenv("MODALCTL_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "MODALCTL_BIN must point at the CLI binary");
  return bin;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_file = "/tmp/modalctl_test_out_" + std::to_string(counter);
  const std::string err_file = "/tmp/modalctl_test_err_" + std::to_string(counter);
  ++counter;
  const std::string cmd = bin_path() + " " + args + " >" + out_file + " 2>" + err_file;
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return result;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

json beam_config() {
  return json::parse(R"({
    "system": {
      "kappa": 0.01,
      "mode_count": 16,
      "preset": {"kind": "euler_bernoulli", "scale": 1.0, "b_rule": {"beta": 1.0, "p": 2.0}}
    },
    "tau": 5.0,
    "N_range": [2, 6],
    "M": 16,
    "x1": [[0, 1.0]],
    "epsilon_target": 0.1
  })");
}

const std::string kDoubleIntegratorConfig = "/tmp/modalctl_di_config.json";
const std::string kDoubleIntegratorSetup = [] {
  write_file(kDoubleIntegratorConfig, R"({
    "system": {"kappa": 0.0, "mode_count": 1,
               "preset": {"kind": "explicit", "omega": [1.0], "b": [1.0]}},
    "tau": 1.0,
    "N": 0,
    "M": 1,
    "x1": [[0, 1.0]],
    "gramian": {"panels": 64, "nodes": 8},
    "propagation": {"steps": 256, "nodes": 8},
    "samples": 128
  })");
  return kDoubleIntegratorConfig;
}();

}  // namespace

TEST_CASE("config: parse round-trip preserves every field") {
  json j = beam_config();
  const ExperimentConfig config = config_from_json(j);
  CHECK(config.kappa == 0.01);
  CHECK(config.mode_count == 16);
  CHECK(config.M == 16);
  CHECK(config.N_range == std::pair<std::size_t, std::size_t>(2, 6));
  CHECK(config.x1.at(0) == 1.0);
  CHECK(config.x0.empty());
  CHECK(config.gram_panels == 0);  // auto

  const ExperimentConfig reparsed = config_from_json(config_to_json(config));
  CHECK(reparsed == config);
}

TEST_CASE("config: explicit preset and defaults") {
  const json j = json::parse(R"({
    "system": {"kappa": 0.1, "mode_count": 2,
               "preset": {"kind": "explicit", "omega": [2.0, 5.0], "b": [1.0, -0.5]}}
  })");
  const ExperimentConfig config = config_from_json(j);
  CHECK(config.tau == 5.0);
  CHECK(config.M == 2);  // defaults to mode_count
  CHECK(config.preset.omega == std::vector<double>{2.0, 5.0});
  const ModalSystem system = build_from_config(config);
  CHECK(system.mode(2).b == -0.5);
  const ExperimentConfig reparsed = config_from_json(config_to_json(config));
  CHECK(reparsed == config);
}

TEST_CASE("config: unknown fields are rejected at every level") {
  json j = beam_config();
  j["extra"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("unknown field"), ConfigError);

  j = beam_config();
  j["system"]["colour"] = "blue";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("unknown field"), ConfigError);

  j = beam_config();
  j["system"]["preset"]["shape"] = 2;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("unknown field"), ConfigError);
}

TEST_CASE("config: structural validation") {
  json j = beam_config();
  j["N"] = 3;  // together with N_range
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  j = beam_config();
  j.erase("N_range");
  j["N"] = 20;  // exceeds M
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  j = beam_config();
  j["M"] = 64;  // exceeds mode_count
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  j = beam_config();
  j["x1"] = json::array({json::array({64, 1.0})});  // index beyond 2M+1
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("2M+1"), ConfigError);

  j = beam_config();
  j["tau"] = -1.0;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);

  j = beam_config();
  j["system"]["mode_count"] = -3;
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
}

TEST_CASE("cli: synthesize writes the double-integrator law") {
  const std::string law_path = "/tmp/modalctl_di_law.json";
  const RunResult r = run_cli("synthesize --config " + kDoubleIntegratorConfig + " --out " + law_path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("cost J") != std::string::npos);

  const json law = json::parse(slurp(law_path));
  REQUIRE(law.at("nu").size() == 2);
  CHECK(law.at("nu")[0].get<double>() == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(law.at("nu")[1].get<double>() == doctest::Approx(-6.0).epsilon(1e-9));
}

TEST_CASE("cli: free-motion target gives the zero law") {
  const std::string config_path = "/tmp/modalctl_free_config.json";
  // x1 = e^{tau A} x0 restricted to the reduced block
  FrequencyPreset preset;
  preset.kind = FrequencyPreset::Kind::explicit_list;
  preset.omega = {1.0};
  preset.b = {1.0};
  const ModalSystem system = build_system(preset, 1, 0.0);
  StateVector x0;
  x0.set(0, 0.5);
  x0.set(1, -0.25);
  const StateVector x1 = transition(system, 1.0, 0, x0.project(0));

  json j = json::parse(R"({
    "system": {"kappa": 0.0, "mode_count": 1,
               "preset": {"kind": "explicit", "omega": [1.0], "b": [1.0]}},
    "tau": 1.0, "N": 0, "M": 1,
    "gramian": {"panels": 64, "nodes": 8}
  })");
  j["x0"] = json::array({json::array({0, x0.at(0)}), json::array({1, x0.at(1)})});
  j["x1"] = json::array({json::array({0, x1.at(0)}), json::array({1, x1.at(1)})});
  write_file(config_path, j.dump());

  const std::string law_path = "/tmp/modalctl_free_law.json";
  const RunResult r = run_cli("synthesize --config " + config_path + " --out " + law_path);
  CHECK(r.exit_code == 0);
  const json law = json::parse(slurp(law_path));
  CHECK(law.at("nu")[0].get<double>() == 0.0);
  CHECK(law.at("nu")[1].get<double>() == 0.0);
}

TEST_CASE("cli: overdamped configs need the override flag") {
  const std::string config_path = "/tmp/modalctl_overdamped_config.json";
  write_file(config_path, R"({
    "system": {"kappa": 1.5, "mode_count": 1,
               "preset": {"kind": "explicit", "omega": [1.0], "b": [1.0]}},
    "tau": 1.0, "N": 1, "M": 1, "x1": [[0, 1.0]]
  })");
  const RunResult refused = run_cli("synthesize --config " + config_path + " --out /tmp/modalctl_od_law.json");
  CHECK(refused.exit_code == 2);
  CHECK(refused.err.find("not underdamped") != std::string::npos);

  const RunResult allowed = run_cli("synthesize --config " + config_path +
                                    " --allow-overdamped --out /tmp/modalctl_od_law.json");
  CHECK(allowed.exit_code == 0);
}

TEST_CASE("cli: simulate reproduces free motion under the zero law and steers under the real one") {
  // zero law: synthesize with x1 = 0 = free endpoint of x0 = 0
  const std::string zero_config = "/tmp/modalctl_zero_config.json";
  write_file(zero_config, R"({
    "system": {"kappa": 0.0, "mode_count": 1,
               "preset": {"kind": "explicit", "omega": [1.0], "b": [1.0]}},
    "tau": 1.0, "N": 0, "M": 1,
    "gramian": {"panels": 64, "nodes": 8},
    "propagation": {"steps": 256, "nodes": 8},
    "samples": 64
  })");
  const RunResult zsyn = run_cli("synthesize --config " + zero_config + " --out /tmp/modalctl_zero_law.json");
  REQUIRE(zsyn.exit_code == 0);
  const RunResult zsim = run_cli("simulate --config " + zero_config +
                                 " --law /tmp/modalctl_zero_law.json --out /tmp/modalctl_zero_traj.csv");
  REQUIRE(zsim.exit_code == 0);
  {
    const std::string csv = slurp("/tmp/modalctl_zero_traj.csv");
    std::istringstream lines(csv);
    std::string line, last;
    while (std::getline(lines, line)) {
      if (!line.empty()) last = line;
    }
    // all-zero state stays zero under the zero law
    CHECK(last.rfind("1,0,0,", 0) == 0);
  }

  // real steering: endpoint row must hit (1, 0) on the rigid block
  const RunResult sim = run_cli("simulate --config " + kDoubleIntegratorConfig +
                                " --law /tmp/modalctl_di_law.json --out /tmp/modalctl_di_traj.csv");
  REQUIRE(sim.exit_code == 0);
  const std::string csv = slurp("/tmp/modalctl_di_traj.csv");
  std::istringstream lines(csv);
  std::string line, last;
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) {
      last = line;
      ++rows;
    }
  }
  CHECK(rows == 130);  // header + 129 samples
  double t, xi0, eta0;
  REQUIRE(std::sscanf(last.c_str(), "%lf,%lf,%lf", &t, &xi0, &eta0) == 3);
  CHECK(t == 1.0);
  CHECK(std::abs(xi0 - 1.0) < 1e-8);
  CHECK(std::abs(eta0) < 1e-8);
}

TEST_CASE("cli: doubling the sampling density leaves the endpoint in place") {
  json j = json::parse(slurp(kDoubleIntegratorConfig));
  j["samples"] = 256;
  const std::string dense_config = "/tmp/modalctl_di_dense.json";
  write_file(dense_config, j.dump());
  const RunResult sim = run_cli("simulate --config " + dense_config +
                                " --law /tmp/modalctl_di_law.json --out /tmp/modalctl_di_dense.csv");
  REQUIRE(sim.exit_code == 0);

  const auto last_row = [](const std::string& path) {
    std::istringstream lines(slurp(path));
    std::string line, last;
    while (std::getline(lines, line)) {
      if (!line.empty()) last = line;
    }
    double t = 0, xi = 0, eta = 0, xi1 = 0, eta1 = 0;
    std::sscanf(last.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &xi, &eta, &xi1, &eta1);
    return std::array<double, 4>{xi, eta, xi1, eta1};
  };
  const auto coarse = last_row("/tmp/modalctl_di_traj.csv");
  const auto dense = last_row("/tmp/modalctl_di_dense.csv");
  double diff = 0.0;
  for (int i = 0; i < 4; ++i) {
    diff += (coarse[i] - dense[i]) * (coarse[i] - dense[i]);
  }
  CHECK(std::sqrt(diff) < 1e-10);
}

TEST_CASE("cli: gap-check tables, warnings, and exit codes") {
  const std::string beam_gap = "/tmp/modalctl_beam_gap.json";
  write_file(beam_gap, R"({
    "system": {"kappa": 0.0, "mode_count": 4,
               "preset": {"kind": "euler_bernoulli", "scale": 1.0, "b_rule": {"beta": 1.0, "p": 2.0}}}
  })");
  const RunResult beam = run_cli("gap-check --config " + beam_gap + " --checkpoints 50,100,200");
  CHECK(beam.exit_code == 0);
  CHECK(beam.err.empty());
  {
    std::istringstream lines(beam.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "K,S_K,increment");
    double prev_inc = 1e9;
    int rows = 0;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      double k, s, inc;
      REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &k, &s, &inc) == 3);
      CHECK(inc < prev_inc);  // strictly decreasing increments
      prev_inc = inc;
      ++rows;
    }
    CHECK(rows == 3);
  }

  const std::string harmonic_gap = "/tmp/modalctl_harmonic_gap.json";
  write_file(harmonic_gap, R"({
    "system": {"kappa": 0.0, "mode_count": 4,
               "preset": {"kind": "harmonic", "scale": 1.0, "b_rule": {"beta": 1.0, "p": 2.0}}}
  })");
  const RunResult harmonic = run_cli("gap-check --config " + harmonic_gap + " --checkpoints 50,100,200");
  CHECK(harmonic.exit_code == 0);
  CHECK(harmonic.err.find("warning") != std::string::npos);

  const RunResult k1 = run_cli("gap-check --config " + beam_gap + " --checkpoints 1");
  CHECK(k1.exit_code == 0);
  CHECK(k1.out.find("1,0,0") != std::string::npos);  // S_1 = 0, no pairs

  const std::string degenerate = "/tmp/modalctl_degenerate_gap.json";
  write_file(degenerate, R"({
    "system": {"kappa": 0.0, "mode_count": 3,
               "preset": {"kind": "explicit", "omega": [1.0, 1.0, 2.0], "b": [1.0, 1.0, 1.0]}}
  })");
  const RunResult bad = run_cli("gap-check --config " + degenerate + " --checkpoints 3");
  CHECK(bad.exit_code == 2);
  CHECK(bad.err.find("degenerate spectrum") != std::string::npos);
}

TEST_CASE("cli: converge emits the sweep CSV deterministically") {
  const std::string config_path = "/tmp/modalctl_converge_config.json";
  write_file(config_path, beam_config().dump());

  const RunResult first = run_cli("converge --config " + config_path +
                                  " --out /tmp/modalctl_conv_a.csv --svg /tmp/modalctl_conv.svg");
  REQUIRE(first.exit_code == 0);
  const RunResult second = run_cli("converge --config " + config_path +
                                   " --jobs 3 --out /tmp/modalctl_conv_b.csv");
  REQUIRE(second.exit_code == 0);

  const std::string a = slurp("/tmp/modalctl_conv_a.csv");
  const std::string b = slurp("/tmp/modalctl_conv_b.csv");
  CHECK(a == b);  // byte-identical across runs and job counts

  std::istringstream lines(a);
  std::string line;
  std::getline(lines, line);  // header
  std::vector<double> residuals;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    double n, d, proj, full;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &n, &d, &proj, &full) == 4);
    residuals.push_back(full);
  }
  REQUIRE(residuals.size() == 5);  // N = 2..6
  CHECK(residuals.back() < residuals.front());

  const std::string svg = slurp("/tmp/modalctl_conv.svg");
  CHECK(svg.rfind("<svg", 0) == 0);

  // epsilon_target = 0.1: at least the largest-N row passes
  CHECK(first.out.find("N=6   ") != std::string::npos);
  CHECK(first.out.rfind(" pass\n") != std::string::npos);
}

TEST_CASE("cli: shipped beam config sweeps 9 rows and passes at the largest order") {
  const char* config_dir = std::getenv("MODALCTL_CONFIG_DIR");
  REQUIRE_MESSAGE(config_dir != nullptr, "MODALCTL_CONFIG_DIR must point at configs/");
  const std::string config = std::string(config_dir) + "/beam_converge.json";
  const RunResult r = run_cli("converge --config " + config +
                              " --out /tmp/modalctl_beam_conv.csv --svg /tmp/modalctl_beam_conv.svg");
  REQUIRE(r.exit_code == 0);

  std::istringstream lines(slurp("/tmp/modalctl_beam_conv.csv"));
  std::string line;
  std::getline(lines, line);  // header
  std::vector<double> residuals;
  std::vector<int> passes;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    residuals.push_back(0.0);
    double n, d, proj;
    int pass = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &n, &d, &proj, &residuals.back()) == 4);
    const auto comma = line.rfind(',');
    pass = std::atoi(line.c_str() + comma + 1);
    passes.push_back(pass);
  }
  REQUIRE(residuals.size() == 9);  // N = 2..10
  CHECK(residuals.back() < residuals.front());
  CHECK(passes.back() == 1);  // epsilon_target = 0.1 admits the largest order
  CHECK(slurp("/tmp/modalctl_beam_conv.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("cli: info runs and missing config is a config error") {
  const RunResult info = run_cli("info --config " + kDoubleIntegratorConfig);
  CHECK(info.exit_code == 0);
  CHECK(info.out.find("fingerprint") != std::string::npos);

  const RunResult missing = run_cli("info --config /tmp/does_not_exist_modalctl.json");
  CHECK(missing.exit_code == 2);

  const RunResult law_mismatch = run_cli("simulate --config " + kDoubleIntegratorConfig +
                                         " --law /tmp/modalctl_zero_law.json" +
                                         " --out /tmp/modalctl_same_system.csv");
  CHECK(law_mismatch.exit_code == 0);  // same system, zero law is fine

  // fingerprint mismatch: law synthesized for a different system
  const std::string other_config = "/tmp/modalctl_other_config.json";
  write_file(other_config, R"({
    "system": {"kappa": 0.0, "mode_count": 1,
               "preset": {"kind": "explicit", "omega": [3.0], "b": [1.0]}},
    "tau": 1.0, "N": 0, "M": 1
  })");
  const RunResult mismatch = run_cli("simulate --config " + other_config +
                                     " --law /tmp/modalctl_di_law.json --out /tmp/modalctl_mm.csv");
  CHECK(mismatch.exit_code == 2);
  CHECK(mismatch.err.find("fingerprint") != std::string::npos);
}
