// Drives the command-line binary end to end: real process spawns, real files,
// byte comparisons on the outputs.  BT_CLI_BIN is injected by the build.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(BT_CLI_BIN) + " " + args;
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const char* kSimulateConfig = R"({
  "experiment": "simulate",
  "model": {
    "offspring": {"family": "bernoulli", "p": 0.5},
    "immigration": {"family": "poisson", "lambda": 1.0},
    "variant": "sum",
    "regime": "light"
  },
  "seed": 11,
  "length": 300,
  "burn_in": 50
})";

const char* kOracleConfig = R"({
  "experiment": "oracle",
  "model": {
    "offspring": {"family": "bernoulli", "p": 0.5},
    "immigration": {"family": "bernoulli", "p": 0.5},
    "variant": "sum",
    "regime": "light"
  },
  "seed": 5,
  "samples": 3000,
  "state_cap": 32
})";

}  // namespace

TEST_CASE("cli reruns are byte-identical and seed overrides change them") {
  write_file("cli_sim.json", kSimulateConfig);
  CHECK(run("simulate --config cli_sim.json --out cli_a > cli_a.log") == 0);
  CHECK(run("simulate --config cli_sim.json --out cli_b > cli_b.log") == 0);
  CHECK(slurp("cli_a/simulate.csv") == slurp("cli_b/simulate.csv"));
  CHECK(slurp("cli_a/simulate.summary.json") ==
        slurp("cli_b/simulate.summary.json"));
  // first stdout line is the digest; the remaining lines name the out dirs
  std::string log_a = slurp("cli_a.log");
  std::string log_b = slurp("cli_b.log");
  CHECK(log_a.substr(0, log_a.find('\n')) ==
        log_b.substr(0, log_b.find('\n')));

  CHECK(run("simulate --config cli_sim.json --out cli_c --seed 12 "
            "> /dev/null") == 0);
  CHECK(slurp("cli_a/simulate.csv") != slurp("cli_c/simulate.csv"));
}

TEST_CASE("cli output does not depend on the thread count") {
  write_file("cli_oracle.json", kOracleConfig);
  CHECK(run("oracle --config cli_oracle.json --out cli_t1 --threads 1 "
            "> /dev/null") == 0);
  CHECK(run("oracle --config cli_oracle.json --out cli_t3 --threads 3 "
            "> /dev/null") == 0);
  CHECK(slurp("cli_t1/oracle.csv") == slurp("cli_t3/oracle.csv"));
  CHECK(slurp("cli_t1/oracle.summary.json") ==
        slurp("cli_t3/oracle.summary.json"));
}

TEST_CASE("cli validate-config prints the normalized form") {
  write_file("cli_sim.json", kSimulateConfig);
  CHECK(run("validate-config --config cli_sim.json > cli_norm.json") == 0);
  std::string norm = slurp("cli_norm.json");
  CHECK(norm.find("\"stream\": 0") != std::string::npos);
  CHECK(norm.find("\"length\": 300") != std::string::npos);
  CHECK(norm.find("\"experiment\": \"simulate\"") != std::string::npos);
}

TEST_CASE("cli failure modes use distinct exit codes") {
  write_file("cli_sim.json", kSimulateConfig);

  // config/subcommand mismatch
  CHECK(run("tails --config cli_sim.json 2> /dev/null") == 2);

  // malformed JSON
  write_file("cli_bad.json", "{ this is not json");
  CHECK(run("simulate --config cli_bad.json 2> /dev/null") == 2);

  // valid JSON, invalid config (unknown field)
  write_file("cli_junk.json",
             R"({"experiment":"simulate","model":{
                  "offspring":{"family":"bernoulli","p":0.5},
                  "immigration":{"family":"poisson","lambda":1.0},
                  "variant":"sum","regime":"light"},
                 "seed":1,"lenght":5})");
  CHECK(run("validate-config --config cli_junk.json 2> /dev/null") == 2);

  // model violating the regime contract (unit-mean offspring)
  write_file("cli_stuck.json",
             R"({"experiment":"simulate","model":{
                  "offspring":{"family":"dirac","value":1},
                  "immigration":{"family":"poisson","lambda":1.0},
                  "variant":"sum","regime":"light"},
                 "seed":1})");
  CHECK(run("simulate --config cli_stuck.json 2> /dev/null") == 2);

  // missing config file
  CHECK(run("simulate --config cli_missing.json 2> /dev/null") == 3);
}
