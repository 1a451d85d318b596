// Exercises the shared-library surface exactly as an external client would:
// everything below goes through branchtail.h handles and error codes, never
// the C++ headers.
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "branchtail.h"

namespace {

const char* kLightModel =
    R"({"offspring":{"family":"bernoulli","p":0.5},
        "immigration":{"family":"poisson","lambda":1.0},
        "variant":"sum","regime":"light"})";

const char* kFrozenModel =
    R"({"offspring":{"family":"dirac","value":1},
        "immigration":{"family":"poisson","lambda":1.0},
        "variant":"sum","regime":"light"})";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("version and error channel") {
  REQUIRE(bt_version() != nullptr);
  CHECK(std::strcmp(bt_version(), "0.1.0") == 0);
  REQUIRE(bt_last_error() != nullptr);

  bt_dist* d = nullptr;
  CHECK(bt_dist_from_json(R"({"family":"wishful"})", &d) ==
        BT_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(bt_last_error()) > 0);
  CHECK(bt_dist_from_json("{ not json", &d) == BT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("distribution handles: values, sampling, round trip") {
  bt_dist* pareto = nullptr;
  REQUIRE(bt_dist_from_json(
              R"({"family":"discrete_pareto","alpha":0.8,"scale":1.0})",
              &pareto) == BT_OK);
  double tail = 0.0;
  REQUIRE(bt_dist_tail(pareto, 9, &tail) == BT_OK);
  CHECK(std::fabs(tail - std::pow(10.0, -0.8)) < 1e-15);
  REQUIRE(bt_dist_tail(pareto, 0, &tail) == BT_OK);
  CHECK(tail == 1.0);  // all mass above zero at unit scale

  bt_dist* pois = nullptr;
  REQUIRE(bt_dist_from_json(R"({"family":"poisson","lambda":1.0})", &pois) ==
          BT_OK);
  double pgf = 0.0;
  REQUIRE(bt_dist_pgf(pois, 0.5, &pgf) == BT_OK);
  CHECK(std::fabs(pgf - std::exp(-0.5)) < 1e-15);
  double mean = 0.0, m2 = 0.0;
  int logm = 0;
  REQUIRE(bt_dist_moments(pois, &mean, &m2, &logm) == BT_OK);
  CHECK(mean == 1.0);
  CHECK(std::fabs(m2 - 2.0) < 1e-12);
  CHECK(logm == 1);

  char* json = nullptr;
  REQUIRE(bt_dist_to_json(pois, &json) == BT_OK);
  CHECK(contains(json, "poisson"));
  bt_string_free(json);

  bt_rng* r1 = nullptr;
  bt_rng* r2 = nullptr;
  REQUIRE(bt_rng_create(99, 3, &r1) == BT_OK);
  REQUIRE(bt_rng_create(99, 3, &r2) == BT_OK);
  for (int i = 0; i < 32; ++i) {
    std::uint64_t a = 0, b = 0;
    REQUIRE(bt_dist_sample(pareto, r1, &a) == BT_OK);
    REQUIRE(bt_dist_sample(pareto, r2, &b) == BT_OK);
    CHECK(a == b);
  }
  bt_rng_free(r1);
  bt_rng_free(r2);
  bt_dist_free(pareto);
  bt_dist_free(pois);
}

TEST_CASE("model handles: ergodicity report and deterministic paths") {
  bt_model* model = nullptr;
  REQUIRE(bt_model_from_json(kLightModel, &model) == BT_OK);
  double mu = 0.0, fw = 0.0;
  int logm = 0, ergodic = 0;
  REQUIRE(bt_model_ergodicity(model, &mu, &logm, &fw, &ergodic) == BT_OK);
  CHECK(mu == 0.5);
  CHECK(logm == 1);
  CHECK(ergodic == 1);

  std::vector<std::uint64_t> a(64), b(64), c(64);
  REQUIRE(bt_model_simulate(model, 64, 16, 42, 0, a.data()) == BT_OK);
  REQUIRE(bt_model_simulate(model, 64, 16, 42, 0, b.data()) == BT_OK);
  REQUIRE(bt_model_simulate(model, 64, 16, 42, 1, c.data()) == BT_OK);
  CHECK(a == b);
  CHECK(a != c);

  bt_rng* r1 = nullptr;
  bt_rng* r2 = nullptr;
  REQUIRE(bt_rng_create(7, 0, &r1) == BT_OK);
  REQUIRE(bt_rng_create(7, 0, &r2) == BT_OK);
  std::uint64_t x = 0, y = 0;
  REQUIRE(bt_model_stationary_sample(model, r1, &x) == BT_OK);
  REQUIRE(bt_model_stationary_sample(model, r2, &y) == BT_OK);
  CHECK(x == y);
  bt_rng_free(r1);
  bt_rng_free(r2);
  bt_model_free(model);

  bt_model* frozen = nullptr;
  REQUIRE(bt_model_from_json(kFrozenModel, &frozen) == BT_OK);
  REQUIRE(bt_model_ergodicity(frozen, &mu, &logm, &fw, &ergodic) == BT_OK);
  CHECK(mu == 1.0);
  CHECK(ergodic == 0);
  std::vector<std::uint64_t> buf(8);
  CHECK(bt_model_simulate(frozen, 8, 0, 1, 0, buf.data()) ==
        BT_ERR_NOT_ERGODIC);
  bt_rng* r = nullptr;
  REQUIRE(bt_rng_create(1, 0, &r) == BT_OK);
  std::uint64_t s = 0;
  CHECK(bt_model_stationary_sample(frozen, r, &s) == BT_ERR_NOT_ERGODIC);
  CHECK(std::strlen(bt_last_error()) > 0);
  bt_rng_free(r);
  bt_model_free(frozen);
}

TEST_CASE("config validation fills defaults and rejects junk") {
  std::string cfg = std::string(R"({"experiment":"simulate","model":)") +
                    kLightModel + R"(,"seed":1})";
  char* norm = nullptr;
  REQUIRE(bt_config_validate(cfg.c_str(), &norm) == BT_OK);
  std::string text(norm);
  bt_string_free(norm);
  CHECK(contains(text, "\"length\": 10000"));
  CHECK(contains(text, "\"burn_in\": 1000"));
  CHECK(contains(text, "\"stream\": 0"));

  // normalized_out is optional
  CHECK(bt_config_validate(cfg.c_str(), nullptr) == BT_OK);

  std::string junk = std::string(R"({"experiment":"simulate","model":)") +
                     kLightModel + R"(,"seed":1,"lenght":5})";
  CHECK(bt_config_validate(junk.c_str(), nullptr) == BT_ERR_INVALID_ARGUMENT);
  CHECK(contains(bt_last_error(), "unknown field"));

  std::string unseeded = std::string(R"({"experiment":"simulate","model":)") +
                         kLightModel + "}";
  CHECK(bt_config_validate(unseeded.c_str(), nullptr) ==
        BT_ERR_INVALID_ARGUMENT);

  // the regime contract catches a unit-mean offspring before anything runs
  std::string stuck = std::string(R"({"experiment":"simulate","model":)") +
                      kFrozenModel + R"(,"seed":1})";
  CHECK(bt_config_validate(stuck.c_str(), nullptr) == BT_ERR_INVALID_ARGUMENT);
  CHECK(contains(bt_last_error(), "offspring mean"));
}

TEST_CASE("experiment runs write byte-stable outputs") {
  std::string cfg = std::string(R"({"experiment":"simulate","model":)") +
                    kLightModel + R"(,"seed":7,"length":200,"burn_in":50})";

  bt_result* res = nullptr;
  REQUIRE(bt_experiment_run(cfg.c_str(), "capi_out_a", -1, 2, &res) == BT_OK);
  REQUIRE(res != nullptr);
  CHECK(contains(bt_result_digest(res), "simulate:"));
  CHECK(contains(bt_result_summary_json(res), "\"experiment\": \"simulate\""));
  bt_result_free(res);

  REQUIRE(bt_experiment_run(cfg.c_str(), "capi_out_b", -1, 2, &res) == BT_OK);
  bt_result_free(res);
  CHECK(slurp("capi_out_a/simulate.csv") == slurp("capi_out_b/simulate.csv"));
  CHECK(slurp("capi_out_a/simulate.summary.json") ==
        slurp("capi_out_b/simulate.summary.json"));

  // the seed override lands in the recorded config
  REQUIRE(bt_experiment_run(cfg.c_str(), "capi_out_c", 9, 2, &res) == BT_OK);
  CHECK(contains(bt_result_summary_json(res), "\"seed\": 9"));
  bt_result_free(res);
  CHECK(slurp("capi_out_a/simulate.csv") != slurp("capi_out_c/simulate.csv"));

  // parallel sections must not leak the thread count into the output
  std::string oracle_cfg =
      std::string(R"({"experiment":"oracle","model":)") + kLightModel +
      R"(,"seed":3,"samples":2000,"state_cap":64})";
  REQUIRE(bt_experiment_run(oracle_cfg.c_str(), "capi_out_t1", -1, 1, &res) ==
          BT_OK);
  bt_result_free(res);
  REQUIRE(bt_experiment_run(oracle_cfg.c_str(), "capi_out_t4", -1, 4, &res) ==
          BT_OK);
  bt_result_free(res);
  CHECK(slurp("capi_out_t1/oracle.csv") == slurp("capi_out_t4/oracle.csv"));
  CHECK(slurp("capi_out_t1/oracle.summary.json") ==
        slurp("capi_out_t4/oracle.summary.json"));

  // out_dir that collides with an existing file is an io error
  CHECK(bt_experiment_run(cfg.c_str(), "capi_out_a/simulate.csv/sub", -1, 1,
                          &res) == BT_ERR_IO);
}

TEST_CASE("null arguments are rejected, not crashed on") {
  CHECK(bt_rng_create(0, 0, nullptr) == BT_ERR_INVALID_ARGUMENT);
  CHECK(bt_dist_from_json(nullptr, nullptr) == BT_ERR_INVALID_ARGUMENT);
  CHECK(bt_model_from_json(nullptr, nullptr) == BT_ERR_INVALID_ARGUMENT);
  CHECK(bt_experiment_run(nullptr, "x", -1, 1, nullptr) ==
        BT_ERR_INVALID_ARGUMENT);
  CHECK(bt_config_validate(nullptr, nullptr) == BT_ERR_INVALID_ARGUMENT);
  std::uint64_t out = 0;
  CHECK(bt_dist_sample(nullptr, nullptr, &out) == BT_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(bt_last_error()) > 0);
}
