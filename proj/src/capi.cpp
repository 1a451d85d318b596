#include "branchtail.h"

#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "branchtail/distributions.hpp"
#include "branchtail/error.hpp"
#include "branchtail/experiments.hpp"
#include "branchtail/process.hpp"
#include "branchtail/rng.hpp"

struct bt_rng {
  branchtail::RandomStream stream;
};

struct bt_dist {
  branchtail::DistributionSpec spec;
};

struct bt_model {
  branchtail::ModelConfig config;
};

struct bt_result {
  std::string digest;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

int code_of(const branchtail::Error& e) {
  switch (e.code()) {
    case branchtail::ErrorCode::invalid_argument:
      return BT_ERR_INVALID_ARGUMENT;
    case branchtail::ErrorCode::not_ergodic:
      return BT_ERR_NOT_ERGODIC;
    case branchtail::ErrorCode::io:
      return BT_ERR_IO;
    case branchtail::ErrorCode::runtime:
      return BT_ERR_RUNTIME;
  }
  return BT_ERR_RUNTIME;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return BT_OK;
  } catch (const branchtail::Error& e) {
    g_last_error = e.what();
    return code_of(e);
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return BT_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BT_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BT_ERR_RUNTIME;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int check_arg(bool ok, const char* message) {
  if (ok) return BT_OK;
  g_last_error = message;
  return BT_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* bt_version(void) { return "0.1.0"; }

const char* bt_last_error(void) { return g_last_error.c_str(); }

void bt_string_free(char* s) { delete[] s; }

int bt_rng_create(uint64_t master_seed, uint64_t stream_index, bt_rng** out) {
  if (int rc = check_arg(out != nullptr, "bt_rng_create: out is null")) return rc;
  return guarded([&] { *out = new bt_rng{branchtail::RandomStream(master_seed, stream_index)}; });
}

void bt_rng_free(bt_rng* rng) { delete rng; }

int bt_dist_from_json(const char* json, bt_dist** out) {
  if (int rc = check_arg(json != nullptr && out != nullptr,
                         "bt_dist_from_json: null argument"))
    return rc;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(json);
    *out = new bt_dist{branchtail::DistributionSpec::from_json(j)};
  });
}

void bt_dist_free(bt_dist* dist) { delete dist; }

int bt_dist_to_json(const bt_dist* dist, char** out) {
  if (int rc = check_arg(dist != nullptr && out != nullptr,
                         "bt_dist_to_json: null argument"))
    return rc;
  return guarded([&] { *out = copy_string(dist->spec.to_json().dump()); });
}

int bt_dist_sample(const bt_dist* dist, bt_rng* rng, uint64_t* out) {
  if (int rc = check_arg(dist != nullptr && rng != nullptr && out != nullptr,
                         "bt_dist_sample: null argument"))
    return rc;
  return guarded([&] { *out = dist->spec.sample(rng->stream); });
}

int bt_dist_tail(const bt_dist* dist, uint64_t x, double* out) {
  if (int rc = check_arg(dist != nullptr && out != nullptr,
                         "bt_dist_tail: null argument"))
    return rc;
  return guarded([&] { *out = dist->spec.tail(x); });
}

int bt_dist_pgf(const bt_dist* dist, double s, double* out) {
  if (int rc = check_arg(dist != nullptr && out != nullptr,
                         "bt_dist_pgf: null argument"))
    return rc;
  return guarded([&] { *out = dist->spec.pgf(s); });
}

int bt_dist_moments(const bt_dist* dist, double* mean, double* second_moment,
                    int* log_moment_finite) {
  if (int rc = check_arg(dist != nullptr, "bt_dist_moments: null argument"))
    return rc;
  return guarded([&] {
    branchtail::Moments m = dist->spec.moments();
    if (mean) *mean = m.mean;
    if (second_moment) *second_moment = m.second_moment;
    if (log_moment_finite) *log_moment_finite = m.log_moment_finite ? 1 : 0;
  });
}

int bt_model_from_json(const char* json, bt_model** out) {
  if (int rc = check_arg(json != nullptr && out != nullptr,
                         "bt_model_from_json: null argument"))
    return rc;
  return guarded([&] {
    nlohmann::json j = nlohmann::json::parse(json);
    *out = new bt_model{branchtail::ModelConfig::from_json(j)};
  });
}

void bt_model_free(bt_model* model) { delete model; }

int bt_model_ergodicity(const bt_model* model, double* mu, int* log_moment_ok,
                        double* fw_integral, int* ergodic) {
  if (int rc = check_arg(model != nullptr, "bt_model_ergodicity: null argument"))
    return rc;
  return guarded([&] {
    branchtail::ErgodicityReport rep = branchtail::check_ergodicity(model->config);
    if (mu) *mu = rep.mu;
    if (log_moment_ok) *log_moment_ok = rep.log_moment_ok ? 1 : 0;
    if (fw_integral) *fw_integral = rep.fw_integral;
    if (ergodic) *ergodic = rep.ergodic ? 1 : 0;
  });
}

int bt_model_simulate(const bt_model* model, int64_t length, int64_t burn_in,
                      uint64_t master_seed, uint64_t stream, uint64_t* values) {
  if (int rc = check_arg(model != nullptr && values != nullptr,
                         "bt_model_simulate: null argument"))
    return rc;
  return guarded([&] {
    branchtail::PathSample path = branchtail::simulate_path(
        model->config, length, burn_in, master_seed, stream);
    std::memcpy(values, path.values.data(),
                path.values.size() * sizeof(uint64_t));
  });
}

int bt_model_stationary_sample(const bt_model* model, bt_rng* rng, uint64_t* out) {
  if (int rc = check_arg(model != nullptr && rng != nullptr && out != nullptr,
                         "bt_model_stationary_sample: null argument"))
    return rc;
  return guarded([&] {
    *out = branchtail::sample_stationary_backward(model->config, -1, rng->stream);
  });
}

int bt_experiment_run(const char* config_json, const char* out_dir,
                      int64_t seed_override, int threads, bt_result** out) {
  if (int rc = check_arg(config_json != nullptr && out_dir != nullptr &&
                             out != nullptr,
                         "bt_experiment_run: null argument"))
    return rc;
  return guarded([&] {
    nlohmann::json config = nlohmann::json::parse(config_json);
    std::optional<uint64_t> seed;
    if (seed_override >= 0) seed = static_cast<uint64_t>(seed_override);
    branchtail::ExperimentResult res =
        branchtail::run_experiment(config, out_dir, seed, threads);
    *out = new bt_result{res.digest, res.summary.dump(2) + "\n"};
  });
}

const char* bt_result_digest(const bt_result* result) {
  return result ? result->digest.c_str() : "";
}

const char* bt_result_summary_json(const bt_result* result) {
  return result ? result->summary.c_str() : "";
}

void bt_result_free(bt_result* result) { delete result; }

int bt_config_validate(const char* config_json, char** normalized_out) {
  if (int rc = check_arg(config_json != nullptr,
                         "bt_config_validate: null argument"))
    return rc;
  return guarded([&] {
    nlohmann::json config = nlohmann::json::parse(config_json);
    nlohmann::json norm = branchtail::validate_config(config);
    if (normalized_out) *normalized_out = copy_string(norm.dump(2) + "\n");
  });
}

}  // extern "C"
