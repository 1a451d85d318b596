#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace branchtail {

struct ExperimentResult {
  std::string experiment;
  std::string digest;             // one-line human summary
  nlohmann::json summary;         // contents of <out>/<experiment>.summary.json
  std::vector<std::string> files; // paths written
};

// Parses and validates an experiment config (strict: unknown keys rejected,
// "experiment", "model" and "seed" required, regime assumptions and
// ergodicity checked).  Returns the normalized config with defaults filled
// in.  Throws Error on any problem.
nlohmann::json validate_config(const nlohmann::json& config);

// Runs one experiment and writes <out_dir>/<experiment>.csv and
// <out_dir>/<experiment>.summary.json.  Outputs are a pure function of the
// normalized config and the seed: reruns are byte-identical and independent
// of the thread count.
ExperimentResult run_experiment(const nlohmann::json& config,
                                const std::string& out_dir,
                                std::optional<std::uint64_t> seed_override,
                                int threads);

}  // namespace branchtail
