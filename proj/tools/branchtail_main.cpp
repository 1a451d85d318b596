#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "branchtail.h"

namespace {

int exit_code(int rc) {
  switch (rc) {
    case BT_OK:
      return 0;
    case BT_ERR_INVALID_ARGUMENT:
    case BT_ERR_NOT_ERGODIC:
      return 2;
    default:
      return 3;
  }
}

int fail_with(int rc) {
  std::fprintf(stderr, "error: %s\n", bt_last_error());
  return exit_code(rc);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return in.good() || in.eof();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchtail " + std::string(bt_version()) +
               ": branching processes with immigration, their stationary "
               "laws, extremes and partial-sum limits"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::int64_t seed = -1;
  int threads = 0;

  const std::vector<std::pair<std::string, std::string>> experiments = {
      {"simulate", "simulate one path and write it out"},
      {"oracle", "compare sampled stationary laws with exact computations"},
      {"tails", "stationary tail ratios and Hill index"},
      {"extremes", "extremal index, clusters, block maxima"},
      {"sums", "normalized partial-sum replicates and their limit checks"},
      {"compound", "one-step compound-sum tail asymptotics"},
  };
  for (const auto& [name, blurb] : experiments) {
    CLI::App* sub = app.add_subcommand(name, blurb);
    sub->add_option("--config", config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--out", out_dir, "output directory (default: out)");
    sub->add_option("--seed", seed, "override the config seed (>= 0)");
    sub->add_option("--threads", threads,
                    "worker threads (0 = hardware default)");
  }
  CLI::App* validate =
      app.add_subcommand("validate-config",
                         "check a config and print its normalized form");
  validate->add_option("--config", config_path, "experiment config (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();

  std::string text;
  if (!read_file(config_path, text)) {
    std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
    return 3;
  }

  if (name == "validate-config") {
    char* normalized = nullptr;
    int rc = bt_config_validate(text.c_str(), &normalized);
    if (rc != BT_OK) return fail_with(rc);
    std::fputs(normalized, stdout);
    bt_string_free(normalized);
    return 0;
  }

  {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) {
      std::fprintf(stderr, "error: %s is not valid JSON\n", config_path.c_str());
      return 2;
    }
    if (!j.contains("experiment") || j.at("experiment") != name) {
      std::fprintf(stderr,
                   "error: config experiment field does not match the '%s' "
                   "subcommand\n",
                   name.c_str());
      return 2;
    }
  }

  bt_result* result = nullptr;
  int rc = bt_experiment_run(text.c_str(), out_dir.c_str(), seed, threads,
                             &result);
  if (rc != BT_OK) return fail_with(rc);
  std::printf("%s\n", bt_result_digest(result));
  std::printf("wrote %s/%s.csv\n", out_dir.c_str(), name.c_str());
  std::printf("wrote %s/%s.summary.json\n", out_dir.c_str(), name.c_str());
  bt_result_free(result);
  return 0;
}
