// mcbias: command-line driver over the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mcbias/mcbias.h"

namespace {

using Json = nlohmann::json;

struct Flags {
  std::string config_path;
  std::string out_path;
  bool dump_config = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> trials;
  std::optional<std::string> model;
  std::optional<std::string> y_dist;
  std::optional<std::string> s_dist;
  std::optional<std::string> nu;
  std::optional<std::string> data;
  std::optional<std::size_t> j;
  std::optional<std::string> q;
  std::optional<std::string> construction;
  std::optional<std::string> alpha;
  std::optional<std::string> grid;
  std::optional<std::string> lemma;
  std::optional<std::string> t_y;
  std::optional<std::string> t_s;
  std::optional<std::size_t> blocks;
  bool oracle = false;
  bool unshared = false;
};

const char* kRangeHelp =
    "Ranges: lo:hi:N (N even steps), lo:hi:logN (N log steps, counts rounded and deduplicated), "
    "a,b,c (list) or a single value.";

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  sub->add_option("--out", f.out_path, "Artifact path (default: standard output)");
  sub->add_option("--seed", f.seed, "Master seed (default 0)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--workers", f.workers, "Worker threads, 0 = all cores (results do not depend on it)");
  sub->add_flag("--dump-config", f.dump_config, "Print the merged, normalized config and exit");
}

void add_scenario(CLI::App* sub, Flags& f) {
  sub->add_option("--model", f.model, "additive, multiplicative, phase or exponential");
  sub->add_option("--y-dist", f.y_dist, "Data distribution: normal:MEAN:VAR, uniform:LO:HI or two_point:A:B:P");
  sub->add_option("--s-dist", f.s_dist, "Error distribution, same syntax as --y-dist");
  sub->add_option("--j", f.j, "Data vectors per trial (J)");
}

void put(Json& c, const char* key, const auto& opt) {
  if (opt) c[key] = *opt;
}

Json parse_json_flag(const std::string& text, const char* name) {
  try {
    return Json::parse(text);
  } catch (const Json::exception&) {
    throw std::runtime_error(std::string(name) + " must be JSON, e.g. [[1,0],[0,1]]");
  }
}

Json merged_config(const std::string& command, const Flags& f) {
  Json c = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw std::runtime_error("cannot open config '" + f.config_path + "'");
    try {
      c = Json::parse(in);
    } catch (const Json::exception& e) {
      throw std::runtime_error("config '" + f.config_path + "' is not valid JSON: " + e.what());
    }
    if (!c.is_object()) throw std::runtime_error("config must be a JSON object");
    if (c.contains("command") && c["command"] != command)
      throw std::runtime_error("config is for '" + c["command"].get<std::string>() + "', not '" + command + "'");
  }
  c["command"] = command;
  put(c, "seed", f.seed);
  put(c, "format", f.format);
  put(c, "workers", f.workers);
  put(c, "trials", f.trials);
  put(c, "model", f.model);
  put(c, "y_dist", f.y_dist);
  put(c, "s_dist", f.s_dist);
  put(c, "data", f.data);
  put(c, "j", f.j);
  put(c, "q", f.q);
  put(c, "construction", f.construction);
  put(c, "alpha", f.alpha);
  put(c, "grid", f.grid);
  put(c, "lemma", f.lemma);
  put(c, "blocks", f.blocks);
  if (f.nu) {
    Json nu = Json::array();
    std::stringstream ss(*f.nu);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != item.size()) throw std::runtime_error("--nu must be a comma-separated list of numbers");
      nu.push_back(v);
    }
    c["nu"] = nu;
  }
  if (f.t_y) c["t_y"] = parse_json_flag(*f.t_y, "--t-y");
  if (f.t_s) c["t_s"] = parse_json_flag(*f.t_s, "--t-s");
  if (f.oracle) c["oracle"] = true;
  if (f.unshared) c["shared"] = false;
  return c;
}

int write_artifact(const std::string& path, const char* data, std::size_t size) {
  if (path.empty() || path == "-") {
    std::fwrite(data, 1, size, stdout);
    return 0;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(data, static_cast<std::streamsize>(size))) {
    std::fprintf(stderr, "error: cannot write '%s'\n", path.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo bias study of two-stage systematic-error propagation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mcb_version());
  app.footer(kRangeHelp);
  Flags f;

  auto* pipeline = app.add_subcommand("pipeline", "Run Transform and Combine once on data");
  add_common(pipeline, f);
  add_scenario(pipeline, f);
  pipeline->add_option("--data", f.data, "Data CSV with header y_1,...,y_K");
  pipeline->add_option("--nu", f.nu, "Error mean used for nominals, comma-separated");
  pipeline->add_option("--q", f.q, "Number of replicates Q");
  pipeline->add_option("--construction", f.construction, "current or alternative");
  pipeline->add_option("--t-y", f.t_y, "K x K pre-transform of the data, as JSON");
  pipeline->add_option("--t-s", f.t_s, "K x K pre-transform of the errors, as JSON");
  pipeline->add_flag("--unshared", f.unshared, "Draw separate errors for every data vector");

  auto* sweep = app.add_subcommand("bias-sweep", "Relative bias of the replicate sample variance over Q");
  add_common(sweep, f);
  add_scenario(sweep, f);
  sweep->add_option("--q", f.q, "Q values (range)");
  sweep->add_option("--trials", f.trials, "Trials per point (default 10000)");
  sweep->add_option("--construction", f.construction, "current, alternative or both");
  sweep->add_flag("--oracle", f.oracle, "Also estimate the target variance by brute force");

  auto* meanvar = app.add_subcommand("mean-var", "Variance of the replicate mean, current minus alternative");
  add_common(meanvar, f);
  add_scenario(meanvar, f);
  meanvar->add_option("--q", f.q, "Q values (range)");
  meanvar->add_option("--trials", f.trials, "Trials per point (default 10000)");

  auto* vardiff = app.add_subcommand("vardiff", "Relative difference of sample-variance variances over Q");
  add_common(vardiff, f);
  add_scenario(vardiff, f);
  vardiff->add_option("--q", f.q, "Q values (range)");
  vardiff->add_option("--trials", f.trials, "Trials per point (default 100000)");
  vardiff->add_option("--blocks", f.blocks, "Trial blocks for the standard error (default 20)");

  for (const char* name : {"psi-map", "relbias-map"}) {
    auto* map = app.add_subcommand(name, std::string(name) == "psi-map"
                                             ? "Exponential-kernel psi over a grid of data ranges"
                                             : "Exponential-kernel relative bias over a grid of data ranges");
    add_common(map, f);
    map->add_option("--model", f.model, "Must be exponential")->check(CLI::IsMember({"exponential"}));
    map->add_option("--alpha", f.alpha, "Error half-widths (range)");
    map->add_option("--grid", f.grid, "Data endpoints lo:hi:N");
    if (std::string(name) == "relbias-map") map->add_option("--j", f.j, "Data vectors J (default 2)");
  }

  auto* lemmas = app.add_subcommand("lemmas", "Empirical checks of the supporting lemmas");
  add_common(lemmas, f);
  lemmas->add_option("--lemma", f.lemma, "Lemma ids 1-5 (list or range)");
  lemmas->add_option("--trials", f.trials, "Trials per check (default 100000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  // The map commands accept --model for symmetry with the others; it is implied.
  f.model = (command == "psi-map" || command == "relbias-map") ? std::nullopt : f.model;

  Json config;
  try {
    config = merged_config(command, f);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  mcb_context* ctx = nullptr;
  if (mcb_context_create(&ctx) != MCB_OK) {
    std::fprintf(stderr, "error: cannot create context\n");
    return 2;
  }
  const std::string text = config.dump();
  mcb_result* result = nullptr;
  const mcb_status status =
      f.dump_config ? mcb_normalize_config(ctx, text.c_str(), &result) : mcb_run(ctx, text.c_str(), &result);
  if (status != MCB_OK) {
    std::fprintf(stderr, "error: %s\n", mcb_context_last_error(ctx));
    mcb_context_destroy(ctx);
    return status == MCB_ERR_CONFIG ? 1 : 2;
  }
  int rc = 0;
  if (f.dump_config) {
    std::fwrite(mcb_result_artifact(result), 1, mcb_result_artifact_size(result), stdout);
  } else {
    rc = write_artifact(f.out_path, mcb_result_artifact(result), mcb_result_artifact_size(result));
    std::FILE* summary_stream = (f.out_path.empty() || f.out_path == "-") ? stderr : stdout;
    if (rc == 0) std::fprintf(summary_stream, "%s\n", mcb_result_summary(result));
  }
  mcb_result_destroy(result);
  mcb_context_destroy(ctx);
  return rc;
}
