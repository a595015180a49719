#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lens/fixtures.hpp"
#include "lens/pipeline.hpp"

namespace {

using lens::pipeline::RunConfig;

// Every pipeline subcommand shares the same inputs/outputs surface.
// Resolution order: built-in defaults < config file (--config or
// LENS_CONFIG) < explicit flags.
struct CommonOpts {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  RunConfig resolve() const {
    RunConfig config;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv("LENS_CONFIG")) path = env;
    }
    if (!path.empty()) config = RunConfig::from_file(path);
    for (const auto& [key, value] : overrides) config.set(key, value);
    return config;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path,
                  "Config file (key = value per line); defaults to $LENS_CONFIG");
  auto capture = [&opts](const std::string& key) {
    return [&opts, key](const std::string& value) { opts.overrides.emplace_back(key, value); };
  };
  cmd->add_option_function<std::string>("--blocks", capture("blocks"), "Blocks JSONL file");
  cmd->add_option_function<std::string>("--mempool", capture("mempool"),
                                        "Mempool first-seen CSV");
  cmd->add_option_function<std::string>("--registry-dir", capture("registry_dir"),
                                        "Directory of registry_<kind>.csv files");
  cmd->add_option_function<std::string>("--bids", capture("bids"), "Relay bids CSV");
  cmd->add_option_function<std::string>("--payloads", capture("payloads"),
                                        "Delivered payloads CSV");
  cmd->add_option_function<std::string>("--out", capture("out"), "Output directory");
  cmd->add_option_function<std::string>("--dust-wei", capture("dust_wei"),
                                        "Dust threshold in wei");
  cmd->add_option_function<std::string>("--alpha", capture("alpha"), "Significance level");
  cmd->add_option_function<std::string>("--top-k", capture("top_k"),
                                        "Builder/provider cap for the statistics stage");
  cmd->add_option_function<std::string>("--min-market-share", capture("min_market_share"),
                                        "Minimum market share for the statistics stage");
  cmd->add_option_function<std::string>("--seed", capture("seed"), "Statistical RNG seed");
  cmd->add_option_function<std::string>("--genesis-time", capture("genesis_time"),
                                        "Beacon genesis time (seconds)");
  cmd->add_option_function<std::string>("--workers", capture("workers"), "Worker thread count");
  cmd->add_option_function<std::string>("--folds", capture("folds"),
                                        "Cross-validation fold count");
}

void print_stage(const lens::pipeline::StageResult& result) {
  std::cout << "stage " << result.stage << ": " << result.records << " records, "
            << result.rejections << " rejected";
  for (const auto& out : result.outputs) std::cout << "\n  wrote " << out;
  std::cout << "\n";
}

int cmd_verify(const std::string& predicted, const std::string& truth) {
  auto report = lens::fixtures::verify_labels(predicted, truth);
  std::cout << "compared " << report.total << " transactions\n"
            << "transparency matches: " << report.transparency_matches << "\n"
            << "order_flow matches:   " << report.order_flow_matches << "\n"
            << "missing: " << report.missing << ", unexpected: " << report.unexpected << "\n";
  if (!report.mismatches.empty()) {
    std::cout << "first mismatches:\n";
    for (const auto& m : report.mismatches) {
      std::cout << "  " << m.hash << " " << m.field << ": truth=" << m.truth
                << " predicted=" << m.predicted << "\n";
    }
  }
  if (!report.all_diagonal()) {
    std::cerr << "error: predictions diverge from ground truth\n";
    return 2;
  }
  std::cout << "all labels match\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lens: MEV-Boost block auction analytics"};
  app.require_subcommand(1);

  CommonOpts label_opts, metrics_opts, analytics_opts, stats_opts, bids_opts, all_opts;
  auto* label_cmd = app.add_subcommand("label", "Label transactions (labels.csv)");
  add_common(label_cmd, label_opts);
  auto* metrics_cmd = app.add_subcommand("metrics", "Per-block economics (economics.csv)");
  add_common(metrics_cmd, metrics_opts);
  auto* analytics_cmd = app.add_subcommand(
      "analytics", "Builder profiles and compositions (profiles.csv and friends)");
  add_common(analytics_cmd, analytics_opts);
  auto* stats_cmd =
      app.add_subcommand("stats", "Statistical analyses over stage outputs (stats.csv)");
  add_common(stats_cmd, stats_opts);
  auto* bids_cmd = app.add_subcommand("bids", "Bid stream metrics (bid_metrics.csv)");
  add_common(bids_cmd, bids_opts);
  auto* all_cmd = app.add_subcommand("run-all", "All stages in dependency order");
  add_common(all_cmd, all_opts);

  std::string scenario_path, fixture_out = "fixture";
  auto* gen_cmd = app.add_subcommand("gen-fixture", "Generate a synthetic labeled corpus");
  gen_cmd->add_option("--scenario", scenario_path, "Scenario file (default built-in)");
  gen_cmd->add_option("--out", fixture_out, "Output directory");

  std::string predicted_path, truth_path;
  auto* verify_cmd =
      app.add_subcommand("verify", "Compare predicted labels against ground truth");
  verify_cmd->add_option("--predicted", predicted_path, "Predicted labels CSV")->required();
  verify_cmd->add_option("--truth", truth_path, "Ground-truth labels CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (label_cmd->parsed()) {
      print_stage(lens::pipeline::run_label(label_opts.resolve()));
    } else if (metrics_cmd->parsed()) {
      print_stage(lens::pipeline::run_metrics(metrics_opts.resolve()));
    } else if (analytics_cmd->parsed()) {
      print_stage(lens::pipeline::run_analytics(analytics_opts.resolve()));
    } else if (stats_cmd->parsed()) {
      print_stage(lens::pipeline::run_stats(stats_opts.resolve()));
    } else if (bids_cmd->parsed()) {
      print_stage(lens::pipeline::run_bids(bids_opts.resolve()));
    } else if (all_cmd->parsed()) {
      auto summary = lens::pipeline::run_all(all_opts.resolve());
      std::cout << summary.to_json() << "\n";
    } else if (gen_cmd->parsed()) {
      auto spec = scenario_path.empty() ? lens::fixtures::default_scenario()
                                        : lens::fixtures::ScenarioSpec::from_file(scenario_path);
      spec.validate();
      auto corpus = lens::fixtures::generate(spec, fixture_out);
      std::cout << "wrote " << corpus.blocks_path << "\n"
                << "wrote " << corpus.mempool_path << "\n"
                << "wrote " << corpus.bids_path << "\n"
                << "wrote " << corpus.payloads_path << "\n"
                << "wrote " << corpus.truth_labels_path << "\n"
                << "wrote " << corpus.truth_summary_path << "\n";
      for (const auto& [kind, path] : corpus.registry_paths) std::cout << "wrote " << path << "\n";
    } else if (verify_cmd->parsed()) {
      return cmd_verify(predicted_path, truth_path);
    }
  } catch (const lens::pipeline::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
