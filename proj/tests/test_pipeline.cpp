#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lens/csv.hpp"
#include "lens/fixtures.hpp"
#include "lens/pipeline.hpp"

namespace fs = std::filesystem;
using namespace lens;

namespace {

pipeline::RunConfig config_for(const fixtures::GeneratedCorpus& corpus,
                               const std::string& fixture_dir, const std::string& out_dir) {
  pipeline::RunConfig config;
  config.blocks_path = corpus.blocks_path;
  config.mempool_path = corpus.mempool_path;
  config.registry_dir = fixture_dir;
  config.bids_path = corpus.bids_path;
  config.payloads_path = corpus.payloads_path;
  config.output_dir = out_dir;
  return config;
}

}  // namespace

TEST_CASE("config files parse with overrides and validation") {
  std::string path = (fs::temp_directory_path() / "lens_config.txt").string();
  {
    std::ofstream out(path);
    out << "blocks = /data/blocks.jsonl  # inline comment\n"
        << "alpha = 0.01\n"
        << "top_k = 5\n"
        << "workers = 4\n";
  }
  auto config = pipeline::RunConfig::from_file(path);
  CHECK(config.blocks_path == "/data/blocks.jsonl");
  CHECK(config.alpha == doctest::Approx(0.01));
  CHECK(config.top_k == 5);
  CHECK(config.workers == 4);
  config.set("alpha", "0.1");  // CLI override wins
  CHECK(config.alpha == doctest::Approx(0.1));
  CHECK_THROWS(config.set("no_such_key", "1"));

  config.set("alpha", "2.0");
  config.output_dir = (fs::temp_directory_path() / "lens_cfg_out").string();
  CHECK_THROWS(config.validate());
}

TEST_CASE("config hash covers analytic parameters but not paths") {
  pipeline::RunConfig a, b;
  a.output_dir = "x";
  b.output_dir = "y";
  b.blocks_path = "other";
  b.workers = 8;
  CHECK(a.config_hash() == b.config_hash());
  b.alpha = 0.01;
  CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("run-all produces the full report set and a stage summary") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 20;
  std::string fixture_dir = "pipeline_fixture";
  auto corpus = fixtures::generate(spec, fixture_dir);
  auto config = config_for(corpus, fixture_dir, "pipeline_out");
  config.genesis_time = spec.genesis_time;
  auto summary = pipeline::run_all(config);
  REQUIRE(summary.stages.size() == 5);
  for (const char* name : {"labels.csv", "economics.csv", "profiles.csv", "label_summary.csv",
                           "composition.csv", "daily_series.csv", "eof_shares.csv",
                           "bid_metrics.csv", "stats.csv"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path("pipeline_out") / name));
  }
  CHECK_FALSE(summary.to_json().empty());

  // stage isolation: stats consumes files, not in-memory state
  fs::remove("pipeline_out/profiles.csv");
  CHECK_THROWS_WITH_AS(static_cast<void>(pipeline::run_stats(config)),
                       doctest::Contains("profiles.csv"), std::runtime_error);
}

TEST_CASE("missing inputs raise input errors naming the file") {
  pipeline::RunConfig config;
  config.blocks_path = "/no/such/blocks.jsonl";
  config.output_dir = "pipeline_missing_out";
  CHECK_THROWS_WITH_AS(static_cast<void>(pipeline::run_label(config)),
                       doctest::Contains("blocks"), std::runtime_error);
}

TEST_CASE("labels written by the pipeline match the planted ground truth") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 20;
  std::string fixture_dir = "pipeline_label_fixture";
  auto corpus = fixtures::generate(spec, fixture_dir);
  auto config = config_for(corpus, fixture_dir, "pipeline_label_out");
  auto result = pipeline::run_label(config);
  CHECK(result.records > 0);
  auto report =
      fixtures::verify_labels("pipeline_label_out/labels.csv", corpus.truth_labels_path);
  CHECK(report.all_diagonal());
}
