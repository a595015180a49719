#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lens/fixtures.hpp"

namespace fs = std::filesystem;
using namespace lens;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 16;
  auto a = fixtures::generate(spec, "fixture_det_a");
  auto b = fixtures::generate(spec, "fixture_det_b");
  CHECK(slurp(a.blocks_path) == slurp(b.blocks_path));
  CHECK(slurp(a.bids_path) == slurp(b.bids_path));
  CHECK(slurp(a.mempool_path) == slurp(b.mempool_path));
  CHECK(slurp(a.payloads_path) == slurp(b.payloads_path));
  CHECK(slurp(a.truth_labels_path) == slurp(b.truth_labels_path));

  spec.seed = 43;
  auto c = fixtures::generate(spec, "fixture_det_c");
  CHECK(slurp(a.blocks_path) != slurp(c.blocks_path));
}

TEST_CASE("scenario files parse and validate") {
  std::string path = (fs::temp_directory_path() / "lens_scenario.txt").string();
  {
    std::ofstream out(path);
    out << "# comment\n"
        << "seed = 7\n"
        << "blocks = 50\n"
        << "txs_per_block = 20\n"
        << "builder = north 0.6 profitable\n"
        << "builder = south 0.4 subsidized\n"
        << "bids = north 10 50 1 400\n"
        << "ep = prov_x north\n"
        << "neutral_provider = prov_n\n"
        << "ep_flow_rate = 0.7\n";
  }
  auto spec = fixtures::ScenarioSpec::from_file(path);
  spec.validate();
  CHECK(spec.seed == 7);
  CHECK(spec.n_blocks == 50);
  REQUIRE(spec.builders.size() == 2);
  CHECK(spec.builders[0].name == "north");
  CHECK(spec.builders[0].market_share == doctest::Approx(0.6));
  CHECK(spec.builders[0].bids_per_slot == 10);
  CHECK(spec.builders[0].cancellations_per_slot == 1);
  REQUIRE(spec.exclusive_providers.size() == 1);
  CHECK(spec.exclusive_providers[0].first == "prov_x");
  CHECK(spec.ep_flow_rate == doctest::Approx(0.7));
}

TEST_CASE("invalid scenarios are rejected") {
  auto spec = fixtures::default_scenario();
  spec.builders[0].market_share += 0.5;  // shares no longer sum to one
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  auto spec2 = fixtures::default_scenario();
  spec2.exclusive_providers = {{"prov", "no_such_builder"}};
  CHECK_THROWS_AS(spec2.validate(), std::invalid_argument);
}

TEST_CASE("block counts follow largest-remainder allocation") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 10;  // shares 0.4/0.3/0.2/0.1 -> exactly 4/3/2/1
  auto corpus = fixtures::generate(spec, "fixture_alloc");
  CHECK(corpus.truth.builders.at("alpha").blocks == 4);
  CHECK(corpus.truth.builders.at("bravo").blocks == 3);
  CHECK(corpus.truth.builders.at("carol").blocks == 2);
  CHECK(corpus.truth.builders.at("delta").blocks == 1);
}

TEST_CASE("verify_labels flags a perturbed prediction") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 8;
  auto corpus = fixtures::generate(spec, "fixture_verify");
  auto self = fixtures::verify_labels(corpus.truth_labels_path, corpus.truth_labels_path);
  CHECK(self.all_diagonal());
  CHECK(self.total > 0);

  // flip one order-flow cell
  std::string perturbed = "fixture_verify/perturbed.csv";
  {
    std::ifstream in(corpus.truth_labels_path);
    std::ofstream out(perturbed);
    std::string line;
    std::getline(in, line);
    out << line << "\n";
    bool flipped = false;
    while (std::getline(in, line)) {
      if (!flipped && line.find("retail_swap") != std::string::npos) {
        auto pos = line.rfind("retail_swap");
        line.replace(pos, std::string("retail_swap").size(), "bot_swap");
        flipped = true;
      }
      out << line << "\n";
    }
    REQUIRE(flipped);
  }
  auto report = fixtures::verify_labels(perturbed, corpus.truth_labels_path);
  CHECK_FALSE(report.all_diagonal());
  CHECK(report.order_flow_matches == report.total - 1);
  CHECK(report.transparency_matches == report.total);
  REQUIRE(report.mismatches.size() == 1);
  CHECK(report.mismatches[0].field == "order_flow");
  CHECK(report.order_flow_confusion.at({"retail_swap", "bot_swap"}) == 1);
}
