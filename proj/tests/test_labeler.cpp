#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lens/fixtures.hpp"
#include "lens/ingest.hpp"
#include "lens/labeler.hpp"

using namespace lens;

namespace {

// Index of a transaction by hash; fails the test when absent.
std::size_t index_of(const BlockRecord& block, const TxHash& hash) {
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if (block.transactions[i].hash == hash) return i;
  }
  REQUIRE(false);
  return 0;
}

}  // namespace

TEST_CASE("every transaction receives both labels") {
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 12;
  auto corpus = fixtures::generate(spec, "labeler_totality_fixture");
  RegistrySet registries;
  for (const auto& [kind, path] : corpus.registry_paths) {
    registries.by_kind[kind] = ingest::load_registry(path, kind);
  }
  ingest::LoadReport report;
  auto blocks = ingest::load_blocks(corpus.blocks_path, registries, report);
  REQUIRE_FALSE(blocks.empty());
  for (const auto& block : blocks) {
    auto labels = labeler::label_block(block, registries);
    REQUIRE(labels.labels.size() == block.transactions.size());
    for (std::size_t i = 0; i < labels.labels.size(); ++i) {
      CHECK(labels.labels[i].hash == block.transactions[i].hash);
    }
  }
}

TEST_CASE("bundle membership beats mempool visibility") {
  auto pair = fixtures::bundle_minimal_pair(OfaBundleKind::kCowswapMevblocker, 1);
  BlockRecord block = pair.satisfying;
  // make the backrun publicly visible; its bundle label must still win
  auto idx = index_of(block, pair.target);
  block.transactions[idx].first_seen_mempool = 1;
  auto labels = labeler::label_block(block, pair.satisfying_registries);
  CHECK(labels.labels[idx].transparency == TransparencyLabel::kOfaBundle);
}

TEST_CASE("non-atomic-arb minimal pairs flip on each condition") {
  for (int condition = 1; condition <= 6; ++condition) {
    CAPTURE(condition);
    auto pair = fixtures::non_atomic_minimal_pair(condition);
    auto sat = labeler::label_block(pair.satisfying, pair.satisfying_registries);
    auto vio = labeler::label_block(pair.violating, pair.violating_registries);
    auto sat_idx = index_of(pair.satisfying, pair.target);
    auto vio_idx = index_of(pair.violating, pair.target);
    CHECK(sat.labels[sat_idx].order_flow == OrderFlowLabel::kNonAtomicArb);
    CHECK(vio.labels[vio_idx].order_flow != OrderFlowLabel::kNonAtomicArb);
  }
}

TEST_CASE("bundle minimal pairs flip on each condition") {
  for (auto kind : {OfaBundleKind::kCowswapMevblocker, OfaBundleKind::kMatchingAddress,
                    OfaBundleKind::kMevShare}) {
    for (int condition = 1; condition <= fixtures::bundle_condition_count(kind); ++condition) {
      CAPTURE(to_string(kind));
      CAPTURE(condition);
      auto pair = fixtures::bundle_minimal_pair(kind, condition);
      auto sat = labeler::label_block(pair.satisfying, pair.satisfying_registries);
      auto vio = labeler::label_block(pair.violating, pair.violating_registries);
      auto sat_idx = index_of(pair.satisfying, pair.target);
      auto vio_idx = index_of(pair.violating, pair.target);
      CHECK(sat.labels[sat_idx].bundle_id.has_value());
      CHECK_FALSE(vio.labels[vio_idx].bundle_id.has_value());
    }
  }
}

TEST_CASE("pool tracker flags repeat swaps in the same direction only") {
  labeler::PoolFirstSwapTracker tracker;
  TransactionRecord a;
  a.swap_pool_directions = {{"pool_x", 0}};
  TransactionRecord b;
  b.swap_pool_directions = {{"pool_x", 1}};
  TransactionRecord c;
  c.swap_pool_directions = {{"pool_x", 0}};
  TransactionRecord plain;  // no swaps: vacuously first
  CHECK(tracker.is_first_and_record(a));
  CHECK(tracker.is_first_and_record(b));       // other direction is a distinct key
  CHECK_FALSE(tracker.is_first_and_record(c)); // repeats pool_x/0
  CHECK(tracker.is_first_and_record(plain));
}
