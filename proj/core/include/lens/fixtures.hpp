#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lens/types.hpp"

namespace lens::fixtures {

struct BuilderScenario {
  std::string name;
  double market_share = 0.0;
  // profitable | neutral | subsidized | mixed | bernoulli:<p>
  std::string subsidy_policy = "profitable";
  double exclusion_rate = 0.0;      // blocks with the proposer as fee recipient
  double relay_payment_rate = 0.0;  // blocks carrying a relay fee transfer
  double related_payer_rate = 0.0;  // validator payments from a related address
  int bids_per_slot = 20;
  std::int64_t bid_lag_ms = 100;
  int cancellations_per_slot = 0;
  std::int64_t winner_time_ms = 500;  // winning bid arrival relative to slot start
  std::vector<double> mixture;        // 12-vector; empty = scenario default
};

struct ScenarioSpec {
  std::uint64_t seed = 42;
  int n_blocks = 100;
  int txs_per_block = 30;
  std::int64_t genesis_time = 1'700'000'000;  // seconds
  std::int64_t first_slot = 1'000'000;
  // Fraction of exclusive-side transactions routed through the builder's
  // exclusive provider, when one is planted.
  double ep_flow_rate = 0.5;
  double payload_over_rate = 0.05;   // relay reports more than was paid
  double payload_under_rate = 0.05;  // relay reports less than was paid
  std::vector<double> mixture;       // default order-flow mixture (12-vector)
  std::vector<BuilderScenario> builders;
  std::vector<std::pair<std::string, std::string>> exclusive_providers;  // provider -> builder
  std::vector<std::string> neutral_providers;

  // Flat key/value scenario file; see README for the grammar.
  static ScenarioSpec from_file(const std::string& path);
  // Throws std::invalid_argument on infeasible specs.
  void validate() const;
};

// The scenario used by `gen-fixture` when no file is given.
ScenarioSpec default_scenario();
// Built-in default order-flow mixture (valid simplex).
std::vector<double> default_mixture();

// Planted per-builder aggregates, for oracle comparisons.
struct BuilderTruth {
  std::int64_t blocks = 0;
  std::int64_t excluded_blocks = 0;
  WeiSum total_true_value = 0;
  WeiSum total_validator_payment = 0;
  WeiSum total_relay_payment = 0;
  WeiSum total_builder_profit = 0;
  WeiSum total_over_promised = 0;
  WeiSum total_under_promised = 0;
  std::int64_t profitable_blocks = 0;
  std::int64_t neutral_blocks = 0;
  std::int64_t subsidized_blocks = 0;
  int bids_per_slot = 0;
  std::int64_t bid_lag_ms = 0;
  int cancellations_per_slot = 0;
  std::int64_t winner_time_ms = 0;
};

struct GroundTruth {
  // hash -> planted labels, insertion-ordered by emission
  std::vector<LabeledTransaction> labels;
  std::map<std::string, BuilderTruth> builders;
  std::vector<std::pair<std::string, std::string>> exclusive_providers;
  std::int64_t bundles = 0;
};

struct GeneratedCorpus {
  std::string blocks_path;
  std::string mempool_path;
  std::string bids_path;
  std::string payloads_path;
  std::string truth_labels_path;
  std::string truth_summary_path;
  std::map<RegistryKind, std::string> registry_paths;
  GroundTruth truth;
};

// Deterministic for a given spec+seed; writes every input format the
// pipeline consumes plus the ground-truth files.
GeneratedCorpus generate(const ScenarioSpec& spec, const std::string& out_dir);

// ---- minimal pairs: one heuristic clause flipped at a time ----

struct MinimalPair {
  BlockRecord satisfying;
  BlockRecord violating;
  RegistrySet satisfying_registries;
  RegistrySet violating_registries;
  TxHash target;          // transaction whose outcome must flip
  std::string condition;  // human-readable clause name
};

// Conditions 1..6 of the non-atomic-arbitrage heuristic.
MinimalPair non_atomic_minimal_pair(int condition);

// Clause count for one bundle structure (shared clauses included).
int bundle_condition_count(OfaBundleKind kind);
// Conditions 1..bundle_condition_count(kind); the target transaction's
// bundle membership flips.
MinimalPair bundle_minimal_pair(OfaBundleKind kind, int condition);

// ---- verification against ground truth ----

struct LabelMismatch {
  TxHash hash;
  std::string field;  // "transparency" or "order_flow"
  std::string truth;
  std::string predicted;
};

struct VerifyReport {
  std::int64_t total = 0;
  std::int64_t transparency_matches = 0;
  std::int64_t order_flow_matches = 0;
  // (truth, predicted) -> count
  std::map<std::pair<std::string, std::string>, std::int64_t> transparency_confusion;
  std::map<std::pair<std::string, std::string>, std::int64_t> order_flow_confusion;
  std::vector<LabelMismatch> mismatches;  // capped at 100 entries
  std::int64_t missing = 0;     // truth rows absent from the prediction
  std::int64_t unexpected = 0;  // predicted rows absent from the truth

  bool all_diagonal() const {
    return missing == 0 && unexpected == 0 && transparency_matches == total &&
           order_flow_matches == total;
  }
};

// Both files need hash, transparency and order_flow columns.
VerifyReport verify_labels(const std::string& predicted_csv, const std::string& truth_csv);

}  // namespace lens::fixtures
