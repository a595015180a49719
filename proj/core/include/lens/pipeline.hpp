#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lens/analytics.hpp"
#include "lens/types.hpp"

namespace lens::pipeline {

// Raised when a computed result contradicts a declared invariant (exit
// code 2 at the CLI); plain input problems raise std::runtime_error /
// std::invalid_argument (exit code 1).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string blocks_path;
  std::string mempool_path;
  std::string registry_dir;  // directory holding registry_<kind>.csv files
  std::string bids_path;
  std::string payloads_path;
  std::string output_dir = ".";
  Wei dust_wei = analytics::kDefaultDustWei;
  double alpha = 0.05;
  int top_k = 10;
  double min_market_share = 0.0001;  // 0.01%
  std::uint64_t seed = 42;
  std::int64_t genesis_time = 1'700'000'000;  // seconds; anchors slot clocks
  int workers = 1;
  std::size_t folds = 5;

  static RunConfig from_file(const std::string& path);
  // Applies one key/value pair (config file line or CLI override).
  void set(const std::string& key, const std::string& value);
  void validate() const;
  // Hash over the analytic parameters only (not paths or worker count),
  // so summaries compare across hosts.
  std::string config_hash() const;
};

struct StageResult {
  std::string stage;
  std::vector<std::string> outputs;
  std::size_t records = 0;
  std::size_t rejections = 0;
};

struct RunSummary {
  std::vector<StageResult> stages;
  std::uint64_t seed = 0;
  std::string config_hash;

  std::string to_json() const;
};

StageResult run_label(const RunConfig& config);
StageResult run_metrics(const RunConfig& config);
StageResult run_analytics(const RunConfig& config);
StageResult run_bids(const RunConfig& config);
// Consumes profiles.csv, composition.csv, eof_shares.csv and
// economics.csv from the output directory; errors name any missing
// dependency.
StageResult run_stats(const RunConfig& config);
RunSummary run_all(const RunConfig& config);

}  // namespace lens::pipeline
