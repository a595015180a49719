// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and uses library entry points
// plus generated fixtures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lens/analytics.hpp"
#include "lens/bids.hpp"
#include "lens/csv.hpp"
#include "lens/fixtures.hpp"
#include "lens/ingest.hpp"
#include "lens/labeler.hpp"
#include "lens/metrics.hpp"
#include "lens/pipeline.hpp"
#include "lens/stats.hpp"

namespace fs = std::filesystem;
using namespace lens;

namespace {

struct Check {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& message) {
    if (!ok && pass) {
      pass = false;
      detail = message;
    }
  }
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RegistrySet load_registries(const fixtures::GeneratedCorpus& corpus) {
  RegistrySet set;
  for (const auto& [kind, path] : corpus.registry_paths) {
    set.by_kind[kind] = ingest::load_registry(path, kind);
  }
  return set;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

pipeline::RunConfig pipeline_config(const fixtures::GeneratedCorpus& corpus,
                                    const std::string& fixture_dir,
                                    const std::string& out_dir) {
  pipeline::RunConfig config;
  config.blocks_path = corpus.blocks_path;
  config.mempool_path = corpus.mempool_path;
  config.registry_dir = fixture_dir;
  config.bids_path = corpus.bids_path;
  config.payloads_path = corpus.payloads_path;
  config.output_dir = out_dir;
  return config;
}

// Exact binomial tail oracle via the pmf ratio recurrence (independent of
// the log-gamma path in the library).
double oracle_binomial_threshold(std::size_t n, double chance, double alpha) {
  auto p = static_cast<long double>(chance);
  std::vector<long double> pmf(n + 1);
  pmf[0] = std::pow(1.0L - p, static_cast<long double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    pmf[k + 1] = pmf[k] * static_cast<long double>(n - k) /
                 static_cast<long double>(k + 1) * p / (1.0L - p);
  }
  long double tail = 0.0L;
  for (std::size_t k = n + 1; k-- > 0;) {
    tail += pmf[k];
    if (tail >= static_cast<long double>(alpha)) {
      return static_cast<double>(k + 1) / static_cast<double>(n);
    }
  }
  return 0.0;
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    ranks[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  return ranks;
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// ---- criteria ----

Check criterion_label_oracle() {
  Check c;
  auto start = std::chrono::steady_clock::now();
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 500;
  spec.txs_per_block = 40;  // ~20k transactions
  std::string dir = "acc1_fixture";
  auto corpus = fixtures::generate(spec, dir);
  auto config = pipeline_config(corpus, dir, "acc1_out");
  pipeline::run_label(config);
  auto report = fixtures::verify_labels("acc1_out/labels.csv", corpus.truth_labels_path);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.require(report.total >= 15000, "fixture too small: " + std::to_string(report.total));
  c.require(report.all_diagonal(),
            "confusion matrices not diagonal: " +
                std::to_string(report.total - report.order_flow_matches) + " order-flow and " +
                std::to_string(report.total - report.transparency_matches) +
                " transparency mismatches");
  c.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s exceeds 60s");
  if (c.pass) {
    c.detail = std::to_string(report.total) + " transactions, 100% on both label axes, " +
               std::to_string(elapsed).substr(0, 4) + "s";
  }
  return c;
}

Check criterion_minimal_pairs() {
  Check c;
  int flipped = 0;
  auto index_of = [](const BlockRecord& block, const TxHash& hash) {
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
      if (block.transactions[i].hash == hash) return i;
    }
    return block.transactions.size();
  };
  for (int condition = 1; condition <= 6; ++condition) {
    auto pair = fixtures::non_atomic_minimal_pair(condition);
    auto sat = labeler::label_block(pair.satisfying, pair.satisfying_registries);
    auto vio = labeler::label_block(pair.violating, pair.violating_registries);
    bool sat_hit = sat.labels[index_of(pair.satisfying, pair.target)].order_flow ==
                   OrderFlowLabel::kNonAtomicArb;
    bool vio_hit = vio.labels[index_of(pair.violating, pair.target)].order_flow ==
                   OrderFlowLabel::kNonAtomicArb;
    c.require(sat_hit && !vio_hit, "non-atomic-arb clause " + pair.condition + " did not flip");
    if (sat_hit && !vio_hit) ++flipped;
  }
  for (auto kind : {OfaBundleKind::kCowswapMevblocker, OfaBundleKind::kMatchingAddress,
                    OfaBundleKind::kMevShare}) {
    for (int condition = 1; condition <= fixtures::bundle_condition_count(kind); ++condition) {
      auto pair = fixtures::bundle_minimal_pair(kind, condition);
      auto sat = labeler::label_block(pair.satisfying, pair.satisfying_registries);
      auto vio = labeler::label_block(pair.violating, pair.violating_registries);
      bool sat_in = sat.labels[index_of(pair.satisfying, pair.target)].bundle_id.has_value();
      bool vio_in = vio.labels[index_of(pair.violating, pair.target)].bundle_id.has_value();
      c.require(sat_in && !vio_in, std::string(to_string(kind)) + " clause " + pair.condition +
                                       " did not flip bundle membership");
      if (sat_in && !vio_in) ++flipped;
    }
  }
  if (c.pass) c.detail = std::to_string(flipped) + " clauses individually flip the label";
  return c;
}

Check criterion_economics_identity() {
  Check c;
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 120;
  std::string dir = "acc3_fixture";
  auto corpus = fixtures::generate(spec, dir);
  auto registries = load_registries(corpus);
  ingest::LoadReport report;
  auto blocks = ingest::load_blocks(corpus.blocks_path, registries, report);
  {
    ingest::LoadReport mp;
    auto payloads = ingest::load_payloads(corpus.payloads_path, mp);
    ingest::join_payloads(blocks, payloads);
  }
  WeiSum tv = 0, vp = 0, rp = 0, bp = 0;
  int non_excluded = 0;
  for (const auto& block : blocks) {
    auto labels = labeler::label_block(block, registries);
    auto econ = metrics::block_economics(block, labels.bundles, registries);
    if (econ.excluded) continue;
    ++non_excluded;
    c.require(econ.builder_profit ==
                  econ.true_value - econ.validator_payment - econ.relay_payment,
              "per-block identity broke at slot " + std::to_string(block.slot));
    tv += econ.true_value;
    vp += econ.validator_payment;
    rp += econ.relay_payment;
    bp += econ.builder_profit;
  }
  c.require(non_excluded > 0, "no non-excluded blocks in fixture");
  c.require(bp + vp + rp == tv, "corpus conservation off by " + wei_to_string(tv - bp - vp - rp) +
                                    " wei");
  if (c.pass) {
    c.detail = "identity bit-exact on " + std::to_string(non_excluded) +
               " blocks; corpus conservation holds to 0 wei";
  }
  return c;
}

Check criterion_entropy() {
  Check c;
  std::vector<double> uniform(12, 1.0 / 12.0);
  double h = analytics::shannon_entropy(uniform);
  c.require(std::abs(h - std::log2(12.0)) < 1e-12,
            "uniform entropy " + std::to_string(h) + " != log2(12)");
  std::vector<double> degenerate(12, 0.0);
  degenerate[0] = 1.0;
  c.require(analytics::shannon_entropy(degenerate) == 0.0, "degenerate entropy not exactly 0");
  if (c.pass) c.detail = "uniform = log2(12) = 3.5849625... within 1e-12; degenerate = 0";
  return c;
}

Check criterion_spearman() {
  Check c;
  std::mt19937_64 eng(2024);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::uniform_int_distribution<int> len(3, 8);
  std::uniform_int_distribution<int> coarse(0, 3);
  int compared = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto n = static_cast<std::size_t>(len(eng));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = trial % 4 == 0 ? coarse(eng) : dist(eng);
      y[i] = trial % 4 == 0 ? coarse(eng) : dist(eng);
    }
    double oracle = oracle_pearson(oracle_ranks(x), oracle_ranks(y));
    if (!std::isfinite(oracle)) continue;
    auto got = stats::spearman(x, y);
    worst = std::max(worst, std::abs(got.coefficient - oracle));
    ++compared;
    c.require(std::abs(got.coefficient - oracle) < 1e-12,
              "oracle deviation " + std::to_string(std::abs(got.coefficient - oracle)) +
                  " at trial " + std::to_string(trial));
  }
  std::vector<double> share{0.05, 0.1, 0.2, 0.3, 0.35};
  c.require(stats::spearman(share, {1, 2, 4, 8, 16}).coefficient == 1.0,
            "monotone increasing feature did not give rho = 1");
  c.require(stats::spearman(share, {9, 7, 5, 3, 1}).coefficient == -1.0,
            "monotone decreasing feature did not give rho = -1");
  double worst_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(8), y(8);
    for (int i = 0; i < 8; ++i) {
      x[i] = dist(eng);
      y[i] = 0.6 * x[i] + 0.4 * dist(eng);
    }
    auto approx = stats::spearman(x, y, 0.05, stats::PValueMode::kTApproximation);
    auto exact = stats::spearman(x, y, 0.05, stats::PValueMode::kExactPermutation);
    worst_gap = std::max(worst_gap, std::abs(approx.p_value - exact.p_value));
  }
  c.require(worst_gap < 0.02,
            "permutation vs t-approximation gap " + std::to_string(worst_gap) + " >= 0.02");
  if (c.pass) {
    std::ostringstream out;
    out << compared << " random vectors within 1e-12 (worst " << worst
        << "); planted rho = +/-1; permutation gap <= " << worst_gap;
    c.detail = out.str();
  }
  return c;
}

Check criterion_binomial_threshold() {
  Check c;
  double at_100 = stats::binomial_threshold(100, 0.5, 0.05);
  c.require(at_100 == 0.59, "k at n=100, chance 0.5, alpha 0.05 is " +
                                std::to_string(at_100 * 100) + ", expected 59");
  for (std::size_t n = 1; n <= 1000; ++n) {
    for (double chance : {0.5, 1.0 / 3.0}) {
      for (double alpha : {0.05, 0.01}) {
        double got = stats::binomial_threshold(n, chance, alpha);
        double want = oracle_binomial_threshold(n, chance, alpha);
        if (std::abs(got - want) > 1e-12) {
          c.require(false, "mismatch at n=" + std::to_string(n) + " chance=" +
                               std::to_string(chance) + " alpha=" + std::to_string(alpha) +
                               ": got " + std::to_string(got) + " want " +
                               std::to_string(want));
        }
      }
    }
  }
  if (c.pass) c.detail = "matches exact-CDF oracle for all n <= 1000; k = 59 at n = 100";
  return c;
}

// Shared machinery for criterion 7.
struct EofData {
  std::vector<std::string> block_builders;
  std::vector<std::string> builders;   // unique, sorted
  std::vector<std::string> providers;  // top by total share
  std::map<std::string, std::vector<double>> features;  // provider -> per-block share
};

std::vector<std::pair<std::string, std::string>> detect_eps(
    const EofData& data, const std::vector<std::string>& assignment, std::uint64_t seed) {
  // matches the pipeline's family-wise (Bonferroni) cell alpha
  double cell_alpha =
      0.05 / static_cast<double>(data.builders.size() * data.providers.size());
  std::vector<stats::DecodingResult> matrix;
  for (const auto& builder : data.builders) {
    std::vector<int> target(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      target[i] = assignment[i] == builder ? 1 : 0;
    }
    for (const auto& provider : data.providers) {
      auto cell = stats::lda_decoding_accuracy(data.features.at(provider), target, 5,
                                               seed ^ fnv1a(builder + "|" + provider),
                                               cell_alpha);
      if (!cell) continue;
      cell->builder_id = builder;
      cell->provider_id = provider;
      matrix.push_back(*cell);
    }
  }
  return stats::exclusive_providers(matrix);
}

Check criterion_ep_detection() {
  Check c;
  fixtures::ScenarioSpec spec;
  spec.seed = 42;
  spec.n_blocks = 1000;  // 200 blocks per builder
  spec.txs_per_block = 24;
  for (const char* name : {"b1", "b2", "b3", "b4", "b5"}) {
    fixtures::BuilderScenario b;
    b.name = name;
    b.market_share = 0.2;
    b.subsidy_policy = "profitable";
    spec.builders.push_back(b);
  }
  spec.exclusive_providers = {{"ep_one", "b1"}, {"ep_two", "b2"}};
  spec.neutral_providers = {"n_alpha", "n_beta", "n_gamma"};
  std::string dir = "acc7_fixture";
  auto corpus = fixtures::generate(spec, dir);
  auto config = pipeline_config(corpus, dir, "acc7_out");
  pipeline::run_analytics(config);

  EofData data;
  {
    csv::Reader reader("acc7_out/eof_shares.csv");
    auto s_col = reader.column("slot");
    auto b_col = reader.column("builder");
    auto p_col = reader.column("provider");
    auto v_col = reader.column("share");
    std::map<std::int64_t, std::size_t> slot_index;
    std::map<std::string, std::map<std::size_t, double>> sparse;
    std::map<std::string, double> totals;
    while (auto row = reader.next()) {
      auto [it, inserted] =
          slot_index.emplace(std::stoll(row->fields[s_col]), data.block_builders.size());
      if (inserted) data.block_builders.push_back(row->fields[b_col]);
      double share = std::stod(row->fields[v_col]);
      sparse[row->fields[p_col]][it->second] = share;
      totals[row->fields[p_col]] += share;
    }
    std::set<std::string> builder_set(data.block_builders.begin(), data.block_builders.end());
    data.builders.assign(builder_set.begin(), builder_set.end());
    std::vector<std::string> providers;
    for (const auto& [p, t] : totals) providers.push_back(p);
    std::sort(providers.begin(), providers.end(), [&](const auto& a, const auto& b) {
      if (totals[a] != totals[b]) return totals[a] > totals[b];
      return a < b;
    });
    if (providers.size() > 10) providers.resize(10);
    data.providers = providers;
    for (const auto& p : providers) {
      std::vector<double> feature(data.block_builders.size(), 0.0);
      for (const auto& [idx, share] : sparse[p]) feature[idx] = share;
      data.features[p] = std::move(feature);
    }
  }

  auto detected = detect_eps(data, data.block_builders, 42);
  std::set<std::pair<std::string, std::string>> got(detected.begin(), detected.end());
  std::set<std::pair<std::string, std::string>> want{{"ep_one", "b1"}, {"ep_two", "b2"}};
  if (got != want) {
    std::ostringstream out;
    out << "detected {";
    for (const auto& [p, b] : got) out << " " << p << "->" << b;
    out << " }, expected exactly the 2 planted pairs";
    c.require(false, out.str());
  }

  int false_positive_runs = 0;
  for (std::uint64_t run = 0; run < 200; ++run) {
    auto shuffled = data.block_builders;
    std::mt19937_64 eng(1000 + run);
    std::shuffle(shuffled.begin(), shuffled.end(), eng);
    if (!detect_eps(data, shuffled, 1000 + run).empty()) ++false_positive_runs;
  }
  c.require(false_positive_runs <= 10, "false-positive EPs in " +
                                           std::to_string(false_positive_runs) +
                                           "/200 shuffled runs (> 5%)");
  if (c.pass) {
    c.detail = "exactly the 2 planted pairs at the default seed; " +
               std::to_string(false_positive_runs) + "/200 shuffled runs with false positives";
  }
  return c;
}

Check criterion_chi_square() {
  Check c;
  // EP builders: 46% of 5000 blocks profitable; non-EP builders: 20% of
  // 5000. Only significance and direction matter here, not the magnitude
  // a full-scale corpus would produce.
  auto r = stats::chi_square_2x2({{{4000.0, 1000.0}, {2700.0, 2300.0}}});
  c.require(r.p_value < 0.05, "46% vs 20% profitable rates not significant (p = " +
                                  std::to_string(r.p_value) + ")");
  c.require(r.statistic > 0, "non-positive statistic");
  if (c.pass) {
    std::ostringstream out;
    out << "X^2 = " << r.statistic << ", p = " << r.p_value << " < 0.05";
    c.detail = out.str();
  }
  return c;
}

Check criterion_bid_metrics() {
  Check c;
  fixtures::ScenarioSpec spec;
  spec.seed = 42;
  spec.n_blocks = 200;
  spec.txs_per_block = 12;
  // Realistic spread: heavy bidders with lag/cancel variety.
  struct Params {
    const char* name;
    double share;
    int bids;
    std::int64_t lag;
    int cancels;
    std::int64_t winner;
  };
  for (auto [name, share, bids_n, lag, cancels, winner] :
       {Params{"beaver", 0.35, 62, 80, 6, 2150}, Params{"titan", 0.30, 31, 150, 0, 1800},
        Params{"rsync", 0.20, 24, 230, 2, 2400}, Params{"f1b", 0.15, 10, 500, 1, 900}}) {
    fixtures::BuilderScenario b;
    b.name = name;
    b.market_share = share;
    b.bids_per_slot = bids_n;
    b.bid_lag_ms = lag;
    b.cancellations_per_slot = cancels;
    b.winner_time_ms = winner;
    spec.builders.push_back(b);
  }
  std::string dir = "acc9_fixture";
  auto corpus = fixtures::generate(spec, dir);
  RegistrySet registries = load_registries(corpus);
  ingest::LoadReport report;
  auto bid_records = ingest::load_bids(corpus.bids_path, registries, report);
  auto books = bids::build_bid_books(bid_records, spec.genesis_time);
  auto profiles = bids::aggregate_bid_profiles(books);
  for (const auto& builder : spec.builders) {
    const auto& truth = corpus.truth.builders.at(builder.name);
    auto it = profiles.find(builder.name);
    if (it == profiles.end()) {
      c.require(false, "no bid profile for " + builder.name);
      continue;
    }
    const auto& p = it->second;
    auto close = [](double a, double b) { return std::abs(a - b) < 0.01; };
    c.require(p.blocks_won == truth.blocks, builder.name + ": blocks won mismatch");
    c.require(close(p.avg_bids(), builder.bids_per_slot), builder.name + ": avg bids " +
                                                              std::to_string(p.avg_bids()));
    c.require(close(p.avg_update_lag_ms(), static_cast<double>(builder.bid_lag_ms)),
              builder.name + ": avg lag " + std::to_string(p.avg_update_lag_ms()));
    c.require(close(p.avg_winner_time_ms(), static_cast<double>(builder.winner_time_ms)),
              builder.name + ": winner time " + std::to_string(p.avg_winner_time_ms()));
    c.require(close(p.avg_cancellations(), builder.cancellations_per_slot),
              builder.name + ": cancels " + std::to_string(p.avg_cancellations()));
  }
  if (c.pass) c.detail = "planted counts, lags, winner times and cancels reproduced exactly";
  return c;
}

Check criterion_determinism() {
  Check c;
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 60;
  std::string dir = "acc10_fixture";
  auto corpus = fixtures::generate(spec, dir);
  static const char* kFiles[] = {"labels.csv",      "economics.csv",  "profiles.csv",
                                 "label_summary.csv", "composition.csv", "daily_series.csv",
                                 "eof_shares.csv",  "bid_metrics.csv", "stats.csv"};
  std::map<std::string, std::string> baseline;
  bool first = true;
  int runs = 0;
  for (int workers : {1, 1, 4, 8}) {  // repeated run at 1, then other worker counts
    std::string out_dir = "acc10_out_" + std::to_string(runs++);
    auto config = pipeline_config(corpus, dir, out_dir);
    config.workers = workers;
    pipeline::run_all(config);
    for (const char* file : kFiles) {
      std::string bytes = slurp(out_dir + "/" + file);
      c.require(!bytes.empty(), std::string(file) + " empty");
      if (first) {
        baseline[file] = bytes;
      } else {
        c.require(bytes == baseline[file], std::string(file) + " differs at workers=" +
                                               std::to_string(workers));
      }
    }
    first = false;
  }
  if (c.pass) c.detail = "all 9 outputs byte-identical across repeats and workers {1, 4, 8}";
  return c;
}

Check criterion_report_shape() {
  Check c;
  auto spec = fixtures::default_scenario();
  spec.n_blocks = 40;
  std::string dir = "acc11_fixture";
  auto corpus = fixtures::generate(spec, dir);
  auto config = pipeline_config(corpus, dir, "acc11_out");
  pipeline::run_all(config);

  auto require_columns = [&](const std::string& file, const std::vector<std::string>& cols) {
    csv::Reader reader("acc11_out/" + file);
    for (const auto& col : cols) {
      bool found = false;
      for (const auto& h : reader.header()) found = found || h == col;
      c.require(found, file + " lacks column " + col);
    }
  };
  // builder economics table
  require_columns("profiles.csv",
                  {"builder", "total_blocks", "market_share_pct",
                   "total_validator_payment_eth", "total_subsidy_eth", "total_profit_eth",
                   "profit_margin_pct"});
  // bid behaviour table
  require_columns("bid_metrics.csv", {"builder", "blocks_won", "avg_bids",
                                      "avg_update_lag_ms", "avg_winner_time_ms",
                                      "total_cancels", "avg_cancels"});
  // order-flow statistics table
  require_columns("label_summary.csv",
                  {"label_type", "label", "occurrence_probability", "avg_value_eth",
                   "value_share_pct", "value_per_gas_eth", "avg_gas_pct"});
  // extended profile table
  require_columns("profiles.csv",
                  {"profitable_blocks_pct", "dust_zero_profit_blocks_pct",
                   "subsidized_blocks_pct", "tob_value_pct", "bob_value_pct", "eob_value_pct"});
  // payment-pattern table
  require_columns("profiles.csv",
                  {"excluded_blocks", "excluded_blocks_pct", "excluded_value_eth",
                   "other_fee_payer_blocks_pct", "promise_delivered_blocks_pct",
                   "over_promised_bid_value_eth", "under_promised_bid_value_eth",
                   "relay_payment_eth"});
  // figure series: market share / cumulative profit / margin over time
  {
    csv::Reader reader("acc11_out/daily_series.csv");
    auto m_col = reader.column("metric");
    std::set<std::string> metrics;
    while (auto row = reader.next()) metrics.insert(row->fields[m_col]);
    for (const char* metric : {"market_share_pct", "cumulative_profit_eth", "profit_eth",
                               "profit_margin_pct"}) {
      c.require(metrics.count(metric) > 0, std::string("daily_series.csv lacks ") + metric);
    }
  }
  // figure series: composition by transparency / order flow / provider
  {
    csv::Reader reader("acc11_out/composition.csv");
    auto t_col = reader.column("label_type");
    std::set<std::string> types;
    while (auto row = reader.next()) types.insert(row->fields[t_col]);
    for (const char* type : {"transparency", "order_flow", "eof_provider"}) {
      c.require(types.count(type) > 0, std::string("composition.csv lacks ") + type);
    }
  }
  // figure series: entropy per builder, correlation matrix rows
  require_columns("profiles.csv", {"entropy", "msof_label", "msof_share_pct"});
  {
    csv::Reader reader("acc11_out/stats.csv");
    auto k_col = reader.column("kind");
    std::set<std::string> kinds;
    while (auto row = reader.next()) kinds.insert(row->fields[k_col]);
    for (const char* kind : {"spearman", "decoding"}) {
      c.require(kinds.count(kind) > 0, std::string("stats.csv lacks kind ") + kind);
    }
  }
  if (c.pass) c.detail = "every table column and figure series present by name";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria{
      {1, "label oracle equivalence", criterion_label_oracle},
      {2, "heuristic clause coverage", criterion_minimal_pairs},
      {3, "economics identity", criterion_economics_identity},
      {4, "entropy", criterion_entropy},
      {5, "spearman kernel", criterion_spearman},
      {6, "binomial threshold", criterion_binomial_threshold},
      {7, "exclusive-provider detection", criterion_ep_detection},
      {8, "chi-square direction", criterion_chi_square},
      {9, "bid metrics", criterion_bid_metrics},
      {10, "determinism and parallel safety", criterion_determinism},
      {11, "report shape", criterion_report_shape},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::cout << "criterion " << criterion.id << " [" << (result.pass ? "PASS" : "FAIL")
              << "] " << criterion.name << " — " << result.detail << "\n";
    if (!result.pass) ++failures;
  }
  if (failures) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
