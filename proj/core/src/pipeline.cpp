#include "lens/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "lens/bids.hpp"
#include "lens/csv.hpp"
#include "lens/ingest.hpp"
#include "lens/labeler.hpp"
#include "lens/metrics.hpp"
#include "lens/stats.hpp"
#include "lens/wei.hpp"

namespace fs = std::filesystem;

namespace lens::pipeline {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string pct(double fraction) { return fmt(fraction * 100.0); }

void require_file(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::exists(path)) {
    throw std::runtime_error("missing " + what + ": " + (path.empty() ? "(unset)" : path));
  }
}

// ---- corpus loading shared by the block-driven stages ----

struct Corpus {
  RegistrySet registries;
  std::vector<BlockRecord> blocks;
  std::size_t rejections = 0;
};

RegistrySet load_registry_dir(const std::string& dir) {
  RegistrySet set;
  if (dir.empty()) return set;
  if (!fs::is_directory(dir)) throw std::runtime_error("registry directory not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::string name = file.filename().string();
    if (name.rfind("registry_", 0) != 0 || name.size() < 13 ||
        name.substr(name.size() - 4) != ".csv") {
      continue;
    }
    std::string kind_name = name.substr(9, name.size() - 13);
    auto kind = registry_kind_from_string(kind_name);
    if (!kind) continue;  // unrelated file
    set.by_kind[*kind] = ingest::load_registry(file.string(), *kind);
  }
  return set;
}

Corpus load_corpus(const RunConfig& config, bool want_mempool, bool want_payloads) {
  Corpus corpus;
  corpus.registries = load_registry_dir(config.registry_dir);
  require_file(config.blocks_path, "blocks input");
  ingest::LoadReport report;
  corpus.blocks = ingest::load_blocks(config.blocks_path, corpus.registries, report);
  corpus.rejections += report.rejections.size();
  if (want_mempool && !config.mempool_path.empty()) {
    require_file(config.mempool_path, "mempool input");
    ingest::LoadReport mp_report;
    auto visibility = ingest::load_mempool_visibility(config.mempool_path, mp_report);
    corpus.rejections += mp_report.rejections.size();
    ingest::join_mempool_visibility(corpus.blocks, visibility);
  }
  if (want_payloads && !config.payloads_path.empty()) {
    require_file(config.payloads_path, "payloads input");
    ingest::LoadReport pl_report;
    auto payloads = ingest::load_payloads(config.payloads_path, pl_report);
    corpus.rejections += pl_report.rejections.size();
    ingest::join_payloads(corpus.blocks, payloads);
  }
  return corpus;
}

// Order-preserving parallel map: results land by index, so output is
// independent of the worker count.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, int workers, F&& fn) {
  std::vector<R> out(n);
  int threads_wanted = std::max(1, workers);
  if (threads_wanted == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads_wanted; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

struct BlockDerived {
  labeler::BlockLabels labels;
  BlockEconomics econ;
};

std::vector<BlockDerived> derive_blocks(const Corpus& corpus, const RunConfig& config) {
  return parallel_map<BlockDerived>(corpus.blocks.size(), config.workers, [&](std::size_t i) {
    BlockDerived d;
    d.labels = labeler::label_block(corpus.blocks[i], corpus.registries);
    d.econ = metrics::block_economics(corpus.blocks[i], d.labels.bundles, corpus.registries);
    return d;
  });
}

std::string out_path(const RunConfig& config, const char* name) {
  return config.output_dir + "/" + name;
}

}  // namespace

// ---- configuration ----

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "blocks") {
      blocks_path = value;
    } else if (key == "mempool") {
      mempool_path = value;
    } else if (key == "registry_dir") {
      registry_dir = value;
    } else if (key == "bids") {
      bids_path = value;
    } else if (key == "payloads") {
      payloads_path = value;
    } else if (key == "out") {
      output_dir = value;
    } else if (key == "dust_wei") {
      dust_wei = static_cast<Wei>(parse_wei(value));
    } else if (key == "alpha") {
      alpha = std::stod(value);
    } else if (key == "top_k") {
      top_k = std::stoi(value);
    } else if (key == "min_market_share") {
      min_market_share = std::stod(value);
    } else if (key == "seed") {
      seed = std::stoull(value);
    } else if (key == "genesis_time") {
      genesis_time = std::stoll(value);
    } else if (key == "workers") {
      workers = std::stoi(value);
    } else if (key == "folds") {
      folds = static_cast<std::size_t>(std::stoul(value));
    } else {
      throw std::runtime_error("unknown config key: " + key);
    }
  } catch (const std::invalid_argument&) {
    throw std::runtime_error("bad value for config key " + key + ": " + value);
  }
}

void RunConfig::validate() const {
  if (dust_wei <= 0) throw std::runtime_error("dust_wei must be positive");
  if (alpha <= 0 || alpha >= 1) throw std::runtime_error("alpha must be in (0, 1)");
  if (top_k <= 0) throw std::runtime_error("top_k must be positive");
  if (min_market_share < 0) throw std::runtime_error("min_market_share must be non-negative");
  if (workers < 1) throw std::runtime_error("workers must be at least 1");
  if (folds < 2) throw std::runtime_error("folds must be at least 2");
  if (output_dir.empty()) throw std::runtime_error("output directory not set");
  fs::create_directories(output_dir);
}

std::string RunConfig::config_hash() const {
  std::string canon = "dust=" + std::to_string(dust_wei) + ";alpha=" + fmt(alpha) +
                      ";top_k=" + std::to_string(top_k) +
                      ";min_ms=" + fmt(min_market_share) + ";seed=" + std::to_string(seed) +
                      ";genesis=" + std::to_string(genesis_time) +
                      ";folds=" + std::to_string(folds);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(canon));
  return buf;
}

std::string RunSummary::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) {
    j["stages"].push_back({{"stage", s.stage},
                           {"outputs", s.outputs},
                           {"records", s.records},
                           {"rejections", s.rejections}});
  }
  return j.dump(2);
}

// ---- stages ----

StageResult run_label(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_corpus(config, /*want_mempool=*/true, /*want_payloads=*/false);
  auto derived = parallel_map<labeler::BlockLabels>(
      corpus.blocks.size(), config.workers,
      [&](std::size_t i) { return labeler::label_block(corpus.blocks[i], corpus.registries); });

  StageResult result{"label", {}, 0, corpus.rejections};
  std::string path = out_path(config, "labels.csv");
  csv::AtomicWriter w(path);
  w.write_row({"hash", "slot", "builder", "transparency", "order_flow", "bundle_id"});
  for (std::size_t i = 0; i < corpus.blocks.size(); ++i) {
    const auto& block = corpus.blocks[i];
    for (const auto& label : derived[i].labels) {
      w.write_row({label.hash, std::to_string(block.slot), block.builder_id,
                   to_string(label.transparency), to_string(label.order_flow),
                   label.bundle_id ? std::to_string(*label.bundle_id) : ""});
      ++result.records;
    }
  }
  w.close();
  result.outputs.push_back(path);
  return result;
}

StageResult run_metrics(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_corpus(config, /*want_mempool=*/false, /*want_payloads=*/true);
  auto derived = derive_blocks(corpus, config);

  StageResult result{"metrics", {}, 0, corpus.rejections};
  std::string path = out_path(config, "economics.csv");
  csv::AtomicWriter w(path);
  w.write_row({"slot", "builder", "excluded", "true_value_wei", "validator_payment_wei",
               "relay_payment_wei", "builder_profit_wei", "profit_margin", "payment_payer",
               "over_promised_wei", "under_promised_wei"});
  for (std::size_t i = 0; i < corpus.blocks.size(); ++i) {
    const auto& block = corpus.blocks[i];
    const auto& econ = derived[i].econ;
    if (!econ.excluded &&
        econ.builder_profit !=
            econ.true_value - econ.validator_payment - econ.relay_payment) {
      throw InvariantError("profit identity violated at slot " + std::to_string(block.slot));
    }
    w.write_row({std::to_string(block.slot), block.builder_id, econ.excluded ? "1" : "0",
                 std::to_string(econ.true_value), std::to_string(econ.validator_payment),
                 std::to_string(econ.relay_payment), std::to_string(econ.builder_profit),
                 econ.profit_margin ? fmt(*econ.profit_margin) : "",
                 to_string(econ.payment_payer), std::to_string(econ.over_promised),
                 std::to_string(econ.under_promised)});
    ++result.records;
  }
  w.close();
  result.outputs.push_back(path);
  return result;
}

namespace {

struct LabelStats {
  std::int64_t blocks_with = 0;
  WeiSum value = 0;
  std::int64_t gas = 0;
};

struct DayBuilder {
  std::int64_t blocks = 0;
  WeiSum profit = 0;
  WeiSum true_value = 0;
};

}  // namespace

StageResult run_analytics(const RunConfig& config) {
  config.validate();
  Corpus corpus = load_corpus(config, /*want_mempool=*/true, /*want_payloads=*/true);
  auto derived = derive_blocks(corpus, config);

  std::map<std::string, analytics::BuilderAccumulator> accs;
  analytics::ProviderEnumerator providers(corpus.registries);
  // corpus-level label summary
  std::vector<LabelStats> of_stats(kOrderFlowLabelCount);
  std::vector<LabelStats> transparency_stats(3);
  std::vector<std::vector<WeiSum>> of_by_transparency(
      kOrderFlowLabelCount, std::vector<WeiSum>(3, 0));
  WeiSum total_value = 0;
  std::int64_t total_gas = 0;
  // daily series
  std::map<std::string, std::map<std::string, DayBuilder>> days;  // day -> builder
  std::map<std::string, std::vector<WeiSum>> day_transparency;    // day -> 3 values
  // per-block EOF shares
  std::string eof_path = out_path(config, "eof_shares.csv");
  csv::AtomicWriter eof_out(eof_path);
  eof_out.write_row({"slot", "builder", "provider", "share"});

  for (std::size_t i = 0; i < corpus.blocks.size(); ++i) {
    const auto& block = corpus.blocks[i];
    const auto& d = derived[i];
    analytics::accumulate_block(accs[block.builder_id], block, d.labels, d.econ, providers,
                                config.dust_wei);

    std::vector<bool> of_seen(kOrderFlowLabelCount, false);
    std::vector<bool> tr_seen(3, false);
    std::map<std::string, WeiSum> block_eof;
    WeiSum block_eof_total = 0;
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
      const auto& tx = block.transactions[t];
      if (tx.sender == block.fee_recipient) continue;
      const auto& label = d.labels.labels[t];
      Wei payment = analytics::tx_builder_payment(tx);
      int ofi = static_cast<int>(label.order_flow);
      int tri = static_cast<int>(label.transparency);
      of_seen[ofi] = true;
      tr_seen[tri] = true;
      of_stats[ofi].value += payment;
      of_stats[ofi].gas += tx.gas_used;
      transparency_stats[tri].value += payment;
      transparency_stats[tri].gas += tx.gas_used;
      of_by_transparency[ofi][tri] += payment;
      total_value += payment;
      total_gas += tx.gas_used;
      if (label.transparency != TransparencyLabel::kPublicSignal) {
        WeiSum& v = block_eof[providers.provider_for(tx.sender)];
        v += payment;
        block_eof_total += payment;
      }
    }
    for (int k = 0; k < kOrderFlowLabelCount; ++k) {
      if (of_seen[k]) ++of_stats[k].blocks_with;
    }
    for (int k = 0; k < 3; ++k) {
      if (tr_seen[k]) ++transparency_stats[k].blocks_with;
    }
    if (block_eof_total > 0) {
      for (const auto& [provider, value] : block_eof) {
        eof_out.write_row({std::to_string(block.slot), block.builder_id, provider,
                           fmt(static_cast<double>(value) /
                               static_cast<double>(block_eof_total))});
      }
    }

    std::string day = analytics::utc_day(block.timestamp);
    auto& db = days[day][block.builder_id];
    ++db.blocks;
    if (!d.econ.excluded) {
      db.profit += d.econ.builder_profit;
      db.true_value += d.econ.true_value;
    }
    auto& dt = day_transparency[day];
    if (dt.empty()) dt.assign(3, 0);
    for (std::size_t t = 0; t < block.transactions.size(); ++t) {
      const auto& tx = block.transactions[t];
      if (tx.sender == block.fee_recipient) continue;
      dt[static_cast<int>(d.labels.labels[t].transparency)] +=
          analytics::tx_builder_payment(tx);
    }
  }
  eof_out.close();

  auto profiles = analytics::build_profiles(accs);
  StageResult result{"analytics", {}, corpus.blocks.size(), corpus.rejections};

  {
    std::string path = out_path(config, "profiles.csv");
    csv::AtomicWriter w(path);
    w.write_row({"builder",
                 "total_blocks",
                 "market_share_pct",
                 "total_validator_payment_eth",
                 "total_subsidy_eth",
                 "total_profit_eth",
                 "total_true_value_eth",
                 "profit_margin_pct",
                 "profit_margin_mean_pct",
                 "profitable_blocks_pct",
                 "dust_zero_profit_blocks_pct",
                 "subsidized_blocks_pct",
                 "tob_value_pct",
                 "bob_value_pct",
                 "eob_value_pct",
                 "excluded_blocks",
                 "excluded_blocks_pct",
                 "excluded_value_eth",
                 "other_fee_payer_blocks_pct",
                 "promise_delivered_blocks_pct",
                 "over_promised_bid_value_eth",
                 "under_promised_bid_value_eth",
                 "relay_payment_eth",
                 "entropy",
                 "msof_label",
                 "msof_share_pct",
                 "msof_tie",
                 "public_signal_value_pct",
                 "exclusive_signal_value_pct",
                 "ofa_bundle_value_pct"});
    for (const auto& p : profiles) {
      double excluded_pct = p.total_blocks ? static_cast<double>(p.excluded_blocks) /
                                                 static_cast<double>(p.total_blocks)
                                           : 0.0;
      w.write_row({p.builder_id,
                   std::to_string(p.total_blocks),
                   pct(p.market_share),
                   wei_to_eth(p.total_validator_payment),
                   wei_to_eth(p.total_subsidy),
                   wei_to_eth(p.total_profit),
                   wei_to_eth(p.total_true_value),
                   pct(p.profit_margin),
                   pct(p.profit_margin_mean),
                   pct(p.profitable_share),
                   pct(p.neutral_share),
                   pct(p.subsidized_share),
                   pct(p.tob_share),
                   pct(p.bob_share),
                   pct(p.eob_share),
                   std::to_string(p.excluded_blocks),
                   pct(excluded_pct),
                   wei_to_eth(p.excluded_value),
                   pct(p.other_payer_share),
                   pct(p.promise_delivered_share),
                   wei_to_eth(p.total_over_promised),
                   wei_to_eth(p.total_under_promised),
                   wei_to_eth(p.total_relay_payment),
                   fmt(p.entropy),
                   to_string(p.msof_label),
                   pct(p.msof_share),
                   p.msof_tie ? "1" : "0",
                   pct(p.transparency_composition[0]),
                   pct(p.transparency_composition[1]),
                   pct(p.transparency_composition[2])});
    }
    w.close();
    result.outputs.push_back(path);
  }
  {
    std::string path = out_path(config, "label_summary.csv");
    csv::AtomicWriter w(path);
    w.write_row({"label_type", "label", "occurrence_probability", "avg_value_eth",
                 "value_share_pct", "value_per_gas_eth", "avg_gas_pct", "public_value_pct",
                 "exclusive_value_pct", "ofa_bundle_value_pct"});
    auto blocks_n = static_cast<double>(corpus.blocks.size());
    auto emit = [&](const std::string& type, const std::string& label, const LabelStats& s,
                    const std::vector<WeiSum>* split) {
      double value_eth = static_cast<double>(s.value) / static_cast<double>(kWeiPerEth);
      std::vector<std::string> row = {
          type,
          label,
          blocks_n ? fmt(static_cast<double>(s.blocks_with) / blocks_n) : "0",
          s.blocks_with ? fmt(value_eth / static_cast<double>(s.blocks_with)) : "0",
          total_value ? pct(static_cast<double>(s.value) / static_cast<double>(total_value))
                      : "0",
          s.gas ? fmt(value_eth / static_cast<double>(s.gas)) : "0",
          total_gas ? pct(static_cast<double>(s.gas) / static_cast<double>(total_gas)) : "0"};
      for (int k = 0; k < 3; ++k) {
        if (split && s.value != 0) {
          row.push_back(pct(static_cast<double>((*split)[k]) /
                            static_cast<double>(s.value)));
        } else {
          row.push_back("");
        }
      }
      w.write_row(row);
    };
    for (int k = 0; k < 3; ++k) {
      emit("transparency", to_string(static_cast<TransparencyLabel>(k)),
           transparency_stats[k], nullptr);
    }
    for (int k = 0; k < kOrderFlowLabelCount; ++k) {
      emit("order_flow", to_string(static_cast<OrderFlowLabel>(k)), of_stats[k],
           &of_by_transparency[k]);
    }
    w.close();
    result.outputs.push_back(path);
  }
  {
    std::string path = out_path(config, "composition.csv");
    csv::AtomicWriter w(path);
    w.write_row({"builder", "label_type", "label", "value_share_pct"});
    for (const auto& p : profiles) {
      for (int k = 0; k < 3; ++k) {
        w.write_row({p.builder_id, "transparency", to_string(static_cast<TransparencyLabel>(k)),
                     pct(p.transparency_composition[k])});
      }
      for (int k = 0; k < kOrderFlowLabelCount; ++k) {
        w.write_row({p.builder_id, "order_flow", to_string(static_cast<OrderFlowLabel>(k)),
                     pct(p.of_composition[k])});
      }
      for (const auto& [provider, share] : p.eof_provider_shares) {
        w.write_row({p.builder_id, "eof_provider", provider, pct(share)});
      }
    }
    w.close();
    result.outputs.push_back(path);
  }
  {
    std::string path = out_path(config, "daily_series.csv");
    csv::AtomicWriter w(path);
    w.write_row({"date", "builder", "metric", "value"});
    std::map<std::string, WeiSum> cumulative;
    for (const auto& [day, builders] : days) {
      std::int64_t day_blocks = 0;
      for (const auto& [id, db] : builders) day_blocks += db.blocks;
      for (const auto& [id, db] : builders) {
        cumulative[id] += db.profit;
        w.write_row({day, id, "market_share_pct",
                     day_blocks ? pct(static_cast<double>(db.blocks) /
                                      static_cast<double>(day_blocks))
                                : "0"});
        w.write_row({day, id, "profit_eth", wei_to_eth(db.profit)});
        w.write_row({day, id, "cumulative_profit_eth", wei_to_eth(cumulative[id])});
        if (db.true_value > 0) {
          w.write_row({day, id, "profit_margin_pct",
                       pct(static_cast<double>(db.profit) /
                           static_cast<double>(db.true_value))});
        }
        w.write_row({day, id, "true_value_eth", wei_to_eth(db.true_value)});
      }
      const auto& dt = day_transparency[day];
      WeiSum day_value = 0;
      for (auto v : dt) day_value += v;
      if (day_value > 0) {
        for (int k = 0; k < 3; ++k) {
          w.write_row({day, "(all)",
                       std::string(to_string(static_cast<TransparencyLabel>(k))) +
                           "_value_pct",
                       pct(static_cast<double>(dt[k]) / static_cast<double>(day_value))});
        }
      }
    }
    w.close();
    result.outputs.push_back(path);
  }
  result.outputs.push_back(eof_path);
  return result;
}

StageResult run_bids(const RunConfig& config) {
  config.validate();
  require_file(config.bids_path, "bids input");
  RegistrySet registries = load_registry_dir(config.registry_dir);
  ingest::LoadReport report;
  auto bids = ingest::load_bids(config.bids_path, registries, report);
  auto books = bids::build_bid_books(bids, config.genesis_time);
  auto profiles = bids::aggregate_bid_profiles(books);

  StageResult result{"bids", {}, 0, report.rejections.size()};
  std::string path = out_path(config, "bid_metrics.csv");
  csv::AtomicWriter w(path);
  w.write_row({"builder", "blocks_won", "slots_bid", "total_bids", "avg_bids",
               "avg_update_lag_ms", "avg_winner_time_ms", "total_cancels", "avg_cancels"});
  std::vector<const bids::BuilderBidProfile*> ordered;
  for (const auto& [id, p] : profiles) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) {
    if (a->blocks_won != b->blocks_won) return a->blocks_won > b->blocks_won;
    return a->builder_id < b->builder_id;
  });
  for (const auto* p : ordered) {
    w.write_row({p->builder_id, std::to_string(p->blocks_won), std::to_string(p->slots_bid),
                 std::to_string(p->total_bids), fmt(p->avg_bids()),
                 fmt(p->avg_update_lag_ms()), fmt(p->avg_winner_time_ms()),
                 std::to_string(p->total_cancellations), fmt(p->avg_cancellations())});
    ++result.records;
  }
  w.close();
  result.outputs.push_back(path);
  return result;
}

namespace {

struct ProfileRow {
  std::string builder;
  double market_share = 0.0;  // fraction
  double profit_margin = 0.0;
  std::map<std::string, double> features;
};

std::vector<ProfileRow> read_profiles(const std::string& path) {
  csv::Reader reader(path);
  auto builder_col = reader.column("builder");
  std::vector<ProfileRow> rows;
  while (auto row = reader.next()) {
    ProfileRow p;
    p.builder = row->fields[builder_col];
    for (std::size_t c = 0; c < reader.header().size() && c < row->fields.size(); ++c) {
      if (c == builder_col) continue;
      const std::string& name = reader.header()[c];
      if (name == "msof_label") continue;
      try {
        p.features[name] = std::stod(row->fields[c]);
      } catch (const std::invalid_argument&) {
        // non-numeric cell: not a feature
      }
    }
    p.market_share = p.features.count("market_share_pct") ? p.features["market_share_pct"] / 100.0
                                                          : 0.0;
    p.profit_margin = p.features.count("profit_margin_pct") ? p.features["profit_margin_pct"]
                                                            : 0.0;
    rows.push_back(std::move(p));
  }
  return rows;
}

}  // namespace

StageResult run_stats(const RunConfig& config) {
  config.validate();
  std::string profiles_path = out_path(config, "profiles.csv");
  std::string composition_path = out_path(config, "composition.csv");
  std::string eof_path = out_path(config, "eof_shares.csv");
  std::string economics_path = out_path(config, "economics.csv");
  require_file(profiles_path, "stats dependency profiles.csv (run the analytics stage first)");
  require_file(composition_path,
               "stats dependency composition.csv (run the analytics stage first)");
  require_file(eof_path, "stats dependency eof_shares.csv (run the analytics stage first)");
  require_file(economics_path,
               "stats dependency economics.csv (run the metrics stage first)");

  auto profiles = read_profiles(profiles_path);
  // eligible builders: min market share, then top-K by share
  std::vector<ProfileRow*> eligible;
  for (auto& p : profiles) {
    if (p.market_share >= config.min_market_share) eligible.push_back(&p);
  }
  std::sort(eligible.begin(), eligible.end(), [](const auto* a, const auto* b) {
    if (a->market_share != b->market_share) return a->market_share > b->market_share;
    return a->builder < b->builder;
  });
  if (eligible.size() > static_cast<std::size_t>(config.top_k)) {
    eligible.resize(static_cast<std::size_t>(config.top_k));
  }
  std::map<std::string, std::size_t> builder_pos;
  for (std::size_t i = 0; i < eligible.size(); ++i) builder_pos[eligible[i]->builder] = i;

  // order-flow composition features per eligible builder
  {
    csv::Reader reader(composition_path);
    auto b_col = reader.column("builder");
    auto t_col = reader.column("label_type");
    auto l_col = reader.column("label");
    auto v_col = reader.column("value_share_pct");
    while (auto row = reader.next()) {
      if (row->fields[t_col] != "order_flow") continue;
      auto it = builder_pos.find(row->fields[b_col]);
      if (it == builder_pos.end()) continue;
      eligible[it->second]->features["of_" + row->fields[l_col] + "_value_pct"] =
          std::stod(row->fields[v_col]);
    }
  }

  StageResult result{"stats", {}, 0, 0};
  std::string path = out_path(config, "stats.csv");
  csv::AtomicWriter w(path);
  w.write_row({"kind", "a", "b", "statistic", "p_value", "threshold", "significant"});
  auto emit = [&](const std::string& kind, const std::string& a, const std::string& b,
                  const std::string& statistic, const std::string& p_value,
                  const std::string& threshold, bool significant) {
    w.write_row({kind, a, b, statistic, p_value, threshold, significant ? "1" : "0"});
    ++result.records;
  };

  // Spearman feature correlations against market share and profit margin
  if (eligible.size() >= 3) {
    static const char* kFeatures[] = {
        "public_signal_value_pct", "exclusive_signal_value_pct", "ofa_bundle_value_pct",
        "entropy", "tob_value_pct", "bob_value_pct", "eob_value_pct",
        "profitable_blocks_pct", "subsidized_blocks_pct", "msof_share_pct",
        "of_retail_swap_value_pct", "of_atomic_arb_value_pct", "of_non_atomic_arb_value_pct",
        "of_sandwich_value_pct", "of_telegram_bot_value_pct", "of_solver_model_value_pct",
        "of_cex_deposit_value_pct", "of_bot_swap_value_pct", "of_ofa_backrun_value_pct"};
    std::vector<double> market_share, profit_margin;
    for (const auto* p : eligible) {
      market_share.push_back(p->market_share);
      profit_margin.push_back(p->profit_margin);
    }
    for (const char* feature : kFeatures) {
      std::vector<double> values;
      bool have_all = true;
      for (const auto* p : eligible) {
        auto it = p->features.find(feature);
        if (it == p->features.end()) {
          have_all = false;
          break;
        }
        values.push_back(it->second);
      }
      if (!have_all) continue;
      for (const auto& [target_name, target] :
           {std::pair<std::string, const std::vector<double>*>{"market_share", &market_share},
            {"profit_margin", &profit_margin}}) {
        try {
          auto corr = stats::spearman(values, *target, config.alpha);
          emit("spearman", target_name, feature, fmt(corr.coefficient), fmt(corr.p_value), "",
               corr.significant);
        } catch (const std::invalid_argument&) {
          // degenerate feature (no variance): no correlation defined
        }
      }
    }
  }

  // decoding matrix over per-block EOF provider shares
  {
    std::vector<std::string> block_builders;  // index = block order
    std::map<std::int64_t, std::size_t> slot_index;
    std::map<std::string, std::map<std::size_t, double>> provider_shares;
    std::map<std::string, double> provider_total;
    csv::Reader reader(eof_path);
    auto s_col = reader.column("slot");
    auto b_col = reader.column("builder");
    auto p_col = reader.column("provider");
    auto v_col = reader.column("share");
    while (auto row = reader.next()) {
      std::int64_t slot = std::stoll(row->fields[s_col]);
      auto [it, inserted] = slot_index.emplace(slot, block_builders.size());
      if (inserted) block_builders.push_back(row->fields[b_col]);
      double share = std::stod(row->fields[v_col]);
      provider_shares[row->fields[p_col]][it->second] = share;
      provider_total[row->fields[p_col]] += share;
    }

    std::vector<std::string> providers;
    for (const auto& [p, total] : provider_total) providers.push_back(p);
    std::sort(providers.begin(), providers.end(), [&](const auto& a, const auto& b) {
      if (provider_total[a] != provider_total[b]) return provider_total[a] > provider_total[b];
      return a < b;
    });
    if (providers.size() > static_cast<std::size_t>(config.top_k)) {
      providers.resize(static_cast<std::size_t>(config.top_k));
    }

    // Bonferroni across the decoding matrix: one test per (builder,
    // provider) cell, so the exclusivity calls stay at the configured
    // family-wise error rate instead of alpha per cell.
    std::size_t cells = builder_pos.size() * providers.size();
    double cell_alpha = cells ? config.alpha / static_cast<double>(cells) : config.alpha;
    std::vector<stats::DecodingResult> matrix;
    for (const auto& [builder, pos] : builder_pos) {
      std::vector<int> target(block_builders.size());
      for (std::size_t i = 0; i < block_builders.size(); ++i) {
        target[i] = block_builders[i] == builder ? 1 : 0;
      }
      for (const auto& provider : providers) {
        std::vector<double> feature(block_builders.size(), 0.0);
        for (const auto& [idx, share] : provider_shares[provider]) feature[idx] = share;
        std::uint64_t cell_seed = config.seed ^ fnv1a(builder + "|" + provider);
        auto cell = stats::lda_decoding_accuracy(feature, target, config.folds, cell_seed,
                                                 cell_alpha);
        if (!cell) continue;
        cell->builder_id = builder;
        cell->provider_id = provider;
        matrix.push_back(*cell);
        emit("decoding", builder, provider, fmt(cell->decoding_accuracy), "",
             fmt(cell->threshold), cell->significant);
      }
    }
    for (const auto& [provider, builder] : stats::exclusive_providers(matrix)) {
      emit("exclusive_provider", provider, builder, "", "", "", true);
    }

    // chi-square: profitable-block rate, EP builders vs the rest
    std::map<std::string, bool> is_ep_builder;
    for (const auto& [provider, builder] : stats::exclusive_providers(matrix)) {
      is_ep_builder[builder] = true;
    }
    std::int64_t counts[2][2] = {{0, 0}, {0, 0}};
    csv::Reader econ_reader(economics_path);
    auto eb_col = econ_reader.column("builder");
    auto ex_col = econ_reader.column("excluded");
    auto bp_col = econ_reader.column("builder_profit_wei");
    while (auto row = econ_reader.next()) {
      if (row->fields[ex_col] == "1") continue;
      bool ep = is_ep_builder.count(row->fields[eb_col]) > 0;
      bool profitable = parse_wei(row->fields[bp_col]) > config.dust_wei;
      ++counts[ep ? 1 : 0][profitable ? 1 : 0];
    }
    if ((counts[0][0] + counts[0][1]) > 0 && (counts[1][0] + counts[1][1]) > 0) {
      try {
        std::array<std::array<double, 2>, 2> table = {
            {{static_cast<double>(counts[0][0]), static_cast<double>(counts[0][1])},
             {static_cast<double>(counts[1][0]), static_cast<double>(counts[1][1])}}};
        auto chi = stats::chi_square_2x2(table);
        emit("chi_square", "ep_vs_non_ep", "profitable_rate", fmt(chi.statistic),
             fmt(chi.p_value), "", chi.p_value < config.alpha);
      } catch (const std::invalid_argument&) {
        // a zero marginal leaves the test undefined
      }
    }
  }

  w.close();
  result.outputs.push_back(path);
  return result;
}

RunSummary run_all(const RunConfig& config) {
  config.validate();
  RunSummary summary;
  summary.seed = config.seed;
  summary.config_hash = config.config_hash();
  summary.stages.push_back(run_label(config));
  summary.stages.push_back(run_metrics(config));
  summary.stages.push_back(run_analytics(config));
  summary.stages.push_back(run_bids(config));
  summary.stages.push_back(run_stats(config));
  return summary;
}

}  // namespace lens::pipeline
