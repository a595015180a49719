#include "lens/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lens/csv.hpp"
#include "lens/ingest.hpp"
#include "lens/wei.hpp"

namespace lens::fixtures {

namespace {

// ---- deterministic identifiers ----

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex_digits(const std::string& tag, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(n);
  std::uint64_t h = fnv1a(tag);
  while (out.size() < n) {
    for (int i = 0; i < 16 && out.size() < n; ++i) {
      out.push_back(digits[(h >> (4 * i)) & 0xF]);
    }
    h = fnv1a(tag + "#" + std::to_string(out.size()));
  }
  return out;
}

Address addr(const std::string& tag) { return "0x" + hex_digits("addr:" + tag, 40); }
TxHash tx_hash(const std::string& tag) { return "0x" + hex_digits("tx:" + tag, 64); }
std::string pubkey(const std::string& tag) { return "0x" + hex_digits("pk:" + tag, 96); }

// ---- rng (hand-rolled draws: distribution objects are not portable) ----

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng() % n); }
};

int draw_from_mixture(const std::vector<double>& mixture, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < kOrderFlowLabelCount; ++i) {
    acc += mixture[i];
    if (u < acc) return i;
  }
  return kOrderFlowLabelCount - 1;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

std::vector<double> default_mixture() {
  std::vector<double> m(kOrderFlowLabelCount, 0.0);
  m[static_cast<int>(OrderFlowLabel::kAtomicArb)] = 0.06;
  m[static_cast<int>(OrderFlowLabel::kNonAtomicArb)] = 0.08;
  m[static_cast<int>(OrderFlowLabel::kSandwich)] = 0.04;
  m[static_cast<int>(OrderFlowLabel::kLiquidation)] = 0.02;
  m[static_cast<int>(OrderFlowLabel::kTelegramBot)] = 0.06;
  m[static_cast<int>(OrderFlowLabel::kSolverModel)] = 0.06;
  m[static_cast<int>(OrderFlowLabel::kCexDeposit)] = 0.08;
  m[static_cast<int>(OrderFlowLabel::kRetailSwap)] = 0.22;
  m[static_cast<int>(OrderFlowLabel::kBotSwap)] = 0.12;
  m[static_cast<int>(OrderFlowLabel::kOfaBackrun)] = 0.06;
  m[static_cast<int>(OrderFlowLabel::kOtherPublic)] = 0.12;
  m[static_cast<int>(OrderFlowLabel::kOtherExclusive)] = 0.08;
  return m;
}

ScenarioSpec default_scenario() {
  ScenarioSpec spec;
  spec.seed = 42;
  spec.n_blocks = 100;
  spec.txs_per_block = 30;
  spec.mixture = default_mixture();
  spec.builders = {
      {"alpha", 0.40, "profitable", 0.02, 0.5, 0.1, 25, 120, 2, 450, {}},
      {"bravo", 0.30, "mixed", 0.02, 0.5, 0.0, 20, 150, 1, 520, {}},
      {"carol", 0.20, "neutral", 0.0, 0.0, 0.0, 12, 200, 0, 600, {}},
      {"delta", 0.10, "subsidized", 0.0, 0.0, 0.0, 8, 300, 0, 900, {}},
  };
  spec.exclusive_providers = {{"scp", "alpha"}};
  spec.neutral_providers = {"wintermute", "jumper"};
  return spec;
}

void ScenarioSpec::validate() const {
  if (n_blocks <= 0) throw std::invalid_argument("n_blocks must be positive");
  if (txs_per_block < 5) throw std::invalid_argument("txs_per_block must be at least 5");
  if (builders.empty()) throw std::invalid_argument("at least one builder required");
  double share_sum = 0.0;
  for (const auto& b : builders) {
    if (b.name.empty()) throw std::invalid_argument("builder with empty name");
    if (b.market_share < 0) throw std::invalid_argument("negative market share");
    share_sum += b.market_share;
    if (b.bids_per_slot < 1) throw std::invalid_argument("bids_per_slot must be >= 1");
    if (b.cancellations_per_slot > std::max(0, b.bids_per_slot - 2)) {
      throw std::invalid_argument("too many cancellations for " + b.name);
    }
    static const std::vector<double> fallback = default_mixture();
    const auto& base = mixture.empty() ? fallback : mixture;
    const auto& m = b.mixture.empty() ? base : b.mixture;
    if (m.size() != static_cast<std::size_t>(kOrderFlowLabelCount)) {
      throw std::invalid_argument("mixture must have 12 entries");
    }
    double mix_sum = 0.0;
    for (double w : m) {
      if (w < 0) throw std::invalid_argument("negative mixture weight");
      mix_sum += w;
    }
    if (std::abs(mix_sum - 1.0) > 1e-9) {
      throw std::invalid_argument("mixture weights must sum to 1");
    }
  }
  if (std::abs(share_sum - 1.0) > 1e-9) {
    throw std::invalid_argument("market shares must sum to 1");
  }
  for (const auto& [provider, builder] : exclusive_providers) {
    bool found = false;
    for (const auto& b : builders) found |= b.name == builder;
    if (!found) {
      throw std::invalid_argument("exclusive provider " + provider +
                                  " assigned to absent builder " + builder);
    }
  }
}

ScenarioSpec ScenarioSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  ScenarioSpec spec;
  spec.mixture = default_mixture();
  bool mixture_reset = false;
  std::map<std::string, bool> builder_mix_reset;

  auto label_index = [](const std::string& name) {
    auto lbl = order_flow_from_string(name);
    if (!lbl) throw std::invalid_argument("unknown order-flow label: " + name);
    return static_cast<int>(*lbl);
  };
  auto find_builder = [&](const std::string& name) -> BuilderScenario& {
    for (auto& b : spec.builders) {
      if (b.name == name) return b;
    }
    throw std::invalid_argument("bids/mix line for undeclared builder: " + name);
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) {
      throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key_tokens = tokens(line.substr(0, eq));
    auto vals = tokens(line.substr(eq + 1));
    if (key_tokens.size() != 1 || vals.empty()) {
      throw std::invalid_argument("scenario line " + std::to_string(line_no) + ": malformed");
    }
    const std::string& key = key_tokens[0];
    try {
      if (key == "seed") {
        spec.seed = std::stoull(vals.at(0));
      } else if (key == "blocks") {
        spec.n_blocks = std::stoi(vals.at(0));
      } else if (key == "txs_per_block") {
        spec.txs_per_block = std::stoi(vals.at(0));
      } else if (key == "genesis_time") {
        spec.genesis_time = std::stoll(vals.at(0));
      } else if (key == "first_slot") {
        spec.first_slot = std::stoll(vals.at(0));
      } else if (key == "ep_flow_rate") {
        spec.ep_flow_rate = std::stod(vals.at(0));
      } else if (key == "payload_over_rate") {
        spec.payload_over_rate = std::stod(vals.at(0));
      } else if (key == "payload_under_rate") {
        spec.payload_under_rate = std::stod(vals.at(0));
      } else if (key == "builder") {
        BuilderScenario b;
        b.name = vals.at(0);
        b.market_share = std::stod(vals.at(1));
        b.subsidy_policy = vals.at(2);
        if (vals.size() > 3) b.exclusion_rate = std::stod(vals[3]);
        if (vals.size() > 4) b.relay_payment_rate = std::stod(vals[4]);
        if (vals.size() > 5) b.related_payer_rate = std::stod(vals[5]);
        spec.builders.push_back(std::move(b));
      } else if (key == "bids") {
        auto& b = find_builder(vals.at(0));
        b.bids_per_slot = std::stoi(vals.at(1));
        b.bid_lag_ms = std::stoll(vals.at(2));
        b.cancellations_per_slot = std::stoi(vals.at(3));
        b.winner_time_ms = std::stoll(vals.at(4));
      } else if (key == "ep") {
        spec.exclusive_providers.emplace_back(vals.at(0), vals.at(1));
      } else if (key == "neutral_provider") {
        spec.neutral_providers.push_back(vals.at(0));
      } else if (key == "mix") {
        if (!mixture_reset) {
          spec.mixture.assign(kOrderFlowLabelCount, 0.0);
          mixture_reset = true;
        }
        spec.mixture[label_index(vals.at(0))] = std::stod(vals.at(1));
      } else if (key.rfind("mix.", 0) == 0) {
        auto& b = find_builder(key.substr(4));
        if (!builder_mix_reset[b.name]) {
          b.mixture.assign(kOrderFlowLabelCount, 0.0);
          builder_mix_reset[b.name] = true;
        }
        b.mixture[label_index(vals.at(0))] = std::stod(vals.at(1));
      } else {
        throw std::invalid_argument("unknown key: " + key);
      }
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("scenario line " + std::to_string(line_no) +
                                  ": too few values for " + key);
    }
  }
  spec.validate();
  return spec;
}

namespace {

// ---- generation ----

struct RegistryBuilder {
  std::map<RegistryKind, std::vector<std::array<std::string, 3>>> rows;

  void add(RegistryKind kind, const std::string& key, const std::string& entity,
           const std::string& sub_label = "") {
    rows[kind].push_back({key, entity, sub_label});
  }
};

struct GenState {
  const ScenarioSpec& spec;
  Rng rng;
  RegistryBuilder registries;
  GroundTruth truth;
  std::vector<std::pair<TxHash, std::int64_t>> mempool;  // hash, first_seen_ms
  std::map<std::string, std::string> ep_of;              // builder -> provider address
  std::vector<Address> neutral_addrs;
  std::vector<Address> anon_addrs;
  std::int64_t anon_counter = 0;

  explicit GenState(const ScenarioSpec& s) : spec(s), rng(s.seed) {}
};

void record_truth(GenState& g, const TxHash& hash, TransparencyLabel t, OrderFlowLabel f) {
  LabeledTransaction lt;
  lt.hash = hash;
  lt.transparency = t;
  lt.order_flow = f;
  g.truth.labels.push_back(std::move(lt));
}

void mark_public(GenState& g, TransactionRecord& tx, std::int64_t block_ts) {
  std::int64_t seen = block_ts * 1000 - 8000 + static_cast<std::int64_t>(g.rng.below(4000));
  g.mempool.emplace_back(tx.hash, seen);
  tx.first_seen_mempool = seen;  // local copy only; corpus readers join mempool.csv
}

Address pick_exclusive_sender(GenState& g, const std::string& builder, const std::string& fallback) {
  // The ep_flow_rate share of exclusive flow goes to the builder's
  // exclusive provider. Builders without one route the same share to
  // one-off anonymous senders, so the neutral providers' block shares are
  // identically distributed across builders — neutral flow must never
  // become a decodable builder signal by mere displacement.
  if (g.rng.uniform() < g.spec.ep_flow_rate) {
    auto ep = g.ep_of.find(builder);
    if (ep != g.ep_of.end()) return ep->second;
    return addr("anon_oneoff_" + std::to_string(++g.anon_counter));
  }
  double u = g.rng.uniform();
  if (u < 0.7 && !g.neutral_addrs.empty()) {
    return g.neutral_addrs[g.rng.below(g.neutral_addrs.size())];
  }
  if (!g.anon_addrs.empty()) return g.anon_addrs[g.rng.below(g.anon_addrs.size())];
  return fallback;
}

TransactionRecord base_tx(const std::string& tag, std::uint32_t index) {
  TransactionRecord tx;
  tx.hash = tx_hash(tag);
  tx.block_index = index;
  tx.sender = addr("user_" + tag);
  tx.status = TxStatus::kSuccess;
  return tx;
}

void set_fee(TransactionRecord& tx, Wei gwei_tenths, std::int64_t gas) {
  tx.gas_used = gas;
  tx.priority_fee_per_gas = gwei_tenths * (kWeiPerGwei / 10);
  tx.tip_total = tx.priority_fee_per_gas * gas;
}

SwapLeg fresh_leg(const std::string& tag, int leg) {
  return SwapLeg{"pool_" + tag + "_" + std::to_string(leg), leg % 2};
}

// One content transaction with the planted label; appends to the block and
// the ground truth, and registers any registry rows it needs.
void emit_content_tx(GenState& g, BlockRecord& block, const BuilderScenario& builder,
                     OrderFlowLabel label, std::uint32_t index) {
  std::string tag = std::to_string(block.slot) + "_" + std::to_string(index);
  TransactionRecord tx = base_tx(tag, index);
  TransparencyLabel transparency = TransparencyLabel::kExclusiveSignal;

  switch (label) {
    case OrderFlowLabel::kAtomicArb:
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("arb_contract_" + tag);
      set_fee(tx, 30, 250'000);
      tx.erc20_transfer_count = 2;
      tx.swap_count = 2;
      tx.swap_pool_directions = {fresh_leg(tag, 0), fresh_leg(tag, 1)};
      g.registries.add(RegistryKind::kMevLabel, tx.hash, "zeromev", "atomic_arb");
      break;
    case OrderFlowLabel::kNonAtomicArb: {
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("bot_contract_" + tag);
      if (g.rng.uniform() < 0.5) {
        set_fee(tx, 20, 180'000);
      } else {
        set_fee(tx, 0, 180'000);
        tx.coinbase_transfer = kWeiPerEth / 250;  // 0.004 ETH to the builder
      }
      tx.erc20_transfer_count = 2;
      tx.swap_count = 1;
      tx.swap_pool_directions = {fresh_leg(tag, 0)};
      break;
    }
    case OrderFlowLabel::kSandwich:
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("sandwich_contract_" + tag);
      set_fee(tx, 20, 200'000);
      tx.erc20_transfer_count = 2;
      tx.swap_count = 1;
      tx.swap_pool_directions = {fresh_leg(tag, 0)};
      g.registries.add(RegistryKind::kMevLabel, tx.hash, "zeromev", "sandwich_front");
      break;
    case OrderFlowLabel::kLiquidation:
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("lending_pool");
      set_fee(tx, 20, 350'000);
      tx.erc20_transfer_count = 1;
      g.registries.add(RegistryKind::kMevLabel, tx.hash, "zeromev", "liquidation");
      break;
    case OrderFlowLabel::kTelegramBot:
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("telegram_bot");
      set_fee(tx, 20, 300'000);
      tx.erc20_transfer_count = 3;
      tx.swap_count = 2;
      tx.swap_pool_directions = {fresh_leg(tag, 0), fresh_leg(tag, 1)};
      break;
    case OrderFlowLabel::kSolverModel:
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      tx.recipient = addr("solver_router");
      set_fee(tx, 10, 500'000);
      tx.erc20_transfer_count = 3;
      tx.swap_count = 2;
      tx.swap_pool_directions = {fresh_leg(tag, 0), fresh_leg(tag, 1)};
      break;
    case OrderFlowLabel::kCexDeposit:
      tx.recipient = addr("cex_deposit");
      set_fee(tx, 15, 21'000);
      tx.value = kWeiPerEth;
      transparency = TransparencyLabel::kPublicSignal;
      break;
    case OrderFlowLabel::kRetailSwap:
      tx.recipient = addr("router_" + std::to_string(g.rng.below(3)));
      set_fee(tx, 12, 150'000);
      tx.erc20_transfer_count = 1;
      tx.swap_count = 1;
      tx.swap_pool_directions = {fresh_leg(tag, 0)};
      transparency = TransparencyLabel::kPublicSignal;
      break;
    case OrderFlowLabel::kBotSwap:
      tx.recipient = addr("mm_bot_" + std::to_string(g.rng.below(4)));
      set_fee(tx, 10, 220'000);
      tx.erc20_transfer_count = 2;
      tx.swap_count = 1;
      tx.swap_pool_directions = {fresh_leg(tag, 0)};
      transparency = TransparencyLabel::kPublicSignal;
      break;
    case OrderFlowLabel::kOtherPublic:
      tx.recipient = addr("recipient_" + tag);
      set_fee(tx, 10, 21'000);
      tx.value = kWeiPerEth / 2;
      transparency = TransparencyLabel::kPublicSignal;
      break;
    case OrderFlowLabel::kOtherExclusive:
      tx.recipient = std::nullopt;  // contract deployment
      tx.sender = pick_exclusive_sender(g, builder.name, tx.sender);
      set_fee(tx, 10, 800'000);
      break;
    case OrderFlowLabel::kOfaBackrun:
      throw std::logic_error("backruns are emitted as bundles");
  }

  if (transparency == TransparencyLabel::kPublicSignal) mark_public(g, tx, block.timestamp);
  record_truth(g, tx.hash, transparency, label);
  block.transactions.push_back(std::move(tx));
}

// Emits a bundle (triple, or a backrun+refund pair) and returns how many
// transactions it appended.
int emit_bundle(GenState& g, BlockRecord& block, const BuilderScenario& builder,
                std::uint32_t index, int room) {
  std::string tag = std::to_string(block.slot) + "_" + std::to_string(index);
  bool pair_variant = room < 3 || g.rng.uniform() < 0.25;
  // A pair refund must go to the MEV Blocker safe: a mev-share refund
  // would let the scan absorb the unrelated preceding transaction as a
  // spurious triple's user leg.
  OfaBundleKind kind = pair_variant ? OfaBundleKind::kCowswapMevblocker
                                    : static_cast<OfaBundleKind>(g.rng.below(3));

  TransactionRecord user;
  if (!pair_variant) {
    user = base_tx(tag + "_user", index);
    set_fee(user, 12, 120'000);
    user.erc20_transfer_count = 1;
    user.swap_count = 1;
    user.swap_pool_directions = {fresh_leg(tag + "_user", 0)};
    switch (kind) {
      case OfaBundleKind::kCowswapMevblocker:
        user.recipient = addr("cowswap_settlement");
        break;
      case OfaBundleKind::kMatchingAddress:
        user.recipient = addr("router_0");
        break;
      case OfaBundleKind::kMevShare:
        user.recipient = addr("router_1");
        break;
    }
    // half the user transactions were publicly visible: bundle membership
    // must still win
    if (g.rng.uniform() < 0.5) mark_public(g, user, block.timestamp);
  }

  TransactionRecord backrun = base_tx(tag + "_backrun", pair_variant ? index : index + 1);
  backrun.sender = pick_exclusive_sender(g, builder.name, backrun.sender);
  backrun.recipient = addr("backrun_contract_" + tag);
  set_fee(backrun, 0, 180'000);
  backrun.coinbase_transfer = kWeiPerEth / 100;  // 0.01 ETH
  backrun.erc20_transfer_count = 2;
  backrun.swap_count = 1;
  backrun.swap_pool_directions = {fresh_leg(tag + "_backrun", 0)};

  TransactionRecord refund = base_tx(tag + "_refund", backrun.block_index + 1);
  refund.sender = block.fee_recipient;
  set_fee(refund, 0, 21'000);
  refund.value = backrun.coinbase_transfer * 4 / 5;
  switch (kind) {
    case OfaBundleKind::kCowswapMevblocker:
      refund.recipient = addr("mevblocker_safe");
      break;
    case OfaBundleKind::kMatchingAddress:
      refund.recipient = pair_variant ? addr("mevblocker_safe") : user.sender;
      break;
    case OfaBundleKind::kMevShare:
      refund.recipient = addr("mev_share_refund");
      break;
  }

  if (!pair_variant) {
    // every planted user leg targets a known contract, so its flow label
    // is retail_swap
    record_truth(g, user.hash, TransparencyLabel::kOfaBundle, OrderFlowLabel::kRetailSwap);
    block.transactions.push_back(std::move(user));
  }
  record_truth(g, backrun.hash, TransparencyLabel::kOfaBundle, OrderFlowLabel::kOfaBackrun);
  record_truth(g, refund.hash, TransparencyLabel::kOfaBundle, OrderFlowLabel::kOtherExclusive);
  block.transactions.push_back(std::move(backrun));
  block.transactions.push_back(std::move(refund));
  ++g.truth.bundles;
  return pair_variant ? 2 : 3;
}

Wei draw_profit(GenState& g, const std::string& policy, Wei headroom, Wei true_value,
                BuilderTruth& bt) {
  Wei dust = kWeiPerEth / 1000;
  auto profitable = [&]() {
    double frac = 0.05 + 0.25 * g.rng.uniform();
    Wei bp = static_cast<Wei>(frac * static_cast<double>(headroom));
    bp = std::clamp(bp, 2 * dust, std::max<Wei>(headroom, 2 * dust));
    ++bt.profitable_blocks;
    return bp;
  };
  auto neutral = [&]() {
    ++bt.neutral_blocks;
    return g.rng.uniform() < 0.5 ? dust / 2 : -dust / 2;
  };
  auto subsidized = [&]() {
    double frac = 0.05 + 0.25 * g.rng.uniform();
    Wei bp = -std::max<Wei>(static_cast<Wei>(frac * static_cast<double>(true_value)), 2 * dust);
    ++bt.subsidized_blocks;
    return bp;
  };
  if (policy == "profitable") return profitable();
  if (policy == "neutral") return neutral();
  if (policy == "subsidized") return subsidized();
  if (policy == "mixed") {
    double u = g.rng.uniform();
    if (u < 0.5) return profitable();
    if (u < 0.7) return neutral();
    return subsidized();
  }
  if (policy.rfind("bernoulli:", 0) == 0) {
    double p = std::stod(policy.substr(10));
    return g.rng.uniform() < p ? profitable() : subsidized();
  }
  throw std::invalid_argument("unknown subsidy policy: " + policy);
}

}  // namespace

GeneratedCorpus generate(const ScenarioSpec& input, const std::string& out_dir) {
  input.validate();
  ScenarioSpec spec = input;
  if (spec.mixture.empty()) spec.mixture = default_mixture();
  std::filesystem::create_directories(out_dir);
  GenState g(spec);
  GeneratedCorpus out;
  out.truth.exclusive_providers = spec.exclusive_providers;

  // static registries
  g.registries.add(RegistryKind::kTelegramBot, addr("telegram_bot"), "banana_gun");
  g.registries.add(RegistryKind::kSolverRouter, addr("solver_router"), "cowswap_solver");
  g.registries.add(RegistryKind::kCexDeposit, addr("cex_deposit"), "binance");
  for (int k = 0; k < 3; ++k) {
    g.registries.add(RegistryKind::kKnownRouter, addr("router_" + std::to_string(k)),
                     "router_" + std::to_string(k));
  }
  g.registries.add(RegistryKind::kNonMevContract, addr("cowswap_settlement"), "cowswap");
  g.registries.add(RegistryKind::kOfaRefundAddress, addr("cowswap_settlement"), "cowswap",
                   "cowswap_settlement");
  g.registries.add(RegistryKind::kOfaRefundAddress, addr("mevblocker_safe"), "mevblocker",
                   "mevblocker_safe");
  g.registries.add(RegistryKind::kOfaRefundAddress, addr("mev_share_refund"), "mev_share",
                   "mev_share_refund");
  g.registries.add(RegistryKind::kRelayFeeAddress, addr("relay_fee"), "ultrasound");
  for (std::size_t i = 0; i < spec.builders.size(); ++i) {
    const auto& b = spec.builders[i];
    g.registries.add(RegistryKind::kBuilderPubkey, pubkey(b.name), b.name);
    if (i == 0) g.registries.add(RegistryKind::kBuilderPubkey, pubkey(b.name + "_alt"), b.name);
  }
  for (const auto& [provider, builder] : spec.exclusive_providers) {
    Address a = addr("provider_" + provider);
    g.registries.add(RegistryKind::kEofProvider, a, provider);
    g.ep_of[builder] = a;
  }
  for (const auto& provider : spec.neutral_providers) {
    Address a = addr("provider_" + provider);
    g.registries.add(RegistryKind::kEofProvider, a, provider);
    g.neutral_addrs.push_back(a);
  }
  for (int k = 0; k < 3; ++k) g.anon_addrs.push_back(addr("anon_" + std::to_string(k)));

  // block count allocation: largest remainder keeps totals exact
  std::vector<int> counts(spec.builders.size(), 0);
  {
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < spec.builders.size(); ++i) {
      double exact = spec.builders[i].market_share * spec.n_blocks;
      counts[i] = static_cast<int>(std::floor(exact));
      assigned += counts[i];
      remainders.emplace_back(-(exact - std::floor(exact)), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (int k = 0; k < spec.n_blocks - assigned; ++k) {
      ++counts[remainders[static_cast<std::size_t>(k) % remainders.size()].second];
    }
  }
  std::vector<std::size_t> schedule;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    schedule.insert(schedule.end(), static_cast<std::size_t>(counts[i]), i);
  }
  for (std::size_t i = schedule.size(); i > 1; --i) {  // Fisher-Yates
    std::swap(schedule[i - 1], schedule[g.rng.below(i)]);
  }
  for (const auto& b : spec.builders) g.truth.builders[b.name] = BuilderTruth{};

  // writers
  auto path = [&](const std::string& name) { return out_dir + "/" + name; };
  csv::AtomicWriter blocks_out(path("blocks.jsonl"));
  csv::AtomicWriter payloads_out(path("payloads.csv"));
  payloads_out.write_row({"slot", "builder_pubkey", "fee_recipient", "proposer_fee_recipient",
                          "value_wei"});
  csv::AtomicWriter bids_out(path("bids.csv"));
  bids_out.write_row({"slot", "builder_pubkey", "received_at_ms", "value_wei", "won"});

  for (int bi = 0; bi < spec.n_blocks; ++bi) {
    const BuilderScenario& builder = spec.builders[schedule[static_cast<std::size_t>(bi)]];
    BuilderTruth& bt = g.truth.builders[builder.name];
    std::int64_t slot = spec.first_slot + bi;
    Address proposer = addr("proposer_" + std::to_string(slot));

    BlockRecord block;
    block.slot = slot;
    block.block_number = 18'000'000 + bi;
    block.builder_id = builder.name;
    block.builder_pubkey = pubkey(builder.name);
    block.proposer_fee_recipient = proposer;
    block.timestamp = spec.genesis_time + slot * 12;
    bool excluded = g.rng.uniform() < builder.exclusion_rate;
    block.fee_recipient = excluded ? proposer : addr("builder_" + builder.name);

    // content transactions
    const auto& mixture = builder.mixture.empty() ? spec.mixture : builder.mixture;
    WeiSum refund_total = 0;
    int emitted = 0;
    while (emitted < spec.txs_per_block) {
      int room = spec.txs_per_block - emitted;
      auto label = static_cast<OrderFlowLabel>(draw_from_mixture(mixture, g.rng));
      if (label == OrderFlowLabel::kOfaBackrun) {
        if (room < 2) {
          label = OrderFlowLabel::kOtherExclusive;
        } else {
          emitted += emit_bundle(g, block, builder, static_cast<std::uint32_t>(emitted), room);
          refund_total += block.transactions.back().value;
          continue;
        }
      }
      emit_content_tx(g, block, builder, label, static_cast<std::uint32_t>(emitted));
      ++emitted;
    }

    WeiSum tv_sum = -refund_total;
    for (const auto& tx : block.transactions) {
      tv_sum += tx.tip_total;
      if (tx.status == TxStatus::kSuccess) tv_sum += tx.coinbase_transfer;
    }
    Wei tv = static_cast<Wei>(tv_sum);

    Wei reported = 0;
    if (!excluded) {
      Wei rp = 0;
      if (g.rng.uniform() < builder.relay_payment_rate) {
        rp = kWeiPerEth / 5000 + static_cast<Wei>(g.rng.below(1000)) * (kWeiPerEth / 10'000'000);
        TransactionRecord relay_tx =
            base_tx(std::to_string(slot) + "_relayfee", static_cast<std::uint32_t>(emitted++));
        relay_tx.sender = block.fee_recipient;
        relay_tx.recipient = addr("relay_fee");
        set_fee(relay_tx, 0, 21'000);
        relay_tx.value = rp;
        record_truth(g, relay_tx.hash, TransparencyLabel::kExclusiveSignal,
                     OrderFlowLabel::kOtherExclusive);
        block.transactions.push_back(std::move(relay_tx));
      }

      Wei bp = draw_profit(g, builder.subsidy_policy, tv - rp, tv, bt);
      Wei vp = tv - rp - bp;
      if (vp < 0) {  // only reachable for pathologically cheap scenarios
        vp = 0;
        bp = tv - rp;
      }
      TransactionRecord vp_tx =
          base_tx(std::to_string(slot) + "_payment", static_cast<std::uint32_t>(emitted++));
      bool related = g.rng.uniform() < builder.related_payer_rate;
      vp_tx.sender = related ? addr("builder_aux_" + builder.name) : block.fee_recipient;
      vp_tx.recipient = proposer;
      set_fee(vp_tx, 0, 21'000);
      vp_tx.value = vp;
      record_truth(g, vp_tx.hash, TransparencyLabel::kExclusiveSignal,
                   OrderFlowLabel::kOtherExclusive);
      block.transactions.push_back(std::move(vp_tx));

      reported = vp;
      double u = g.rng.uniform();
      if (u < spec.payload_over_rate) {
        reported = vp + kWeiPerEth * 3 / 10'000;
      } else if (u < spec.payload_over_rate + spec.payload_under_rate) {
        reported = vp - std::min<Wei>(vp, kWeiPerEth * 2 / 10'000);
      }

      bt.total_true_value += tv;
      bt.total_validator_payment += vp;
      bt.total_relay_payment += rp;
      bt.total_builder_profit += bp;
      bt.total_over_promised += std::max<Wei>(0, reported - vp);
      bt.total_under_promised += std::max<Wei>(0, vp - reported);
    }
    ++bt.blocks;
    if (excluded) ++bt.excluded_blocks;
    block.relay_reported_value = reported;

    blocks_out.write_raw(ingest::block_to_jsonl(block));
    payloads_out.write_row({std::to_string(slot), block.builder_pubkey, block.fee_recipient,
                            proposer, std::to_string(reported)});

    // bids: every builder bids this slot; the block builder wins
    std::int64_t slot_start_ms = (spec.genesis_time + slot * 12) * 1000;
    for (std::size_t bidx = 0; bidx < spec.builders.size(); ++bidx) {
      const BuilderScenario& bb = spec.builders[bidx];
      bool winner = bb.name == builder.name;
      int count = bb.bids_per_slot;
      std::int64_t end = slot_start_ms + bb.winner_time_ms - (winner ? 0 : 1700);
      std::vector<int> dips;
      for (int j = 1; j <= bb.cancellations_per_slot; ++j) {
        dips.push_back(j * count / (bb.cancellations_per_slot + 1));
      }
      Wei base = kWeiPerEth / 1000 * static_cast<Wei>(bidx + 1);
      Wei prev = 0;
      for (int k = 0; k < count; ++k) {
        std::int64_t received = end - static_cast<std::int64_t>(count - 1 - k) * bb.bid_lag_ms;
        Wei value = base * (k + 1);
        if (std::find(dips.begin(), dips.end(), k) != dips.end()) value = prev / 2;
        std::string pk = (bidx == 0 && k % 2 == 1) ? pubkey(bb.name + "_alt") : pubkey(bb.name);
        bool won = winner && k == count - 1;
        bids_out.write_row({std::to_string(slot), pk, std::to_string(received),
                            std::to_string(value), won ? "1" : "0"});
        prev = value;
      }
    }
  }

  blocks_out.close();
  payloads_out.close();
  bids_out.close();

  // mempool
  {
    csv::AtomicWriter w(path("mempool.csv"));
    w.write_row({"hash", "first_seen_ms"});
    for (const auto& [hash, seen] : g.mempool) w.write_row({hash, std::to_string(seen)});
    w.close();
    out.mempool_path = path("mempool.csv");
  }
  // registries
  for (const auto& [kind, rows] : g.registries.rows) {
    std::string p = path(std::string("registry_") + to_string(kind) + ".csv");
    csv::AtomicWriter w(p);
    w.write_row({kind == RegistryKind::kMevLabel ? "txhash" : "address", "entity", "sub_label"});
    for (const auto& row : rows) w.write_row({row[0], row[1], row[2]});
    w.close();
    out.registry_paths[kind] = p;
  }
  // ground truth
  {
    csv::AtomicWriter w(path("truth_labels.csv"));
    w.write_row({"hash", "transparency", "order_flow"});
    for (const auto& lt : g.truth.labels) {
      w.write_row({lt.hash, to_string(lt.transparency), to_string(lt.order_flow)});
    }
    w.close();
    out.truth_labels_path = path("truth_labels.csv");
  }
  for (const auto& b : spec.builders) {  // planted bid parameters
    auto& bt = g.truth.builders[b.name];
    bt.bids_per_slot = b.bids_per_slot;
    bt.bid_lag_ms = b.bid_lag_ms;
    bt.cancellations_per_slot = b.cancellations_per_slot;
    bt.winner_time_ms = b.winner_time_ms;
  }
  {
    nlohmann::json j;
    j["seed"] = spec.seed;
    j["n_blocks"] = spec.n_blocks;
    j["bundles"] = g.truth.bundles;
    j["exclusive_providers"] = nlohmann::json::array();
    for (const auto& [p, b] : spec.exclusive_providers) {
      j["exclusive_providers"].push_back({{"provider", p}, {"builder", b}});
    }
    j["builders"] = nlohmann::json::object();
    for (const auto& [name, bt] : g.truth.builders) {
      nlohmann::json b;
      b["blocks"] = bt.blocks;
      b["excluded_blocks"] = bt.excluded_blocks;
      b["total_true_value_wei"] = wei_to_string(bt.total_true_value);
      b["total_validator_payment_wei"] = wei_to_string(bt.total_validator_payment);
      b["total_relay_payment_wei"] = wei_to_string(bt.total_relay_payment);
      b["total_builder_profit_wei"] = wei_to_string(bt.total_builder_profit);
      b["total_over_promised_wei"] = wei_to_string(bt.total_over_promised);
      b["total_under_promised_wei"] = wei_to_string(bt.total_under_promised);
      b["profitable_blocks"] = bt.profitable_blocks;
      b["neutral_blocks"] = bt.neutral_blocks;
      b["subsidized_blocks"] = bt.subsidized_blocks;
      b["bids_per_slot"] = bt.bids_per_slot;
      b["bid_lag_ms"] = bt.bid_lag_ms;
      b["cancellations_per_slot"] = bt.cancellations_per_slot;
      b["winner_time_ms"] = bt.winner_time_ms;
      j["builders"][name] = std::move(b);
    }
    std::ofstream f(path("truth.json"));
    f << j.dump(2) << "\n";
    out.truth_summary_path = path("truth.json");
  }

  out.blocks_path = path("blocks.jsonl");
  out.payloads_path = path("payloads.csv");
  out.bids_path = path("bids.csv");
  out.truth = std::move(g.truth);
  return out;
}

// ---- minimal pairs ----

namespace {

RegistrySet minimal_pair_registries() {
  RegistrySet regs;
  regs.get_mutable(RegistryKind::kKnownRouter).entries[addr("mp_router")] = {"router", ""};
  auto& book = regs.get_mutable(RegistryKind::kOfaRefundAddress);
  book.entries[addr("cowswap_settlement")] = {"cowswap", "cowswap_settlement"};
  book.entries[addr("mevblocker_safe")] = {"mevblocker", "mevblocker_safe"};
  book.entries[addr("mev_share_refund")] = {"mev_share", "mev_share_refund"};
  return regs;
}

TransactionRecord plain_tx(const std::string& tag, std::uint32_t index) {
  TransactionRecord tx;
  tx.hash = tx_hash("mp_" + tag);
  tx.block_index = index;
  tx.sender = addr("mp_sender_" + tag);
  tx.recipient = addr("mp_recipient_" + tag);
  tx.gas_used = 21'000;
  tx.priority_fee_per_gas = kWeiPerGwei;
  tx.tip_total = tx.priority_fee_per_gas * 21'000;
  return tx;
}

BlockRecord minimal_pair_block(const std::string& tag) {
  BlockRecord block;
  block.slot = 1;
  block.block_number = 1;
  block.builder_id = "mp_builder";
  block.builder_pubkey = pubkey("mp_builder");
  block.fee_recipient = addr("mp_builder");
  block.proposer_fee_recipient = addr("mp_proposer");
  block.timestamp = 1'700'000'012;
  (void)tag;
  return block;
}

}  // namespace

MinimalPair non_atomic_minimal_pair(int condition) {
  if (condition < 1 || condition > 6) throw std::invalid_argument("condition must be 1..6");
  MinimalPair out;
  out.satisfying_registries = minimal_pair_registries();
  out.violating_registries = out.satisfying_registries;

  BlockRecord block = minimal_pair_block("na");
  block.transactions.push_back(plain_tx("na_prev", 0));

  TransactionRecord cand = plain_tx("na_cand", 1);
  cand.sender = addr("mp_searcher");
  cand.recipient = addr("mp_bot_contract");
  cand.gas_used = 180'000;
  cand.priority_fee_per_gas = 2 * kWeiPerGwei;
  cand.tip_total = cand.priority_fee_per_gas * cand.gas_used;
  cand.erc20_transfer_count = 2;
  cand.swap_count = 1;
  cand.swap_pool_directions = {SwapLeg{"mp_pool", 0}};
  out.target = cand.hash;
  block.transactions.push_back(cand);
  block.transactions.push_back(plain_tx("na_next", 2));

  out.satisfying = block;
  out.violating = block;
  auto& vcand = out.violating.transactions[1];
  switch (condition) {
    case 1:
      out.condition = "pays at least 1 Gwei/gas or a coinbase transfer";
      vcand.priority_fee_per_gas = kWeiPerGwei / 2;
      vcand.tip_total = vcand.priority_fee_per_gas * vcand.gas_used;
      break;
    case 2:
      out.condition = "never seen in the public mempool";
      vcand.first_seen_mempool = 1'700'000'000'000;
      break;
    case 3:
      out.condition = "no external MEV label";
      out.violating_registries.get_mutable(RegistryKind::kMevLabel).entries[vcand.hash] = {
          "zeromev", "sandwich_victim"};
      break;
    case 4:
      out.condition = "two ERC-20 transfers or one swap, under the gas cap";
      vcand.gas_used = 450'000;
      vcand.tip_total = vcand.priority_fee_per_gas * vcand.gas_used;
      break;
    case 5:
      out.condition = "first swap in its pool and direction within the block";
      out.violating.transactions[0].swap_count = 1;
      out.violating.transactions[0].swap_pool_directions = {SwapLeg{"mp_pool", 0}};
      break;
    case 6:
      out.condition = "recipient is not a known router";
      vcand.recipient = addr("mp_router");
      break;
  }
  return out;
}

int bundle_condition_count(OfaBundleKind kind) {
  switch (kind) {
    case OfaBundleKind::kCowswapMevblocker: return 5;
    case OfaBundleKind::kMatchingAddress: return 6;
    case OfaBundleKind::kMevShare: return 5;
  }
  return 0;
}

MinimalPair bundle_minimal_pair(OfaBundleKind kind, int condition) {
  if (condition < 1 || condition > bundle_condition_count(kind)) {
    throw std::invalid_argument("condition out of range for bundle structure");
  }
  MinimalPair out;
  out.satisfying_registries = minimal_pair_registries();
  out.violating_registries = out.satisfying_registries;

  BlockRecord block = minimal_pair_block("bp");
  block.transactions.push_back(plain_tx("bp_filler0", 0));

  TransactionRecord user = plain_tx("bp_user", 1);
  user.gas_used = 120'000;
  user.priority_fee_per_gas = kWeiPerGwei;
  user.tip_total = user.priority_fee_per_gas * user.gas_used;
  user.erc20_transfer_count = 1;
  user.swap_count = 1;
  user.swap_pool_directions = {SwapLeg{"bp_user_pool", 0}};
  switch (kind) {
    case OfaBundleKind::kCowswapMevblocker: user.recipient = addr("cowswap_settlement"); break;
    case OfaBundleKind::kMatchingAddress: user.recipient = addr("mp_somedex"); break;
    case OfaBundleKind::kMevShare: user.recipient = addr("mp_somedex2"); break;
  }

  TransactionRecord backrun = plain_tx("bp_backrun", 2);
  backrun.sender = addr("mp_searcher");
  backrun.recipient = addr("mp_backrun_contract");
  backrun.gas_used = 180'000;
  backrun.priority_fee_per_gas = 0;
  backrun.tip_total = 0;
  backrun.coinbase_transfer = kWeiPerEth / 100;
  backrun.erc20_transfer_count = 2;
  backrun.swap_count = 1;
  backrun.swap_pool_directions = {SwapLeg{"bp_backrun_pool", 0}};

  TransactionRecord refund = plain_tx("bp_refund", 3);
  refund.sender = block.fee_recipient;
  refund.gas_used = 21'000;
  refund.priority_fee_per_gas = 0;
  refund.tip_total = 0;
  refund.value = backrun.coinbase_transfer * 4 / 5;
  switch (kind) {
    case OfaBundleKind::kCowswapMevblocker: refund.recipient = addr("mevblocker_safe"); break;
    case OfaBundleKind::kMatchingAddress: refund.recipient = user.sender; break;
    case OfaBundleKind::kMevShare: refund.recipient = addr("mev_share_refund"); break;
  }

  block.transactions.push_back(user);
  block.transactions.push_back(backrun);
  block.transactions.push_back(refund);
  block.transactions.push_back(plain_tx("bp_filler4", 4));

  out.satisfying = block;
  out.violating = block;
  auto& vuser = out.violating.transactions[1];
  auto& vbackrun = out.violating.transactions[2];
  auto& vrefund = out.violating.transactions[3];
  out.target = backrun.hash;

  switch (condition) {
    case 1:
      out.condition = "refund issued by the builder";
      vrefund.sender = addr("mp_not_builder");
      break;
    case 2:
      out.condition = "refund within the backrun's fee";
      vrefund.value = vbackrun.coinbase_transfer + vbackrun.tip_total + 1;
      break;
    case 3:
      out.condition = "refund has a recipient";
      vrefund.recipient = std::nullopt;
      break;
    case 4:
      if (kind == OfaBundleKind::kCowswapMevblocker) {
        out.condition = "user transaction targets the settlement contract";
        vuser.recipient = addr("mp_elsewhere");
      } else {
        out.condition = "user transaction involves a transfer or swap";
        vuser.erc20_transfer_count = 0;
        vuser.swap_count = 0;
        vuser.swap_pool_directions.clear();
      }
      // breaking the user clause can still leave a backrun+refund pair;
      // the user transaction is the one that must drop out
      out.target = user.hash;
      break;
    case 5:
      switch (kind) {
        case OfaBundleKind::kCowswapMevblocker:
          out.condition = "refund goes to the MEV Blocker safe";
          vrefund.recipient = addr("mp_elsewhere");
          break;
        case OfaBundleKind::kMatchingAddress:
          out.condition = "refund goes back to the user's sender";
          vrefund.recipient = addr("mp_elsewhere");
          break;
        case OfaBundleKind::kMevShare:
          out.condition = "refund goes to the MEV-Share refund address";
          vrefund.recipient = addr("mp_elsewhere");
          break;
      }
      break;
    case 6:
      out.condition = "refund value is positive";
      vrefund.value = 0;
      break;
  }
  return out;
}

// ---- verification ----

VerifyReport verify_labels(const std::string& predicted_csv, const std::string& truth_csv) {
  auto load = [](const std::string& path) {
    csv::Reader reader(path);
    auto hash_col = reader.column("hash");
    auto t_col = reader.column("transparency");
    auto f_col = reader.column("order_flow");
    std::map<std::string, std::pair<std::string, std::string>> rows;
    while (auto row = reader.next()) {
      if (row->fields.size() <= std::max({hash_col, t_col, f_col})) {
        throw std::runtime_error("label row with too few columns at line " +
                                 std::to_string(row->line_number));
      }
      rows[row->fields[hash_col]] = {row->fields[t_col], row->fields[f_col]};
    }
    return rows;
  };
  auto predicted = load(predicted_csv);
  auto truth = load(truth_csv);

  VerifyReport report;
  for (const auto& [hash, t] : truth) {
    auto it = predicted.find(hash);
    if (it == predicted.end()) {
      ++report.missing;
      continue;
    }
    ++report.total;
    ++report.transparency_confusion[{t.first, it->second.first}];
    ++report.order_flow_confusion[{t.second, it->second.second}];
    if (t.first == it->second.first) {
      ++report.transparency_matches;
    } else if (report.mismatches.size() < 100) {
      report.mismatches.push_back({hash, "transparency", t.first, it->second.first});
    }
    if (t.second == it->second.second) {
      ++report.order_flow_matches;
    } else if (report.mismatches.size() < 100) {
      report.mismatches.push_back({hash, "order_flow", t.second, it->second.second});
    }
  }
  for (const auto& [hash, p] : predicted) {
    if (!truth.count(hash)) ++report.unexpected;
  }
  return report;
}

}  // namespace lens::fixtures
