#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lens/wei.hpp"

namespace lens {

// Addresses and hashes travel as lowercase 0x-prefixed hex strings.
using Address = std::string;
using TxHash = std::string;

enum class TxStatus { kSuccess, kFailed };

struct SwapLeg {
  std::string pool;
  int direction = 0;  // 0 = token0->token1, 1 = token1->token0

  bool operator==(const SwapLeg&) const = default;
};

struct TransactionRecord {
  TxHash hash;
  std::uint32_t block_index = 0;
  Address sender;
  std::optional<Address> recipient;  // absent for contract creation
  TxStatus status = TxStatus::kSuccess;
  std::int64_t gas_used = 0;
  Wei priority_fee_per_gas = 0;
  Wei tip_total = 0;          // priority fee * gas used
  Wei coinbase_transfer = 0;  // direct payment to the block fee recipient
  Wei value = 0;              // native transfer amount
  std::uint32_t erc20_transfer_count = 0;
  std::uint32_t swap_count = 0;
  std::vector<SwapLeg> swap_pool_directions;
  std::optional<std::int64_t> first_seen_mempool;  // ms; absent = never seen publicly

  bool operator==(const TransactionRecord&) const = default;
};

struct BlockRecord {
  std::int64_t slot = 0;
  std::int64_t block_number = 0;
  std::string builder_id;  // resolved entity, "unknown:<prefix>" when unresolved
  std::string builder_pubkey;
  Address fee_recipient;
  Address proposer_fee_recipient;
  std::vector<TransactionRecord> transactions;  // sorted by block_index, contiguous from 0
  Wei relay_reported_value = 0;
  std::int64_t timestamp = 0;  // seconds

  bool operator==(const BlockRecord&) const = default;
};

enum class RegistryKind {
  kCexDeposit,
  kTelegramBot,
  kSolverRouter,
  kKnownRouter,
  kNonMevContract,
  kSearcher,
  kMevLabel,
  kBuilderPubkey,
  kEofProvider,
  kOfaRefundAddress,
  kRelayFeeAddress,
};

const char* to_string(RegistryKind kind);
std::optional<RegistryKind> registry_kind_from_string(const std::string& s);

struct RegistryEntry {
  std::string entity;
  std::string sub_label;
};

struct Registry {
  RegistryKind kind = RegistryKind::kCexDeposit;
  // address (or tx hash, for kMevLabel) -> entry
  std::unordered_map<std::string, RegistryEntry> entries;

  bool contains(const std::string& key) const { return entries.count(key) > 0; }
  const RegistryEntry* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// All loaded registries; missing kinds behave as empty.
struct RegistrySet {
  std::map<RegistryKind, Registry> by_kind;

  const Registry& get(RegistryKind kind) const {
    static const Registry empty;
    auto it = by_kind.find(kind);
    return it == by_kind.end() ? empty : it->second;
  }
  Registry& get_mutable(RegistryKind kind) {
    auto& reg = by_kind[kind];
    reg.kind = kind;
    return reg;
  }
};

struct BidRecord {
  std::int64_t slot = 0;
  std::string builder_pubkey;
  std::string builder_id;
  std::int64_t received_at = 0;  // ms
  Wei value = 0;
  bool won = false;
};

enum class TransparencyLabel { kPublicSignal, kExclusiveSignal, kOfaBundle };

// Order matters: enum order is the fixed tie-break order for MSOF.
enum class OrderFlowLabel {
  kAtomicArb,
  kNonAtomicArb,
  kSandwich,
  kLiquidation,
  kTelegramBot,
  kSolverModel,
  kCexDeposit,
  kRetailSwap,
  kBotSwap,
  kOfaBackrun,
  kOtherPublic,
  kOtherExclusive,
};

constexpr int kOrderFlowLabelCount = 12;

const char* to_string(TransparencyLabel label);
const char* to_string(OrderFlowLabel label);
std::optional<TransparencyLabel> transparency_from_string(const std::string& s);
std::optional<OrderFlowLabel> order_flow_from_string(const std::string& s);

enum class OfaBundleKind { kCowswapMevblocker, kMatchingAddress, kMevShare };

const char* to_string(OfaBundleKind kind);

struct OfaBundle {
  OfaBundleKind kind = OfaBundleKind::kCowswapMevblocker;
  std::optional<TxHash> user_tx;  // absent in the two-transaction variant
  TxHash backrun_tx;
  TxHash refund_tx;
  Wei refund_value = 0;
  std::uint32_t first_index = 0;  // block index of the first member
};

struct LabeledTransaction {
  TxHash hash;
  TransparencyLabel transparency = TransparencyLabel::kPublicSignal;
  OrderFlowLabel order_flow = OrderFlowLabel::kOtherPublic;
  std::optional<std::uint32_t> bundle_id;  // index into the block's bundle list
};

enum class PayerKind { kBuilder, kRelatedAddress, kNone };

const char* to_string(PayerKind payer);

struct BlockEconomics {
  bool excluded = false;  // proposer set as fee recipient
  Wei true_value = 0;
  Wei validator_payment = 0;
  Wei relay_payment = 0;
  Wei builder_profit = 0;
  std::optional<double> profit_margin;  // undefined when true_value == 0
  PayerKind payment_payer = PayerKind::kNone;
  Wei over_promised = 0;
  Wei under_promised = 0;
};

struct BuilderProfile {
  std::string builder_id;
  std::int64_t total_blocks = 0;
  std::int64_t excluded_blocks = 0;
  double market_share = 0.0;
  WeiSum total_profit = 0;
  WeiSum total_subsidy = 0;  // sum of negative-profit magnitudes
  WeiSum total_validator_payment = 0;
  WeiSum total_relay_payment = 0;
  WeiSum total_true_value = 0;
  WeiSum total_over_promised = 0;
  WeiSum total_under_promised = 0;
  double profit_margin = 0.0;       // value-weighted: sum BP / sum TV
  double profit_margin_mean = 0.0;  // mean of per-block margins (TV > 0 blocks)
  double profitable_share = 0.0;
  double neutral_share = 0.0;
  double subsidized_share = 0.0;
  double other_payer_share = 0.0;
  double promise_delivered_share = 0.0;
  WeiSum excluded_value = 0;
  std::vector<double> of_composition = std::vector<double>(kOrderFlowLabelCount, 0.0);
  std::vector<double> transparency_composition = std::vector<double>(3, 0.0);
  double entropy = 0.0;
  OrderFlowLabel msof_label = OrderFlowLabel::kAtomicArb;
  double msof_share = 0.0;
  bool msof_tie = false;
  double tob_share = 0.0;
  double bob_share = 0.0;
  double eob_share = 0.0;
  std::map<std::string, double> eof_provider_shares;
};

}  // namespace lens
