#include "lens/labeler.hpp"

#include <algorithm>

namespace lens::labeler {

namespace {

bool has_sub_label(const Registry& reg, const Address& addr, const char* sub_label) {
  const auto* entry = reg.find(addr);
  return entry && entry->sub_label == sub_label;
}

bool involves_transfer_or_swap(const TransactionRecord& tx) {
  return tx.erc20_transfer_count > 0 || tx.swap_count > 0;
}

// Refund transfers at most the fee the backrun paid the builder.
bool refund_within_fee(const TransactionRecord& backrun, const TransactionRecord& refund) {
  return static_cast<WeiSum>(backrun.tip_total) + backrun.coinbase_transfer >=
         static_cast<WeiSum>(refund.value);
}

bool issued_by_builder(const TransactionRecord& tx, const BlockRecord& block) {
  return tx.sender == block.fee_recipient;
}

std::optional<OfaBundleKind> match_triple(const TransactionRecord& user,
                                          const TransactionRecord& backrun,
                                          const TransactionRecord& refund,
                                          const BlockRecord& block, const Registry& ofa_book) {
  if (!issued_by_builder(refund, block)) return std::nullopt;
  if (!refund_within_fee(backrun, refund)) return std::nullopt;
  if (!refund.recipient) return std::nullopt;
  if (user.recipient && has_sub_label(ofa_book, *user.recipient, kCowswapSettlementSubLabel) &&
      has_sub_label(ofa_book, *refund.recipient, kMevblockerSafeSubLabel)) {
    return OfaBundleKind::kCowswapMevblocker;
  }
  if (involves_transfer_or_swap(user) && *refund.recipient == user.sender && refund.value > 0) {
    return OfaBundleKind::kMatchingAddress;
  }
  if (involves_transfer_or_swap(user) &&
      has_sub_label(ofa_book, *refund.recipient, kMevShareRefundSubLabel)) {
    return OfaBundleKind::kMevShare;
  }
  return std::nullopt;
}

std::optional<OfaBundleKind> match_pair(const TransactionRecord& backrun,
                                        const TransactionRecord& refund, const BlockRecord& block,
                                        const Registry& ofa_book) {
  if (!issued_by_builder(refund, block)) return std::nullopt;
  if (!refund_within_fee(backrun, refund)) return std::nullopt;
  if (!refund.recipient) return std::nullopt;
  if (has_sub_label(ofa_book, *refund.recipient, kMevblockerSafeSubLabel)) {
    return OfaBundleKind::kCowswapMevblocker;
  }
  if (has_sub_label(ofa_book, *refund.recipient, kMevShareRefundSubLabel)) {
    return OfaBundleKind::kMevShare;
  }
  return std::nullopt;
}

}  // namespace

std::vector<OfaBundle> detect_ofa_bundles(const BlockRecord& block,
                                          const RegistrySet& registries) {
  const Registry& ofa_book = registries.get(RegistryKind::kOfaRefundAddress);
  const auto& txs = block.transactions;
  std::vector<OfaBundle> out;
  std::size_t i = 0;
  while (i < txs.size()) {
    if (i + 2 < txs.size()) {
      if (auto kind = match_triple(txs[i], txs[i + 1], txs[i + 2], block, ofa_book)) {
        OfaBundle b;
        b.kind = *kind;
        b.user_tx = txs[i].hash;
        b.backrun_tx = txs[i + 1].hash;
        b.refund_tx = txs[i + 2].hash;
        b.refund_value = txs[i + 2].value;
        b.first_index = txs[i].block_index;
        out.push_back(std::move(b));
        i += 3;
        continue;
      }
    }
    if (i + 1 < txs.size() && !issued_by_builder(txs[i], block)) {
      if (auto kind = match_pair(txs[i], txs[i + 1], block, ofa_book)) {
        OfaBundle b;
        b.kind = *kind;
        b.backrun_tx = txs[i].hash;
        b.refund_tx = txs[i + 1].hash;
        b.refund_value = txs[i + 1].value;
        b.first_index = txs[i].block_index;
        out.push_back(std::move(b));
        i += 2;
        continue;
      }
    }
    ++i;
  }
  return out;
}

TransparencyLabel label_transparency(const TransactionRecord& tx,
                                     const std::vector<OfaBundle>& bundles) {
  for (const auto& b : bundles) {
    if ((b.user_tx && *b.user_tx == tx.hash) || b.backrun_tx == tx.hash ||
        b.refund_tx == tx.hash) {
      return TransparencyLabel::kOfaBundle;
    }
  }
  if (tx.first_seen_mempool) return TransparencyLabel::kPublicSignal;
  return TransparencyLabel::kExclusiveSignal;
}

bool PoolFirstSwapTracker::is_first_and_record(const TransactionRecord& tx) {
  bool first = true;
  for (const auto& leg : tx.swap_pool_directions) {
    if (std::find(seen_.begin(), seen_.end(), leg) != seen_.end()) first = false;
  }
  for (const auto& leg : tx.swap_pool_directions) seen_.push_back(leg);
  return first;
}

bool detect_non_atomic_arb(const TransactionRecord& tx, const TransactionRecord* prev,
                           const TransactionRecord* next, bool in_bundle,
                           bool first_swap_in_pool, const RegistrySet& registries) {
  // (1) priority fee >= 1 Gwei per gas, or a coinbase payment; an adjacent
  // same-sender coinbase payer counts for the transaction as well
  bool adjacent_coinbase =
      (prev && prev->sender == tx.sender && prev->coinbase_transfer > 0) ||
      (next && next->sender == tx.sender && next->coinbase_transfer > 0);
  bool pays = tx.priority_fee_per_gas >= kWeiPerGwei || tx.coinbase_transfer > 0 ||
              adjacent_coinbase;
  if (!pays) return false;
  // (2) never observed in the public mempool
  if (tx.first_seen_mempool) return false;
  // (3) no external MEV label and not inside an OFA bundle
  if (registries.get(RegistryKind::kMevLabel).contains(tx.hash)) return false;
  if (in_bundle) return false;
  // (4) strictly two ERC-20 transfers (or one swap), under the gas cap
  bool shape = tx.erc20_transfer_count == 2 || tx.swap_count == 1;
  if (!shape || tx.gas_used >= 400'000) return false;
  // (5) first swap in its pool for its trade direction within the block
  if (!first_swap_in_pool) return false;
  // (6) not submitted to a known router contract
  if (tx.recipient && registries.get(RegistryKind::kKnownRouter).contains(*tx.recipient)) {
    return false;
  }
  return true;
}

OrderFlowLabel label_order_flow(const TransactionRecord& tx, TransparencyLabel transparency,
                                bool is_bundle_backrun, bool non_atomic_arb,
                                const RegistrySet& registries) {
  // (1) OFA backrun wins even over MEV labels: a backrun that is also an
  // arbitrage counts once, as ofa_backrun
  if (is_bundle_backrun) return OrderFlowLabel::kOfaBackrun;
  // (2) known MEV types; sandwich victims fall through to their original
  // category
  if (const auto* mev = registries.get(RegistryKind::kMevLabel).find(tx.hash)) {
    const std::string& kind = mev->sub_label;
    if (kind == "atomic_arb") return OrderFlowLabel::kAtomicArb;
    if (kind == "sandwich_front" || kind == "sandwich_back") return OrderFlowLabel::kSandwich;
    if (kind == "liquidation") return OrderFlowLabel::kLiquidation;
    // sandwich_victim: no label from this rule
  }
  if (non_atomic_arb) return OrderFlowLabel::kNonAtomicArb;
  // (3)-(5) registry-driven categories on the recipient
  if (tx.recipient) {
    if (registries.get(RegistryKind::kTelegramBot).contains(*tx.recipient)) {
      return OrderFlowLabel::kTelegramBot;
    }
    if (registries.get(RegistryKind::kSolverRouter).contains(*tx.recipient)) {
      return OrderFlowLabel::kSolverModel;
    }
    if (registries.get(RegistryKind::kCexDeposit).contains(*tx.recipient)) {
      return OrderFlowLabel::kCexDeposit;
    }
  }
  // (6) swap flow: retail if the entry contract is a known non-MEV one
  if (tx.erc20_transfer_count > 0 || tx.swap_count > 0) {
    bool known_contract =
        tx.recipient && (registries.get(RegistryKind::kKnownRouter).contains(*tx.recipient) ||
                         registries.get(RegistryKind::kNonMevContract).contains(*tx.recipient));
    return known_contract ? OrderFlowLabel::kRetailSwap : OrderFlowLabel::kBotSwap;
  }
  // (7) fallback by transparency; bundle user/refund members that reach
  // here count as exclusive-side
  if (transparency == TransparencyLabel::kPublicSignal) return OrderFlowLabel::kOtherPublic;
  return OrderFlowLabel::kOtherExclusive;
}

BlockLabels label_block(const BlockRecord& block, const RegistrySet& registries) {
  BlockLabels out;
  out.bundles = detect_ofa_bundles(block, registries);

  // hash -> (bundle id, is backrun member)
  std::unordered_map<TxHash, std::pair<std::uint32_t, bool>> membership;
  for (std::uint32_t id = 0; id < out.bundles.size(); ++id) {
    const auto& b = out.bundles[id];
    if (b.user_tx) membership[*b.user_tx] = {id, false};
    membership[b.backrun_tx] = {id, true};
    membership[b.refund_tx] = {id, false};
  }

  PoolFirstSwapTracker tracker;
  const auto& txs = block.transactions;
  out.labels.reserve(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const auto& tx = txs[i];
    auto mem = membership.find(tx.hash);
    bool in_bundle = mem != membership.end();
    bool is_backrun = in_bundle && mem->second.second;

    bool first_swap = tracker.is_first_and_record(tx);
    const TransactionRecord* prev = i > 0 ? &txs[i - 1] : nullptr;
    const TransactionRecord* next = i + 1 < txs.size() ? &txs[i + 1] : nullptr;
    bool non_atomic =
        detect_non_atomic_arb(tx, prev, next, in_bundle, first_swap, registries);

    LabeledTransaction lt;
    lt.hash = tx.hash;
    lt.transparency = in_bundle ? TransparencyLabel::kOfaBundle
                                : label_transparency(tx, out.bundles);
    lt.order_flow = label_order_flow(tx, lt.transparency, is_backrun, non_atomic, registries);
    if (in_bundle) lt.bundle_id = mem->second.first;
    out.labels.push_back(std::move(lt));
  }
  return out;
}

}  // namespace lens::labeler
