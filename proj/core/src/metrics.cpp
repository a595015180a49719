#include "lens/metrics.hpp"

#include <algorithm>

namespace lens::metrics {

ValidatorPayment identify_validator_payment(const BlockRecord& block) {
  ValidatorPayment out;
  if (block.fee_recipient == block.proposer_fee_recipient) {
    out.excluded = true;
    return out;
  }
  const auto& txs = block.transactions;
  for (auto it = txs.rbegin(); it != txs.rend(); ++it) {
    if (it->value > 0 && it->recipient && *it->recipient == block.proposer_fee_recipient &&
        it->status == TxStatus::kSuccess) {
      out.payment = it->value;
      out.payer = it->sender == block.fee_recipient ? PayerKind::kBuilder
                                                    : PayerKind::kRelatedAddress;
      out.payment_index = it->block_index;
      return out;
    }
  }
  return out;  // payment 0, payer none
}

std::vector<std::uint32_t> relay_payment_indices(const BlockRecord& block,
                                                 const RegistrySet& registries) {
  const Registry& relay_fees = registries.get(RegistryKind::kRelayFeeAddress);
  std::vector<std::uint32_t> out;
  if (relay_fees.entries.empty()) return out;
  for (const auto& tx : block.transactions) {
    if (tx.value > 0 && tx.recipient && tx.sender == block.fee_recipient &&
        tx.status == TxStatus::kSuccess && relay_fees.contains(*tx.recipient)) {
      out.push_back(tx.block_index);
    }
  }
  return out;
}

Wei relay_payment(const BlockRecord& block, const RegistrySet& registries) {
  Wei total = 0;
  for (auto idx : relay_payment_indices(block, registries)) {
    total += block.transactions[idx].value;
  }
  return total;
}

Wei true_block_value(const BlockRecord& block, const std::vector<OfaBundle>& bundles,
                     const ValidatorPayment& vp,
                     const std::vector<std::uint32_t>& relay_payment_txs) {
  WeiSum total = 0;
  for (const auto& tx : block.transactions) {
    if (vp.payment_index && tx.block_index == *vp.payment_index) continue;
    if (std::find(relay_payment_txs.begin(), relay_payment_txs.end(), tx.block_index) !=
        relay_payment_txs.end()) {
      continue;
    }
    total += tx.tip_total;
    if (tx.status == TxStatus::kSuccess) total += tx.coinbase_transfer;
  }
  for (const auto& b : bundles) total -= b.refund_value;
  return static_cast<Wei>(total);
}

BlockEconomics block_economics(const BlockRecord& block, const std::vector<OfaBundle>& bundles,
                               const RegistrySet& registries) {
  BlockEconomics econ;
  auto vp = identify_validator_payment(block);
  auto relay_txs = relay_payment_indices(block, registries);
  econ.true_value = true_block_value(block, bundles, vp, relay_txs);
  if (vp.excluded) {
    // the whole value accrues to the proposer directly; report it, but no
    // payment/profit decomposition applies
    econ.excluded = true;
    return econ;
  }
  econ.validator_payment = vp.payment;
  econ.payment_payer = vp.payer;
  econ.relay_payment = relay_payment(block, registries);
  econ.builder_profit = econ.true_value - econ.validator_payment - econ.relay_payment;
  if (econ.true_value > 0) {
    econ.profit_margin = static_cast<double>(econ.builder_profit) /
                         static_cast<double>(econ.true_value);
  }
  auto [over, under] = payload_value_discrepancy(block.relay_reported_value, vp.payment);
  econ.over_promised = over;
  econ.under_promised = under;
  return econ;
}

std::pair<Wei, Wei> payload_value_discrepancy(Wei relay_reported_value, Wei validator_payment) {
  Wei over = std::max<Wei>(0, relay_reported_value - validator_payment);
  Wei under = std::max<Wei>(0, validator_payment - relay_reported_value);
  return {over, under};
}

}  // namespace lens::metrics
