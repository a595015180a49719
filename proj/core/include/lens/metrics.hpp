#pragma once

#include <vector>

#include "lens/labeler.hpp"
#include "lens/types.hpp"

namespace lens::metrics {

struct ValidatorPayment {
  Wei payment = 0;
  PayerKind payer = PayerKind::kNone;
  bool excluded = false;                       // proposer set as fee recipient
  std::optional<std::uint32_t> payment_index;  // block index of the payment tx
};

// Backward scan from the block tail for the first native transfer to the
// proposer fee recipient.
ValidatorPayment identify_validator_payment(const BlockRecord& block);

// Indices of builder-side transfers to registered relay fee addresses.
std::vector<std::uint32_t> relay_payment_indices(const BlockRecord& block,
                                                 const RegistrySet& registries);

Wei relay_payment(const BlockRecord& block, const RegistrySet& registries);

// Sum over non-settlement transactions of tip + coinbase, minus each
// bundle's refund value. Failed transactions contribute tip only.
Wei true_block_value(const BlockRecord& block, const std::vector<OfaBundle>& bundles,
                     const ValidatorPayment& vp,
                     const std::vector<std::uint32_t>& relay_payment_txs);

BlockEconomics block_economics(const BlockRecord& block, const std::vector<OfaBundle>& bundles,
                               const RegistrySet& registries);

// over = max(0, reported - paid); under = max(0, paid - reported).
std::pair<Wei, Wei> payload_value_discrepancy(Wei relay_reported_value, Wei validator_payment);

}  // namespace lens::metrics
