#pragma once

#include <vector>

#include "lens/types.hpp"

namespace lens::labeler {

// Sub-labels of the ofa_refund_address registry that anchor the three
// bundle structures.
inline constexpr const char* kCowswapSettlementSubLabel = "cowswap_settlement";
inline constexpr const char* kMevblockerSafeSubLabel = "mevblocker_safe";
inline constexpr const char* kMevShareRefundSubLabel = "mev_share_refund";

// Greedy left-to-right scan for adjacent bundle structures. A transaction
// joins at most one bundle. Also matches the two-transaction
// backrun+refund variant (no user tx).
std::vector<OfaBundle> detect_ofa_bundles(const BlockRecord& block,
                                          const RegistrySet& registries);

// Bundle membership takes precedence over mempool visibility.
TransparencyLabel label_transparency(const TransactionRecord& tx,
                                     const std::vector<OfaBundle>& bundles);

// Per-block state for the "first swap in pool+direction" condition.
// Feed transactions in block order.
class PoolFirstSwapTracker {
 public:
  // True iff none of the tx's swap legs were seen earlier in the block.
  // Vacuously true for transactions without swap legs. Records legs.
  bool is_first_and_record(const TransactionRecord& tx);

 private:
  std::vector<SwapLeg> seen_;
};

// All six conditions; `prev`/`next` are block-adjacent transactions of the
// same block (nullptr at the edges) for the adjacent coinbase-payer rule.
bool detect_non_atomic_arb(const TransactionRecord& tx, const TransactionRecord* prev,
                           const TransactionRecord* next, bool in_bundle,
                           bool first_swap_in_pool, const RegistrySet& registries);

// First matching rule wins; see taxonomy cascade.
OrderFlowLabel label_order_flow(const TransactionRecord& tx, TransparencyLabel transparency,
                                bool is_bundle_backrun, bool non_atomic_arb,
                                const RegistrySet& registries);

// Full labeling of one block; output is index-aligned with
// block.transactions.
struct BlockLabels {
  std::vector<OfaBundle> bundles;
  std::vector<LabeledTransaction> labels;
};

BlockLabels label_block(const BlockRecord& block, const RegistrySet& registries);

}  // namespace lens::labeler
