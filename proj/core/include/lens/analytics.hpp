#pragma once

#include <map>
#include <string>
#include <vector>

#include "lens/labeler.hpp"
#include "lens/types.hpp"

namespace lens::analytics {

constexpr Wei kDefaultDustWei = kWeiPerEth / 1000;  // 0.001 ETH

enum class Profitability { kProfitable, kNeutral, kSubsidized };

const char* to_string(Profitability p);

Profitability classify_profitability(const BlockEconomics& econ, Wei dust = kDefaultDustWei);

enum class BlockPosition { kToB, kBoB, kEoB };

// Position classes over non-builder transactions (builder transactions
// excluded, remainder reindexed). Output aligned with block.transactions;
// builder transactions carry no class.
std::vector<std::optional<BlockPosition>> position_split(const BlockRecord& block);

// H(X) = -sum p_i log2 p_i over the nonzero entries; throws when the
// shares do not form a simplex.
double shannon_entropy(const std::vector<double>& composition);

struct Msof {
  OrderFlowLabel label = OrderFlowLabel::kAtomicArb;
  double share = 0.0;
  bool tie = false;
};

// Argmax label; ties broken by enum order and flagged.
std::optional<Msof> msof(const std::vector<double>& composition);

// Per-transaction builder payment used for all value shares: tip plus
// coinbase, with failed transactions contributing tip only.
Wei tx_builder_payment(const TransactionRecord& tx);

// Accumulator merged associatively across shards (tested as a
// commutative monoid).
struct BuilderAccumulator {
  std::string builder_id;
  std::int64_t total_blocks = 0;
  std::int64_t excluded_blocks = 0;
  std::int64_t profitable = 0;
  std::int64_t neutral = 0;
  std::int64_t subsidized = 0;
  std::int64_t other_payer_blocks = 0;
  std::int64_t promise_delivered_blocks = 0;  // reported value == paid value
  WeiSum excluded_value = 0;                  // true value of excluded blocks
  WeiSum total_profit = 0;
  WeiSum total_subsidy = 0;
  WeiSum total_validator_payment = 0;
  WeiSum total_relay_payment = 0;
  WeiSum total_true_value = 0;
  WeiSum total_over_promised = 0;
  WeiSum total_under_promised = 0;
  double margin_sum = 0.0;  // per-block margins, TV > 0 blocks
  std::int64_t margin_blocks = 0;
  std::vector<WeiSum> of_value = std::vector<WeiSum>(kOrderFlowLabelCount, 0);
  std::vector<WeiSum> transparency_value = std::vector<WeiSum>(3, 0);
  WeiSum tob_value = 0;
  WeiSum bob_value = 0;
  WeiSum eob_value = 0;
  // provider -> exclusive value; synthetic names already resolved
  std::map<std::string, WeiSum> eof_value;

  void merge(const BuilderAccumulator& other);
};

// Names the EOF provider for one exclusive-side transaction: registry
// entity when the sender is known, otherwise a synthetic enumerated
// provider ("provider#k", assigned on first appearance in scan order).
class ProviderEnumerator {
 public:
  explicit ProviderEnumerator(const RegistrySet& registries);
  std::string provider_for(const Address& sender);

 private:
  const Registry* providers_;
  std::map<Address, std::string> synthetic_;
};

// Folds one labeled, priced block into the builder's accumulator.
void accumulate_block(BuilderAccumulator& acc, const BlockRecord& block,
                      const labeler::BlockLabels& labels, const BlockEconomics& econ,
                      ProviderEnumerator& providers, Wei dust = kDefaultDustWei);

std::vector<BuilderProfile> build_profiles(const std::map<std::string, BuilderAccumulator>& accs);

// UTC calendar-day key (YYYY-MM-DD) for daily series bucketing.
std::string utc_day(std::int64_t timestamp_seconds);

}  // namespace lens::analytics
