#include "lens/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace lens::analytics {

const char* to_string(Profitability p) {
  switch (p) {
    case Profitability::kProfitable: return "profitable";
    case Profitability::kNeutral: return "neutral";
    case Profitability::kSubsidized: return "subsidized";
  }
  return "?";
}

Profitability classify_profitability(const BlockEconomics& econ, Wei dust) {
  if (econ.builder_profit > dust) return Profitability::kProfitable;
  if (econ.builder_profit < -dust) return Profitability::kSubsidized;
  return Profitability::kNeutral;
}

std::vector<std::optional<BlockPosition>> position_split(const BlockRecord& block) {
  std::vector<std::optional<BlockPosition>> out(block.transactions.size());
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if (block.transactions[i].sender != block.fee_recipient) kept.push_back(i);
  }
  const double n = static_cast<double>(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) {
    double normalized = static_cast<double>(j) / n;
    BlockPosition pos = BlockPosition::kBoB;
    if (normalized < 0.1) {
      pos = BlockPosition::kToB;
    } else if (normalized >= 0.9) {
      pos = BlockPosition::kEoB;
    }
    out[kept[j]] = pos;
  }
  return out;
}

double shannon_entropy(const std::vector<double>& composition) {
  double sum = 0.0;
  for (double p : composition) {
    if (p < 0.0) throw std::invalid_argument("negative share in composition");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-6) throw std::invalid_argument("composition does not sum to 1");
  double h = 0.0;
  for (double p : composition) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

std::optional<Msof> msof(const std::vector<double>& composition) {
  bool any = false;
  for (double p : composition) {
    if (p > 0.0) any = true;
  }
  if (!any) return std::nullopt;
  Msof out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < composition.size(); ++i) {
    if (composition[i] > composition[best]) best = i;
  }
  out.label = static_cast<OrderFlowLabel>(best);
  out.share = composition[best];
  for (std::size_t i = 0; i < composition.size(); ++i) {
    if (i != best && composition[i] == composition[best]) out.tie = true;
  }
  return out;
}

Wei tx_builder_payment(const TransactionRecord& tx) {
  Wei payment = tx.tip_total;
  if (tx.status == TxStatus::kSuccess) payment += tx.coinbase_transfer;
  return payment;
}

void BuilderAccumulator::merge(const BuilderAccumulator& other) {
  total_blocks += other.total_blocks;
  excluded_blocks += other.excluded_blocks;
  profitable += other.profitable;
  neutral += other.neutral;
  subsidized += other.subsidized;
  other_payer_blocks += other.other_payer_blocks;
  promise_delivered_blocks += other.promise_delivered_blocks;
  excluded_value += other.excluded_value;
  total_profit += other.total_profit;
  total_subsidy += other.total_subsidy;
  total_validator_payment += other.total_validator_payment;
  total_relay_payment += other.total_relay_payment;
  total_true_value += other.total_true_value;
  total_over_promised += other.total_over_promised;
  total_under_promised += other.total_under_promised;
  margin_sum += other.margin_sum;
  margin_blocks += other.margin_blocks;
  for (int i = 0; i < kOrderFlowLabelCount; ++i) of_value[i] += other.of_value[i];
  for (int i = 0; i < 3; ++i) transparency_value[i] += other.transparency_value[i];
  tob_value += other.tob_value;
  bob_value += other.bob_value;
  eob_value += other.eob_value;
  for (const auto& [provider, value] : other.eof_value) eof_value[provider] += value;
}

ProviderEnumerator::ProviderEnumerator(const RegistrySet& registries)
    : providers_(&registries.get(RegistryKind::kEofProvider)) {}

std::string ProviderEnumerator::provider_for(const Address& sender) {
  if (const auto* entry = providers_->find(sender)) return entry->entity;
  auto it = synthetic_.find(sender);
  if (it != synthetic_.end()) return it->second;
  std::string name = "provider#" + std::to_string(synthetic_.size() + 1);
  synthetic_.emplace(sender, name);
  return name;
}

void accumulate_block(BuilderAccumulator& acc, const BlockRecord& block,
                      const labeler::BlockLabels& labels, const BlockEconomics& econ,
                      ProviderEnumerator& providers, Wei dust) {
  acc.builder_id = block.builder_id;
  acc.total_blocks += 1;
  if (econ.excluded) {
    acc.excluded_blocks += 1;
    acc.excluded_value += econ.true_value;
    return;
  }
  if (econ.over_promised == 0 && econ.under_promised == 0) acc.promise_delivered_blocks += 1;
  acc.total_profit += econ.builder_profit;
  if (econ.builder_profit < 0) acc.total_subsidy += -static_cast<WeiSum>(econ.builder_profit);
  acc.total_validator_payment += econ.validator_payment;
  acc.total_relay_payment += econ.relay_payment;
  acc.total_true_value += econ.true_value;
  acc.total_over_promised += econ.over_promised;
  acc.total_under_promised += econ.under_promised;
  if (econ.payment_payer == PayerKind::kRelatedAddress) acc.other_payer_blocks += 1;
  if (econ.profit_margin) {
    acc.margin_sum += *econ.profit_margin;
    acc.margin_blocks += 1;
  }
  switch (classify_profitability(econ, dust)) {
    case Profitability::kProfitable: acc.profitable += 1; break;
    case Profitability::kNeutral: acc.neutral += 1; break;
    case Profitability::kSubsidized: acc.subsidized += 1; break;
  }

  // Composition, packing, and provider attribution all run over
  // non-builder transactions, mirroring the packing rule.
  auto positions = position_split(block);
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    const auto& tx = block.transactions[i];
    if (tx.sender == block.fee_recipient) continue;
    const auto& label = labels.labels[i];
    Wei payment = tx_builder_payment(tx);
    acc.of_value[static_cast<int>(label.order_flow)] += payment;
    acc.transparency_value[static_cast<int>(label.transparency)] += payment;
    if (positions[i]) {
      switch (*positions[i]) {
        case BlockPosition::kToB: acc.tob_value += payment; break;
        case BlockPosition::kBoB: acc.bob_value += payment; break;
        case BlockPosition::kEoB: acc.eob_value += payment; break;
      }
    }
    if (label.transparency != TransparencyLabel::kPublicSignal) {
      acc.eof_value[providers.provider_for(tx.sender)] += payment;
    }
  }
}

namespace {

double share_of(WeiSum part, WeiSum whole) {
  if (whole == 0) return 0.0;
  return static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

std::vector<BuilderProfile> build_profiles(
    const std::map<std::string, BuilderAccumulator>& accs) {
  std::int64_t corpus_blocks = 0;
  for (const auto& [id, acc] : accs) corpus_blocks += acc.total_blocks;

  std::vector<BuilderProfile> out;
  for (const auto& [id, acc] : accs) {
    BuilderProfile p;
    p.builder_id = id;
    p.total_blocks = acc.total_blocks;
    p.excluded_blocks = acc.excluded_blocks;
    p.market_share = corpus_blocks
                         ? static_cast<double>(acc.total_blocks) /
                               static_cast<double>(corpus_blocks)
                         : 0.0;
    p.total_profit = acc.total_profit;
    p.total_subsidy = acc.total_subsidy;
    p.total_validator_payment = acc.total_validator_payment;
    p.total_relay_payment = acc.total_relay_payment;
    p.total_true_value = acc.total_true_value;
    p.total_over_promised = acc.total_over_promised;
    p.total_under_promised = acc.total_under_promised;
    p.profit_margin = acc.total_true_value != 0
                          ? static_cast<double>(acc.total_profit) /
                                static_cast<double>(acc.total_true_value)
                          : 0.0;
    p.profit_margin_mean =
        acc.margin_blocks ? acc.margin_sum / static_cast<double>(acc.margin_blocks) : 0.0;
    std::int64_t classified = acc.profitable + acc.neutral + acc.subsidized;
    if (classified > 0) {
      p.profitable_share = static_cast<double>(acc.profitable) / static_cast<double>(classified);
      p.neutral_share = static_cast<double>(acc.neutral) / static_cast<double>(classified);
      p.subsidized_share =
          static_cast<double>(acc.subsidized) / static_cast<double>(classified);
    }
    std::int64_t non_excluded = acc.total_blocks - acc.excluded_blocks;
    p.other_payer_share = non_excluded ? static_cast<double>(acc.other_payer_blocks) /
                                             static_cast<double>(non_excluded)
                                       : 0.0;
    p.promise_delivered_share =
        non_excluded ? static_cast<double>(acc.promise_delivered_blocks) /
                           static_cast<double>(non_excluded)
                     : 0.0;
    p.excluded_value = acc.excluded_value;

    WeiSum of_total = 0;
    for (auto v : acc.of_value) of_total += v;
    for (int i = 0; i < kOrderFlowLabelCount; ++i) {
      p.of_composition[static_cast<std::size_t>(i)] = share_of(acc.of_value[static_cast<std::size_t>(i)], of_total);
    }
    WeiSum transp_total = 0;
    for (auto v : acc.transparency_value) transp_total += v;
    for (int i = 0; i < 3; ++i) {
      p.transparency_composition[static_cast<std::size_t>(i)] =
          share_of(acc.transparency_value[static_cast<std::size_t>(i)], transp_total);
    }
    if (of_total > 0) {
      p.entropy = shannon_entropy(p.of_composition);
      if (auto m = msof(p.of_composition)) {
        p.msof_label = m->label;
        p.msof_share = m->share;
        p.msof_tie = m->tie;
      }
    }
    WeiSum pos_total = acc.tob_value + acc.bob_value + acc.eob_value;
    p.tob_share = share_of(acc.tob_value, pos_total);
    p.bob_share = share_of(acc.bob_value, pos_total);
    p.eob_share = share_of(acc.eob_value, pos_total);

    WeiSum eof_total = 0;
    for (const auto& [provider, value] : acc.eof_value) eof_total += value;
    for (const auto& [provider, value] : acc.eof_value) {
      p.eof_provider_shares[provider] = share_of(value, eof_total);
    }
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const BuilderProfile& a, const BuilderProfile& b) {
    if (a.total_blocks != b.total_blocks) return a.total_blocks > b.total_blocks;
    return a.builder_id < b.builder_id;
  });
  return out;
}

std::string utc_day(std::int64_t timestamp_seconds) {
  std::time_t t = static_cast<std::time_t>(timestamp_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday);
  return buf;
}

}  // namespace lens::analytics
