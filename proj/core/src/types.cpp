#include "lens/types.hpp"

namespace lens {

const char* to_string(RegistryKind kind) {
  switch (kind) {
    case RegistryKind::kCexDeposit: return "cex_deposit";
    case RegistryKind::kTelegramBot: return "telegram_bot";
    case RegistryKind::kSolverRouter: return "solver_router";
    case RegistryKind::kKnownRouter: return "known_router";
    case RegistryKind::kNonMevContract: return "non_mev_contract";
    case RegistryKind::kSearcher: return "searcher";
    case RegistryKind::kMevLabel: return "mev_label";
    case RegistryKind::kBuilderPubkey: return "builder_pubkey";
    case RegistryKind::kEofProvider: return "eof_provider";
    case RegistryKind::kOfaRefundAddress: return "ofa_refund_address";
    case RegistryKind::kRelayFeeAddress: return "relay_fee_address";
  }
  return "?";
}

std::optional<RegistryKind> registry_kind_from_string(const std::string& s) {
  static const std::map<std::string, RegistryKind> lut = {
      {"cex_deposit", RegistryKind::kCexDeposit},
      {"telegram_bot", RegistryKind::kTelegramBot},
      {"solver_router", RegistryKind::kSolverRouter},
      {"known_router", RegistryKind::kKnownRouter},
      {"non_mev_contract", RegistryKind::kNonMevContract},
      {"searcher", RegistryKind::kSearcher},
      {"mev_label", RegistryKind::kMevLabel},
      {"builder_pubkey", RegistryKind::kBuilderPubkey},
      {"eof_provider", RegistryKind::kEofProvider},
      {"ofa_refund_address", RegistryKind::kOfaRefundAddress},
      {"relay_fee_address", RegistryKind::kRelayFeeAddress},
  };
  auto it = lut.find(s);
  if (it == lut.end()) return std::nullopt;
  return it->second;
}

const char* to_string(TransparencyLabel label) {
  switch (label) {
    case TransparencyLabel::kPublicSignal: return "public_signal";
    case TransparencyLabel::kExclusiveSignal: return "exclusive_signal";
    case TransparencyLabel::kOfaBundle: return "ofa_bundle";
  }
  return "?";
}

const char* to_string(OrderFlowLabel label) {
  switch (label) {
    case OrderFlowLabel::kAtomicArb: return "atomic_arb";
    case OrderFlowLabel::kNonAtomicArb: return "non_atomic_arb";
    case OrderFlowLabel::kSandwich: return "sandwich";
    case OrderFlowLabel::kLiquidation: return "liquidation";
    case OrderFlowLabel::kTelegramBot: return "telegram_bot";
    case OrderFlowLabel::kSolverModel: return "solver_model";
    case OrderFlowLabel::kCexDeposit: return "cex_deposit";
    case OrderFlowLabel::kRetailSwap: return "retail_swap";
    case OrderFlowLabel::kBotSwap: return "bot_swap";
    case OrderFlowLabel::kOfaBackrun: return "ofa_backrun";
    case OrderFlowLabel::kOtherPublic: return "other_public";
    case OrderFlowLabel::kOtherExclusive: return "other_exclusive";
  }
  return "?";
}

std::optional<TransparencyLabel> transparency_from_string(const std::string& s) {
  for (auto l : {TransparencyLabel::kPublicSignal, TransparencyLabel::kExclusiveSignal,
                 TransparencyLabel::kOfaBundle}) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

std::optional<OrderFlowLabel> order_flow_from_string(const std::string& s) {
  for (int i = 0; i < kOrderFlowLabelCount; ++i) {
    auto l = static_cast<OrderFlowLabel>(i);
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

const char* to_string(OfaBundleKind kind) {
  switch (kind) {
    case OfaBundleKind::kCowswapMevblocker: return "cowswap_mevblocker";
    case OfaBundleKind::kMatchingAddress: return "matching_address";
    case OfaBundleKind::kMevShare: return "mev_share";
  }
  return "?";
}

const char* to_string(PayerKind payer) {
  switch (payer) {
    case PayerKind::kBuilder: return "builder";
    case PayerKind::kRelatedAddress: return "related_address";
    case PayerKind::kNone: return "none";
  }
  return "?";
}

}  // namespace lens
