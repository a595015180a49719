#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lens/types.hpp"

namespace lens::ingest {

struct Rejection {
  std::size_t line_number = 0;
  std::string reason;
};

struct LoadReport {
  std::size_t accepted = 0;
  std::vector<Rejection> rejections;

  std::size_t input_lines() const { return accepted + rejections.size(); }
};

// Streaming JSONL block reader: one callback per well-formed block, peak
// memory independent of corpus length. Malformed lines land in the report.
void for_each_block(const std::string& path, const RegistrySet& registries,
                    const std::function<void(BlockRecord&&)>& sink, LoadReport& report);

// Convenience wrapper returning the blocks in slot order.
std::vector<BlockRecord> load_blocks(const std::string& path, const RegistrySet& registries,
                                     LoadReport& report);

// One JSONL line (no trailing newline) in the documented schema.
std::string block_to_jsonl(const BlockRecord& block);

// "unknown:<pubkey prefix>" when the pubkey is not in the registry.
std::string resolve_builder_id(const std::string& pubkey, const RegistrySet& registries);

using VisibilityMap = std::unordered_map<TxHash, std::int64_t>;

VisibilityMap load_mempool_visibility(const std::string& path, LoadReport& report);

// Sets first_seen_mempool on matching transactions; returns the number of
// visibility entries that matched no transaction.
std::size_t join_mempool_visibility(std::vector<BlockRecord>& blocks,
                                    const VisibilityMap& visibility);

Registry load_registry(const std::string& path, RegistryKind kind);

struct PayloadRecord {
  std::int64_t slot = 0;
  std::string builder_pubkey;
  Address fee_recipient;
  Address proposer_fee_recipient;
  Wei value_wei = 0;
};

std::vector<PayloadRecord> load_payloads(const std::string& path, LoadReport& report);

// Joins proposer_fee_recipient and relay_reported_value onto blocks by slot.
void join_payloads(std::vector<BlockRecord>& blocks, const std::vector<PayloadRecord>& payloads);

std::vector<BidRecord> load_bids(const std::string& path, const RegistrySet& registries,
                                 LoadReport& report);

}  // namespace lens::ingest
