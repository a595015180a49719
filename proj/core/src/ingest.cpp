#include "lens/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lens/csv.hpp"

namespace lens::ingest {

using nlohmann::json;

namespace {

std::string lowercase(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

template <typename T>
T require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) throw std::runtime_error(std::string("missing field '") + field + "'");
  return it->template get<T>();
}

TransactionRecord parse_transaction(const json& jt) {
  TransactionRecord tx;
  tx.hash = lowercase(require<std::string>(jt, "hash"));
  tx.block_index = require<std::uint32_t>(jt, "block_index");
  tx.sender = lowercase(require<std::string>(jt, "sender"));
  if (jt.contains("recipient") && !jt["recipient"].is_null()) {
    tx.recipient = lowercase(jt["recipient"].get<std::string>());
  }
  auto status = require<std::string>(jt, "status");
  if (status == "success") {
    tx.status = TxStatus::kSuccess;
  } else if (status == "failed") {
    tx.status = TxStatus::kFailed;
  } else {
    throw std::runtime_error("bad status '" + status + "'");
  }
  tx.gas_used = require<std::int64_t>(jt, "gas_used");
  tx.priority_fee_per_gas = require<Wei>(jt, "priority_fee_per_gas");
  tx.tip_total = require<Wei>(jt, "tip_total");
  tx.coinbase_transfer = require<Wei>(jt, "coinbase_transfer");
  tx.value = require<Wei>(jt, "value");
  tx.erc20_transfer_count = require<std::uint32_t>(jt, "erc20_transfers");
  tx.swap_count = require<std::uint32_t>(jt, "swaps");
  if (jt.contains("swap_legs")) {
    for (const auto& leg : jt["swap_legs"]) {
      tx.swap_pool_directions.push_back(
          {require<std::string>(leg, "pool"), require<int>(leg, "dir")});
    }
  }
  if (tx.tip_total < 0 || tx.coinbase_transfer < 0 || tx.value < 0) {
    throw std::runtime_error("negative monetary field on " + tx.hash);
  }
  return tx;
}

BlockRecord parse_block_line(const std::string& line, const RegistrySet& registries) {
  json jb = json::parse(line);
  BlockRecord block;
  block.slot = require<std::int64_t>(jb, "slot");
  block.block_number = require<std::int64_t>(jb, "block_number");
  block.builder_pubkey = lowercase(require<std::string>(jb, "builder_pubkey"));
  block.fee_recipient = lowercase(require<std::string>(jb, "fee_recipient"));
  if (jb.contains("proposer_fee_recipient")) {
    block.proposer_fee_recipient = lowercase(jb["proposer_fee_recipient"].get<std::string>());
  }
  if (jb.contains("relay_reported_value")) {
    block.relay_reported_value = jb["relay_reported_value"].get<Wei>();
  }
  block.timestamp = require<std::int64_t>(jb, "timestamp");
  block.builder_id = resolve_builder_id(block.builder_pubkey, registries);
  auto it = jb.find("transactions");
  if (it == jb.end()) throw std::runtime_error("missing field 'transactions'");
  for (const auto& jt : *it) block.transactions.push_back(parse_transaction(jt));
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if (block.transactions[i].block_index != i) {
      throw std::runtime_error("transactions not contiguous from 0 in slot " +
                               std::to_string(block.slot));
    }
  }
  return block;
}

}  // namespace

std::string resolve_builder_id(const std::string& pubkey, const RegistrySet& registries) {
  const auto* entry = registries.get(RegistryKind::kBuilderPubkey).find(lowercase(pubkey));
  if (entry) return entry->entity;
  // keep a stable prefix so distinct unknown keys stay distinct
  std::string prefix = pubkey.substr(0, std::min<std::size_t>(pubkey.size(), 12));
  return "unknown:" + prefix;
}

void for_each_block(const std::string& path, const RegistrySet& registries,
                    const std::function<void(BlockRecord&&)>& sink, LoadReport& report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      sink(parse_block_line(line, registries));
      ++report.accepted;
    } catch (const std::exception& e) {
      report.rejections.push_back({line_number, e.what()});
    }
  }
}

std::vector<BlockRecord> load_blocks(const std::string& path, const RegistrySet& registries,
                                     LoadReport& report) {
  std::vector<BlockRecord> blocks;
  for_each_block(path, registries, [&](BlockRecord&& b) { blocks.push_back(std::move(b)); },
                 report);
  std::stable_sort(blocks.begin(), blocks.end(),
                   [](const BlockRecord& a, const BlockRecord& b) { return a.slot < b.slot; });
  return blocks;
}

std::string block_to_jsonl(const BlockRecord& block) {
  json jb;
  jb["slot"] = block.slot;
  jb["block_number"] = block.block_number;
  jb["builder_pubkey"] = block.builder_pubkey;
  jb["fee_recipient"] = block.fee_recipient;
  jb["proposer_fee_recipient"] = block.proposer_fee_recipient;
  jb["relay_reported_value"] = block.relay_reported_value;
  jb["timestamp"] = block.timestamp;
  jb["transactions"] = json::array();
  for (const auto& tx : block.transactions) {
    json jt;
    jt["hash"] = tx.hash;
    jt["block_index"] = tx.block_index;
    jt["sender"] = tx.sender;
    if (tx.recipient) {
      jt["recipient"] = *tx.recipient;
    } else {
      jt["recipient"] = nullptr;
    }
    jt["status"] = tx.status == TxStatus::kSuccess ? "success" : "failed";
    jt["gas_used"] = tx.gas_used;
    jt["priority_fee_per_gas"] = tx.priority_fee_per_gas;
    jt["tip_total"] = tx.tip_total;
    jt["coinbase_transfer"] = tx.coinbase_transfer;
    jt["value"] = tx.value;
    jt["erc20_transfers"] = tx.erc20_transfer_count;
    jt["swaps"] = tx.swap_count;
    if (!tx.swap_pool_directions.empty()) {
      jt["swap_legs"] = json::array();
      for (const auto& leg : tx.swap_pool_directions) {
        jt["swap_legs"].push_back({{"pool", leg.pool}, {"dir", leg.direction}});
      }
    }
    jb["transactions"].push_back(std::move(jt));
  }
  return jb.dump();
}

VisibilityMap load_mempool_visibility(const std::string& path, LoadReport& report) {
  csv::Reader reader(path);
  auto hash_col = reader.column("hash");
  auto seen_col = reader.column("first_seen_ms");
  VisibilityMap map;
  while (auto row = reader.next()) {
    if (row->fields.size() <= std::max(hash_col, seen_col)) {
      report.rejections.push_back({row->line_number, "too few columns"});
      continue;
    }
    try {
      map[lowercase(row->fields[hash_col])] = std::stoll(row->fields[seen_col]);
      ++report.accepted;
    } catch (const std::exception&) {
      report.rejections.push_back({row->line_number, "bad timestamp"});
    }
  }
  return map;
}

std::size_t join_mempool_visibility(std::vector<BlockRecord>& blocks,
                                    const VisibilityMap& visibility) {
  std::size_t matched = 0;
  for (auto& block : blocks) {
    for (auto& tx : block.transactions) {
      auto it = visibility.find(tx.hash);
      if (it != visibility.end()) {
        tx.first_seen_mempool = it->second;
        ++matched;
      } else {
        tx.first_seen_mempool.reset();
      }
    }
  }
  return visibility.size() - std::min(matched, visibility.size());
}

Registry load_registry(const std::string& path, RegistryKind kind) {
  csv::Reader reader(path);
  auto addr_col = reader.column(kind == RegistryKind::kMevLabel ? "txhash" : "address");
  auto entity_col = reader.column("entity");
  auto sub_col = reader.column("sub_label");
  Registry reg;
  reg.kind = kind;
  while (auto row = reader.next()) {
    if (row->fields.size() <= std::max({addr_col, entity_col, sub_col})) {
      throw std::runtime_error("registry row with too few columns at line " +
                               std::to_string(row->line_number));
    }
    std::string key = lowercase(row->fields[addr_col]);
    RegistryEntry entry{row->fields[entity_col], row->fields[sub_col]};
    auto [it, inserted] = reg.entries.emplace(key, entry);
    if (!inserted && it->second.entity != entry.entity) {
      throw std::runtime_error("conflicting registry entries for " + key + ": '" +
                               it->second.entity + "' vs '" + entry.entity + "'");
    }
  }
  if (reg.entries.empty()) throw std::runtime_error("empty registry: " + path);
  return reg;
}

std::vector<PayloadRecord> load_payloads(const std::string& path, LoadReport& report) {
  csv::Reader reader(path);
  auto slot_col = reader.column("slot");
  auto pk_col = reader.column("builder_pubkey");
  auto fr_col = reader.column("fee_recipient");
  auto pfr_col = reader.column("proposer_fee_recipient");
  auto val_col = reader.column("value_wei");
  std::vector<PayloadRecord> out;
  while (auto row = reader.next()) {
    try {
      PayloadRecord rec;
      rec.slot = std::stoll(row->fields.at(slot_col));
      rec.builder_pubkey = lowercase(row->fields.at(pk_col));
      rec.fee_recipient = lowercase(row->fields.at(fr_col));
      rec.proposer_fee_recipient = lowercase(row->fields.at(pfr_col));
      rec.value_wei = static_cast<Wei>(std::stoll(row->fields.at(val_col)));
      out.push_back(std::move(rec));
      ++report.accepted;
    } catch (const std::exception&) {
      report.rejections.push_back({row->line_number, "malformed payload row"});
    }
  }
  return out;
}

void join_payloads(std::vector<BlockRecord>& blocks, const std::vector<PayloadRecord>& payloads) {
  std::unordered_map<std::int64_t, const PayloadRecord*> by_slot;
  for (const auto& p : payloads) by_slot[p.slot] = &p;
  for (auto& block : blocks) {
    auto it = by_slot.find(block.slot);
    if (it != by_slot.end()) {
      block.proposer_fee_recipient = it->second->proposer_fee_recipient;
      block.relay_reported_value = it->second->value_wei;
    }
  }
}

std::vector<BidRecord> load_bids(const std::string& path, const RegistrySet& registries,
                                 LoadReport& report) {
  csv::Reader reader(path);
  auto slot_col = reader.column("slot");
  auto pk_col = reader.column("builder_pubkey");
  auto at_col = reader.column("received_at_ms");
  auto val_col = reader.column("value_wei");
  auto won_col = reader.column("won");
  std::vector<BidRecord> out;
  std::unordered_map<std::int64_t, std::size_t> winners_per_slot;
  while (auto row = reader.next()) {
    try {
      BidRecord bid;
      bid.slot = std::stoll(row->fields.at(slot_col));
      bid.builder_pubkey = lowercase(row->fields.at(pk_col));
      bid.builder_id = resolve_builder_id(bid.builder_pubkey, registries);
      bid.received_at = std::stoll(row->fields.at(at_col));
      bid.value = static_cast<Wei>(std::stoll(row->fields.at(val_col)));
      if (bid.value < 0) throw std::runtime_error("negative bid value");
      const auto& won = row->fields.at(won_col);
      bid.won = won == "1" || won == "true";
      if (bid.won && ++winners_per_slot[bid.slot] > 1) {
        throw std::runtime_error("multiple winning bids in slot " + std::to_string(bid.slot));
      }
      out.push_back(std::move(bid));
      ++report.accepted;
    } catch (const std::runtime_error& e) {
      // invariant violations are fatal, not per-row rejections
      if (std::string(e.what()).find("multiple winning bids") != std::string::npos) throw;
      report.rejections.push_back({row->line_number, e.what()});
    } catch (const std::exception&) {
      report.rejections.push_back({row->line_number, "malformed bid row"});
    }
  }
  return out;
}

}  // namespace lens::ingest
