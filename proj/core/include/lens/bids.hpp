#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lens/types.hpp"

namespace lens::bids {

enum class CancellationMode { kBelowRunningMax, kBelowPreviousBid };

struct SlotBidBook {
  std::int64_t slot = 0;
  std::int64_t genesis_time = 0;  // seconds
  // Bids from multiple pubkeys of one builder are merged into one
  // per-builder stream, time-sorted.
  std::map<std::string, std::vector<BidRecord>> bids_by_builder;
  std::optional<BidRecord> winning_bid;
};

std::vector<SlotBidBook> build_bid_books(const std::vector<BidRecord>& bids,
                                         std::int64_t genesis_time);

struct BuilderSlotStats {
  std::size_t bid_count = 0;
  std::optional<double> update_lag_ms;  // absent for a single bid
  std::size_t cancellations = 0;
};

std::map<std::string, BuilderSlotStats> bid_stats(
    const SlotBidBook& book, CancellationMode mode = CancellationMode::kBelowRunningMax);

// Winning bid's receipt time relative to slot start (genesis + slot * 12 s);
// may be negative.
std::optional<double> winner_time_ms(const SlotBidBook& book);

// Per-builder aggregates over all slots (bid-behaviour table shape). The merge is
// associative and commutative, so results are slot-order independent.
struct BuilderBidProfile {
  std::string builder_id;
  std::int64_t blocks_won = 0;
  std::size_t total_bids = 0;
  std::size_t slots_bid = 0;
  double lag_sum_ms = 0.0;
  std::size_t lag_slots = 0;
  std::size_t total_cancellations = 0;
  double winner_time_sum_ms = 0.0;

  double avg_bids() const {
    return slots_bid ? static_cast<double>(total_bids) / static_cast<double>(slots_bid) : 0.0;
  }
  double avg_update_lag_ms() const {
    return lag_slots ? lag_sum_ms / static_cast<double>(lag_slots) : 0.0;
  }
  double avg_winner_time_ms() const {
    return blocks_won ? winner_time_sum_ms / static_cast<double>(blocks_won) : 0.0;
  }
  double avg_cancellations() const {
    return blocks_won ? static_cast<double>(total_cancellations) / static_cast<double>(blocks_won)
                      : 0.0;
  }
};

std::map<std::string, BuilderBidProfile> aggregate_bid_profiles(
    const std::vector<SlotBidBook>& books,
    CancellationMode mode = CancellationMode::kBelowRunningMax);

}  // namespace lens::bids
