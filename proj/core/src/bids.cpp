#include "lens/bids.hpp"

#include <algorithm>

namespace lens::bids {

std::vector<SlotBidBook> build_bid_books(const std::vector<BidRecord>& bids,
                                         std::int64_t genesis_time) {
  std::map<std::int64_t, SlotBidBook> by_slot;
  for (const auto& bid : bids) {
    auto& book = by_slot[bid.slot];
    book.slot = bid.slot;
    book.genesis_time = genesis_time;
    book.bids_by_builder[bid.builder_id].push_back(bid);
    if (bid.won) book.winning_bid = bid;
  }
  std::vector<SlotBidBook> out;
  out.reserve(by_slot.size());
  for (auto& [slot, book] : by_slot) {
    for (auto& [builder, stream] : book.bids_by_builder) {
      std::stable_sort(stream.begin(), stream.end(),
                       [](const BidRecord& a, const BidRecord& b) {
                         return a.received_at < b.received_at;
                       });
    }
    out.push_back(std::move(book));
  }
  return out;
}

namespace {

std::size_t count_cancellations(const std::vector<BidRecord>& stream, CancellationMode mode) {
  std::size_t cancels = 0;
  Wei running_max = 0;
  Wei previous = 0;
  bool any = false;
  for (const auto& bid : stream) {
    if (any) {
      Wei baseline = mode == CancellationMode::kBelowRunningMax ? running_max : previous;
      if (bid.value < baseline) ++cancels;
    }
    running_max = std::max(running_max, bid.value);
    previous = bid.value;
    any = true;
  }
  return cancels;
}

}  // namespace

std::map<std::string, BuilderSlotStats> bid_stats(const SlotBidBook& book,
                                                  CancellationMode mode) {
  std::map<std::string, BuilderSlotStats> out;
  for (const auto& [builder, stream] : book.bids_by_builder) {
    BuilderSlotStats stats;
    stats.bid_count = stream.size();
    if (stream.size() >= 2) {
      double lag_sum = 0.0;
      for (std::size_t i = 1; i < stream.size(); ++i) {
        lag_sum += static_cast<double>(stream[i].received_at - stream[i - 1].received_at);
      }
      stats.update_lag_ms = lag_sum / static_cast<double>(stream.size() - 1);
    }
    stats.cancellations = count_cancellations(stream, mode);
    out[builder] = stats;
  }
  return out;
}

std::optional<double> winner_time_ms(const SlotBidBook& book) {
  if (!book.winning_bid) return std::nullopt;
  std::int64_t slot_start_ms = (book.genesis_time + book.slot * 12) * 1000;
  return static_cast<double>(book.winning_bid->received_at - slot_start_ms);
}

std::map<std::string, BuilderBidProfile> aggregate_bid_profiles(
    const std::vector<SlotBidBook>& books, CancellationMode mode) {
  std::map<std::string, BuilderBidProfile> out;
  for (const auto& book : books) {
    auto slot_stats = bid_stats(book, mode);
    auto wt = winner_time_ms(book);
    for (const auto& [builder, stats] : slot_stats) {
      auto& profile = out[builder];
      profile.builder_id = builder;
      profile.total_bids += stats.bid_count;
      profile.slots_bid += 1;
      if (stats.update_lag_ms) {
        profile.lag_sum_ms += *stats.update_lag_ms;
        profile.lag_slots += 1;
      }
      if (book.winning_bid && book.winning_bid->builder_id == builder) {
        profile.blocks_won += 1;
        profile.total_cancellations += stats.cancellations;
        if (wt) profile.winner_time_sum_ms += *wt;
      }
    }
  }
  return out;
}

}  // namespace lens::bids
