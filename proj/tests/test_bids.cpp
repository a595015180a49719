#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lens/bids.hpp"

using namespace lens;

namespace {

BidRecord bid(std::int64_t slot, const std::string& pubkey, const std::string& id,
              std::int64_t received_at, Wei value, bool won = false) {
  BidRecord b;
  b.slot = slot;
  b.builder_pubkey = pubkey;
  b.builder_id = id;
  b.received_at = received_at;
  b.value = value;
  b.won = won;
  return b;
}

}  // namespace

TEST_CASE("bid books merge pubkeys of one builder and sort by time") {
  std::int64_t genesis = 1'700'000'000;
  std::int64_t slot_start_ms = (genesis + 100 * 12) * 1000;
  std::vector<BidRecord> bids{
      bid(100, "0xk2", "acme", slot_start_ms + 300, 50),
      bid(100, "0xk1", "acme", slot_start_ms + 100, 10),
      bid(100, "0xk1", "acme", slot_start_ms + 500, 90, true),
      bid(100, "0xz1", "zenith", slot_start_ms + 200, 70),
  };
  auto books = bids::build_bid_books(bids, genesis);
  REQUIRE(books.size() == 1);
  const auto& book = books[0];
  REQUIRE(book.bids_by_builder.count("acme"));
  const auto& acme = book.bids_by_builder.at("acme");
  REQUIRE(acme.size() == 3);  // both pubkeys merged
  CHECK(acme[0].received_at <= acme[1].received_at);
  CHECK(acme[1].received_at <= acme[2].received_at);
  REQUIRE(book.winning_bid.has_value());
  CHECK(book.winning_bid->builder_id == "acme");
  CHECK(bids::winner_time_ms(book) == doctest::Approx(500.0));
}

TEST_CASE("cancellations count bids below the running maximum") {
  std::int64_t genesis = 0;
  std::vector<BidRecord> stream{
      bid(1, "0xk", "acme", 1000, 10),
      bid(1, "0xk", "acme", 1100, 30),
      bid(1, "0xk", "acme", 1200, 20),  // below max 30: cancellation
      bid(1, "0xk", "acme", 1300, 25),  // still below 30: cancellation
      bid(1, "0xk", "acme", 1400, 40),
  };
  auto books = bids::build_bid_books(stream, genesis);
  REQUIRE(books.size() == 1);
  auto stats_by_builder = bids::bid_stats(books[0]);
  REQUIRE(stats_by_builder.count("acme"));
  const auto& s = stats_by_builder.at("acme");
  CHECK(s.bid_count == 5);
  CHECK(s.cancellations == 2);
  REQUIRE(s.update_lag_ms.has_value());
  CHECK(*s.update_lag_ms == doctest::Approx(100.0));  // evenly spaced

  // alternative definition: below the immediately previous bid
  auto alt = bids::bid_stats(books[0], bids::CancellationMode::kBelowPreviousBid);
  CHECK(alt.at("acme").cancellations == 1);  // only 30 -> 20 drops
}

TEST_CASE("single bid has no update lag") {
  auto books = bids::build_bid_books({bid(5, "0xk", "acme", 777, 1)}, 0);
  auto s = bids::bid_stats(books[0]);
  CHECK_FALSE(s.at("acme").update_lag_ms.has_value());
}

TEST_CASE("profile aggregation is slot-order independent") {
  std::vector<BidRecord> stream;
  for (std::int64_t slot : {3, 1, 2}) {
    for (int k = 0; k < 4; ++k) {
      stream.push_back(bid(slot, "0xk", "acme", slot * 12000 + k * 100, (k + 1) * 10,
                           k == 3));
    }
  }
  auto books = bids::build_bid_books(stream, 0);
  auto profiles = bids::aggregate_bid_profiles(books);
  REQUIRE(profiles.count("acme"));
  const auto& p = profiles.at("acme");
  CHECK(p.blocks_won == 3);
  CHECK(p.slots_bid == 3);
  CHECK(p.total_bids == 12);
  CHECK(p.avg_bids() == doctest::Approx(4.0));
  CHECK(p.avg_update_lag_ms() == doctest::Approx(100.0));
  CHECK(p.total_cancellations == 0);
}
