#pragma once

#include <cstdint>
#include <string>

namespace lens {

// Per-transaction monetary amounts, in wei. Signed so profit math stays
// closed under subtraction.
using Wei = std::int64_t;

// Corpus-level aggregates overflow 64 bits (1 ETH = 1e18 wei), so sums
// are carried in 128 bits end-to-end.
using WeiSum = __int128;

constexpr Wei kWeiPerEth = 1'000'000'000'000'000'000LL;
constexpr Wei kWeiPerGwei = 1'000'000'000LL;

std::string wei_to_string(WeiSum v);

// Fixed-point decimal ETH string (18-decimal scaling, trailing zeros
// trimmed to `decimals`). Conversion happens only at report emission.
std::string wei_to_eth(WeiSum v, int decimals = 9);

// Parses a base-10 integer (optionally negative). Throws std::invalid_argument.
WeiSum parse_wei(const std::string& s);

}  // namespace lens
