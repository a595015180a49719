#include "lens/wei.hpp"

#include <algorithm>
#include <stdexcept>

namespace lens {

std::string wei_to_string(WeiSum v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

std::string wei_to_eth(WeiSum v, int decimals) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  unsigned __int128 whole = u / static_cast<unsigned __int128>(kWeiPerEth);
  unsigned __int128 frac = u % static_cast<unsigned __int128>(kWeiPerEth);
  std::string frac_s(18, '0');
  for (int i = 17; i >= 0; --i) {
    frac_s[static_cast<size_t>(i)] = static_cast<char>('0' + static_cast<int>(frac % 10));
    frac /= 10;
  }
  if (decimals < 0) decimals = 0;
  if (decimals > 18) decimals = 18;
  frac_s.resize(static_cast<size_t>(decimals));
  while (!frac_s.empty() && frac_s.back() == '0') frac_s.pop_back();
  std::string out = neg ? "-" : "";
  out += wei_to_string(static_cast<WeiSum>(whole));
  if (!frac_s.empty()) out += "." + frac_s;
  if (out == "-0") out = "0";  // magnitude below the printed resolution
  return out;
}

WeiSum parse_wei(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty wei value");
  size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw std::invalid_argument("malformed wei value: " + s);
  WeiSum v = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("malformed wei value: " + s);
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

}  // namespace lens
