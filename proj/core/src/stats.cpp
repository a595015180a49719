#include "lens/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace lens::stats {

std::vector<double> fractional_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Lentz continued fraction for the incomplete beta (NR-style).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  if (dx == 0.0 || dy == 0.0) throw std::invalid_argument("zero-variance input");
  return num / std::sqrt(dx * dy);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(ln_front) * betacf(a, b, x) / a;
  }
  return 1.0 - std::exp(ln_front) * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  double x = dof / (dof + t * t);
  return regularized_incomplete_beta(dof / 2.0, 0.5, x);
}

CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y,
                           double alpha, PValueMode mode) {
  if (x.size() != y.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("spearman requires n >= 3");
  auto rx = fractional_ranks(x);
  auto ry = fractional_ranks(y);
  double rho = pearson(rx, ry);
  // guard against 1 + eps from rounding
  rho = std::clamp(rho, -1.0, 1.0);

  CorrelationResult out;
  out.coefficient = rho;
  out.n = n;
  if (mode == PValueMode::kExactPermutation) {
    if (n > 10) throw std::invalid_argument("exact permutation limited to n <= 10");
    std::vector<double> perm = ry;
    std::sort(perm.begin(), perm.end());
    std::size_t total = 0, at_least = 0;
    double target = std::fabs(rho) - 1e-12;
    do {
      ++total;
      double r = pearson(rx, perm);
      if (std::fabs(r) >= target) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.p_value = static_cast<double>(at_least) / static_cast<double>(total);
  } else {
    double dof = static_cast<double>(n - 2);
    if (std::fabs(rho) >= 1.0) {
      out.p_value = 0.0;
    } else {
      double t = rho * std::sqrt(dof / (1.0 - rho * rho));
      out.p_value = student_t_two_sided_p(t, dof);
    }
  }
  out.significant = out.p_value < alpha;
  return out;
}

ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& table) {
  double row0 = table[0][0] + table[0][1];
  double row1 = table[1][0] + table[1][1];
  double col0 = table[0][0] + table[1][0];
  double col1 = table[0][1] + table[1][1];
  double total = row0 + row1;
  if (row0 <= 0 || row1 <= 0 || col0 <= 0 || col1 <= 0) {
    throw std::invalid_argument("zero marginal in 2x2 table");
  }
  double stat = 0.0;
  const double rows[2] = {row0, row1};
  const double cols[2] = {col0, col1};
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      double expected = rows[r] * cols[c] / total;
      double diff = table[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] - expected;
      stat += diff * diff / expected;
    }
  }
  // chi-square with 1 dof: survival = erfc(sqrt(x/2))
  double p = std::erfc(std::sqrt(stat / 2.0));
  return {stat, p};
}

double binomial_threshold(std::size_t n, double chance, double alpha) {
  if (n < 1 || chance <= 0.0 || chance >= 1.0 || alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("binomial_threshold parameter out of range");
  }
  double log_p = std::log(chance);
  double log_q = std::log1p(-chance);
  double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  // upper tails via log-sum-exp, from k = n downward
  std::vector<double> tail(n + 2, 0.0);
  tail[n + 1] = 0.0;
  double log_tail = -std::numeric_limits<double>::infinity();
  for (std::size_t k = n + 1; k-- > 0;) {
    double kk = static_cast<double>(k);
    double log_pmf = log_n_fact - std::lgamma(kk + 1.0) -
                     std::lgamma(static_cast<double>(n) - kk + 1.0) + kk * log_p +
                     (static_cast<double>(n) - kk) * log_q;
    double hi = std::max(log_tail, log_pmf);
    log_tail = hi + std::log(std::exp(log_tail - hi) + std::exp(log_pmf - hi));
    tail[k] = std::exp(std::min(log_tail, 0.0));
  }
  for (std::size_t k = 0; k <= n; ++k) {
    if (tail[k] < alpha) return static_cast<double>(k) / static_cast<double>(n);
  }
  // even k = n is not rare enough at this alpha
  return static_cast<double>(n + 1) / static_cast<double>(n);
}

std::optional<DecodingResult> lda_decoding_accuracy(const std::vector<double>& feature,
                                                    const std::vector<int>& target,
                                                    std::size_t folds, std::uint64_t seed,
                                                    double alpha) {
  if (feature.size() != target.size()) throw std::invalid_argument("length mismatch");
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  std::vector<std::size_t> class0, class1;
  for (std::size_t i = 0; i < target.size(); ++i) {
    (target[i] ? class1 : class0).push_back(i);
  }
  // balance to chance level 0.5 by subsampling the majority class
  std::mt19937_64 rng(seed);
  auto subsample = [&](std::vector<std::size_t>& major, std::size_t size) {
    std::shuffle(major.begin(), major.end(), rng);
    major.resize(size);
    std::sort(major.begin(), major.end());
  };
  if (class0.size() > class1.size()) {
    subsample(class0, class1.size());
  } else if (class1.size() > class0.size()) {
    subsample(class1, class0.size());
  }
  if (class0.size() < 2 * folds || class1.size() < 2 * folds) return std::nullopt;

  // Significance additionally requires the builder's blocks to carry MORE
  // of the provider's flow than the rest; a provider the builder lacks is
  // separable but not an access edge.
  double overall_m0 = 0.0, overall_m1 = 0.0;
  for (auto i : class0) overall_m0 += feature[i];
  for (auto i : class1) overall_m1 += feature[i];
  overall_m0 /= static_cast<double>(class0.size());
  overall_m1 /= static_cast<double>(class1.size());

  // stratified round-robin fold assignment keeps the protocol symmetric
  // under class swap
  auto fold_of = [&](const std::vector<std::size_t>& cls, std::size_t pos) {
    (void)cls;
    return pos % folds;
  };

  double accuracy_sum = 0.0;
  std::size_t held_out_total = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    double m0 = 0.0, m1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (std::size_t pos = 0; pos < class0.size(); ++pos) {
      if (fold_of(class0, pos) != f) {
        m0 += feature[class0[pos]];
        ++n0;
      }
    }
    for (std::size_t pos = 0; pos < class1.size(); ++pos) {
      if (fold_of(class1, pos) != f) {
        m1 += feature[class1[pos]];
        ++n1;
      }
    }
    m0 /= static_cast<double>(n0);
    m1 /= static_cast<double>(n1);
    double midpoint = (m0 + m1) / 2.0;
    double direction = m1 - m0;

    std::size_t correct = 0, held = 0;
    auto classify = [&](double x, int truth) {
      double score = (x - midpoint) * direction;
      int predicted = score > 0 ? 1 : 0;
      if (predicted == truth) ++correct;
      ++held;
    };
    for (std::size_t pos = 0; pos < class0.size(); ++pos) {
      if (fold_of(class0, pos) == f) classify(feature[class0[pos]], 0);
    }
    for (std::size_t pos = 0; pos < class1.size(); ++pos) {
      if (fold_of(class1, pos) == f) classify(feature[class1[pos]], 1);
    }
    accuracy_sum += static_cast<double>(correct) / static_cast<double>(held);
    held_out_total += held;
  }

  DecodingResult out;
  out.decoding_accuracy = accuracy_sum / static_cast<double>(folds);
  out.threshold = binomial_threshold(held_out_total, 0.5, alpha);
  out.class0_mean = overall_m0;
  out.class1_mean = overall_m1;
  out.significant = out.decoding_accuracy > out.threshold && overall_m1 > overall_m0;
  out.held_out = held_out_total;
  return out;
}

std::vector<std::pair<std::string, std::string>> exclusive_providers(
    const std::vector<DecodingResult>& matrix) {
  std::map<std::string, std::vector<std::string>> significant_for;
  for (const auto& cell : matrix) {
    if (cell.significant) significant_for[cell.provider_id].push_back(cell.builder_id);
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [provider, builders] : significant_for) {
    if (builders.size() == 1) out.emplace_back(provider, builders.front());
  }
  return out;
}

std::vector<FeatureCorrelation> feature_correlations(const std::vector<double>& market_share,
                                                     const std::vector<double>& profit_margin,
                                                     const std::vector<NamedVector>& features,
                                                     double alpha) {
  std::vector<FeatureCorrelation> out;
  for (const auto& feature : features) {
    out.push_back({"market_share", feature.name, spearman(feature.values, market_share, alpha)});
    out.push_back({"profit_margin", feature.name, spearman(feature.values, profit_margin, alpha)});
  }
  return out;
}

}  // namespace lens::stats
