#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lens/types.hpp"

namespace lens::stats {

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool significant = false;  // p_value < alpha
};

// Fractional (average) ranks, ties share the mean of their positions.
std::vector<double> fractional_ranks(const std::vector<double>& v);

// Two-sided p of a Student-t statistic with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

enum class PValueMode { kTApproximation, kExactPermutation };

// Spearman rank correlation; throws on length mismatch, n < 3, or
// zero-variance input. Exact permutation mode is limited to n <= 10.
CorrelationResult spearman(const std::vector<double>& x, const std::vector<double>& y,
                           double alpha = 0.05,
                           PValueMode mode = PValueMode::kTApproximation);

// Pearson's chi-square on a 2x2 table, 1 degree of freedom; throws on a
// zero marginal.
struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

ChiSquareResult chi_square_2x2(const std::array<std::array<double, 2>, 2>& table);

// Smallest k/n with P(X >= k) < alpha under Binomial(n, chance); exact
// log-space summation.
double binomial_threshold(std::size_t n, double chance, double alpha);

struct DecodingResult {
  std::string builder_id;
  std::string provider_id;
  double decoding_accuracy = 0.0;
  double threshold = 1.0;
  bool significant = false;
  std::size_t held_out = 0;   // total held-out samples across folds
  double class0_mean = 0.0;   // feature mean over the balanced rest class
  double class1_mean = 0.0;   // feature mean over the builder's blocks
};

// 1-D two-class LDA with balanced classes (seeded majority subsampling)
// and k-fold stratified cross-validation. Returns nullopt when either
// class has fewer than 2k samples.
std::optional<DecodingResult> lda_decoding_accuracy(const std::vector<double>& feature,
                                                    const std::vector<int>& target,
                                                    std::size_t folds, std::uint64_t seed,
                                                    double alpha = 0.05);

// Providers whose significant set has cardinality exactly one.
std::vector<std::pair<std::string, std::string>> exclusive_providers(
    const std::vector<DecodingResult>& matrix);

struct FeatureCorrelation {
  std::string target;  // "market_share" or "profit_margin"
  std::string feature;
  CorrelationResult result;
};

struct NamedVector {
  std::string name;
  std::vector<double> values;
};

// Spearman of every feature against both targets; entries are emitted for
// all features, with `significant` flagging p < alpha.
std::vector<FeatureCorrelation> feature_correlations(const std::vector<double>& market_share,
                                                     const std::vector<double>& profit_margin,
                                                     const std::vector<NamedVector>& features,
                                                     double alpha = 0.05);

}  // namespace lens::stats
