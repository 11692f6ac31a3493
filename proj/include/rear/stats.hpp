#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rear/error.hpp"
#include "rear/random.hpp"

namespace rear::stats {

enum class Tail { two_sided, greater, less };

std::string_view to_string(Tail t);

// One hypothesis test's numbers. effect_size_d is empty when the pooled
// variance vanished with unequal means (d_degenerate is then true).
struct TestResult {
  double statistic = 0.0;
  std::optional<double> effect_size_d;
  bool d_degenerate = false;
  double p_raw = 1.0;
  std::optional<double> p_adjusted;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  Tail tail = Tail::two_sided;
};

enum class PValueRule {
  raw_proportion,  // #{at least as extreme} / N, may be 0
  add_one,         // (#{at least as extreme} + 1) / (N + 1)
};

// Ties with the observed value count as "at least as extreme".
// Throws DataError for an empty null distribution.
double permutation_pvalue(double observed, std::span<const double> null_stats, Tail tail,
                          PValueRule rule = PValueRule::raw_proportion);

enum class MannWhitneyMethod { exact, normal_approximation };

std::string_view to_string(MannWhitneyMethod m);

struct MannWhitneyResult {
  double u = 0.0;  // U of the first sample
  double p_two_sided = 1.0;
  MannWhitneyMethod method = MannWhitneyMethod::exact;
};

// Samples with n_a * n_b above this use the normal approximation.
inline constexpr std::size_t kExactMannWhitneyLimit = 400;

// Average ranks for ties. Exact p comes from the full permutation
// distribution of the (tied) rank sum; large samples use the tie- and
// continuity-corrected normal approximation. Throws DataError on an empty sample.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

class DegenerateVarianceError : public DataError {
 public:
  using DataError::DataError;
};

// (mean(a) - mean(b)) / pooled sd with Bessel-corrected variances.
// Needs two values per side (DataError). Zero pooled sd gives 0 when the
// means match and throws DegenerateVarianceError otherwise.
double cohens_d(std::span<const double> a, std::span<const double> b);

// Same, mapping the degenerate case to nullopt.
std::optional<double> try_cohens_d(std::span<const double> a, std::span<const double> b);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Linear-interpolation quantile of already sorted values, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);

// Central `level` interval of the replicate distribution.
Interval percentile_interval(std::vector<double> replicates, double level);

enum class BootstrapStatistic { mean };

// Percentile bootstrap. Throws DataError on empty values and ConfigError for
// fewer than 100 iterations or a level outside (0, 1).
Interval bootstrap_ci(std::span<const double> values, BootstrapStatistic statistic, std::size_t iterations,
                      double level, Rng rng);

Interval bootstrap_ci(std::span<const double> values, BootstrapStatistic statistic, std::size_t iterations,
                      double level, const RandomPlan& plan, const StreamLabel& label);

struct BhResult {
  std::vector<double> adjusted;
  std::vector<bool> rejected;
};

// Benjamini-Hochberg step-up. Rejects where adjusted <= alpha.
// Throws DataError for p outside [0, 1].
BhResult benjamini_hochberg(std::span<const double> p_values, double alpha = 0.05);

double mean(std::span<const double> v);
double median(std::vector<double> v);  // by value: reorders its copy

}  // namespace rear::stats
