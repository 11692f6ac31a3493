#include "rear/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace rear::stats {

std::string_view to_string(Tail t) {
  switch (t) {
    case Tail::two_sided: return "two_sided";
    case Tail::greater: return "greater";
    case Tail::less: return "less";
  }
  return "two_sided";
}

std::string_view to_string(MannWhitneyMethod m) {
  return m == MannWhitneyMethod::exact ? "exact" : "normal_approximation";
}

double mean(std::span<const double> v) {
  if (v.empty()) throw DataError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return (lower + upper) / 2.0;
}

double permutation_pvalue(double observed, std::span<const double> null_stats, Tail tail, PValueRule rule) {
  if (null_stats.empty()) throw DataError("permutation p-value needs a non-empty null distribution");
  std::size_t extreme = 0;
  for (const double x : null_stats) {
    switch (tail) {
      case Tail::two_sided: extreme += std::abs(x) >= std::abs(observed); break;
      case Tail::greater: extreme += x >= observed; break;
      case Tail::less: extreme += x <= observed; break;
    }
  }
  const auto n = static_cast<double>(null_stats.size());
  if (rule == PValueRule::add_one) return (static_cast<double>(extreme) + 1.0) / (n + 1.0);
  return static_cast<double>(extreme) / n;
}

namespace {

struct Ranking {
  std::vector<std::int64_t> doubled_rank;  // 2 * average rank, indexed like the pooled input
  double tie_term = 0.0;                   // sum over tie groups of t^3 - t
};

Ranking rank_pooled(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });
  Ranking r;
  r.doubled_rank.assign(n, 0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Positions i..j share ranks i+1..j+1; twice their average is i+j+2.
    const auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) r.doubled_rank[order[t]] = doubled;
    const double t = static_cast<double>(j - i + 1);
    r.tie_term += t * t * t - t;
    i = j + 1;
  }
  return r;
}

// Exact two-sided p over all C(n, m) ways to pick the m-sample from the
// pooled ranks, via a subset-sum table on doubled ranks.
double exact_two_sided(const Ranking& ranking, std::size_t m, std::int64_t observed_doubled_sum, std::size_t n_a,
                       std::size_t n_b) {
  const std::size_t n = ranking.doubled_rank.size();
  std::int64_t max_sum = 0;
  {
    std::vector<std::int64_t> sorted = ranking.doubled_rank;
    std::sort(sorted.rbegin(), sorted.rend());
    for (std::size_t i = 0; i < m; ++i) max_sum += sorted[i];
  }
  const auto width = static_cast<std::size_t>(max_sum + 1);
  std::vector<std::vector<std::uint64_t>> ways(m + 1, std::vector<std::uint64_t>(width, 0));
  ways[0][0] = 1;
  for (std::size_t item = 0; item < n; ++item) {
    const auto r = static_cast<std::size_t>(ranking.doubled_rank[item]);
    for (std::size_t j = std::min(m, item + 1); j >= 1; --j) {
      auto& row = ways[j];
      const auto& prev = ways[j - 1];
      for (std::size_t s = width; s-- > r;) row[s] += prev[s - r];
    }
  }
  const auto nanb = static_cast<std::int64_t>(n_a * n_b);
  const auto offset = static_cast<std::int64_t>(m * (m + 1));
  const std::int64_t observed_dev = std::llabs(observed_doubled_sum - offset - nanb);
  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  for (std::size_t s = 0; s < width; ++s) {
    const std::uint64_t w = ways[m][s];
    if (w == 0) continue;
    total += w;
    if (std::llabs(static_cast<std::int64_t>(s) - offset - nanb) >= observed_dev) extreme += w;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney U needs two non-empty samples");
  const std::size_t n_a = a.size();
  const std::size_t n_b = b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const Ranking ranking = rank_pooled(pooled);

  std::int64_t doubled_sum_a = 0;
  for (std::size_t i = 0; i < n_a; ++i) doubled_sum_a += ranking.doubled_rank[i];
  const auto doubled_u = doubled_sum_a - static_cast<std::int64_t>(n_a * (n_a + 1));

  MannWhitneyResult out;
  out.u = static_cast<double>(doubled_u) / 2.0;
  if (n_a * n_b <= kExactMannWhitneyLimit) {
    // Enumerate over the smaller side; |2U - n_a n_b| is the same from either side.
    const bool use_a = n_a <= n_b;
    const std::size_t m = use_a ? n_a : n_b;
    std::int64_t doubled_sum = 0;
    for (std::size_t i = 0; i < m; ++i) doubled_sum += ranking.doubled_rank[use_a ? i : n_a + i];
    out.p_two_sided = exact_two_sided(ranking, m, doubled_sum, n_a, n_b);
    out.method = MannWhitneyMethod::exact;
    return out;
  }

  const double n = static_cast<double>(n_a + n_b);
  const double nanb = static_cast<double>(n_a) * static_cast<double>(n_b);
  const double variance = nanb / 12.0 * ((n + 1.0) - ranking.tie_term / (n * (n - 1.0)));
  out.method = MannWhitneyMethod::normal_approximation;
  if (variance <= 0.0) {
    out.p_two_sided = 1.0;
    return out;
  }
  const double deviation = std::max(0.0, std::abs(out.u - nanb / 2.0) - 0.5);
  const double z = deviation / std::sqrt(variance);
  out.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

namespace {

struct Moments {
  double mean;
  double variance;  // Bessel-corrected
};

Moments moments(std::span<const double> v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, ss / static_cast<double>(v.size() - 1)};
}

}  // namespace

std::optional<double> try_cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DataError("Cohen's d needs at least two values per sample");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled = std::sqrt(((na - 1.0) * ma.variance + (nb - 1.0) * mb.variance) / (na + nb - 2.0));
  const double diff = ma.mean - mb.mean;
  if (pooled == 0.0) {
    if (diff == 0.0) return 0.0;
    return std::nullopt;
  }
  return diff / pooled;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  const auto d = try_cohens_d(a, b);
  if (!d) throw DegenerateVarianceError("Cohen's d undefined: zero pooled variance with unequal means");
  return *d;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Interval percentile_interval(std::vector<double> replicates, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  std::sort(replicates.begin(), replicates.end());
  const double tail = (1.0 - level) / 2.0;
  return {sorted_quantile(replicates, tail), sorted_quantile(replicates, 1.0 - tail)};
}

Interval bootstrap_ci(std::span<const double> values, BootstrapStatistic statistic, std::size_t iterations,
                      double level, Rng rng) {
  if (values.empty()) throw DataError("bootstrap needs a non-empty sample");
  if (iterations < 100) throw ConfigError("bootstrap needs at least 100 iterations");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  (void)statistic;  // mean is the only statistic
  const std::size_t n = values.size();
  std::vector<double> replicates;
  replicates.reserve(iterations);
  for (std::size_t it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[rng.below(n)];
    replicates.push_back(sum / static_cast<double>(n));
  }
  return percentile_interval(std::move(replicates), level);
}

Interval bootstrap_ci(std::span<const double> values, BootstrapStatistic statistic, std::size_t iterations,
                      double level, const RandomPlan& plan, const StreamLabel& label) {
  return bootstrap_ci(values, statistic, iterations, level, plan.stream(label));
}

BhResult benjamini_hochberg(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  for (const double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("p-values must lie in [0, 1]");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p_values[x] < p_values[y]; });
  BhResult out;
  out.adjusted.assign(m, 1.0);
  out.rejected.assign(m, false);
  double running = 1.0;
  for (std::size_t pos = m; pos-- > 0;) {
    const std::size_t rank = pos + 1;
    const double scaled = p_values[order[pos]] * (static_cast<double>(m) / static_cast<double>(rank));
    running = std::min(running, std::min(1.0, scaled));
    out.adjusted[order[pos]] = running;
  }
  for (std::size_t i = 0; i < m; ++i) out.rejected[i] = out.adjusted[i] <= alpha;
  return out;
}

}  // namespace rear::stats
