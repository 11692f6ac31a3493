#pragma once

// Slow, direct reference implementations used to check the engine.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <set>
#include <map>
#include <string>
#include <vector>

#include "rear/corpus.hpp"
#include "rear/random.hpp"

namespace rear::oracle {

// U of `a` by pairwise comparison, ties counted as one half.
inline double u_statistic(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

// Two-sided exact Mann-Whitney p: share of all relabelings of the pooled
// sample whose |U - n_a n_b / 2| is at least the observed one.
inline double mann_whitney_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const double centre = static_cast<double>(a.size() * b.size()) / 2.0;
  const double observed = std::abs(u_statistic(a, b) - centre);
  std::uint64_t total = 0;
  std::uint64_t extreme = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? x : y).push_back(pooled[i]);
    ++total;
    if (std::abs(u_statistic(x, y) - centre) >= observed) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

struct BhOracle {
  std::vector<double> adjusted;
  std::vector<bool> rejected;
};

// adjusted_(i) = min over j >= i of min(1, p_(j) * (m / j)), by brute force.
// Rejected: every p at most the largest p_(k) with p_(k) * (m / k) <= alpha.
inline BhOracle benjamini_hochberg(const std::vector<double>& p, double alpha) {
  const std::size_t m = p.size();
  std::vector<double> sorted(p);
  std::sort(sorted.begin(), sorted.end());
  BhOracle out;
  out.adjusted.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    // rank of p[i]: position of its last tie, so ties share one value
    std::size_t rank = 0;
    for (std::size_t j = 0; j < m; ++j) rank += sorted[j] <= p[i];
    double best = 1.0;
    for (std::size_t j = rank; j <= m; ++j) {
      best = std::min(best, std::min(1.0, sorted[j - 1] * (static_cast<double>(m) / static_cast<double>(j))));
    }
    out.adjusted[i] = best;
  }
  double cutoff = -1.0;
  for (std::size_t k = 1; k <= m; ++k) {
    if (sorted[k - 1] * (static_cast<double>(m) / static_cast<double>(k)) <= alpha) cutoff = sorted[k - 1];
  }
  out.rejected.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.rejected[i] = p[i] <= cutoff;
  return out;
}

// Resample-with-replacement percentile interval of the mean, written out
// longhand: n index draws per replicate, sort, interpolate.
inline std::pair<double, double> bootstrap_mean_interval(const std::vector<double>& values, std::size_t iterations,
                                                         double level, stats::Rng rng) {
  std::vector<double> reps;
  for (std::size_t it = 0; it < iterations; ++it) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.below(values.size())];
    reps.push_back(sum / static_cast<double>(values.size()));
  }
  std::sort(reps.begin(), reps.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(reps.size() - 1);
    const double lo = std::floor(pos);
    const double hi = std::ceil(pos);
    return reps[static_cast<std::size_t>(lo)] +
           (pos - lo) * (reps[static_cast<std::size_t>(hi)] - reps[static_cast<std::size_t>(lo)]);
  };
  return {at((1.0 - level) / 2.0), at(1.0 - (1.0 - level) / 2.0)};
}

// Layer of each document by direct set computation. Only handles plain
// lowercase words separated by spaces (the toy corpora are built that way).
inline std::map<std::string, int> layers(const std::vector<corpus::Document>& docs, const std::set<std::string>& vocab,
                                         const std::vector<std::string>& seeds) {
  static constexpr int kPercent[] = {40, 35, 30, 25, 20, 15, 10, 5};
  auto words = [](const std::string& text) {
    std::set<std::string> out;
    std::string cur;
    for (char c : text + " ") {
      if (c == ' ') {
        if (!cur.empty()) out.insert(cur);
        cur.clear();
      } else {
        cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    return out;
  };
  std::map<std::string, int> out;
  for (const auto& d : docs) {
    std::set<std::string> present = words(d.title + " " + d.body);
    bool l0 = false;
    for (const auto& s : seeds) l0 = l0 || present.contains(s);
    if (l0) {
      out[d.id] = 0;
      continue;
    }
    present.insert(d.keywords.begin(), d.keywords.end());
    std::size_t covered = 0;
    for (const auto& t : vocab) covered += present.contains(t);
    // coverage >= p% compared in integers: covered * 100 >= p * |vocab|
    for (int j = 0; j < 8; ++j) {
      if (covered * 100 >= static_cast<std::size_t>(kPercent[j]) * vocab.size()) {
        out[d.id] = j + 1;
        break;
      }
    }
  }
  return out;
}

inline std::set<std::string> select(const std::map<std::string, int>& layer_of, int k, bool cumulative) {
  std::set<std::string> out;
  for (const auto& [id, layer] : layer_of) {
    if (cumulative ? layer <= k : layer == k) out.insert(id);
  }
  return out;
}

}  // namespace rear::oracle
