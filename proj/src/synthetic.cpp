#include "rear/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "rear/error.hpp"

namespace rear::synthetic {

using eventstudy::EventCategory;
using eventstudy::KeyEvent;
using stats::RandomPlan;
using stats::Rng;

std::uint64_t poisson(Rng& rng, double lambda) {
  if (!(lambda > 0.0 && lambda <= 500.0)) throw ConfigError("poisson lambda must lie in (0, 500]");
  const double limit = std::exp(-lambda);
  std::uint64_t k = 0;
  double p = rng.uniform();
  while (p > limit) {
    ++k;
    p *= rng.uniform();
  }
  return k;
}

double normal(Rng& rng, double mean, double sd) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<KeyEvent> place_events(const SeriesSpec& spec, std::uint64_t seed) {
  const int lo = spec.event_margin;
  const int hi = spec.days - 1 - spec.event_margin;
  if (hi < lo) throw ConfigError("series too short for the event margin");
  Rng rng = RandomPlan(seed).stream({"synthetic", 0, 0, "events"});
  std::vector<int> offsets;
  for (int attempt = 0; offsets.size() < spec.n_events; ++attempt) {
    if (attempt > 100000) throw ConfigError("cannot place the requested events with the required spacing");
    const int c = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
    const bool clear = std::all_of(offsets.begin(), offsets.end(),
                                   [&](int o) { return std::abs(o - c) >= spec.min_event_gap; });
    if (clear) offsets.push_back(c);
  }
  std::sort(offsets.begin(), offsets.end());
  static constexpr std::array<EventCategory, 3> kCycle = {EventCategory::elections, EventCategory::foreign_policy,
                                                          EventCategory::domestic_policy};
  std::vector<KeyEvent> events;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    events.push_back({spec.start + std::chrono::days{offsets[i]}, "synthetic event " + std::to_string(i + 1),
                      kCycle[i % kCycle.size()]});
  }
  return events;
}

SyntheticSeries make_series(const SeriesSpec& spec, std::uint64_t seed) {
  SyntheticSeries out;
  out.events = place_events(spec, seed);
  out.series = timeseries::make_series({spec.start, spec.start + std::chrono::days{spec.days - 1}});
  out.series.labels.movement = "synthetic";

  std::vector<bool> in_window(static_cast<std::size_t>(spec.days), false);
  std::vector<bool> post(static_cast<std::size_t>(spec.days), false);
  for (const auto& e : out.events) {
    const long c = out.series.offset_of(e.date);
    for (long d = c - spec.plant_k; d <= c + spec.plant_k; ++d) {
      if (d < 0 || d >= spec.days) continue;
      in_window[static_cast<std::size_t>(d)] = true;
      if (d > c) post[static_cast<std::size_t>(d)] = true;
    }
  }
  Rng volume_rng = RandomPlan(seed).stream({"synthetic", 0, 0, "volume"});
  Rng intensity_rng = RandomPlan(seed).stream({"synthetic", 0, 0, "intensity"});
  for (std::size_t d = 0; d < out.series.size(); ++d) {
    const double lambda = spec.lambda * (in_window[d] ? spec.volume_multiplier : 1.0);
    out.series.volume[d] = static_cast<double>(poisson(volume_rng, lambda));
    double level = spec.base_intensity;
    if (in_window[d]) level += spec.intensity_shift;
    if (post[d]) level += spec.post_intensity_jump;
    out.series.intensity[d] = std::clamp(normal(intensity_rng, level, spec.intensity_sd), 0.0, 27.0);
  }
  return out;
}

namespace {

constexpr std::array<const char*, 8> kCoreTerms = {"harassment", "survivors", "consent",   "assault",
                                                   "accountability", "workplace", "testimony", "allegations"};

std::vector<std::string> filler_words() {
  static constexpr std::array<const char*, 10> onsets = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "t"};
  static constexpr std::array<const char*, 5> vowels = {"a", "e", "i", "o", "u"};
  std::vector<std::string> words;
  for (const char* a : onsets) {
    for (const char* v : vowels) {
      for (const char* b : onsets) {
        for (const char* w : {"ra", "lo", "ne", "ti", "su", "mo", "ka", "di"}) {
          words.push_back(std::string(a) + v + b + w);
          if (words.size() == 400) return words;
        }
      }
    }
  }
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

corpus::EmotionVector make_emotions(Rng& rng, double intensity) {
  std::array<double, corpus::kEmotionCount - 1> weights{};
  double total = 0.0;
  for (auto& w : weights) {
    w = 0.2 + 0.8 * rng.uniform();
    total += w;
  }
  std::map<std::string, double> probs;
  for (std::size_t i = 0; i + 1 < corpus::kEmotionCount; ++i) {
    probs[std::string(corpus::kEmotionNames[i])] = std::min(1.0, intensity * weights[i] / total);
  }
  probs["neutral"] = 0.5 * rng.uniform();
  return corpus::EmotionVector::from_map(probs);
}

}  // namespace

SyntheticCorpus make_corpus(const CorpusSpec& spec, std::uint64_t seed) {
  const auto base = make_series(spec.series, seed);
  SyntheticCorpus out;
  out.events = base.events;
  out.movement = {"metoo", {"#metoo", "me too movement"}};

  const auto fillers = filler_words();
  Rng rng = RandomPlan(seed).stream({"synthetic", 0, 0, "documents"});
  std::size_t serial = 0;
  for (std::size_t d = 0; d < base.series.size(); ++d) {
    const auto day = base.series.date_at(d);
    const auto count = static_cast<std::size_t>(base.series.volume[d]);
    for (std::size_t n = 0; n < count; ++n) {
      corpus::Document doc;
      char id[32];
      std::snprintf(id, sizeof id, "syn-%06zu", ++serial);
      doc.id = id;
      doc.platform = rng.below(2) == 0 ? corpus::Platform::news : corpus::Platform::reddit;
      doc.published_at = Timestamp{day} + std::chrono::seconds{static_cast<long>(rng.below(86400))};

      const double roll = rng.uniform();
      const bool explicit_mention = roll < spec.explicit_share;
      const bool related = !explicit_mention && roll < spec.explicit_share + spec.related_share;
      std::vector<std::string> core;
      if (explicit_mention || related) {
        // Earlier core terms are more common, so the vocabulary cut is not a tie.
        for (std::size_t t = 0; t < kCoreTerms.size(); ++t) {
          const double keep = explicit_mention ? 0.9 - 0.08 * static_cast<double>(t) : 0.45 - 0.04 * static_cast<double>(t);
          if (rng.uniform() < keep) core.emplace_back(kCoreTerms[t]);
        }
      }
      std::vector<std::string> filler;
      for (int f = 0; f < 5; ++f) filler.push_back(fillers[rng.below(fillers.size())]);

      std::vector<std::string> title_words = {"report"};
      if (explicit_mention) title_words.insert(title_words.begin(), rng.below(2) == 0 ? "#MeToo" : "Me Too movement");
      if (!core.empty()) title_words.push_back(core.front());
      doc.title = join(title_words);
      std::vector<std::string> body_words = core;
      body_words.insert(body_words.end(), filler.begin(), filler.end());
      doc.body = join(body_words);

      std::vector<std::string> keywords = core;
      keywords.insert(keywords.end(), filler.begin(), filler.begin() + 3);
      doc.keywords = corpus::normalize_keywords(std::move(keywords));

      if (rng.uniform() < spec.emotion_share && base.series.intensity[d]) {
        const double target = std::clamp(*base.series.intensity[d] + normal(rng, 0.0, 0.2), 0.0, 27.0);
        doc.emotions = make_emotions(rng, target);
      }
      out.documents.push_back(std::move(doc));
    }
  }
  return out;
}

}  // namespace rear::synthetic
