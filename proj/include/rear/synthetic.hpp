#pragma once

#include <cstdint>
#include <vector>

#include "rear/corpus.hpp"
#include "rear/eventstudy.hpp"
#include "rear/timeseries.hpp"

// Seeded generators with known planted effects, for calibration and
// detection checks and for the desk-scale fixture corpus.
namespace rear::synthetic {

struct SeriesSpec {
  Date start = Date{std::chrono::year{2024} / 9 / 1};
  int days = 365;
  double lambda = 20.0;            // Poisson mean volume per day
  std::size_t n_events = 6;
  int min_event_gap = 22;          // keeps +-10 windows disjoint
  int event_margin = 25;           // no event this close to either end
  int plant_k = 7;                 // effects planted over +-plant_k
  double volume_multiplier = 1.0;  // e.g. 1.5 for +50%
  double base_intensity = 2.0;
  double intensity_sd = 0.3;
  double intensity_shift = 0.0;    // added inside every +-plant_k window
  double post_intensity_jump = 0.0;  // added on days [+1, +plant_k]
};

struct SyntheticSeries {
  timeseries::DailySeries series;
  std::vector<eventstudy::KeyEvent> events;
};

// Events are distinct, at least min_event_gap days apart, and cycle through
// the three categories. Throws ConfigError when they cannot be placed.
std::vector<eventstudy::KeyEvent> place_events(const SeriesSpec& spec, std::uint64_t seed);

SyntheticSeries make_series(const SeriesSpec& spec, std::uint64_t seed);

struct CorpusSpec {
  SeriesSpec series{.lambda = 14.0, .volume_multiplier = 1.5, .intensity_shift = -0.3};
  double explicit_share = 0.3;     // documents naming the movement
  double related_share = 0.4;      // documents using its vocabulary only
  double emotion_share = 1.0;      // documents carrying an emotion vector
};

struct SyntheticCorpus {
  std::vector<corpus::Document> documents;
  std::vector<eventstudy::KeyEvent> events;
  corpus::MovementSpec movement;
};

// News and Reddit documents for the "metoo" movement, with daily counts
// and intensities following make_series.
SyntheticCorpus make_corpus(const CorpusSpec& spec, std::uint64_t seed);

// Knuth's product method; lambda must lie in (0, 500].
std::uint64_t poisson(stats::Rng& rng, double lambda);
double normal(stats::Rng& rng, double mean, double sd);

}  // namespace rear::synthetic
