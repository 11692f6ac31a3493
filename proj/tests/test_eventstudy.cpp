#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "rear/eventstudy.hpp"
#include "rear/synthetic.hpp"
#include "support.hpp"

using namespace rear;
using namespace rear::eventstudy;
using stats::RandomPlan;
using testing::day;
using testing::event_at;
using testing::series_of;

namespace {

WindowConfig quick(AnalysisId id, std::vector<int> ks = {}) {
  auto cfg = WindowConfig::defaults(id);
  if (!ks.empty()) cfg.ks = std::move(ks);
  cfg.n_permutations = 1000;
  cfg.bootstrap_iters = 200;
  return cfg;
}

std::vector<double> flat(std::size_t n, double v) { return std::vector<double>(n, v); }

DailySeries with_intensity(DailySeries s, const std::vector<double>& values) {
  for (std::size_t i = 0; i < s.size(); ++i) s.intensity[i] = values[i % values.size()];
  return s;
}

}  // namespace

TEST_CASE("windows follow the calendar") {
  const auto s = series_of(flat(120, 1), day(2024, 9, 1));
  const KeyEvent election{day(2024, 11, 5), "election", EventCategory::elections};

  const auto w1 = build_windows(s, election, 1, false);
  REQUIRE(w1);
  CHECK(w1->dates(s, w1->all_days) == std::vector<Date>{day(2024, 11, 4), day(2024, 11, 5), day(2024, 11, 6)});

  const auto w7 = build_windows(s, election, 7, true);
  REQUIRE(w7);
  CHECK(w7->dates(s, w7->pre_days).front() == day(2024, 10, 29));
  CHECK(w7->dates(s, w7->pre_days).back() == day(2024, 11, 4));
  CHECK(w7->dates(s, w7->post_days).front() == day(2024, 11, 6));
  CHECK(w7->dates(s, w7->post_days).back() == day(2024, 11, 12));
  CHECK(w7->all_days.size() == 14);
  CHECK(w7->pre_days.size() == 7);

  CHECK_FALSE(build_windows(s, {day(2024, 9, 4), "early", EventCategory::elections}, 7, false));
  CHECK_FALSE(build_windows(s, {day(2024, 12, 27), "late", EventCategory::elections}, 7, false));
  CHECK_FALSE(build_windows(s, {day(2023, 1, 1), "outside", EventCategory::elections}, 1, false));
}

TEST_CASE("matched control draws only eligible starts") {
  const auto s = series_of(flat(60, 5));
  const std::vector<KeyEvent> events = {event_at(s, 30)};
  const auto occupied = occupied_days(s, events, 1);
  const auto w = build_windows(s, events[0], 1, false);
  REQUIRE(w);

  // brute force: 3-day spans clear of days 29..31, starting on the window's weekday
  std::set<std::size_t> eligible;
  for (std::size_t start = 0; start + 3 <= 60; ++start) {
    bool clear = true;
    for (std::size_t d = start; d < start + 3; ++d) clear = clear && !(d >= 29 && d <= 31);
    if (clear && weekday_index(s.date_at(start)) == weekday_index(s.date_at(29))) eligible.insert(start);
  }
  REQUIRE(!eligible.empty());

  std::set<std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    stats::Rng rng(seed);
    const auto c = matched_control(s, *w, occupied, rng);
    REQUIRE(c);
    REQUIRE_FALSE(c->relaxed);
    REQUIRE(eligible.contains(c->start));
    REQUIRE(c->days.size() == w->all_days.size());
    for (auto d : c->days) REQUIRE_FALSE(occupied[d]);
    seen.insert(c->start);
  }
  CHECK(seen == eligible);  // every eligible start turns up
}

TEST_CASE("matched control relaxes the weekday rule, then gives up") {
  // 12 days, event window covers days 4..6: only spans 0..2, 1..3, 7..9, 8..10, 9..11 remain
  const auto s = series_of(flat(12, 1));
  const std::vector<KeyEvent> events = {event_at(s, 5)};
  const auto occupied = occupied_days(s, events, 1);
  const auto w = build_windows(s, events[0], 1, false);
  bool relaxed_seen = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    stats::Rng rng(seed);
    const auto c = matched_control(s, *w, occupied, rng);
    REQUIRE(c);
    for (auto d : c->days) REQUIRE_FALSE(occupied[d]);
    relaxed_seen = relaxed_seen || c->relaxed;
  }
  CHECK(relaxed_seen);

  const auto tiny = series_of(flat(5, 1));
  const std::vector<KeyEvent> centre = {event_at(tiny, 2)};
  stats::Rng rng(1);
  CHECK_FALSE(matched_control(tiny, *build_windows(tiny, centre[0], 1, false), occupied_days(tiny, centre, 1), rng));
}

TEST_CASE("occupied days are the union of event windows") {
  const auto s = series_of(flat(40, 1));
  const std::vector<KeyEvent> events = {event_at(s, 10), event_at(s, 12), event_at(s, 39)};
  const auto occ = occupied_days(s, events, 3);
  std::set<std::size_t> windows;
  for (std::size_t d = 7; d <= 15; ++d) windows.insert(d);
  for (std::size_t d = 36; d <= 39; ++d) windows.insert(d);
  for (std::size_t d = 0; d < s.size(); ++d) CHECK(occ[d] == windows.contains(d));
}

TEST_CASE("h1 on a constant series") {
  const auto s = series_of(flat(200, 10));
  const std::vector<KeyEvent> events = {event_at(s, 40), event_at(s, 100), event_at(s, 160)};
  const auto r = run_h1(s, events, quick(AnalysisId::h1, {7}), RandomPlan(1));
  const auto& w = r.windows.at(0);
  REQUIRE(w.aggregate);
  CHECK(w.aggregate->statistic == 0.0);
  CHECK(w.aggregate->effect_size_d == 0.0);
  CHECK(w.aggregate->p_raw == 1.0);
  for (const auto& e : w.events) CHECK(e.difference == 0.0);
}

TEST_CASE("h1 detects a planted volume increase") {
  synthetic::SeriesSpec spec;
  spec.volume_multiplier = 2.0;
  const auto syn = synthetic::make_series(spec, 3);
  const auto r = run_h1(syn.series, syn.events, quick(AnalysisId::h1, {3, 7}), RandomPlan(3));
  for (const auto& w : r.windows) {
    REQUIRE(w.aggregate);
    CHECK(w.aggregate->statistic > 0);
    CHECK(*w.aggregate->p_adjusted < 0.05);
    CHECK(*w.aggregate->effect_size_d > 0.5);
    CHECK(*w.percent_change > 50);
    CHECK(w.aggregate->ci_low.value() > 0);
  }
}

TEST_CASE("h1 needs two usable events") {
  const auto s = series_of(flat(100, 3));
  const std::vector<KeyEvent> events = {event_at(s, 50), event_at(s, 2)};
  CHECK_THROWS_AS(run_h1(s, events, quick(AnalysisId::h1, {7}), RandomPlan(1)), DataError);
}

TEST_CASE("h2 time reversal swaps pre and post") {
  stats::Rng rng(5);
  std::vector<double> v(150);
  for (auto& x : v) x = 5.0 + static_cast<double>(rng.below(20));
  const std::vector<std::size_t> centres = {30, 75, 120};
  // equal reference means on both sides, so the normalization is symmetric too
  for (auto c : centres) {
    for (std::size_t o = 8; o <= 14; ++o) v[c - o] = v[c + o] = 10.0;
  }
  std::vector<double> reversed(v.rbegin(), v.rend());
  const auto s = series_of(v);
  const auto sr = series_of(reversed);
  std::vector<KeyEvent> events;
  std::vector<KeyEvent> mirrored;
  for (auto c : centres) {
    events.push_back(event_at(s, c));
    mirrored.push_back(event_at(sr, v.size() - 1 - c));
  }
  std::reverse(mirrored.begin(), mirrored.end());

  const auto a = run_h2(s, events, quick(AnalysisId::h2), RandomPlan(8));
  const auto b = run_h2(sr, mirrored, quick(AnalysisId::h2), RandomPlan(8));
  const auto& wa = a.windows.at(0);
  const auto& wb = b.windows.at(0);
  REQUIRE(wa.events.size() == 3);
  REQUIRE(wb.events.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& x = wa.events[i];
    const auto& y = wb.events[2 - i];
    CHECK(x.pre_mean == y.post_mean);
    CHECK(x.post_mean == y.pre_mean);
    CHECK(x.window_value == y.reference_value);
  }
  CHECK(wa.aggregate->statistic == Catch::Approx(-wb.aggregate->statistic).margin(1e-12));
}

TEST_CASE("h2 flat, ramp and zero-reference cases") {
  const auto s = series_of(flat(200, 4));
  const std::vector<KeyEvent> events = {event_at(s, 50), event_at(s, 100), event_at(s, 150)};
  const auto flat_r = run_h2(s, events, quick(AnalysisId::h2), RandomPlan(2));
  CHECK(flat_r.windows[0].aggregate->statistic == 0.0);
  CHECK(flat_r.windows[0].aggregate->p_raw > 0.05);

  // volume rises over the week before each event and drops right after
  std::vector<double> ramp = flat(200, 10);
  for (auto c : {50, 100, 150}) {
    for (int o = 1; o <= 7; ++o) ramp[c - o] = 10.0 + 3.0 * (8 - o);
  }
  const auto rr = run_h2(series_of(ramp), events, quick(AnalysisId::h2), RandomPlan(2));
  CHECK(rr.windows[0].aggregate->statistic > 0);
  CHECK(*rr.windows[0].p_one_sided < 0.05);
  for (const auto& e : rr.windows[0].events) CHECK(e.direction == Direction::anticipatory);

  std::vector<double> zero_ref = flat(200, 4);
  for (int o = 8; o <= 14; ++o) zero_ref[100 - o] = 0.0;
  const auto zr = run_h2(series_of(zero_ref), events, quick(AnalysisId::h2), RandomPlan(2));
  REQUIRE(zr.windows[0].skipped.size() == 1);
  CHECK(zr.windows[0].skipped[0].reason == "zero reference");
  CHECK(zr.windows[0].skipped[0].index == 1);

  const std::vector<KeyEvent> edge = {event_at(s, 5), event_at(s, 197)};
  CHECK_THROWS_AS(run_h2(s, edge, quick(AnalysisId::h2), RandomPlan(2)), DataError);
}

TEST_CASE("h3 flags an isolated spike") {
  stats::Rng rng(13);
  std::vector<double> v(300);
  for (auto& x : v) x = 20.0 + static_cast<double>(rng.below(5));
  for (std::size_t d = 143; d <= 157; ++d) v[d] *= 1.5;
  const auto s = series_of(v);
  const std::vector<KeyEvent> events = {event_at(s, 50), event_at(s, 150), event_at(s, 250)};
  const auto r = run_h3(s, events, quick(AnalysisId::h3), RandomPlan(4));
  const auto& es = r.windows.at(0).events;
  REQUIRE(es.size() == 3);
  CHECK(*es[1].percent_change > 30);
  CHECK(*es[1].test->p_adjusted < 0.05);
  CHECK(std::abs(*es[0].percent_change) < 10);
  CHECK(std::abs(*es[2].percent_change) < 10);
  CHECK(es[0].test->p_raw > 0.05);
}

TEST_CASE("h3 degenerate and error cases") {
  const auto s = series_of(flat(100, 6));
  const std::vector<KeyEvent> events = {event_at(s, 30), event_at(s, 60)};
  const auto r = run_h3(s, events, quick(AnalysisId::h3), RandomPlan(1));
  for (const auto& e : r.windows[0].events) {
    CHECK(*e.percent_change == 0.0);
    CHECK(e.test->p_raw == 1.0);
  }
  const auto small = series_of(flat(10, 1));
  const std::vector<KeyEvent> covering = {event_at(small, 2), event_at(small, 7)};
  CHECK_THROWS_AS(run_h3(small, covering, quick(AnalysisId::h3, {3}), RandomPlan(1)), DataError);
}

TEST_CASE("location shifts leave permutation p-values unchanged") {
  stats::Rng rng(21);
  std::vector<double> v(365);
  for (auto& x : v) x = static_cast<double>(10 + rng.below(20));
  std::vector<double> shifted(v);
  for (auto& x : shifted) x += 64.0;
  const auto s = series_of(v);
  const auto t = series_of(shifted);
  const auto events = synthetic::place_events({}, 21);
  for (auto id : {AnalysisId::h1, AnalysisId::h3}) {
    const auto a = run_analysis(id, s, events, quick(id, {3, 7}), RandomPlan(6));
    const auto b = run_analysis(id, t, events, quick(id, {3, 7}), RandomPlan(6));
    for (std::size_t k = 0; k < a.windows.size(); ++k) {
      if (a.windows[k].aggregate) CHECK(a.windows[k].aggregate->p_raw == b.windows[k].aggregate->p_raw);
      for (std::size_t e = 0; e < a.windows[k].events.size(); ++e) {
        if (a.windows[k].events[e].test) {
          CHECK(a.windows[k].events[e].test->p_raw == b.windows[k].events[e].test->p_raw);
        }
      }
    }
  }
}

TEST_CASE("h4 compares window and buffered baseline intensity") {
  synthetic::SeriesSpec spec;
  spec.intensity_shift = -0.3;
  const auto syn = synthetic::make_series(spec, 9);
  const auto r = run_h4(syn.series, syn.events, quick(AnalysisId::h4, {7}), RandomPlan(9));
  const auto& agg = *r.windows.at(0).aggregate;
  CHECK(*agg.effect_size_d < 0);
  CHECK(*agg.p_adjusted < 0.05);
  CHECK(r.windows[0].method.rfind("mann_whitney_", 0) == 0);

  const auto same = run_h4(with_intensity(series_of(flat(200, 5)), {1.0, 2.0, 3.0}),
                           std::vector<KeyEvent>{KeyEvent{day(2024, 10, 15), "a", EventCategory::elections},
                                                 KeyEvent{day(2025, 1, 10), "b", EventCategory::elections}},
                           quick(AnalysisId::h4, {7}), RandomPlan(1));
  CHECK(same.windows[0].aggregate->p_raw > 0.5);

  CHECK_THROWS_WITH(run_h4(series_of(flat(200, 5)), syn.events, quick(AnalysisId::h4), RandomPlan(1)),
                    Catch::Matchers::ContainsSubstring("no intensity data"));
}

TEST_CASE("h4 drops days without intensity") {
  auto s = with_intensity(series_of(flat(200, 5)), {1.0, 2.0, 3.0, 2.5});
  const std::vector<KeyEvent> events = {event_at(s, 60), event_at(s, 140)};
  const auto full = run_h4(s, events, quick(AnalysisId::h4, {3}), RandomPlan(1));
  s.intensity[60] = std::nullopt;
  s.intensity[10] = std::nullopt;
  const auto holes = run_h4(s, events, quick(AnalysisId::h4, {3}), RandomPlan(1));
  CHECK(holes.windows[0].aggregate->n_a == full.windows[0].aggregate->n_a - 1);
  CHECK(holes.windows[0].aggregate->n_b == full.windows[0].aggregate->n_b - 1);
}

TEST_CASE("h5 labels a post-event jump as reactive") {
  synthetic::SeriesSpec spec;
  spec.post_intensity_jump = 0.4;
  spec.intensity_sd = 0.1;
  const auto syn = synthetic::make_series(spec, 17);
  const auto r = run_h5(syn.series, syn.events, quick(AnalysisId::h5), RandomPlan(17));
  const auto& w = r.windows.at(0);
  REQUIRE(w.events.size() == syn.events.size());
  for (const auto& e : w.events) {
    CHECK(e.direction == Direction::reactive);
    CHECK(*e.test->p_adjusted < 0.05);
  }

  auto s = with_intensity(series_of(flat(100, 5)), {2.0});
  const std::vector<KeyEvent> events = {event_at(s, 50), event_at(s, 96)};
  const auto flat_r = run_h5(s, events, quick(AnalysisId::h5), RandomPlan(1));
  CHECK(flat_r.windows[0].events.at(0).test->p_raw == 1.0);
  REQUIRE(flat_r.windows[0].skipped.size() == 1);
  CHECK(flat_r.windows[0].skipped[0].reason == "boundary");
}

TEST_CASE("every event is either used or skipped") {
  synthetic::SeriesSpec spec;
  const auto syn = synthetic::make_series(spec, 30);
  auto events = syn.events;
  events.push_back({syn.series.start_date + std::chrono::days{2}, "edge", EventCategory::foreign_policy});
  events.push_back({syn.series.end_date, "end", EventCategory::domestic_policy});
  for (auto id : {AnalysisId::h1, AnalysisId::h2, AnalysisId::h3, AnalysisId::h4, AnalysisId::h5}) {
    const auto r = run_analysis(id, syn.series, events, quick(id, {1, 7}), RandomPlan(30));
    for (const auto& w : r.windows) CHECK(w.events.size() + w.skipped.size() == events.size());
  }
}

TEST_CASE("results do not depend on the worker count") {
  synthetic::SeriesSpec spec;
  spec.volume_multiplier = 1.3;
  spec.intensity_shift = 0.1;
  const auto syn = synthetic::make_series(spec, 44);
  for (auto id : {AnalysisId::h1, AnalysisId::h2, AnalysisId::h3, AnalysisId::h4, AnalysisId::h5}) {
    auto cfg = quick(id, {3, 7});
    const auto one = run_analysis(id, syn.series, syn.events, cfg, RandomPlan(44)).to_json().dump();
    cfg.workers = 8;
    const auto eight = run_analysis(id, syn.series, syn.events, cfg, RandomPlan(44)).to_json().dump();
    CHECK(one == eight);
    CHECK(one != run_analysis(id, syn.series, syn.events, cfg, RandomPlan(45)).to_json().dump());
  }
}

TEST_CASE("BH is applied once across the declared family") {
  const auto syn = synthetic::make_series({}, 12);
  const auto r = run_h3(syn.series, syn.events, quick(AnalysisId::h3, {1, 3, 7}), RandomPlan(12));
  std::vector<double> raw;
  std::vector<double> adjusted;
  for (const auto& w : r.windows) {
    for (const auto& e : w.events) {
      raw.push_back(e.test->p_raw);
      adjusted.push_back(*e.test->p_adjusted);
    }
  }
  CHECK(stats::benjamini_hochberg(raw, 0.05).adjusted == adjusted);
  CHECK(r.correction_family == "all event x window tests");

  const auto h1 = run_h1(syn.series, syn.events, quick(AnalysisId::h1), RandomPlan(12));
  raw.clear();
  adjusted.clear();
  for (const auto& w : h1.windows) {
    raw.push_back(w.aggregate->p_raw);
    adjusted.push_back(*w.aggregate->p_adjusted);
  }
  CHECK(stats::benjamini_hochberg(raw, 0.05).adjusted == adjusted);
}

TEST_CASE("result JSON round trip") {
  const auto syn = synthetic::make_series({}, 2);
  for (auto id : {AnalysisId::h1, AnalysisId::h2, AnalysisId::h3, AnalysisId::h4, AnalysisId::h5}) {
    const auto r = run_analysis(id, syn.series, syn.events, quick(id), RandomPlan(2));
    const auto j = r.to_json();
    CHECK(HypothesisResult::from_json(j).to_json() == j);
  }
}

TEST_CASE("window config validation") {
  auto cfg = WindowConfig::defaults(AnalysisId::h2);
  CHECK(cfg.ks == std::vector<int>{7});
  CHECK(WindowConfig::defaults(AnalysisId::h1).ks == std::vector<int>{1, 3, 5, 7, 10});
  CHECK(WindowConfig::defaults(AnalysisId::h3).n_permutations == 1000);
  CHECK(WindowConfig::defaults(AnalysisId::h4).bootstrap_iters == 2000);
  cfg.ks = {0};
  CHECK_THROWS_AS(cfg.validate(AnalysisId::h2), ConfigError);
  cfg = WindowConfig::defaults(AnalysisId::h2);
  cfg.reference_to = -7;  // overlaps the pre window
  CHECK_THROWS_AS(cfg.validate(AnalysisId::h2), ConfigError);
  cfg = WindowConfig::defaults(AnalysisId::h1);
  cfg.alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(AnalysisId::h1), ConfigError);
}

TEST_CASE("events files") {
  std::istringstream csv("date,description,category\n2024-11-05,\"Vote, \"\"final\"\"\",elections\n");
  const auto ev = parse_events_csv(csv);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].description == "Vote, \"final\"");
  CHECK(parse_events_json(events_to_json(ev)) == ev);
  std::istringstream bad("date,description,category\n2024-11-05,x,sports\n");
  CHECK_THROWS_AS(parse_events_csv(bad), DataError);
  CHECK_THROWS_AS(load_events("/nonexistent/events"), IoError);
}
