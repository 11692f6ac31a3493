#include "rear/eventstudy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "rear/error.hpp"
#include "rear/parallel.hpp"

namespace rear::eventstudy {
namespace {

using stats::RandomPlan;
using stats::Rng;
using stats::StreamLabel;

long offset_of(const DailySeries& series, const KeyEvent& e) { return series.offset_of(e.date); }

bool fits(const DailySeries& series, long from, long to) {
  return from >= 0 && to < static_cast<long>(series.size()) && from <= to;
}

std::vector<double> gather(const std::vector<double>& values, std::span<const std::size_t> days) {
  std::vector<double> out;
  out.reserve(days.size());
  for (auto d : days) out.push_back(values[d]);
  return out;
}

std::vector<double> gather_present(const std::vector<std::optional<double>>& values, std::span<const std::size_t> days) {
  std::vector<double> out;
  for (auto d : days) {
    if (values[d]) out.push_back(*values[d]);
  }
  return out;
}

double range_mean(const std::vector<double>& values, long from, long to) {
  double sum = 0.0;
  for (long d = from; d <= to; ++d) sum += values[static_cast<std::size_t>(d)];
  return sum / static_cast<double>(to - from + 1);
}

std::optional<double> percent_change(double value, double reference) {
  if (reference == 0.0) return std::nullopt;
  return 100.0 * (value - reference) / reference;
}

// Fills p_adjusted for every test pointer, in order, as one BH family.
void adjust_family(const std::vector<stats::TestResult*>& tests, double alpha) {
  if (tests.empty()) return;
  std::vector<double> raw;
  raw.reserve(tests.size());
  for (const auto* t : tests) raw.push_back(t->p_raw);
  const auto bh = stats::benjamini_hochberg(raw, alpha);
  for (std::size_t i = 0; i < tests.size(); ++i) tests[i]->p_adjusted = bh.adjusted[i];
}

std::vector<double> centers_to_values(std::span<const EventRecord> records, double EventRecord::*field) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.*field);
  return out;
}

void set_effect_size(stats::TestResult& t, std::span<const double> a, std::span<const double> b) {
  const auto d = stats::try_cohens_d(a, b);
  t.effect_size_d = d;
  t.d_degenerate = !d.has_value();
}

// Bootstrap interval of Cohen's d. `paired` resamples index pairs (a[i], b[i]);
// otherwise each side is resampled independently. Replicates with a
// degenerate d are dropped; fewer than half usable gives nullopt.
std::optional<stats::Interval> bootstrap_d(std::span<const double> a, std::span<const double> b, bool paired,
                                           std::size_t iterations, double level, Rng rng) {
  std::vector<double> replicates;
  replicates.reserve(iterations);
  std::vector<double> ra(a.size()), rb(b.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    if (paired) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const auto j = rng.below(a.size());
        ra[i] = a[j];
        rb[i] = b[j];
      }
    } else {
      for (auto& x : ra) x = a[rng.below(a.size())];
      for (auto& x : rb) x = b[rng.below(b.size())];
    }
    if (auto d = stats::try_cohens_d(ra, rb)) replicates.push_back(*d);
  }
  if (replicates.size() * 2 < iterations) return std::nullopt;
  return stats::percentile_interval(std::move(replicates), level);
}

HypothesisResult start_result(AnalysisId id, std::span<const KeyEvent> events, const WindowConfig& cfg,
                              const RandomPlan& plan, std::string family) {
  cfg.validate(id);
  HypothesisResult r;
  r.analysis = id;
  r.seed = plan.master_seed();
  r.config = cfg;
  r.correction_family = std::move(family);
  r.n_events_total = events.size();
  return r;
}

void require_intensity(const DailySeries& series) {
  if (!series.has_intensity()) throw DataError("no intensity data");
}

// Starts s of a span [s, s + length) free of occupied days.
std::vector<std::size_t> free_starts(const std::vector<bool>& occupied, std::size_t length) {
  std::vector<std::size_t> out;
  const std::size_t n = occupied.size();
  if (length == 0 || length > n) return out;
  std::size_t run = 0;  // occupied days inside the current span
  for (std::size_t d = 0; d < length; ++d) run += occupied[d];
  for (std::size_t s = 0;; ++s) {
    if (run == 0) out.push_back(s);
    if (s + length >= n) break;
    run -= occupied[s];
    run += occupied[s + length];
  }
  return out;
}

}  // namespace

std::vector<Date> EventWindow::dates(const DailySeries& series, std::span<const std::size_t> days) const {
  std::vector<Date> out;
  out.reserve(days.size());
  for (auto d : days) out.push_back(series.date_at(d));
  return out;
}

std::optional<EventWindow> build_windows(const DailySeries& series, const KeyEvent& event, int k,
                                         bool exclude_event_day) {
  if (k < 1) throw ConfigError("window half-width must be at least 1");
  const long c = offset_of(series, event);
  if (!fits(series, c - k, c + k)) return std::nullopt;
  EventWindow w;
  w.event = event;
  w.center = static_cast<std::size_t>(c);
  for (long d = c - k; d <= c + k; ++d) {
    const auto day = static_cast<std::size_t>(d);
    if (d < c) w.pre_days.push_back(day);
    if (d > c) w.post_days.push_back(day);
    if (d != c || !exclude_event_day) w.all_days.push_back(day);
  }
  return w;
}

std::vector<bool> occupied_days(const DailySeries& series, std::span<const KeyEvent> events, int k) {
  std::vector<bool> occ(series.size(), false);
  const long n = static_cast<long>(series.size());
  for (const auto& e : events) {
    const long c = offset_of(series, e);
    for (long d = std::max(0L, c - k); d <= std::min(n - 1, c + k); ++d) occ[static_cast<std::size_t>(d)] = true;
  }
  return occ;
}

std::optional<ControlDraw> matched_control(const DailySeries& series, const EventWindow& window,
                                           const std::vector<bool>& occupied, Rng& rng) {
  const std::size_t length = window.last() - window.first() + 1;
  const auto starts = free_starts(occupied, length);
  const unsigned weekday = weekday_index(series.date_at(window.first()));
  std::vector<std::size_t> matched;
  for (auto s : starts) {
    if (weekday_index(series.date_at(s)) == weekday) matched.push_back(s);
  }
  ControlDraw draw;
  const std::vector<std::size_t>* pool = &matched;
  if (matched.empty()) {
    if (starts.empty()) return std::nullopt;
    pool = &starts;
    draw.relaxed = true;
  }
  draw.start = (*pool)[rng.below(pool->size())];
  for (auto d : window.all_days) draw.days.push_back(draw.start + (d - window.first()));
  return draw;
}

// --- H1: event-window vs matched-control medians ---------------------------

HypothesisResult run_h1(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const RandomPlan& plan) {
  HypothesisResult result = start_result(AnalysisId::h1, events, cfg, plan, "window sizes");
  const auto& vol = series.volume;
  const std::size_t n = series.size();

  for (const int k : cfg.ks) {
    WindowResult wr;
    wr.k = k;
    wr.method = "permutation: pseudo-event dates with weekday-matched controls";
    const auto occupied = occupied_days(series, events, k);

    std::vector<EventWindow> windows;
    for (std::size_t i = 0; i < events.size(); ++i) {
      auto w = build_windows(series, events[i], k, cfg.exclude_event_day);
      if (!w) {
        wr.skipped.push_back({i, events[i], "boundary"});
        continue;
      }
      Rng rng = plan.stream({"h1", k, i, "control"});
      const auto control = matched_control(series, *w, occupied, rng);
      if (!control) {
        wr.skipped.push_back({i, events[i], "no control"});
        continue;
      }
      EventRecord rec;
      rec.index = i;
      rec.event = events[i];
      rec.window_value = stats::median(gather(vol, w->all_days));
      rec.reference_value = stats::median(gather(vol, control->days));
      rec.difference = rec.window_value - rec.reference_value;
      rec.percent_change = percent_change(rec.window_value, rec.reference_value);
      rec.control_start = series.date_at(control->start);
      rec.control_relaxed = control->relaxed;
      if (control->relaxed) wr.warnings.push_back("event " + std::to_string(i) + ": control weekday constraint relaxed");
      wr.events.push_back(std::move(rec));
      windows.push_back(std::move(*w));
    }
    if (wr.events.size() < 2) throw DataError("need ≥ 2 usable events (k=" + std::to_string(k) + ")");

    const auto window_medians = centers_to_values(wr.events, &EventRecord::window_value);
    const auto control_medians = centers_to_values(wr.events, &EventRecord::reference_value);
    const auto diffs = centers_to_values(wr.events, &EventRecord::difference);
    const double observed = stats::mean(diffs);

    // Pseudo-event centres: whole +-k span free of real event windows.
    const std::size_t span = 2 * static_cast<std::size_t>(k) + 1;
    std::array<std::vector<std::size_t>, 7> centres_by_weekday;
    std::vector<std::size_t> all_centres;
    for (auto s : free_starts(occupied, span)) {
      const std::size_t c = s + static_cast<std::size_t>(k);
      centres_by_weekday[weekday_index(series.date_at(c))].push_back(c);
      all_centres.push_back(c);
    }
    if (all_centres.empty()) throw DataError("no event-free dates available for the permutation null (k=" + std::to_string(k) + ")");
    const auto control_starts = free_starts(occupied, span);
    std::array<std::vector<std::size_t>, 7> control_by_weekday;
    for (auto s : control_starts) control_by_weekday[weekday_index(series.date_at(s))].push_back(s);

    std::vector<const std::vector<std::size_t>*> centre_pool;
    for (const auto& w : windows) {
      const auto& pool = centres_by_weekday[weekday_index(w.event.date)];
      if (pool.empty()) {
        wr.warnings.push_back("pseudo-event weekday constraint relaxed for " + format_date(w.event.date));
        centre_pool.push_back(&all_centres);
      } else {
        centre_pool.push_back(&pool);
      }
    }

    const std::size_t day_offset_count = windows.front().all_days.size();
    std::vector<long> layout;  // window day offsets relative to the span start
    for (auto d : windows.front().all_days) layout.push_back(static_cast<long>(d - windows.front().first()));

    std::vector<double> null_stats(cfg.n_permutations);
    parallel_for(cfg.n_permutations, cfg.workers, [&](std::size_t r) {
      Rng rng = plan.stream({"h1", k, r, "perm"});
      std::vector<double> buf(day_offset_count);
      double total = 0.0;
      for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& pool = *centre_pool[i];
        const std::size_t c = pool[rng.below(pool.size())];
        const std::size_t first = c - static_cast<std::size_t>(k);
        for (std::size_t j = 0; j < layout.size(); ++j) buf[j] = vol[first + static_cast<std::size_t>(layout[j])];
        const double pseudo_median = stats::median(buf);

        // Control: free of real windows and of this pseudo window.
        auto overlaps = [&](std::size_t s) { return s + span > first && s < first + span; };
        const auto& matched = control_by_weekday[weekday_index(series.date_at(first))];
        std::optional<std::size_t> start;
        for (int attempt = 0; attempt < 64 && !matched.empty(); ++attempt) {
          const std::size_t s = matched[rng.below(matched.size())];
          if (!overlaps(s)) {
            start = s;
            break;
          }
        }
        if (!start) {
          std::vector<std::size_t> eligible;
          for (auto s : matched) {
            if (!overlaps(s)) eligible.push_back(s);
          }
          if (eligible.empty()) {
            for (auto s : control_starts) {
              if (!overlaps(s)) eligible.push_back(s);
            }
          }
          if (eligible.empty()) throw DataError("no control span available for the permutation null");
          start = eligible[rng.below(eligible.size())];
        }
        for (std::size_t j = 0; j < layout.size(); ++j) buf[j] = vol[*start + static_cast<std::size_t>(layout[j])];
        total += pseudo_median - stats::median(buf);
      }
      null_stats[r] = total / static_cast<double>(windows.size());
    });
    (void)n;

    stats::TestResult t;
    t.statistic = observed;
    t.p_raw = stats::permutation_pvalue(observed, null_stats, stats::Tail::two_sided, cfg.pvalue_rule);
    t.n_a = wr.events.size();
    t.n_b = wr.events.size();
    set_effect_size(t, window_medians, control_medians);
    const auto ci = stats::bootstrap_ci(diffs, stats::BootstrapStatistic::mean, cfg.bootstrap_iters, cfg.ci_level,
                                        plan, {"h1", k, 0, "bootstrap"});
    t.ci_low = ci.lo;
    t.ci_high = ci.hi;
    if (auto dci = bootstrap_d(window_medians, control_medians, true, cfg.bootstrap_iters, cfg.ci_level,
                               plan.stream({"h1", k, 0, "bootstrap_d"}))) {
      wr.d_ci_low = dci->lo;
      wr.d_ci_high = dci->hi;
    }
    wr.percent_change = percent_change(stats::mean(window_medians), stats::mean(control_medians));
    wr.aggregate = t;
    result.windows.push_back(std::move(wr));
  }

  std::vector<stats::TestResult*> family;
  for (auto& w : result.windows) family.push_back(&*w.aggregate);
  adjust_family(family, cfg.alpha);
  return result;
}

// --- H2: normalized pre- vs post-event volume -------------------------------

namespace {

struct PrePost {
  double pre_raw, post_raw, reference;
};

std::optional<PrePost> pre_post_at(const std::vector<double>& vol, long c, int k, const WindowConfig& cfg) {
  const long n = static_cast<long>(vol.size());
  const long lo = c + std::min<long>(cfg.reference_from, -k);
  if (lo < 0 || c + k >= n) return std::nullopt;
  return PrePost{range_mean(vol, c - k, c - 1), range_mean(vol, c + 1, c + k),
                 range_mean(vol, c + cfg.reference_from, c + cfg.reference_to)};
}

}  // namespace

HypothesisResult run_h2(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const RandomPlan& plan) {
  HypothesisResult result = start_result(AnalysisId::h2, events, cfg, plan, "window sizes");
  const auto& vol = series.volume;
  for (const int k : cfg.ks) {
    WindowResult wr;
    wr.k = k;
    wr.method = "permutation: event dates reassigned to eligible dates";
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto pp = pre_post_at(vol, offset_of(series, events[i]), k, cfg);
      if (!pp) {
        wr.skipped.push_back({i, events[i], "boundary"});
        continue;
      }
      if (pp->reference == 0.0) {
        wr.skipped.push_back({i, events[i], "zero reference"});
        continue;
      }
      EventRecord rec;
      rec.index = i;
      rec.event = events[i];
      rec.pre_mean = pp->pre_raw;
      rec.post_mean = pp->post_raw;
      rec.reference_mean = pp->reference;
      rec.window_value = pp->pre_raw / pp->reference;
      rec.reference_value = pp->post_raw / pp->reference;
      rec.difference = rec.window_value - rec.reference_value;
      rec.direction = rec.window_value > rec.reference_value ? Direction::anticipatory : Direction::reactive;
      wr.events.push_back(std::move(rec));
    }
    if (wr.events.empty()) throw DataError("all events skipped (k=" + std::to_string(k) + ")");

    const auto pre = centers_to_values(wr.events, &EventRecord::window_value);
    const auto post = centers_to_values(wr.events, &EventRecord::reference_value);
    const auto diffs = centers_to_values(wr.events, &EventRecord::difference);
    const double observed = stats::mean(diffs);

    std::vector<double> eligible_diffs;
    for (long c = 0; c < static_cast<long>(series.size()); ++c) {
      const auto pp = pre_post_at(vol, c, k, cfg);
      if (pp && pp->reference != 0.0) eligible_diffs.push_back((pp->pre_raw - pp->post_raw) / pp->reference);
    }
    const std::size_t used = wr.events.size();
    std::vector<double> null_stats(cfg.n_permutations);
    parallel_for(cfg.n_permutations, cfg.workers, [&](std::size_t r) {
      Rng rng = plan.stream({"h2", k, r, "perm"});
      double total = 0.0;
      for (std::size_t i = 0; i < used; ++i) total += eligible_diffs[rng.below(eligible_diffs.size())];
      null_stats[r] = total / static_cast<double>(used);
    });

    stats::TestResult t;
    t.statistic = observed;
    t.p_raw = stats::permutation_pvalue(observed, null_stats, stats::Tail::two_sided, cfg.pvalue_rule);
    t.n_a = used;
    t.n_b = used;
    if (used >= 2) {
      set_effect_size(t, pre, post);
    } else {
      wr.warnings.push_back("Cohen's d needs at least two usable events");
    }
    const auto ci = stats::bootstrap_ci(diffs, stats::BootstrapStatistic::mean, cfg.bootstrap_iters, cfg.ci_level,
                                        plan, {"h2", k, 0, "bootstrap"});
    t.ci_low = ci.lo;
    t.ci_high = ci.hi;
    if (used >= 2) {
      if (auto dci = bootstrap_d(pre, post, true, cfg.bootstrap_iters, cfg.ci_level,
                                 plan.stream({"h2", k, 0, "bootstrap_d"}))) {
        wr.d_ci_low = dci->lo;
        wr.d_ci_high = dci->hi;
      }
    }
    wr.p_one_sided = stats::permutation_pvalue(observed, null_stats, stats::Tail::greater, cfg.pvalue_rule);
    wr.aggregate = t;
    result.windows.push_back(std::move(wr));
  }

  std::vector<stats::TestResult*> family;
  for (auto& w : result.windows) family.push_back(&*w.aggregate);
  adjust_family(family, cfg.alpha);
  std::vector<double> one_sided;
  for (const auto& w : result.windows) one_sided.push_back(*w.p_one_sided);
  const auto bh = stats::benjamini_hochberg(one_sided, cfg.alpha);
  for (std::size_t i = 0; i < result.windows.size(); ++i) result.windows[i].p_one_sided_adjusted = bh.adjusted[i];
  return result;
}

// --- H3: per-event window vs global baseline ---------------------------------

HypothesisResult run_h3(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const RandomPlan& plan) {
  HypothesisResult result = start_result(AnalysisId::h3, events, cfg, plan, "all event x window tests");
  const auto& vol = series.volume;
  const std::size_t n = series.size();
  const double total_sum = std::accumulate(vol.begin(), vol.end(), 0.0);

  for (const int k : cfg.ks) {
    WindowResult wr;
    wr.k = k;
    wr.method = "permutation: random day sets vs remaining days";
    const auto occupied = occupied_days(series, events, k);
    std::vector<double> baseline;
    for (std::size_t d = 0; d < n; ++d) {
      if (!occupied[d]) baseline.push_back(vol[d]);
    }
    if (baseline.empty()) throw DataError("baseline is empty: event windows cover the entire series");
    const double baseline_mean = stats::mean(baseline);

    std::vector<EventWindow> windows;
    for (std::size_t i = 0; i < events.size(); ++i) {
      auto w = build_windows(series, events[i], k, cfg.exclude_event_day);
      if (!w) {
        wr.skipped.push_back({i, events[i], "boundary"});
        continue;
      }
      EventRecord rec;
      rec.index = i;
      rec.event = events[i];
      rec.window_value = stats::mean(gather(vol, w->all_days));
      rec.reference_value = baseline_mean;
      rec.difference = rec.window_value - baseline_mean;
      rec.percent_change = percent_change(rec.window_value, baseline_mean);
      wr.events.push_back(std::move(rec));
      windows.push_back(std::move(*w));
    }

    parallel_for(windows.size(), cfg.workers, [&](std::size_t e) {
      auto& rec = wr.events[e];
      const std::size_t sample = windows[e].all_days.size();
      Rng rng = plan.stream({"h3", k, rec.index, "perm"});
      std::vector<std::size_t> days(n);
      std::iota(days.begin(), days.end(), 0);
      std::vector<double> null_stats(cfg.n_permutations);
      for (auto& stat : null_stats) {
        double s = 0.0;
        for (std::size_t j = 0; j < sample; ++j) {
          const std::size_t pick = j + rng.below(n - j);
          std::swap(days[j], days[pick]);
          s += vol[days[j]];
        }
        stat = s / static_cast<double>(sample) - (total_sum - s) / static_cast<double>(n - sample);
      }
      stats::TestResult t;
      t.statistic = rec.difference;
      t.p_raw = stats::permutation_pvalue(rec.difference, null_stats, stats::Tail::two_sided, cfg.pvalue_rule);
      t.n_a = sample;
      t.n_b = baseline.size();
      rec.test = t;
    });
    result.windows.push_back(std::move(wr));
  }

  std::vector<stats::TestResult*> family;
  for (auto& w : result.windows) {
    for (auto& e : w.events) family.push_back(&*e.test);
  }
  adjust_family(family, cfg.alpha);
  return result;
}

// --- H4: window vs buffered-baseline emotion intensity -----------------------

HypothesisResult run_h4(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const RandomPlan& plan) {
  HypothesisResult result = start_result(AnalysisId::h4, events, cfg, plan, "window sizes");
  require_intensity(series);
  const std::size_t n = series.size();
  for (const int k : cfg.ks) {
    WindowResult wr;
    wr.k = k;
    const auto in_window = occupied_days(series, events, k);
    const auto in_buffer = occupied_days(series, events, std::max(k, cfg.buffer_days));
    std::vector<bool> window_day(n, false);
    for (std::size_t i = 0; i < events.size(); ++i) {
      auto w = build_windows(series, events[i], k, cfg.exclude_event_day);
      if (!w) {
        wr.skipped.push_back({i, events[i], "boundary"});
        continue;
      }
      for (auto d : w->all_days) window_day[d] = true;
      EventRecord rec;
      rec.index = i;
      rec.event = events[i];
      const auto vals = gather_present(series.intensity, w->all_days);
      if (!vals.empty()) rec.window_value = stats::mean(vals);
      wr.events.push_back(std::move(rec));
    }
    std::vector<double> window_vals, baseline_vals;
    for (std::size_t d = 0; d < n; ++d) {
      if (!series.intensity[d]) continue;
      if (window_day[d]) {
        window_vals.push_back(*series.intensity[d]);
      } else if (!in_window[d] && !in_buffer[d]) {
        baseline_vals.push_back(*series.intensity[d]);
      }
    }
    if (window_vals.size() < 2) {
      throw DataError("insufficient intensity data in event windows (k=" + std::to_string(k) + ")");
    }
    if (baseline_vals.size() < 2) {
      throw DataError("insufficient intensity data in baseline (k=" + std::to_string(k) + ")");
    }
    const double baseline_mean = stats::mean(baseline_vals);
    for (auto& rec : wr.events) {
      rec.reference_value = baseline_mean;
      rec.difference = rec.window_value - baseline_mean;
    }
    const auto mw = stats::mann_whitney(window_vals, baseline_vals);
    wr.method = "mann_whitney_" + std::string(stats::to_string(mw.method));
    stats::TestResult t;
    t.statistic = mw.u;
    t.p_raw = mw.p_two_sided;
    t.n_a = window_vals.size();
    t.n_b = baseline_vals.size();
    set_effect_size(t, window_vals, baseline_vals);
    if (auto dci = bootstrap_d(window_vals, baseline_vals, false, cfg.bootstrap_iters, cfg.ci_level,
                               plan.stream({"h4", k, 0, "bootstrap"}))) {
      t.ci_low = dci->lo;
      t.ci_high = dci->hi;
      wr.d_ci_low = dci->lo;
      wr.d_ci_high = dci->hi;
    }
    wr.percent_change = percent_change(stats::mean(window_vals), baseline_mean);
    wr.aggregate = t;
    result.windows.push_back(std::move(wr));
  }
  std::vector<stats::TestResult*> family;
  for (auto& w : result.windows) family.push_back(&*w.aggregate);
  adjust_family(family, cfg.alpha);
  return result;
}

// --- H5: per-event pre vs post emotion intensity -----------------------------

HypothesisResult run_h5(const DailySeries& series, std::span<const KeyEvent> events, const WindowConfig& cfg,
                        const RandomPlan& plan) {
  HypothesisResult result = start_result(AnalysisId::h5, events, cfg, plan, "all events x window sizes");
  require_intensity(series);
  std::size_t used = 0;
  for (const int k : cfg.ks) {
    WindowResult wr;
    wr.k = k;
    wr.method = "mann_whitney";
    for (std::size_t i = 0; i < events.size(); ++i) {
      const auto w = build_windows(series, events[i], k, true);
      if (!w) {
        wr.skipped.push_back({i, events[i], "boundary"});
        continue;
      }
      const auto pre = gather_present(series.intensity, w->pre_days);
      const auto post = gather_present(series.intensity, w->post_days);
      if (pre.size() < 2 || post.size() < 2) {
        wr.skipped.push_back({i, events[i], pre.size() < 2 ? "insufficient intensity (pre)" : "insufficient intensity (post)"});
        continue;
      }
      const auto mw = stats::mann_whitney(pre, post);
      EventRecord rec;
      rec.index = i;
      rec.event = events[i];
      rec.window_value = stats::mean(pre);
      rec.reference_value = stats::mean(post);
      rec.difference = rec.window_value - rec.reference_value;
      rec.direction = rec.window_value > rec.reference_value ? Direction::anticipatory : Direction::reactive;
      stats::TestResult t;
      t.statistic = mw.u;
      t.p_raw = mw.p_two_sided;
      t.n_a = pre.size();
      t.n_b = post.size();
      set_effect_size(t, pre, post);
      rec.test = t;
      wr.events.push_back(std::move(rec));
    }
    used += wr.events.size();
    result.windows.push_back(std::move(wr));
  }
  if (used == 0) throw DataError("all events skipped: insufficient intensity data around every event");
  std::vector<stats::TestResult*> family;
  for (auto& w : result.windows) {
    for (auto& e : w.events) family.push_back(&*e.test);
  }
  adjust_family(family, cfg.alpha);
  (void)plan;
  return result;
}

HypothesisResult run_analysis(AnalysisId id, const DailySeries& series, std::span<const KeyEvent> events,
                              const WindowConfig& cfg, const RandomPlan& plan) {
  switch (id) {
    case AnalysisId::h1: return run_h1(series, events, cfg, plan);
    case AnalysisId::h2: return run_h2(series, events, cfg, plan);
    case AnalysisId::h3: return run_h3(series, events, cfg, plan);
    case AnalysisId::h4: return run_h4(series, events, cfg, plan);
    case AnalysisId::h5: return run_h5(series, events, cfg, plan);
  }
  throw ConfigError("unknown analysis");
}

}  // namespace rear::eventstudy
