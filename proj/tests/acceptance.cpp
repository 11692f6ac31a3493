// Acceptance suite: one PASS/FAIL line per criterion, exit 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "rear/app.hpp"
#include "rear/cli.hpp"
#include "rear/filtering.hpp"
#include "rear/service.hpp"
#include "rear/stats.hpp"
#include "rear/synthetic.hpp"
#include "toy_corpus.hpp"

using namespace rear;
using eventstudy::AnalysisId;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_seconds > 0 && secs > limit_seconds) {
    o.pass = false;
    o.detail += "; over time limit " + std::to_string(limit_seconds) + " s";
  }
  std::ostringstream line;
  line.precision(2);
  line << std::fixed << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << secs << " s]  " << o.detail;
  std::cout << line.str() << std::endl;
  if (!o.pass) ++failures;
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

Outcome mann_whitney_oracle() {
  stats::Rng rng(500);
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(1 + rng.below(7));
    std::vector<double> b(1 + rng.below(7));
    const std::uint64_t levels = 2 + rng.below(6);  // few levels, so ties are common
    for (auto& x : a) x = static_cast<double>(rng.below(levels));
    for (auto& x : b) x = static_cast<double>(rng.below(levels));
    const auto got = stats::mann_whitney(a, b);
    if (got.method != stats::MannWhitneyMethod::exact) return {false, "not exact at trial " + std::to_string(trial)};
    worst = std::max(worst, std::abs(got.p_two_sided - oracle::mann_whitney_p(a, b)));
  }
  return {worst <= 1e-12, "500 pairs, max |p - oracle| = " + fmt(worst)};
}

Outcome bh_oracle() {
  stats::Rng rng(1000);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng.below(20));
    for (auto& x : p) x = rng.uniform() * (rng.below(3) == 0 ? 0.05 : 1.0);
    if (p.size() > 2 && rng.below(2)) p[rng.below(p.size())] = p[rng.below(p.size())];
    const auto got = stats::benjamini_hochberg(p, 0.05);
    const auto want = oracle::benjamini_hochberg(p, 0.05);
    if (got.adjusted != want.adjusted) return {false, "adjusted values differ at trial " + std::to_string(trial)};
    if (got.rejected != want.rejected) return {false, "rejections differ at trial " + std::to_string(trial)};
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[i] <= p[j] && got.rejected[j] && !got.rejected[i]) {
          return {false, "rejection set is not a sorted prefix at trial " + std::to_string(trial)};
        }
      }
    }
  }
  return {true, "1000 vectors, adjusted values and rejection sets identical"};
}

Outcome calibration() {
  synthetic::SeriesSpec spec;  // Poisson(20), 365 days, 6 events, no planted effect
  std::size_t h1_small = 0;
  std::size_t h3_small = 0;
  std::size_t h3_tests = 0;
  for (std::uint64_t seed = 201; seed <= 400; ++seed) {
    const auto syn = synthetic::make_series(spec, 10'000 + seed);
    const stats::RandomPlan plan(seed);
    auto h1cfg = eventstudy::WindowConfig::defaults(AnalysisId::h1);
    h1cfg.ks = {7};
    const auto h1 = eventstudy::run_h1(syn.series, syn.events, h1cfg, plan);
    h1_small += h1.windows.at(0).aggregate->p_raw < 0.05;
    const auto h3 = eventstudy::run_h3(syn.series, syn.events, eventstudy::WindowConfig::defaults(AnalysisId::h3), plan);
    for (const auto& e : h3.windows.at(0).events) {
      ++h3_tests;
      h3_small += e.test->p_raw < 0.05;
    }
  }
  const double h1_rate = static_cast<double>(h1_small) / 200.0;
  const double h3_rate = static_cast<double>(h3_small) / static_cast<double>(h3_tests);
  const bool ok = h1_rate >= 0.03 && h1_rate <= 0.08 && h3_rate <= 0.08;
  return {ok, "H1 k=7 share p<0.05 = " + fmt(h1_rate) + " (" + std::to_string(h1_small) +
                  "/200); H3 share p<0.05 = " + fmt(h3_rate) + " (" + std::to_string(h3_small) + "/" +
                  std::to_string(h3_tests) + ")"};
}

Outcome planted_effects() {
  std::size_t h1_hits = 0;
  std::size_t h3_flagged = 0;
  std::size_t h4_hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    synthetic::SeriesSpec vol;
    vol.volume_multiplier = 1.5;
    const auto syn = synthetic::make_series(vol, 20'000 + seed);
    const stats::RandomPlan plan(seed);
    const auto h1 = eventstudy::run_h1(syn.series, syn.events, eventstudy::WindowConfig::defaults(AnalysisId::h1), plan);
    for (const auto& w : h1.windows) {
      if (w.k == 7) h1_hits += *w.aggregate->p_adjusted < 0.05 && w.aggregate->effect_size_d.value_or(0) > 0.5;
    }
    const auto h3 = eventstudy::run_h3(syn.series, syn.events, eventstudy::WindowConfig::defaults(AnalysisId::h3), plan);
    for (const auto& e : h3.windows.at(0).events) h3_flagged += *e.test->p_adjusted < 0.05 && e.difference > 0;

    synthetic::SeriesSpec emo;
    emo.intensity_shift = -0.3;
    const auto syn4 = synthetic::make_series(emo, 30'000 + seed);
    const auto h4 = eventstudy::run_h4(syn4.series, syn4.events, eventstudy::WindowConfig::defaults(AnalysisId::h4), plan);
    for (const auto& w : h4.windows) {
      if (w.k == 7) h4_hits += *w.aggregate->p_adjusted < 0.05 && w.aggregate->effect_size_d.value_or(0) < 0;
    }
  }
  const double h3_mean = static_cast<double>(h3_flagged) / 100.0;
  const bool ok = h1_hits >= 95 && h3_mean >= 5.0 && h4_hits >= 95;
  return {ok, "H1 k=7 detected " + std::to_string(h1_hits) + "/100; H3 flagged " + fmt(h3_mean) +
                  "/6 per run; H4 k=7 negative and significant " + std::to_string(h4_hits) + "/100"};
}

Outcome filtering_equivalence() {
  const auto toy = testing::toy_corpus(50);
  if (toy.docs.size() != 50) return {false, "toy corpus size"};
  filtering::HighSalienceVocabulary vocab;
  vocab.terms = toy.vocab;
  const auto got = filtering::assign_layers(toy.docs, vocab, toy.movement);
  const auto want = oracle::layers(toy.docs, toy.vocab, toy.movement.seed_keywords);
  if (got.layer_of != want) return {false, "layer assignment differs from brute force"};
  for (int k = 0; k <= 8; ++k) {
    for (bool cumulative : {true, false}) {
      const auto mode = cumulative ? filtering::SelectionMode::cumulative : filtering::SelectionMode::exclusive;
      if (filtering::select_layer(got, k, mode) != oracle::select(want, k, cumulative)) {
        return {false, "select_layer differs at k=" + std::to_string(k)};
      }
    }
    if (k < 8) {
      const auto lo = filtering::select_layer(got, k);
      const auto hi = filtering::select_layer(got, k + 1);
      if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) return {false, "cumulative layers not nested"};
    }
  }
  // L0 precedence: every document naming the movement is L0, whatever its coverage
  for (const auto& d : toy.docs) {
    if (filtering::mentions_movement(d, toy.movement) && got.layer_of.at(d.id) != 0) return {false, "L0 precedence"};
  }
  // exact boundaries: 4 of 10 terms (0.40) is L1, 1 of 25 (0.04) is unassigned
  filtering::HighSalienceVocabulary ten;
  filtering::HighSalienceVocabulary twenty_five;
  for (std::size_t i = 0; i < 25; ++i) (i < 10 ? ten : twenty_five).terms.insert(testing::vterm(i));
  for (std::size_t i = 0; i < 10; ++i) twenty_five.terms.insert(testing::vterm(i));
  const std::vector<corpus::Document> forty = {testing::doc("forty", "v00 v01 v02 v03")};
  const std::vector<corpus::Document> four = {testing::doc("four", "v00")};
  const bool l1 = filtering::assign_layers(forty, ten, toy.movement).layer_of.at("forty") == 1;
  const bool none = filtering::assign_layers(four, twenty_five, toy.movement).layer_of.empty();
  std::size_t l0 = 0;
  for (const auto& [id, layer] : got.layer_of) l0 += layer == 0;
  return {l1 && none, "50 documents match brute force (" + std::to_string(got.layer_of.size()) + " assigned, " +
                          std::to_string(l0) + " in L0); 0.40 -> L1: " + (l1 ? "yes" : "no") +
                          "; 0.04 -> unassigned: " + (none ? "yes" : "no")};
}

Outcome hand_values() {
  const double d = stats::cohens_d(std::vector<double>{0, 2}, std::vector<double>{1, 3});
  std::map<std::string, double> m;
  for (auto name : corpus::kEmotionNames) m[std::string(name)] = 0.0;
  m["joy"] = 0.3;
  m["anger"] = 0.2;
  m["neutral"] = 0.5;
  const double intensity = corpus::emotion_intensity(corpus::EmotionVector::from_map(m));
  timeseries::DailySeries s = testing::series_of({1, 1, 1, 1, 10});
  const double threshold = timeseries::high_activity_flags(s).threshold;
  const auto bh = stats::benjamini_hochberg(std::vector<double>{0.01, 0.04, 0.20}, 0.05);
  const bool ok = std::abs(d + 0.70711) <= 1e-5 && std::abs(intensity - 0.5) <= 1e-12 &&
                  std::abs(threshold - 10.8499) <= 1e-3 && bh.adjusted == std::vector<double>{0.03, 0.06, 0.20};
  return {ok, "d = " + fmt(d, 6) + ", intensity = " + fmt(intensity, 12) + ", threshold = " + fmt(threshold, 7) +
                  ", BH = [" + fmt(bh.adjusted[0]) + ", " + fmt(bh.adjusted[1]) + ", " + fmt(bh.adjusted[2]) + "]"};
}

Outcome determinism() {
  const auto corpus = synthetic::make_corpus({}, 77);
  std::size_t compared = 0;
  for (auto id : {AnalysisId::h1, AnalysisId::h2, AnalysisId::h3, AnalysisId::h4, AnalysisId::h5}) {
    app::RunConfig cfg;
    cfg.seed = 42;
    cfg.permutations = 2000;
    const auto a = app::run_analysis(corpus.documents, corpus.events, cfg, id).document.dump(2);
    const auto b = app::run_analysis(corpus.documents, corpus.events, cfg, id).document.dump(2);
    cfg.workers = 8;
    const auto c = app::run_analysis(corpus.documents, corpus.events, cfg, id).document.dump(2);
    if (a != b || a != c) return {false, std::string(eventstudy::to_string(id)) + " output differs"};
    ++compared;
  }
  return {true, "h1..h5 byte-identical across repeats and workers 1 vs 8 (" + std::to_string(compared) + " analyses)"};
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "rear");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o;
  std::ostringstream e;
  const int code = app::cli_main(static_cast<int>(argv.size()), argv.data(), o, e);
  if (code != 0) std::cerr << e.str();
  if (out) *out = o.str();
  return code;
}

Outcome end_to_end() {
  const fs::path dir = fs::temp_directory_path() / "rear_acceptance_e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  synthetic::CorpusSpec spec;
  spec.series.lambda = 12;  // about 5,000 documents over 365 days
  const auto corpus = synthetic::make_corpus(spec, 5);
  {
    std::ofstream docs(dir / "export.jsonl");
    for (const auto& d : corpus.documents) docs << d.to_json().dump() << '\n';
    std::ofstream ev(dir / "events.json");
    ev << eventstudy::events_to_json(corpus.events).dump(2);
  }
  std::set<eventstudy::EventCategory> categories;
  for (const auto& e : corpus.events) categories.insert(e.category);
  const auto store = (dir / "store.jsonl").string();
  const auto out = (dir / "out").string();
  const auto events = (dir / "events.json").string();
  if (run_cli({"ingest", (dir / "export.jsonl").string(), "--store", store}) != 0) return {false, "ingest failed"};
  if (run_cli({"filter", "--corpus", store, "--out", out}) != 0) return {false, "filter failed"};
  if (run_cli({"series", "--corpus", store, "--out", out}) != 0) return {false, "series failed"};

  app::RunConfig defaults;
  app::Service service(app::load_corpus(std::vector<fs::path>{store}), eventstudy::load_events(events), defaults);
  std::string report_text;
  for (const char* h : {"h1", "h2", "h3", "h4", "h5"}) {
    if (run_cli({"analyze", h, "--corpus", store, "--events", events, "--out", out, "--seed", "42"}) != 0) {
      return {false, std::string(h) + " analyze failed"};
    }
    std::ifstream f(fs::path(out) / (std::string(h) + ".json"));
    const auto cli_doc = json::parse(f);
    auto reply = service.handle("POST", std::string("/analyze/") + h, {}, R"({"seed":42})");
    if (reply.status != 200) return {false, std::string(h) + " service status " + std::to_string(reply.status)};
    reply.body.erase("chart");
    if (reply.body != cli_doc) return {false, std::string(h) + ": CLI and service documents differ"};
  }
  if (run_cli({"report", "--result", out + "/h3.json", "--label", "metoo-all", "--output", out + "/table.md"}) != 0) {
    return {false, "report failed"};
  }
  const auto n_docs = corpus.documents.size();
  const bool ok = n_docs >= 4000 && n_docs <= 6000 && categories.size() == 3;
  return {ok, std::to_string(n_docs) + " documents, " + std::to_string(corpus.events.size()) +
                  " events; ingest, filter, series, h1..h5, report ran; CLI and service documents identical"};
}

}  // namespace

int main() {
  criterion("Mann-Whitney exact p vs full enumeration", 10, mann_whitney_oracle);
  criterion("Benjamini-Hochberg vs direct step-up", 5, bh_oracle);
  criterion("Calibration on 200 null series", 300, calibration);
  criterion("Planted-effect detection", 600, planted_effects);
  criterion("Filtering vs brute-force sets", 0, filtering_equivalence);
  criterion("Hand-value checks", 0, hand_values);
  criterion("Determinism at 1 and 8 workers", 0, determinism);
  criterion("End-to-end desk scale", 60, end_to_end);
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
