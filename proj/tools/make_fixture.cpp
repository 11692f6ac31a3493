// Writes a seeded synthetic corpus (canonical JSON lines) and its events.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rear/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic corpus with planted event effects", "rear_make_fixture"};
  std::string corpus_out = "synthetic_corpus.jsonl";
  std::string events_out = "synthetic_events.json";
  std::uint64_t seed = 7;
  rear::synthetic::CorpusSpec spec;
  app.add_option("--corpus-out", corpus_out)->capture_default_str();
  app.add_option("--events-out", events_out)->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  app.add_option("--days", spec.series.days)->capture_default_str();
  app.add_option("--lambda", spec.series.lambda, "Mean documents per day")->capture_default_str();
  app.add_option("--n-events", spec.series.n_events)->capture_default_str();
  app.add_option("--volume-multiplier", spec.series.volume_multiplier)->capture_default_str();
  app.add_option("--intensity-shift", spec.series.intensity_shift)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = rear::synthetic::make_corpus(spec, seed);
    std::ofstream docs(corpus_out);
    for (const auto& d : corpus.documents) docs << d.to_json().dump() << '\n';
    std::ofstream events(events_out);
    events << rear::eventstudy::events_to_json(corpus.events).dump(2) << '\n';
    if (!docs || !events) {
      std::cerr << "rear_make_fixture: write failed\n";
      return 2;
    }
    std::cerr << "wrote " << corpus.documents.size() << " documents to " << corpus_out << " and "
              << corpus.events.size() << " events to " << events_out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "rear_make_fixture: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
