#include "rear/filtering.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "rear/error.hpp"

namespace rear::filtering {

std::string_view to_string(SelectionMode m) { return m == SelectionMode::cumulative ? "cumulative" : "exclusive"; }

std::optional<SelectionMode> parse_selection_mode(std::string_view s) {
  if (s == "cumulative") return SelectionMode::cumulative;
  if (s == "exclusive") return SelectionMode::exclusive;
  return std::nullopt;
}

std::array<double, kMaxLayer> LayerAssignment::thresholds() {
  std::array<double, kMaxLayer> t{};
  for (std::size_t i = 0; i < kMaxLayer; ++i) t[i] = kLayerPercent[i] / 100.0;
  return t;
}

std::array<std::size_t, kMaxLayer + 1> LayerAssignment::layer_counts() const {
  std::array<std::size_t, kMaxLayer + 1> counts{};
  for (const auto& [id, layer] : layer_of) ++counts[static_cast<std::size_t>(layer)];
  return counts;
}

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool contains_bounded(const std::string& haystack, const std::string& needle) {
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_byte(static_cast<unsigned char>(haystack[pos - 1]));
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == haystack.size() || !is_word_byte(static_cast<unsigned char>(haystack[end]));
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

bool mentions_movement(const Document& doc, const MovementSpec& movement) {
  const std::string title = corpus::to_lower(doc.title);
  const std::string body = corpus::to_lower(doc.body);
  for (const auto& seed : movement.seed_keywords) {
    const std::string needle = corpus::to_lower(seed);
    if (needle.empty()) continue;
    if (contains_bounded(title, needle) || contains_bounded(body, needle)) return true;
  }
  return false;
}

CooccurrenceStats cooccurrence_counts(std::span<const Document> docs, const MovementSpec& movement) {
  std::set<std::string> seeds;
  for (const auto& s : movement.seed_keywords) seeds.insert(corpus::to_lower(s));
  CooccurrenceStats stats;
  for (const auto& doc : docs) {
    if (!mentions_movement(doc, movement)) continue;
    ++stats.l0_size;
    for (const auto& term : doc.keywords) {
      if (!seeds.contains(term)) ++stats.counts[term];
    }
  }
  if (stats.l0_size == 0) throw DataError("movement has no explicit-mention documents");
  return stats;
}

HighSalienceVocabulary high_salience_vocabulary(const CooccurrenceStats& stats, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) throw ConfigError("percentile must lie in (0, 100]");
  if (stats.counts.empty()) throw DataError("co-occurrence statistics are empty");
  std::vector<std::size_t> counts;
  counts.reserve(stats.counts.size());
  for (const auto& [term, c] : stats.counts) counts.push_back(c);
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(counts.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, counts.size());

  HighSalienceVocabulary vocab;
  vocab.percentile = percentile;
  vocab.percentile_threshold = counts[rank - 1];
  for (const auto& [term, c] : stats.counts) {
    if (c >= vocab.percentile_threshold) vocab.terms.insert(term);
  }
  return vocab;
}

namespace {

std::size_t covered_terms(const Document& doc, const HighSalienceVocabulary& vocab) {
  std::unordered_set<std::string> tokens;
  for (auto& t : corpus::tokenize(doc.title)) tokens.insert(std::move(t));
  for (auto& t : corpus::tokenize(doc.body)) tokens.insert(std::move(t));
  std::size_t hits = 0;
  for (const auto& term : vocab.terms) {
    if (doc.has_keyword(term) || tokens.contains(term)) ++hits;
  }
  return hits;
}

// Smallest layer whose percentage the coverage meets, compared in integers so
// that exact boundaries such as 4/10 land on the intended side.
std::optional<int> proportional_layer(std::size_t hits, std::size_t vocab_size) {
  for (std::size_t j = 0; j < kMaxLayer; ++j) {
    if (hits * 100 >= static_cast<std::size_t>(kLayerPercent[j]) * vocab_size) return static_cast<int>(j) + 1;
  }
  return std::nullopt;
}

}  // namespace

double vocabulary_coverage(const Document& doc, const HighSalienceVocabulary& vocab) {
  if (vocab.terms.empty()) return 0.0;
  return static_cast<double>(covered_terms(doc, vocab)) / static_cast<double>(vocab.terms.size());
}

LayerAssignment assign_layers(std::span<const Document> docs, const HighSalienceVocabulary& vocab,
                              const MovementSpec& movement) {
  if (vocab.terms.empty()) throw DataError("high-salience vocabulary is empty");
  LayerAssignment out;
  for (const auto& doc : docs) {
    if (mentions_movement(doc, movement)) {
      out.layer_of[doc.id] = 0;
      continue;
    }
    if (auto layer = proportional_layer(covered_terms(doc, vocab), vocab.terms.size())) {
      out.layer_of[doc.id] = *layer;
    }
  }
  return out;
}

std::set<std::string> select_layer(const LayerAssignment& assignment, int k, SelectionMode mode) {
  if (k < 0 || k > kMaxLayer) throw ConfigError("layer must be between 0 and 8, got " + std::to_string(k));
  std::set<std::string> ids;
  for (const auto& [id, layer] : assignment.layer_of) {
    if (mode == SelectionMode::cumulative ? layer <= k : layer == k) ids.insert(id);
  }
  return ids;
}

std::string layers_csv(const LayerAssignment& assignment) {
  std::ostringstream out;
  out << "document_id,layer\n";
  for (const auto& [id, layer] : assignment.layer_of) {
    const bool quote = id.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out << '"';
      for (char c : id) out << (c == '"' ? "\"\"" : std::string(1, c));
      out << '"';
    } else {
      out << id;
    }
    out << ',' << layer << '\n';
  }
  return out.str();
}

nlohmann::json layer_summary_json(const LayerAssignment& assignment) {
  const auto counts = assignment.layer_counts();
  nlohmann::json rows = nlohmann::json::array();
  std::size_t running = 0;
  for (std::size_t j = 0; j <= kMaxLayer; ++j) {
    running += counts[j];
    rows.push_back({{"layer", j}, {"exclusive", counts[j]}, {"cumulative", running}});
  }
  return rows;
}

std::string layer_summary_markdown(const LayerAssignment& assignment) {
  const auto counts = assignment.layer_counts();
  std::ostringstream out;
  out << "| Layer | Exclusive | Cumulative |\n|---|---:|---:|\n";
  std::size_t running = 0;
  for (std::size_t j = 0; j <= kMaxLayer; ++j) {
    running += counts[j];
    out << "| L" << j << " | " << (counts[j] == 0 ? std::string("---") : std::to_string(counts[j])) << " | "
        << running << " |\n";
  }
  return out.str();
}

std::vector<Document> pick(std::span<const Document> docs, const std::set<std::string>& ids) {
  std::vector<Document> out;
  for (const auto& d : docs) {
    if (ids.contains(d.id)) out.push_back(d);
  }
  return out;
}

}  // namespace rear::filtering
