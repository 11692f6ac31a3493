#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rear/corpus.hpp"

namespace rear::filtering {

using corpus::Document;
using corpus::MovementSpec;

inline constexpr int kMaxLayer = 8;

// Minimum share of the high-salience vocabulary for L1..L8, in percent.
inline constexpr std::array<int, kMaxLayer> kLayerPercent = {40, 35, 30, 25, 20, 15, 10, 5};

struct CooccurrenceStats {
  std::map<std::string, std::size_t> counts;  // term -> number of L0 docs carrying it
  std::size_t l0_size = 0;
};

struct HighSalienceVocabulary {
  std::set<std::string> terms;
  std::size_t percentile_threshold = 0;
  double percentile = 99.0;
};

enum class SelectionMode { cumulative, exclusive };

std::string_view to_string(SelectionMode m);
std::optional<SelectionMode> parse_selection_mode(std::string_view s);

struct LayerAssignment {
  std::map<std::string, int> layer_of;  // document id -> 0..8; unassigned ids are absent

  static std::array<double, kMaxLayer> thresholds();

  // Exclusive count per layer (index 0..8).
  std::array<std::size_t, kMaxLayer + 1> layer_counts() const;
};

// True when any seed occurs in the title or body as a case-insensitive
// substring whose neighbours are not letters, digits or '_'.
bool mentions_movement(const Document& doc, const MovementSpec& movement);

// Throws DataError("movement has no explicit-mention documents") when no
// document mentions a seed keyword.
CooccurrenceStats cooccurrence_counts(std::span<const Document> docs, const MovementSpec& movement);

// Nearest-rank percentile over the per-term counts. Throws DataError on
// empty stats and ConfigError for a percentile outside (0, 100].
HighSalienceVocabulary high_salience_vocabulary(const CooccurrenceStats& stats, double percentile = 99.0);

// Share of the vocabulary present in the document (keyword set or text token).
double vocabulary_coverage(const Document& doc, const HighSalienceVocabulary& vocab);

// Throws DataError when the vocabulary is empty.
LayerAssignment assign_layers(std::span<const Document> docs, const HighSalienceVocabulary& vocab,
                              const MovementSpec& movement);

// Throws ConfigError for k outside 0..8.
std::set<std::string> select_layer(const LayerAssignment& assignment, int k,
                                   SelectionMode mode = SelectionMode::cumulative);

// "document_id,layer" rows sorted by id.
std::string layers_csv(const LayerAssignment& assignment);

// Per-layer exclusive counts with running cumulative totals.
nlohmann::json layer_summary_json(const LayerAssignment& assignment);
std::string layer_summary_markdown(const LayerAssignment& assignment);

// The documents of `docs` whose ids are in `ids`, in input order.
std::vector<Document> pick(std::span<const Document> docs, const std::set<std::string>& ids);

}  // namespace rear::filtering
