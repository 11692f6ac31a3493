#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rear/date.hpp"

namespace rear::corpus {

inline constexpr std::size_t kEmotionCount = 28;

// The 27 GoEmotions categories followed by "neutral".
inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "admiration", "amusement",   "anger",       "annoyance",      "approval", "caring",
    "confusion",  "curiosity",   "desire",      "disappointment", "disapproval", "disgust",
    "embarrassment", "excitement", "fear",      "gratitude",      "grief",    "joy",
    "love",       "nervousness", "optimism",    "pride",          "realization", "relief",
    "remorse",    "sadness",     "surprise",    "neutral"};

inline constexpr std::size_t kNeutralIndex = kEmotionCount - 1;

std::optional<std::size_t> emotion_index(std::string_view name);

// Multi-label emotion probabilities; does not have to sum to one.
class EmotionVector {
 public:
  EmotionVector() { probabilities_.fill(0.0); }

  // Throws DataError naming the first missing, unknown or out-of-range category.
  static EmotionVector from_map(const std::map<std::string, double>& probabilities);
  static EmotionVector from_json(const nlohmann::json& j);

  double operator[](std::size_t i) const { return probabilities_[i]; }
  double at(std::string_view name) const;
  const std::array<double, kEmotionCount>& values() const { return probabilities_; }

  nlohmann::json to_json() const;

 private:
  std::array<double, kEmotionCount> probabilities_;
};

// Sum of the 27 non-neutral probabilities.
double emotion_intensity(const EmotionVector& vec);

enum class Platform { news, reddit };

std::string_view to_string(Platform p);
std::optional<Platform> parse_platform(std::string_view s);

struct Document {
  std::string id;
  Platform platform = Platform::news;
  Timestamp published_at{};
  std::string title;
  std::string body;
  std::vector<std::string> keywords;  // lowercase, sorted, unique
  std::optional<EmotionVector> emotions;
  std::optional<std::string> url;

  bool has_keyword(std::string_view term) const;
  nlohmann::json to_json() const;  // canonical record
};

// Lowercases, sorts and deduplicates.
std::vector<std::string> normalize_keywords(std::vector<std::string> keywords);

struct MovementSpec {
  std::string name;
  std::vector<std::string> seed_keywords;

  // Throws ConfigError unless there is at least one non-empty, lowercase seed.
  void validate() const;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::pair<std::size_t, std::string>> rejection_reasons;  // (record index, reason)
  std::size_t duplicate_ids = 0;

  std::size_t total() const { return accepted + rejected; }
  nlohmann::json to_json() const;
};

enum class Adapter { canonical, reddit_export, news_export };

// Throws ConfigError for names other than the three adapters.
Adapter parse_adapter(std::string_view name);

// Converts one JSON record in the adapter's layout into a Document.
// Throws DataError with the rejection reason.
Document decode_record(const nlohmann::json& record, Adapter adapter);

// Append-only document store with an in-memory id index. When opened on a
// file, accepted documents are appended to it as canonical records.
// Writes are serialized; const reads are safe to share once ingest is done.
class DocumentStore {
 public:
  DocumentStore() = default;

  // Loads existing canonical records (if the file exists) and appends
  // future accepted documents to it.
  static DocumentStore open(const std::filesystem::path& path);

  // Read-only load of a canonical file. Malformed records raise DataError.
  static DocumentStore load(const std::filesystem::path& path);

  DocumentStore(DocumentStore&&) noexcept;
  DocumentStore& operator=(DocumentStore&&) noexcept;
  ~DocumentStore();

  // False if a document with this id already exists.
  bool add(Document doc);

  const Document* find(std::string_view id) const;
  std::span<const Document> documents() const { return docs_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  // Documents of one platform, or every document when platform is empty.
  std::vector<Document> subset(std::optional<Platform> platform) const;

  // Earliest and latest UTC publication day. Throws DataError when empty.
  std::pair<Date, Date> date_span() const;

 private:
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unique_ptr<std::ofstream> sink_;
  std::unique_ptr<std::mutex> write_mutex_ = std::make_unique<std::mutex>();
};

// Reads one record per line from `path` in the adapter's layout and adds the
// valid ones to `store`. Bad lines are rejected individually.
// Throws IoError when the file cannot be read.
IngestReport ingest_documents(const std::filesystem::path& path, Adapter adapter, DocumentStore& store);

// Same, for an in-memory stream of lines.
IngestReport ingest_lines(std::istream& in, Adapter adapter, DocumentStore& store);

// Lowercased tokens of `text`: runs of letters/digits/underscore (bytes above
// 0x7f count as letters), optionally led by a single '#'.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view s);

// Top-k tokens of title + body by frequency, ties broken lexicographically.
// Stopwords and tokens without any letter or digit are dropped.
std::vector<std::string> fallback_keywords(const Document& doc, std::size_t k,
                                           const std::set<std::string>& stopwords);

// Short English function-word list used when ingest fills in keywords.
const std::set<std::string>& default_stopwords();

// Records without keywords get this many fallback keywords at ingest.
inline constexpr std::size_t kFallbackKeywordCount = 10;

}  // namespace rear::corpus
