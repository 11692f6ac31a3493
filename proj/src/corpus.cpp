#include "rear/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rear/error.hpp"

namespace rear::corpus {

using nlohmann::json;

std::optional<std::size_t> emotion_index(std::string_view name) {
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return i;
  }
  return std::nullopt;
}

EmotionVector EmotionVector::from_map(const std::map<std::string, double>& probabilities) {
  EmotionVector v;
  std::array<bool, kEmotionCount> seen{};
  for (const auto& [name, p] : probabilities) {
    const auto idx = emotion_index(name);
    if (!idx) throw DataError("unknown emotion category: " + name);
    if (!(p >= 0.0 && p <= 1.0)) throw DataError("emotion probability out of range: " + name);
    v.probabilities_[*idx] = p;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (!seen[i]) throw DataError("missing emotion category: " + std::string(kEmotionNames[i]));
  }
  return v;
}

EmotionVector EmotionVector::from_json(const json& j) {
  if (!j.is_object()) throw DataError("emotions must be an object or null");
  std::map<std::string, double> m;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) throw DataError("emotion probability not a number: " + name);
    m[name] = value.get<double>();
  }
  return from_map(m);
}

double EmotionVector::at(std::string_view name) const {
  const auto idx = emotion_index(name);
  if (!idx) throw DataError("unknown emotion category: " + std::string(name));
  return probabilities_[*idx];
}

json EmotionVector::to_json() const {
  json j = json::object();
  for (std::size_t i = 0; i < kEmotionCount; ++i) j[std::string(kEmotionNames[i])] = probabilities_[i];
  return j;
}

double emotion_intensity(const EmotionVector& vec) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (i != kNeutralIndex) sum += vec[i];
  }
  return sum;
}

std::string_view to_string(Platform p) { return p == Platform::news ? "news" : "reddit"; }

std::optional<Platform> parse_platform(std::string_view s) {
  if (s == "news") return Platform::news;
  if (s == "reddit") return Platform::reddit;
  return std::nullopt;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> normalize_keywords(std::vector<std::string> keywords) {
  for (auto& k : keywords) k = to_lower(k);
  std::erase_if(keywords, [](const std::string& k) { return k.empty(); });
  std::sort(keywords.begin(), keywords.end());
  keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
  return keywords;
}

bool Document::has_keyword(std::string_view term) const {
  return std::binary_search(keywords.begin(), keywords.end(), term);
}

json Document::to_json() const {
  json j;
  j["id"] = id;
  j["platform"] = std::string(to_string(platform));
  j["published_at"] = format_timestamp(published_at);
  j["title"] = title;
  j["body"] = body;
  j["keywords"] = keywords;
  j["emotions"] = emotions ? emotions->to_json() : json(nullptr);
  if (url) j["url"] = *url;
  return j;
}

void MovementSpec::validate() const {
  if (seed_keywords.empty()) throw ConfigError("movement '" + name + "' needs at least one seed keyword");
  for (const auto& s : seed_keywords) {
    if (s.empty()) throw ConfigError("movement '" + name + "' has an empty seed keyword");
    if (s != to_lower(s)) throw ConfigError("seed keyword must be lowercase: " + s);
  }
}

json IngestReport::to_json() const {
  json reasons = json::array();
  for (const auto& [index, reason] : rejection_reasons) reasons.push_back({{"record", index}, {"reason", reason}});
  return {{"accepted", accepted},
          {"rejected", rejected},
          {"duplicate_ids", duplicate_ids},
          {"rejection_reasons", reasons}};
}

Adapter parse_adapter(std::string_view name) {
  if (name == "canonical") return Adapter::canonical;
  if (name == "reddit_export") return Adapter::reddit_export;
  if (name == "news_export") return Adapter::news_export;
  throw ConfigError("unknown adapter: " + std::string(name));
}

namespace {

const json* field(const json& record, std::string_view name) {
  const auto it = record.find(name);
  if (it == record.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string string_field(const json& record, std::string_view name, std::string_view label) {
  const json* f = field(record, name);
  if (!f) return {};
  if (!f->is_string()) throw DataError("field '" + std::string(label) + "' must be a string");
  return f->get<std::string>();
}

std::string required_id(const json& record, std::string_view name) {
  const json* f = field(record, name);
  if (!f) throw DataError("missing id");
  std::string id;
  if (f->is_string()) {
    id = f->get<std::string>();
  } else if (f->is_number_integer()) {
    id = f->dump();
  } else {
    throw DataError("field 'id' must be a string");
  }
  if (id.empty()) throw DataError("missing id");
  return id;
}

Timestamp required_timestamp(const json& record, std::string_view name, bool allow_epoch) {
  const json* f = field(record, name);
  if (!f) throw DataError("missing timestamp");
  if (f->is_string()) {
    const auto t = parse_timestamp(f->get_ref<const std::string&>());
    if (!t) throw DataError("invalid timestamp");
    return *t;
  }
  if (allow_epoch && f->is_number()) {
    const double secs = f->get<double>();
    if (!std::isfinite(secs)) throw DataError("invalid timestamp");
    return Timestamp{std::chrono::seconds{static_cast<long long>(std::floor(secs))}};
  }
  throw DataError("invalid timestamp");
}

std::vector<std::string> keyword_field(const json& record) {
  const json* f = field(record, "keywords");
  if (!f) return {};
  if (!f->is_array()) throw DataError("field 'keywords' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& k : *f) {
    if (!k.is_string()) throw DataError("field 'keywords' must be an array of strings");
    out.push_back(k.get<std::string>());
  }
  return normalize_keywords(std::move(out));
}

std::optional<EmotionVector> emotion_field(const json& record) {
  const json* f = field(record, "emotions");
  if (!f) return std::nullopt;
  return EmotionVector::from_json(*f);
}

std::optional<std::string> optional_string(const json& record, std::string_view name) {
  const json* f = field(record, name);
  if (!f) return std::nullopt;
  if (!f->is_string()) throw DataError("field '" + std::string(name) + "' must be a string");
  return f->get<std::string>();
}

Platform canonical_platform(const json& record) {
  const json* f = field(record, "platform");
  if (!f || !f->is_string()) throw DataError("missing platform");
  const auto& value = f->get_ref<const std::string&>();
  if (auto p = parse_platform(value)) return *p;
  if (value == "video") {
    // Embedded video inherits the platform of the post that embeds it.
    const json* host = field(record, "embedded_in");
    if (host && host->is_string()) {
      if (auto p = parse_platform(host->get_ref<const std::string&>())) return *p;
    }
    throw DataError("video record without embedded_in platform");
  }
  throw DataError("invalid platform: " + value);
}

}  // namespace

Document decode_record(const json& record, Adapter adapter) {
  if (!record.is_object()) throw DataError("record is not a JSON object");
  Document doc;
  switch (adapter) {
    case Adapter::canonical:
      doc.id = required_id(record, "id");
      doc.platform = canonical_platform(record);
      doc.published_at = required_timestamp(record, "published_at", false);
      doc.title = string_field(record, "title", "title");
      doc.body = string_field(record, "body", "body");
      doc.url = optional_string(record, "url");
      break;
    case Adapter::reddit_export: {
      doc.id = required_id(record, "id");
      doc.platform = Platform::reddit;
      doc.published_at = required_timestamp(record, "created_utc", true);
      doc.title = string_field(record, "title", "title");
      doc.body = string_field(record, "selftext", "selftext");
      if (auto link = optional_string(record, "permalink")) {
        doc.url = (!link->empty() && link->front() == '/') ? "https://www.reddit.com" + *link : *link;
      } else {
        doc.url = optional_string(record, "url");
      }
      break;
    }
    case Adapter::news_export:
      doc.id = required_id(record, field(record, "article_id") ? "article_id" : "id");
      doc.platform = Platform::news;
      doc.published_at = required_timestamp(record, "published", false);
      doc.title = string_field(record, "headline", "headline");
      doc.body = string_field(record, "content", "content");
      doc.url = optional_string(record, "url");
      break;
  }
  doc.keywords = keyword_field(record);
  if (doc.keywords.empty()) doc.keywords = fallback_keywords(doc, kFallbackKeywordCount, default_stopwords());
  doc.emotions = emotion_field(record);
  return doc;
}

DocumentStore::DocumentStore(DocumentStore&&) noexcept = default;
DocumentStore& DocumentStore::operator=(DocumentStore&&) noexcept = default;
DocumentStore::~DocumentStore() = default;

DocumentStore DocumentStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read store: " + path.string());
  DocumentStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      store.add(decode_record(json::parse(line), Adapter::canonical));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed record");
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

DocumentStore DocumentStore::open(const std::filesystem::path& path) {
  DocumentStore store = std::filesystem::exists(path) ? load(path) : DocumentStore{};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  store.sink_ = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*store.sink_) throw IoError("cannot open store for writing: " + path.string());
  return store;
}

bool DocumentStore::add(Document doc) {
  std::lock_guard lock(*write_mutex_);
  if (index_.contains(doc.id)) return false;
  if (sink_) {
    *sink_ << doc.to_json().dump() << '\n';
    sink_->flush();
  }
  index_.emplace(doc.id, docs_.size());
  docs_.push_back(std::move(doc));
  return true;
}

const Document* DocumentStore::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &docs_[it->second];
}

std::vector<Document> DocumentStore::subset(std::optional<Platform> platform) const {
  std::vector<Document> out;
  for (const auto& d : docs_) {
    if (!platform || d.platform == *platform) out.push_back(d);
  }
  return out;
}

std::pair<Date, Date> DocumentStore::date_span() const {
  if (docs_.empty()) throw DataError("document store is empty");
  auto [lo, hi] = std::minmax_element(docs_.begin(), docs_.end(), [](const Document& a, const Document& b) {
    return a.published_at < b.published_at;
  });
  return {day_of(lo->published_at), day_of(hi->published_at)};
}

IngestReport ingest_lines(std::istream& in, Adapter adapter, DocumentStore& store) {
  IngestReport report;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t record = index++;
    auto reject = [&](std::string reason) {
      ++report.rejected;
      report.rejection_reasons.emplace_back(record, std::move(reason));
    };
    json parsed;
    try {
      parsed = json::parse(line);
    } catch (const json::exception&) {
      reject("malformed json");
      continue;
    }
    try {
      Document doc = decode_record(parsed, adapter);
      std::string id = doc.id;
      if (store.add(std::move(doc))) {
        ++report.accepted;
      } else {
        ++report.duplicate_ids;
        reject("duplicate id: " + id);
      }
    } catch (const DataError& e) {
      reject(e.what());
    } catch (const json::exception& e) {
      reject(std::string("invalid record: ") + e.what());
    }
  }
  return report;
}

IngestReport ingest_documents(const std::filesystem::path& path, Adapter adapter, DocumentStore& store) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read corpus file: " + path.string());
  return ingest_lines(in, adapter, store);
}

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool hashtag = c == '#' && i + 1 < text.size() && is_word_byte(static_cast<unsigned char>(text[i + 1]));
    if (!hashtag && !is_word_byte(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    i += hashtag ? 2 : 1;
    while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back(to_lower(text.substr(start, i - start)));
  }
  return tokens;
}

std::vector<std::string> fallback_keywords(const Document& doc, std::size_t k,
                                           const std::set<std::string>& stopwords) {
  std::map<std::string, std::size_t> freq;
  for (const auto* text : {&doc.title, &doc.body}) {
    for (auto& tok : tokenize(*text)) {
      if (stopwords.contains(tok)) continue;
      if (std::none_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; })) {
        continue;
      }
      ++freq[std::move(tok)];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].first);
  return out;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",     "about", "after", "all",   "also",  "an",    "and",   "any",   "are",   "as",    "at",
      "be",    "been",  "but",   "by",    "can",   "could", "did",   "do",    "does",  "for",   "from",
      "had",   "has",   "have",  "he",    "her",   "his",   "how",   "i",     "if",    "in",    "into",
      "is",    "it",    "its",   "just",  "me",    "more",  "my",    "no",    "not",   "of",    "on",
      "one",   "or",    "our",   "out",   "she",   "so",    "some",  "than",  "that",  "the",   "their",
      "them",  "then",  "there", "these", "they",  "this",  "those", "to",    "up",    "us",    "was",
      "we",    "were",  "what",  "when",  "which", "who",   "will",  "with",  "would", "you",   "your"};
  return words;
}

}  // namespace rear::corpus
