#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace necorr {

/// A named-entity mention located in whitespace-tokenized text.
/// end_word is exclusive; surface is the covered words joined by one space.
struct EntitySpan {
  int start_word = 0;
  int end_word = 0;
  std::string surface;

  bool operator==(const EntitySpan&) const = default;
};

/// Pluggable mention locator. Implementations must return non-overlapping
/// spans sorted by start_word.
class Tagger {
public:
  virtual ~Tagger() = default;
  virtual std::vector<EntitySpan> tag(std::string_view text) const = 0;
};

/// Deterministic offline tagger: longest-match, leftmost-first,
/// case-insensitive lookup against a fixed surface set.
class GazetteerTagger : public Tagger {
public:
  explicit GazetteerTagger(const std::vector<std::string>& surfaces);
  /// One surface per line, UTF-8.
  static GazetteerTagger from_file(const std::string& path);

  std::vector<EntitySpan> tag(std::string_view text) const override;

private:
  // Lowercased word sequences, keyed by their joined form.
  std::unordered_set<std::string> phrases_;
  size_t max_words_ = 0;
};

/// Remote tagger calling an external HTTP endpoint:
///   POST {"text": str, "labels": [str]}
///   ->   {"entities": [{"start_word": int, "end_word": int, "surface": str}]}
/// In-flight requests are bounded; each request has a timeout.
class RemoteTagger : public Tagger {
public:
  struct Options {
    std::string endpoint;  // e.g. http://host:port/tag
    std::vector<std::string> labels;
    int timeout_ms = 10000;
    int max_in_flight = 4;
  };

  explicit RemoteTagger(Options options);
  ~RemoteTagger() override;

  std::vector<EntitySpan> tag(std::string_view text) const override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace necorr
