#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace necorr {

using SegmentId = uint16_t;

/// Ternary articulatory feature values for one IPA segment: one entry per
/// feature, each in {-1, 0, +1}.
struct FeatureVector {
  std::vector<int8_t> values;

  bool operator==(const FeatureVector&) const = default;
};

/// Immutable table mapping IPA base segments to articulatory feature vectors.
/// Loaded once; all lookups afterwards are pure and thread-safe.
class FeatureTable {
public:
  /// Parses the TSV format: header row naming the features, then one row per
  /// segment with values in {-, 0, +}. Rejects duplicate segments, ragged
  /// rows, and two segments sharing a feature vector (the similarity math
  /// needs segment -> vector to be injective).
  static FeatureTable from_tsv(std::string_view tsv);

  /// The table compiled into the binary (data/ipa_features.tsv).
  static const FeatureTable& embedded();

  int feature_count() const { return feature_count_; }
  size_t segment_count() const { return segments_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  std::optional<SegmentId> find(std::string_view segment) const;
  const std::string& segment_name(SegmentId id) const { return segments_[id]; }
  const FeatureVector& features(SegmentId id) const { return vectors_[id]; }

  /// Normalized Hamming distance between the two segments' feature vectors:
  /// count of differing positions / feature_count. In [0, 1], zero iff equal.
  double substitution_cost(SegmentId a, SegmentId b) const {
    return sub_costs_[static_cast<size_t>(a) * segments_.size() + b];
  }

  /// Smallest substitution cost over distinct segment pairs (> 0).
  double min_substitution_cost() const { return min_sub_cost_; }

private:
  std::vector<std::string> segments_;
  std::vector<FeatureVector> vectors_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, SegmentId> by_name_;
  std::vector<double> sub_costs_;
  double min_sub_cost_ = 0.0;
  int feature_count_ = 0;
};

/// A phoneme sequence. Every segment is validated against a FeatureTable at
/// construction; unknown segments are rejected. May be empty.
class IpaString {
public:
  IpaString() = default;
  explicit IpaString(std::vector<SegmentId> ids) : ids_(std::move(ids)) {}

  /// Parses a space-separated segment string ("k æ t").
  static IpaString parse(std::string_view spaced, const FeatureTable& table);

  size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  SegmentId operator[](size_t i) const { return ids_[i]; }
  const std::vector<SegmentId>& ids() const { return ids_; }

  std::string to_string(const FeatureTable& table) const;

  bool operator==(const IpaString&) const = default;

private:
  std::vector<SegmentId> ids_;
};

/// Alignment costs for feature_edit_distance. Substitution cost always comes
/// from the feature table; insert and delete must be equal so the distance
/// stays symmetric.
struct EditCosts {
  double insert_cost = 1.0;
  double delete_cost = 1.0;
};

/// Pronunciation dictionary: word -> IPA segments. File format is one entry
/// per line, `word<TAB>segments-space-separated`, UTF-8.
class Lexicon {
public:
  static Lexicon from_tsv(std::string_view tsv, const FeatureTable& table);
  static Lexicon from_file(const std::string& path, const FeatureTable& table);
  static const Lexicon& embedded();

  const IpaString* lookup(std::string_view lowercased_word) const;
  size_t size() const { return entries_.size(); }

private:
  std::unordered_map<std::string, IpaString> entries_;
};

/// Letter-to-sound fallback for out-of-vocabulary words. Rules are applied
/// longest-match-first on the lowercased word; characters with no rule
/// contribute nothing.
class LetterRules {
public:
  static LetterRules from_tsv(std::string_view tsv, const FeatureTable& table);
  static const LetterRules& embedded();

  IpaString apply(std::string_view lowercased_word) const;

private:
  std::unordered_map<std::string, std::vector<SegmentId>> rules_;
  size_t max_rule_len_ = 0;
};

/// Bundles the feature table, lexicon and fallback rules behind one
/// text -> IPA entry point.
class Phonemizer {
public:
  Phonemizer(const FeatureTable& table, const Lexicon& lexicon, const LetterRules& rules)
      : table_(&table), lexicon_(&lexicon), rules_(&rules) {}

  /// All-embedded instance; cheap to copy, safe to share across threads.
  static const Phonemizer& embedded();

  /// Lowercases, strips punctuation, splits on whitespace, then maps each
  /// token through the lexicon (fallback: letter rules) and concatenates.
  /// Empty text gives an empty IpaString.
  IpaString phonemize(std::string_view text) const;

  const FeatureTable& table() const { return *table_; }
  const Lexicon& lexicon() const { return *lexicon_; }
  const LetterRules& rules() const { return *rules_; }

private:
  const FeatureTable* table_;
  const Lexicon* lexicon_;
  const LetterRules* rules_;
};

/// Minimal-cost alignment distance under insert/delete costs from `costs` and
/// substitution cost from the feature table. Standard dynamic programming.
double feature_edit_distance(const IpaString& a, const IpaString& b, const FeatureTable& table,
                             const EditCosts& costs = {});

/// Normalized phonetic similarity:
///   PS = 1 - d(a, b) / (max(|a|, |b|) * max(insert_cost, 1)), clamped to [0, 1].
/// PS(a, a) = 1, and PS = 1 only for equal strings. Both inputs empty is an
/// error (similarity undefined).
double phonetic_similarity(const IpaString& a, const IpaString& b, const FeatureTable& table,
                           const EditCosts& costs = {});

/// Lowercase + strip punctuation + collapse whitespace, the normalization
/// used before phonemization and word-level scoring.
std::string normalize_text(std::string_view text);

/// normalize_text, then split on spaces.
std::vector<std::string> normalize_words(std::string_view text);

}  // namespace necorr
