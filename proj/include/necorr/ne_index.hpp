#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "necorr/phonetics.hpp"

namespace necorr {

/// One gazetteer entry: entity surface, its pronunciation under the module's
/// lexicon, a one-line definition (may be empty) and a source tag.
struct NamedEntityRecord {
  std::string surface;
  IpaString ipa;
  std::string definition;
  std::string source;
};

/// A retrieval result: record plus its phonetic similarity to the query.
struct Candidate {
  NamedEntityRecord record;
  double ps = 0.0;
};

/// Raw gazetteer row before phonemization (the JSONL ingest shape).
struct GazetteerEntry {
  std::string surface;
  std::string definition;
  std::string source;
};

/// Reads gazetteer JSONL: one object per line,
/// {"surface": str, "definition": str?, "source": str?}.
std::vector<GazetteerEntry> load_gazetteer(const std::string& path);
void write_gazetteer(const std::string& path, const std::vector<GazetteerEntry>& entries);

/// Exact top-k phonetic nearest-neighbor index over a named-entity gazetteer.
///
/// Retrieval runs in two stages: length bands plus a bag-of-segments lower
/// bound prune candidates, then the exact feature edit distance scores the
/// survivors (OpenMP-parallel). The pruning bounds are provable lower bounds
/// on the distance, so results are always identical to a full linear scan;
/// retrieve_topk_linear keeps that serial scan available as the reference.
class PhoneticIndex {
public:
  /// Builds from a gazetteer stream. Case-insensitive duplicate surfaces are
  /// merged keeping the first record and the first nonempty definition.
  /// An empty stream is an error.
  static PhoneticIndex build(const std::vector<GazetteerEntry>& entries, const Phonemizer& ph);

  /// The k records most similar to the query, ps descending, ties broken by
  /// surface ascending. If k exceeds the index size, all records are
  /// returned. The query must be nonempty.
  std::vector<Candidate> retrieve_topk(const IpaString& query, int k) const;

  /// Serial brute-force reference: same contract, no pruning, no threads.
  std::vector<Candidate> retrieve_topk_linear(const IpaString& query, int k) const;

  /// Binary persistence. Little-endian, magic "DRGC", u32 version, then
  /// sections: segment vocabulary, records, length bands, signatures.
  void save(const std::string& path) const;
  static PhoneticIndex load(const std::string& path, const Phonemizer& ph);

  size_t size() const { return records_.size(); }
  const NamedEntityRecord& record(size_t i) const { return records_[i]; }

  /// Case-insensitive surface lookup (for definition enrichment).
  std::optional<size_t> find_surface(std::string_view surface) const;

  const EditCosts& costs() const { return costs_; }
  const FeatureTable& table() const { return *table_; }

private:
  PhoneticIndex() = default;
  void build_derived();
  double score(const IpaString& query, size_t record_idx) const;

  const FeatureTable* table_ = nullptr;
  EditCosts costs_{};
  std::vector<NamedEntityRecord> records_;
  // One band per segment count; bands_[len] lists record ids of that length.
  std::vector<std::vector<uint32_t>> bands_;
  // Per-record bag-of-segments count vector, segment_count() entries each.
  std::vector<uint16_t> signatures_;
  std::unordered_map<std::string, uint32_t> surface_lookup_;
};

}  // namespace necorr
