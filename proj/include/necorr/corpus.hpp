#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "necorr/ne_index.hpp"
#include "necorr/phonetics.hpp"

namespace necorr {

/// One utterance: the 5-best ASR hypotheses, the ground-truth transcription,
/// and optionally the gold entity surfaces it contains.
struct Sample {
  std::string id;
  std::array<std::string, 5> hypotheses;
  std::string reference;
  std::optional<std::vector<std::string>> gold_entities;
  bool padded = false;  // hypotheses were padded by repeating the last one
};

/// A sample enriched with retrieval candidates (ps descending after static
/// filtering, hypothesis-derived entities first otherwise) and, once
/// synthesized, a tagged rationale reply.
struct AugmentedSample {
  Sample sample;
  std::vector<Candidate> candidates;
  std::optional<std::string> rationale;
};

/// Reads dataset JSONL:
///   {"id": str, "hypotheses": [str x5], "reference": str, "gold_entities": [str]?}
/// Schema violations report the offending line. With pad_hypotheses set,
/// fewer than 5 hypotheses are padded by repeating the last one.
std::vector<Sample> load_dataset(const std::string& path, bool pad_hypotheses = false);

/// Canonical JSONL writers: fixed key order, no extra whitespace, one object
/// per line. Loading then re-writing a canonical file is byte-stable.
std::string sample_to_json_line(const Sample& sample);
void write_dataset(const std::string& path, const std::vector<Sample>& samples);

std::string augmented_to_json_line(const AugmentedSample& sample);
void write_augmented(const std::string& path, const std::vector<AugmentedSample>& samples);
/// Candidate pronunciations are recomputed from surfaces while loading.
std::vector<AugmentedSample> load_augmented(const std::string& path, const Phonemizer& ph);

/// Phoneme-level noise applied to the gold entity inside each hypothesis.
struct NoiseConfig {
  int max_edits = 2;           // edits drawn uniformly from [0, max_edits]
  double word_sub_prob = 0.0;  // per non-entity word, chance of a filler swap
};

struct SynthCorpus {
  std::vector<Sample> samples;
  /// Every entity surface form that occurs in the hypotheses (gold forms and
  /// perturbed respellings); feeds the gazetteer tagger in offline runs.
  std::vector<std::string> surface_variants;
};

/// Generates n samples. Each reference embeds exactly one gazetteer entity in
/// a template sentence; h1..h5 perturb the entity pronunciation with up to
/// max_edits feature-near substitutions, inserts and deletes, then respell it
/// with a fixed segment-to-letters table. Deterministic in seed.
SynthCorpus synth_corpus(const std::vector<NamedEntityRecord>& gazetteer, int n,
                         const NoiseConfig& noise, uint64_t seed, const Phonemizer& ph);

/// Generates a synthetic gazetteer of pronounceable pseudo-entities with
/// one-line definitions. Surfaces are unique case-insensitively.
std::vector<GazetteerEntry> synth_gazetteer(int n, uint64_t seed);

/// Writes one surface per line (tagger input).
void write_surfaces(const std::string& path, const std::vector<std::string>& surfaces);

}  // namespace necorr
