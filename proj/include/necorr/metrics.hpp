#pragma once

#include <optional>
#include <string>
#include <vector>

#include "necorr/corpus.hpp"
#include "necorr/correction.hpp"
#include "necorr/tagging.hpp"

namespace necorr {

/// Word-level Levenshtein distance (unit costs) between the normalized
/// reference and hypothesis, plus the normalized reference word count.
struct WerResult {
  long distance = 0;
  long ref_words = 0;
};

WerResult wer(const std::string& reference, const std::string& hypothesis);

/// Corpus accumulator: WER = total edit operations / total reference words.
/// References that normalize to empty are excluded and counted as warnings.
struct CorpusWer {
  long distance_sum = 0;
  long word_sum = 0;
  long empty_references = 0;

  void add(const std::string& reference, const std::string& hypothesis);
  double value() const;
};

/// Fraction of gold entities (tagged in the references) whose surface occurs
/// in the paired transcript, case-insensitive at word granularity,
/// micro-averaged. Errors when the corpus has no gold entities at all.
double ne_hit_ratio(const std::vector<std::string>& references,
                    const std::vector<std::string>& transcripts, const Tagger& tagger);

/// The literal denominator variant: hits over the number of entities tagged
/// in the final transcripts. Unset when the transcripts carry no entities.
std::optional<double> ne_hit_ratio_literal(const std::vector<std::string>& references,
                                           const std::vector<std::string>& transcripts,
                                           const Tagger& tagger);

/// Multiset F1 over exact entity surfaces: pseudo-labels come from the
/// references, predictions from the hypotheses. Both empty -> 1; one side
/// empty -> 0.
double ner_f1(const std::vector<std::string>& pseudo_labels,
              const std::vector<std::string>& predicted);

/// Corpus-level micro F1 of tagger(h1) against tagger(reference).
double corpus_ner_f1(const std::vector<std::string>& references,
                     const std::vector<std::string>& first_hypotheses, const Tagger& tagger);

struct EvalReport {
  std::string method;
  double wer = 0.0;
  double ne_hit_ratio = 0.0;
  std::optional<double> ne_hit_ratio_literal;
  std::optional<double> candidate_recall;
  std::optional<double> candidate_precision;
  std::optional<double> ner_f1;
  long samples = 0;
  long reference_words = 0;
  long gold_entities = 0;
  long empty_references = 0;
};

/// Joins run outputs with their dataset (by id; missing or extra ids are an
/// error) and aggregates every metric above. The tagger provides gold spans;
/// candidate recall/precision are filled for runs that recorded selections,
/// counting the selected entity plus the hypothesis-derived entities as the
/// surviving set.
EvalReport assemble_report(const std::vector<RunOutput>& runs, const std::vector<Sample>& dataset,
                           const Tagger& tagger);

std::string report_to_json(const EvalReport& report);
/// CSV with header method,recall,precision,wer,ne_hit; one row per report.
std::string reports_to_csv(const std::vector<EvalReport>& reports);

}  // namespace necorr
