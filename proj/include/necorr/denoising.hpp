#pragma once

#include <optional>
#include <string>
#include <vector>

#include "necorr/corpus.hpp"
#include "necorr/llm.hpp"
#include "necorr/ne_index.hpp"
#include "necorr/tagging.hpp"

namespace necorr {

/// A cloze question over lettered candidate options. Letters run A, B, C, ...
/// in candidate order; gold_letter is set only in evaluation/synthesis runs.
struct McqItem {
  std::string cloze;  // contains exactly one [BLANK] token
  std::vector<std::pair<char, Candidate>> options;
  std::optional<char> gold_letter;
};

/// Parsed reply of the denoising gate: rationale text plus the chosen option.
struct RationaleAnswer {
  std::string rationale;
  char letter = 'A';
  std::string entity;
};

/// Replaces the span's words in h1 with a single "[BLANK]" token; all other
/// words are preserved.
std::string make_cloze(const std::string& h1, const EntitySpan& span);

/// Concatenates hypothesis-derived entity surfaces (scored against the query,
/// definitions looked up in the index when available) with the retrieved
/// candidates, deduplicating case-insensitively and keeping first occurrence.
/// Hypothesis-derived entities come first.
std::vector<Candidate> augment_candidates(const std::vector<std::string>& hyp_surfaces,
                                          const std::vector<Candidate>& retrieved,
                                          const IpaString& query, const PhoneticIndex* index,
                                          const Phonemizer& ph);

/// Candidate serialization used in GEC prompts:
///   < {surface} | phonetic-score: {ps 2dp} | def: {definition} >
/// An empty definition renders as "(no definition)".
std::string render_candidate(const Candidate& c);

/// MCQ option line body: "{letter}: {surface} ({ps 2dp} | {definition})".
std::string render_option_line(char letter, const Candidate& c);

/// Keeps the max_options highest-ps candidates (earlier position wins ties)
/// while preserving the original relative order.
std::vector<Candidate> cap_candidates(const std::vector<Candidate>& cands, int max_options);

/// Letters the candidates in order. More than 26 candidates is an error
/// (option overflow); cap first with cap_candidates.
McqItem build_mcq(const std::string& cloze, const std::vector<Candidate>& candidates,
                  std::optional<char> gold_letter = std::nullopt);

/// One few-shot example for the MCQ prompts; prepared from an AugmentedSample
/// whose rationale was synthesized earlier.
struct McqFewshot {
  std::string cloze;
  std::string options_block;
  std::string rationale_reply;  // full tagged reply
};

/// Rebuilds the few-shot MCQ view from an augmented sample: the tagger finds
/// the entity span in h1 for the cloze; options render from the stored
/// candidates. Returns nothing when h1 carries no taggable span or the
/// sample lacks a rationale.
std::optional<McqFewshot> fewshot_mcq(const AugmentedSample& sample, const Tagger& tagger,
                                      int max_options);

/// Full MCQ-filtering prompt (reasoning variant) with few-shot block.
std::string render_mcq_prompt(const McqItem& mcq, const std::vector<McqFewshot>& fewshots);

/// Rationale-synthesis prompt: includes the known answer so the generator
/// explains it without leading with it.
std::string render_synthesis_prompt(const McqItem& mcq, const std::string& answer);

/// Extracts the first <think>...</think> and <answer>...</answer> pair.
/// The answer parses as "letter: entity"; the letter must name an option and
/// wins over a mismatched entity string. Throws RationaleParseError /
/// InvalidOptionError.
RationaleAnswer parse_rationale_answer(const std::string& reply, const McqItem& mcq);

/// The gate's output: chosen candidate plus the rationale behind it.
struct Selection {
  Candidate entity;
  std::string rationale;
  char letter = 'A';
  bool fallback = false;
};

/// Prompts the backend with the MCQ, parses the reply, retries on parse or
/// invalid-option errors, and finally falls back to the argmax-ps option with
/// rationale "fallback: highest phonetic score".
Selection select_entity(const LlmBackend& backend, const McqItem& mcq,
                        const std::vector<McqFewshot>& fewshots, int retries,
                        const std::string& context_key);

/// Synthesizes a denoising rationale for each (sample, candidates) pair using
/// the generator backend. Output order and length match the input; samples
/// whose h1 has no taggable span, whose gold entity is missing from the
/// options, or whose generation fails keep rationale absent. jobs bounds the
/// worker pool issuing backend calls.
std::vector<AugmentedSample> synthesize_rationales(
    const LlmBackend& generator, const std::vector<std::pair<Sample, std::vector<Candidate>>>& data,
    const Tagger& tagger, int max_options, int retries, int jobs = 1);

}  // namespace necorr
