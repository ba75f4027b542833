#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "necorr/corpus.hpp"
#include "necorr/denoising.hpp"
#include "necorr/filtering.hpp"
#include "necorr/llm.hpp"
#include "necorr/ne_index.hpp"
#include "necorr/tagging.hpp"

namespace necorr {

enum class PipelineMode { asr, gec, ragec, deragec, oracle };

PipelineMode parse_pipeline_mode(const std::string& name);
std::string pipeline_mode_name(PipelineMode mode);

/// One run's configuration. The selection and correction stages share the
/// backend unless gec_backend overrides the latter.
struct RunConfig {
  PipelineMode mode = PipelineMode::asr;
  int k = 10;              // retrieval depth
  int fewshot_count = 5;   // T^fs
  uint64_t seed = 0;
  BackendSpec backend;
  std::optional<BackendSpec> gec_backend;
  std::optional<FilterSpec> filter;  // static filter on retrieved candidates
  int max_options = 26;
  int retries = 2;
  int jobs = 1;
};

/// Everything a run needs besides the samples. Index and fewshot pool may be
/// empty for modes that do not use them.
struct PipelineDeps {
  const Phonemizer* phonemizer = nullptr;
  const PhoneticIndex* index = nullptr;
  const Tagger* tagger = nullptr;
  const LlmBackend* backend = nullptr;
  const LlmBackend* gec_backend = nullptr;  // defaults to backend when null
  std::vector<AugmentedSample> fewshot_pool;
};

/// Per-span record of what the denoising gate chose.
struct SpanSelection {
  EntitySpan span;
  char letter = 'A';
  std::string entity;
  double ps = 0.0;
  std::string rationale;
};

struct RunOutput {
  std::string id;
  PipelineMode mode = PipelineMode::asr;
  std::string transcript;
  std::vector<SpanSelection> selections;
  std::vector<std::string> fallbacks;
};

/// The no-postprocessing baseline: the top hypothesis verbatim.
std::string run_asr_baseline(const Sample& sample);

/// Uniform sample without replacement; t >= pool size returns the whole pool.
/// Deterministic in seed across platforms.
std::vector<AugmentedSample> sample_fewshots(const std::vector<AugmentedSample>& pool, int t,
                                             uint64_t seed);

/// One few-shot example for the GEC prompt.
struct GecFewshot {
  std::array<std::string, 5> hypotheses;
  std::optional<std::string> entity_block;
  std::string corrected;
};

/// Correction prompt: few-shot block, the 5 hypotheses in order, and an
/// optional Named-Entities line (selected entity serialized with
/// render_candidate, plus the rationale when present).
std::string build_gec_prompt(const std::array<std::string, 5>& hypotheses,
                             const std::optional<std::string>& entity_block,
                             const std::vector<GecFewshot>& fewshots);

/// Hypothesis-set correction without entity knowledge. Empty replies fall
/// back to h1, recorded in fallbacks when given.
std::string run_gec(const LlmBackend& backend, const Sample& sample,
                    const std::vector<GecFewshot>& fewshots, const std::string& context_key,
                    std::optional<TaskContext> context = std::nullopt,
                    std::vector<std::string>* fallbacks = nullptr);

/// Correction with the (optionally filtered) candidate list in the prompt.
std::string run_ragec(const LlmBackend& backend, const Sample& sample,
                      const std::vector<Candidate>& candidates,
                      const std::vector<GecFewshot>& fewshots, const std::string& context_key,
                      std::optional<std::string> reference = std::nullopt,
                      std::vector<std::string>* fallbacks = nullptr);

/// The full denoise-then-correct pipeline for one sample: per tagged span in
/// h1, retrieve, augment with hypothesis entities, select (entity, rationale)
/// through the MCQ gate, then run one correction conditioned on it. Spans are
/// processed left to right with the corrected transcript threaded through.
/// Falls back to run_gec when tagging finds no spans.
RunOutput run_deragec(const Sample& sample, const RunConfig& config, const PipelineDeps& deps,
                      const std::vector<McqFewshot>& mcq_fewshots,
                      const std::vector<GecFewshot>& gec_fewshots);

/// Replaces the span's words in h1 with the replacement string; all other
/// words are preserved.
std::string splice_correct(const std::string& h1, const EntitySpan& span,
                           const std::string& replacement);

/// Runs the configured mode over every sample (bounded worker pool, output
/// order always matches input order) and returns per-sample outputs.
std::vector<RunOutput> run_pipeline(const std::vector<Sample>& samples, const RunConfig& config,
                                    const PipelineDeps& deps);

/// Run JSONL: {"id", "mode", "transcript", "selections": [...], "fallbacks": [...]}.
std::string run_output_to_json_line(const RunOutput& out);
void write_run_outputs(const std::string& path, const std::vector<RunOutput>& outputs);
std::vector<RunOutput> load_run_outputs(const std::string& path);

}  // namespace necorr
