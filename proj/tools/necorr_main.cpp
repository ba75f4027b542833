// necorr: named-entity post-correction for ASR transcripts.
//
// Subcommands cover the full pipeline: build a phonetic index over a
// gazetteer, retrieve candidates, synthesize corpora and denoising
// rationales, run the correction modes, filter candidate sets, and evaluate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "necorr/corpus.hpp"
#include "necorr/correction.hpp"
#include "necorr/denoising.hpp"
#include "necorr/errors.hpp"
#include "necorr/filtering.hpp"
#include "necorr/llm.hpp"
#include "necorr/metrics.hpp"
#include "necorr/ne_index.hpp"
#include "necorr/phonetics.hpp"
#include "necorr/tagging.hpp"

namespace {

using namespace necorr;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBackend = 3;

struct BackendFlags {
  std::string kind = "heuristic";
  std::string endpoint;
  std::string model;
  std::string credential_env = "NECORR_API_KEY";
  std::string transcript;
  int max_attempts = 3;
  int timeout_ms = 60000;
  int backoff_base_ms = 250;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& flags, const std::string& prefix = "") {
  const std::string dash = "--" + prefix;
  cmd->add_option(dash + "backend", flags.kind,
                  "Backend kind: http|oracle|scripted|heuristic")
      ->capture_default_str();
  cmd->add_option(dash + "endpoint", flags.endpoint, "Chat-completions URL (http backend)");
  cmd->add_option(dash + "model", flags.model, "Model name sent to the http backend");
  cmd->add_option(dash + "credential-env", flags.credential_env,
                  "Environment variable holding the API key")
      ->capture_default_str();
  cmd->add_option(dash + "transcript", flags.transcript,
                  "Recorded replies JSONL (scripted backend)");
  cmd->add_option(dash + "max-attempts", flags.max_attempts, "HTTP retry cap")
      ->capture_default_str();
  cmd->add_option(dash + "timeout-ms", flags.timeout_ms, "Per-request timeout")
      ->capture_default_str();
}

BackendSpec to_spec(const BackendFlags& flags) {
  BackendSpec spec;
  spec.kind = parse_backend_kind(flags.kind);
  spec.endpoint = flags.endpoint;
  spec.model = flags.model;
  spec.credential_env = flags.credential_env;
  spec.transcript_path = flags.transcript;
  spec.max_attempts = flags.max_attempts;
  spec.timeout_ms = flags.timeout_ms;
  spec.backoff_base_ms = flags.backoff_base_ms;
  return spec;
}

struct TaggerFlags {
  std::string kind = "gazetteer";
  std::string surfaces_path;
  std::string endpoint;
  std::vector<std::string> labels;
  int timeout_ms = 10000;
};

void add_tagger_flags(CLI::App* cmd, TaggerFlags& flags) {
  cmd->add_option("--tagger", flags.kind, "Tagger kind: gazetteer|remote")->capture_default_str();
  cmd->add_option("--tagger-surfaces", flags.surfaces_path,
                  "Surface list file for the gazetteer tagger (one per line)");
  cmd->add_option("--tagger-endpoint", flags.endpoint, "Remote tagger URL");
  cmd->add_option("--tagger-labels", flags.labels, "Entity labels for the remote tagger");
  cmd->add_option("--tagger-timeout-ms", flags.timeout_ms, "Remote tagger timeout")
      ->capture_default_str();
}

std::unique_ptr<Tagger> make_tagger(const TaggerFlags& flags,
                                    const std::vector<Sample>* dataset = nullptr) {
  if (flags.kind == "gazetteer") {
    if (!flags.surfaces_path.empty())
      return std::make_unique<GazetteerTagger>(GazetteerTagger::from_file(flags.surfaces_path));
    // Fall back to the dataset's gold entities when no surface file is given.
    std::vector<std::string> surfaces;
    if (dataset) {
      for (const auto& s : *dataset)
        if (s.gold_entities)
          surfaces.insert(surfaces.end(), s.gold_entities->begin(), s.gold_entities->end());
    }
    if (surfaces.empty())
      throw DataError(
          "gazetteer tagger needs --tagger-surfaces or a dataset with gold_entities");
    return std::make_unique<GazetteerTagger>(surfaces);
  }
  if (flags.kind == "remote") {
    RemoteTagger::Options opts;
    opts.endpoint = flags.endpoint;
    opts.labels = flags.labels;
    opts.timeout_ms = flags.timeout_ms;
    if (opts.endpoint.empty()) throw DataError("remote tagger needs --tagger-endpoint");
    return std::make_unique<RemoteTagger>(std::move(opts));
  }
  throw DataError("unknown tagger kind '" + flags.kind + "' (expected gazetteer|remote)");
}

std::vector<NamedEntityRecord> index_records(const PhoneticIndex& index) {
  std::vector<NamedEntityRecord> records;
  records.reserve(index.size());
  for (size_t i = 0; i < index.size(); ++i) records.push_back(index.record(i));
  return records;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << content;
}

// ---------------------------------------------------------------------------

int cmd_build_index(const std::string& gazetteer_path, const std::string& out_path) {
  auto entries = load_gazetteer(gazetteer_path);
  PhoneticIndex index = PhoneticIndex::build(entries, Phonemizer::embedded());
  index.save(out_path);
  std::cout << "indexed " << index.size() << " records -> " << out_path << "\n";
  return kExitOk;
}

int cmd_retrieve(const std::string& index_path, const std::string& query_text, int k) {
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::load(index_path, ph);
  IpaString query = ph.phonemize(query_text);
  if (query.empty()) throw DataError("query phonemizes to nothing: '" + query_text + "'");
  auto candidates = index.retrieve_topk(query, k);
  std::printf("query: %s  /%s/\n", query_text.c_str(), query.to_string(ph.table()).c_str());
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    std::printf("%2zu.  %-24s  ps=%.4f  %s\n", i + 1, c.record.surface.c_str(), c.ps,
                c.record.definition.empty() ? "(no definition)" : c.record.definition.c_str());
  }
  return kExitOk;
}

int cmd_synth_corpus(const std::string& gazetteer_path, int n, uint64_t seed, int max_edits,
                     double word_sub_prob, const std::string& out_path,
                     const std::string& variants_out) {
  const Phonemizer& ph = Phonemizer::embedded();
  auto entries = load_gazetteer(gazetteer_path);
  PhoneticIndex index = PhoneticIndex::build(entries, ph);  // dedup + phonemize
  NoiseConfig noise;
  noise.max_edits = max_edits;
  noise.word_sub_prob = word_sub_prob;
  SynthCorpus corpus = synth_corpus(index_records(index), n, noise, seed, ph);
  write_dataset(out_path, corpus.samples);
  if (!variants_out.empty()) write_surfaces(variants_out, corpus.surface_variants);
  std::cout << "wrote " << corpus.samples.size() << " samples -> " << out_path << "\n";
  return kExitOk;
}

int cmd_synth_rationales(const std::string& dataset_path, const std::string& index_path,
                         const BackendFlags& backend_flags, const TaggerFlags& tagger_flags,
                         int k, int max_options, int retries, int jobs,
                         const std::string& out_path, bool pad) {
  const Phonemizer& ph = Phonemizer::embedded();
  auto dataset = load_dataset(dataset_path, pad);
  auto tagger = make_tagger(tagger_flags, &dataset);
  auto backend = make_backend(to_spec(backend_flags));

  std::optional<PhoneticIndex> index;
  if (!index_path.empty()) index = PhoneticIndex::load(index_path, ph);

  std::vector<std::pair<Sample, std::vector<Candidate>>> data;
  for (const auto& sample : dataset) {
    std::vector<Candidate> candidates;
    auto spans = tagger->tag(sample.hypotheses[0]);
    if (!spans.empty()) {
      IpaString query = ph.phonemize(spans.front().surface);
      std::vector<Candidate> retrieved;
      if (index && !query.empty()) retrieved = index->retrieve_topk(query, k);
      // Mirror run_deragec: the span surface itself is not an option.
      std::string span_lower = spans.front().surface;
      for (char& c : span_lower)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      std::vector<std::string> n_hyp;
      for (const auto& hyp : sample.hypotheses) {
        for (const auto& span : tagger->tag(hyp)) {
          std::string lower = span.surface;
          for (char& c : lower)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
          if (lower != span_lower) n_hyp.push_back(span.surface);
        }
      }
      candidates = augment_candidates(n_hyp, retrieved, query, index ? &*index : nullptr, ph);
    }
    data.emplace_back(sample, std::move(candidates));
  }

  auto augmented = synthesize_rationales(*backend, data, *tagger, max_options, retries, jobs);
  write_augmented(out_path, augmented);
  size_t with_rationale = 0;
  for (const auto& a : augmented)
    if (a.rationale) ++with_rationale;
  std::cout << "synthesized " << with_rationale << "/" << augmented.size() << " rationales -> "
            << out_path << "\n";
  return kExitOk;
}

struct RunFlags {
  std::string mode = "asr";
  std::string dataset_path;
  std::string index_path;
  std::string fewshots_path;
  std::string out_path;
  int k = 10;
  int fewshot_count = 5;
  uint64_t seed = 0;
  int max_options = 26;
  int retries = 2;
  int jobs = 1;
  bool pad = false;
  std::string filter_method;
  int filter_k = 10;
  double filter_theta = 0.7;
  double filter_sigma = 1.0;
};

std::vector<RunOutput> execute_run(const RunFlags& flags, const BackendFlags& backend_flags,
                                   const BackendFlags* gec_backend_flags,
                                   const TaggerFlags& tagger_flags, int fewshot_count_override,
                                   std::vector<Sample>* dataset_out = nullptr) {
  const Phonemizer& ph = Phonemizer::embedded();
  auto dataset = load_dataset(flags.dataset_path, flags.pad);

  RunConfig config;
  config.mode = parse_pipeline_mode(flags.mode);
  config.k = flags.k;
  config.fewshot_count = fewshot_count_override >= 0 ? fewshot_count_override : flags.fewshot_count;
  config.seed = flags.seed;
  config.backend = to_spec(backend_flags);
  if (gec_backend_flags && !gec_backend_flags->kind.empty() &&
      gec_backend_flags->kind != backend_flags.kind)
    config.gec_backend = to_spec(*gec_backend_flags);
  config.max_options = flags.max_options;
  config.retries = flags.retries;
  config.jobs = flags.jobs;
  if (!flags.filter_method.empty())
    config.filter =
        parse_filter_spec(flags.filter_method, flags.filter_k, flags.filter_theta,
                          flags.filter_sigma);

  PipelineDeps deps;
  deps.phonemizer = &ph;

  std::optional<PhoneticIndex> index;
  if (!flags.index_path.empty()) {
    index = PhoneticIndex::load(flags.index_path, ph);
    deps.index = &*index;
  }

  std::unique_ptr<Tagger> tagger;
  if (config.mode != PipelineMode::asr && config.mode != PipelineMode::gec) {
    tagger = make_tagger(tagger_flags, &dataset);
    deps.tagger = tagger.get();
  }

  auto backend = make_backend(config.backend);
  deps.backend = backend.get();
  std::unique_ptr<LlmBackend> gec_backend;
  if (config.gec_backend) {
    gec_backend = make_backend(*config.gec_backend);
    deps.gec_backend = gec_backend.get();
  }

  if (!flags.fewshots_path.empty()) deps.fewshot_pool = load_augmented(flags.fewshots_path, ph);

  auto outputs = run_pipeline(dataset, config, deps);
  if (dataset_out) *dataset_out = std::move(dataset);
  return outputs;
}

int cmd_run(const RunFlags& flags, const BackendFlags& backend_flags,
            const BackendFlags& gec_backend_flags, const TaggerFlags& tagger_flags) {
  auto outputs = execute_run(flags, backend_flags, &gec_backend_flags, tagger_flags, -1);
  write_run_outputs(flags.out_path, outputs);
  std::cout << "wrote " << outputs.size() << " transcripts -> " << flags.out_path << "\n";
  return kExitOk;
}

int cmd_filter(const std::string& augmented_path, const std::string& method, int k, double theta,
               double sigma, const std::string& out_path) {
  const Phonemizer& ph = Phonemizer::embedded();
  auto augmented = load_augmented(augmented_path, ph);
  FilterSpec spec = parse_filter_spec(method, k, theta, sigma);

  std::vector<std::vector<Candidate>> surviving;
  std::vector<std::string> gold;
  for (auto& sample : augmented) {
    sample.candidates = apply_filter(sample.candidates, spec);
    if (sample.sample.gold_entities && !sample.sample.gold_entities->empty()) {
      surviving.push_back(sample.candidates);
      gold.push_back(sample.sample.gold_entities->front());
    }
  }
  if (!out_path.empty()) write_augmented(out_path, augmented);

  if (!gold.empty()) {
    RecallPrecision rp = candidate_recall_precision(surviving, gold);
    std::printf("recall=%.4f precision=%.4f samples=%zu survivors=%zu\n", rp.recall, rp.precision,
                rp.samples, rp.survivors);
  } else {
    std::cout << "recall/precision unavailable: no gold_entities in " << augmented_path << "\n";
  }
  return kExitOk;
}

int cmd_eval(const std::string& run_path, const std::string& dataset_path,
             const TaggerFlags& tagger_flags, const std::string& out_path, bool pad) {
  auto dataset = load_dataset(dataset_path, pad);
  auto runs = load_run_outputs(run_path);
  auto tagger = make_tagger(tagger_flags, &dataset);
  EvalReport report = assemble_report(runs, dataset, *tagger);

  std::string json = report_to_json(report);
  std::string csv = reports_to_csv({report});
  if (!out_path.empty()) {
    write_text(out_path, json + "\n");
    std::string csv_path = out_path;
    auto dot = csv_path.rfind('.');
    csv_path = (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".csv";
    write_text(csv_path, csv);
  }
  std::cout << json << "\n";
  return kExitOk;
}

int cmd_sweep_fewshots(const RunFlags& flags, const BackendFlags& backend_flags,
                       const BackendFlags& gec_backend_flags, const TaggerFlags& tagger_flags,
                       const std::string& t_range, const std::string& out_path) {
  int t_lo = 0, t_hi = 5;
  if (!t_range.empty()) {
    auto dots = t_range.find("..");
    if (dots == std::string::npos)
      throw DataError("--t expects a range like 0..5, got '" + t_range + "'");
    t_lo = std::stoi(t_range.substr(0, dots));
    t_hi = std::stoi(t_range.substr(dots + 2));
    if (t_lo < 0 || t_hi < t_lo) throw DataError("--t range must satisfy 0 <= lo <= hi");
  }

  std::string csv = "t,wer,ne_hit\n";
  for (int t = t_lo; t <= t_hi; ++t) {
    std::vector<Sample> dataset;
    auto outputs = execute_run(flags, backend_flags, &gec_backend_flags, tagger_flags, t, &dataset);
    auto tagger = make_tagger(tagger_flags, &dataset);
    EvalReport report = assemble_report(outputs, dataset, *tagger);
    char row[96];
    std::snprintf(row, sizeof(row), "%d,%.6f,%.6f\n", t, report.wer, report.ne_hit_ratio);
    csv += row;
    std::printf("t=%d wer=%.4f ne_hit=%.4f\n", t, report.wer, report.ne_hit_ratio);
  }
  if (!out_path.empty()) write_text(out_path, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Named-entity post-correction toolkit for ASR transcripts"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file (INI, keys per subcommand section)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // build-index
  std::string gazetteer_path, index_out;
  auto* build = app.add_subcommand("build-index", "Build a phonetic index from gazetteer JSONL");
  build->add_option("--gazetteer", gazetteer_path, "Gazetteer JSONL")->required();
  build->add_option("--out", index_out, "Index output path")->required();

  // retrieve
  std::string retr_index, retr_query;
  int retr_k = 10;
  auto* retrieve = app.add_subcommand("retrieve", "Query the index for similar entities");
  retrieve->add_option("--index", retr_index, "Index file")->required();
  retrieve->add_option("--query", retr_query, "Query text")->required();
  retrieve->add_option("--k", retr_k, "Result count")->capture_default_str();

  // synth-corpus
  std::string sc_gazetteer, sc_out, sc_variants;
  int sc_n = 100, sc_max_edits = 2;
  double sc_word_sub = 0.0;
  uint64_t sc_seed = 0;
  auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic evaluation dataset");
  synth->add_option("--gazetteer", sc_gazetteer, "Gazetteer JSONL")->required();
  synth->add_option("--n", sc_n, "Sample count")->capture_default_str();
  synth->add_option("--seed", sc_seed, "RNG seed")->capture_default_str();
  synth->add_option("--max-edits", sc_max_edits, "Max phoneme edits per hypothesis")
      ->capture_default_str();
  synth->add_option("--word-sub-prob", sc_word_sub, "Non-entity word noise probability")
      ->capture_default_str();
  synth->add_option("--out", sc_out, "Dataset JSONL output")->required();
  synth->add_option("--variants-out", sc_variants,
                    "Also write every entity surface variant (tagger input)");

  // synth-rationales
  std::string sr_dataset, sr_index, sr_out;
  int sr_k = 10, sr_max_options = 26, sr_retries = 2, sr_jobs = 1;
  bool sr_pad = false;
  BackendFlags sr_backend;
  TaggerFlags sr_tagger;
  auto* synthr = app.add_subcommand("synth-rationales",
                                    "Synthesize denoising rationales for a few-shot pool");
  synthr->add_option("--dataset", sr_dataset, "Dataset JSONL")->required();
  synthr->add_option("--index", sr_index, "Phonetic index file");
  synthr->add_option("--k", sr_k, "Retrieval depth")->capture_default_str();
  synthr->add_option("--max-options", sr_max_options, "MCQ option cap")->capture_default_str();
  synthr->add_option("--retries", sr_retries, "Generation retries")->capture_default_str();
  synthr->add_option("--jobs", sr_jobs, "Worker pool size")->capture_default_str();
  synthr->add_flag("--pad-hypotheses", sr_pad, "Pad datasets with fewer than 5 hypotheses");
  synthr->add_option("--out", sr_out, "Augmented JSONL output")->required();
  add_backend_flags(synthr, sr_backend);
  add_tagger_flags(synthr, sr_tagger);

  // run
  RunFlags run_flags;
  BackendFlags run_backend, run_gec_backend;
  run_gec_backend.kind.clear();  // empty means "same as --backend"
  TaggerFlags run_tagger;
  auto* run = app.add_subcommand("run", "Run a correction mode over a dataset");
  run->add_option("--mode", run_flags.mode, "asr|gec|ragec|deragec|oracle")->required();
  run->add_option("--dataset", run_flags.dataset_path, "Dataset JSONL")->required();
  run->add_option("--index", run_flags.index_path, "Phonetic index file");
  run->add_option("--fewshots", run_flags.fewshots_path, "Augmented JSONL few-shot pool");
  run->add_option("--out", run_flags.out_path, "Run output JSONL")->required();
  run->add_option("--k", run_flags.k, "Retrieval depth")->capture_default_str();
  run->add_option("--fewshot-count", run_flags.fewshot_count, "T^fs")->capture_default_str();
  run->add_option("--seed", run_flags.seed, "RNG seed")->capture_default_str();
  run->add_option("--max-options", run_flags.max_options, "MCQ option cap")->capture_default_str();
  run->add_option("--retries", run_flags.retries, "Selection retries")->capture_default_str();
  run->add_option("--jobs", run_flags.jobs, "Worker pool size")->capture_default_str();
  run->add_flag("--pad-hypotheses", run_flags.pad, "Pad datasets with fewer than 5 hypotheses");
  run->add_option("--filter-method", run_flags.filter_method,
                  "Static candidate filter: topk|threshold|std");
  run->add_option("--filter-k", run_flags.filter_k, "topk filter size")->capture_default_str();
  run->add_option("--filter-theta", run_flags.filter_theta, "threshold filter theta")
      ->capture_default_str();
  run->add_option("--filter-sigma", run_flags.filter_sigma, "std filter sigma")
      ->capture_default_str();
  add_backend_flags(run, run_backend);
  run->add_option("--gec-backend", run_gec_backend.kind,
                  "Separate backend kind for the correction stage");
  run->add_option("--gec-endpoint", run_gec_backend.endpoint, "Correction-stage endpoint");
  run->add_option("--gec-model", run_gec_backend.model, "Correction-stage model");
  run->add_option("--gec-transcript", run_gec_backend.transcript,
                  "Correction-stage scripted transcript");
  add_tagger_flags(run, run_tagger);

  // filter
  std::string f_augmented, f_method, f_out;
  int f_k = 10;
  double f_theta = 0.7, f_sigma = 1.0;
  auto* filter = app.add_subcommand("filter", "Apply a static candidate filter to augmented JSONL");
  filter->add_option("--augmented", f_augmented, "Augmented JSONL")->required();
  filter->add_option("--method", f_method, "topk|threshold|std")->required();
  filter->add_option("--k", f_k, "topk size")->capture_default_str();
  filter->add_option("--theta", f_theta, "ps threshold")->capture_default_str();
  filter->add_option("--sigma", f_sigma, "std multiplier")->capture_default_str();
  filter->add_option("--out", f_out, "Filtered augmented JSONL output");

  // eval
  std::string e_run, e_dataset, e_out;
  bool e_pad = false;
  TaggerFlags e_tagger;
  auto* eval = app.add_subcommand("eval", "Score a run against its dataset");
  eval->add_option("--run", e_run, "Run output JSONL")->required();
  eval->add_option("--dataset", e_dataset, "Dataset JSONL")->required();
  eval->add_option("--out", e_out, "Report JSON output (CSV written alongside)");
  eval->add_flag("--pad-hypotheses", e_pad, "Pad datasets with fewer than 5 hypotheses");
  add_tagger_flags(eval, e_tagger);

  // sweep-fewshots
  RunFlags sw_flags;
  BackendFlags sw_backend, sw_gec_backend;
  sw_gec_backend.kind.clear();
  TaggerFlags sw_tagger;
  std::string sw_t = "0..5", sw_out;
  auto* sweep = app.add_subcommand("sweep-fewshots", "Evaluate WER across few-shot counts");
  sweep->add_option("--mode", sw_flags.mode, "Correction mode")->capture_default_str();
  sweep->add_option("--dataset", sw_flags.dataset_path, "Dataset JSONL")->required();
  sweep->add_option("--index", sw_flags.index_path, "Phonetic index file");
  sweep->add_option("--fewshots", sw_flags.fewshots_path, "Augmented JSONL few-shot pool");
  sweep->add_option("--t", sw_t, "Few-shot range, e.g. 0..5")->capture_default_str();
  sweep->add_option("--k", sw_flags.k, "Retrieval depth")->capture_default_str();
  sweep->add_option("--seed", sw_flags.seed, "RNG seed")->capture_default_str();
  sweep->add_option("--jobs", sw_flags.jobs, "Worker pool size")->capture_default_str();
  sweep->add_option("--out", sw_out, "CSV output path");
  add_backend_flags(sweep, sw_backend);
  sweep->add_option("--gec-backend", sw_gec_backend.kind,
                    "Separate backend kind for the correction stage");
  add_tagger_flags(sweep, sw_tagger);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (build->parsed()) return cmd_build_index(gazetteer_path, index_out);
    if (retrieve->parsed()) return cmd_retrieve(retr_index, retr_query, retr_k);
    if (synth->parsed())
      return cmd_synth_corpus(sc_gazetteer, sc_n, sc_seed, sc_max_edits, sc_word_sub, sc_out,
                              sc_variants);
    if (synthr->parsed())
      return cmd_synth_rationales(sr_dataset, sr_index, sr_backend, sr_tagger, sr_k,
                                  sr_max_options, sr_retries, sr_jobs, sr_out, sr_pad);
    if (run->parsed()) return cmd_run(run_flags, run_backend, run_gec_backend, run_tagger);
    if (filter->parsed()) return cmd_filter(f_augmented, f_method, f_k, f_theta, f_sigma, f_out);
    if (eval->parsed()) return cmd_eval(e_run, e_dataset, e_tagger, e_out, e_pad);
    if (sweep->parsed())
      return cmd_sweep_fewshots(sw_flags, sw_backend, sw_gec_backend, sw_tagger, sw_t, sw_out);
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
