#include "necorr/correction.hpp"

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "necorr/errors.hpp"
#include "necorr/prompts.hpp"
#include "necorr/resources.hpp"
#include "necorr/rng.hpp"

namespace necorr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::string numbered_hypotheses(const std::array<std::string, 5>& hypotheses) {
  std::string out;
  for (size_t i = 0; i < hypotheses.size(); ++i)
    out += "\n" + std::to_string(i + 1) + ". " + hypotheses[i];
  return out;
}

std::string gec_fewshot_block(const std::vector<GecFewshot>& fewshots) {
  if (fewshots.empty()) return "(none)";
  std::string out;
  for (const auto& fs : fewshots) {
    if (!out.empty()) out += "\n\n";
    out += "<input>\n5-best: " + numbered_hypotheses(fs.hypotheses) + "\n";
    if (fs.entity_block) out += "Named-Entities: " + *fs.entity_block + "\n";
    out += "<output>\nCorrected: " + fs.corrected;
  }
  return out;
}

// Finds the first whole-word occurrence of `surface` in `text`
// (case-insensitive over whitespace tokens).
std::optional<EntitySpan> locate_surface(const std::string& text, const std::string& surface) {
  auto words = whitespace_tokens(text);
  auto target = whitespace_tokens(lower_ascii(surface));
  if (target.empty() || target.size() > words.size()) return std::nullopt;
  for (size_t i = 0; i + target.size() <= words.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < target.size(); ++j) {
      if (lower_ascii(words[i + j]) != target[j]) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    std::string covered;
    for (size_t j = 0; j < target.size(); ++j) {
      if (j) covered += ' ';
      covered += words[i + j];
    }
    return EntitySpan{static_cast<int>(i), static_cast<int>(i + target.size()), covered};
  }
  return std::nullopt;
}

// Entity surfaces tagged across all five hypotheses, in hypothesis order.
std::vector<std::string> hypothesis_entities(const Sample& sample, const Tagger& tagger) {
  std::vector<std::string> surfaces;
  for (const auto& hyp : sample.hypotheses)
    for (const auto& span : tagger.tag(hyp)) surfaces.push_back(span.surface);
  return surfaces;
}

std::string entity_block_for_candidates(const std::vector<Candidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    if (!out.empty()) out += ' ';
    out += render_candidate(c);
  }
  return out;
}

Candidate gold_candidate(const std::string& surface, const PhoneticIndex* index,
                         const Phonemizer& ph) {
  Candidate c;
  c.record.surface = surface;
  c.record.ipa = ph.phonemize(surface);
  c.record.source = "gold";
  c.ps = 1.0;
  if (index) {
    if (auto idx = index->find_surface(surface))
      c.record.definition = index->record(*idx).definition;
  }
  return c;
}

}  // namespace

PipelineMode parse_pipeline_mode(const std::string& name) {
  if (name == "asr") return PipelineMode::asr;
  if (name == "gec") return PipelineMode::gec;
  if (name == "ragec") return PipelineMode::ragec;
  if (name == "deragec") return PipelineMode::deragec;
  if (name == "oracle") return PipelineMode::oracle;
  throw DataError("unknown mode '" + name + "' (expected asr|gec|ragec|deragec|oracle)");
}

std::string pipeline_mode_name(PipelineMode mode) {
  switch (mode) {
    case PipelineMode::asr: return "asr";
    case PipelineMode::gec: return "gec";
    case PipelineMode::ragec: return "ragec";
    case PipelineMode::deragec: return "deragec";
    case PipelineMode::oracle: return "oracle";
  }
  return "?";
}

std::string run_asr_baseline(const Sample& sample) { return sample.hypotheses[0]; }

std::vector<AugmentedSample> sample_fewshots(const std::vector<AugmentedSample>& pool, int t,
                                             uint64_t seed) {
  if (t <= 0 || pool.empty()) return {};
  const size_t take = std::min<size_t>(static_cast<size_t>(t), pool.size());
  std::vector<size_t> idx(pool.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  SeededRng rng(seed);
  for (size_t i = 0; i < take; ++i) {
    size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<AugmentedSample> out;
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) out.push_back(pool[idx[i]]);
  return out;
}

std::string build_gec_prompt(const std::array<std::string, 5>& hypotheses,
                             const std::optional<std::string>& entity_block,
                             const std::vector<GecFewshot>& fewshots) {
  std::string entities_line;
  if (entity_block) entities_line = "Named-Entities: " + *entity_block + "\n";
  return render_template(std::string(resources::prompt_module3()),
                         {{"fewshot_examples", gec_fewshot_block(fewshots)},
                          {"hypotheses", numbered_hypotheses(hypotheses)},
                          {"named_entities_line", entities_line}});
}

std::string run_gec(const LlmBackend& backend, const Sample& sample,
                    const std::vector<GecFewshot>& fewshots, const std::string& context_key,
                    std::optional<TaskContext> context, std::vector<std::string>* fallbacks) {
  ChatRequest request;
  request.messages.push_back({"user", build_gec_prompt(sample.hypotheses, std::nullopt, fewshots)});
  TaskContext ctx;
  if (context) {
    ctx = std::move(*context);
  } else {
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = context_key;
    ctx.h1 = sample.hypotheses[0];
    ctx.reference = sample.reference;
  }
  std::string reply = trim(backend.complete(request, ctx));
  if (reply.empty()) {
    if (fallbacks) fallbacks->push_back("empty_reply:" + ctx.key);
    return sample.hypotheses[0];
  }
  return reply;
}

std::string run_ragec(const LlmBackend& backend, const Sample& sample,
                      const std::vector<Candidate>& candidates,
                      const std::vector<GecFewshot>& fewshots, const std::string& context_key,
                      std::optional<std::string> reference, std::vector<std::string>* fallbacks) {
  std::optional<std::string> block;
  if (!candidates.empty()) block = entity_block_for_candidates(candidates);
  ChatRequest request;
  request.messages.push_back({"user", build_gec_prompt(sample.hypotheses, block, fewshots)});
  TaskContext ctx;
  ctx.kind = TaskContext::Kind::gec;
  ctx.key = context_key;
  ctx.h1 = sample.hypotheses[0];
  ctx.reference = reference ? reference : std::optional<std::string>(sample.reference);
  std::string reply = trim(backend.complete(request, ctx));
  if (reply.empty()) {
    if (fallbacks) fallbacks->push_back("empty_reply:" + ctx.key);
    return sample.hypotheses[0];
  }
  return reply;
}

std::string splice_correct(const std::string& h1, const EntitySpan& span,
                           const std::string& replacement) {
  auto words = whitespace_tokens(h1);
  if (span.start_word < 0 || span.end_word <= span.start_word ||
      span.end_word > static_cast<int>(words.size()))
    throw DataError("splice: span [" + std::to_string(span.start_word) + ", " +
                    std::to_string(span.end_word) + ") out of range for " +
                    std::to_string(words.size()) + " words");
  std::string out;
  for (int i = 0; i < static_cast<int>(words.size()); ++i) {
    if (i >= span.start_word && i < span.end_word) {
      if (i == span.start_word) {
        if (!out.empty()) out += ' ';
        out += replacement;
      }
      continue;
    }
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

RunOutput run_deragec(const Sample& sample, const RunConfig& config, const PipelineDeps& deps,
                      const std::vector<McqFewshot>& mcq_fewshots,
                      const std::vector<GecFewshot>& gec_fewshots) {
  const Phonemizer& ph = *deps.phonemizer;
  const LlmBackend& selector = *deps.backend;
  const LlmBackend& corrector = deps.gec_backend ? *deps.gec_backend : *deps.backend;

  RunOutput out;
  out.id = sample.id;
  out.mode = config.mode;

  auto spans = deps.tagger->tag(sample.hypotheses[0]);
  if (spans.empty()) {
    out.transcript = run_gec(corrector, sample, gec_fewshots, sample.id + ":0:gec");
    out.fallbacks.push_back("no_spans:gec");
    return out;
  }

  std::vector<std::string> n_hyp = hypothesis_entities(sample, *deps.tagger);
  std::string current = sample.hypotheses[0];

  for (size_t span_idx = 0; span_idx < spans.size(); ++span_idx) {
    const std::string span_key = sample.id + ":" + std::to_string(span_idx);

    auto located = locate_surface(current, spans[span_idx].surface);
    if (!located) {
      out.fallbacks.push_back("span_lost:" + spans[span_idx].surface);
      continue;
    }

    IpaString query = ph.phonemize(located->surface);
    if (query.empty()) {
      out.fallbacks.push_back("empty_query:" + located->surface);
      continue;
    }

    std::vector<Candidate> retrieved;
    if (deps.index) retrieved = deps.index->retrieve_topk(query, config.k);
    if (config.filter && !retrieved.empty()) retrieved = apply_filter(retrieved, *config.filter);

    // The span surface itself scores a degenerate ps of 1.0 against its own
    // query, so it is dropped from the hypothesis-derived options. When it is
    // a real entity, retrieval still offers it (at ps 1.0); when it is an ASR
    // misspelling, the gate now has to pick a gazetteer candidate instead.
    std::vector<std::string> span_n_hyp;
    for (const auto& surface : n_hyp)
      if (lower_ascii(surface) != lower_ascii(located->surface)) span_n_hyp.push_back(surface);

    std::vector<Candidate> candidates =
        cap_candidates(augment_candidates(span_n_hyp, retrieved, query, deps.index, ph),
                       std::min(config.max_options, 26));
    if (candidates.empty()) {
      out.fallbacks.push_back("no_candidates:" + located->surface);
      continue;
    }

    std::optional<char> gold_letter;
    if (sample.gold_entities) {
      char letter = 'A';
      for (const auto& c : candidates) {
        for (const auto& gold : *sample.gold_entities) {
          if (lower_ascii(c.record.surface) == lower_ascii(gold)) {
            gold_letter = letter;
            break;
          }
        }
        if (gold_letter) break;
        ++letter;
      }
    }

    McqItem mcq = build_mcq(make_cloze(current, *located), candidates, gold_letter);
    Selection sel = select_entity(selector, mcq, mcq_fewshots, config.retries, span_key + ":mcq");
    if (sel.fallback) out.fallbacks.push_back("parse_fallback:" + span_key);

    std::string entity_block =
        render_candidate(sel.entity) + " rationale: " + sel.rationale;

    std::array<std::string, 5> hyps = sample.hypotheses;
    hyps[0] = current;
    ChatRequest request;
    request.messages.push_back({"user", build_gec_prompt(hyps, entity_block, gec_fewshots)});
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = span_key + ":gec";
    ctx.h1 = current;
    ctx.span = *located;
    ctx.replacement = sel.entity.record.surface;
    ctx.reference = sample.reference;

    std::string reply = trim(corrector.complete(request, ctx));
    if (reply.empty()) {
      out.fallbacks.push_back("empty_reply:" + span_key);
    } else {
      current = reply;
    }

    SpanSelection record;
    record.span = *located;
    record.letter = sel.letter;
    record.entity = sel.entity.record.surface;
    record.ps = sel.entity.ps;
    record.rationale = sel.rationale;
    out.selections.push_back(std::move(record));
  }

  out.transcript = current;
  return out;
}

namespace {

RunOutput run_oracle_mode(const Sample& sample, const RunConfig& config, const PipelineDeps& deps,
                          const std::vector<GecFewshot>& gec_fewshots) {
  if (!sample.gold_entities || sample.gold_entities->empty())
    throw DataError("oracle mode requires gold_entities on sample " + sample.id);
  const Phonemizer& ph = *deps.phonemizer;
  const LlmBackend& corrector = deps.gec_backend ? *deps.gec_backend : *deps.backend;

  RunOutput out;
  out.id = sample.id;
  out.mode = config.mode;

  std::vector<Candidate> golds;
  for (const auto& g : *sample.gold_entities) golds.push_back(gold_candidate(g, deps.index, ph));
  const std::string block = entity_block_for_candidates(golds);

  auto spans = deps.tagger ? deps.tagger->tag(sample.hypotheses[0]) : std::vector<EntitySpan>{};
  std::string current = sample.hypotheses[0];

  if (spans.empty()) {
    ChatRequest request;
    request.messages.push_back({"user", build_gec_prompt(sample.hypotheses, block, gec_fewshots)});
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = sample.id + ":0:gec";
    ctx.h1 = current;
    ctx.reference = sample.reference;
    std::string reply = trim(corrector.complete(request, ctx));
    out.transcript = reply.empty() ? current : reply;
    out.fallbacks.push_back("no_spans:gec");
    return out;
  }

  for (size_t span_idx = 0; span_idx < spans.size(); ++span_idx) {
    auto located = locate_surface(current, spans[span_idx].surface);
    if (!located) {
      out.fallbacks.push_back("span_lost:" + spans[span_idx].surface);
      continue;
    }
    // Pick the gold entity phonetically closest to this span.
    IpaString query = ph.phonemize(located->surface);
    const Candidate* pick = &golds.front();
    if (!query.empty() && golds.size() > 1) {
      double best = -1.0;
      for (const auto& g : golds) {
        double ps = g.record.ipa.empty() ? 0.0 : phonetic_similarity(query, g.record.ipa, ph.table());
        if (ps > best) {
          best = ps;
          pick = &g;
        }
      }
    }

    std::array<std::string, 5> hyps = sample.hypotheses;
    hyps[0] = current;
    ChatRequest request;
    request.messages.push_back({"user", build_gec_prompt(hyps, block, gec_fewshots)});
    TaskContext ctx;
    ctx.kind = TaskContext::Kind::gec;
    ctx.key = sample.id + ":" + std::to_string(span_idx) + ":gec";
    ctx.h1 = current;
    ctx.span = *located;
    ctx.replacement = pick->record.surface;
    ctx.reference = sample.reference;
    std::string reply = trim(corrector.complete(request, ctx));
    if (!reply.empty()) current = reply;

    SpanSelection record;
    record.span = *located;
    record.letter = 'A';
    record.entity = pick->record.surface;
    record.ps = pick->ps;
    record.rationale = "oracle: ground-truth entity";
    out.selections.push_back(std::move(record));
  }
  out.transcript = current;
  return out;
}

RunOutput run_one(const Sample& sample, const RunConfig& config, const PipelineDeps& deps,
                  const std::vector<McqFewshot>& mcq_fewshots,
                  const std::vector<GecFewshot>& gec_fewshots) {
  RunOutput out;
  out.id = sample.id;
  out.mode = config.mode;
  switch (config.mode) {
    case PipelineMode::asr:
      out.transcript = run_asr_baseline(sample);
      return out;
    case PipelineMode::gec: {
      const LlmBackend& corrector = deps.gec_backend ? *deps.gec_backend : *deps.backend;
      out.transcript = run_gec(corrector, sample, gec_fewshots, sample.id + ":0:gec",
                               std::nullopt, &out.fallbacks);
      return out;
    }
    case PipelineMode::ragec: {
      const LlmBackend& corrector = deps.gec_backend ? *deps.gec_backend : *deps.backend;
      const Phonemizer& ph = *deps.phonemizer;
      std::vector<Candidate> candidates;
      if (deps.tagger && deps.index) {
        std::unordered_set<std::string> seen;
        for (const auto& span : deps.tagger->tag(sample.hypotheses[0])) {
          IpaString query = ph.phonemize(span.surface);
          if (query.empty()) continue;
          auto retrieved = deps.index->retrieve_topk(query, config.k);
          if (config.filter) retrieved = apply_filter(retrieved, *config.filter);
          for (auto& c : retrieved) {
            if (seen.insert(lower_ascii(c.record.surface)).second)
              candidates.push_back(std::move(c));
          }
        }
      }
      out.transcript = run_ragec(corrector, sample, candidates, gec_fewshots,
                                 sample.id + ":0:gec", std::nullopt, &out.fallbacks);
      if (candidates.empty()) out.fallbacks.push_back("no_candidates:gec");
      return out;
    }
    case PipelineMode::deragec:
      return run_deragec(sample, config, deps, mcq_fewshots, gec_fewshots);
    case PipelineMode::oracle:
      return run_oracle_mode(sample, config, deps, gec_fewshots);
  }
  throw DataError("unknown pipeline mode");
}

}  // namespace

std::vector<RunOutput> run_pipeline(const std::vector<Sample>& samples, const RunConfig& config,
                                    const PipelineDeps& deps) {
  if (!deps.phonemizer) throw DataError("pipeline: phonemizer required");
  if (config.mode != PipelineMode::asr && !deps.backend)
    throw DataError("pipeline: backend required for mode " + pipeline_mode_name(config.mode));
  if ((config.mode == PipelineMode::deragec || config.mode == PipelineMode::ragec ||
       config.mode == PipelineMode::oracle) &&
      !deps.tagger)
    throw DataError("pipeline: tagger required for mode " + pipeline_mode_name(config.mode));

  // Few-shot examples are sampled once per run, then rendered per task shape.
  // The deragec gate needs rationale-bearing examples, so samples whose
  // synthesis failed are excluded from its pool before sampling.
  std::vector<AugmentedSample> pool = deps.fewshot_pool;
  if (config.mode == PipelineMode::deragec) {
    std::erase_if(pool, [](const AugmentedSample& s) { return !s.rationale.has_value(); });
  }
  auto sampled = sample_fewshots(pool, config.fewshot_count, config.seed);

  std::vector<McqFewshot> mcq_fewshots;
  std::vector<GecFewshot> gec_fewshots;
  for (const auto& fs : sampled) {
    if (config.mode == PipelineMode::deragec && deps.tagger) {
      if (auto mcq = fewshot_mcq(fs, *deps.tagger, config.max_options))
        mcq_fewshots.push_back(std::move(*mcq));
    }
    GecFewshot gec;
    gec.hypotheses = fs.sample.hypotheses;
    gec.corrected = fs.sample.reference;
    switch (config.mode) {
      case PipelineMode::asr:
      case PipelineMode::gec:
        break;
      case PipelineMode::ragec:
        if (!fs.candidates.empty()) gec.entity_block = entity_block_for_candidates(fs.candidates);
        break;
      case PipelineMode::deragec:
      case PipelineMode::oracle: {
        if (!fs.sample.gold_entities || fs.sample.gold_entities->empty()) break;
        Candidate gold =
            gold_candidate(fs.sample.gold_entities->front(), deps.index, *deps.phonemizer);
        std::string block = render_candidate(gold);
        if (config.mode == PipelineMode::deragec && fs.rationale)
          block += " rationale: " + *fs.rationale;
        gec.entity_block = std::move(block);
        break;
      }
    }
    gec_fewshots.push_back(std::move(gec));
  }
  if (config.mode == PipelineMode::asr) gec_fewshots.clear();

  std::vector<RunOutput> outputs(samples.size());
  std::vector<std::exception_ptr> errors(samples.size());
  const int64_t n = static_cast<int64_t>(samples.size());
  const int jobs = std::max(1, config.jobs);

#pragma omp parallel for num_threads(jobs) schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    try {
      outputs[i] = run_one(samples[i], config, deps, mcq_fewshots, gec_fewshots);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return outputs;
}

std::string run_output_to_json_line(const RunOutput& out) {
  ordered_json j;
  j["id"] = out.id;
  j["mode"] = pipeline_mode_name(out.mode);
  j["transcript"] = out.transcript;
  ordered_json selections = ordered_json::array();
  for (const auto& sel : out.selections) {
    ordered_json sj;
    sj["span"] = {{"start_word", sel.span.start_word},
                  {"end_word", sel.span.end_word},
                  {"surface", sel.span.surface}};
    sj["letter"] = std::string(1, sel.letter);
    sj["entity"] = sel.entity;
    sj["ps"] = sel.ps;
    sj["rationale"] = sel.rationale;
    selections.push_back(std::move(sj));
  }
  j["selections"] = std::move(selections);
  j["fallbacks"] = out.fallbacks;
  return j.dump();
}

void write_run_outputs(const std::string& path, const std::vector<RunOutput>& outputs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("run output: cannot write " + path);
  for (const auto& o : outputs) out << run_output_to_json_line(o) << '\n';
}

std::vector<RunOutput> load_run_outputs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("run output: cannot open " + path);
  std::vector<RunOutput> outputs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("run output: " + path + " line " + std::to_string(line_no) + ": " +
                      e.what());
    }
    RunOutput o;
    o.id = j.at("id").get<std::string>();
    o.mode = parse_pipeline_mode(j.at("mode").get<std::string>());
    o.transcript = j.at("transcript").get<std::string>();
    if (j.contains("selections")) {
      for (const auto& sj : j["selections"]) {
        SpanSelection sel;
        sel.span.start_word = sj.at("span").at("start_word").get<int>();
        sel.span.end_word = sj.at("span").at("end_word").get<int>();
        sel.span.surface = sj.at("span").at("surface").get<std::string>();
        std::string letter = sj.at("letter").get<std::string>();
        sel.letter = letter.empty() ? 'A' : letter[0];
        sel.entity = sj.at("entity").get<std::string>();
        sel.ps = sj.at("ps").get<double>();
        sel.rationale = sj.value("rationale", std::string());
        o.selections.push_back(std::move(sel));
      }
    }
    if (j.contains("fallbacks"))
      for (const auto& f : j["fallbacks"]) o.fallbacks.push_back(f.get<std::string>());
    outputs.push_back(std::move(o));
  }
  return outputs;
}

}  // namespace necorr
