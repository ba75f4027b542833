#include "necorr/denoising.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "necorr/errors.hpp"
#include "necorr/prompts.hpp"
#include "necorr/resources.hpp"

namespace necorr {

namespace {

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

std::string format_ps(double ps) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", ps);
  return buf;
}

std::string definition_or_placeholder(const std::string& def) {
  return def.empty() ? "(no definition)" : def;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

std::string options_block(const std::vector<std::pair<char, Candidate>>& options) {
  std::string out;
  for (const auto& [letter, cand] : options) {
    if (!out.empty()) out += '\n';
    out += render_option_line(letter, cand);
  }
  return out;
}

// Extracts the body of the first <tag>...</tag> pair.
std::optional<std::string> tag_body(const std::string& text, const std::string& tag) {
  const std::string open = "<" + tag + ">";
  const std::string close = "</" + tag + ">";
  size_t b = text.find(open);
  if (b == std::string::npos) return std::nullopt;
  b += open.size();
  size_t e = text.find(close, b);
  if (e == std::string::npos) return std::nullopt;
  return text.substr(b, e - b);
}

std::string fewshot_block(const std::vector<McqFewshot>& fewshots) {
  if (fewshots.empty()) return "(none)";
  std::string out;
  for (const auto& fs : fewshots) {
    if (!out.empty()) out += "\n\n";
    out += "<input>\nCloze sentence: " + fs.cloze + "\nOptions:\n" + fs.options_block +
           "\n<output>\n" + fs.rationale_reply;
  }
  return out;
}

}  // namespace

std::string make_cloze(const std::string& h1, const EntitySpan& span) {
  auto words = whitespace_tokens(h1);
  if (span.start_word < 0 || span.end_word <= span.start_word ||
      span.end_word > static_cast<int>(words.size()))
    throw DataError("cloze: span [" + std::to_string(span.start_word) + ", " +
                    std::to_string(span.end_word) + ") out of range for " +
                    std::to_string(words.size()) + " words");
  std::string out;
  for (int i = 0; i < static_cast<int>(words.size()); ++i) {
    if (i >= span.start_word && i < span.end_word) {
      if (i == span.start_word) {
        if (!out.empty()) out += ' ';
        out += "[BLANK]";
      }
      continue;
    }
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

std::vector<Candidate> augment_candidates(const std::vector<std::string>& hyp_surfaces,
                                          const std::vector<Candidate>& retrieved,
                                          const IpaString& query, const PhoneticIndex* index,
                                          const Phonemizer& ph) {
  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;

  for (const auto& surface : hyp_surfaces) {
    std::string key = lower_ascii(surface);
    if (key.empty() || !seen.insert(key).second) continue;
    Candidate c;
    c.record.surface = surface;
    c.record.ipa = ph.phonemize(surface);
    c.record.source = "hypothesis";
    if (index) {
      if (auto idx = index->find_surface(surface))
        c.record.definition = index->record(*idx).definition;
    }
    if (!query.empty() || !c.record.ipa.empty())
      c.ps = phonetic_similarity(query, c.record.ipa, ph.table());
    out.push_back(std::move(c));
  }

  for (const auto& c : retrieved) {
    std::string key = lower_ascii(c.record.surface);
    if (!seen.insert(key).second) continue;
    out.push_back(c);
  }
  return out;
}

std::string render_candidate(const Candidate& c) {
  return "< " + c.record.surface + " | phonetic-score: " + format_ps(c.ps) +
         " | def: " + definition_or_placeholder(c.record.definition) + " >";
}

std::string render_option_line(char letter, const Candidate& c) {
  return std::string(1, letter) + ": " + c.record.surface + " (" + format_ps(c.ps) + " | " +
         definition_or_placeholder(c.record.definition) + ")";
}

std::vector<Candidate> cap_candidates(const std::vector<Candidate>& cands, int max_options) {
  if (max_options < 1) throw DataError("cap_candidates: max_options must be >= 1");
  if (cands.size() <= static_cast<size_t>(max_options)) return cands;
  // Rank positions by ps descending (earlier index wins ties), keep the best
  // max_options, then restore the original relative order.
  std::vector<size_t> order(cands.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return cands[a].ps > cands[b].ps; });
  order.resize(static_cast<size_t>(max_options));
  std::sort(order.begin(), order.end());
  std::vector<Candidate> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(cands[i]);
  return out;
}

McqItem build_mcq(const std::string& cloze, const std::vector<Candidate>& candidates,
                  std::optional<char> gold_letter) {
  if (candidates.empty()) throw DataError("mcq: needs at least one candidate");
  if (candidates.size() > 26)
    throw DataError("mcq: option overflow (" + std::to_string(candidates.size()) +
                    " candidates for 26 letters); cap the candidate list first");
  McqItem mcq;
  mcq.cloze = cloze;
  mcq.gold_letter = gold_letter;
  char letter = 'A';
  for (const auto& c : candidates) mcq.options.emplace_back(letter++, c);
  return mcq;
}

std::optional<McqFewshot> fewshot_mcq(const AugmentedSample& sample, const Tagger& tagger,
                                      int max_options) {
  if (!sample.rationale) return std::nullopt;
  auto spans = tagger.tag(sample.sample.hypotheses[0]);
  if (spans.empty()) return std::nullopt;
  auto capped = cap_candidates(sample.candidates, max_options);
  if (capped.empty()) return std::nullopt;
  McqItem mcq = build_mcq(make_cloze(sample.sample.hypotheses[0], spans.front()), capped);
  McqFewshot fs;
  fs.cloze = mcq.cloze;
  fs.options_block = options_block(mcq.options);
  fs.rationale_reply = *sample.rationale;
  return fs;
}

std::string render_mcq_prompt(const McqItem& mcq, const std::vector<McqFewshot>& fewshots) {
  return render_template(std::string(resources::prompt_module2_reason()),
                         {{"fewshot_examples", fewshot_block(fewshots)},
                          {"cloze_sentence", mcq.cloze},
                          {"options", "\n" + options_block(mcq.options)}});
}

std::string render_synthesis_prompt(const McqItem& mcq, const std::string& answer) {
  std::string input =
      "Cloze sentence: " + mcq.cloze + "\nOptions:\n" + options_block(mcq.options);
  return render_template(std::string(resources::prompt_module1()),
                         {{"input", input}, {"answer", answer}});
}

RationaleAnswer parse_rationale_answer(const std::string& reply, const McqItem& mcq) {
  auto think = tag_body(reply, "think");
  auto answer = tag_body(reply, "answer");
  if (!answer)
    throw RationaleParseError("reply lacks a complete <answer> ... </answer> pair");

  std::string body = trim(*answer);
  if (body.empty()) throw RationaleParseError("empty answer body");

  size_t colon = body.find(':');
  std::string letter_part = trim(colon == std::string::npos ? body : body.substr(0, colon));
  std::string entity_part = colon == std::string::npos ? "" : trim(body.substr(colon + 1));
  if (letter_part.size() != 1)
    throw RationaleParseError("answer must start with a single option letter, got '" + body + "'");
  char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(letter_part[0])));

  for (const auto& [opt_letter, cand] : mcq.options) {
    if (opt_letter != letter) continue;
    RationaleAnswer out;
    out.rationale = think ? trim(*think) : "";
    out.letter = letter;
    // A mismatched entity string resolves in favor of the letter's option.
    out.entity = cand.record.surface;
    (void)entity_part;
    return out;
  }
  throw InvalidOptionError("answer letter '" + std::string(1, letter) +
                           "' is not among the MCQ options");
}

Selection select_entity(const LlmBackend& backend, const McqItem& mcq,
                        const std::vector<McqFewshot>& fewshots, int retries,
                        const std::string& context_key) {
  ChatRequest request;
  request.messages.push_back({"user", render_mcq_prompt(mcq, fewshots)});

  TaskContext ctx;
  ctx.kind = TaskContext::Kind::mcq_select;
  ctx.key = context_key;
  ctx.options = mcq.options;
  ctx.gold_letter = mcq.gold_letter;

  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply = backend.complete(request, ctx);
    try {
      RationaleAnswer answer = parse_rationale_answer(reply, mcq);
      for (const auto& [letter, cand] : mcq.options) {
        if (letter == answer.letter) {
          Selection sel;
          sel.entity = cand;
          sel.rationale = answer.rationale;
          sel.letter = letter;
          return sel;
        }
      }
    } catch (const RationaleParseError&) {
    } catch (const InvalidOptionError&) {
    }
  }

  // Parsing kept failing: fall back to the highest-ps option.
  const std::pair<char, Candidate>* best = nullptr;
  for (const auto& opt : mcq.options) {
    if (!best || opt.second.ps > best->second.ps ||
        (opt.second.ps == best->second.ps && opt.second.record.surface < best->second.record.surface))
      best = &opt;
  }
  Selection sel;
  sel.entity = best->second;
  sel.rationale = "fallback: highest phonetic score";
  sel.letter = best->first;
  sel.fallback = true;
  return sel;
}

namespace {

AugmentedSample synthesize_one(const LlmBackend& generator, const Sample& sample,
                               const std::vector<Candidate>& candidates, const Tagger& tagger,
                               int max_options, int retries) {
  AugmentedSample aug;
  aug.sample = sample;
  // Stored pools keep candidates sorted by ps so the letters assigned here
  // reproduce exactly when the sample is re-rendered as a few-shot example.
  aug.candidates = candidates;
  std::stable_sort(aug.candidates.begin(), aug.candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.ps > b.ps; });

  auto spans = tagger.tag(sample.hypotheses[0]);
  if (spans.empty() || aug.candidates.empty()) return aug;

  auto capped = cap_candidates(aug.candidates, std::min(max_options, 26));

  // The known answer is the option matching the sample's gold entity.
  std::optional<char> gold_letter;
  std::string answer;
  if (sample.gold_entities && !sample.gold_entities->empty()) {
    char letter = 'A';
    for (const auto& cand : capped) {
      for (const auto& gold : *sample.gold_entities) {
        if (lower_ascii(cand.record.surface) == lower_ascii(gold)) {
          gold_letter = letter;
          answer = std::string(1, letter) + ": " + cand.record.surface;
          break;
        }
      }
      if (gold_letter) break;
      ++letter;
    }
  }
  if (!gold_letter) return aug;  // gold not among options: no trustworthy rationale

  McqItem mcq = build_mcq(make_cloze(sample.hypotheses[0], spans.front()), capped, gold_letter);
  ChatRequest request;
  request.messages.push_back({"user", render_synthesis_prompt(mcq, answer)});
  TaskContext ctx;
  ctx.kind = TaskContext::Kind::rationale_synth;
  ctx.key = sample.id + ":0:rat";
  ctx.options = mcq.options;
  ctx.gold_letter = gold_letter;

  for (int attempt = 0; attempt <= retries; ++attempt) {
    std::string reply;
    try {
      reply = generator.complete(request, ctx);
    } catch (const BackendError&) {
      continue;  // per-sample failure; the batch goes on
    }
    if (tag_body(reply, "think") && tag_body(reply, "answer")) {
      aug.rationale = reply;
      break;
    }
  }
  return aug;
}

}  // namespace

std::vector<AugmentedSample> synthesize_rationales(
    const LlmBackend& generator, const std::vector<std::pair<Sample, std::vector<Candidate>>>& data,
    const Tagger& tagger, int max_options, int retries, int jobs) {
  std::vector<AugmentedSample> out(data.size());
  std::vector<std::exception_ptr> errors(data.size());
  const int64_t n = static_cast<int64_t>(data.size());
  const int workers = std::max(1, jobs);

#pragma omp parallel for num_threads(workers) schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    try {
      out[i] = synthesize_one(generator, data[i].first, data[i].second, tagger, max_options,
                              retries);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace necorr
