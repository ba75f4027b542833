#include "necorr/metrics.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "necorr/errors.hpp"
#include "necorr/filtering.hpp"
#include "necorr/phonetics.hpp"

namespace necorr {

namespace {

long word_levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<long> prev(m + 1), curr(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<long>(j);
  for (size_t i = 1; i <= n; ++i) {
    curr[0] = static_cast<long>(i);
    for (size_t j = 1; j <= m; ++j) {
      long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      curr[j] = std::min({sub, prev[j] + 1, curr[j - 1] + 1});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

// True when the entity's normalized word sequence occurs contiguously in the
// transcript's normalized words.
bool contains_entity(const std::vector<std::string>& transcript_words, const std::string& entity) {
  auto target = normalize_words(entity);
  if (target.empty() || target.size() > transcript_words.size()) return false;
  for (size_t i = 0; i + target.size() <= transcript_words.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < target.size(); ++j) {
      if (transcript_words[i + j] != target[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

struct HitCounts {
  long gold_total = 0;
  long hits = 0;
  long transcript_entities = 0;
};

HitCounts count_hits(const std::vector<std::string>& references,
                     const std::vector<std::string>& transcripts, const Tagger& tagger) {
  if (references.size() != transcripts.size())
    throw DataError("ne hit ratio: references and transcripts differ in length");
  HitCounts counts;
  for (size_t i = 0; i < references.size(); ++i) {
    auto transcript_words = normalize_words(transcripts[i]);
    for (const auto& span : tagger.tag(references[i])) {
      ++counts.gold_total;
      if (contains_entity(transcript_words, span.surface)) ++counts.hits;
    }
    counts.transcript_entities += static_cast<long>(tagger.tag(transcripts[i]).size());
  }
  return counts;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::string csv_number(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

WerResult wer(const std::string& reference, const std::string& hypothesis) {
  auto ref_words = normalize_words(reference);
  auto hyp_words = normalize_words(hypothesis);
  WerResult result;
  result.ref_words = static_cast<long>(ref_words.size());
  result.distance = word_levenshtein(ref_words, hyp_words);
  return result;
}

void CorpusWer::add(const std::string& reference, const std::string& hypothesis) {
  WerResult r = wer(reference, hypothesis);
  if (r.ref_words == 0) {
    ++empty_references;
    return;
  }
  distance_sum += r.distance;
  word_sum += r.ref_words;
}

double CorpusWer::value() const {
  if (word_sum == 0) return 0.0;
  return static_cast<double>(distance_sum) / static_cast<double>(word_sum);
}

double ne_hit_ratio(const std::vector<std::string>& references,
                    const std::vector<std::string>& transcripts, const Tagger& tagger) {
  HitCounts counts = count_hits(references, transcripts, tagger);
  if (counts.gold_total == 0)
    throw DataError("ne hit ratio: metric undefined, no gold entities in the corpus");
  return static_cast<double>(counts.hits) / static_cast<double>(counts.gold_total);
}

std::optional<double> ne_hit_ratio_literal(const std::vector<std::string>& references,
                                           const std::vector<std::string>& transcripts,
                                           const Tagger& tagger) {
  HitCounts counts = count_hits(references, transcripts, tagger);
  if (counts.transcript_entities == 0) return std::nullopt;
  return static_cast<double>(counts.hits) / static_cast<double>(counts.transcript_entities);
}

double ner_f1(const std::vector<std::string>& pseudo_labels,
              const std::vector<std::string>& predicted) {
  if (pseudo_labels.empty() && predicted.empty()) return 1.0;
  if (pseudo_labels.empty() || predicted.empty()) return 0.0;

  std::map<std::string, long> gold_counts;
  for (const auto& s : pseudo_labels) ++gold_counts[lower_ascii(s)];
  long matches = 0;
  for (const auto& s : predicted) {
    auto it = gold_counts.find(lower_ascii(s));
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++matches;
    }
  }
  if (matches == 0) return 0.0;
  double precision = static_cast<double>(matches) / static_cast<double>(predicted.size());
  double recall = static_cast<double>(matches) / static_cast<double>(pseudo_labels.size());
  return 2.0 * precision * recall / (precision + recall);
}

double corpus_ner_f1(const std::vector<std::string>& references,
                     const std::vector<std::string>& first_hypotheses, const Tagger& tagger) {
  if (references.size() != first_hypotheses.size())
    throw DataError("ner f1: references and hypotheses differ in length");
  std::vector<std::string> pseudo, predicted;
  for (size_t i = 0; i < references.size(); ++i) {
    for (const auto& span : tagger.tag(references[i])) pseudo.push_back(span.surface);
    for (const auto& span : tagger.tag(first_hypotheses[i])) predicted.push_back(span.surface);
  }
  return ner_f1(pseudo, predicted);
}

EvalReport assemble_report(const std::vector<RunOutput>& runs, const std::vector<Sample>& dataset,
                           const Tagger& tagger) {
  std::unordered_map<std::string, const Sample*> by_id;
  for (const auto& s : dataset) by_id.emplace(s.id, &s);

  std::string missing;
  for (const auto& r : runs) {
    if (!by_id.count(r.id)) {
      if (!missing.empty()) missing += ", ";
      missing += r.id;
    }
  }
  if (!missing.empty())
    throw DataError("report: run ids missing from the dataset: " + missing);
  if (runs.size() != dataset.size()) {
    std::unordered_map<std::string, bool> covered;
    for (const auto& r : runs) covered.emplace(r.id, true);
    for (const auto& s : dataset) {
      if (!covered.count(s.id)) {
        if (!missing.empty()) missing += ", ";
        missing += s.id;
      }
    }
    throw DataError("report: dataset ids missing from the run: " + missing);
  }

  EvalReport report;
  report.samples = static_cast<long>(runs.size());

  std::vector<std::string> references, transcripts, first_hypotheses;
  references.reserve(runs.size());
  transcripts.reserve(runs.size());
  CorpusWer corpus_wer;
  bool any_selections = false;

  std::vector<std::vector<Candidate>> surviving;
  std::vector<std::string> gold_for_survivors;

  for (const auto& r : runs) {
    const Sample& sample = *by_id.at(r.id);
    report.method = pipeline_mode_name(r.mode);
    references.push_back(sample.reference);
    transcripts.push_back(r.transcript);
    first_hypotheses.push_back(sample.hypotheses[0]);
    corpus_wer.add(sample.reference, r.transcript);

    // Survivor accounting for the denoising gate: the selected entity plus
    // the entities present in the 5 hypotheses.
    if (!r.selections.empty() && sample.gold_entities && !sample.gold_entities->empty()) {
      any_selections = true;
      std::vector<Candidate> kept;
      for (const auto& sel : r.selections) {
        Candidate c;
        c.record.surface = sel.entity;
        c.ps = sel.ps;
        kept.push_back(std::move(c));
      }
      for (const auto& hyp : sample.hypotheses) {
        for (const auto& span : tagger.tag(hyp)) {
          Candidate c;
          c.record.surface = span.surface;
          kept.push_back(std::move(c));
        }
      }
      surviving.push_back(std::move(kept));
      gold_for_survivors.push_back(sample.gold_entities->front());
    }
  }

  report.wer = corpus_wer.value();
  report.empty_references = corpus_wer.empty_references;
  report.reference_words = corpus_wer.word_sum;

  HitCounts counts = count_hits(references, transcripts, tagger);
  report.gold_entities = counts.gold_total;
  if (counts.gold_total == 0)
    throw DataError("report: metric undefined, no gold entities tagged in the references");
  report.ne_hit_ratio = static_cast<double>(counts.hits) / static_cast<double>(counts.gold_total);
  if (counts.transcript_entities > 0)
    report.ne_hit_ratio_literal =
        static_cast<double>(counts.hits) / static_cast<double>(counts.transcript_entities);

  report.ner_f1 = corpus_ner_f1(references, first_hypotheses, tagger);

  if (any_selections) {
    RecallPrecision rp = candidate_recall_precision(surviving, gold_for_survivors);
    report.candidate_recall = rp.recall;
    report.candidate_precision = rp.precision;
  }
  return report;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["method"] = report.method;
  j["wer"] = report.wer;
  j["ne_hit_ratio"] = report.ne_hit_ratio;
  if (report.ne_hit_ratio_literal) j["ne_hit_ratio_literal"] = *report.ne_hit_ratio_literal;
  if (report.candidate_recall) j["candidate_recall"] = *report.candidate_recall;
  if (report.candidate_precision) j["candidate_precision"] = *report.candidate_precision;
  if (report.ner_f1) j["ner_f1"] = *report.ner_f1;
  j["counts"] = {{"samples", report.samples},
                 {"reference_words", report.reference_words},
                 {"gold_entities", report.gold_entities},
                 {"empty_references", report.empty_references}};
  return j.dump(2);
}

std::string reports_to_csv(const std::vector<EvalReport>& reports) {
  std::string csv = "method,recall,precision,wer,ne_hit\n";
  for (const auto& r : reports) {
    csv += r.method + ",";
    csv += (r.candidate_recall ? csv_number(*r.candidate_recall) : "") + ",";
    csv += (r.candidate_precision ? csv_number(*r.candidate_precision) : "") + ",";
    csv += csv_number(r.wer) + ",";
    csv += csv_number(r.ne_hit_ratio) + "\n";
  }
  return csv;
}

}  // namespace necorr
