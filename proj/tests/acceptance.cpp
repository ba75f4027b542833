// Acceptance suite: every criterion prints one [PASS]/[FAIL] line with its
// wall time. Tolerances are pinned in the assertions themselves.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "necorr/corpus.hpp"
#include "necorr/correction.hpp"
#include "necorr/denoising.hpp"
#include "necorr/filtering.hpp"
#include "necorr/llm.hpp"
#include "necorr/metrics.hpp"
#include "necorr/ne_index.hpp"
#include "necorr/phonetics.hpp"
#include "necorr/prompts.hpp"
#include "necorr/resources.hpp"
#include "necorr/rng.hpp"
#include "oracles.hpp"

using namespace necorr;

namespace {

class Criterion {
public:
  Criterion(int number, const char* description)
      : number_(number), description_(description), start_(std::chrono::steady_clock::now()) {}

  void expect(bool condition) { ok_ = ok_ && condition; }

  bool finish(double limit_seconds) {
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    bool in_time = elapsed < limit_seconds;
    std::printf("[%s] criterion %d: %s (%.2fs, limit %.0fs)\n",
                ok_ && in_time ? "PASS" : "FAIL", number_, description_, elapsed, limit_seconds);
    std::fflush(stdout);
    return ok_ && in_time;
  }

private:
  int number_;
  const char* description_;
  std::chrono::steady_clock::time_point start_;
  bool ok_ = true;
};

const PhoneticIndex& big_index() {
  static const PhoneticIndex index =
      PhoneticIndex::build(synth_gazetteer(10000, 1001), Phonemizer::embedded());
  return index;
}

std::vector<NamedEntityRecord> records_of(const PhoneticIndex& index) {
  std::vector<NamedEntityRecord> records;
  for (size_t i = 0; i < index.size(); ++i) records.push_back(index.record(i));
  return records;
}

IpaString random_query(SeededRng& rng, const FeatureTable& table) {
  std::vector<SegmentId> ids;
  size_t len = 1 + rng.below(10);
  for (size_t i = 0; i < len; ++i)
    ids.push_back(static_cast<SegmentId>(rng.below(table.segment_count())));
  return IpaString(std::move(ids));
}

bool same_results(const std::vector<Candidate>& a, const std::vector<Candidate>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].record.surface != b[i].record.surface || a[i].ps != b[i].ps) return false;
  return true;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

struct OfflineRun {
  SynthCorpus corpus;
  std::vector<RunOutput> asr;
  std::vector<RunOutput> deragec;
  double wer_asr = 0.0;
  double wer_deragec = 0.0;
};

OfflineRun run_offline(const PhoneticIndex& index, int samples, int max_edits,
                       double word_sub_prob, uint64_t seed, BackendKind selector_kind,
                       int jobs = 1) {
  const Phonemizer& ph = Phonemizer::embedded();
  NoiseConfig noise;
  noise.max_edits = max_edits;
  noise.word_sub_prob = word_sub_prob;
  OfflineRun run;
  run.corpus = synth_corpus(records_of(index), samples, noise, seed, ph);

  GazetteerTagger tagger(run.corpus.surface_variants);
  BackendSpec selector_spec;
  selector_spec.kind = selector_kind;
  auto selector = make_backend(selector_spec);
  auto splicer = make_backend(BackendSpec{});  // heuristic

  PipelineDeps deps;
  deps.phonemizer = &ph;
  deps.index = &index;
  deps.tagger = &tagger;
  deps.backend = selector.get();
  deps.gec_backend = splicer.get();

  RunConfig config;
  config.mode = PipelineMode::asr;
  config.jobs = jobs;
  run.asr = run_pipeline(run.corpus.samples, config, deps);
  config.mode = PipelineMode::deragec;
  run.deragec = run_pipeline(run.corpus.samples, config, deps);

  CorpusWer asr_wer, der_wer;
  for (size_t i = 0; i < run.corpus.samples.size(); ++i) {
    asr_wer.add(run.corpus.samples[i].reference, run.asr[i].transcript);
    der_wer.add(run.corpus.samples[i].reference, run.deragec[i].transcript);
  }
  run.wer_asr = asr_wer.value();
  run.wer_deragec = der_wer.value();
  return run;
}

}  // namespace

TEST_CASE("criterion 1: retrieval exactness") {
  Criterion crit(1, "two-stage retrieval equals the linear-scan oracle at k in {1,5,10,15}");
  const PhoneticIndex& index = big_index();
  auto records = records_of(index);
  const FeatureTable& table = Phonemizer::embedded().table();

  SeededRng rng(2101);
  for (int q = 0; q < 200; ++q) {
    IpaString query = random_query(rng, table);
    auto oracle_full = oracles::scan_topk(records, query, 15, table);
    for (int k : {1, 5, 10, 15}) {
      auto staged = index.retrieve_topk(query, k);
      std::vector<Candidate> expect(oracle_full.begin(), oracle_full.begin() + k);
      bool equal = same_results(staged, expect);
      crit.expect(equal);
      CHECK(equal);
    }
  }
  CHECK(crit.finish(30.0));
}

TEST_CASE("criterion 2: precision ceiling reproduction") {
  Criterion crit(2, "six survivors with gold once give precision 1/6");
  std::vector<std::vector<Candidate>> surviving;
  std::vector<std::string> gold;
  for (int i = 0; i < 100; ++i) {
    std::vector<Candidate> kept;
    for (int j = 0; j < 6; ++j) {
      Candidate c;
      c.record.surface = (j == 3) ? "gold" : "noise" + std::to_string(j);
      c.ps = 0.9 - 0.05 * j;
      kept.push_back(std::move(c));
    }
    surviving.push_back(std::move(kept));
    gold.push_back("Gold");
  }
  RecallPrecision rp = candidate_recall_precision(surviving, gold);
  bool precision_exact = std::abs(rp.precision - 1.0 / 6.0) < 1e-9;
  bool recall_full = rp.recall == 1.0;
  crit.expect(precision_exact);
  crit.expect(recall_full);
  CHECK(precision_exact);
  CHECK(recall_full);
  CHECK(crit.finish(1.0));
}

TEST_CASE("criterion 3: static filtering trends") {
  Criterion crit(3, "recall monotone in K and theta; precision opposite at the endpoints");
  const Phonemizer& ph = Phonemizer::embedded();
  const PhoneticIndex& index = big_index();

  NoiseConfig noise;
  noise.max_edits = 2;
  SynthCorpus corpus = synth_corpus(records_of(index), 500, noise, 31415, ph);
  GazetteerTagger tagger(corpus.surface_variants);

  std::vector<std::vector<Candidate>> retrieved;
  std::vector<std::string> gold;
  for (const auto& sample : corpus.samples) {
    auto spans = tagger.tag(sample.hypotheses[0]);
    if (spans.empty()) continue;
    IpaString query = ph.phonemize(spans.front().surface);
    if (query.empty()) continue;
    retrieved.push_back(index.retrieve_topk(query, 15));
    gold.push_back(sample.gold_entities->front());
  }
  REQUIRE(retrieved.size() > 450);

  auto measure = [&](auto&& filter) {
    std::vector<std::vector<Candidate>> surviving;
    for (const auto& cands : retrieved) surviving.push_back(filter(cands));
    return candidate_recall_precision(surviving, gold);
  };

  std::vector<RecallPrecision> by_k;
  for (int k : {1, 5, 10, 15})
    by_k.push_back(measure([&](const std::vector<Candidate>& c) { return filter_topk(c, k); }));
  std::vector<RecallPrecision> by_theta;
  for (double theta : {0.6, 0.7, 0.8, 0.9})
    by_theta.push_back(
        measure([&](const std::vector<Candidate>& c) { return filter_threshold(c, theta); }));

  for (size_t i = 1; i < by_k.size(); ++i) {
    bool nondecreasing = by_k[i].recall >= by_k[i - 1].recall;
    crit.expect(nondecreasing);
    CHECK(nondecreasing);
  }
  for (size_t i = 1; i < by_theta.size(); ++i) {
    bool nonincreasing = by_theta[i].recall <= by_theta[i - 1].recall;
    crit.expect(nonincreasing);
    CHECK(nonincreasing);
  }
  bool k_precision_opposite = by_k.front().precision >= by_k.back().precision;
  bool theta_precision_opposite = by_theta.back().precision >= by_theta.front().precision;
  crit.expect(k_precision_opposite);
  crit.expect(theta_precision_opposite);
  CHECK(k_precision_opposite);
  CHECK(theta_precision_opposite);

  std::printf("    topk recall: %.3f %.3f %.3f %.3f | precision: %.3f .. %.3f\n",
              by_k[0].recall, by_k[1].recall, by_k[2].recall, by_k[3].recall,
              by_k[0].precision, by_k[3].precision);
  std::printf("    theta recall: %.3f %.3f %.3f %.3f | precision: %.3f .. %.3f\n",
              by_theta[0].recall, by_theta[1].recall, by_theta[2].recall, by_theta[3].recall,
              by_theta[0].precision, by_theta[3].precision);
  CHECK(crit.finish(120.0));
}

TEST_CASE("criterion 4: wer correctness") {
  Criterion crit(4, "dp word distance equals the alignment oracle; identity corpus scores 0");
  SeededRng rng(8989);
  static const std::vector<std::string> vocab = {"go", "to", "play", "stop", "a", "b", "c", "now"};

  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> ref, hyp;
    size_t rn = rng.below(9), hn = rng.below(9);
    for (size_t i = 0; i < rn; ++i) ref.push_back(vocab[rng.below(vocab.size())]);
    for (size_t i = 0; i < hn; ++i) hyp.push_back(vocab[rng.below(vocab.size())]);
    std::string ref_text, hyp_text;
    for (size_t i = 0; i < ref.size(); ++i) ref_text += (i ? " " : "") + ref[i];
    for (size_t i = 0; i < hyp.size(); ++i) hyp_text += (i ? " " : "") + hyp[i];
    bool equal = wer(ref_text, hyp_text).distance == oracles::brute_force_word_distance(ref, hyp);
    crit.expect(equal);
    CHECK(equal);
  }

  CorpusWer identity;
  identity.add("play the song now", "play the song now");
  identity.add("go to paris", "go to paris");
  bool zero = identity.value() == 0.0;
  crit.expect(zero);
  CHECK(zero);
  CHECK(crit.finish(10.0));
}

TEST_CASE("criterion 5: oracle pipeline ceiling") {
  Criterion crit(5, "oracle selector + splice reaches hit ratio 1.0 and strictly beats asr wer");
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::build(synth_gazetteer(200, 7), ph);

  OfflineRun run = run_offline(index, 200, 2, 0.0, 555, BackendKind::oracle);
  GazetteerTagger tagger(run.corpus.surface_variants);

  // Premise check: gold must be retrievable in the top-10 for every sample.
  for (const auto& sample : run.corpus.samples) {
    auto spans = tagger.tag(sample.hypotheses[0]);
    REQUIRE(!spans.empty());
    auto top = index.retrieve_topk(ph.phonemize(spans.front().surface), 10);
    bool contained = false;
    for (const auto& c : top)
      if (lower(c.record.surface) == lower(sample.gold_entities->front())) contained = true;
    crit.expect(contained);
    CHECK(contained);
  }

  std::vector<std::string> refs, outs;
  for (size_t i = 0; i < run.corpus.samples.size(); ++i) {
    refs.push_back(run.corpus.samples[i].reference);
    outs.push_back(run.deragec[i].transcript);
  }
  double hit = ne_hit_ratio(refs, outs, tagger);
  bool perfect_hit = hit == 1.0;
  crit.expect(perfect_hit);
  CHECK(perfect_hit);

  bool any_misspelled = false;
  for (const auto& sample : run.corpus.samples)
    if (sample.hypotheses[0] != sample.reference) any_misspelled = true;
  REQUIRE(any_misspelled);
  bool strictly_better = run.wer_deragec < run.wer_asr;
  crit.expect(strictly_better);
  CHECK(strictly_better);
  std::printf("    wer asr=%.4f deragec(oracle)=%.4f hit=%.3f\n", run.wer_asr, run.wer_deragec,
              hit);
  CHECK(crit.finish(60.0));
}

TEST_CASE("criterion 6: heuristic end-to-end improvement") {
  Criterion crit(6, "offline heuristic deragec reduces wer by the pinned regression margin");
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::build(synth_gazetteer(2000, 13), ph);

  OfflineRun run = run_offline(index, 500, 2, 0.05, 20240601, BackendKind::heuristic);
  double margin_points = (run.wer_asr - run.wer_deragec) * 100.0;

  // Regression value measured on the first run of this configuration;
  // subsequent runs must match within +-0.1 absolute WER points.
  const double pinned_margin_points = 9.18;
  bool improves = margin_points > 0.0;
  bool matches_pin = std::abs(margin_points - pinned_margin_points) <= 0.1;
  crit.expect(improves);
  crit.expect(matches_pin);
  CHECK(improves);
  CHECK(matches_pin);
  std::printf("    wer asr=%.4f deragec(heuristic)=%.4f margin=%.2f points (pinned %.2f)\n",
              run.wer_asr, run.wer_deragec, margin_points, pinned_margin_points);
  CHECK(crit.finish(120.0));
}

TEST_CASE("criterion 7: determinism across jobs") {
  Criterion crit(7, "seeded offline runs with jobs=1 and jobs=4 write identical bytes");
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::build(synth_gazetteer(500, 23), ph);

  auto tmp1 = std::filesystem::temp_directory_path() / "necorr_accept_jobs1.jsonl";
  auto tmp4 = std::filesystem::temp_directory_path() / "necorr_accept_jobs4.jsonl";
  OfflineRun a = run_offline(index, 150, 2, 0.05, 777, BackendKind::heuristic, 1);
  write_run_outputs(tmp1.string(), a.deragec);
  OfflineRun b = run_offline(index, 150, 2, 0.05, 777, BackendKind::heuristic, 4);
  write_run_outputs(tmp4.string(), b.deragec);

  bool identical = read_file(tmp1.string()) == read_file(tmp4.string());
  crit.expect(identical);
  CHECK(identical);
  std::filesystem::remove(tmp1);
  std::filesystem::remove(tmp4);
  CHECK(crit.finish(120.0));
}

TEST_CASE("criterion 8: round trips") {
  Criterion crit(8, "index save/load, mcq build/parse per letter, canonical dataset writer");
  const Phonemizer& ph = Phonemizer::embedded();

  // Index save/load: 50 queries answered identically.
  PhoneticIndex index = PhoneticIndex::build(synth_gazetteer(600, 37), ph);
  auto tmp = std::filesystem::temp_directory_path() / "necorr_accept_index.bin";
  index.save(tmp.string());
  PhoneticIndex loaded = PhoneticIndex::load(tmp.string(), ph);
  SeededRng rng(505);
  for (int q = 0; q < 50; ++q) {
    IpaString query = random_query(rng, ph.table());
    bool equal = same_results(index.retrieve_topk(query, 10), loaded.retrieve_topk(query, 10));
    crit.expect(equal);
    CHECK(equal);
  }
  std::filesystem::remove(tmp);

  // MCQ round trip for every letter A..Z.
  std::vector<Candidate> cands;
  for (int i = 0; i < 26; ++i) {
    Candidate c;
    c.record.surface = "entity" + std::to_string(i);
    c.ps = 1.0 - i * 0.01;
    cands.push_back(std::move(c));
  }
  McqItem mcq = build_mcq("find [BLANK] now", cands);
  for (const auto& [letter, candidate] : mcq.options) {
    std::string reply = "<think>t</think><answer>" + std::string(1, letter) + ": " +
                        candidate.record.surface + "</answer>";
    RationaleAnswer answer = parse_rationale_answer(reply, mcq);
    bool match = answer.letter == letter && answer.entity == candidate.record.surface;
    crit.expect(match);
    CHECK(match);
  }

  // Canonical writer stability.
  NoiseConfig noise;
  noise.max_edits = 2;
  SynthCorpus corpus = synth_corpus(records_of(index), 40, noise, 9000, ph);
  auto ds1 = std::filesystem::temp_directory_path() / "necorr_accept_ds1.jsonl";
  auto ds2 = std::filesystem::temp_directory_path() / "necorr_accept_ds2.jsonl";
  write_dataset(ds1.string(), corpus.samples);
  write_dataset(ds2.string(), load_dataset(ds1.string()));
  bool stable = read_file(ds1.string()) == read_file(ds2.string());
  crit.expect(stable);
  CHECK(stable);
  std::filesystem::remove(ds1);
  std::filesystem::remove(ds2);
  CHECK(crit.finish(30.0));
}

TEST_CASE("criterion 9: prompt fidelity") {
  Criterion crit(9, "rendered prompts carry the literal instruction sentences");

  Candidate gold;
  gold.record.surface = "Adele";
  gold.record.definition = "English singer";
  gold.ps = 0.92;
  McqItem mcq = build_mcq("play songs by [BLANK]", {gold});

  std::string synthesis = render_synthesis_prompt(mcq, "A: Adele");
  std::string mcq_prompt = render_mcq_prompt(mcq, {});
  std::string plain(resources::prompt_module2_plain());
  std::string gec_prompt =
      build_gec_prompt({"h one", "h two", "h three", "h four", "h five"},
                       render_candidate(gold) + " rationale: phonetically closest", {});

  struct Probe {
    const std::string* text;
    const char* needle;
  };
  const Probe probes[] = {
      {&synthesis, "Answer should not be said at first."},
      {&synthesis, "identify the most appropriate Named-Entity for [BLANK]"},
      {&mcq_prompt, "identify the most appropriate Named-Entity for [BLANK]"},
      {&mcq_prompt, "<think> rationale here </think>"},
      {&plain, "identify the most appropriate Named-Entity for [BLANK]"},
      {&plain, "not return any explanation"},
      {&gec_prompt, "not return any explanation"},
      {&gec_prompt, "< Adele | phonetic-score: 0.92 | def: English singer >"},
  };
  for (const auto& probe : probes) {
    bool found = probe.text->find(probe.needle) != std::string::npos;
    crit.expect(found);
    CHECK_MESSAGE(found, probe.needle);
  }
  CHECK(crit.finish(5.0));
}
