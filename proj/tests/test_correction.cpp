#include "necorr/correction.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "necorr/errors.hpp"
#include "necorr/metrics.hpp"
#include "necorr/rng.hpp"

using namespace necorr;

namespace {

// Shared fixture: a small gazetteer, a noisy corpus over it, and the deps
// needed to run every mode offline.
struct PipelineFixture {
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index;
  SynthCorpus corpus;
  GazetteerTagger tagger;
  std::unique_ptr<LlmBackend> heuristic;
  std::unique_ptr<LlmBackend> oracle;

  explicit PipelineFixture(int gazetteer_size = 150, int samples = 40, int max_edits = 2,
                           uint64_t seed = 99)
      : index(PhoneticIndex::build(synth_gazetteer(gazetteer_size, 3), ph)),
        corpus(make_corpus(index, samples, max_edits, seed, ph)),
        tagger(corpus.surface_variants) {
    heuristic = make_backend(BackendSpec{});
    BackendSpec ospec;
    ospec.kind = BackendKind::oracle;
    oracle = make_backend(ospec);
  }

  static SynthCorpus make_corpus(const PhoneticIndex& index, int samples, int max_edits,
                                 uint64_t seed, const Phonemizer& ph) {
    std::vector<NamedEntityRecord> records;
    for (size_t i = 0; i < index.size(); ++i) records.push_back(index.record(i));
    NoiseConfig noise;
    noise.max_edits = max_edits;
    return synth_corpus(records, samples, noise, seed, ph);
  }

  PipelineDeps deps(const LlmBackend* backend, const LlmBackend* gec = nullptr) const {
    PipelineDeps d;
    d.phonemizer = &ph;
    d.index = &index;
    d.tagger = &tagger;
    d.backend = backend;
    d.gec_backend = gec;
    return d;
  }

  RunConfig config(PipelineMode mode) const {
    RunConfig c;
    c.mode = mode;
    return c;
  }

  double corpus_wer(const std::vector<RunOutput>& outputs) const {
    CorpusWer w;
    for (size_t i = 0; i < outputs.size(); ++i)
      w.add(corpus.samples[i].reference, outputs[i].transcript);
    return w.value();
  }

  double hit_ratio(const std::vector<RunOutput>& outputs) const {
    std::vector<std::string> refs, hyps;
    for (size_t i = 0; i < outputs.size(); ++i) {
      refs.push_back(corpus.samples[i].reference);
      hyps.push_back(outputs[i].transcript);
    }
    return ne_hit_ratio(refs, hyps, tagger);
  }
};

Sample simple_sample() {
  Sample s;
  s.id = "t1";
  s.hypotheses = {"play songs by adel", "play songs by adele", "play song by adel",
                  "play songs by adel", "play songs by adels"};
  s.reference = "play songs by adele";
  s.gold_entities = std::vector<std::string>{"adele"};
  return s;
}

}  // namespace

TEST_CASE("run_asr_baseline returns h1 verbatim") {
  Sample s = simple_sample();
  CHECK(run_asr_baseline(s) == "play songs by adel");
  s.hypotheses[0] = s.reference;
  CHECK(wer(s.reference, run_asr_baseline(s)).distance == 0);
}

TEST_CASE("sample_fewshots") {
  std::vector<AugmentedSample> pool(10);
  for (int i = 0; i < 10; ++i) pool[i].sample.id = "p" + std::to_string(i);

  SUBCASE("t = 0 is empty") { CHECK(sample_fewshots(pool, 0, 1).empty()); }

  SUBCASE("same seed gives the identical subset") {
    auto a = sample_fewshots(pool, 4, 42);
    auto b = sample_fewshots(pool, 4, 42);
    REQUIRE(a.size() == 4);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].sample.id == b[i].sample.id);
  }

  SUBCASE("selection is without replacement") {
    auto picks = sample_fewshots(pool, 6, 7);
    std::set<std::string> ids;
    for (const auto& p : picks) ids.insert(p.sample.id);
    CHECK(ids.size() == picks.size());
  }

  SUBCASE("t = pool size returns the whole pool as a set") {
    auto picks = sample_fewshots(pool, 10, 3);
    std::set<std::string> ids;
    for (const auto& p : picks) ids.insert(p.sample.id);
    CHECK(ids.size() == 10);
    auto more = sample_fewshots(pool, 15, 3);
    CHECK(more.size() == 10);
  }
}

TEST_CASE("build_gec_prompt") {
  Sample s = simple_sample();

  SUBCASE("without an entity block there is no Named-Entities line") {
    std::string prompt = build_gec_prompt(s.hypotheses, std::nullopt, {});
    CHECK(prompt.find("Named-Entities:") == std::string::npos);
    CHECK(prompt.find("not return any explanation") != std::string::npos);
  }

  SUBCASE("all five hypotheses appear in order") {
    std::string prompt = build_gec_prompt(s.hypotheses, std::nullopt, {});
    size_t pos = 0;
    for (const auto& hyp : s.hypotheses) {
      size_t at = prompt.find(hyp, pos);
      REQUIRE(at != std::string::npos);
      pos = at;
    }
  }

  SUBCASE("entity block lands on the Named-Entities line") {
    std::string prompt =
        build_gec_prompt(s.hypotheses, "< adele | phonetic-score: 0.91 | def: singer >", {});
    CHECK(prompt.find("Named-Entities: < adele | phonetic-score: 0.91 | def: singer >") !=
          std::string::npos);
  }

  SUBCASE("fewshot block renders input/output pairs") {
    GecFewshot fs;
    fs.hypotheses = s.hypotheses;
    fs.corrected = s.reference;
    std::string prompt = build_gec_prompt(s.hypotheses, std::nullopt, {fs});
    CHECK(prompt.find("Corrected: play songs by adele") != std::string::npos);
  }
}

TEST_CASE("run_gec") {
  Sample s = simple_sample();

  SUBCASE("heuristic backend returns h1") {
    auto backend = make_backend(BackendSpec{});
    CHECK(run_gec(*backend, s, {}, "t1:0:gec") == s.hypotheses[0]);
  }

  SUBCASE("oracle backend returns the reference") {
    BackendSpec spec;
    spec.kind = BackendKind::oracle;
    auto backend = make_backend(spec);
    CHECK(run_gec(*backend, s, {}, "t1:0:gec") == s.reference);
  }

  SUBCASE("empty replies fall back to h1") {
    struct EmptyBackend : LlmBackend {
      std::string complete(const ChatRequest&, const TaskContext&) const override {
        return "   \n ";
      }
    } backend;
    CHECK(run_gec(backend, s, {}, "t1:0:gec") == s.hypotheses[0]);
  }
}

TEST_CASE("run_ragec") {
  Sample s = simple_sample();

  SUBCASE("zero candidates behaves like run_gec") {
    auto backend = make_backend(BackendSpec{});
    CHECK(run_ragec(*backend, s, {}, {}, "t1:0:gec") == run_gec(*backend, s, {}, "t1:0:gec"));
  }

  SUBCASE("oracle backend with gold present returns the reference") {
    BackendSpec spec;
    spec.kind = BackendKind::oracle;
    auto backend = make_backend(spec);
    Candidate gold;
    gold.record.surface = "adele";
    gold.ps = 0.92;
    CHECK(run_ragec(*backend, s, {gold}, {}, "t1:0:gec") == s.reference);
  }
}

TEST_CASE("splice_correct") {
  SUBCASE("replaces the span words") {
    CHECK(splice_correct("play songs by adel", EntitySpan{3, 4, "adel"}, "Adele") ==
          "play songs by Adele");
  }

  SUBCASE("identity replacement reproduces h1") {
    std::string h1 = "play songs by adel";
    CHECK(splice_correct(h1, EntitySpan{3, 4, "adel"}, "adel") == h1);
  }

  SUBCASE("invalid span is rejected") {
    CHECK_THROWS_AS(splice_correct("a b", EntitySpan{1, 3, "b"}, "x"), DataError);
  }

  SUBCASE("words outside the span are untouched on random cases") {
    SeededRng rng(606);
    const std::vector<std::string> vocab = {"alpha", "beta",  "gamma", "delta",
                                            "omega", "sigma", "kappa"};
    for (int trial = 0; trial < 1000; ++trial) {
      size_t len = 2 + rng.below(8);
      std::vector<std::string> words;
      for (size_t i = 0; i < len; ++i) words.push_back(vocab[rng.below(vocab.size())]);
      int start = static_cast<int>(rng.below(len));
      int end = start + 1 + static_cast<int>(rng.below(len - start));
      std::string h1;
      for (size_t i = 0; i < words.size(); ++i) h1 += (i ? " " : "") + words[i];

      std::string out = splice_correct(h1, EntitySpan{start, end, ""}, "REPL");

      // Positional diff: words before start and after end must be identical.
      std::vector<std::string> out_words;
      std::istringstream in(out);
      std::string w;
      while (in >> w) out_words.push_back(w);
      REQUIRE(out_words.size() == words.size() - (end - start) + 1);
      for (int i = 0; i < start; ++i) CHECK(out_words[i] == words[i]);
      CHECK(out_words[start] == "REPL");
      for (size_t i = static_cast<size_t>(end); i < words.size(); ++i)
        CHECK(out_words[i - (end - start) + 1] == words[i]);
    }
  }
}

TEST_CASE("run_deragec") {
  PipelineFixture fx;

  SUBCASE("no tagged spans degrades to run_gec") {
    Sample s;
    s.id = "plain";
    s.hypotheses = {"no entities here", "no entities here", "no entities here",
                    "no entities here", "no entities here"};
    s.reference = "no entities here";
    RunConfig cfg = fx.config(PipelineMode::deragec);
    RunOutput out = run_deragec(s, cfg, fx.deps(fx.heuristic.get()), {}, {});
    CHECK(out.transcript == s.hypotheses[0]);
    REQUIRE(!out.fallbacks.empty());
    CHECK(out.fallbacks[0] == "no_spans:gec");
  }

  SUBCASE("oracle selector with splice reaches the reference when gold is retrievable") {
    RunConfig cfg = fx.config(PipelineMode::deragec);
    PipelineDeps deps = fx.deps(fx.oracle.get(), fx.heuristic.get());
    int checked = 0;
    for (const auto& s : fx.corpus.samples) {
      auto retrieved = fx.index.retrieve_topk(
          fx.ph.phonemize(fx.tagger.tag(s.hypotheses[0]).front().surface), cfg.k);
      bool gold_retrievable = false;
      for (const auto& c : retrieved)
        if (c.record.surface == s.gold_entities->front()) gold_retrievable = true;
      if (!gold_retrievable) continue;
      ++checked;
      RunOutput out = run_deragec(s, cfg, deps, {}, {});
      CHECK(out.transcript == s.reference);
      REQUIRE(!out.selections.empty());
      CHECK(out.selections[0].entity == s.gold_entities->front());
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("pipeline mode orderings") {
  PipelineFixture fx(120, 50, 2, 1234);

  auto run_mode = [&](PipelineMode mode, const LlmBackend* backend,
                      const LlmBackend* gec = nullptr) {
    RunConfig cfg = fx.config(mode);
    return run_pipeline(fx.corpus.samples, cfg, fx.deps(backend, gec));
  };

  auto asr = run_mode(PipelineMode::asr, fx.heuristic.get());
  auto der_oracle = run_mode(PipelineMode::deragec, fx.oracle.get(), fx.heuristic.get());
  auto der_heur = run_mode(PipelineMode::deragec, fx.heuristic.get());
  auto oracle_heur = run_mode(PipelineMode::oracle, fx.heuristic.get());
  auto oracle_oracle = run_mode(PipelineMode::oracle, fx.oracle.get());

  SUBCASE("oracle-selected deragec never scores below the asr baseline") {
    CHECK(fx.hit_ratio(der_oracle) >= fx.hit_ratio(asr));
  }

  SUBCASE("oracle mode never scores below deragec under the same backend") {
    CHECK(fx.hit_ratio(oracle_heur) >= fx.hit_ratio(der_heur));
    CHECK(fx.hit_ratio(oracle_oracle) >= fx.hit_ratio(der_oracle));
  }

  SUBCASE("heuristic deragec runs are bit-deterministic") {
    auto again = run_mode(PipelineMode::deragec, fx.heuristic.get());
    REQUIRE(again.size() == der_heur.size());
    for (size_t i = 0; i < again.size(); ++i)
      CHECK(run_output_to_json_line(again[i]) == run_output_to_json_line(der_heur[i]));
  }
}

TEST_CASE("oracle mode requires gold entities") {
  PipelineFixture fx(60, 5, 1, 5);
  auto samples = fx.corpus.samples;
  samples[0].gold_entities.reset();
  RunConfig cfg = fx.config(PipelineMode::oracle);
  CHECK_THROWS_AS(run_pipeline(samples, cfg, fx.deps(fx.heuristic.get())), DataError);
}

TEST_CASE("run output jsonl round trip") {
  PipelineFixture fx(60, 8, 2, 11);
  RunConfig cfg = fx.config(PipelineMode::deragec);
  auto outputs = run_pipeline(fx.corpus.samples, cfg, fx.deps(fx.heuristic.get()));

  auto tmp = std::filesystem::temp_directory_path() / "necorr_run_roundtrip.jsonl";
  write_run_outputs(tmp.string(), outputs);
  auto loaded = load_run_outputs(tmp.string());
  REQUIRE(loaded.size() == outputs.size());
  for (size_t i = 0; i < loaded.size(); ++i)
    CHECK(run_output_to_json_line(loaded[i]) == run_output_to_json_line(outputs[i]));
  std::filesystem::remove(tmp);
}

TEST_CASE("fewshot pool feeds the prompts") {
  PipelineFixture fx(80, 6, 2, 321);

  // Synthesize a rationale pool from the same corpus, then poison one entry.
  std::vector<std::pair<Sample, std::vector<Candidate>>> data;
  for (const auto& s : fx.corpus.samples) {
    auto spans = fx.tagger.tag(s.hypotheses[0]);
    REQUIRE(!spans.empty());
    auto retrieved = fx.index.retrieve_topk(fx.ph.phonemize(spans.front().surface), 10);
    data.emplace_back(s, retrieved);
  }
  auto pool = synthesize_rationales(*fx.oracle, data, fx.tagger, 26, 1);
  REQUIRE(pool.size() == 6);
  pool[0].rationale.reset();

  struct CaptureBackend : LlmBackend {
    const LlmBackend* inner;
    mutable std::vector<std::string> mcq_prompts;
    std::string complete(const ChatRequest& req, const TaskContext& ctx) const override {
      if (ctx.kind == TaskContext::Kind::mcq_select) mcq_prompts.push_back(req.messages[0].content);
      return inner->complete(req, ctx);
    }
  } capture;
  capture.inner = fx.oracle.get();

  RunConfig cfg = fx.config(PipelineMode::deragec);
  cfg.fewshot_count = 3;
  cfg.seed = 5;
  PipelineDeps deps = fx.deps(&capture, fx.heuristic.get());
  deps.fewshot_pool = pool;
  auto outputs = run_pipeline(fx.corpus.samples, cfg, deps);
  REQUIRE(!capture.mcq_prompts.empty());

  const std::string& prompt = capture.mcq_prompts.front();
  CHECK(prompt.find("I will give you few-shot examples.") != std::string::npos);
  // Rationale-less pool entries never render as examples.
  CHECK(prompt.find("<answer>") != std::string::npos);
  size_t example_count = 0;
  for (size_t pos = prompt.find("<output>\n<think>"); pos != std::string::npos;
       pos = prompt.find("<output>\n<think>", pos + 1))
    ++example_count;
  CHECK(example_count == 3);
  CHECK(outputs.size() == fx.corpus.samples.size());
}

TEST_CASE("jobs do not change results") {
  PipelineFixture fx(100, 30, 2, 2718);
  RunConfig cfg = fx.config(PipelineMode::deragec);
  cfg.jobs = 1;
  auto serial = run_pipeline(fx.corpus.samples, cfg, fx.deps(fx.heuristic.get()));
  cfg.jobs = 4;
  auto parallel = run_pipeline(fx.corpus.samples, cfg, fx.deps(fx.heuristic.get()));
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i)
    CHECK(run_output_to_json_line(serial[i]) == run_output_to_json_line(parallel[i]));
}
