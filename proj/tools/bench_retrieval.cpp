// Benchmark: serial linear-scan retrieval vs the banded two-stage kernel.
//
// Both paths return identical results (checked here on every query); the
// point of the comparison is throughput. The two-stage kernel additionally
// parallelizes its exact-distance stage with OpenMP when available.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "necorr/corpus.hpp"
#include "necorr/tagging.hpp"
#include "necorr/ne_index.hpp"
#include "necorr/phonetics.hpp"
#include "necorr/rng.hpp"

using namespace necorr;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval benchmark: linear scan vs two-stage index"};
  int gazetteer_size = 100000;
  int query_count = 50;
  int k = 10;
  uint64_t seed = 7;
  app.add_option("--size", gazetteer_size, "Gazetteer size")->capture_default_str();
  app.add_option("--queries", query_count, "Query count")->capture_default_str();
  app.add_option("--k", k, "Retrieval depth")->capture_default_str();
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  const Phonemizer& ph = Phonemizer::embedded();
  std::printf("building gazetteer (%d entries)...\n", gazetteer_size);
  auto entries = synth_gazetteer(gazetteer_size, seed);
  auto build_start = std::chrono::steady_clock::now();
  PhoneticIndex index = PhoneticIndex::build(entries, ph);
  std::printf("index build: %.2fs\n", seconds_since(build_start));

  // Queries are perturbed respellings of random gazetteer entities, the same
  // shape the correction pipeline produces.
  NoiseConfig noise;
  noise.max_edits = 2;
  std::vector<NamedEntityRecord> records;
  for (size_t i = 0; i < index.size(); ++i) records.push_back(index.record(i));
  SynthCorpus corpus = synth_corpus(records, query_count, noise, seed + 1, ph);
  GazetteerTagger tagger(corpus.surface_variants);
  std::vector<IpaString> queries;
  for (const auto& sample : corpus.samples) {
    auto spans = tagger.tag(sample.hypotheses[0]);
    IpaString q = spans.empty() ? ph.phonemize(sample.gold_entities->front())
                                : ph.phonemize(spans.front().surface);
    if (!q.empty()) queries.push_back(std::move(q));
  }

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not available (serial build)\n");
#endif

  auto linear_start = std::chrono::steady_clock::now();
  std::vector<std::vector<Candidate>> linear_results;
  for (const auto& q : queries) linear_results.push_back(index.retrieve_topk_linear(q, k));
  double linear_s = seconds_since(linear_start);

  auto staged_start = std::chrono::steady_clock::now();
  std::vector<std::vector<Candidate>> staged_results;
  for (const auto& q : queries) staged_results.push_back(index.retrieve_topk(q, k));
  double staged_s = seconds_since(staged_start);

  size_t mismatches = 0;
  for (size_t i = 0; i < queries.size(); ++i) {
    if (linear_results[i].size() != staged_results[i].size()) {
      ++mismatches;
      continue;
    }
    for (size_t j = 0; j < linear_results[i].size(); ++j) {
      if (linear_results[i][j].record.surface != staged_results[i][j].record.surface ||
          linear_results[i][j].ps != staged_results[i][j].ps) {
        ++mismatches;
        break;
      }
    }
  }

  std::printf("\n%-22s %10s %14s\n", "method", "total s", "queries/s");
  std::printf("%-22s %10.3f %14.1f\n", "linear scan (serial)", linear_s,
              queries.size() / linear_s);
  std::printf("%-22s %10.3f %14.1f\n", "two-stage (parallel)", staged_s,
              queries.size() / staged_s);
  std::printf("speedup: %.2fx, result mismatches: %zu\n", linear_s / staged_s, mismatches);
  return mismatches == 0 ? 0 : 1;
}
