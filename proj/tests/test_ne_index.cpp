#include "necorr/ne_index.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "necorr/corpus.hpp"
#include "necorr/errors.hpp"
#include "necorr/rng.hpp"
#include "oracles.hpp"

using namespace necorr;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
  }
  ~TempFile() { std::filesystem::remove(path); }
};

std::vector<GazetteerEntry> small_gazetteer() {
  return {
      {"Adele", "English singer", "test"},
      {"Odell", "surname", "test"},
      {"Aday", "", "test"},
      {"Paris", "capital of France", "test"},
      {"Pares", "", "test"},
      {"Starbucks", "coffee chain", "test"},
      {"Ruth Ellis", "historical figure", "test"},
  };
}

IpaString random_query(SeededRng& rng, const FeatureTable& table) {
  std::vector<SegmentId> ids;
  size_t len = 1 + rng.below(8);
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

std::vector<NamedEntityRecord> all_records(const PhoneticIndex& index) {
  std::vector<NamedEntityRecord> records;
  for (size_t i = 0; i < index.size(); ++i) records.push_back(index.record(i));
  return records;
}

}  // namespace

TEST_CASE("index build") {
  const Phonemizer& ph = Phonemizer::embedded();

  SUBCASE("empty gazetteer is rejected") {
    CHECK_THROWS_WITH_AS(PhoneticIndex::build({}, ph), doctest::Contains("empty gazetteer"),
                         DataError);
  }

  SUBCASE("case-insensitive duplicates merge keeping the first nonempty definition") {
    std::vector<GazetteerEntry> entries = {
        {"Adele", "", "a"}, {"adele", "English singer", "b"}, {"ADELE", "other", "c"}};
    PhoneticIndex index = PhoneticIndex::build(entries, ph);
    CHECK(index.size() == 1);
    CHECK(index.record(0).surface == "Adele");
    CHECK(index.record(0).definition == "English singer");
  }

  SUBCASE("n distinct records give an index of size n") {
    PhoneticIndex index = PhoneticIndex::build(small_gazetteer(), ph);
    CHECK(index.size() == small_gazetteer().size());
  }

  SUBCASE("records store the phonemization of their surface") {
    PhoneticIndex index = PhoneticIndex::build(small_gazetteer(), ph);
    for (size_t i = 0; i < index.size(); ++i)
      CHECK(index.record(i).ipa == ph.phonemize(index.record(i).surface));
  }

  SUBCASE("build order does not affect query results") {
    auto entries = synth_gazetteer(500, 99);
    auto shuffled = entries;
    SeededRng rng(5);
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    PhoneticIndex a = PhoneticIndex::build(entries, ph);
    PhoneticIndex b = PhoneticIndex::build(shuffled, ph);
    SeededRng qrng(17);
    for (int trial = 0; trial < 100; ++trial) {
      IpaString q = random_query(qrng, ph.table());
      CHECK(same_results(a.retrieve_topk(q, 10), b.retrieve_topk(q, 10)));
    }
  }
}

TEST_CASE("retrieval") {
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::build(small_gazetteer(), ph);

  SUBCASE("a stored surface's own pronunciation comes back first with ps 1") {
    auto results = index.retrieve_topk(ph.phonemize("adele"), 3);
    REQUIRE(!results.empty());
    CHECK(results[0].record.surface == "Adele");
    CHECK(results[0].ps == 1.0);
  }

  SUBCASE("k larger than the index returns everything") {
    auto results = index.retrieve_topk(ph.phonemize("adele"), 100);
    CHECK(results.size() == index.size());
  }

  SUBCASE("empty query and bad k are rejected") {
    CHECK_THROWS_AS(index.retrieve_topk(IpaString(), 5), DataError);
    CHECK_THROWS_AS(index.retrieve_topk(ph.phonemize("adele"), 0), DataError);
  }

  SUBCASE("ps values are nonincreasing") {
    auto results = index.retrieve_topk(ph.phonemize("pariz"), 7);
    for (size_t i = 1; i < results.size(); ++i) CHECK(results[i - 1].ps >= results[i].ps);
  }

  SUBCASE("case-insensitive surface lookup") {
    auto hit = index.find_surface("ruth ellis");
    REQUIRE(hit);
    CHECK(index.record(*hit).surface == "Ruth Ellis");
    CHECK(!index.find_surface("nobody"));
  }
}

TEST_CASE("two-stage retrieval equals the linear oracle") {
  const Phonemizer& ph = Phonemizer::embedded();
  auto entries = synth_gazetteer(1200, 4);
  PhoneticIndex index = PhoneticIndex::build(entries, ph);
  auto records = all_records(index);

  SeededRng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    IpaString q = random_query(rng, ph.table());
    int k = 1 + static_cast<int>(rng.below(15));
    auto staged = index.retrieve_topk(q, k);
    auto linear = index.retrieve_topk_linear(q, k);
    auto scan = oracles::scan_topk(records, q, static_cast<size_t>(k), ph.table());
    CHECK(same_results(staged, linear));
    CHECK(same_results(staged, scan));
  }
}

TEST_CASE("index persistence") {
  const Phonemizer& ph = Phonemizer::embedded();
  PhoneticIndex index = PhoneticIndex::build(synth_gazetteer(400, 12), ph);

  SUBCASE("save/load round trip answers queries identically") {
    TempFile file("necorr_index_roundtrip.bin");
    index.save(file.path);
    PhoneticIndex loaded = PhoneticIndex::load(file.path, ph);
    CHECK(loaded.size() == index.size());
    SeededRng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
      IpaString q = random_query(rng, ph.table());
      CHECK(same_results(index.retrieve_topk(q, 10), loaded.retrieve_topk(q, 10)));
    }
  }

  SUBCASE("corrupted magic is a descriptive error") {
    TempFile file("necorr_index_badmagic.bin");
    std::ofstream out(file.path, std::ios::binary);
    out << "NOPEjunkjunkjunk";
    out.close();
    CHECK_THROWS_WITH_AS(PhoneticIndex::load(file.path, ph), doctest::Contains("magic"),
                         DataError);
  }

  SUBCASE("unsupported version is rejected") {
    TempFile file("necorr_index_badversion.bin");
    std::ofstream out(file.path, std::ios::binary);
    out.write("DRGC", 4);
    unsigned char version[4] = {0xFF, 0, 0, 0};
    out.write(reinterpret_cast<char*>(version), 4);
    out.close();
    CHECK_THROWS_WITH_AS(PhoneticIndex::load(file.path, ph), doctest::Contains("version"),
                         DataError);
  }

  SUBCASE("empty file is rejected") {
    TempFile file("necorr_index_empty.bin");
    std::ofstream(file.path, std::ios::binary).close();
    CHECK_THROWS_AS(PhoneticIndex::load(file.path, ph), DataError);
  }

  SUBCASE("truncation is detected") {
    TempFile full("necorr_index_full.bin");
    index.save(full.path);
    std::ifstream in(full.path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    TempFile cut("necorr_index_cut.bin");
    std::ofstream out(cut.path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_WITH_AS(PhoneticIndex::load(cut.path, ph), doctest::Contains("truncated"),
                         DataError);
  }
}

TEST_CASE("gazetteer jsonl ingest") {
  TempFile file("necorr_gazetteer.jsonl");

  SUBCASE("round trip") {
    write_gazetteer(file.path, small_gazetteer());
    auto loaded = load_gazetteer(file.path);
    REQUIRE(loaded.size() == small_gazetteer().size());
    CHECK(loaded[0].surface == "Adele");
    CHECK(loaded[0].definition == "English singer");
  }

  SUBCASE("missing surface is an error with the line number") {
    std::ofstream out(file.path, std::ios::binary);
    out << R"({"surface":"ok"})" << "\n" << R"({"definition":"no surface"})" << "\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_gazetteer(file.path), doctest::Contains("line 2"), DataError);
  }

  SUBCASE("newline in definition is rejected") {
    std::ofstream out(file.path, std::ios::binary);
    out << R"({"surface":"x","definition":"line one\nline two"})" << "\n";
    out.close();
    CHECK_THROWS_AS(load_gazetteer(file.path), DataError);
  }
}
