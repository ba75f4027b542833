#include "necorr/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "necorr/errors.hpp"
#include "necorr/rng.hpp"

namespace necorr {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void line_error(const std::string& path, size_t line_no, const std::string& what) {
  throw DataError(path + ": line " + std::to_string(line_no) + ": " + what);
}

Sample parse_sample(const json& j, const std::string& path, size_t line_no, bool pad) {
  if (!j.is_object()) line_error(path, line_no, "expected a JSON object");
  Sample s;
  if (!j.contains("id") || !j["id"].is_string()) line_error(path, line_no, "missing string \"id\"");
  s.id = j["id"].get<std::string>();
  if (!j.contains("reference") || !j["reference"].is_string())
    line_error(path, line_no, "missing string \"reference\"");
  s.reference = j["reference"].get<std::string>();
  if (s.reference.empty()) line_error(path, line_no, "\"reference\" must be nonempty");
  if (!j.contains("hypotheses") || !j["hypotheses"].is_array())
    line_error(path, line_no, "missing array \"hypotheses\"");
  const auto& hyps = j["hypotheses"];
  for (const auto& h : hyps)
    if (!h.is_string()) line_error(path, line_no, "\"hypotheses\" entries must be strings");
  if (hyps.size() > 5) line_error(path, line_no, "more than 5 hypotheses");
  if (hyps.empty()) line_error(path, line_no, "\"hypotheses\" is empty");
  if (hyps.size() < 5 && !pad)
    line_error(path, line_no,
               "expected 5 hypotheses, got " + std::to_string(hyps.size()) +
                   " (use hypothesis padding to repeat the last one)");
  for (size_t i = 0; i < 5; ++i)
    s.hypotheses[i] = hyps[std::min(i, hyps.size() - 1)].get<std::string>();
  s.padded = hyps.size() < 5;
  if (j.contains("gold_entities") && !j["gold_entities"].is_null()) {
    if (!j["gold_entities"].is_array())
      line_error(path, line_no, "\"gold_entities\" must be an array of strings");
    std::vector<std::string> gold;
    for (const auto& g : j["gold_entities"]) {
      if (!g.is_string()) line_error(path, line_no, "\"gold_entities\" entries must be strings");
      gold.push_back(g.get<std::string>());
    }
    s.gold_entities = std::move(gold);
  }
  return s;
}

ordered_json sample_json(const Sample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["hypotheses"] = s.hypotheses;
  j["reference"] = s.reference;
  if (s.gold_entities) j["gold_entities"] = *s.gold_entities;
  return j;
}

// Template sentences for the synthetic corpus; "{}" marks the entity slot.
const std::vector<std::string>& corpus_templates() {
  static const std::vector<std::string> templates = {
      "please play {} for me",
      "call {} right now",
      "directions to {} please",
      "send a message to {}",
      "show me news about {}",
      "play the latest album by {}",
      "find a table at {} tonight",
      "what is the weather in {}",
      "book tickets for {} on saturday",
      "navigate to {} from work",
      "add {} to my playlist",
      "set a reminder to meet {} tomorrow",
  };
  return templates;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> fillers = {"now",   "today", "soon",  "here",
                                                   "there", "again", "later", "always"};
  return fillers;
}

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> reserved = [] {
    std::set<std::string> words(filler_words().begin(), filler_words().end());
    for (const auto& t : corpus_templates()) {
      std::istringstream in(t);
      std::string w;
      while (in >> w)
        if (w != "{}") words.insert(w);
    }
    return words;
  }();
  return reserved;
}

// Fixed inverse-spelling table: IPA segment -> letters.
const std::unordered_map<std::string, std::string>& respell_table() {
  static const std::unordered_map<std::string, std::string> table = {
      {"p", "p"},   {"b", "b"},  {"t", "t"},  {"d", "d"},  {"k", "k"},  {"ɡ", "g"},
      {"m", "m"},   {"n", "n"},  {"ŋ", "ng"}, {"f", "f"},  {"v", "v"},  {"θ", "th"},
      {"ð", "dh"},  {"s", "s"},  {"z", "z"},  {"ʃ", "sh"}, {"ʒ", "zh"}, {"h", "h"},
      {"tʃ", "ch"}, {"dʒ", "j"}, {"l", "l"},  {"ɹ", "r"},  {"j", "y"},  {"w", "w"},
      {"i", "ee"},  {"ɪ", "i"},  {"e", "e"},  {"ɛ", "e"},  {"æ", "a"},  {"a", "a"},
      {"ɑ", "o"},   {"ʌ", "u"},  {"ə", "a"},  {"ɔ", "aw"}, {"o", "oh"}, {"ʊ", "oo"},
      {"u", "oo"},
  };
  return table;
}

std::string respell(const IpaString& ipa, const FeatureTable& table) {
  std::string out;
  for (SegmentId id : ipa.ids()) {
    auto it = respell_table().find(table.segment_name(id));
    if (it != respell_table().end()) out += it->second;
  }
  return out;
}

// Nearest segments by substitution cost, used for feature-near substitutions.
std::vector<std::vector<SegmentId>> build_neighbor_lists(const FeatureTable& table, size_t count) {
  const size_t n = table.segment_count();
  std::vector<std::vector<SegmentId>> neighbors(n);
  for (size_t a = 0; a < n; ++a) {
    std::vector<SegmentId> order;
    for (size_t b = 0; b < n; ++b)
      if (b != a) order.push_back(static_cast<SegmentId>(b));
    std::stable_sort(order.begin(), order.end(), [&](SegmentId x, SegmentId y) {
      return table.substitution_cost(static_cast<SegmentId>(a), x) <
             table.substitution_cost(static_cast<SegmentId>(a), y);
    });
    order.resize(std::min(count, order.size()));
    neighbors[a] = std::move(order);
  }
  return neighbors;
}

IpaString perturb(const IpaString& ipa, int edits, SeededRng& rng, const FeatureTable& table,
                  const std::vector<std::vector<SegmentId>>& neighbors) {
  std::vector<SegmentId> ids = ipa.ids();
  for (int e = 0; e < edits; ++e) {
    // Substitution-dominant mix (80/10/10): ASR confusions mostly swap a
    // segment for a feature-near one rather than dropping or adding phones.
    uint64_t draw = rng.below(100);
    uint64_t op = draw < 80 ? 0 : draw < 90 ? 1 : 2;
    if (op == 2 && ids.size() <= 1) op = 1;  // never delete the last segment
    if (op == 0 && ids.empty()) op = 1;
    if (op == 0) {
      size_t pos = rng.below(ids.size());
      const auto& near = neighbors[ids[pos]];
      ids[pos] = near[rng.below(near.size())];
    } else if (op == 1) {
      size_t pos = rng.below(ids.size() + 1);
      SegmentId seg = static_cast<SegmentId>(rng.below(table.segment_count()));
      ids.insert(ids.begin() + static_cast<ptrdiff_t>(pos), seg);
    } else {
      size_t pos = rng.below(ids.size());
      ids.erase(ids.begin() + static_cast<ptrdiff_t>(pos));
    }
  }
  return IpaString(std::move(ids));
}

std::string instantiate(const std::string& tmpl, const std::string& entity) {
  std::string out = tmpl;
  auto slot = out.find("{}");
  out.replace(slot, 2, entity);
  return out;
}

std::string apply_word_noise(const std::string& sentence, const std::string& entity_surface,
                             double prob, SeededRng& rng) {
  if (prob <= 0) return sentence;
  std::istringstream in(sentence);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    std::string word = words[i];
    if (word != entity_surface && rng.chance(prob)) {
      const auto& fillers = filler_words();
      std::string pick = fillers[rng.below(fillers.size())];
      if (pick == word) pick = fillers[(rng.below(fillers.size() - 1) + 1) % fillers.size()];
      word = pick;
    }
    if (i) out += ' ';
    out += word;
  }
  return out;
}

}  // namespace

std::vector<Sample> load_dataset(const std::string& path, bool pad_hypotheses) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset: cannot open " + path);
  std::vector<Sample> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    samples.push_back(parse_sample(j, path, line_no, pad_hypotheses));
  }
  return samples;
}

std::string sample_to_json_line(const Sample& sample) { return sample_json(sample).dump(); }

void write_dataset(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("dataset: cannot write " + path);
  for (const auto& s : samples) out << sample_to_json_line(s) << '\n';
}

std::string augmented_to_json_line(const AugmentedSample& sample) {
  ordered_json j = sample_json(sample.sample);
  ordered_json cands = ordered_json::array();
  for (const auto& c : sample.candidates) {
    ordered_json cj;
    cj["surface"] = c.record.surface;
    cj["ps"] = c.ps;
    cj["definition"] = c.record.definition;
    cands.push_back(std::move(cj));
  }
  j["candidates"] = std::move(cands);
  if (sample.rationale) j["rationale"] = *sample.rationale;
  return j.dump();
}

void write_augmented(const std::string& path, const std::vector<AugmentedSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("augmented dataset: cannot write " + path);
  for (const auto& s : samples) out << augmented_to_json_line(s) << '\n';
}

std::vector<AugmentedSample> load_augmented(const std::string& path, const Phonemizer& ph) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("augmented dataset: cannot open " + path);
  std::vector<AugmentedSample> samples;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      line_error(path, line_no, std::string("malformed JSON: ") + e.what());
    }
    AugmentedSample a;
    a.sample = parse_sample(j, path, line_no, false);
    if (j.contains("candidates")) {
      if (!j["candidates"].is_array())
        line_error(path, line_no, "\"candidates\" must be an array");
      for (const auto& cj : j["candidates"]) {
        if (!cj.is_object() || !cj.contains("surface") || !cj.contains("ps"))
          line_error(path, line_no, "candidate needs \"surface\" and \"ps\"");
        Candidate c;
        c.record.surface = cj["surface"].get<std::string>();
        c.record.definition = cj.value("definition", std::string());
        c.record.ipa = ph.phonemize(c.record.surface);
        c.ps = cj["ps"].get<double>();
        a.candidates.push_back(std::move(c));
      }
    }
    if (j.contains("rationale") && !j["rationale"].is_null())
      a.rationale = j["rationale"].get<std::string>();
    // Normalize to the type's invariant: candidates ordered by ps descending.
    std::stable_sort(a.candidates.begin(), a.candidates.end(),
                     [](const Candidate& x, const Candidate& y) { return x.ps > y.ps; });
    samples.push_back(std::move(a));
  }
  return samples;
}

SynthCorpus synth_corpus(const std::vector<NamedEntityRecord>& gazetteer, int n,
                         const NoiseConfig& noise, uint64_t seed, const Phonemizer& ph) {
  if (gazetteer.empty()) throw DataError("synth corpus: gazetteer must be nonempty");
  if (n < 1) throw DataError("synth corpus: n must be >= 1");
  if (noise.max_edits < 0) throw DataError("synth corpus: max_edits must be >= 0");

  const FeatureTable& table = ph.table();
  const auto neighbors = build_neighbor_lists(table, 4);
  SeededRng rng(seed);
  SynthCorpus out;
  std::set<std::string> variants;

  for (int i = 0; i < n; ++i) {
    const NamedEntityRecord& entity = gazetteer[rng.below(gazetteer.size())];
    const std::string& tmpl = corpus_templates()[rng.below(corpus_templates().size())];

    Sample s;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "synth-%06d", i);
    s.id = idbuf;
    s.reference = instantiate(tmpl, entity.surface);
    s.gold_entities = std::vector<std::string>{entity.surface};
    variants.insert(entity.surface);

    for (auto& hyp : s.hypotheses) {
      int edits = noise.max_edits > 0 ? static_cast<int>(rng.below(noise.max_edits + 1)) : 0;
      std::string surface = entity.surface;
      if (edits > 0 && !entity.ipa.empty()) {
        // A respelling whose reading differs from the perturbed phonemes
        // would smuggle in extra edits (letter pairs like s+h collapse into
        // one segment on re-reading), so draw until the round trip is clean.
        for (int attempt = 0; attempt < 8; ++attempt) {
          IpaString perturbed = perturb(entity.ipa, edits, rng, table, neighbors);
          std::string respelled = respell(perturbed, table);
          if (respelled.empty()) continue;
          surface = respelled;
          if (ph.phonemize(respelled) == perturbed) break;
        }
      }
      variants.insert(surface);
      hyp = apply_word_noise(instantiate(tmpl, surface), surface, noise.word_sub_prob, rng);
    }
    out.samples.push_back(std::move(s));
  }

  out.surface_variants.assign(variants.begin(), variants.end());
  return out;
}

std::vector<GazetteerEntry> synth_gazetteer(int n, uint64_t seed) {
  if (n < 1) throw DataError("synth gazetteer: n must be >= 1");
  static const std::vector<std::string> onsets = {"p", "b", "t",  "d",  "k", "ɡ", "m", "n",
                                                  "f", "v", "s",  "z",  "ʃ", "l", "ɹ", "w",
                                                  "j", "h", "tʃ", "dʒ"};
  static const std::vector<std::string> vowels = {"i", "ɪ", "e", "ɛ", "æ", "a", "ɑ",
                                                  "ʌ", "ə", "ɔ", "o", "ʊ", "u"};
  static const std::vector<std::string> codas = {"p", "t", "d", "k", "m", "n",
                                                 "ŋ", "s", "z", "l", "ɹ"};
  static const std::vector<std::string> categories = {"person",  "place", "organization",
                                                      "artist",  "venue", "product",
                                                      "band",    "film"};
  SeededRng rng(seed);
  std::vector<GazetteerEntry> entries;
  std::set<std::string> seen;

  while (static_cast<int>(entries.size()) < n) {
    int syllables = 3 + static_cast<int>(rng.below(3));
    std::string spelled;
    for (int s = 0; s < syllables; ++s) {
      if (s > 0 || rng.below(10) < 9) spelled += respell_table().at(onsets[rng.below(onsets.size())]);
      spelled += respell_table().at(vowels[rng.below(vowels.size())]);
      if (rng.below(10) < 3) spelled += respell_table().at(codas[rng.below(codas.size())]);
    }
    if (spelled.size() < 4) continue;
    if (reserved_words().count(spelled)) continue;
    if (!seen.insert(spelled).second) continue;

    GazetteerEntry e;
    e.surface = spelled;
    const std::string& cat = categories[rng.below(categories.size())];
    e.definition = "a synthetic " + cat + " used for offline evaluation";
    e.source = "synth";
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_surfaces(const std::string& path, const std::vector<std::string>& surfaces) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("surfaces: cannot write " + path);
  for (const auto& s : surfaces) out << s << '\n';
}

}  // namespace necorr
