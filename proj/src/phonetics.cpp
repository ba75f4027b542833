#include "necorr/phonetics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "necorr/errors.hpp"
#include "necorr/resources.hpp"

namespace necorr {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  for (auto line : split(s, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

int8_t parse_feature_value(std::string_view cell, std::string_view segment) {
  if (cell == "+") return 1;
  if (cell == "-") return -1;
  if (cell == "0") return 0;
  throw DataError("feature table: bad value '" + std::string(cell) + "' for segment '" +
                  std::string(segment) + "'");
}

}  // namespace

FeatureTable FeatureTable::from_tsv(std::string_view tsv) {
  FeatureTable table;
  auto lines = split_lines(tsv);
  if (lines.size() < 2) throw DataError("feature table: need a header and at least one segment");

  auto header = split(lines[0], '\t');
  if (header.size() < 2 || header[0] != "segment")
    throw DataError("feature table: header must start with 'segment'");
  for (size_t i = 1; i < header.size(); ++i) table.feature_names_.emplace_back(header[i]);
  table.feature_count_ = static_cast<int>(table.feature_names_.size());

  for (size_t li = 1; li < lines.size(); ++li) {
    auto cells = split(lines[li], '\t');
    if (cells.size() != header.size())
      throw DataError("feature table: row for '" + std::string(cells.empty() ? "?" : cells[0]) +
                      "' has " + std::to_string(cells.size() - 1) + " values, expected " +
                      std::to_string(table.feature_count_));
    std::string name(cells[0]);
    if (table.by_name_.count(name))
      throw DataError("feature table: duplicate segment '" + name + "'");
    FeatureVector fv;
    fv.values.reserve(table.feature_count_);
    for (size_t c = 1; c < cells.size(); ++c)
      fv.values.push_back(parse_feature_value(cells[c], name));
    table.by_name_.emplace(name, static_cast<SegmentId>(table.segments_.size()));
    table.segments_.push_back(std::move(name));
    table.vectors_.push_back(std::move(fv));
  }

  const size_t n = table.segments_.size();
  table.sub_costs_.assign(n * n, 0.0);
  table.min_sub_cost_ = 1.0;
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = a + 1; b < n; ++b) {
      int diff = 0;
      for (int f = 0; f < table.feature_count_; ++f)
        if (table.vectors_[a].values[f] != table.vectors_[b].values[f]) ++diff;
      if (diff == 0)
        throw DataError("feature table: segments '" + table.segments_[a] + "' and '" +
                        table.segments_[b] + "' share a feature vector");
      double cost = static_cast<double>(diff) / table.feature_count_;
      table.sub_costs_[a * n + b] = cost;
      table.sub_costs_[b * n + a] = cost;
      table.min_sub_cost_ = std::min(table.min_sub_cost_, cost);
    }
  }
  return table;
}

const FeatureTable& FeatureTable::embedded() {
  static const FeatureTable table = from_tsv(resources::ipa_features_tsv());
  return table;
}

std::optional<SegmentId> FeatureTable::find(std::string_view segment) const {
  auto it = by_name_.find(std::string(segment));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

IpaString IpaString::parse(std::string_view spaced, const FeatureTable& table) {
  std::vector<SegmentId> ids;
  for (auto tok : split(spaced, ' ')) {
    if (tok.empty()) continue;
    auto id = table.find(tok);
    if (!id) throw DataError("unknown IPA segment '" + std::string(tok) + "'");
    ids.push_back(*id);
  }
  return IpaString(std::move(ids));
}

std::string IpaString::to_string(const FeatureTable& table) const {
  std::string out;
  for (size_t i = 0; i < ids_.size(); ++i) {
    if (i) out += ' ';
    out += table.segment_name(ids_[i]);
  }
  return out;
}

Lexicon Lexicon::from_tsv(std::string_view tsv, const FeatureTable& table) {
  Lexicon lex;
  size_t line_no = 0;
  for (auto line : split_lines(tsv)) {
    ++line_no;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw DataError("lexicon: line " + std::to_string(line_no) + " has no tab separator");
    std::string word(line.substr(0, tab));
    if (word.empty())
      throw DataError("lexicon: line " + std::to_string(line_no) + " has an empty word");
    lex.entries_.insert_or_assign(std::move(word), IpaString::parse(line.substr(tab + 1), table));
  }
  return lex;
}

Lexicon Lexicon::from_file(const std::string& path, const FeatureTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("lexicon: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_tsv(buf.str(), table);
}

const Lexicon& Lexicon::embedded() {
  static const Lexicon lex = from_tsv(resources::lexicon_tsv(), FeatureTable::embedded());
  return lex;
}

const IpaString* Lexicon::lookup(std::string_view lowercased_word) const {
  auto it = entries_.find(std::string(lowercased_word));
  if (it == entries_.end()) return nullptr;
  return &it->second;
}

LetterRules LetterRules::from_tsv(std::string_view tsv, const FeatureTable& table) {
  LetterRules rules;
  size_t line_no = 0;
  for (auto line : split_lines(tsv)) {
    ++line_no;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw DataError("letter rules: line " + std::to_string(line_no) + " has no tab separator");
    std::string pattern(line.substr(0, tab));
    if (pattern.empty())
      throw DataError("letter rules: line " + std::to_string(line_no) + " has an empty pattern");
    IpaString ipa = IpaString::parse(line.substr(tab + 1), table);
    rules.max_rule_len_ = std::max(rules.max_rule_len_, pattern.size());
    rules.rules_.insert_or_assign(std::move(pattern), ipa.ids());
  }
  return rules;
}

const LetterRules& LetterRules::embedded() {
  static const LetterRules rules = from_tsv(resources::letter_rules_tsv(), FeatureTable::embedded());
  return rules;
}

IpaString LetterRules::apply(std::string_view lowercased_word) const {
  std::vector<SegmentId> ids;
  size_t pos = 0;
  while (pos < lowercased_word.size()) {
    size_t matched = 0;
    size_t longest = std::min(max_rule_len_, lowercased_word.size() - pos);
    for (size_t len = longest; len >= 1; --len) {
      auto it = rules_.find(std::string(lowercased_word.substr(pos, len)));
      if (it != rules_.end()) {
        ids.insert(ids.end(), it->second.begin(), it->second.end());
        matched = len;
        break;
      }
    }
    pos += matched ? matched : 1;  // characters without a rule are skipped
  }
  return IpaString(std::move(ids));
}

const Phonemizer& Phonemizer::embedded() {
  static const Phonemizer ph(FeatureTable::embedded(), Lexicon::embedded(),
                             LetterRules::embedded());
  return ph;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (c < 128 && std::ispunct(c)) continue;
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(c < 128 ? std::tolower(c) : c);
  }
  return out;
}

std::vector<std::string> normalize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string norm = normalize_text(text);
  size_t pos = 0;
  while (pos < norm.size()) {
    size_t next = norm.find(' ', pos);
    if (next == std::string::npos) next = norm.size();
    if (next > pos) words.emplace_back(norm.substr(pos, next - pos));
    pos = next + 1;
  }
  return words;
}

IpaString Phonemizer::phonemize(std::string_view text) const {
  std::vector<SegmentId> ids;
  for (const auto& word : normalize_words(text)) {
    const IpaString* entry = lexicon_->lookup(word);
    if (entry) {
      ids.insert(ids.end(), entry->ids().begin(), entry->ids().end());
    } else {
      IpaString fallback = rules_->apply(word);
      ids.insert(ids.end(), fallback.ids().begin(), fallback.ids().end());
    }
  }
  return IpaString(std::move(ids));
}

double feature_edit_distance(const IpaString& a, const IpaString& b, const FeatureTable& table,
                             const EditCosts& costs) {
  if (costs.insert_cost != costs.delete_cost)
    throw DataError("edit costs: insert_cost must equal delete_cost");
  if (costs.insert_cost < 0) throw DataError("edit costs: costs must be nonnegative");

  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<double> prev(m + 1), curr(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j * costs.insert_cost;
  for (size_t i = 1; i <= n; ++i) {
    curr[0] = i * costs.delete_cost;
    for (size_t j = 1; j <= m; ++j) {
      double sub = prev[j - 1] + table.substitution_cost(a[i - 1], b[j - 1]);
      double del = prev[j] + costs.delete_cost;
      double ins = curr[j - 1] + costs.insert_cost;
      curr[j] = std::min({sub, del, ins});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

double phonetic_similarity(const IpaString& a, const IpaString& b, const FeatureTable& table,
                           const EditCosts& costs) {
  if (a.empty() && b.empty())
    throw DataError("phonetic similarity undefined for two empty strings");
  double d = feature_edit_distance(a, b, table, costs);
  double denom = static_cast<double>(std::max(a.size(), b.size())) * std::max(costs.insert_cost, 1.0);
  double ps = 1.0 - d / denom;
  return std::clamp(ps, 0.0, 1.0);
}

}  // namespace necorr
