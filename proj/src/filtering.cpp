#include "necorr/filtering.hpp"

#include <algorithm>
#include <cmath>

#include "necorr/errors.hpp"

namespace necorr {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace

FilterSpec parse_filter_spec(const std::string& method, int k, double theta, double sigma) {
  FilterSpec spec;
  if (method == "topk") {
    if (k < 1) throw DataError("filter topk: k must be >= 1");
    spec.method = FilterMethod::topk;
    spec.k = k;
  } else if (method == "threshold") {
    if (theta < 0.0 || theta > 1.0) throw DataError("filter threshold: theta must be in [0, 1]");
    spec.method = FilterMethod::threshold;
    spec.theta = theta;
  } else if (method == "std") {
    if (sigma < 0.0) throw DataError("filter std: sigma must be >= 0");
    spec.method = FilterMethod::std_dev;
    spec.sigma = sigma;
  } else {
    throw DataError("unknown filter method '" + method + "' (expected topk|threshold|std)");
  }
  return spec;
}

std::vector<Candidate> filter_topk(const std::vector<Candidate>& cands, int k) {
  if (k < 1) throw DataError("filter topk: k must be >= 1");
  size_t keep = std::min<size_t>(static_cast<size_t>(k), cands.size());
  return {cands.begin(), cands.begin() + static_cast<ptrdiff_t>(keep)};
}

std::vector<Candidate> filter_threshold(const std::vector<Candidate>& cands, double theta) {
  std::vector<Candidate> out;
  for (const auto& c : cands)
    if (c.ps >= theta) out.push_back(c);
  return out;
}

std::vector<Candidate> filter_std(const std::vector<Candidate>& cands, double sigma) {
  if (cands.empty()) throw DataError("filter std: needs at least one candidate");
  double lo = cands.front().ps, hi = cands.front().ps;
  for (const auto& c : cands) {
    lo = std::min(lo, c.ps);
    hi = std::max(hi, c.ps);
  }
  if (lo == hi) return cands;  // zero spread: everything sits at the mean

  double mean = 0.0;
  for (const auto& c : cands) mean += c.ps;
  mean /= static_cast<double>(cands.size());
  double var = 0.0;
  for (const auto& c : cands) var += (c.ps - mean) * (c.ps - mean);
  var /= static_cast<double>(cands.size());
  const double cutoff = mean + sigma * std::sqrt(var);

  std::vector<Candidate> out;
  for (const auto& c : cands)
    if (c.ps >= cutoff) out.push_back(c);
  if (!out.empty()) return out;

  // Empty survivor set: keep the single best so the MCQ always has an option.
  const Candidate* best = &cands.front();
  for (const auto& c : cands) {
    if (c.ps > best->ps || (c.ps == best->ps && c.record.surface < best->record.surface))
      best = &c;
  }
  return {*best};
}

std::vector<Candidate> apply_filter(const std::vector<Candidate>& cands, const FilterSpec& spec) {
  switch (spec.method) {
    case FilterMethod::topk:
      return filter_topk(cands, spec.k);
    case FilterMethod::threshold:
      return filter_threshold(cands, spec.theta);
    case FilterMethod::std_dev:
      return filter_std(cands, spec.sigma);
  }
  throw DataError("unreachable filter method");
}

RecallPrecision candidate_recall_precision(const std::vector<std::vector<Candidate>>& surviving,
                                           const std::vector<std::string>& gold) {
  if (surviving.size() != gold.size())
    throw DataError("recall/precision: surviving sets and gold entities differ in length");
  RecallPrecision rp;
  rp.samples = surviving.size();
  size_t recall_hits = 0;
  size_t gold_survivors = 0;
  size_t total_survivors = 0;
  for (size_t i = 0; i < surviving.size(); ++i) {
    const std::string gold_key = lower_ascii(gold[i]);
    bool hit = false;
    for (const auto& c : surviving[i]) {
      ++total_survivors;
      if (lower_ascii(c.record.surface) == gold_key) {
        ++gold_survivors;
        hit = true;
      }
    }
    if (hit) ++recall_hits;
  }
  rp.survivors = total_survivors;
  rp.recall = rp.samples ? static_cast<double>(recall_hits) / static_cast<double>(rp.samples) : 0.0;
  rp.precision =
      total_survivors ? static_cast<double>(gold_survivors) / static_cast<double>(total_survivors)
                      : 0.0;
  return rp;
}

}  // namespace necorr
