#pragma once

#include <string>
#include <vector>

#include "necorr/ne_index.hpp"

namespace necorr {

enum class FilterMethod { topk, threshold, std_dev };

/// Static candidate-set reduction parameters. Exactly the parameter matching
/// the method is consulted: k for topk, theta for threshold, sigma for std.
struct FilterSpec {
  FilterMethod method = FilterMethod::topk;
  int k = 10;
  double theta = 0.7;
  double sigma = 1.0;
};

FilterSpec parse_filter_spec(const std::string& method, int k, double theta, double sigma);

/// First min(k, |cands|) elements. Input must be sorted by ps descending.
std::vector<Candidate> filter_topk(const std::vector<Candidate>& cands, int k);

/// Keeps candidates with ps >= theta.
std::vector<Candidate> filter_threshold(const std::vector<Candidate>& cands, double theta);

/// Keeps candidates with ps >= mean + sigma * population-std of ps. When that
/// set is empty, keeps the single best candidate (ps descending, surface
/// ascending tie rule) so downstream MCQ construction always has an option.
std::vector<Candidate> filter_std(const std::vector<Candidate>& cands, double sigma);

std::vector<Candidate> apply_filter(const std::vector<Candidate>& cands, const FilterSpec& spec);

/// Micro-averaged survivor-set quality against per-sample gold entities:
/// recall is the fraction of samples whose surviving set contains the gold
/// surface (case-insensitive); precision is gold-equal survivors over all
/// survivors, counted per occurrence.
struct RecallPrecision {
  double recall = 0.0;
  double precision = 0.0;
  size_t samples = 0;
  size_t survivors = 0;
};

RecallPrecision candidate_recall_precision(const std::vector<std::vector<Candidate>>& surviving,
                                           const std::vector<std::string>& gold);

}  // namespace necorr
