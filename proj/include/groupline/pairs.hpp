#pragma once

#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/hlgd.hpp"
#include "groupline/levenshtein.hpp"
#include "groupline/partition.hpp"

namespace groupline {

struct PairBuildConfig {
  int window_days = 4;
  bool include_all_positives = true;
};

/// All same-group pairs (label 1) plus cross-group pairs within the day window (label 0).
/// Pairs follow timeline order; headline_a is the chronologically earlier one.
inline std::vector<LabeledPair> generate_labeled_pairs(const Timeline& timeline, const Partition& groups,
                                                       const PairBuildConfig& cfg = {}) {
  if (cfg.window_days < 0) throw ConfigError("window_days must be >= 0");
  const auto& hs = timeline.headlines;
  std::vector<long> label(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) label[i] = groups.group_of(hs[i].id);

  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const int same = label[i] == label[j] ? 1 : 0;
      const int dd = day_diff(hs[i].publish_date, hs[j].publish_date);
      const bool keep = (same && cfg.include_all_positives) || dd <= cfg.window_days;
      if (keep) out.push_back(LabeledPair{hs[i], hs[j], dd, same, timeline.split, timeline.timeline_id});
    }
  return out;
}

struct CorpusStats {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::map<int, std::pair<std::size_t, std::size_t>> time_diff_histogram;  // day diff -> (pos, neg)
  std::vector<double> levenshtein_ratios;                                 // one per positive pair
  double mean_positive_ratio = 0.0;

  /// Fraction of positive pairs with day_diff <= days.
  double positives_within(int days) const {
    if (positives == 0) return 0.0;
    std::size_t k = 0;
    for (const auto& [d, c] : time_diff_histogram)
      if (d <= days) k += c.first;
    return static_cast<double>(k) / static_cast<double>(positives);
  }
};

inline CorpusStats corpus_stats(const std::vector<LabeledPair>& pairs) {
  CorpusStats s;
  double sum = 0.0;
  for (const auto& p : pairs) {
    auto& bin = s.time_diff_histogram[p.day_diff];
    if (p.label == 1) {
      ++s.positives;
      ++bin.first;
      double r = levenshtein_ratio(p.headline_a.text, p.headline_b.text);
      s.levenshtein_ratios.push_back(r);
      sum += r;
    } else {
      ++s.negatives;
      ++bin.second;
    }
  }
  if (s.positives) s.mean_positive_ratio = sum / static_cast<double>(s.positives);
  return s;
}

inline nlohmann::ordered_json to_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["positives"] = s.positives;
  j["negatives"] = s.negatives;
  j["mean_positive_ratio"] = s.mean_positive_ratio;
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const auto& [d, c] : s.time_diff_histogram)
    hist.push_back({{"day_diff", d}, {"positives", c.first}, {"negatives", c.second}});
  j["time_diff_histogram"] = hist;
  j["levenshtein_ratios"] = s.levenshtein_ratios;
  return j;
}

}  // namespace groupline
