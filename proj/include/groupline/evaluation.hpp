#pragma once

#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/metrics.hpp"
#include "groupline/pairs.hpp"
#include "groupline/scorer.hpp"
#include "groupline/time_logistic.hpp"

namespace groupline {

struct SplitMetrics {
  ConfusionCounts counts;
  F1Result f1;
};

struct EvalReport {
  std::string scorer;
  Tier tier = Tier::headline;
  double threshold = 0.5;
  SplitMetrics overall;
  std::map<std::string, SplitMetrics> by_cut;
  std::map<std::string, SplitMetrics> by_timeline;
};

/// Scores each pair in a-then-b order through a view capped at the scorer's tier.
/// `max_tier` rejects scorers that need more than the challenge permits.
inline EvalReport evaluate_scorer(const PairScorer& scorer, const std::vector<LabeledPair>& pairs, double threshold,
                                  Tier max_tier = Tier::full) {
  if (scorer.tier() > max_tier)
    throw TierError("scorer '" + scorer.name() + "' needs tier " + std::to_string(tier_number(scorer.tier())) +
                    " but the challenge allows tier " + std::to_string(tier_number(max_tier)));
  EvalReport r;
  r.scorer = scorer.name();
  r.tier = scorer.tier();
  r.threshold = threshold;
  std::map<std::string, ConfusionCounts> cut, tl;
  for (const auto& p : pairs) {
    int pred = predict(scorer.score_pair(p), threshold);
    r.overall.counts.add(pred, p.label);
    cut[std::string(to_string(p.cut))].add(pred, p.label);
    tl[p.timeline_id].add(pred, p.label);
  }
  r.overall.f1 = f1_from_counts(r.overall.counts);
  for (auto& [k, c] : cut) r.by_cut[k] = SplitMetrics{c, f1_from_counts(c)};
  for (auto& [k, c] : tl) r.by_timeline[k] = SplitMetrics{c, f1_from_counts(c)};
  return r;
}

/// Raw scores in a-then-b order.
inline std::vector<double> score_all(const PairScorer& scorer, const std::vector<LabeledPair>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(scorer.score_pair(p));
  return out;
}

/// Threshold maximizing F-1 of `scorer` on `pairs` (normally the train cut).
inline double tune_scorer_threshold(const PairScorer& scorer, const std::vector<LabeledPair>& pairs) {
  std::vector<int> labels;
  labels.reserve(pairs.size());
  for (const auto& p : pairs) labels.push_back(p.label);
  return tune_threshold(score_all(scorer, pairs), labels);
}

/// Sixth-annotator check: pairs come from the global groups, predictions from `extra`.
inline EvalReport human_performance(const AnnotationSet& extra, const Partition& groups, const Timeline& timeline,
                                    const PairBuildConfig& cfg = {}) {
  for (const auto& h : timeline.headlines)
    if (!extra.assignment.count(h.id))
      throw ConfigError("extra annotation does not cover headline '" + h.id + "'");
  auto pairs = generate_labeled_pairs(timeline, groups, cfg);
  PartitionScorer human("human:" + (extra.annotator_id.empty() ? std::string("extra") : extra.annotator_id),
                        to_partition(extra));
  return evaluate_scorer(human, pairs, 0.5);
}

/// Merges per-timeline human reports into one (sums counts).
inline EvalReport combine_reports(const std::vector<EvalReport>& reports) {
  EvalReport out;
  if (reports.empty()) return out;
  out.scorer = reports.front().scorer;
  out.tier = reports.front().tier;
  out.threshold = reports.front().threshold;
  std::map<std::string, ConfusionCounts> cut, tl;
  for (const auto& r : reports) {
    out.overall.counts += r.overall.counts;
    for (const auto& [k, m] : r.by_cut) cut[k] += m.counts;
    for (const auto& [k, m] : r.by_timeline) tl[k] += m.counts;
  }
  out.overall.f1 = f1_from_counts(out.overall.counts);
  for (auto& [k, c] : cut) out.by_cut[k] = SplitMetrics{c, f1_from_counts(c)};
  for (auto& [k, c] : tl) out.by_timeline[k] = SplitMetrics{c, f1_from_counts(c)};
  return out;
}

inline nlohmann::ordered_json to_json(const SplitMetrics& m) {
  nlohmann::ordered_json j;
  j["precision"] = m.f1.precision;
  j["recall"] = m.f1.recall;
  j["f1"] = m.f1.f1;
  j["tp"] = m.counts.tp;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  j["tn"] = m.counts.tn;
  return j;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["scorer"] = r.scorer;
  j["tier"] = tier_number(r.tier);
  j["threshold"] = threshold_to_json(r.threshold);
  j["overall"] = to_json(r.overall);
  j["by_cut"] = nlohmann::ordered_json::object();
  for (const auto& [k, m] : r.by_cut) j["by_cut"][k] = to_json(m);
  j["by_timeline"] = nlohmann::ordered_json::object();
  for (const auto& [k, m] : r.by_timeline) j["by_timeline"][k] = to_json(m);
  return j;
}

/// Aligned table: method, challenge tier, F-1 per cut.
inline std::string to_table(const std::vector<EvalReport>& reports) {
  std::size_t w = 6;
  for (const auto& r : reports) w = std::max(w, r.scorer.size());
  auto cell = [](const EvalReport& r, const char* cut) {
    auto it = r.by_cut.find(cut);
    if (it == r.by_cut.end()) return std::string("-");
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.3f", it->second.f1.f1);
    return std::string(buf);
  };
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %9s  %9s  %8s  %8s\n", int(w), "Method", "Challenge", "Train F-1",
                "Dev F-1", "Test F-1");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-*s  %9d  %9s  %8s  %8s\n", int(w), r.scorer.c_str(), tier_number(r.tier),
                  cell(r, "train").c_str(), cell(r, "dev").c_str(), cell(r, "test").c_str());
    out << line;
  }
  return out.str();
}

}  // namespace groupline
