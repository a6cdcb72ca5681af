#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/hlgd.hpp"
#include "groupline/metrics.hpp"
#include "groupline/scorer.hpp"

namespace groupline {

struct CommutativeReport {
  std::size_t pairs_tested = 0;
  std::size_t flips = 0;
  double flip_rate = 0.0;
  /// Mean |p(a,b) - p(b,a)| of the predicted-class probability over non-flipping pairs.
  double mean_fluctuation = 0.0;
};

/// Runs every pair in both orders. Uncalibrated scores are min-max normalized over
/// all evaluated scores before fluctuation is measured; predictions use raw scores.
inline CommutativeReport commutative_audit(const PairScorer& scorer, const std::vector<LabeledPair>& pairs,
                                           double threshold) {
  CommutativeReport r;
  r.pairs_tested = pairs.size();
  if (pairs.empty()) return r;
  std::vector<double> ab(pairs.size()), ba(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ab[i] = scorer.score_pair(pairs[i], false);
    ba[i] = scorer.score_pair(pairs[i], true);
  }
  double lo = 0.0, scale = 1.0;
  if (!scorer.calibrated()) {
    lo = std::min(*std::min_element(ab.begin(), ab.end()), *std::min_element(ba.begin(), ba.end()));
    double hi = std::max(*std::max_element(ab.begin(), ab.end()), *std::max_element(ba.begin(), ba.end()));
    scale = hi > lo ? hi - lo : 1.0;
  }
  double fluct = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (predict(ab[i], threshold) != predict(ba[i], threshold)) {
      ++r.flips;
      continue;
    }
    // The predicted-class probability is p or 1 - p; either way the change is |p_ab - p_ba|.
    fluct += std::abs((ab[i] - lo) / scale - (ba[i] - lo) / scale);
    ++kept;
  }
  r.flip_rate = static_cast<double>(r.flips) / static_cast<double>(r.pairs_tested);
  r.mean_fluctuation = kept ? fluct / static_cast<double>(kept) : 0.0;
  return r;
}

struct Triangle {
  std::array<std::string, 3> ids;
  std::array<double, 3> scores;  // (a,b), (a,c), (b,c)
};

struct TransitiveReport {
  std::size_t triplets_examined = 0;
  std::size_t triplets_with_two_positives = 0;
  std::size_t consistent_111 = 0;
  std::size_t inconsistent_110 = 0;
  /// consistent / (consistent + inconsistent); 1.0 when no triplet qualifies.
  double consistency_rate = 1.0;
  std::vector<Triangle> inconsistent;  // filled only on request
};

/// Enumerates headline triplets whose three pairs all fall inside the day window and
/// classifies those with at least two positive predictions. Each pair is scored once,
/// chronologically earlier headline first.
inline TransitiveReport transitive_audit(const PairScorer& scorer, const Timeline& timeline, double threshold,
                                         int window_days, bool collect_triangles = false) {
  const auto& hs = timeline.headlines;
  const std::size_t n = hs.size();
  std::vector<signed char> pred(n * n, -1);
  std::vector<double> score(n * n, 0.0);
  auto within = [&](std::size_t i, std::size_t j) {
    return day_diff(hs[i].publish_date, hs[j].publish_date) <= window_days;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (within(i, j)) {
        LabeledPair p = make_pair(hs[i], hs[j], 0, timeline.split, timeline.timeline_id);
        double s = scorer.score_pair(p);
        score[i * n + j] = s;
        pred[i * n + j] = static_cast<signed char>(predict(s, threshold));
      }

  TransitiveReport r;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pred[i * n + j] < 0) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (pred[i * n + k] < 0 || pred[j * n + k] < 0) continue;
        ++r.triplets_examined;
        const int pos = pred[i * n + j] + pred[i * n + k] + pred[j * n + k];
        if (pos < 2) continue;
        ++r.triplets_with_two_positives;
        if (pos == 3) {
          ++r.consistent_111;
        } else {
          ++r.inconsistent_110;
          if (collect_triangles)
            r.inconsistent.push_back(
                Triangle{{hs[i].id, hs[j].id, hs[k].id}, {score[i * n + j], score[i * n + k], score[j * n + k]}});
        }
      }
    }
  if (r.triplets_with_two_positives)
    r.consistency_rate =
        static_cast<double>(r.consistent_111) / static_cast<double>(r.triplets_with_two_positives);
  return r;
}

/// Sums counts over several timelines.
inline TransitiveReport& operator+=(TransitiveReport& a, const TransitiveReport& b) {
  a.triplets_examined += b.triplets_examined;
  a.triplets_with_two_positives += b.triplets_with_two_positives;
  a.consistent_111 += b.consistent_111;
  a.inconsistent_110 += b.inconsistent_110;
  a.inconsistent.insert(a.inconsistent.end(), b.inconsistent.begin(), b.inconsistent.end());
  a.consistency_rate = a.triplets_with_two_positives
                           ? static_cast<double>(a.consistent_111) / static_cast<double>(a.triplets_with_two_positives)
                           : 1.0;
  return a;
}

inline nlohmann::ordered_json to_json(const CommutativeReport& r) {
  nlohmann::ordered_json j;
  j["pairs_tested"] = r.pairs_tested;
  j["flips"] = r.flips;
  j["flip_rate"] = r.flip_rate;
  j["mean_fluctuation"] = r.mean_fluctuation;
  return j;
}

inline nlohmann::ordered_json to_json(const TransitiveReport& r) {
  nlohmann::ordered_json j;
  j["triplets_examined"] = r.triplets_examined;
  j["triplets_with_two_positives"] = r.triplets_with_two_positives;
  j["consistent_111"] = r.consistent_111;
  j["inconsistent_110"] = r.inconsistent_110;
  j["consistency_rate"] = r.consistency_rate;
  return j;
}

inline void write_triangles_csv(std::ostream& out, const std::vector<Triangle>& triangles) {
  out << "id_a,id_b,id_c,score_ab,score_ac,score_bc\n";
  for (const auto& t : triangles) {
    out << t.ids[0] << ',' << t.ids[1] << ',' << t.ids[2];
    for (double s : t.scores) out << ',' << nlohmann::json(s).dump();
    out << '\n';
  }
}

}  // namespace groupline
