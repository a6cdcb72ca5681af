#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "groupline/error.hpp"

namespace groupline {

struct ConfusionCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  void add(int prediction, int label) {
    if (prediction && label) ++tp;
    else if (prediction) ++fp;
    else if (label) ++fn;
    else ++tn;
  }
};

struct F1Result {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Positive class is label 1; zero denominators yield 0.
inline F1Result f1_from_counts(const ConfusionCounts& c) {
  F1Result r;
  if (c.tp + c.fp) r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn) r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

inline F1Result f1_score(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw ConfigError("f1_score: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) c.add(predictions[i] != 0, labels[i] != 0);
  return f1_from_counts(c);
}

/// Prediction rule shared by every evaluator: positive iff score >= threshold.
inline int predict(double score, double threshold) { return score >= threshold ? 1 : 0; }

/// Threshold maximizing F-1 on (scores, labels). Candidates are -inf, the midpoints
/// between consecutive distinct scores, and +inf; ties go to the smallest threshold.
inline double tune_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw ConfigError("tune_threshold: length mismatch");
  std::int64_t pos = 0;
  for (int l : labels) pos += l != 0;
  if (pos == 0 || pos == static_cast<std::int64_t>(labels.size()))
    throw ConfigError("tune_threshold: both labels must be present");
  for (double s : scores)
    if (std::isnan(s)) throw ConfigError("tune_threshold: NaN score");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sweep ascending: at a candidate cut, everything at or above it is predicted positive.
  const std::int64_t n = static_cast<std::int64_t>(scores.size());
  std::int64_t tp = pos, fp = n - pos;  // threshold -inf
  double best_t = -std::numeric_limits<double>::infinity();
  std::int64_t best_num = 2 * tp, best_den = 2 * tp + fp + (pos - tp);
  std::size_t i = 0;
  while (i < idx.size()) {
    const double v = scores[idx[i]];
    while (i < idx.size() && scores[idx[i]] == v) {
      if (labels[idx[i]]) --tp;
      else --fp;
      ++i;
    }
    double t;
    if (i < idx.size()) {
      const double next = scores[idx[i]];
      t = v + (next - v) / 2;
      if (!(t > v)) t = next;
    } else {
      t = std::numeric_limits<double>::infinity();
    }
    const std::int64_t num = 2 * tp, den = 2 * tp + fp + (pos - tp);
    // num/den > best_num/best_den, compared exactly; den == 0 means F-1 = 0.
    if (den > 0 && (best_den == 0 ? num > 0 : num * best_den > best_num * den)) {
      best_t = t;
      best_num = num;
      best_den = den;
    }
  }
  return best_t;
}

}  // namespace groupline
