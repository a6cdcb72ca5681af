#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/hlgd.hpp"
#include "groupline/metrics.hpp"
#include "groupline/scorer.hpp"

namespace groupline {

/// P(label = 1 | dt) = sigmoid(weight * dt + bias), dt in days.
struct TimeLogistic {
  double weight = 0.0;
  double bias = 0.0;
  double decision_threshold = 0.5;

  double probability(double day_diff) const { return 1.0 / (1.0 + std::exp(-(weight * day_diff + bias))); }
};

struct LogisticFitOptions {
  double learning_rate = 0.1;
  int iterations = 5000;
};

/// Full-batch gradient descent on standardized day differences, then converted back
/// to raw days. The decision threshold is tuned for F-1 on the same pairs.
inline TimeLogistic fit_time_logistic(const std::vector<LabeledPair>& pairs, LogisticFitOptions opts = {}) {
  std::size_t pos = 0;
  for (const auto& p : pairs) pos += p.label == 1;
  if (pos == 0 || pos == pairs.size()) throw ConfigError("time-only fit needs both labels in the training pairs");

  const double n = static_cast<double>(pairs.size());
  double mean = 0.0;
  for (const auto& p : pairs) mean += p.day_diff;
  mean /= n;
  double var = 0.0;
  for (const auto& p : pairs) var += (p.day_diff - mean) * (p.day_diff - mean);
  double sd = std::sqrt(var / n);
  if (sd == 0.0) sd = 1.0;

  std::vector<double> x(pairs.size());
  std::vector<double> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x[i] = (pairs[i].day_diff - mean) / sd;
    y[i] = pairs[i].label;
  }
  double w = 0.0, b = 0.0;
  for (int it = 0; it < opts.iterations; ++it) {
    double gw = 0.0, gb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double err = 1.0 / (1.0 + std::exp(-(w * x[i] + b))) - y[i];
      gw += err * x[i];
      gb += err;
    }
    w -= opts.learning_rate * gw / n;
    b -= opts.learning_rate * gb / n;
  }

  TimeLogistic model{w / sd, b - w * mean / sd, 0.5};
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(pairs.size());
  for (const auto& p : pairs) {
    scores.push_back(model.probability(p.day_diff));
    labels.push_back(p.label);
  }
  model.decision_threshold = tune_threshold(scores, labels);
  return model;
}

/// Non-finite thresholds are stored as strings.
inline nlohmann::json threshold_to_json(double t) {
  if (std::isinf(t)) return t > 0 ? "inf" : "-inf";
  return t;
}

inline double threshold_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ParseError("invalid threshold '" + s + "'");
  }
  return j.get<double>();
}

inline nlohmann::ordered_json to_json(const TimeLogistic& m) {
  nlohmann::ordered_json j;
  j["kind"] = "time-logistic";
  j["weight"] = m.weight;
  j["bias"] = m.bias;
  j["threshold"] = threshold_to_json(m.decision_threshold);
  return j;
}

inline TimeLogistic time_logistic_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("kind", "") != "time-logistic") throw ParseError("not a time-logistic model file");
  return TimeLogistic{j.at("weight").get<double>(), j.at("bias").get<double>(), threshold_from_json(j.at("threshold"))};
}

class TimeLogisticScorer final : public PairScorer {
 public:
  explicit TimeLogisticScorer(TimeLogistic model) : model_(model) {}
  std::string name() const override { return "time"; }
  Tier tier() const override { return Tier::time; }
  bool calibrated() const override { return true; }
  bool symmetric() const override { return true; }
  double score(const PairView& v) const override { return model_.probability(v.day_diff()); }
  const TimeLogistic& model() const { return model_; }

 private:
  TimeLogistic model_;
};

}  // namespace groupline
