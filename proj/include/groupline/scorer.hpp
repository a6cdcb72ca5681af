#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "groupline/hlgd.hpp"
#include "groupline/levenshtein.hpp"
#include "groupline/partition.hpp"

namespace groupline {

/// Data-access level of a scorer.
///   headline: headline text only
///   time:     + publication dates
///   full:     + content, source, url
enum class Tier : int { headline = 1, time = 2, full = 3 };

inline int tier_number(Tier t) { return static_cast<int>(t); }

inline Tier tier_from_number(int n) {
  if (n < 1 || n > 3) throw ConfigError("tier must be 1, 2 or 3");
  return static_cast<Tier>(n);
}

enum class Side { first, second };

/// Capability-restricted, ordered view of a LabeledPair. Reading a field above
/// the view's tier throws TierError. The label is never exposed.
class PairView {
 public:
  PairView(const LabeledPair& pair, Tier tier, bool swapped = false)
      : pair_(&pair), tier_(tier), swapped_(swapped) {}

  Tier tier() const { return tier_; }
  bool swapped() const { return swapped_; }

  PairView reversed() const { return PairView(*pair_, tier_, !swapped_); }
  PairView restricted(Tier t) const { return PairView(*pair_, std::min(t, tier_), swapped_); }

  const std::string& headline(Side s) const { return side(s).text; }
  const std::string& headline_id(Side s) const { return side(s).id; }

  const Date& date(Side s) const {
    require(Tier::time, "publication date");
    return side(s).publish_date;
  }

  int day_diff() const {
    require(Tier::time, "day difference");
    return pair_->day_diff;
  }

  const std::string& content(Side s) const {
    require(Tier::full, "content");
    const auto& h = side(s);
    if (!h.content) throw TierError("content not available for headline '" + h.id + "'");
    return *h.content;
  }

  bool has_content(Side s) const {
    require(Tier::full, "content");
    return side(s).content.has_value();
  }

  const std::string& source(Side s) const {
    require(Tier::full, "source");
    return side(s).source;
  }

  std::string url(Side s) const {
    require(Tier::full, "url");
    return side(s).url.value_or("");
  }

 private:
  const Headline& side(Side s) const {
    bool a = (s == Side::first) != swapped_;
    return a ? pair_->headline_a : pair_->headline_b;
  }

  void require(Tier needed, const char* field) const {
    if (tier_ < needed)
      throw TierError(std::string("tier ") + std::to_string(tier_number(tier_)) + " scorer accessed " + field +
                      " (requires tier " + std::to_string(tier_number(needed)) + ")");
  }

  const LabeledPair* pair_;
  Tier tier_;
  bool swapped_;
};

/// Uniform scoring contract. Higher score means more confident the pair shares a group.
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual std::string name() const = 0;
  virtual Tier tier() const = 0;
  /// True iff scores are probabilities in [0,1].
  virtual bool calibrated() const = 0;
  /// True iff score(view) == score(view.reversed()) by construction.
  virtual bool symmetric() const { return false; }
  virtual double score(const PairView& view) const = 0;

  /// Scores `pair` in the given order through a view restricted to this scorer's tier.
  double score_pair(const LabeledPair& pair, bool swapped = false) const {
    return score(PairView(pair, tier(), swapped));
  }
};

using ScorerPtr = std::shared_ptr<const PairScorer>;

/// Ratio of character-level edit distance to the longer headline.
class LevenshteinScorer final : public PairScorer {
 public:
  std::string name() const override { return "levenshtein"; }
  Tier tier() const override { return Tier::headline; }
  bool calibrated() const override { return true; }
  bool symmetric() const override { return true; }
  double score(const PairView& v) const override {
    return levenshtein_ratio(v.headline(Side::first), v.headline(Side::second));
  }
};

/// Multiplies a base score by exp(-lambda * day_diff).
class TimeDecayScorer final : public PairScorer {
 public:
  TimeDecayScorer(ScorerPtr base, double lambda) : base_(std::move(base)), lambda_(lambda) {
    if (!base_) throw ConfigError("time decay needs a base scorer");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  }
  std::string name() const override { return base_->name() + "+time"; }
  Tier tier() const override { return std::max(base_->tier(), Tier::time); }
  bool calibrated() const override { return base_->calibrated(); }
  bool symmetric() const override { return base_->symmetric(); }
  double lambda() const { return lambda_; }
  double score(const PairView& v) const override {
    double s = base_->score(v.restricted(base_->tier()));
    return s * std::exp(-lambda_ * static_cast<double>(v.day_diff()));
  }

 private:
  ScorerPtr base_;
  double lambda_;
};

inline ScorerPtr time_decay(ScorerPtr base, double lambda) {
  return std::make_shared<TimeDecayScorer>(std::move(base), lambda);
}

/// Mean of both argument orders; exactly order-invariant.
class SymmetrizedScorer final : public PairScorer {
 public:
  explicit SymmetrizedScorer(ScorerPtr base) : base_(std::move(base)) {
    if (!base_) throw ConfigError("symmetrize needs a base scorer");
  }
  std::string name() const override { return base_->name() + "+sym"; }
  Tier tier() const override { return base_->tier(); }
  bool calibrated() const override { return base_->calibrated(); }
  bool symmetric() const override { return true; }
  double score(const PairView& v) const override {
    // Summing in canonical order keeps the result bitwise identical for both views.
    PairView canon = v.swapped() ? v.reversed() : v;
    return (base_->score(canon) + base_->score(canon.reversed())) / 2.0;
  }

 private:
  ScorerPtr base_;
};

inline ScorerPtr symmetrize(ScorerPtr base) { return std::make_shared<SymmetrizedScorer>(std::move(base)); }

/// Scorer backed by a callable; used for ad-hoc and test scorers.
class FunctionScorer final : public PairScorer {
 public:
  using Fn = std::function<double(const PairView&)>;
  FunctionScorer(std::string name, Tier tier, bool calibrated, Fn fn, bool symmetric = false)
      : name_(std::move(name)), tier_(tier), calibrated_(calibrated), symmetric_(symmetric), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  Tier tier() const override { return tier_; }
  bool calibrated() const override { return calibrated_; }
  bool symmetric() const override { return symmetric_; }
  double score(const PairView& v) const override { return fn_(v); }

 private:
  std::string name_;
  Tier tier_;
  bool calibrated_;
  bool symmetric_;
  Fn fn_;
};

/// 1 when both headlines share a group of `groups`, else 0. Identifies headlines
/// by id, which the paired records carry at every tier.
class PartitionScorer final : public PairScorer {
 public:
  PartitionScorer(std::string name, Partition groups) : name_(std::move(name)), groups_(std::move(groups)) {}
  std::string name() const override { return name_; }
  Tier tier() const override { return Tier::full; }
  bool calibrated() const override { return true; }
  bool symmetric() const override { return true; }
  double score(const PairView& v) const override {
    return groups_.group_of(v.headline_id(Side::first)) == groups_.group_of(v.headline_id(Side::second)) ? 1.0
                                                                                                          : 0.0;
  }

 private:
  std::string name_;
  Partition groups_;
};

}  // namespace groupline
