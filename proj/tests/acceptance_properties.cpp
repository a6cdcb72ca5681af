// Property acceptance suite: one PASS/FAIL line per criterion, synthetic data only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace groupline;
using namespace testing_support;

namespace {

int failures = 0;

/// A check returns an empty string on success or a description of the first failure.
void criterion(const std::string& name, const std::function<std::string()>& check) {
  auto t0 = std::chrono::steady_clock::now();
  std::string why;
  try {
    why = check();
  } catch (const std::exception& e) {
    why = std::string("unexpected exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char timing[32];
  std::snprintf(timing, sizeof timing, " (%.2fs)", secs);
  if (why.empty()) {
    std::cout << "PASS " << name << timing << "\n";
  } else {
    std::cout << "FAIL " << name << timing << ": " << why << "\n";
    ++failures;
  }
  std::cout.flush();
}

std::string node(std::size_t i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "n%02zu", i);
  return buf;
}

std::vector<std::string> nodes(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(node(i));
  return out;
}

Partition from_labels(const std::vector<int>& labels) {
  Partition p;
  for (std::size_t i = 0; i < labels.size(); ++i) p.groups[node(i)] = labels[i];
  return p;
}

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const std::vector<std::string> alphabet = {"a", "b", "c", "d", " ", "é", "ø", "日", "本"};
  std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t n = len(rng); n > 0; --n) s += alphabet[pick(rng)];
  return s;
}

std::string ratio_properties() {
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_text(rng, 20), b = random_text(rng, 20);
    auto ca = decode_utf8(a), cb = decode_utf8(b);
    auto d = levenshtein_distance(a, b);
    if (d != oracle::full_dp_distance(ca, cb)) return "distance mismatch on pair " + std::to_string(i);
    double r = levenshtein_ratio(a, b);
    if (r != levenshtein_ratio(b, a)) return "ratio not symmetric on pair " + std::to_string(i);
    if (!(r >= 0.0 && r <= 1.0)) return "ratio out of range on pair " + std::to_string(i);
    if ((r == 1.0) != (ca == cb)) return "ratio identity violated on pair " + std::to_string(i);
    if (levenshtein_ratio(a, a) != 1.0) return "Ratio(s,s) != 1";
    const double expected = ca.empty() && cb.empty() ? 1.0 : 1.0 - double(d) / double(std::max(ca.size(), cb.size()));
    if (r != expected) return "ratio differs from 1 - d/max on pair " + std::to_string(i);
  }
  return "";
}

std::string merge_properties() {
  // unanimity, on the excerpt fixture and on random partitions
  {
    Timeline t = space_excerpt();
    Partition g = space_excerpt_groups(t);
    std::vector<AnnotationSet> five(5, AnnotationSet{"x", t.timeline_id, g.groups});
    if (!relabel_equal(merge_annotations(five), g)) return "unanimity failed on the excerpt fixture";
  }
  std::mt19937_64 rng(2002);
  for (int trial = 0; trial < 50; ++trial) {
    Timeline t = timeline_with_days(std::vector<int>(12, 0));
    auto labels = random_labels(rng, 12, 5);
    std::vector<AnnotationSet> five(5, annotation(t, std::vector<long>(labels.begin(), labels.end())));
    if (!relabel_equal(merge_annotations(five), to_partition(five[0])))
      return "unanimity failed on random partition " + std::to_string(trial);
  }

  // 3-of-5 edge rule: an edge iff at least three annotators co-group the pair
  for (int trial = 0; trial < 50; ++trial) {
    Timeline t = timeline_with_days(std::vector<int>(8, 0));
    std::vector<AnnotationSet> sets;
    std::vector<std::vector<int>> raw;
    for (int a = 0; a < 5; ++a) {
      raw.push_back(random_labels(rng, 8, 3));
      sets.push_back(annotation(t, std::vector<long>(raw.back().begin(), raw.back().end())));
    }
    auto g = CoGroupGraph::from_annotations(sets, 3);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = i + 1; j < 8; ++j) {
        int votes = 0;
        for (const auto& r : raw) votes += r[i] == r[j];
        if (g.has_edge(i, j) != (votes >= 3)) return "edge rule wrong in trial " + std::to_string(trial);
      }
  }

  // disjoint cliques
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> total_d(2, 30), size_d(1, 8);
    const std::size_t n = total_d(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> truth(n);
    oracle::Edges edges;
    std::size_t at = 0;
    for (int c = 0; at < n; ++c) {
      std::size_t k = std::min(size_d(rng), n - at);
      for (std::size_t i = 0; i < k; ++i) {
        truth[perm[at + i]] = c;
        for (std::size_t j = i + 1; j < k; ++j) edges.emplace_back(perm[at + i], perm[at + j]);
      }
      at += k;
    }
    auto g = CoGroupGraph::from_edges(nodes(n), edges);
    Partition p = louvain_partition(g);
    if (!relabel_equal(p, from_labels(truth))) return "clique graph " + std::to_string(trial) + " not recovered";
  }

  // modularity never below singletons; bitwise determinism
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> nd(1, 30);
    std::uniform_real_distribution<double> pd(0.02, 0.5);
    const std::size_t n = nd(rng);
    std::bernoulli_distribution coin(pd(rng));
    oracle::Edges edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (coin(rng)) edges.emplace_back(i, j);
    auto g = CoGroupGraph::from_edges(nodes(n), edges);
    std::vector<int> singles(n);
    std::iota(singles.begin(), singles.end(), 0);
    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
      Partition p = louvain_partition(g, {1.0, seed});
      double q = modularity(g, p), q0 = modularity(g, from_labels(singles));
      if (q < q0 - 1e-12) return "Louvain below singleton modularity on graph " + std::to_string(trial);
      Partition again = louvain_partition(g, {1.0, seed});
      if (again.groups != p.groups) return "Louvain not deterministic on graph " + std::to_string(trial);
      double q_again = modularity(g, again);
      if (std::memcmp(&q, &q_again, sizeof q) != 0) return "modularity not bitwise stable";
    }
  }
  return "";
}

std::string ami_properties() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<std::size_t> nd(2, 15);
  std::uniform_int_distribution<int> kd(1, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = nd(rng);
    auto u = random_labels(rng, n, kd(rng)), v = random_labels(rng, n, kd(rng));
    double got = adjusted_mutual_information(u, v), want = oracle::ami(u, v);
    if (std::abs(got - want) > 1e-9)
      return "pair " + std::to_string(trial) + ": " + std::to_string(got) + " vs oracle " + std::to_string(want);
    if (adjusted_mutual_information(u, u) != 1.0) return "AMI(p,p) != 1 on pair " + std::to_string(trial);
  }
  return "";
}

std::string merge_vs_brute_force() {
  struct Case {
    std::size_t n;
    std::vector<std::vector<long>> annotators;
  };
  std::vector<Case> cases = {
      {6, {{1, 1, 1, 2, 2, 2}, {1, 1, 1, 2, 2, 3}, {1, 1, 2, 2, 3, 3}, {1, 1, 1, 1, 2, 2}, {1, 2, 2, 3, 3, 3}}},
      {6, {{1, 1, 1, 1, 2, 2}, {1, 1, 1, 2, 2, 2}, {1, 1, 2, 2, 2, 2}, {1, 1, 1, 2, 2, 2}, {1, 1, 1, 2, 2, 2}}},
      {5, {{1, 1, 2, 2, 3}, {1, 1, 2, 2, 2}, {1, 2, 2, 3, 3}, {1, 1, 3, 2, 2}, {1, 1, 2, 2, 3}}},
      {4, {{1, 1, 2, 2}, {1, 1, 1, 2}, {1, 2, 2, 2}, {1, 1, 2, 2}, {1, 1, 2, 3}}},
      {6, {{1, 2, 3, 4, 5, 6}, {1, 1, 2, 2, 3, 3}, {1, 1, 2, 2, 3, 3}, {1, 1, 2, 3, 3, 4}, {1, 1, 2, 2, 3, 3}}},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& k = cases[c];
    Timeline t = timeline_with_days(std::vector<int>(k.n, 0));
    std::vector<AnnotationSet> sets;
    for (const auto& a : k.annotators) sets.push_back(annotation(t, a));
    auto g = CoGroupGraph::from_annotations(sets, strict_majority(sets.size()));
    oracle::Edges edges;
    for (std::size_t i = 0; i < k.n; ++i)
      for (std::size_t j = i + 1; j < k.n; ++j)
        if (g.has_edge(i, j)) edges.emplace_back(i, j);
    auto best = oracle::max_modularity(k.n, edges);
    if (best.optima != 1) return "case " + std::to_string(c) + " has " + std::to_string(best.optima) + " optima";
    Partition want;
    for (std::size_t i = 0; i < k.n; ++i) want.groups[t.headlines[i].id] = best.labels[i];
    if (!relabel_equal(merge_annotations(sets), want)) return "case " + std::to_string(c) + " differs";
  }
  return "";
}

std::string decay_properties() {
  std::mt19937_64 rng(4004);
  std::uniform_real_distribution<double> sd(0.0, 1.0);
  std::uniform_int_distribution<int> dd(0, 30);
  for (int i = 0; i < 200; ++i) {
    double base = sd(rng);
    int days = dd(rng);
    auto s = std::make_shared<FunctionScorer>("c", Tier::headline, true, [base](const PairView&) { return base; });
    Timeline t = timeline_with_days({0, days});
    auto p = make_pair(t.headlines[0], t.headlines[1], 0, Split::train, "t");
    if (time_decay(s, 0.0)->score_pair(p) != base) return "lambda = 0 changed a score";
  }
  struct Hand {
    double score, lambda;
    int days;
    double expected;
  };
  const std::vector<Hand> hand = {
      {0.8, 0.15, 2, 0.5926545765453743},         // 0.8 e^-0.30
      {1.0, 0.15, 4, 0.5488116360940264},         // e^-0.6
      {0.5, 0.07, 10, 0.24829265189570474},       // 0.5 e^-0.7
      {0.0012, 0.07, 3, 0.0009727010951642245},   // 0.0012 e^-0.21
  };
  for (const auto& h : hand) {
    auto s = std::make_shared<FunctionScorer>("c", Tier::headline, true, [h](const PairView&) { return h.score; });
    Timeline t = timeline_with_days({0, h.days});
    auto p = make_pair(t.headlines[0], t.headlines[1], 0, Split::train, "t");
    double got = time_decay(s, h.lambda)->score_pair(p);
    if (std::abs(got - h.expected) > 1e-12) return "decay value off: " + std::to_string(got);
  }
  return "";
}

std::string swap_properties() {
  std::mt19937_64 rng(5005);
  static const std::vector<std::string> vocab = {"station", "crew", "launch", "rocket", "orbit", "dock",
                                                 "cargo",   "alarm", "leak",  "module", "spacewalk", "nasa",
                                                 "russia",  "soyuz", "return", "storm", "market", "vote",
                                                 "court",   "fire"};
  std::uniform_int_distribution<std::size_t> w(0, vocab.size() - 1), hl(1, 8), cl(0, 60);
  auto words = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + vocab[w(rng)];
    return s;
  };
  std::vector<Article> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back({words(cl(rng)), words(hl(rng))});
  auto lm = std::make_shared<NgramLM>(train_ngram_backend(corpus));
  SwapScorer scorer(lm);
  for (int i = 0; i < 1000; ++i) {
    Headline a = headline("a", words(hl(rng)), "2020-01-01"), b = headline("b", words(hl(rng)), "2020-01-02");
    a.content = words(cl(rng));
    b.content = words(cl(rng));
    auto p = make_pair(a, b, 0, Split::train, "t");
    double ab = scorer.score_pair(p), ba = scorer.score_pair(p, true);
    if (std::memcmp(&ab, &ba, sizeof ab) != 0) return "order changed the swap score on pair " + std::to_string(i);
    double direct = swap_score(*lm, {*a.content, a.text}, {*b.content, b.text});
    if (std::memcmp(&ab, &direct, sizeof ab) != 0) return "scorer differs from swap_score on pair " + std::to_string(i);
  }
  Article s1{"crew docks cargo module at the station after launch", "cargo module docks at station"};
  Article s2{"station crew unloads cargo from the docked module", "crew unloads cargo module"};
  Article d1{"storm fire market court vote", "court vote storm"};
  if (!(swap_score(*lm, s1, s2) > swap_score(*lm, s1, d1))) return "shared vocabulary did not score higher";
  return "";
}

std::string commutative_properties() {
  std::mt19937_64 rng(6006);
  Timeline t = space_excerpt();
  auto pairs = generate_labeled_pairs(t, space_excerpt_groups(t));
  std::uniform_real_distribution<double> bump_d(0.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    double bump = bump_d(rng);
    auto ordered = std::make_shared<FunctionScorer>("o", Tier::headline, true, [bump](const PairView& v) {
      return levenshtein_ratio(v.headline(Side::first), v.headline(Side::second)) + (v.swapped() ? 0.0 : bump);
    });
    auto r = commutative_audit(*symmetrize(ordered), pairs, 0.4);
    if (r.flips != 0 || r.flip_rate != 0.0) return "symmetrized scorer flipped";
  }
  // Bases 0.35 and 0.45 cross 0.5 only when a-first (+0.2).
  const std::vector<double> bases = {0.1, 0.35, 0.45, 0.5, 0.6, 0.75};
  std::vector<LabeledPair> crafted;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    Headline a = headline("a" + std::to_string(i), std::to_string(bases[i]), "2020-01-01");
    Headline b = headline("b" + std::to_string(i), "-", "2020-01-01");
    crafted.push_back(make_pair(a, b, 0, Split::dev, "t"));
  }
  FunctionScorer bump("bump", Tier::headline, true, [](const PairView& v) {
    const auto& h = v.headline(Side::first) == "-" ? v.headline(Side::second) : v.headline(Side::first);
    return std::stod(h) + (v.swapped() ? 0.0 : 0.2);
  });
  auto r = commutative_audit(bump, crafted, 0.5);
  if (r.flips != 2) return "expected 2 flips, got " + std::to_string(r.flips);
  if (std::abs(r.mean_fluctuation - 0.2) > 1e-12) return "fluctuation " + std::to_string(r.mean_fluctuation);
  return "";
}

std::string transitive_properties() {
  std::mt19937_64 rng(7007);
  {
    Timeline t = space_excerpt();
    PartitionScorer gold("gold", space_excerpt_groups(t));
    auto r = transitive_audit(gold, t, 0.5, 4);
    if (r.consistency_rate != 1.0 || r.inconsistent_110 != 0) return "gold predictions inconsistent";
  }
  for (int trial = 0; trial < 30; ++trial) {
    Timeline t = timeline_with_days(std::vector<int>(12, 0));
    auto labels = random_labels(rng, 12, 4);
    PartitionScorer gold("gold", partition(t, std::vector<long>(labels.begin(), labels.end())));
    if (transitive_audit(gold, t, 0.5, 4).consistency_rate != 1.0) return "partition predictions inconsistent";
  }
  std::uniform_int_distribution<int> day(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> days(12);
    for (auto& d : days) d = trial % 2 ? 0 : day(rng);
    Timeline t = timeline_with_days(days);
    std::bernoulli_distribution coin(0.5);
    std::vector<std::vector<int>> flips(12, std::vector<int>(12));
    for (auto& row : flips)
      for (auto& x : row) x = coin(rng);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < 12; ++i) index[t.headlines[i].id] = i;
    FunctionScorer s("coin", Tier::headline, true, [&](const PairView& v) {
      return double(flips[index.at(v.headline_id(Side::first))][index.at(v.headline_id(Side::second))]);
    });
    auto r = transitive_audit(s, t, 0.5, 4);
    auto bf = oracle::triangles(
        12, [&](std::size_t i, std::size_t j) { return day_diff(t.headlines[i].publish_date, t.headlines[j].publish_date) <= 4; },
        [&](std::size_t i, std::size_t j) { return flips[i][j]; });
    if (trial % 2 && bf.examined != 220) return "brute force saw " + std::to_string(bf.examined) + " of 220 triplets";
    if (long(r.triplets_examined) != bf.examined || long(r.triplets_with_two_positives) != bf.two_plus ||
        long(r.consistent_111) != bf.c111 || long(r.inconsistent_110) != bf.c110)
      return "triangle counts differ from enumeration in trial " + std::to_string(trial);
  }
  return "";
}

std::string threshold_properties() {
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<std::size_t> nd(2, 40);
  std::uniform_int_distribution<int> grid(0, 12);
  std::uniform_real_distribution<double> cont(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = nd(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = trial % 2 ? grid(rng) / 12.0 : cont(rng);
      labels[i] = std::bernoulli_distribution(0.3 + 0.4 * (scores[i] > 0.5))(rng);
    }
    labels[0] = 1;
    labels[1] = 0;
    double t = tune_threshold(scores, labels);
    std::vector<int> pred;
    for (double s : scores) pred.push_back(predict(s, t));
    double f = oracle::f1(pred, labels);
    for (auto [cand, fc] : oracle::threshold_sweep(scores, labels))
      if (fc > f + 1e-12) return "candidate beats the tuned threshold in set " + std::to_string(trial);
  }
  return "";
}

std::string pair_builder_properties() {
  std::mt19937_64 rng(9009);
  std::uniform_int_distribution<int> day(0, 25), win(0, 6), nd(2, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = nd(rng);
    std::vector<int> days(n);
    for (auto& d : days) d = day(rng);
    Timeline t = timeline_with_days(days);
    auto labels = random_labels(rng, n, 1 + trial % 6);
    Partition g = partition(t, std::vector<long>(labels.begin(), labels.end()));
    const int window = win(rng);
    auto pairs = generate_labeled_pairs(t, g, {window, true});
    std::map<long, long> sizes;
    for (const auto& [id, grp] : g.groups) ++sizes[grp];
    long expected = 0;
    for (const auto& [grp, k] : sizes) expected += k * (k - 1) / 2;
    long pos = 0;
    std::map<std::pair<std::string, std::string>, int> label;
    for (const auto& p : pairs) {
      if (p.label == 0 && p.day_diff > window) return "negative outside the window";
      pos += p.label;
      if (!label.emplace(std::minmax(p.headline_a.id, p.headline_b.id), p.label).second) return "duplicate pair";
    }
    if (pos != expected) return "positive count " + std::to_string(pos) + " != " + std::to_string(expected);
    auto lab = [&](const std::string& a, const std::string& b) {
      auto it = label.find(std::minmax(a, b));
      return it == label.end() ? -1 : it->second;
    };
    auto ids = t.ids();
    for (const auto& a : ids)
      for (const auto& b : ids)
        for (const auto& c : ids)
          if (a != b && b != c && a != c && lab(a, b) == 1 && lab(b, c) == 1 && lab(a, c) == 0)
            return "emitted labels not transitive";
  }
  return "";
}

std::string tier_enforcement() {
  Timeline t = timeline_with_days({0, 3});
  auto p = make_pair(t.headlines[0], t.headlines[1], 0, Split::train, "t");
  FunctionScorer probe("probe", Tier::headline, true, [](const PairView& v) { return double(v.day_diff()); });
  FunctionScorer probe_date("probe-date", Tier::headline, true,
                            [](const PairView& v) { return double(v.date(Side::first).serial()); });
  for (const PairScorer* s : {static_cast<const PairScorer*>(&probe), static_cast<const PairScorer*>(&probe_date)}) {
    try {
      s->score_pair(p);
      return "tier-1 scorer '" + s->name() + "' read a date";
    } catch (const TierError&) {
    }
    try {
      evaluate_scorer(*s, {p}, 0.5);
      return "evaluate_scorer let '" + s->name() + "' read a date";
    } catch (const TierError&) {
    }
  }
  return "";
}

}  // namespace

int main() {
  criterion("ratio: symmetry, range, identity; distance equals full DP on 1,000 random pairs", ratio_properties);
  criterion("merge: unanimity, 3-of-5 edge rule, 100 clique graphs, modularity >= singletons, determinism",
            merge_properties);
  criterion("AMI equals direct-formula oracle within 1e-9 on 50 pairs; AMI(p,p) = 1", ami_properties);
  criterion("merge_annotations on crafted <= 6-node cases equals brute-force optimum", merge_vs_brute_force);
  criterion("time decay: lambda = 0 identity; hand values within 1e-12", decay_properties);
  criterion("swap score: bitwise order invariance on 1,000 pairs; shared vocabulary > disjoint", swap_properties);
  criterion("commutative audit: symmetrized flip rate 0; crafted flip count exact", commutative_properties);
  criterion("transitive audit: partition predictions consistent; 12-headline counts equal enumeration",
            transitive_properties);
  criterion("tune_threshold beats every candidate midpoint on 100 random sets", threshold_properties);
  criterion("pair builder: window, positive count, transitive labels", pair_builder_properties);
  criterion("tier enforcement: tier-1 scorer reading dates raises", tier_enforcement);
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failure(s)\n";
  return failures ? 1 : 0;
}
