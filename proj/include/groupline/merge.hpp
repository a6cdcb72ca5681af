#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "groupline/corpus.hpp"
#include "groupline/partition.hpp"

namespace groupline {

/// Headlines as nodes; an edge joins two headlines when at least
/// `majority_threshold` annotators put them in the same group.
class CoGroupGraph {
 public:
  CoGroupGraph() = default;

  /// Unanimous-vote graph from an explicit edge list (vote_count 1, threshold 1).
  static CoGroupGraph from_edges(std::vector<std::string> nodes,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    CoGroupGraph g;
    g.init(std::move(nodes), 1);
    for (auto [i, j] : edges) {
      if (i == j) throw ConfigError("self-loop in co-group graph");
      if (i >= g.size() || j >= g.size()) throw ConfigError("edge endpoint out of range");
      g.votes_[i * g.size() + j] = g.votes_[j * g.size() + i] = 1;
    }
    g.rebuild();
    return g;
  }

  static CoGroupGraph from_annotations(const std::vector<AnnotationSet>& annotations, int majority) {
    if (annotations.empty()) throw ConfigError("no annotation sets to merge");
    if (majority < 1 || majority > static_cast<int>(annotations.size()))
      throw ConfigError("majority must lie in [1, number of annotators]");
    const auto& first = annotations.front();
    for (const auto& a : annotations) {
      if (a.timeline_id != first.timeline_id)
        throw ConfigError("annotation sets cover different timelines ('" + first.timeline_id + "' vs '" +
                          a.timeline_id + "')");
      if (a.assignment.size() != first.assignment.size() ||
          !std::equal(a.assignment.begin(), a.assignment.end(), first.assignment.begin(),
                      [](const auto& x, const auto& y) { return x.first == y.first; }))
        throw ConfigError("annotation sets cover different headline ids");
    }
    std::vector<std::string> nodes;
    for (const auto& [id, g] : first.assignment) nodes.push_back(id);
    CoGroupGraph g;
    g.timeline_id_ = first.timeline_id;
    g.init(std::move(nodes), majority);
    const std::size_t n = g.size();
    std::vector<long> labels(n);
    for (const auto& a : annotations) {
      std::size_t k = 0;
      for (const auto& [id, grp] : a.assignment) labels[k++] = grp;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (labels[i] == labels[j]) {
            ++g.votes_[i * n + j];
            ++g.votes_[j * n + i];
          }
    }
    g.rebuild();
    return g;
  }

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& timeline_id() const { return timeline_id_; }
  int majority_threshold() const { return majority_; }

  int vote_count(std::size_t i, std::size_t j) const { return votes_[i * size() + j]; }
  bool has_edge(std::size_t i, std::size_t j) const { return i != j && vote_count(i, j) >= majority_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adj_[i]; }
  std::size_t degree(std::size_t i) const { return adj_[i].size(); }
  std::size_t edge_count() const { return edges_; }

 private:
  void init(std::vector<std::string> nodes, int majority) {
    nodes_ = std::move(nodes);
    majority_ = majority;
    votes_.assign(nodes_.size() * nodes_.size(), 0);
  }

  void rebuild() {
    const std::size_t n = size();
    adj_.assign(n, {});
    edges_ = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (has_edge(i, j)) {
          adj_[i].push_back(j);
          if (i < j) ++edges_;
        }
  }

  std::string timeline_id_;
  std::vector<std::string> nodes_;
  std::vector<int> votes_;
  std::vector<std::vector<std::size_t>> adj_;
  std::size_t edges_ = 0;
  int majority_ = 1;
};

/// Newman modularity with unit edge weights. 0 for an edgeless graph.
inline double modularity(const CoGroupGraph& g, const Partition& p, double resolution = 1.0) {
  const double m = static_cast<double>(g.edge_count());
  std::map<long, std::pair<double, double>> per;  // group -> (internal edges, degree sum)
  std::vector<long> label(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto it = p.groups.find(g.nodes()[i]);
    if (it == p.groups.end()) throw ConfigError("partition missing node '" + g.nodes()[i] + "'");
    label[i] = it->second;
  }
  if (m == 0) return 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto& e = per[label[i]];
    e.second += static_cast<double>(g.degree(i));
    for (auto j : g.neighbors(i))
      if (j > i && label[j] == label[i]) e.first += 1.0;
  }
  double q = 0.0;
  for (const auto& [c, e] : per) q += e.first / m - resolution * (e.second / (2 * m)) * (e.second / (2 * m));
  return q;
}

struct LouvainOptions {
  double resolution = 1.0;
  /// 0 visits nodes in ascending id order; other values permute the visit order.
  std::uint64_t seed = 0;
};

namespace detail {

struct WeightedGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries
  std::vector<double> self;                                      // twice the internal weight
  std::vector<double> degree;
  double total = 0.0;  // sum of degrees (2m)

  std::size_t size() const { return adj.size(); }
};

// One pass of local moving. Returns true if any node changed community.
inline bool local_moving(const WeightedGraph& g, std::vector<std::size_t>& comm, double resolution,
                         std::mt19937_64* rng) {
  const std::size_t n = g.size();
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += g.degree[i];

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (rng) {
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[(*rng)() % i]);
  }

  std::vector<double> link(n, 0.0);
  std::vector<std::size_t> touched;
  bool any = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t node : order) {
      const std::size_t own = comm[node];
      const double k = g.degree[node];
      tot[own] -= k;
      touched.clear();
      for (auto [j, w] : g.adj[node]) {
        std::size_t c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      std::sort(touched.begin(), touched.end());
      auto gain = [&](std::size_t c) { return link[c] * g.total - resolution * tot[c] * k; };
      std::size_t best = own;
      double best_gain = gain(own);
      const double eps = 1e-10 * std::max(1.0, g.total * g.total);
      for (std::size_t c : touched) {
        if (c == own) continue;
        double gc = gain(c);
        if (gc > best_gain + eps) {
          best = c;
          best_gain = gc;
        }
      }
      for (std::size_t c : touched) link[c] = 0.0;
      tot[best] += k;
      if (best != own) {
        comm[node] = best;
        improved = true;
        any = true;
      }
    }
  }
  return any;
}

}  // namespace detail

/// Louvain community detection. Deterministic for fixed options and node order;
/// isolated nodes stay singletons.
inline Partition louvain_partition(const CoGroupGraph& graph, LouvainOptions opts = {}) {
  const std::size_t n = graph.size();
  detail::WeightedGraph g;
  g.adj.resize(n);
  g.self.assign(n, 0.0);
  g.degree.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : graph.neighbors(i)) g.adj[i].emplace_back(j, 1.0);
    g.degree[i] = static_cast<double>(graph.degree(i));
    g.total += g.degree[i];
  }

  std::vector<std::size_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0);
  std::mt19937_64 rng(opts.seed);

  if (g.total > 0) {
    while (true) {
      std::vector<std::size_t> comm(g.size());
      std::iota(comm.begin(), comm.end(), 0);
      if (!detail::local_moving(g, comm, opts.resolution, opts.seed ? &rng : nullptr)) break;

      std::vector<std::size_t> dense(g.size(), SIZE_MAX);
      std::size_t k = 0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (dense[comm[i]] == SIZE_MAX) dense[comm[i]] = k++;
      for (auto& m : membership) m = dense[comm[m]];

      detail::WeightedGraph next;
      next.adj.resize(k);
      next.self.assign(k, 0.0);
      next.degree.assign(k, 0.0);
      next.total = g.total;
      std::vector<std::map<std::size_t, double>> acc(k);
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t ci = dense[comm[i]];
        next.self[ci] += g.self[i];
        next.degree[ci] += g.degree[i];
        for (auto [j, w] : g.adj[i]) {
          std::size_t cj = dense[comm[j]];
          if (ci == cj)
            next.self[ci] += w;
          else
            acc[ci][cj] += w;
        }
      }
      for (std::size_t c = 0; c < k; ++c)
        for (auto [d, w] : acc[c]) next.adj[c].emplace_back(d, w);
      g = std::move(next);
    }
  }

  Partition p;
  p.timeline_id = graph.timeline_id();
  std::vector<long> dense(n, -1);
  long next_id = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& d = dense[membership[i]];
    if (d < 0) d = next_id++;
    p.groups[graph.nodes()[i]] = d;
  }
  return p;
}

/// Smallest strict majority of k annotators.
inline int strict_majority(std::size_t k) { return static_cast<int>(k / 2 + 1); }

struct MergeOptions {
  int majority = 0;  // 0 picks the strict majority
  LouvainOptions louvain;
};

/// Global groups: majority co-group graph followed by Louvain.
inline Partition merge_annotations(const std::vector<AnnotationSet>& annotations, MergeOptions opts = {}) {
  if (annotations.empty()) throw ConfigError("no annotation sets to merge");
  int majority = opts.majority ? opts.majority : strict_majority(annotations.size());
  return louvain_partition(CoGroupGraph::from_annotations(annotations, majority), opts.louvain);
}

/// Adjusted mutual information with max-normalization over dense label vectors.
inline double adjusted_mutual_information(const std::vector<int>& u, const std::vector<int>& v) {
  if (u.size() != v.size()) throw ConfigError("AMI inputs differ in length");
  const std::size_t n = u.size();
  if (n == 0) return 1.0;
  auto relabel = [](const std::vector<int>& x) {
    std::map<int, int> m;
    std::vector<int> out;
    for (int l : x) out.push_back(m.emplace(l, static_cast<int>(m.size())).first->second);
    return std::pair{out, m.size()};
  };
  auto [a, ka] = relabel(u);
  auto [b, kb] = relabel(v);
  if (a == b) return 1.0;

  std::vector<long> cont(ka * kb, 0), ra(ka, 0), rb(kb, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++cont[a[i] * kb + b[i]];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  const double N = static_cast<double>(n);
  auto entropy = [&](const std::vector<long>& sizes) {
    double h = 0.0;
    for (long s : sizes)
      if (s > 0) h -= (s / N) * std::log(s / N);
    return h;
  };
  const double ha = entropy(ra), hb = entropy(rb);
  double mi = 0.0;
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) {
      double c = static_cast<double>(cont[i * kb + j]);
      if (c > 0) mi += (c / N) * std::log(N * c / (static_cast<double>(ra[i]) * rb[j]));
    }

  // Expected MI under the hypergeometric model of random labelings.
  const double lgn = std::lgamma(N + 1);
  double emi = 0.0;
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j) {
      const double ai = static_cast<double>(ra[i]), bj = static_cast<double>(rb[j]);
      const double fixed = std::lgamma(ai + 1) + std::lgamma(bj + 1) + std::lgamma(N - ai + 1) +
                           std::lgamma(N - bj + 1) - lgn;
      const long lo = std::max(1L, ra[i] + rb[j] - static_cast<long>(n));
      const long hi = std::min(ra[i], rb[j]);
      for (long nij = lo; nij <= hi; ++nij) {
        const double x = static_cast<double>(nij);
        const double logp = fixed - std::lgamma(x + 1) - std::lgamma(ai - x + 1) - std::lgamma(bj - x + 1) -
                            std::lgamma(N - ai - bj + x + 1);
        emi += (x / N) * std::log(N * x / (ai * bj)) * std::exp(logp);
      }
    }
  const double denom = std::max(ha, hb) - emi;
  if (std::abs(denom) < 1e-15) return 0.0;
  return (mi - emi) / denom;
}

inline double adjusted_mutual_information(const Partition& p, const Partition& q) {
  if (p.groups.size() != q.groups.size() ||
      !std::equal(p.groups.begin(), p.groups.end(), q.groups.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; }))
    throw ConfigError("AMI: partitions cover different headline sets");
  return adjusted_mutual_information(p.canonical_labels(), q.canonical_labels());
}

struct AgreementReport {
  std::vector<std::pair<std::string, double>> per_annotator;  // input order
  double average = 0.0;
};

/// Each annotator against the global groups merged from the other annotators.
inline AgreementReport leave_one_out_agreement(const std::vector<AnnotationSet>& annotations,
                                               LouvainOptions opts = {}) {
  if (annotations.size() < 3) throw ConfigError("leave-one-out agreement needs at least 3 annotation sets");
  AgreementReport report;
  double sum = 0.0;
  for (std::size_t a = 0; a < annotations.size(); ++a) {
    std::vector<AnnotationSet> rest;
    for (std::size_t b = 0; b < annotations.size(); ++b)
      if (b != a) rest.push_back(annotations[b]);
    Partition merged = merge_annotations(rest, MergeOptions{strict_majority(rest.size()), opts});
    double score = adjusted_mutual_information(to_partition(annotations[a]), merged);
    std::string id = annotations[a].annotator_id.empty() ? "annotator_" + std::to_string(a + 1)
                                                        : annotations[a].annotator_id;
    report.per_annotator.emplace_back(std::move(id), score);
    sum += score;
  }
  report.average = sum / static_cast<double>(annotations.size());
  return report;
}

}  // namespace groupline
