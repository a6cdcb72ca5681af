#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "groupline/corpus.hpp"

namespace groupline {

/// A grouping of a timeline's headlines. Group ids are nominal.
struct Partition {
  std::string timeline_id;
  std::map<std::string, long> groups;

  std::size_t size() const { return groups.size(); }

  long group_of(const std::string& id) const {
    auto it = groups.find(id);
    if (it == groups.end()) throw ConfigError("partition has no headline '" + id + "'");
    return it->second;
  }

  /// Dense labels 0..k-1 numbered by first appearance along `order`.
  std::vector<int> labels(const std::vector<std::string>& order) const {
    std::map<long, int> remap;
    std::vector<int> out;
    out.reserve(order.size());
    for (const auto& id : order) {
      long g = group_of(id);
      auto [it, inserted] = remap.emplace(g, static_cast<int>(remap.size()));
      out.push_back(it->second);
    }
    return out;
  }

  /// Dense labels along ascending headline id.
  std::vector<int> canonical_labels() const {
    std::vector<std::string> order;
    order.reserve(groups.size());
    for (const auto& [id, g] : groups) order.push_back(id);
    return labels(order);
  }

  std::size_t group_count() const {
    std::map<long, int> seen;
    for (const auto& [id, g] : groups) seen[g];
    return seen.size();
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, g] : groups) out.push_back(id);
    return out;
  }
};

inline Partition to_partition(const AnnotationSet& set) {
  return Partition{set.timeline_id, set.assignment};
}

/// Equality up to group-id relabeling over the same headline set.
inline bool relabel_equal(const Partition& p, const Partition& q) {
  if (p.groups.size() != q.groups.size()) return false;
  for (auto a = p.groups.begin(), b = q.groups.begin(); a != p.groups.end(); ++a, ++b)
    if (a->first != b->first) return false;
  return p.canonical_labels() == q.canonical_labels();
}

/// CSV `headline_id,group_id` in timeline order.
inline void write_partition(std::ostream& out, const Partition& p, const Timeline& timeline) {
  out << "headline_id,group_id\n";
  for (const auto& h : timeline.headlines) out << h.id << ',' << p.group_of(h.id) << '\n';
}

inline Partition read_partition(std::istream& in, const Timeline& timeline) {
  AnnotationSet set = parse_annotation_set(in, timeline);
  return to_partition(set);
}

}  // namespace groupline
