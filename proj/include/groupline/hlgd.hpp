#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/corpus.hpp"

namespace groupline {

/// One row of the pair dataset.
struct LabeledPair {
  Headline headline_a;
  Headline headline_b;
  int day_diff = 0;
  int label = 0;
  Split cut = Split::train;
  std::string timeline_id;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

inline LabeledPair make_pair(const Headline& a, const Headline& b, int label, Split cut,
                             const std::string& timeline_id) {
  return LabeledPair{a, b, day_diff(a.publish_date, b.publish_date), label, cut, timeline_id};
}

namespace detail {

inline std::string required_string(const nlohmann::json& j, const char* key, std::size_t index) {
  if (!j.contains(key)) throw SchemaError("entry " + std::to_string(index) + ": missing '" + key + "'");
  if (!j[key].is_string()) throw SchemaError("entry " + std::to_string(index) + ": '" + key + "' is not a string");
  return j[key].get<std::string>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
  return std::nullopt;
}

}  // namespace detail

/// Parses an HLGD JSON array. Headline ids are content-derived.
inline std::vector<LabeledPair> read_hlgd(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed HLGD JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("HLGD file must be a JSON array");
  std::vector<LabeledPair> pairs;
  pairs.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_object()) throw SchemaError("entry " + std::to_string(i) + " is not an object");
    auto side = [&](char s) {
      std::string suffix = std::string("_") + s;
      Headline h;
      h.text = detail::required_string(e, ("headline" + suffix).c_str(), i);
      try {
        h.publish_date = Date::parse(detail::required_string(e, ("day" + suffix).c_str(), i));
      } catch (const ParseError& err) {
        throw SchemaError("entry " + std::to_string(i) + ": " + err.what());
      }
      h.source = detail::optional_string(e, ("source" + suffix).c_str()).value_or("");
      h.authors = detail::optional_string(e, ("authors" + suffix).c_str());
      h.url = detail::optional_string(e, ("url" + suffix).c_str());
      h.content = detail::optional_string(e, ("content" + suffix).c_str());
      h.id = content_id(h.text, h.publish_date);
      return h;
    };
    LabeledPair p;
    p.headline_a = side('a');
    p.headline_b = side('b');
    p.cut = parse_split(detail::required_string(e, "cut", i));
    p.timeline_id = detail::required_string(e, "timeline", i);
    p.headline_a.timeline_id = p.headline_b.timeline_id = p.timeline_id;
    if (!e.contains("label")) throw SchemaError("entry " + std::to_string(i) + ": missing 'label'");
    const auto& lab = e["label"];
    if (!lab.is_number_integer()) throw SchemaError("entry " + std::to_string(i) + ": 'label' is not an integer");
    auto v = lab.get<long long>();
    if (v != 0 && v != 1) throw SchemaError("entry " + std::to_string(i) + ": label outside {0,1}");
    p.label = static_cast<int>(v);
    p.day_diff = day_diff(p.headline_a.publish_date, p.headline_b.publish_date);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

/// Array of objects in published key order, 2-space indent.
inline void write_hlgd(std::ostream& out, const std::vector<LabeledPair>& pairs) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& p : pairs) {
    nlohmann::ordered_json e;
    e["headline_a"] = p.headline_a.text;
    e["headline_b"] = p.headline_b.text;
    e["day_a"] = p.headline_a.publish_date.str();
    e["day_b"] = p.headline_b.publish_date.str();
    e["source_a"] = p.headline_a.source;
    e["source_b"] = p.headline_b.source;
    e["authors_a"] = p.headline_a.authors.value_or("");
    e["authors_b"] = p.headline_b.authors.value_or("");
    e["url_a"] = p.headline_a.url.value_or("");
    e["url_b"] = p.headline_b.url.value_or("");
    e["cut"] = hlgd_cut_name(p.cut);
    e["timeline"] = p.timeline_id;
    e["label"] = p.label;
    if (p.headline_a.content) e["content_a"] = *p.headline_a.content;
    if (p.headline_b.content) e["content_b"] = *p.headline_b.content;
    doc.push_back(std::move(e));
  }
  out << doc.dump(2) << '\n';
}

inline std::vector<LabeledPair> filter_cut(const std::vector<LabeledPair>& pairs, Split cut) {
  std::vector<LabeledPair> out;
  for (const auto& p : pairs)
    if (p.cut == cut) out.push_back(p);
  return out;
}

/// Reconstructs one Timeline per "timeline" value from the headlines its pairs mention.
inline std::vector<Timeline> timelines_from_pairs(const std::vector<LabeledPair>& pairs) {
  struct Acc {
    Split split;
    std::map<std::string, Headline> by_id;
  };
  std::map<std::string, Acc> acc;
  for (const auto& p : pairs) {
    auto [it, inserted] = acc.try_emplace(p.timeline_id, Acc{p.cut, {}});
    it->second.by_id.try_emplace(p.headline_a.id, p.headline_a);
    it->second.by_id.try_emplace(p.headline_b.id, p.headline_b);
  }
  std::vector<Timeline> out;
  for (auto& [name, a] : acc) {
    std::vector<Headline> hs;
    for (auto& [id, h] : a.by_id) hs.push_back(h);
    out.push_back(make_timeline(name, name, a.split, std::move(hs)));
  }
  return out;
}

}  // namespace groupline
