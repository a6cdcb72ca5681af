#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/date.hpp"
#include "groupline/error.hpp"

namespace groupline {

enum class Split { train, dev, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

/// Accepts both the short names and the HLGD cut names.
inline Split parse_split(std::string_view s) {
  if (s == "train" || s == "training") return Split::train;
  if (s == "dev" || s == "validation") return Split::dev;
  if (s == "test" || s == "testing") return Split::test;
  throw SchemaError("unknown cut '" + std::string(s) + "'");
}

/// Name used in the "cut" field of HLGD files.
inline std::string_view hlgd_cut_name(Split s) {
  switch (s) {
    case Split::train: return "training";
    case Split::dev: return "validation";
    case Split::test: return "testing";
  }
  return "training";
}

struct Headline {
  std::string id;
  std::string text;
  Date publish_date;
  std::string source;
  std::optional<std::string> url;
  std::optional<std::string> content;
  std::optional<std::string> authors;  // carried through I/O only
  std::string timeline_id;

  friend bool operator==(const Headline&, const Headline&) = default;
};

inline std::string trim(std::string_view s) {
  auto ws = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  std::size_t b = 0, e = s.size();
  while (b < e && ws(s[b])) ++b;
  while (e > b && ws(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

/// Deterministic id derived from headline text and date (FNV-1a 64).
inline std::string content_id(std::string_view text, const Date& date) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  mix(text);
  mix("\x1f");
  mix(date.str());
  char buf[24];
  std::snprintf(buf, sizeof buf, "h%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Chronological order, ties broken by id.
inline bool chronological(const Headline& a, const Headline& b) {
  if (a.publish_date != b.publish_date) return a.publish_date < b.publish_date;
  return a.id < b.id;
}

struct Timeline {
  std::string timeline_id;
  std::string name;
  std::vector<Headline> headlines;
  Split split = Split::train;

  std::size_t size() const { return headlines.size(); }

  const Headline* find(std::string_view id) const {
    for (const auto& h : headlines)
      if (h.id == id) return &h;
    return nullptr;
  }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(headlines.size());
    for (const auto& h : headlines) out.push_back(h.id);
    return out;
  }
};

/// Builds a Timeline from unordered records: validates, assigns missing ids, sorts.
inline Timeline make_timeline(std::string timeline_id, std::string name, Split split,
                              std::vector<Headline> headlines) {
  std::map<std::string, int> seen_hash;
  std::set<std::string> ids;
  for (auto& h : headlines) {
    h.timeline_id = timeline_id;
    if (trim(h.text).empty()) throw ParseError("empty headline text");
    if (h.id.empty()) {
      std::string base = content_id(h.text, h.publish_date);
      int n = ++seen_hash[base];
      h.id = n == 1 ? base : base + "-" + std::to_string(n);
    }
    if (!ids.insert(h.id).second) throw ParseError("duplicate headline id '" + h.id + "'");
  }
  std::stable_sort(headlines.begin(), headlines.end(), chronological);
  return Timeline{std::move(timeline_id), std::move(name), std::move(headlines), split};
}

struct TimelineInfo {
  std::string timeline_id;
  std::string name;
  Split split = Split::train;
};

/// Line-delimited JSON records {text, date, source?, url?, content?, id?, authors?}.
inline Timeline parse_timeline(std::istream& in, TimelineInfo info) {
  std::vector<Headline> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw ParseError("record is not an object", lineno);
    if (!j.contains("text") || !j["text"].is_string()) throw ParseError("missing 'text'", lineno);
    if (!j.contains("date") || !j["date"].is_string()) throw ParseError("missing 'date'", lineno);
    Headline h;
    h.text = j["text"].get<std::string>();
    if (trim(h.text).empty()) throw ParseError("empty headline text", lineno);
    try {
      h.publish_date = Date::parse(j["date"].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
    auto opt = [&](const char* key) -> std::optional<std::string> {
      if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
      return std::nullopt;
    };
    h.source = opt("source").value_or("");
    h.url = opt("url");
    h.content = opt("content");
    h.authors = opt("authors");
    h.id = opt("id").value_or("");
    records.push_back(std::move(h));
  }
  if (records.empty()) throw ParseError("empty timeline file");
  if (info.name.empty()) info.name = info.timeline_id;
  return make_timeline(std::move(info.timeline_id), std::move(info.name), info.split, std::move(records));
}

inline void write_timeline(std::ostream& out, const Timeline& t) {
  for (const auto& h : t.headlines) {
    nlohmann::ordered_json j;
    j["id"] = h.id;
    j["text"] = h.text;
    j["date"] = h.publish_date.str();
    j["source"] = h.source;
    if (h.url) j["url"] = *h.url;
    if (h.content) j["content"] = *h.content;
    if (h.authors) j["authors"] = *h.authors;
    out << j.dump() << '\n';
  }
}

/// One annotator's headline -> group-number assignment for one timeline.
struct AnnotationSet {
  std::string annotator_id;
  std::string timeline_id;
  std::map<std::string, long> assignment;

  std::size_t size() const { return assignment.size(); }
};

/// CSV `headline_id,group_number`, optionally preceded by `# annotator: <id>`.
/// Every headline of `timeline` must be covered exactly once.
inline AnnotationSet parse_annotation_set(std::istream& in, const Timeline& timeline,
                                          std::string annotator_id = {}) {
  AnnotationSet set{std::move(annotator_id), timeline.timeline_id, {}};
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string_view rest = std::string_view(t).substr(1);
      std::string body = trim(rest);
      constexpr std::string_view key = "annotator:";
      if (body.compare(0, key.size(), key) == 0) set.annotator_id = trim(std::string_view(body).substr(key.size()));
      continue;
    }
    auto comma = t.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'headline_id,group_number'", lineno);
    std::string id = trim(std::string_view(t).substr(0, comma));
    std::string num = trim(std::string_view(t).substr(comma + 1));
    if (!header_seen && id == "headline_id") {
      header_seen = true;
      continue;
    }
    header_seen = true;
    long g = 0;
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), g);
    if (ec != std::errc{} || p != num.data() + num.size() || g < 0)
      throw ParseError("invalid group number '" + num + "'", lineno);
    if (!timeline.find(id)) throw ParseError("unknown headline id '" + id + "'", lineno);
    if (!set.assignment.emplace(id, g).second) throw ParseError("duplicate headline id '" + id + "'", lineno);
  }
  std::vector<std::string> missing;
  for (const auto& h : timeline.headlines)
    if (!set.assignment.count(h.id)) missing.push_back(h.id);
  if (!missing.empty()) {
    std::string msg = "annotation does not cover headline(s):";
    for (const auto& id : missing) msg += " " + id;
    throw ParseError(msg);
  }
  return set;
}

/// Writes rows in timeline order.
inline void write_annotation_set(std::ostream& out, const AnnotationSet& set, const Timeline& timeline) {
  if (!set.annotator_id.empty()) out << "# annotator: " << set.annotator_id << '\n';
  out << "headline_id,group_number\n";
  for (const auto& h : timeline.headlines) {
    auto it = set.assignment.find(h.id);
    if (it != set.assignment.end()) out << h.id << ',' << it->second << '\n';
  }
}

}  // namespace groupline
