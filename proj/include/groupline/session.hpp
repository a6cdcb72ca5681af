#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupline/corpus.hpp"

namespace groupline {

/// Session API failure carrying the HTTP status it maps to.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// "new" or an existing group number.
using GroupChoice = std::variant<std::monostate, long>;
inline constexpr GroupChoice kNewGroup{};

/// One annotator stepping through one timeline in chronological order.
/// Group numbers start at 1; the assignment covers exactly the headlines before the cursor.
class AnnotationSession {
 public:
  AnnotationSession(std::string id, std::string annotator_id, const Timeline* timeline, std::string created)
      : id_(std::move(id)), annotator_(std::move(annotator_id)), timeline_(timeline), created_(created),
        updated_(std::move(created)) {}

  const std::string& id() const { return id_; }
  const std::string& annotator_id() const { return annotator_; }
  const std::string& timeline_id() const { return timeline_->timeline_id; }
  const Timeline& timeline() const { return *timeline_; }
  std::size_t cursor() const { return assigned_.size(); }
  bool done() const { return cursor() == timeline_->size(); }
  const std::string& created() const { return created_; }
  const std::string& updated() const { return updated_; }
  const std::vector<long>& assigned() const { return assigned_; }

  long next_group_number() const {
    long m = 0;
    for (long g : assigned_) m = std::max(m, g);
    return m + 1;
  }

  /// Resolves the choice to a concrete group number and applies it.
  long assign(const GroupChoice& choice, std::string when) {
    if (done()) throw ServiceError(409, "timeline already fully annotated");
    long g;
    if (std::holds_alternative<std::monostate>(choice)) {
      g = next_group_number();
    } else {
      g = std::get<long>(choice);
      if (std::find(assigned_.begin(), assigned_.end(), g) == assigned_.end())
        throw ServiceError(400, "group " + std::to_string(g) + " does not exist");
    }
    assigned_.push_back(g);
    updated_ = std::move(when);
    return g;
  }

  void undo(std::string when) {
    if (assigned_.empty()) throw ServiceError(409, "nothing to undo");
    assigned_.pop_back();
    updated_ = std::move(when);
  }

  AnnotationSet export_set() const {
    AnnotationSet set{annotator_, timeline_id(), {}};
    for (std::size_t i = 0; i < assigned_.size(); ++i) set.assignment[timeline_->headlines[i].id] = assigned_[i];
    return set;
  }

  std::string export_csv() const {
    std::ostringstream out;
    write_annotation_set(out, export_set(), *timeline_);
    return out.str();
  }

  /// Current headline plus existing groups, most recently used first, each with up to
  /// three most recent member headlines.
  nlohmann::ordered_json next_view() const {
    nlohmann::ordered_json j = summary();
    auto headline_json = [](const Headline& h) {
      return nlohmann::ordered_json{{"id", h.id}, {"text", h.text}, {"date", h.publish_date.str()}, {"source", h.source}};
    };
    j["headline"] = done() ? nlohmann::ordered_json(nullptr) : headline_json(timeline_->headlines[cursor()]);
    std::map<long, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < assigned_.size(); ++i) members[assigned_[i]].push_back(i);
    std::vector<std::pair<long, std::vector<std::size_t>>> order(members.begin(), members.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second.back() > b.second.back(); });
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& [g, idx] : order) {
      nlohmann::ordered_json reps = nlohmann::ordered_json::array();
      for (auto it = idx.rbegin(); it != idx.rend() && reps.size() < 3; ++it)
        reps.push_back(headline_json(timeline_->headlines[*it]));
      groups.push_back({{"group_number", g},
                        {"size", idx.size()},
                        {"last_date", timeline_->headlines[idx.back()].publish_date.str()},
                        {"representatives", reps}});
    }
    j["groups"] = groups;
    return j;
  }

  nlohmann::ordered_json summary() const {
    nlohmann::ordered_json j;
    j["session_id"] = id_;
    j["annotator_id"] = annotator_;
    j["timeline_id"] = timeline_id();
    j["cursor"] = cursor();
    j["total"] = timeline_->size();
    j["done"] = done();
    j["created"] = created_;
    j["updated"] = updated_;
    return j;
  }

 private:
  std::string id_;
  std::string annotator_;
  const Timeline* timeline_;
  std::string created_;
  std::string updated_;
  std::vector<long> assigned_;
};

/// Sessions persisted as append-only JSON event logs under `<root>/sessions`,
/// replayed on construction. Timelines load from `<root>/timelines/*.jsonl`.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root) : root_(std::move(root)) {
    namespace fs = std::filesystem;
    fs::create_directories(root_ / "sessions");
    if (fs::is_directory(root_ / "timelines")) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(root_ / "timelines"))
        if (e.path().extension() == ".jsonl") files.push_back(e.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        std::ifstream in(f);
        add_timeline(parse_timeline(in, {f.stem().string(), f.stem().string(), Split::train}));
      }
    }
    std::vector<fs::path> logs;
    for (const auto& e : fs::directory_iterator(root_ / "sessions"))
      if (e.path().extension() == ".jsonl") logs.push_back(e.path());
    std::sort(logs.begin(), logs.end());
    for (const auto& f : logs) replay(f);
  }

  void add_timeline(Timeline t) {
    std::lock_guard lock(mu_);
    auto id = t.timeline_id;
    if (timelines_.count(id)) throw ConfigError("timeline '" + id + "' already loaded");
    timelines_[id] = std::make_unique<Timeline>(std::move(t));
  }

  nlohmann::ordered_json list_timelines() const {
    std::lock_guard lock(mu_);
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& [id, t] : timelines_)
      out.push_back({{"timeline_id", id}, {"name", t->name}, {"size", t->size()}});
    return out;
  }

  std::string create_session(const std::string& annotator_id, const std::string& timeline_id) {
    if (annotator_id.empty()) throw ServiceError(400, "annotator_id required");
    std::lock_guard lock(mu_);
    auto t = timelines_.find(timeline_id);
    if (t == timelines_.end()) throw ServiceError(404, "unknown timeline '" + timeline_id + "'");
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06zu", ++counter_);
    std::string id = buf;
    auto when = utc_timestamp();
    auto entry = std::make_unique<Entry>(AnnotationSession(id, annotator_id, t->second.get(), when));
    append(id, {{"type", "create"}, {"annotator_id", annotator_id}, {"timeline_id", timeline_id}, {"ts", when}});
    sessions_[id] = std::move(entry);
    return id;
  }

  nlohmann::ordered_json next(const std::string& id) const {
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    return e.session.next_view();
  }

  nlohmann::ordered_json assign(const std::string& id, const GroupChoice& choice) {
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    auto when = utc_timestamp();
    long g = e.session.assign(choice, when);
    const bool fresh = std::holds_alternative<std::monostate>(choice);
    append(id, {{"type", "assign"}, {"group", g}, {"new", fresh}, {"ts", when}});
    auto j = e.session.next_view();
    j["assigned_group"] = g;
    return j;
  }

  nlohmann::ordered_json undo(const std::string& id) {
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    auto when = utc_timestamp();
    e.session.undo(when);
    append(id, {{"type", "undo"}, {"ts", when}});
    return e.session.next_view();
  }

  std::string export_csv(const std::string& id) const {
    auto& e = entry(id);
    std::lock_guard lock(e.mu);
    return e.session.export_csv();
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  struct Entry {
    explicit Entry(AnnotationSession s) : session(std::move(s)) {}
    AnnotationSession session;
    mutable std::mutex mu;
  };

  Entry& entry(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
    return *it->second;
  }

  void append(const std::string& id, const nlohmann::ordered_json& event) const {
    std::ofstream out(root_ / "sessions" / (id + ".jsonl"), std::ios::app);
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw ServiceError(500, "cannot persist session '" + id + "'");
  }

  void replay(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    std::string id = file.stem().string();
    std::unique_ptr<Entry> e;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      auto ev = nlohmann::json::parse(line, nullptr, false);
      if (ev.is_discarded()) throw ParseError("corrupt session log " + file.string(), lineno);
      auto type = ev.value("type", "");
      auto ts = ev.value("ts", "");
      if (type == "create") {
        auto t = timelines_.find(ev.value("timeline_id", ""));
        if (t == timelines_.end()) return;  // timeline no longer served
        e = std::make_unique<Entry>(AnnotationSession(id, ev.value("annotator_id", ""), t->second.get(), ts));
      } else if (!e) {
        throw ParseError("session log " + file.string() + " does not start with a create event", lineno);
      } else if (type == "assign") {
        GroupChoice c = ev.value("new", false) ? kNewGroup : GroupChoice{ev.at("group").get<long>()};
        e->session.assign(c, ts);
      } else if (type == "undo") {
        e->session.undo(ts);
      }
    }
    if (!e) return;
    if (id.size() > 1 && id[0] == 's') counter_ = std::max<std::size_t>(counter_, std::strtoull(id.c_str() + 1, nullptr, 10));
    sessions_[id] = std::move(e);
  }

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Timeline>> timelines_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::size_t counter_ = 0;
};

}  // namespace groupline
