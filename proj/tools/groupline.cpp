// groupline command-line interface.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "groupline/groupline.hpp"
#include "groupline/service.hpp"

namespace fs = std::filesystem;
using namespace groupline;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

/// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

Timeline load_timeline(const std::string& path, const std::string& id, Split split) {
  auto in = open_in(path);
  std::string tid = id.empty() ? fs::path(path).stem().string() : id;
  try {
    return parse_timeline(in, {tid, tid, split});
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<AnnotationSet> load_annotations(const std::vector<std::string>& paths, const Timeline& t) {
  std::vector<AnnotationSet> out;
  for (const auto& p : paths) {
    auto in = open_in(p);
    try {
      out.push_back(parse_annotation_set(in, t, fs::path(p).stem().string()));
    } catch (const Error& e) {
      throw Error(p + ": " + e.what());
    }
  }
  return out;
}

std::vector<LabeledPair> load_pairs(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_hlgd(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Options shared by `eval` and `audit`.
struct ScorerArgs {
  std::string scorer = "levenshtein";
  std::string model;
  std::string lm;
  std::string lm_cmd;
  std::string preset;
  std::optional<double> lambda;
  std::optional<double> threshold;
  bool symmetric = false;
  double alpha = 0.9;
};

void add_scorer_options(CLI::App* cmd, ScorerArgs& a) {
  cmd->add_option("--scorer", a.scorer, "levenshtein | time | swap | swap-time")
      ->check(CLI::IsMember({"levenshtein", "time", "swap", "swap-time"}));
  cmd->add_option("--model", a.model, "time-logistic model file (time scorer; fitted on train when absent)");
  cmd->add_option("--lm", a.lm, "n-gram model file from train-lm (swap scorers)");
  cmd->add_option("--lm-cmd", a.lm_cmd, "external conditional LM command (swap scorers)");
  cmd->add_option("--alpha", a.alpha, "content weight when training an n-gram model on the fly")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--preset", a.preset, "named operating point: zero-shot, zero-shot-time, swap, swap-time, or a JSON file");
  cmd->add_option("--lambda", a.lambda, "time-decay constant")->check(CLI::NonNegativeNumber);
  cmd->add_option("--threshold", a.threshold, "decision threshold (tuned on train when absent)");
  cmd->add_flag("--symmetric", a.symmetric, "average both argument orders");
}

struct BuiltScorer {
  ScorerPtr scorer;
  std::optional<double> threshold;  // fixed by preset, flag or model
};

BuiltScorer build_scorer(const ScorerArgs& a, const std::vector<LabeledPair>& pairs) {
  BuiltScorer out;
  std::optional<double> lambda = a.lambda;
  if (!a.preset.empty()) {
    Preset p = fs::exists(a.preset) ? preset_from_json(nlohmann::json::parse(open_in(a.preset)))
                                    : find_preset(a.preset);
    if (!lambda) lambda = p.lambda;
    out.threshold = p.threshold;
  }
  if (a.threshold) out.threshold = a.threshold;

  const auto train = filter_cut(pairs, Split::train);
  if (a.scorer == "levenshtein") {
    out.scorer = std::make_shared<LevenshteinScorer>();
  } else if (a.scorer == "time") {
    TimeLogistic m;
    if (!a.model.empty()) {
      m = time_logistic_from_json(nlohmann::json::parse(open_in(a.model)));
    } else {
      if (train.empty()) throw ConfigError("time scorer needs --model or train pairs to fit on");
      m = fit_time_logistic(train);
    }
    out.scorer = std::make_shared<TimeLogisticScorer>(m);
    if (!out.threshold && !lambda) out.threshold = m.decision_threshold;
  } else {
    std::shared_ptr<const ConditionalLM> lm;
    if (!a.lm_cmd.empty()) {
      lm = std::make_shared<ExternalLM>(a.lm_cmd);
    } else if (!a.lm.empty()) {
      lm = std::make_shared<NgramLM>(NgramLM::from_json(nlohmann::json::parse(open_in(a.lm))));
    } else {
      if (train.empty()) throw ConfigError("swap scorer needs --lm, --lm-cmd or train pairs to fit on");
      lm = std::make_shared<NgramLM>(train_ngram_backend(training_articles(train), {a.alpha}));
    }
    out.scorer = std::make_shared<SwapScorer>(lm);
    if (a.scorer == "swap-time" && !lambda) lambda = find_preset("swap-time").lambda;
  }
  if (lambda) out.scorer = time_decay(out.scorer, *lambda);
  if (a.symmetric) out.scorer = symmetrize(out.scorer);
  return out;
}

double resolve_threshold(const BuiltScorer& b, const std::vector<LabeledPair>& pairs) {
  if (b.threshold) return *b.threshold;
  auto train = filter_cut(pairs, Split::train);
  if (train.empty()) throw ConfigError("no train pairs to tune a threshold on; pass --threshold or --preset");
  return tune_scorer_threshold(*b.scorer, train);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"groupline: headline grouping datasets, baselines and audits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "groupline 0.1.0");

  // merge / iaa
  std::string timeline_path, timeline_id, split_name = "train", out_path;
  std::vector<std::string> annotation_paths;
  int majority = 0;
  double resolution = 1.0;
  std::uint64_t seed = 0;

  auto add_timeline_opts = [&](CLI::App* c) {
    c->add_option("--timeline", timeline_path, "timeline JSONL")->required()->check(CLI::ExistingFile);
    c->add_option("--timeline-id", timeline_id, "timeline id (default: file stem)");
    c->add_option("--split", split_name, "train | dev | test");
  };
  auto add_louvain_opts = [&](CLI::App* c) {
    c->add_option("--resolution", resolution, "modularity resolution")->check(CLI::PositiveNumber);
    c->add_option("--seed", seed, "node visiting order seed (0 = ascending ids)");
  };

  auto* merge = app.add_subcommand("merge", "merge annotation sets into global groups (CSV)");
  add_timeline_opts(merge);
  merge->add_option("--annotations", annotation_paths, "annotation CSVs")->required()->check(CLI::ExistingFile);
  merge->add_option("--majority", majority, "co-group votes needed for an edge (default: strict majority)")
      ->check(CLI::PositiveNumber);
  add_louvain_opts(merge);
  merge->add_option("--out,-o", out_path, "output CSV (default stdout)");

  auto* iaa = app.add_subcommand("iaa", "leave-one-out inter-annotator agreement (AMI)");
  add_timeline_opts(iaa);
  iaa->add_option("--annotations", annotation_paths, "annotation CSVs (3 or more)")
      ->required()
      ->check(CLI::ExistingFile);
  add_louvain_opts(iaa);
  iaa->add_option("--out,-o", out_path, "output JSON (default stdout)");

  // pairs
  std::vector<std::string> pair_timelines, pair_groups, pair_splits;
  int window = 4;
  bool positives_window = false;
  std::string stats_path;
  auto* pairs_cmd = app.add_subcommand("pairs", "build the labeled pair dataset (HLGD JSON)");
  pairs_cmd->add_option("--timeline", pair_timelines, "timeline JSONL (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  pairs_cmd->add_option("--groups", pair_groups, "global groups CSV, one per --timeline")
      ->required()
      ->check(CLI::ExistingFile);
  pairs_cmd->add_option("--split", pair_splits, "split per --timeline (default train)");
  pairs_cmd->add_option("--window", window, "negative pair day window")->check(CLI::NonNegativeNumber);
  pairs_cmd->add_flag("--window-positives", positives_window, "apply the window to positive pairs too");
  pairs_cmd->add_option("--out,-o", out_path, "output HLGD JSON (default stdout)");
  pairs_cmd->add_option("--stats", stats_path, "write corpus statistics JSON here");

  // fit-time / train-lm
  std::string pairs_path;
  double alpha = 0.9;
  auto* fit = app.add_subcommand("fit-time", "fit the time-only logistic baseline on the train cut");
  fit->add_option("--pairs", pairs_path, "HLGD JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--out,-o", out_path, "model JSON (default stdout)");

  auto* train_lm = app.add_subcommand("train-lm", "train the n-gram conditional LM on train-cut headlines");
  train_lm->add_option("--pairs", pairs_path, "HLGD JSON")->required()->check(CLI::ExistingFile);
  train_lm->add_option("--alpha", alpha, "content weight")->check(CLI::Range(0.0, 1.0));
  train_lm->add_option("--out,-o", out_path, "model JSON (default stdout)");

  // eval / audit
  ScorerArgs sargs;
  int tier = 3;
  std::string format = "table";
  auto* eval = app.add_subcommand("eval", "evaluate a scorer per cut and timeline");
  eval->add_option("--pairs", pairs_path, "HLGD JSON")->required()->check(CLI::ExistingFile);
  add_scorer_options(eval, sargs);
  eval->add_option("--tier", tier, "challenge tier: highest data tier the scorer may use")->check(CLI::Range(1, 3));
  eval->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));
  eval->add_option("--out,-o", out_path, "output (default stdout)");

  std::string audit_cut = "dev", triangles_csv;
  auto* audit = app.add_subcommand("audit", "commutative and transitive consistency audits");
  audit->add_option("--pairs", pairs_path, "HLGD JSON")->required()->check(CLI::ExistingFile);
  add_scorer_options(audit, sargs);
  audit->add_option("--cut", audit_cut, "cut to audit: train | dev | test | all");
  audit->add_option("--window", window, "triplet day window")->check(CLI::NonNegativeNumber);
  audit->add_option("--triangles-csv", triangles_csv, "dump every 110 triangle here");
  audit->add_option("--out,-o", out_path, "output JSON (default stdout)");

  // human
  std::vector<std::string> human_timelines, human_groups, human_extra;
  auto* human = app.add_subcommand("human", "score a sixth annotation against the global groups");
  human->add_option("--timeline", human_timelines, "timeline JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  human->add_option("--groups", human_groups, "global groups CSV, one per --timeline")->required()->check(CLI::ExistingFile);
  human->add_option("--extra", human_extra, "extra annotation CSV, one per --timeline")->required()->check(CLI::ExistingFile);
  human->add_option("--split", pair_splits, "split per --timeline (default train)");
  human->add_option("--window", window, "negative pair day window")->check(CLI::NonNegativeNumber);
  human->add_option("--format", format, "table | json")->check(CLI::IsMember({"table", "json"}));
  human->add_option("--out,-o", out_path, "output (default stdout)");

  // serve
  int port = 8080;
  std::string host = "127.0.0.1", data_dir;
  auto* serve = app.add_subcommand("serve", "run the annotation session service");
  serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "listen address");
  serve->add_option("--data-dir", data_dir, "persistence root (default $GROUPLINE_DATA_DIR or ./groupline-data)");

  CLI11_PARSE(app, argc, argv);

  auto split_at = [&](std::size_t i) {
    return i < pair_splits.size() ? parse_split(pair_splits[i]) : Split::train;
  };

  try {
    if (*merge || *iaa) {
      Timeline t = load_timeline(timeline_path, timeline_id, parse_split(split_name));
      auto sets = load_annotations(annotation_paths, t);
      LouvainOptions lo{resolution, seed};
      if (*merge) {
        Partition p = merge_annotations(sets, MergeOptions{majority, lo});
        std::ostringstream out;
        write_partition(out, p, t);
        emit(out_path, out.str());
      } else {
        auto r = leave_one_out_agreement(sets, lo);
        nlohmann::ordered_json j;
        j["timeline_id"] = t.timeline_id;
        j["per_annotator"] = nlohmann::ordered_json::object();
        for (const auto& [id, s] : r.per_annotator) j["per_annotator"][id] = s;
        j["average"] = r.average;
        emit(out_path, dump(j));
      }
    } else if (*pairs_cmd) {
      if (pair_groups.size() != pair_timelines.size()) throw ConfigError("need one --groups per --timeline");
      if (pair_splits.size() > pair_timelines.size()) throw ConfigError("more --split values than timelines");
      std::vector<LabeledPair> all;
      for (std::size_t i = 0; i < pair_timelines.size(); ++i) {
        Timeline t = load_timeline(pair_timelines[i], "", split_at(i));
        auto gin = open_in(pair_groups[i]);
        Partition g = read_partition(gin, t);
        auto ps = generate_labeled_pairs(t, g, PairBuildConfig{window, !positives_window});
        all.insert(all.end(), ps.begin(), ps.end());
      }
      std::ostringstream out;
      write_hlgd(out, all);
      emit(out_path, out.str());
      if (!stats_path.empty()) emit(stats_path, dump(to_json(corpus_stats(all))));
    } else if (*fit) {
      auto train = filter_cut(load_pairs(pairs_path), Split::train);
      emit(out_path, dump(to_json(fit_time_logistic(train))));
    } else if (*train_lm) {
      auto train = filter_cut(load_pairs(pairs_path), Split::train);
      if (train.empty()) throw ConfigError("no train pairs in '" + pairs_path + "'");
      emit(out_path, dump(train_ngram_backend(training_articles(train), {alpha}).to_json()));
    } else if (*eval) {
      auto pairs = load_pairs(pairs_path);
      auto built = build_scorer(sargs, pairs);
      if (built.scorer->tier() > tier_from_number(tier))
        throw TierError("scorer '" + built.scorer->name() + "' needs tier " +
                        std::to_string(tier_number(built.scorer->tier())) + " but --tier is " + std::to_string(tier));
      double t = resolve_threshold(built, pairs);
      auto report = evaluate_scorer(*built.scorer, pairs, t, tier_from_number(tier));
      emit(out_path, format == "json" ? dump(to_json(report)) : to_table({report}));
    } else if (*audit) {
      auto pairs = load_pairs(pairs_path);
      auto built = build_scorer(sargs, pairs);
      double t = resolve_threshold(built, pairs);
      auto subset = audit_cut == "all" ? pairs : filter_cut(pairs, parse_split(audit_cut));
      auto comm = commutative_audit(*built.scorer, subset, t);
      TransitiveReport trans;
      for (const auto& tl : timelines_from_pairs(subset))
        trans += transitive_audit(*built.scorer, tl, t, window, !triangles_csv.empty());
      nlohmann::ordered_json j;
      j["scorer"] = built.scorer->name();
      j["threshold"] = threshold_to_json(t);
      j["cut"] = audit_cut;
      j["commutative"] = to_json(comm);
      j["transitive"] = to_json(trans);
      emit(out_path, dump(j));
      if (!triangles_csv.empty()) {
        std::ostringstream csv;
        write_triangles_csv(csv, trans.inconsistent);
        emit(triangles_csv, csv.str());
      }
    } else if (*human) {
      if (human_groups.size() != human_timelines.size() || human_extra.size() != human_timelines.size())
        throw ConfigError("need one --groups and one --extra per --timeline");
      std::vector<EvalReport> reports;
      for (std::size_t i = 0; i < human_timelines.size(); ++i) {
        Timeline t = load_timeline(human_timelines[i], "", split_at(i));
        auto gin = open_in(human_groups[i]);
        Partition g = read_partition(gin, t);
        auto extra = load_annotations({human_extra[i]}, t).front();
        reports.push_back(human_performance(extra, g, t, PairBuildConfig{window, true}));
      }
      auto combined = combine_reports(reports);
      combined.scorer = "human";
      emit(out_path, format == "json" ? dump(to_json(combined)) : to_table({combined}));
    } else if (*serve) {
      if (data_dir.empty()) {
        const char* env = std::getenv("GROUPLINE_DATA_DIR");
        data_dir = env && *env ? env : "groupline-data";
      }
      SessionStore store(data_dir);
      httplib::Server server;
      install_session_routes(server, store);
      int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
      if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
      std::cerr << "groupline: serving " << fs::absolute(data_dir).string() << " on http://" << host << ":" << bound
                << std::endl;
      server.listen_after_bind();
    }
  } catch (const std::exception& e) {
    std::cerr << "groupline: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
