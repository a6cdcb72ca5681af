#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "groupline/scorer.hpp"

namespace groupline {

/// Content context is cut to this many tokens.
inline constexpr std::size_t kContextTokens = 512;

/// Lowercased word tokens: maximal runs of ASCII alphanumerics or non-ASCII bytes.
inline std::vector<std::string> tokenize(std::string_view text, std::size_t limit = SIZE_MAX) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  };
  for (char ch : text) {
    if (out.size() >= limit) break;
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c))
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    else
      flush();
  }
  if (out.size() < limit) flush();
  return out;
}

/// Headline likelihood given article content.
class ConditionalLM {
 public:
  virtual ~ConditionalLM() = default;
  /// Mean per-token log-probability of `headline` given `content`; <= 0.
  virtual double cond_logprob(std::string_view headline, std::string_view content) const = 0;
};

struct NgramOptions {
  double alpha = 0.9;  // weight on the content distribution
};

/// Per-article unigram model interpolated with a Laplace-smoothed background
/// unigram model over training headlines:
///   P(w | C) = alpha * relfreq(w, C[:512]) + (1 - alpha) * (count(w) + 1) / (N + V + 1)
/// where V counts distinct training headline tokens plus one unknown slot.
class NgramLM final : public ConditionalLM {
 public:
  NgramLM(double alpha, std::unordered_map<std::string, long> counts)
      : alpha_(alpha), counts_(std::move(counts)) {
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) throw ConfigError("alpha must lie in [0,1]");
    for (const auto& [w, c] : counts_) total_ += c;
  }

  double alpha() const { return alpha_; }
  long total_tokens() const { return total_; }
  std::size_t vocabulary_size() const { return counts_.size(); }

  double background(const std::string& w) const {
    auto it = counts_.find(w);
    double c = it == counts_.end() ? 0.0 : static_cast<double>(it->second);
    return (c + 1.0) / (static_cast<double>(total_) + static_cast<double>(counts_.size()) + 1.0);
  }

  double cond_logprob(std::string_view headline, std::string_view content) const override {
    auto h = tokenize(headline);
    if (h.empty()) throw ConfigError("cannot score an empty headline");
    auto ctx = tokenize(content, kContextTokens);
    std::unordered_map<std::string, long> freq;
    for (const auto& w : ctx) ++freq[w];
    const double len = static_cast<double>(ctx.size());
    double sum = 0.0;
    for (const auto& w : h) {
      double rel = 0.0;
      if (len > 0) {
        auto it = freq.find(w);
        if (it != freq.end()) rel = static_cast<double>(it->second) / len;
      }
      sum += std::log(alpha_ * rel + (1.0 - alpha_) * background(w));
    }
    return sum / static_cast<double>(h.size());
  }

  nlohmann::ordered_json to_json() const {
    std::map<std::string, long> sorted(counts_.begin(), counts_.end());
    nlohmann::ordered_json j;
    j["kind"] = "ngram";
    j["alpha"] = alpha_;
    j["counts"] = sorted;
    return j;
  }

  static NgramLM from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "ngram") throw ParseError("not an n-gram model file");
    return NgramLM(j.at("alpha").get<double>(), j.at("counts").get<std::unordered_map<std::string, long>>());
  }

 private:
  double alpha_;
  std::unordered_map<std::string, long> counts_;
  long total_ = 0;
};

struct Article {
  std::string content;
  std::string headline;
};

/// One article per distinct headline id; missing content becomes empty.
inline std::vector<Article> training_articles(const std::vector<LabeledPair>& pairs) {
  std::map<std::string, Article> seen;
  for (const auto& p : pairs)
    for (const Headline* h : {&p.headline_a, &p.headline_b})
      seen.try_emplace(h->id, Article{h->content.value_or(""), h->text});
  std::vector<Article> out;
  for (auto& [id, a] : seen) out.push_back(std::move(a));
  return out;
}

/// Background counts come from the training headlines.
inline NgramLM train_ngram_backend(const std::vector<Article>& corpus, NgramOptions opts = {}) {
  if (corpus.empty()) throw ConfigError("empty training corpus");
  std::unordered_map<std::string, long> counts;
  for (const auto& a : corpus)
    for (auto& w : tokenize(a.headline)) ++counts[w];
  return NgramLM(opts.alpha, std::move(counts));
}

/// Line-delimited JSON over a child process's stdin/stdout:
/// request {"content": ..., "headline": ...}, response {"logprob_per_token": x}.
class ExternalLM final : public ConditionalLM {
 public:
  explicit ExternalLM(const std::string& command) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) throw Error("pipe() failed");
    pid_ = fork();
    if (pid_ < 0) throw Error("fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    out_ = fdopen(to_child[1], "w");
    in_ = fdopen(from_child[0], "r");
    if (!out_ || !in_) throw Error("fdopen() failed");
    signal(SIGPIPE, SIG_IGN);
  }

  ExternalLM(const ExternalLM&) = delete;
  ExternalLM& operator=(const ExternalLM&) = delete;

  ~ExternalLM() override {
    if (out_) std::fclose(out_);
    if (in_) std::fclose(in_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
  }

  double cond_logprob(std::string_view headline, std::string_view content) const override {
    if (tokenize(headline).empty()) throw ConfigError("cannot score an empty headline");
    nlohmann::json req{{"content", content}, {"headline", headline}};
    std::lock_guard lock(mu_);
    std::string line = req.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), out_) != line.size() || std::fflush(out_) != 0)
      throw Error("external LM: write failed");
    std::string resp;
    for (int c; (c = std::fgetc(in_)) != EOF && c != '\n';) resp.push_back(static_cast<char>(c));
    if (resp.empty()) throw Error("external LM: no response");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(resp);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("external LM: malformed response '" + resp + "'");
    }
    if (!j.contains("logprob_per_token") || !j["logprob_per_token"].is_number())
      throw ParseError("external LM: response lacks 'logprob_per_token'");
    return j["logprob_per_token"].get<double>();
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  FILE* in_ = nullptr;
  mutable std::mutex mu_;
};

/// Likelihood that the two articles' headlines could be swapped:
///   exp(lp(H2 | C1)) + exp(lp(H1 | C2))
inline double swap_score(const ConditionalLM& lm, const Article& a1, const Article& a2) {
  return std::exp(lm.cond_logprob(a2.headline, a1.content)) + std::exp(lm.cond_logprob(a1.headline, a2.content));
}

class SwapScorer final : public PairScorer {
 public:
  explicit SwapScorer(std::shared_ptr<const ConditionalLM> lm) : lm_(std::move(lm)) {
    if (!lm_) throw ConfigError("swap scorer needs a language model");
  }
  std::string name() const override { return "swap"; }
  Tier tier() const override { return Tier::full; }
  bool calibrated() const override { return false; }
  bool symmetric() const override { return true; }
  double score(const PairView& v) const override {
    const auto& h1 = v.headline(Side::first);
    const auto& h2 = v.headline(Side::second);
    if (trim(h1).empty() || trim(h2).empty()) throw ConfigError("swap score: empty headline");
    const double t1 = std::exp(lm_->cond_logprob(h2, v.content(Side::first)));
    const double t2 = std::exp(lm_->cond_logprob(h1, v.content(Side::second)));
    return t1 + t2;
  }

 private:
  std::shared_ptr<const ConditionalLM> lm_;
};

}  // namespace groupline
