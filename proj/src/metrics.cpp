#include "noiseval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>

#include "noiseval/errors.hpp"
#include "noiseval/noise_en.hpp"
#include "noiseval/unicode.hpp"

namespace noiseval {

double accuracy(std::size_t t, std::size_t f) {
  if (t + f == 0) {
    throw UndefinedMetricError("accuracy undefined: no judged instances");
  }
  return static_cast<double>(t) / static_cast<double>(t + f);
}

double fluctuation(double clean, double noised) { return noised - clean; }

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (std::size_t n = 0; n < 4; ++n) {
    matched[n] += other.matched[n];
    total[n] += other.total[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

namespace {

constexpr double kPrecisionFloor = 1e-9;

using NgramCounts = std::unordered_map<std::string, std::uint64_t>;

NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (k > 0) key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::uint64_t closest_ref_length(std::uint64_t hyp_len,
                                 std::span<const std::size_t> ref_lens) {
  std::uint64_t best = ref_lens.empty() ? 0 : ref_lens[0];
  for (std::size_t len : ref_lens) {
    const auto cur = static_cast<std::uint64_t>(len);
    const auto d_cur = cur > hyp_len ? cur - hyp_len : hyp_len - cur;
    const auto d_best = best > hyp_len ? best - hyp_len : hyp_len - best;
    if (d_cur < d_best || (d_cur == d_best && cur < best)) best = cur;
  }
  return best;
}

}  // namespace

BleuStats bleu_stats(std::string_view hypothesis,
                     std::span<const std::string> references) {
  if (references.empty()) {
    throw ValidationError("BLEU needs at least one reference");
  }
  const std::vector<std::string> hyp_tokens = tokenize_whitespace(hypothesis);

  std::vector<std::vector<std::string>> ref_tokens;
  std::vector<std::size_t> ref_lens;
  ref_tokens.reserve(references.size());
  for (const std::string& ref : references) {
    ref_tokens.push_back(tokenize_whitespace(ref));
    ref_lens.push_back(ref_tokens.back().size());
  }

  BleuStats stats;
  stats.hyp_len = hyp_tokens.size();
  stats.ref_len = closest_ref_length(stats.hyp_len, ref_lens);

  for (std::size_t n = 1; n <= 4; ++n) {
    const NgramCounts hyp_counts = ngram_counts(hyp_tokens, n);

    NgramCounts max_ref_counts;
    for (const auto& tokens : ref_tokens) {
      for (const auto& [gram, count] : ngram_counts(tokens, n)) {
        auto& best = max_ref_counts[gram];
        best = std::max(best, count);
      }
    }

    std::uint64_t matched = 0;
    std::uint64_t total = 0;
    for (const auto& [gram, count] : hyp_counts) {
      total += count;
      auto it = max_ref_counts.find(gram);
      if (it != max_ref_counts.end()) {
        matched += std::min(count, it->second);
      }
    }
    stats.matched[n - 1] = matched;
    stats.total[n - 1] = total;
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    const double denom =
        stats.total[n] > 0 ? static_cast<double>(stats.total[n]) : 1.0;
    const double numer = stats.matched[n] > 0
                             ? static_cast<double>(stats.matched[n])
                             : kPrecisionFloor;
    log_sum += 0.25 * std::log(numer / denom);
  }
  double bp = 1.0;
  if (stats.hyp_len == 0) return 0.0;
  if (stats.hyp_len <= stats.ref_len) {
    bp = std::exp(1.0 - static_cast<double>(stats.ref_len) /
                            static_cast<double>(stats.hyp_len));
  }
  return bp * std::exp(log_sum);
}

BleuResult bleu4(std::string_view hypothesis,
                 std::span<const std::string> references) {
  BleuResult result;
  if (tokenize_whitespace(hypothesis).empty()) {
    result.degenerate = true;
    result.score = 0.0;
    return result;
  }
  result.score = bleu_from_stats(bleu_stats(hypothesis, references));
  return result;
}

BleuResult corpus_bleu4(std::span<const BleuPair> pairs) {
  std::vector<BleuStats> per_pair(pairs.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pairs.size());
       ++i) {
    const BleuPair& pair = pairs[static_cast<std::size_t>(i)];
    per_pair[static_cast<std::size_t>(i)] =
        bleu_stats(pair.hypothesis, pair.references);
  }
  BleuStats pooled;
  for (const BleuStats& stats : per_pair) pooled += stats;
  BleuResult result;
  result.degenerate = pooled.hyp_len == 0;
  result.score = bleu_from_stats(pooled);
  return result;
}

BleuResult corpus_bleu4_serial(std::span<const BleuPair> pairs) {
  BleuStats pooled;
  for (const BleuPair& pair : pairs) {
    pooled += bleu_stats(pair.hypothesis, pair.references);
  }
  BleuResult result;
  result.degenerate = pooled.hyp_len == 0;
  result.score = bleu_from_stats(pooled);
  return result;
}

double exam_score(std::span<const ScoredAnswer> answers) {
  double score = 0.0;
  for (const ScoredAnswer& answer : answers) {
    if (!answer.extracted.empty() && answer.extracted == answer.gold) {
      score += answer.points;
    }
  }
  return score;
}

std::map<std::size_t, BinRate> length_binned_miscorrection(
    std::span<const LengthJudgment> judged, std::size_t bin_width) {
  if (bin_width == 0) {
    throw ValidationError("bin width must be positive");
  }
  std::map<std::size_t, BinRate> bins;
  for (const LengthJudgment& j : judged) {
    BinRate& bin = bins[(j.source_length / bin_width) * bin_width];
    if (j.correct) {
      ++bin.t;
    } else {
      ++bin.f;
    }
  }
  for (auto& [start, bin] : bins) {
    bin.rate = static_cast<double>(bin.f) / static_cast<double>(bin.t + bin.f);
  }
  return bins;
}

std::string_view to_string(CorrectionCategory category) {
  switch (category) {
    case CorrectionCategory::All: return "All";
    case CorrectionCategory::Over: return "Over";
    case CorrectionCategory::Miss: return "Miss";
  }
  return "Miss";
}

CorrectionCategory categorize(std::string_view /*source*/,
                              std::string_view model_output,
                              std::string_view gold, bool human_correct) {
  if (!human_correct) return CorrectionCategory::Miss;
  return model_output == gold ? CorrectionCategory::All
                              : CorrectionCategory::Over;
}

std::string build_judge_prompt(std::string_view source,
                               std::string_view model_output,
                               std::string_view gold) {
  if (source.empty() || model_output.empty() || gold.empty()) {
    throw ValidationError("judge prompt needs non-empty source, output, gold");
  }
  std::string prompt;
  prompt +=
      "判断下面两个修改结果是否表达相同的意思。只回答\"是\"或\"否\"。\n";
  prompt += "原句：";
  prompt += source;
  prompt += "\n修改结果A：";
  prompt += model_output;
  prompt += "\n修改结果B：";
  prompt += gold;
  prompt += "\n如果A和B表达的意思相同，回答\"是\"；否则回答\"否\"。";
  return prompt;
}

JudgeLabel parse_judge(std::string_view response) {
  // First-token polarity. Skip leading whitespace and quote marks.
  std::size_t i = 0;
  while (i < response.size()) {
    const unsigned char c = static_cast<unsigned char>(response[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '"' ||
        c == '\'') {
      ++i;
      continue;
    }
    // UTF-8 quotes and fullwidth space.
    if (response.substr(i).starts_with("“") ||
        response.substr(i).starts_with("”") ||
        response.substr(i).starts_with("　")) {
      i += 3;
      continue;
    }
    break;
  }
  const std::string_view rest = response.substr(i);

  static constexpr std::string_view kAffirmative[] = {
      "是", "相同", "意思相同", "对", "正确", "yes", "Yes", "YES", "same",
      "Same", "true", "True"};
  static constexpr std::string_view kNegative[] = {
      "否", "不", "不同", "不相同", "错", "no", "No", "NO", "different",
      "Different", "false", "False"};

  for (std::string_view neg : kNegative) {
    if (rest.starts_with(neg)) return JudgeLabel::F;
  }
  for (std::string_view aff : kAffirmative) {
    if (rest.starts_with(aff)) return JudgeLabel::T;
  }
  return JudgeLabel::Unparseable;
}

}  // namespace noiseval
