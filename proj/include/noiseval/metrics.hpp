#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noiseval {

// t / (t + f). Throws UndefinedMetricError when t + f = 0.
double accuracy(std::size_t t, std::size_t f);

// Signed change against the clean baseline: noised - clean.
// Negative means degradation; reports render the sign as an arrow.
double fluctuation(double clean, double noised);

struct BleuResult {
  double score = 0.0;
  bool degenerate = false;  // empty hypothesis
};

// Sufficient statistics for BLEU-4: clipped and total n-gram counts for
// n = 1..4, hypothesis length, and the closest reference length.
struct BleuStats {
  std::array<std::uint64_t, 4> matched{};
  std::array<std::uint64_t, 4> total{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
};

BleuStats bleu_stats(std::string_view hypothesis,
                     std::span<const std::string> references);
double bleu_from_stats(const BleuStats& stats);

// Sentence-level BLEU-4: geometric mean of clipped n-gram precisions with
// uniform 1/4 weights, zero precisions floored at 1e-9, brevity penalty
// exp(1 - r/c) for c <= r with r the reference length closest to c (ties
// toward the shorter reference).
BleuResult bleu4(std::string_view hypothesis,
                 std::span<const std::string> references);

// Corpus-level BLEU-4 over pooled n-gram counts.
struct BleuPair {
  std::string hypothesis;
  std::vector<std::string> references;
};
BleuResult corpus_bleu4(std::span<const BleuPair> pairs);
BleuResult corpus_bleu4_serial(std::span<const BleuPair> pairs);

// One scored exam answer: points awarded when `extracted` equals `gold`.
struct ScoredAnswer {
  std::string extracted;  // empty = unparseable, never matches
  std::string gold;
  double points = 0.0;
};
double exam_score(std::span<const ScoredAnswer> answers);

struct LengthJudgment {
  std::size_t source_length = 0;  // codepoints
  bool correct = false;
};
struct BinRate {
  std::size_t t = 0;
  std::size_t f = 0;
  double rate = 0.0;  // f / (t + f)
};
// Buckets judged items by source length into [0,w), [w,2w), ...; keys are
// bucket lower bounds; empty buckets are omitted. Throws on w = 0.
std::map<std::size_t, BinRate> length_binned_miscorrection(
    std::span<const LengthJudgment> judged, std::size_t bin_width);

enum class CorrectionCategory { All, Over, Miss };
std::string_view to_string(CorrectionCategory category);

// All:  judged correct and output matches the gold exactly.
// Over: judged correct but the wording diverged from the gold.
// Miss: judged incorrect.
CorrectionCategory categorize(std::string_view source,
                              std::string_view model_output,
                              std::string_view gold, bool human_correct);

// Model-as-judge protocol. The prompt is always issued, even when output
// and gold are identical; judge and human labels are kept side by side and
// never merged.
std::string build_judge_prompt(std::string_view source,
                               std::string_view model_output,
                               std::string_view gold);

enum class JudgeLabel { T, F, Unparseable };
JudgeLabel parse_judge(std::string_view response);

struct CorrectionJudgment {
  std::string item_id;
  std::optional<bool> human_label;  // true = T
  std::optional<bool> judge_label;
  std::optional<CorrectionCategory> category;
};

}  // namespace noiseval
