#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noiseval/confusion.hpp"
#include "noiseval/edit_record.hpp"
#include "noiseval/rng.hpp"

namespace noiseval {

// Substitution-only noise: a target fraction of Han characters is replaced,
// drawing each replacement kind from `weights` (phonological, visual,
// random). The spec fully determines the perturbation given a seed.
struct ZhNoiseSpec {
  double ratio = 0.0;
  std::array<double, 3> weights{0.6, 0.3, 0.1};
  std::uint64_t seed = 0;

  void validate() const;  // throws ValidationError
};

struct ZhPerturbation {
  std::string text;
  std::vector<EditRecord> edits;  // positions strictly increasing
  std::size_t random_fallbacks = 0;  // edits degraded to random kind
  std::size_t skipped = 0;           // planned edits with no usable candidate
};

// Indices of CJK Unified Ideograph codepoints; everything else (ASCII,
// punctuation, digits, Latin, kana) is never perturbed.
std::vector<std::size_t> eligible_positions(std::u32string_view text);

// floor(n * ratio) plus a Bernoulli draw on the fractional part, so short
// sentences are perturbed at the correct rate in expectation. Products
// within 1e-9 of an integer are treated as exact.
std::size_t plan_edit_count(std::size_t n_eligible, double ratio, Rng& rng);

ZhPerturbation perturb_zh(std::string_view text, const ZhNoiseSpec& spec,
                          const ConfusionTable& table);
ZhPerturbation perturb_zh(std::string_view text, const ZhNoiseSpec& spec,
                          const ConfusionTable& table, Rng& rng);

// Restores the original text by writing each record's original span back
// at its position.
std::string reverse_apply_zh(std::string_view noised,
                             std::span<const EditRecord> edits);

}  // namespace noiseval
