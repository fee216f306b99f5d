#include "noiseval/noise_zh.hpp"

#include <algorithm>
#include <cmath>

#include "noiseval/errors.hpp"
#include "noiseval/unicode.hpp"

namespace noiseval {

void ZhNoiseSpec::validate() const {
  if (ratio < 0.0 || ratio > 1.0) {
    throw ValidationError("noise ratio must be in [0, 1]");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("noise weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("noise weights must sum to 1");
  }
}

std::vector<std::size_t> eligible_positions(std::u32string_view text) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (is_cjk_unified(text[i])) out.push_back(i);
  }
  return out;
}

std::size_t plan_edit_count(std::size_t n_eligible, double ratio, Rng& rng) {
  const double target = static_cast<double>(n_eligible) * ratio;
  const double nearest = std::round(target);
  // Absorb float noise in the product (e.g. 100 * 0.05) before splitting
  // into integer part and Bernoulli remainder.
  if (std::abs(target - nearest) < 1e-9 * std::max(1.0, std::abs(target))) {
    return std::min(n_eligible, static_cast<std::size_t>(nearest));
  }
  const double integral = std::floor(target);
  std::size_t count = static_cast<std::size_t>(integral);
  if (rng.bernoulli(target - integral)) ++count;
  return std::min(count, n_eligible);
}

ZhPerturbation perturb_zh(std::string_view text, const ZhNoiseSpec& spec,
                          const ConfusionTable& table) {
  Rng rng(spec.seed);
  return perturb_zh(text, spec, table, rng);
}

ZhPerturbation perturb_zh(std::string_view text, const ZhNoiseSpec& spec,
                          const ConfusionTable& table, Rng& rng) {
  spec.validate();

  std::u32string chars = utf8_decode(text);
  const std::vector<std::size_t> eligible = eligible_positions(chars);
  const std::size_t planned = plan_edit_count(eligible.size(), spec.ratio, rng);

  std::vector<std::size_t> chosen;
  {
    std::vector<std::size_t> picks =
        sample_without_replacement(rng, eligible.size(), planned);
    chosen.reserve(picks.size());
    for (std::size_t p : picks) chosen.push_back(eligible[p]);
    std::sort(chosen.begin(), chosen.end());
  }

  ZhPerturbation result;
  result.edits.reserve(chosen.size());
  for (std::size_t pos : chosen) {
    const char32_t original = chars[pos];

    std::size_t kind_index = rng.weighted(spec.weights);
    CandidateKind kind = static_cast<CandidateKind>(kind_index);

    std::vector<char32_t> candidates;
    if (kind != CandidateKind::Random) {
      const ConfusionEntry* entry = table.find(original);
      const std::vector<char32_t>* list = nullptr;
      if (entry != nullptr) {
        list = kind == CandidateKind::Phonological ? &entry->phonological
                                                   : &entry->visual;
      }
      if (list == nullptr || list->empty()) {
        // Keep the realized ratio on target even where the confusion set
        // has no coverage: degrade to a random-pool substitution.
        kind = CandidateKind::Random;
        ++result.random_fallbacks;
      } else {
        candidates = *list;
      }
    }
    if (kind == CandidateKind::Random) {
      candidates = candidates_for(table, original, CandidateKind::Random);
      if (candidates.empty()) {
        ++result.skipped;
        continue;
      }
    }

    const char32_t replacement =
        candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
    chars[pos] = replacement;

    EditRecord record;
    record.position = pos;
    record.original = utf8_encode(original);
    record.replacement = utf8_encode(replacement);
    switch (kind) {
      case CandidateKind::Phonological: record.kind = EditKind::Phonological; break;
      case CandidateKind::Visual: record.kind = EditKind::Visual; break;
      case CandidateKind::Random: record.kind = EditKind::Random; break;
    }
    result.edits.push_back(std::move(record));
  }

  result.text = utf8_encode(chars);
  return result;
}

std::string reverse_apply_zh(std::string_view noised,
                             std::span<const EditRecord> edits) {
  std::u32string chars = utf8_decode(noised);
  for (const EditRecord& edit : edits) {
    const std::u32string original = utf8_decode(edit.original);
    if (edit.position + original.size() > chars.size()) {
      throw ValidationError("edit record position out of range");
    }
    for (std::size_t i = 0; i < original.size(); ++i) {
      chars[edit.position + i] = original[i];
    }
  }
  return utf8_encode(chars);
}

}  // namespace noiseval
