#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noiseval/confusion.hpp"
#include "noiseval/edit_record.hpp"
#include "noiseval/rng.hpp"

namespace noiseval {

// Grammatical noise through four operations, named after the error the
// corrector would see: simulating an append error drops a word, simulating
// a delete error inserts a spurious one, replace does both at one position,
// verb swaps a verb for another surface form of the same lemma.
struct EnNoiseSpec {
  int max_errors = 4;
  // append, verb, replace, delete
  std::array<double, 4> type_weights{0.25, 0.25, 0.25, 0.25};
  std::uint64_t seed = 0;

  void validate() const;  // throws ValidationError
};

std::vector<std::string> tokenize_whitespace(std::string_view text);
std::string detokenize(std::span<const std::string> tokens);

// Uniform draw from {0, .., max_errors}, clipped to the sentence length.
int sample_error_count(const EnNoiseSpec& spec, std::size_t sentence_len,
                       Rng& rng);

// The four error operations. Each mutates `tokens` in place and returns the
// record describing the edit. Position preconditions are checked and throw
// ValidationError.
EditRecord apply_append_error(std::vector<std::string>& tokens,
                              std::size_t position);
EditRecord apply_delete_error(std::vector<std::string>& tokens,
                              std::size_t position,
                              const EnglishLexicons& lexicons, Rng& rng);
EditRecord apply_replace_error(std::vector<std::string>& tokens,
                               std::size_t position,
                               const EnglishLexicons& lexicons, Rng& rng);
// nullopt = no token in the sentence is a known verb form.
std::optional<EditRecord> apply_verb_error(std::vector<std::string>& tokens,
                                           const EnglishLexicons& lexicons,
                                           Rng& rng);

struct EnPerturbation {
  std::string text;
  std::vector<EditRecord> edits;  // in application order
  std::size_t skipped = 0;        // errors abandoned after retries
};

EnPerturbation perturb_en(std::string_view sentence, const EnNoiseSpec& spec,
                          const EnglishLexicons& lexicons);
EnPerturbation perturb_en(std::string_view sentence, const EnNoiseSpec& spec,
                          const EnglishLexicons& lexicons, Rng& rng);

// Replays records in order on a tokenized input; reproduces the noised
// token sequence.
std::vector<std::string> replay_edits(std::vector<std::string> tokens,
                                      std::span<const EditRecord> edits);

// Undoes records (walked in reverse) on the noised token sequence.
std::vector<std::string> reverse_edits(std::vector<std::string> tokens,
                                       std::span<const EditRecord> edits);

}  // namespace noiseval
