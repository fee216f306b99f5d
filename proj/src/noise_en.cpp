#include "noiseval/noise_en.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "noiseval/errors.hpp"

namespace noiseval {

namespace {

std::string lowercase(std::string word) {
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return word;
}

enum ErrorType : std::size_t { kAppend = 0, kVerb = 1, kReplace = 2, kDelete = 3 };

}  // namespace

void EnNoiseSpec::validate() const {
  if (max_errors < 0) {
    throw ValidationError("max_errors must be non-negative");
  }
  double sum = 0.0;
  for (double w : type_weights) {
    if (w < 0.0) throw ValidationError("type weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("type weights must sum to 1");
  }
}

std::vector<std::string> tokenize_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

int sample_error_count(const EnNoiseSpec& spec, std::size_t sentence_len,
                       Rng& rng) {
  if (spec.max_errors == 0) return 0;
  const int draw = static_cast<int>(
      rng.below(static_cast<std::uint64_t>(spec.max_errors) + 1));
  return std::min<int>(draw, static_cast<int>(sentence_len));
}

EditRecord apply_append_error(std::vector<std::string>& tokens,
                              std::size_t position) {
  if (tokens.empty()) {
    throw ValidationError("append error on an empty sentence");
  }
  if (position >= tokens.size()) {
    throw ValidationError("append error position out of range");
  }
  EditRecord record;
  record.position = position;
  record.original = tokens[position];
  record.kind = EditKind::Append;
  tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(position));
  return record;
}

EditRecord apply_delete_error(std::vector<std::string>& tokens,
                              std::size_t position,
                              const EnglishLexicons& lexicons, Rng& rng) {
  if (position > tokens.size()) {
    throw ValidationError("delete error position out of range");
  }
  if (lexicons.commonly_deleted.empty()) {
    throw ValidationError("commonly-deleted lexicon is empty");
  }
  const std::string& word = lexicons.commonly_deleted[static_cast<std::size_t>(
      rng.below(lexicons.commonly_deleted.size()))];
  tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(position), word);

  EditRecord record;
  record.position = position;
  record.replacement = word;
  record.kind = EditKind::Delete;
  return record;
}

EditRecord apply_replace_error(std::vector<std::string>& tokens,
                               std::size_t position,
                               const EnglishLexicons& lexicons, Rng& rng) {
  if (tokens.empty()) {
    throw ValidationError("replace error on an empty sentence");
  }
  if (position >= tokens.size()) {
    throw ValidationError("replace error position out of range");
  }
  const std::vector<std::string>& pool = lexicons.commonly_deleted;
  if (pool.empty()) {
    throw ValidationError("commonly-deleted lexicon is empty");
  }
  const std::string original = tokens[position];
  if (pool.size() == 1 && pool[0] == original) {
    throw ValidationError("unsatisfiable replacement: lexicon only contains '" +
                          original + "'");
  }
  std::string replacement;
  do {
    replacement = pool[static_cast<std::size_t>(rng.below(pool.size()))];
  } while (replacement == original);

  tokens[position] = replacement;

  EditRecord record;
  record.position = position;
  record.original = original;
  record.replacement = replacement;
  record.kind = EditKind::Replace;
  return record;
}

std::optional<EditRecord> apply_verb_error(std::vector<std::string>& tokens,
                                           const EnglishLexicons& lexicons,
                                           Rng& rng) {
  std::vector<std::size_t> verb_positions;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicons.lemma_of(lowercase(tokens[i])) != nullptr) {
      verb_positions.push_back(i);
    }
  }
  if (verb_positions.empty()) return std::nullopt;

  const std::size_t position = verb_positions[static_cast<std::size_t>(
      rng.below(verb_positions.size()))];
  const std::string original = tokens[position];
  const std::string surface = lowercase(original);
  const std::string& lemma = *lexicons.lemma_of(surface);
  const std::vector<std::string>& forms = lexicons.verb_forms.at(lemma);

  std::vector<std::string> alternatives;
  alternatives.reserve(forms.size());
  for (const std::string& form : forms) {
    if (form != surface) alternatives.push_back(form);
  }
  if (alternatives.empty()) return std::nullopt;  // degenerate single-form lemma

  const std::string& replacement = alternatives[static_cast<std::size_t>(
      rng.below(alternatives.size()))];
  tokens[position] = replacement;

  EditRecord record;
  record.position = position;
  record.original = original;
  record.replacement = replacement;
  record.kind = EditKind::Verb;
  return record;
}

EnPerturbation perturb_en(std::string_view sentence, const EnNoiseSpec& spec,
                          const EnglishLexicons& lexicons) {
  Rng rng(spec.seed);
  return perturb_en(sentence, spec, lexicons, rng);
}

EnPerturbation perturb_en(std::string_view sentence, const EnNoiseSpec& spec,
                          const EnglishLexicons& lexicons, Rng& rng) {
  spec.validate();

  std::vector<std::string> tokens = tokenize_whitespace(sentence);
  const int count = sample_error_count(spec, tokens.size(), rng);

  EnPerturbation result;
  for (int e = 0; e < count; ++e) {
    bool applied = false;
    std::array<double, 4> weights = spec.type_weights;
    // One initial draw plus up to 3 retries; a failed type is zeroed out so
    // the retry samples a different one.
    for (int attempt = 0; attempt < 4 && !applied; ++attempt) {
      double remaining = 0.0;
      for (double w : weights) remaining += w;
      if (remaining <= 0.0) break;

      const std::size_t type = rng.weighted(weights);
      switch (static_cast<ErrorType>(type)) {
        case kAppend:
          if (tokens.empty()) {
            weights[kAppend] = 0.0;
            break;
          }
          result.edits.push_back(apply_append_error(
              tokens, static_cast<std::size_t>(rng.below(tokens.size()))));
          applied = true;
          break;
        case kVerb: {
          auto record = apply_verb_error(tokens, lexicons, rng);
          if (record.has_value()) {
            result.edits.push_back(std::move(*record));
            applied = true;
          } else {
            weights[kVerb] = 0.0;
          }
          break;
        }
        case kReplace: {
          if (tokens.empty()) {
            weights[kReplace] = 0.0;
            break;
          }
          const std::size_t pos =
              static_cast<std::size_t>(rng.below(tokens.size()));
          if (lexicons.commonly_deleted.size() == 1 &&
              lexicons.commonly_deleted[0] == tokens[pos]) {
            weights[kReplace] = 0.0;  // unsatisfiable without a second word
            break;
          }
          result.edits.push_back(
              apply_replace_error(tokens, pos, lexicons, rng));
          applied = true;
          break;
        }
        case kDelete:
          result.edits.push_back(apply_delete_error(
              tokens, static_cast<std::size_t>(rng.below(tokens.size() + 1)),
              lexicons, rng));
          applied = true;
          break;
      }
    }
    if (!applied) ++result.skipped;
  }

  result.text = detokenize(tokens);
  return result;
}

std::vector<std::string> replay_edits(std::vector<std::string> tokens,
                                      std::span<const EditRecord> edits) {
  for (const EditRecord& edit : edits) {
    switch (edit.kind) {
      case EditKind::Append:
        if (edit.position >= tokens.size()) {
          throw ValidationError("replay: append position out of range");
        }
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(edit.position));
        break;
      case EditKind::Delete:
        if (edit.position > tokens.size()) {
          throw ValidationError("replay: delete position out of range");
        }
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(edit.position),
                      edit.replacement);
        break;
      case EditKind::Replace:
      case EditKind::Verb:
        if (edit.position >= tokens.size()) {
          throw ValidationError("replay: position out of range");
        }
        tokens[edit.position] = edit.replacement;
        break;
      default:
        throw ValidationError("replay: not an English edit record");
    }
  }
  return tokens;
}

std::vector<std::string> reverse_edits(std::vector<std::string> tokens,
                                       std::span<const EditRecord> edits) {
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    const EditRecord& edit = *it;
    switch (edit.kind) {
      case EditKind::Append:
        if (edit.position > tokens.size()) {
          throw ValidationError("reverse: append position out of range");
        }
        tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(edit.position),
                      edit.original);
        break;
      case EditKind::Delete:
        if (edit.position >= tokens.size()) {
          throw ValidationError("reverse: delete position out of range");
        }
        tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(edit.position));
        break;
      case EditKind::Replace:
      case EditKind::Verb:
        if (edit.position >= tokens.size()) {
          throw ValidationError("reverse: position out of range");
        }
        tokens[edit.position] = edit.original;
        break;
      default:
        throw ValidationError("reverse: not an English edit record");
    }
  }
  return tokens;
}

}  // namespace noiseval
