#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "json.hpp"

namespace noiseval {

// Error families: the first three are Chinese substitution kinds, the last
// four are the English grammatical-noise operations.
enum class EditKind {
  Phonological,
  Visual,
  Random,
  Append,
  Verb,
  Replace,
  Delete,
};

std::string_view to_string(EditKind kind);
EditKind edit_kind_from_string(std::string_view name);

// One applied perturbation; the audit trail of every noise operation.
// `position` is a codepoint index for Chinese substitutions and a token
// index (into the sequence at application time) for English edits.
struct EditRecord {
  std::size_t position = 0;
  std::string original;     // UTF-8; empty when a word was inserted
  std::string replacement;  // UTF-8; empty when a word was dropped
  EditKind kind = EditKind::Random;

  bool operator==(const EditRecord&) const = default;
};

void to_json(nlohmann::json& j, const EditRecord& record);
void from_json(const nlohmann::json& j, EditRecord& record);

}  // namespace noiseval
