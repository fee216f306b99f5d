#include "noiseval/edit_record.hpp"

#include "noiseval/errors.hpp"

namespace noiseval {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Phonological: return "phonological";
    case EditKind::Visual: return "visual";
    case EditKind::Random: return "random";
    case EditKind::Append: return "append";
    case EditKind::Verb: return "verb";
    case EditKind::Replace: return "replace";
    case EditKind::Delete: return "delete";
  }
  return "random";
}

EditKind edit_kind_from_string(std::string_view name) {
  if (name == "phonological") return EditKind::Phonological;
  if (name == "visual") return EditKind::Visual;
  if (name == "random") return EditKind::Random;
  if (name == "append") return EditKind::Append;
  if (name == "verb") return EditKind::Verb;
  if (name == "replace") return EditKind::Replace;
  if (name == "delete") return EditKind::Delete;
  throw ValidationError("unknown edit kind: " + std::string(name));
}

void to_json(nlohmann::json& j, const EditRecord& record) {
  j = nlohmann::json{{"pos", record.position},
                     {"orig", record.original},
                     {"repl", record.replacement},
                     {"kind", to_string(record.kind)}};
}

void from_json(const nlohmann::json& j, EditRecord& record) {
  record.position = j.at("pos").get<std::size_t>();
  record.original = j.at("orig").get<std::string>();
  record.replacement = j.at("repl").get<std::string>();
  record.kind = edit_kind_from_string(j.at("kind").get<std::string>());
}

}  // namespace noiseval
