#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace noiseval {

enum class CandidateKind { Phonological, Visual, Random };

// Per-character substitution candidates grouped by similarity family.
// The key character never appears in its own candidate lists.
struct ConfusionEntry {
  char32_t character = 0;
  std::vector<char32_t> phonological;
  std::vector<char32_t> visual;

  bool operator==(const ConfusionEntry&) const = default;
};

struct ConfusionTable {
  std::map<char32_t, ConfusionEntry> entries;
  std::vector<char32_t> random_pool;

  // Load-time cleanup counters (self references and repeated candidates
  // are stripped, not rejected: published confusion sets contain both).
  std::size_t self_references_stripped = 0;
  std::size_t duplicate_candidates_stripped = 0;

  const ConfusionEntry* find(char32_t ch) const {
    auto it = entries.find(ch);
    return it == entries.end() ? nullptr : &it->second;
  }

  bool operator==(const ConfusionTable& other) const {
    return entries == other.entries && random_pool == other.random_pool;
  }
};

// Auxiliary English noise lexicons: insertion/replacement vocabulary and
// the verb surface-form table.
struct EnglishLexicons {
  std::vector<std::string> commonly_deleted;
  // lemma -> distinct surface forms; the lemma itself is always included.
  std::map<std::string, std::vector<std::string>> verb_forms;
  // surface form -> lemma; first lemma listed wins on conflicts.
  std::unordered_map<std::string, std::string> form_to_lemma;

  const std::string* lemma_of(const std::string& form) const {
    auto it = form_to_lemma.find(form);
    return it == form_to_lemma.end() ? nullptr : &it->second;
  }
};

// Format: one record per line, `char TAB P:candidates TAB V:candidates`,
// candidates written as unseparated Han runs. UTF-8, LF line endings.
ConfusionTable load_confusion_table(const std::filesystem::path& path);
ConfusionTable load_confusion_table(const std::filesystem::path& path,
                                    const std::filesystem::path& pool_path);

// Pool file: Han characters in reading order; whitespace ignored.
// Duplicates and non-Han content are errors.
std::vector<char32_t> load_random_pool(const std::filesystem::path& path);

// Canonical TSV form of the entries (pool excluded); reloading the output
// yields a structurally equal table.
std::string serialize_confusion_table(const ConfusionTable& table);

// Candidate list for one character. Phonological/visual kinds require an
// entry (LookupMissError otherwise); random returns the pool minus `ch`.
// The result never contains `ch`.
std::vector<char32_t> candidates_for(const ConfusionTable& table, char32_t ch,
                                     CandidateKind kind);

// deleted_path: one word per line. verbs_path: `lemma TAB form1,form2,...`.
// Words are lowercased on load.
EnglishLexicons load_english_lexicons(const std::filesystem::path& deleted_path,
                                      const std::filesystem::path& verbs_path);

}  // namespace noiseval
