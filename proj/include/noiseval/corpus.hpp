#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "noiseval/edit_record.hpp"
#include "noiseval/noise_en.hpp"
#include "noiseval/noise_zh.hpp"

namespace noiseval {

enum class TaskKind { Csc, Ctc, Gec, Sentiment, Mt, Mcq };

std::string_view to_string(TaskKind task);
TaskKind task_kind_from_string(std::string_view name);

struct Choice {
  std::string label;
  std::string text;

  bool operator==(const Choice&) const = default;
};

// One evaluation unit in the uniform schema shared by all task kinds.
struct TaskItem {
  std::string id;
  TaskKind task = TaskKind::Csc;
  std::string source;
  std::vector<std::string> golds;
  std::vector<Choice> choices;              // mcq only
  std::map<std::string, std::string> meta;  // e.g. lang, subject, points

  bool operator==(const TaskItem&) const = default;
};

void to_json(nlohmann::json& j, const TaskItem& item);
void from_json(const nlohmann::json& j, TaskItem& item);

// Line-delimited JSON, one item per line. Validates the TaskItem schema
// for the declared task; rejects duplicate ids and empty files.
std::vector<TaskItem> load_corpus(const std::filesystem::path& path,
                                  TaskKind task);

using NoiseSpec = std::variant<ZhNoiseSpec, EnNoiseSpec>;

std::string noise_lang(const NoiseSpec& spec);  // "zh" | "en"
nlohmann::json noise_spec_to_json(const NoiseSpec& spec);
NoiseSpec noise_spec_from_json(const nlohmann::json& j);

struct NoisedItem {
  TaskItem item;  // source holds the noised text; everything else untouched
  std::vector<EditRecord> edits;

  bool operator==(const NoisedItem&) const = default;
};

struct NoisedCorpus {
  std::string base_corpus_id;
  NoiseSpec spec;
  std::vector<NoisedItem> items;
  std::size_t random_fallbacks = 0;
  std::size_t skipped = 0;
};

struct NoiseResources {
  const ConfusionTable* table = nullptr;      // zh
  const EnglishLexicons* lexicons = nullptr;  // en
};

// Perturbs each item's `source` only; ids, golds, choices, and meta are
// untouched. Every item gets an independent RNG substream derived from
// (spec seed, item index), so the parallel and serial paths produce
// identical corpora.
NoisedCorpus noise_corpus(std::span<const TaskItem> items,
                          const NoiseSpec& spec,
                          const NoiseResources& resources,
                          std::string base_corpus_id);

// Reference implementation: plain sequential loop, kept for equivalence
// tests and benchmarking against the parallel path.
NoisedCorpus noise_corpus_serial(std::span<const TaskItem> items,
                                 const NoiseSpec& spec,
                                 const NoiseResources& resources,
                                 std::string base_corpus_id);

// File layout: header record first line (spec + provenance), one item per
// line after. Writes are atomic (temp file + rename).
void save_noised_corpus(const NoisedCorpus& corpus,
                        const std::filesystem::path& path);
NoisedCorpus load_noised_corpus(const std::filesystem::path& path);

// Regenerates the corpus from (base items, header spec) and compares;
// throws ValidationError when the file does not match its own provenance.
void verify_reproducible(const NoisedCorpus& loaded,
                         std::span<const TaskItem> base_items,
                         const NoiseResources& resources);

}  // namespace noiseval
