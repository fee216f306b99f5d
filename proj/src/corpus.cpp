#include "noiseval/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "noiseval/errors.hpp"
#include "noiseval/report.hpp"
#include "noiseval/unicode.hpp"

namespace noiseval {

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Csc: return "csc";
    case TaskKind::Ctc: return "ctc";
    case TaskKind::Gec: return "gec";
    case TaskKind::Sentiment: return "sentiment";
    case TaskKind::Mt: return "mt";
    case TaskKind::Mcq: return "mcq";
  }
  return "csc";
}

TaskKind task_kind_from_string(std::string_view name) {
  if (name == "csc") return TaskKind::Csc;
  if (name == "ctc") return TaskKind::Ctc;
  if (name == "gec") return TaskKind::Gec;
  if (name == "sentiment") return TaskKind::Sentiment;
  if (name == "mt") return TaskKind::Mt;
  if (name == "mcq") return TaskKind::Mcq;
  throw ValidationError("unknown task kind: " + std::string(name));
}

void to_json(nlohmann::json& j, const TaskItem& item) {
  j = nlohmann::json{{"id", item.id},
                     {"task", to_string(item.task)},
                     {"source", item.source},
                     {"golds", item.golds}};
  if (!item.choices.empty()) {
    nlohmann::json choices = nlohmann::json::array();
    for (const Choice& c : item.choices) {
      choices.push_back({{"label", c.label}, {"text", c.text}});
    }
    j["choices"] = std::move(choices);
  }
  if (!item.meta.empty()) j["meta"] = item.meta;
}

void from_json(const nlohmann::json& j, TaskItem& item) {
  item.id = j.at("id").get<std::string>();
  item.task = task_kind_from_string(j.at("task").get<std::string>());
  item.source = j.at("source").get<std::string>();
  item.golds = j.at("golds").get<std::vector<std::string>>();
  item.choices.clear();
  if (j.contains("choices")) {
    for (const auto& c : j.at("choices")) {
      item.choices.push_back(Choice{c.at("label").get<std::string>(),
                                    c.at("text").get<std::string>()});
    }
  }
  item.meta.clear();
  if (j.contains("meta")) {
    item.meta = j.at("meta").get<std::map<std::string, std::string>>();
  }
}

namespace {

void validate_item(const TaskItem& item, TaskKind expected,
                   const std::string& path, std::size_t line_no) {
  if (item.task != expected) {
    throw ParseError(path, line_no,
                     "item task '" + std::string(to_string(item.task)) +
                         "' does not match corpus task '" +
                         std::string(to_string(expected)) + "'");
  }
  if (item.id.empty()) throw ParseError(path, line_no, "empty item id");
  if (item.golds.empty()) {
    throw ParseError(path, line_no, "item has no gold answers");
  }
  if (item.task == TaskKind::Mcq) {
    if (item.choices.size() < 2) {
      throw ParseError(path, line_no, "mcq item needs at least 2 choices");
    }
    std::unordered_set<std::string> labels;
    for (const Choice& c : item.choices) labels.insert(c.label);
    for (const std::string& gold : item.golds) {
      if (labels.count(gold) == 0) {
        throw ParseError(path, line_no,
                         "gold '" + gold + "' is not a choice label");
      }
    }
  }
}

}  // namespace

std::vector<TaskItem> load_corpus(const std::filesystem::path& path,
                                  TaskKind task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus: " + path.string());

  std::vector<TaskItem> items;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TaskItem item;
    try {
      item = nlohmann::json::parse(line).get<TaskItem>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    validate_item(item, task, path.string(), line_no);
    if (!ids.insert(item.id).second) {
      throw ParseError(path.string(), line_no,
                       "duplicate item id: '" + item.id + "'");
    }
    items.push_back(std::move(item));
  }
  if (items.empty()) {
    throw ValidationError("corpus has no items: " + path.string());
  }
  return items;
}

std::string noise_lang(const NoiseSpec& spec) {
  return std::holds_alternative<ZhNoiseSpec>(spec) ? "zh" : "en";
}

nlohmann::json noise_spec_to_json(const NoiseSpec& spec) {
  if (const auto* zh = std::get_if<ZhNoiseSpec>(&spec)) {
    return {{"lang", "zh"},
            {"ratio", zh->ratio},
            {"weights", zh->weights},
            {"seed", zh->seed}};
  }
  const auto& en = std::get<EnNoiseSpec>(spec);
  return {{"lang", "en"},
          {"max_errors", en.max_errors},
          {"type_weights", en.type_weights},
          {"seed", en.seed}};
}

NoiseSpec noise_spec_from_json(const nlohmann::json& j) {
  const std::string lang = j.at("lang").get<std::string>();
  if (lang == "zh") {
    ZhNoiseSpec spec;
    spec.ratio = j.at("ratio").get<double>();
    spec.weights = j.at("weights").get<std::array<double, 3>>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  }
  if (lang == "en") {
    EnNoiseSpec spec;
    spec.max_errors = j.at("max_errors").get<int>();
    spec.type_weights = j.at("type_weights").get<std::array<double, 4>>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
  }
  throw ValidationError("unknown noise spec language: " + lang);
}

namespace {

struct ItemResult {
  NoisedItem noised;
  std::size_t fallbacks = 0;
  std::size_t skipped = 0;
};

ItemResult noise_one(const TaskItem& item, const NoiseSpec& spec,
                     const NoiseResources& resources, Rng rng) {
  ItemResult out;
  out.noised.item = item;
  if (const auto* zh = std::get_if<ZhNoiseSpec>(&spec)) {
    ZhPerturbation p = perturb_zh(item.source, *zh, *resources.table, rng);
    out.noised.item.source = std::move(p.text);
    out.noised.edits = std::move(p.edits);
    out.fallbacks = p.random_fallbacks;
    out.skipped = p.skipped;
  } else {
    const auto& en = std::get<EnNoiseSpec>(spec);
    EnPerturbation p = perturb_en(item.source, en, *resources.lexicons, rng);
    out.noised.item.source = std::move(p.text);
    out.noised.edits = std::move(p.edits);
    out.skipped = p.skipped;
  }
  return out;
}

void check_preconditions(std::span<const TaskItem> items,
                         const NoiseSpec& spec,
                         const NoiseResources& resources) {
  const std::string lang = noise_lang(spec);
  if (lang == "zh" && resources.table == nullptr) {
    throw ValidationError("Chinese noise requires a confusion table");
  }
  if (lang == "en" && resources.lexicons == nullptr) {
    throw ValidationError("English noise requires English lexicons");
  }
  for (const TaskItem& item : items) {
    auto it = item.meta.find("lang");
    if (it == item.meta.end()) {
      throw ValidationError("item '" + item.id + "' has no lang meta field");
    }
    if (it->second != lang) {
      throw ValidationError("item '" + item.id + "' language '" + it->second +
                            "' does not match noise language '" + lang + "'");
    }
  }
}

std::uint64_t spec_seed(const NoiseSpec& spec) {
  if (const auto* zh = std::get_if<ZhNoiseSpec>(&spec)) return zh->seed;
  return std::get<EnNoiseSpec>(spec).seed;
}

NoisedCorpus assemble(std::vector<ItemResult> results, const NoiseSpec& spec,
                      std::string base_corpus_id) {
  NoisedCorpus corpus;
  corpus.base_corpus_id = std::move(base_corpus_id);
  corpus.spec = spec;
  corpus.items.reserve(results.size());
  for (ItemResult& r : results) {
    corpus.random_fallbacks += r.fallbacks;
    corpus.skipped += r.skipped;
    corpus.items.push_back(std::move(r.noised));
  }
  return corpus;
}

}  // namespace

NoisedCorpus noise_corpus(std::span<const TaskItem> items,
                          const NoiseSpec& spec,
                          const NoiseResources& resources,
                          std::string base_corpus_id) {
  check_preconditions(items, spec, resources);
  const std::uint64_t seed = spec_seed(spec);

  std::vector<ItemResult> results(items.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(items.size());
       ++i) {
    results[static_cast<std::size_t>(i)] =
        noise_one(items[static_cast<std::size_t>(i)], spec, resources,
                  Rng::substream(seed, static_cast<std::uint64_t>(i)));
  }
  return assemble(std::move(results), spec, std::move(base_corpus_id));
}

NoisedCorpus noise_corpus_serial(std::span<const TaskItem> items,
                                 const NoiseSpec& spec,
                                 const NoiseResources& resources,
                                 std::string base_corpus_id) {
  check_preconditions(items, spec, resources);
  const std::uint64_t seed = spec_seed(spec);

  std::vector<ItemResult> results(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    results[i] = noise_one(items[i], spec, resources,
                           Rng::substream(seed, static_cast<std::uint64_t>(i)));
  }
  return assemble(std::move(results), spec, std::move(base_corpus_id));
}

void save_noised_corpus(const NoisedCorpus& corpus,
                        const std::filesystem::path& path) {
  std::string out;
  nlohmann::json header{
      {"kind", "noised_corpus"},
      {"base_corpus_id", corpus.base_corpus_id},
      {"spec", noise_spec_to_json(corpus.spec)},
      {"counters",
       {{"random_fallbacks", corpus.random_fallbacks},
        {"skipped", corpus.skipped}}}};
  out += header.dump();
  out += '\n';
  for (const NoisedItem& noised : corpus.items) {
    nlohmann::json j = noised.item;
    j["edits"] = noised.edits;
    out += j.dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

NoisedCorpus load_noised_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open noised corpus: " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("noised corpus is empty: " + path.string());
  }
  NoisedCorpus corpus;
  try {
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.at("kind").get<std::string>() != "noised_corpus") {
      throw ValidationError("not a noised corpus file: " + path.string());
    }
    corpus.base_corpus_id = header.at("base_corpus_id").get<std::string>();
    corpus.spec = noise_spec_from_json(header.at("spec"));
    corpus.random_fallbacks =
        header.at("counters").at("random_fallbacks").get<std::size_t>();
    corpus.skipped = header.at("counters").at("skipped").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 1, e.what());
  }

  std::size_t line_no = 1;
  std::unordered_set<std::string> ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    NoisedItem noised;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      noised.item = j.get<TaskItem>();
      if (j.contains("edits")) {
        noised.edits = j.at("edits").get<std::vector<EditRecord>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (!ids.insert(noised.item.id).second) {
      throw ParseError(path.string(), line_no,
                       "duplicate item id: '" + noised.item.id + "'");
    }
    corpus.items.push_back(std::move(noised));
  }
  return corpus;
}

void verify_reproducible(const NoisedCorpus& loaded,
                         std::span<const TaskItem> base_items,
                         const NoiseResources& resources) {
  NoisedCorpus regenerated = noise_corpus_serial(
      base_items, loaded.spec, resources, loaded.base_corpus_id);
  if (regenerated.items.size() != loaded.items.size()) {
    throw ValidationError("noised corpus does not match its header spec: "
                          "item count differs");
  }
  for (std::size_t i = 0; i < loaded.items.size(); ++i) {
    if (!(regenerated.items[i] == loaded.items[i])) {
      throw ValidationError(
          "noised corpus does not match its header spec at item '" +
          loaded.items[i].item.id + "'");
    }
  }
}

}  // namespace noiseval
