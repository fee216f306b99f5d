#include "noiseval/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "noiseval/errors.hpp"
#include "noiseval/rng.hpp"

namespace noiseval {

std::string_view to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::ZeroShot: return "zero_shot";
    case PromptMode::FewShot: return "few_shot";
    case PromptMode::ZeroShotCot: return "zero_shot_cot";
    case PromptMode::FewShotCot: return "few_shot_cot";
  }
  return "zero_shot";
}

PromptMode prompt_mode_from_string(std::string_view name) {
  if (name == "zero_shot") return PromptMode::ZeroShot;
  if (name == "few_shot") return PromptMode::FewShot;
  if (name == "zero_shot_cot") return PromptMode::ZeroShotCot;
  if (name == "few_shot_cot") return PromptMode::FewShotCot;
  throw ValidationError("unknown prompt mode: " + std::string(name));
}

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string_view::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

// Single left-to-right pass; substituted text is never re-scanned, so
// placeholder-like strings inside values do not expand again.
std::string expand(std::string_view text,
                   const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const std::size_t close = text.find('}', i);
      if (close != std::string_view::npos) {
        const std::string name(text.substr(i + 1, close - i - 1));
        auto it = values.find(name);
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i];
    ++i;
  }
  return out;
}

}  // namespace

void PromptTemplate::validate() const {
  const bool few_shot =
      mode == PromptMode::FewShot || mode == PromptMode::FewShotCot;
  if (few_shot && demo_slots < 1) {
    throw ValidationError("few-shot template needs demo_slots >= 1");
  }
  if (!few_shot && demo_slots != 0) {
    throw ValidationError("zero-shot template must have demo_slots = 0");
  }
  if (count_occurrences(instruction, "{source}") != 1) {
    throw ValidationError(
        "template instruction must contain {source} exactly once");
  }
  const std::size_t demo_marks = count_occurrences(instruction, "{demos}");
  if (demo_slots > 0 && demo_marks != 1) {
    throw ValidationError(
        "few-shot template instruction must contain {demos} exactly once");
  }
  if (demo_slots == 0 && demo_marks != 0) {
    throw ValidationError("zero-shot template must not contain {demos}");
  }
  const std::size_t constraint_marks =
      count_occurrences(instruction, "{constraints}");
  if (!constraints.empty() && constraint_marks != 1) {
    throw ValidationError(
        "template with constraints must contain {constraints} exactly once");
  }
}

PromptTemplate load_prompt_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open template: " + path.string());
  PromptTemplate tmpl;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    tmpl.task = task_kind_from_string(j.at("task").get<std::string>());
    tmpl.mode = prompt_mode_from_string(j.at("mode").get<std::string>());
    tmpl.instruction = j.at("instruction").get<std::string>();
    if (j.contains("constraints")) {
      tmpl.constraints = j.at("constraints").get<std::vector<std::string>>();
    }
    if (j.contains("demo_slots")) tmpl.demo_slots = j.at("demo_slots").get<int>();
    if (j.contains("demo_format")) {
      tmpl.demo_format = j.at("demo_format").get<std::string>();
    }
    if (j.contains("demo_separator")) {
      tmpl.demo_separator = j.at("demo_separator").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("template " + path.string() + ": " + e.what());
  }
  tmpl.validate();
  return tmpl;
}

std::vector<Demonstration> load_demo_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open demo pool: " + path.string());
  std::vector<Demonstration> pool;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Demonstration demo;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      demo.source = j.at("source").get<std::string>();
      demo.target = j.at("target").get<std::string>();
      demo.error_kind = j.at("error_kind").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
    if (demo.source == demo.target) {
      throw ParseError(path.string(), line_no,
                       "demonstration source equals target");
    }
    pool.push_back(std::move(demo));
  }
  if (pool.empty()) {
    throw ValidationError("demo pool is empty: " + path.string());
  }
  return pool;
}

std::map<std::string, int> apportion_largest_remainder(
    const std::map<std::string, double>& distribution, int k) {
  if (k < 0) throw ValidationError("apportionment needs k >= 0");
  double total = 0.0;
  for (const auto& [kind, p] : distribution) {
    if (p < 0.0) {
      throw ValidationError("negative proportion for kind '" + kind + "'");
    }
    total += p;
  }
  if (total <= 0.0) {
    throw ValidationError("distribution has no positive proportion");
  }

  std::map<std::string, int> counts;
  std::vector<std::pair<double, std::string>> remainders;  // (-frac, kind)
  int assigned = 0;
  for (const auto& [kind, p] : distribution) {
    const double quota = p / total * k;
    const int base = static_cast<int>(std::floor(quota));
    counts[kind] = base;
    assigned += base;
    remainders.emplace_back(-(quota - base), kind);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int i = 0; i < k - assigned; ++i) {
    counts[remainders[static_cast<std::size_t>(i)].second] += 1;
  }
  return counts;
}

std::vector<Demonstration> select_demonstrations(
    std::span<const Demonstration> pool,
    const std::map<std::string, double>& distribution, int k,
    std::uint64_t seed) {
  if (k < 1) throw ValidationError("demonstration selection needs k >= 1");
  for (const auto& [kind, p] : distribution) {
    if (p <= 0.0) continue;
    const bool covered = std::any_of(
        pool.begin(), pool.end(),
        [&](const Demonstration& d) { return d.error_kind == kind; });
    if (!covered) {
      throw ValidationError("demo pool has no examples of kind '" + kind + "'");
    }
  }

  const std::map<std::string, int> counts =
      apportion_largest_remainder(distribution, k);

  Rng rng(seed);
  std::vector<Demonstration> out;
  out.reserve(static_cast<std::size_t>(k));
  for (const auto& [kind, count] : counts) {
    if (count == 0) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].error_kind == kind) members.push_back(i);
    }
    if (static_cast<std::size_t>(count) > members.size()) {
      throw ValidationError("demo pool exhausted for kind '" + kind + "': " +
                            std::to_string(count) + " needed, " +
                            std::to_string(members.size()) + " available");
    }
    for (std::size_t pick :
         sample_without_replacement(rng, members.size(),
                                    static_cast<std::size_t>(count))) {
      out.push_back(pool[members[pick]]);
    }
  }
  return out;
}

std::string render_prompt(const PromptTemplate& tmpl,
                          std::span<const Demonstration> demos,
                          std::string_view source) {
  tmpl.validate();
  if (static_cast<int>(demos.size()) != tmpl.demo_slots) {
    throw ValidationError("template expects " +
                          std::to_string(tmpl.demo_slots) +
                          " demonstrations, got " +
                          std::to_string(demos.size()));
  }

  std::string demo_block;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    if (i > 0) demo_block += tmpl.demo_separator;
    demo_block += expand(tmpl.demo_format, {{"source", demos[i].source},
                                            {"target", demos[i].target}});
  }

  std::string constraint_block;
  for (std::size_t i = 0; i < tmpl.constraints.size(); ++i) {
    if (i > 0) constraint_block += '\n';
    constraint_block += tmpl.constraints[i];
  }

  return expand(tmpl.instruction, {{"source", std::string(source)},
                                   {"demos", demo_block},
                                   {"constraints", constraint_block}});
}

}  // namespace noiseval
