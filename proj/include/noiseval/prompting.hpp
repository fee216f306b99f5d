#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "noiseval/corpus.hpp"

namespace noiseval {

enum class PromptMode { ZeroShot, FewShot, ZeroShotCot, FewShotCot };

std::string_view to_string(PromptMode mode);
PromptMode prompt_mode_from_string(std::string_view name);

// Rendering contract: `instruction` contains {source} exactly once,
// {demos} exactly when demo_slots > 0, and {constraints} exactly when the
// constraint list is non-empty. Constraint clauses are emitted verbatim,
// one per line. Templates ship as versioned JSON files so experiments can
// pin exact wording.
struct PromptTemplate {
  TaskKind task = TaskKind::Csc;
  PromptMode mode = PromptMode::ZeroShot;
  std::string instruction;
  std::vector<std::string> constraints;
  int demo_slots = 0;
  std::string demo_format = "Input: {source}\nOutput: {target}";
  std::string demo_separator = "\n\n";

  void validate() const;  // throws ValidationError
};

PromptTemplate load_prompt_template(const std::filesystem::path& path);

// One in-context example: an erroneous sentence and its correction,
// labeled with the error family it demonstrates.
struct Demonstration {
  std::string source;
  std::string target;
  std::string error_kind;

  bool operator==(const Demonstration&) const = default;
};

// JSONL: {"source":..., "target":..., "error_kind":...} per line.
std::vector<Demonstration> load_demo_pool(const std::filesystem::path& path);

// Largest-remainder apportionment of `distribution` over k slots.
// Ties on the remainder break toward the lexicographically smaller kind.
std::map<std::string, int> apportion_largest_remainder(
    const std::map<std::string, double>& distribution, int k);

// k demonstrations whose kind counts follow the apportionment; selection
// within a kind is uniform without replacement under `seed`. Output is
// ordered by kind name, then selection order.
std::vector<Demonstration> select_demonstrations(
    std::span<const Demonstration> pool,
    const std::map<std::string, double>& distribution, int k,
    std::uint64_t seed);

std::string render_prompt(const PromptTemplate& tmpl,
                          std::span<const Demonstration> demos,
                          std::string_view source);

}  // namespace noiseval
