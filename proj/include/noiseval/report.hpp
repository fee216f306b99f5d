#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace noiseval {

// Writes via a temp file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

// Percentages render to one decimal place: 0.904 -> "90.4%".
std::string format_percent(double value);

// Signed change rendered with a direction arrow: -0.052 -> "↓5.2%".
std::string format_fluctuation(double value);

// Raw points or scores: integral values render without decimals.
std::string format_points(double value);

struct Table {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
};

std::string to_markdown(const Table& table);
std::string to_csv(const Table& table);

// Provenance for one CLI run: what went in, what came out, and counter
// statistics. Artifact paths are validated to exist at write time.
struct RunManifest {
  std::string run_id;  // derived from content when left empty
  std::string command;
  std::vector<std::string> corpus_ids;
  nlohmann::json noise_spec;  // null unless the run injected noise
  std::string template_id;
  std::string model;
  std::vector<std::string> metrics;
  std::map<std::string, std::uint64_t> stats;  // hits/misses/skips/fallbacks
  std::vector<std::string> artifacts;          // files written by the run
};

nlohmann::json manifest_to_json(const RunManifest& manifest);
void write_manifest(RunManifest manifest, const std::filesystem::path& path);

}  // namespace noiseval
