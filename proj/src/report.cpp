#include "noiseval/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "noiseval/errors.hpp"
#include "noiseval/gateway.hpp"

namespace noiseval {

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ValidationError("cannot write file: " + tmp.string());
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw ValidationError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw ValidationError("rename failed for " + path.string() + ": " +
                          ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", value * 100.0);
  return buf;
}

std::string format_fluctuation(double value) {
  const double points = value * 100.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", std::abs(points));
  // A delta that rounds to 0.0 carries no direction.
  if (std::string(buf) == "0.0") return "0.0%";
  return (points < 0 ? std::string("↓") : std::string("↑")) + buf +
         "%";
}

std::string format_points(double value) {
  if (std::abs(value - std::round(value)) < 1e-9) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", value);
    return buf;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string to_markdown(const Table& table) {
  std::string out;
  out += "|";
  for (const std::string& h : table.headers) out += " " + h + " |";
  out += "\n|";
  for (std::size_t i = 0; i < table.headers.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : table.rows) {
    out += "|";
    for (const std::string& cell : row) out += " " + cell + " |";
    out += "\n";
  }
  return out;
}

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.headers.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_escape(table.headers[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json manifest_to_json(const RunManifest& manifest) {
  return nlohmann::json{{"run_id", manifest.run_id},
                        {"command", manifest.command},
                        {"corpus_ids", manifest.corpus_ids},
                        {"noise_spec", manifest.noise_spec},
                        {"template_id", manifest.template_id},
                        {"model", manifest.model},
                        {"metrics", manifest.metrics},
                        {"stats", manifest.stats},
                        {"artifacts", manifest.artifacts}};
}

void write_manifest(RunManifest manifest, const std::filesystem::path& path) {
  for (const std::string& artifact : manifest.artifacts) {
    if (!std::filesystem::exists(artifact)) {
      throw ValidationError("manifest references missing artifact: " +
                            artifact);
    }
  }
  if (manifest.run_id.empty()) {
    // Content-derived id: identical runs share an id, distinct runs differ.
    manifest.run_id = manifest.command + "-" +
                      sha256_hex(manifest_to_json(manifest).dump()).substr(0, 12);
  }
  write_file_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace noiseval
