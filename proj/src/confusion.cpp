#include "noiseval/confusion.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "noiseval/errors.hpp"
#include "noiseval/unicode.hpp"

namespace noiseval {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string to_lower(std::string word) {
  std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return word;
}

// Parses a candidate run, dropping the key character and repeats.
std::vector<char32_t> parse_candidates(const std::string& run, char32_t self,
                                       const std::string& path,
                                       std::size_t line_no,
                                       ConfusionTable& table) {
  std::vector<char32_t> out;
  std::unordered_set<char32_t> seen;
  for (char32_t cp : utf8_decode(run)) {
    if (!is_cjk_unified(cp)) {
      throw ParseError(path, line_no,
                       "candidate is not a Han character: " + utf8_encode(cp));
    }
    if (cp == self) {
      ++table.self_references_stripped;
      continue;
    }
    if (!seen.insert(cp).second) {
      ++table.duplicate_candidates_stripped;
      continue;
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace

ConfusionTable load_confusion_table(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);

  ConfusionTable table;
  std::size_t records = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t line_no = i + 1;
    if (line.empty()) continue;

    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(path.string(), line_no,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    const std::u32string key = utf8_decode(fields[0]);
    if (key.size() != 1) {
      throw ParseError(path.string(), line_no,
                       "key must be a single character: '" + fields[0] + "'");
    }
    if (!is_cjk_unified(key[0])) {
      throw ParseError(path.string(), line_no,
                       "key is not a Han character: '" + fields[0] + "'");
    }
    if (fields[1].rfind("P:", 0) != 0 || fields[2].rfind("V:", 0) != 0) {
      throw ParseError(path.string(), line_no,
                       "expected P: and V: candidate sections");
    }

    ConfusionEntry entry;
    entry.character = key[0];
    entry.phonological = parse_candidates(fields[1].substr(2), entry.character,
                                          path.string(), line_no, table);
    entry.visual = parse_candidates(fields[2].substr(2), entry.character,
                                    path.string(), line_no, table);

    if (!table.entries.emplace(entry.character, std::move(entry)).second) {
      throw ParseError(path.string(), line_no,
                       "duplicate key character: '" + fields[0] + "'");
    }
    ++records;
  }
  if (records == 0) {
    throw ValidationError("confusion file has no records: " + path.string());
  }
  return table;
}

ConfusionTable load_confusion_table(const std::filesystem::path& path,
                                    const std::filesystem::path& pool_path) {
  ConfusionTable table = load_confusion_table(path);
  table.random_pool = load_random_pool(pool_path);
  return table;
}

std::vector<char32_t> load_random_pool(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<char32_t> pool;
  std::unordered_set<char32_t> seen;
  for (char32_t cp : utf8_decode(text)) {
    if (cp == '\n' || cp == '\r' || cp == ' ' || cp == '\t') continue;
    if (!is_cjk_unified(cp)) {
      throw ValidationError("random pool contains non-Han character '" +
                            utf8_encode(cp) + "': " + path.string());
    }
    if (!seen.insert(cp).second) {
      throw ValidationError("random pool contains duplicate character '" +
                            utf8_encode(cp) + "': " + path.string());
    }
    pool.push_back(cp);
  }
  if (pool.empty()) {
    throw ValidationError("random pool is empty: " + path.string());
  }
  return pool;
}

std::string serialize_confusion_table(const ConfusionTable& table) {
  std::string out;
  for (const auto& [ch, entry] : table.entries) {
    out += utf8_encode(ch);
    out += "\tP:";
    for (char32_t cp : entry.phonological) out += utf8_encode(cp);
    out += "\tV:";
    for (char32_t cp : entry.visual) out += utf8_encode(cp);
    out += '\n';
  }
  return out;
}

std::vector<char32_t> candidates_for(const ConfusionTable& table, char32_t ch,
                                     CandidateKind kind) {
  if (kind == CandidateKind::Random) {
    std::vector<char32_t> out;
    out.reserve(table.random_pool.size());
    for (char32_t cp : table.random_pool) {
      if (cp != ch) out.push_back(cp);
    }
    return out;
  }
  const ConfusionEntry* entry = table.find(ch);
  if (entry == nullptr) {
    throw LookupMissError("no confusion entry for character '" +
                          utf8_encode(ch) + "'");
  }
  return kind == CandidateKind::Phonological ? entry->phonological
                                             : entry->visual;
}

EnglishLexicons load_english_lexicons(
    const std::filesystem::path& deleted_path,
    const std::filesystem::path& verbs_path) {
  EnglishLexicons lex;

  {
    const auto lines = split_lines(read_file(deleted_path));
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::string word = to_lower(lines[i]);
      if (word.find_first_of(" \t") != std::string::npos) {
        throw ParseError(deleted_path.string(), i + 1,
                         "word contains whitespace: '" + word + "'");
      }
      if (!seen.insert(word).second) {
        throw ParseError(deleted_path.string(), i + 1,
                         "duplicate word: '" + word + "'");
      }
      lex.commonly_deleted.push_back(std::move(word));
    }
    if (lex.commonly_deleted.empty()) {
      throw ValidationError("commonly-deleted word list is empty: " +
                            deleted_path.string());
    }
  }

  {
    const auto lines = split_lines(read_file(verbs_path));
    std::size_t records = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string& line = lines[i];
      const std::size_t line_no = i + 1;
      if (line.empty()) continue;

      const auto fields = split(line, '\t');
      if (fields.size() != 2) {
        throw ParseError(verbs_path.string(), line_no,
                         "expected `lemma TAB forms`");
      }
      const std::string lemma = to_lower(fields[0]);
      if (lemma.empty()) {
        throw ParseError(verbs_path.string(), line_no, "empty lemma");
      }

      std::vector<std::string> forms;
      for (const std::string& raw : split(fields[1], ',')) {
        std::string form = to_lower(raw);
        if (form.empty()) {
          throw ParseError(verbs_path.string(), line_no, "empty verb form");
        }
        if (std::find(forms.begin(), forms.end(), form) == forms.end()) {
          forms.push_back(std::move(form));
        }
      }
      if (std::find(forms.begin(), forms.end(), lemma) == forms.end()) {
        forms.insert(forms.begin(), lemma);
      }
      if (forms.size() < 2) {
        throw ParseError(verbs_path.string(), line_no,
                         "lemma '" + lemma + "' has fewer than 2 forms");
      }
      if (lex.verb_forms.count(lemma) != 0) {
        throw ParseError(verbs_path.string(), line_no,
                         "duplicate lemma: '" + lemma + "'");
      }
      for (const std::string& form : forms) {
        lex.form_to_lemma.emplace(form, lemma);  // first lemma wins
      }
      lex.verb_forms.emplace(lemma, std::move(forms));
      ++records;
    }
    if (records == 0) {
      throw ValidationError("verb-form table is empty: " +
                            verbs_path.string());
    }
  }

  return lex;
}

}  // namespace noiseval
