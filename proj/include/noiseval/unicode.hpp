#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace noiseval {

// Decodes UTF-8 into codepoints. Throws ValidationError on malformed input
// (truncated sequences, overlong encodings, surrogates, out-of-range values).
std::u32string utf8_decode(std::string_view text);

std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t codepoint);

std::size_t codepoint_count(std::string_view text);

// CJK Unified Ideographs, including extensions A-F. Compatibility
// ideographs, kana, and punctuation are excluded.
bool is_cjk_unified(char32_t codepoint);

}  // namespace noiseval
