// Small UTF-8 and character-class helpers shared by the text stages.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace subpair::text {

// Validates UTF-8 (rejects overlong forms, surrogates, out-of-range
// scalars). On failure optionally reports the byte offset of the first
// bad sequence.
bool is_valid_utf8(std::string_view bytes, std::size_t* first_bad_offset = nullptr);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

// Invalid sequences become U+FFFD; never throws.
std::u32string decode_utf8_lossy(std::string_view bytes);

bool is_space(char32_t cp);

// Letter-or-digit over the major scripts (Latin, Greek, Cyrillic,
// Arabic/Persian, Hebrew, Indic, CJK, Hangul, ...). Precise enough to
// decide whether a line carries translatable content.
bool is_letter_or_digit(char32_t cp);
bool has_letter_or_digit(std::string_view utf8);

// Every whitespace run (including newlines and Unicode spaces) becomes one
// ASCII space; leading/trailing whitespace is dropped.
std::string collapse_whitespace(std::string_view utf8);

// Legacy codepage decoding for subtitle files that predate UTF-8.
std::string decode_windows1252(std::string_view bytes);
std::string decode_windows1256(std::string_view bytes);

}  // namespace subpair::text
