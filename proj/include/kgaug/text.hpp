#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgaug {

/// Trims surrounding whitespace, collapses internal runs of whitespace to a
/// single space and applies Unicode NFC. Used for every label that crosses a
/// file boundary so that joins between the triples and hierarchy files agree.
std::string normalize_label(std::string_view raw);

/// Splits on whitespace; CJK ideographs (and kana/hangul) become one token per
/// character since those scripts carry no word delimiters.
std::vector<std::string> tokenize(std::string_view text);

bool is_cjk_codepoint(char32_t cp);

}  // namespace kgaug
