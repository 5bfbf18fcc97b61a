#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace embkit {

// Decodes UTF-8, throwing DataError on an invalid sequence. When a source
// name is given the error message is "<source>: invalid UTF-8 at byte <off>";
// base_offset shifts the reported offset (for per-line decoding of a file).
std::u32string utf8_decode(std::string_view s, std::string_view source_name = {},
                           size_t base_offset = 0);

std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t c);

// Splits on runs of ASCII whitespace; never returns empty tokens.
std::vector<std::string> split_whitespace(std::string_view line);

void ascii_lowercase_inplace(std::string& s);

}  // namespace embkit
