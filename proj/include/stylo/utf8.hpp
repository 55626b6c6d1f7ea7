#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace stylo::utf8 {

struct Decoded {
    std::u32string text;
    std::size_t replaced = 0;  // ill-formed sequences mapped to U+FFFD
};

Decoded decode(std::string_view bytes);
std::string encode(std::u32string_view text);
void append(std::string& out, char32_t cp);

// Re-encode `bytes` with every ill-formed sequence replaced by U+FFFD.
std::string sanitize(std::string_view bytes, std::size_t* replaced = nullptr);

}  // namespace stylo::utf8
