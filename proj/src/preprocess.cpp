#include "stylo/preprocess.hpp"

#include <unicode/uchar.h>

#include <fstream>

#include "stylo/error.hpp"
#include "stylo/utf8.hpp"

namespace stylo {

bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    return u_ispunct(static_cast<UChar32>(cp));
}

bool is_sentence_terminator(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == U';';
}

namespace {

bool is_retained_in_sentence(char32_t cp) {
    return cp == U'.' || cp == U',' || cp == U'!' || cp == U'?' || cp == U';' || cp == U':';
}

bool is_space(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

std::u32string_view trim(std::u32string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

std::vector<std::u32string_view> split_tokens(std::u32string_view s) {
    std::vector<std::u32string_view> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) tokens.push_back(s.substr(i, j - i));
        i = j;
    }
    return tokens;
}

// Token with retained sentence punctuation stripped from both ends.
std::u32string_view token_core(std::u32string_view token) {
    std::size_t b = 0, e = token.size();
    while (b < e && is_retained_in_sentence(token[b])) ++b;
    while (e > b && is_retained_in_sentence(token[e - 1])) --e;
    return token.substr(b, e - b);
}

}  // namespace

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Load, "cannot open lexicon '" + path.string() + "'");
    Lexicon words;
    std::string line;
    while (std::getline(in, line)) {
        // Lexicon entries go through the same case folding as text tokens.
        auto word = clean(utf8::sanitize(line), CleanMode::Document);
        if (!word.empty()) words.insert(std::move(word));
    }
    return words;
}

std::vector<std::string> segment_sentences(std::string_view raw_text) {
    const auto text = utf8::decode(raw_text).text;
    std::vector<std::string> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        auto piece = trim(std::u32string_view(text).substr(start, end - start));
        if (!piece.empty()) out.push_back(utf8::encode(piece));
        start = end;
    };
    for (std::size_t i = 0; i < text.size(); ++i)
        if (is_sentence_terminator(text[i])) emit(i + 1);
    emit(text.size());
    return out;
}

std::string clean(std::string_view text, CleanMode mode, const Lexicon* lexicon) {
    const auto decoded = utf8::decode(text).text;
    std::u32string kept;
    kept.reserve(decoded.size());
    for (char32_t cp : decoded) {
        cp = static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
        if (u_isdigit(static_cast<UChar32>(cp))) continue;
        if (is_punctuation(cp) && !(mode == CleanMode::Sentence && is_retained_in_sentence(cp)))
            continue;
        kept.push_back(cp);
    }

    std::string out;
    out.reserve(kept.size());
    for (auto token : split_tokens(kept)) {
        if (lexicon) {
            auto core = token_core(token);
            if (!core.empty() && !lexicon->contains(utf8::encode(core))) continue;
        }
        if (!out.empty()) out.push_back(' ');
        for (char32_t cp : token) utf8::append(out, cp);
    }
    return out;
}

std::vector<Sentence> prepare_sentences(std::string_view doc_id, std::string_view raw_text,
                                        CleanMode mode, const Lexicon* lexicon) {
    std::vector<Sentence> out;
    for (const auto& piece : segment_sentences(raw_text)) {
        auto cleaned = clean(piece, mode, lexicon);
        if (cleaned.empty()) continue;
        out.push_back({std::string(doc_id), out.size(), std::move(cleaned)});
    }
    return out;
}

}  // namespace stylo
