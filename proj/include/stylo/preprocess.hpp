#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace stylo {

// Document mode strips all punctuation; sentence mode keeps . , ! ? ; :
enum class CleanMode { Document, Sentence };

struct Sentence {
    std::string doc_id;
    std::size_t index = 0;  // position within the document's sentence list
    std::string text;

    friend bool operator==(const Sentence&, const Sentence&) = default;
};

using Lexicon = std::unordered_set<std::string>;

// One lowercase word per line; blank lines ignored.
Lexicon load_lexicon(const std::filesystem::path& path);

// Splits after each of . ! ? ; keeping the terminator, trimming whitespace and
// dropping empty pieces. Trailing text without a terminator forms a last piece.
std::vector<std::string> segment_sentences(std::string_view raw_text);

// Cleaning pipeline, applied in order:
//   1. lowercase
//   2. delete digits
//   3. delete punctuation (ASCII punctuation and Unicode category P);
//      sentence mode keeps . , ! ? ; :
//   4. with a lexicon, drop tokens not in it
//   5. collapse whitespace runs to one space and trim
std::string clean(std::string_view text, CleanMode mode, const Lexicon* lexicon = nullptr);

// Segment then clean every sentence; sentences that clean to nothing are
// dropped and the survivors renumbered from 0.
std::vector<Sentence> prepare_sentences(std::string_view doc_id, std::string_view raw_text,
                                        CleanMode mode, const Lexicon* lexicon = nullptr);

bool is_punctuation(char32_t cp);
bool is_sentence_terminator(char32_t cp);

}  // namespace stylo
