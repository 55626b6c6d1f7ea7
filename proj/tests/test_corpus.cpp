#include <doctest.h>

#include <fstream>

#include "stylo/corpus.hpp"
#include "stylo/error.hpp"
#include "support/synth.hpp"

using namespace stylo;
using stylo::testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a stylo::Error");
    return ErrorKind::Io;
}

}  // namespace

TEST_CASE("authors are indexed by first appearance, documents keep manifest order") {
    TempDir dir("corpus");
    write(dir / "1.txt", "Gallia est omnis divisa.");
    write(dir / "2.txt", "Arma virumque cano.");
    write(dir / "3.txt", "Quo usque tandem.");
    write_manifest(dir / "m.json", {{"d1", "A", "t1", "1.txt"}, {"d2", "B", "t2", "2.txt"}, {"d3", "A", "t3", "3.txt"}});

    const auto corpus = load_corpus(dir / "m.json");
    REQUIRE(corpus.authors().size() == 2);
    CHECK(corpus.authors()[0] == AuthorId{0, "A"});
    CHECK(corpus.authors()[1] == AuthorId{1, "B"});
    REQUIRE(corpus.documents().size() == 3);
    CHECK(corpus.documents()[0].doc_id == "d1");
    CHECK(corpus.documents()[1].doc_id == "d2");
    CHECK(corpus.documents()[2].author.index == 0);
    CHECK(corpus.documents()[1].raw_text == "Arma virumque cano.");

    // Same manifest bytes, same corpus.
    CHECK(load_corpus(dir / "m.json") == corpus);
}

TEST_CASE("missing text file is a load error naming the path") {
    TempDir dir("corpus");
    write_manifest(dir / "m.json", {{"d1", "A", "t", "nope.txt"}});
    try {
        load_corpus(dir / "m.json");
        FAIL("expected load error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Load);
        CHECK(std::string(e.what()).find("nope.txt") != std::string::npos);
    }
}

TEST_CASE("manifest validation errors") {
    TempDir dir("corpus");
    write(dir / "1.txt", "text");
    SUBCASE("duplicate doc_id") {
        write_manifest(dir / "m.json", {{"d1", "A", "t", "1.txt"}, {"d1", "B", "t", "1.txt"}});
        CHECK(kind_of([&] { load_corpus(dir / "m.json"); }) == ErrorKind::Validation);
    }
    SUBCASE("empty manifest") {
        write(dir / "m.json", "[]");
        CHECK(kind_of([&] { load_corpus(dir / "m.json"); }) == ErrorKind::Validation);
    }
    SUBCASE("unexpected key") {
        write(dir / "m.json", R"([{"doc_id":"d","author_name":"A","title":"t","text_path":"1.txt","year":1}])");
        CHECK(kind_of([&] { load_corpus(dir / "m.json"); }) == ErrorKind::Validation);
    }
    SUBCASE("whitespace-only text") {
        write(dir / "blank.txt", "  \n\t ");
        write_manifest(dir / "m.json", {{"d1", "A", "t", "blank.txt"}});
        CHECK(kind_of([&] { load_corpus(dir / "m.json"); }) == ErrorKind::Validation);
    }
    SUBCASE("missing manifest") {
        CHECK(kind_of([&] { load_corpus(dir / "absent.json"); }) == ErrorKind::Load);
    }
}

TEST_CASE("invalid UTF-8 bytes are replaced and counted") {
    TempDir dir("corpus");
    write(dir / "1.txt", std::string("ab\xff" "c\xc3", 5));
    write_manifest(dir / "m.json", {{"d1", "A", "t", "1.txt"}});
    const auto corpus = load_corpus(dir / "m.json");
    CHECK(corpus.replaced_sequences() == 2);
    CHECK(corpus.documents()[0].raw_text == "ab\xEF\xBF\xBD" "c\xEF\xBF\xBD");
}

TEST_CASE("39 texts over 22 authors") {
    TempDir dir("corpus");
    std::vector<ManifestEntry> entries;
    for (int i = 0; i < 39; ++i) {
        const auto file = std::to_string(i) + ".txt";
        write(dir / file, "Lorem ipsum " + std::to_string(i) + ".");
        entries.push_back({"doc" + std::to_string(i), "author" + std::to_string(i % 22), "t", file});
    }
    write_manifest(dir / "m.json", entries);
    const auto corpus = load_corpus(dir / "m.json");
    CHECK(corpus.authors().size() == 22);
    CHECK(corpus.documents().size() == 39);

    std::vector<std::pair<std::string, std::size_t>> units;
    for (const auto& d : corpus.documents()) units.emplace_back(d.doc_id, 1);
    const auto labels = label_vector(corpus, units, Granularity::Document);
    CHECK(labels.size() == 39);
    for (int l : labels.labels) CHECK((l >= 0 && l < 22));
}

TEST_CASE("label_vector expands unit counts in input order") {
    TempDir dir("corpus");
    write(dir / "1.txt", "x");
    write(dir / "2.txt", "y");
    write_manifest(dir / "m.json", {{"d1", "A", "t", "1.txt"}, {"d2", "B", "t", "2.txt"}});
    const auto corpus = load_corpus(dir / "m.json");

    CHECK(label_vector(corpus, {{"d1", 2}, {"d2", 1}}).labels == std::vector<int>{0, 0, 1});
    CHECK(label_vector(corpus, {}).labels.empty());
    CHECK(label_vector(corpus, {{"d2", 0}, {"d1", 1}}).labels == std::vector<int>{0});
    CHECK(kind_of([&] { label_vector(corpus, {{"d9", 1}}); }) == ErrorKind::Validation);

    // Length is the sum of the counts; recovered labels are corpus authors.
    const auto lv = label_vector(corpus, {{"d1", 3}, {"d2", 4}, {"d1", 0}});
    CHECK(lv.size() == 7);
    for (int l : lv.labels) CHECK((l == 0 || l == 1));
}
