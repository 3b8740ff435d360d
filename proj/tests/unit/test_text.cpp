#include <doctest.h>

#include <random>

#include "reliance/diff.hpp"
#include "reliance/similarity.hpp"
#include "reliance/text.hpp"

using namespace reliance;

TEST_CASE("snapshot diff examples") {
    CHECK(diff_snapshots("abc", "abc").empty());
    const auto ins = diff_snapshots("ab", "aXYb");
    CHECK(ins.offset == 1);
    CHECK(ins.deleted.empty());
    CHECK(ins.inserted == "XY");
    const auto rep = diff_snapshots("let x=1;", "let y=2;");
    CHECK(rep.offset == 4);
    CHECK(rep.deleted == "x=1");
    CHECK(rep.inserted == "y=2");
}

TEST_CASE("diff is minimal and invertible against a brute-force alignment") {
    std::mt19937_64 rng(77);
    const std::string alphabet = "ab{};\n";
    for (int rep = 0; rep < 2000; ++rep) {
        std::string a, b;
        for (std::size_t i = rng() % 12; i > 0; --i) a += alphabet[rng() % alphabet.size()];
        b = a;
        for (int k = static_cast<int>(rng() % 3); k > 0; --k) {
            const auto pos = b.empty() ? 0 : rng() % (b.size() + 1);
            if (rng() % 2 && pos < b.size()) b.erase(pos, 1 + rng() % 2);
            else b.insert(pos, std::string(1 + rng() % 3, alphabet[rng() % alphabet.size()]));
        }
        const auto d = diff_snapshots(a, b);
        CHECK(apply_delta(a, d) == b);
        // Brute force: the largest kept prefix + suffix over every split.
        std::size_t best = 0;
        for (std::size_t p = 0; p <= std::min(a.size(), b.size()); ++p) {
            if (a.compare(0, p, b, 0, p) != 0) break;
            for (std::size_t s = 0; p + s <= std::min(a.size(), b.size()); ++s) {
                if (a.compare(a.size() - s, s, b, b.size() - s, s) != 0) break;
                best = std::max(best, p + s);
            }
        }
        CHECK(a.size() - d.deleted.size() == best);
    }
}

TEST_CASE("diff never splits a UTF-8 sequence") {
    // U+00E9 and U+00E8 share their lead byte.
    const auto d = diff_snapshots("caf\xC3\xA9", "caf\xC3\xA8");
    CHECK(d.offset == 3);
    CHECK(d.deleted == "\xC3\xA9");
    CHECK(d.inserted == "\xC3\xA8");
}

TEST_CASE("text similarity") {
    CHECK(text_similarity("abc", "abc") == 1.0);
    CHECK(text_similarity("abc", "xyz") == 0.0);
    CHECK(text_similarity("kitten", "sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
    CHECK(text_similarity("", "") == 1.0);
    CHECK(text_similarity("  Hello   World ", "hello world") == 1.0);
}

TEST_CASE("word and identifier tokens") {
    CHECK(text::words("Don't use this.todos!") == std::vector<std::string>{"don't", "use", "this", "todos"});
    CHECK(text::identifiers("this.todos.push(x_1)") == std::vector<std::string>{"this", "todos", "push", "x_1"});
    CHECK(text::find_term("use v-for here", "v-for") == 4);
    CHECK(text::find_term("methodsx", "methods") == std::string::npos);
}
