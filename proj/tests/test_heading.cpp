#include <doctest.h>

#include <algorithm>
#include <random>

#include "parannot/heading.hpp"
#include "parannot/text.hpp"

using namespace parannot;

namespace {

const std::string kIraq = "Irakin levottomuudet jatkuvat – AFP: Shiiajohtajan kotia pommitettiin lennokista";

// A heading of `n` segments built from unique words, so no deletion can be
// mistaken for another.
SegmentedHeading random_heading(std::mt19937& rng, int& word_counter) {
    const auto& delims = default_delimiters();
    SegmentedHeading h;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int s = 0; s < n; ++s) {
        std::string seg;
        const int words = 1 + static_cast<int>(rng() % 5);
        for (int w = 0; w < words; ++w) {
            if (w) seg += ' ';
            seg += (rng() % 2 ? "sana" : "Äänestys") + std::to_string(word_counter++);
        }
        h.segments.push_back(seg);
        if (s + 1 < n) h.delimiters.push_back(delims[rng() % delims.size()]);
    }
    return h;
}

}  // namespace

TEST_CASE("segment examples") {
    const auto h = segment_heading(kIraq);
    CHECK(h.segments ==
          std::vector<std::string>{"Irakin levottomuudet jatkuvat", "AFP", "Shiiajohtajan kotia pommitettiin lennokista"});
    CHECK(h.delimiters == std::vector<std::string>{" – ", ": "});
    CHECK(h.join() == kIraq);

    CHECK(segment_heading("No delimiters here").segments.size() == 1);

    const auto abc = segment_heading("a; b; c");
    CHECK(abc.segments == std::vector<std::string>{"a", "b", "c"});
    CHECK(abc.delimiters == std::vector<std::string>{"; ", "; "});

    // Hyphenated compounds stay whole.
    CHECK(segment_heading("Uusi-Seelanti ja 4-vuotias").segments.size() == 1);
    CHECK(segment_heading("a — b | c - d").segments.size() == 4);
}

TEST_CASE("segmentation skips splits that leave a blank part") {
    const auto h = segment_heading(": a");
    CHECK(h.segments.size() == 1);
    CHECK(h.join() == ": a");
    const auto t = segment_heading("a: ");
    CHECK(t.segments.size() == 1);
    CHECK(t.join() == "a: ");
}

TEST_CASE("validate_edit examples") {
    CHECK(validate_edit(kIraq, "Irakin levottomuudet jatkuvat: Shiiajohtajan kotia pommitettiin lennokista") ==
          EditVerdict::Valid);
    CHECK(validate_edit(kIraq, "Irakin levottomuudet jatkuvat – Shiiajohtajan kotia pommitettiin lennokista") ==
          EditVerdict::Valid);
    CHECK(validate_edit(kIraq, "Irakin levottomuudet jatkuvat") == EditVerdict::Valid);
    CHECK(validate_edit(kIraq, "AFP: Shiiajohtajan kotia pommitettiin lennokista") == EditVerdict::Valid);
    CHECK(validate_edit(kIraq, kIraq) == EditVerdict::Identity);
    CHECK(validate_edit("a – b", "a extra – b") == EditVerdict::NotASegmentDeletion);
    CHECK(validate_edit("Poliisi tutkii asiaa tarkasti", "Poliisi tutkii tarkasti") == EditVerdict::NotASegmentDeletion);
    CHECK(validate_edit("a – b", "") == EditVerdict::AllSegmentsDeleted);
    CHECK(validate_edit("a – b", "  ") == EditVerdict::AllSegmentsDeleted);
    // A delimiter that did not lie between the kept parts is not allowed.
    CHECK(validate_edit("a – b; c", "a; b") == EditVerdict::NotASegmentDeletion);
    CHECK(validate_edit("a – b; c", "b – c") == EditVerdict::NotASegmentDeletion);
    CHECK(validate_edit("a – b; c", "a – c") == EditVerdict::Valid);
    CHECK(validate_edit("a – b; c", "a; c") == EditVerdict::Valid);
    // Reordering is not a deletion.
    CHECK(validate_edit("a – b", "b – a") == EditVerdict::NotASegmentDeletion);
}

TEST_CASE("custom delimiter inventory") {
    HeadingSegmenter seg({" / "});
    const auto h = seg.segment("a / b: c");
    CHECK(h.segments == std::vector<std::string>{"a", "b: c"});
    CHECK(seg.validate_edit("a / b: c", "b: c") == EditVerdict::Valid);
}

TEST_CASE("post-edit directive") {
    CHECK(check_post_edit_pair("sama otsikko", "sama otsikko") == PostEditDirective::AssignSkipAndRewrite);
    CHECK(check_post_edit_pair("sama otsikko ", "sama otsikko") == PostEditDirective::AssignSkipAndRewrite);
    CHECK_FALSE(check_post_edit_pair("yksi", "kaksi").has_value());
    // Edited heading becomes identical to the other text of the pair.
    const std::string other = "Irakin levottomuudet jatkuvat";
    const std::string edited = "Irakin levottomuudet jatkuvat";
    REQUIRE(validate_edit(kIraq, edited) == EditVerdict::Valid);
    CHECK(check_post_edit_pair(edited, other) == PostEditDirective::AssignSkipAndRewrite);
}

TEST_CASE("property: segmentation rejoins to the input") {
    std::mt19937 rng(17);
    const std::vector<std::string> pieces{"a", "ä", "b", " ", "-", "–", "—", ";", ":", "|", " – ", " - ", "; ", ": ", " | ", " — ", "\t"};
    const auto& delims = default_delimiters();
    for (int n = 0; n < 2000; ++n) {
        std::string s;
        const auto len = rng() % 12;
        for (std::size_t k = 0; k < len; ++k) s += pieces[rng() % pieces.size()];
        const auto h = segment_heading(s);
        CHECK(h.join() == s);
        REQUIRE(h.segments.size() == h.delimiters.size() + 1);
        for (const auto& d : h.delimiters) CHECK(std::find(delims.begin(), delims.end(), d) != delims.end());
        if (h.segments.size() > 1) {
            for (const auto& seg : h.segments) CHECK_FALSE(text::is_blank(seg));
        }
        CHECK(validate_edit(s.empty() ? "x" : s, s.empty() ? "x" : s) == EditVerdict::Identity);
    }
}

TEST_CASE("property: whole-segment deletions are valid") {
    std::mt19937 rng(23);
    int counter = 0;
    for (int n = 0; n < 2000; ++n) {
        const auto h = random_heading(rng, counter);
        const auto original = h.join();
        REQUIRE(segment_heading(original).segments == h.segments);
        const std::size_t count = h.segments.size();
        std::vector<std::size_t> kept;
        while (kept.empty()) {
            kept.clear();
            for (std::size_t i = 0; i < count; ++i) {
                if (rng() % 2) kept.push_back(i);
            }
        }
        std::string edited = h.segments[kept[0]];
        for (std::size_t k = 1; k < kept.size(); ++k) {
            const auto lo = kept[k - 1], hi = kept[k];
            edited += h.delimiters[lo + rng() % (hi - lo)];
            edited += h.segments[hi];
        }
        const auto verdict = validate_edit(original, edited);
        CHECK(accepted(verdict));
        CHECK((verdict == EditVerdict::Identity) == (edited == original));
    }
}

TEST_CASE("property: mid-sentence word deletions are rejected") {
    std::mt19937 rng(29);
    int counter = 0;
    int generated = 0;
    while (generated < 1000) {
        const auto h = random_heading(rng, counter);
        const auto idx = rng() % h.segments.size();
        auto words = text::split_whitespace(h.segments[idx]);
        if (words.size() < 3) continue;
        words.erase(words.begin() + 1 + static_cast<long>(rng() % (words.size() - 2)));
        auto copy = h;
        copy.segments[idx].clear();
        for (std::size_t w = 0; w < words.size(); ++w) copy.segments[idx] += (w ? " " : "") + words[w];
        CHECK(validate_edit(h.join(), copy.join()) == EditVerdict::NotASegmentDeletion);
        ++generated;
    }
}

TEST_CASE("property: a longer edit is never valid") {
    std::mt19937 rng(31);
    int counter = 0;
    for (int n = 0; n < 1000; ++n) {
        const auto h = random_heading(rng, counter);
        auto original = h.join();
        auto edited = original;
        edited.insert(rng() % (edited.size() + 1), rng() % 2 ? " lisäys" : "; x");
        CHECK(validate_edit(original, edited) != EditVerdict::Valid);
    }
}
