#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "parannot/guideline.hpp"

using namespace parannot;

namespace {

std::vector<GuidelineAnswers> every_answer_vector() {
    std::vector<GuidelineAnswers> out;
    for (int bits = 0; bits < 64; ++bits) {
        for (auto g : {Generality::Neither, Generality::FormerMoreGeneral, Generality::LatterMoreGeneral,
                       Generality::Both}) {
            GuidelineAnswers a;
            a.skippable = bits & 1;
            a.related = bits & 2;
            a.paraphrase_in_context = bits & 4;
            a.universal_after_flags = bits & 8;
            a.style_difference = bits & 16;
            a.minor_deviation = bits & 32;
            a.generality = g;
            out.push_back(a);
        }
    }
    return out;
}

std::vector<LintKind> kinds(std::string_view a, std::string_view b) {
    std::vector<LintKind> out;
    for (const auto& f : lint_pair(a, b)) out.push_back(f.kind);
    return out;
}

}  // namespace

TEST_CASE("derive_label examples") {
    GuidelineAnswers a;
    CHECK(format_label(derive_label(a)) == "1");

    a.related = a.paraphrase_in_context = a.universal_after_flags = true;
    a.generality = Generality::LatterMoreGeneral;
    CHECK(format_label(derive_label(a)) == "4>");

    a.generality = Generality::Both;
    CHECK(format_label(derive_label(a)) == "3");

    GuidelineAnswers skip;
    skip.skippable = true;
    CHECK(format_label(derive_label(skip)) == "x");
    skip.related = skip.paraphrase_in_context = true;
    CHECK(format_label(derive_label(skip)) == "x");

    GuidelineAnswers related;
    related.related = true;
    CHECK(format_label(derive_label(related)) == "2");

    GuidelineAnswers context = related;
    context.paraphrase_in_context = true;
    context.style_difference = true;  // flags are irrelevant below 4
    CHECK(format_label(derive_label(context)) == "3");

    GuidelineAnswers full = context;
    full.universal_after_flags = true;
    full.minor_deviation = true;
    full.generality = Generality::FormerMoreGeneral;
    CHECK(format_label(derive_label(full)) == "4<si");
}

TEST_CASE("inconsistent answers are rejected") {
    GuidelineAnswers a;
    a.paraphrase_in_context = true;
    CHECK_FALSE(a.consistent());
    CHECK_THROWS_AS(derive_label(a), InconsistentAnswers);
    GuidelineAnswers b;
    b.related = true;
    b.universal_after_flags = true;
    CHECK_THROWS_AS(derive_label(b), InconsistentAnswers);
}

TEST_CASE("derive_label over every consistent answer vector") {
    std::set<std::string> image;
    std::size_t consistent = 0;
    for (const auto& a : every_answer_vector()) {
        const bool expect_consistent =
            (!a.paraphrase_in_context || a.related) && (!a.universal_after_flags || a.paraphrase_in_context);
        CHECK(a.consistent() == expect_consistent);
        if (!expect_consistent) continue;
        ++consistent;
        const auto l = derive_label(a);
        if (!l.flags().empty()) CHECK(l.base() == BaseLabel::Universal);
        image.insert(format_label(l));
        const auto path = decision_path(a);
        CHECK_FALSE(path.empty());
    }
    CHECK(consistent > 0);
    CHECK(image.size() == 16);
}

TEST_CASE("decision nodes carry guidance") {
    const auto& nodes = decision_nodes();
    CHECK(nodes.size() >= 5);
    for (const auto& n : nodes) {
        CHECK_FALSE(n.id.empty());
        CHECK_FALSE(n.question.empty());
    }
    const bool mentions_higher = std::any_of(nodes.begin(), nodes.end(), [](const DecisionNode& n) {
        return n.guidance.find("higher") != std::string_view::npos;
    });
    CHECK(mentions_higher);
}

TEST_CASE("lint examples") {
    CHECK(kinds("Katson", "Minä katson") == std::vector{LintKind::SingleTokenDiff});
    CHECK(kinds("Kuka minä sitä olen muuttamaan.", "Kuka minä olen sitä muuttamaan?") ==
          std::vector{LintKind::WordOrderOnly});
    CHECK(kinds("abc def", "abc def") == std::vector{LintKind::IdenticalPair});
    CHECK(kinds("  abc   def ", "abc def") == std::vector{LintKind::IdenticalPair});
    CHECK(kinds("Päästäkää minut!", "Päästä minut!") == std::vector{LintKind::SingleTokenDiff});
    CHECK(kinds("Ei teillä ole todisteita.", "Sinulla ei ole todisteita.").empty());
    CHECK(kinds("Hän on täällä.", "Hän on täällä!") == std::vector{LintKind::PunctuationOnly});
    CHECK(kinds("Hän on täällä .", "Hän on täällä") == std::vector{LintKind::PunctuationOnly});
    CHECK(kinds("ÄLÄ mene", "älä mene") == std::vector{LintKind::PunctuationOnly});
    CHECK(kinds("a b c", "x y z").empty());
}

TEST_CASE("lint fixture of elementary variation") {
    std::ifstream in(PARANNOT_FIXTURES "/elementary_variation.jsonl");
    REQUIRE(in);
    const std::vector<std::vector<LintKind>> expected{
        {LintKind::SingleTokenDiff}, {}, {LintKind::WordOrderOnly}, {LintKind::SingleTokenDiff}};
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        REQUIRE(i < expected.size());
        CHECK(kinds(j["text1"].get<std::string>(), j["text2"].get<std::string>()) == expected[i]);
        ++i;
    }
    CHECK(i == expected.size());
}

TEST_CASE("property: lint is symmetric and identical pairs are flagged") {
    std::mt19937 rng(5);
    const std::vector<std::string> words{"minä", "sinä", "katson", "Katson", "ei", "ole", "!", ".", "talo,", "Hän"};
    for (int n = 0; n < 1000; ++n) {
        std::string a, b;
        const auto la = rng() % 5, lb = rng() % 5;
        for (std::size_t k = 0; k <= la; ++k) a += words[rng() % words.size()] + (rng() % 4 ? " " : "  ");
        for (std::size_t k = 0; k <= lb; ++k) b += words[rng() % words.size()] + " ";
        const auto ab = kinds(a, b);
        CHECK(ab == kinds(b, a));
        const auto aa = kinds(a, a);
        CHECK(aa == std::vector{LintKind::IdenticalPair});
        if (std::find(ab.begin(), ab.end(), LintKind::IdenticalPair) != ab.end()) CHECK(ab.size() == 1);
    }
}
