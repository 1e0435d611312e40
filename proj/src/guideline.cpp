#include "parannot/guideline.hpp"

#include <algorithm>

#include "parannot/text.hpp"

namespace parannot {

bool GuidelineAnswers::consistent() const {
    if (paraphrase_in_context && !related) return false;
    if (universal_after_flags && !paraphrase_in_context) return false;
    return true;
}

const std::vector<DecisionNode>& decision_nodes() {
    static const std::vector<DecisionNode> nodes = {
        {"skip", "Can the pair be labeled at all?",
         "Use x for wrong-language, incomprehensible or identical texts. Use it sparingly."},
        {"related", "Is there any reasonable relation between the texts?",
         "Sharing a single proper name on otherwise different topics is not a relation."},
        {"context", "Do the texts mean the same in the present context?",
         "Same topic but a different main message is label 2."},
        {"generality", "Is one text more general than the other?",
         "The arrow points to the more general text. If each text is more detailed in a different "
         "aspect, the directional replacement fails and the label is 3."},
        {"universal", "Once the flagged differences are set aside, can each text replace the other in any context?",
         "Prefer 4 with flags over 3 when the flags account for the difference. When two labels both "
         "seem justified, choose the higher one."},
        {"flags", "Do the texts differ in style or by a minor deviation?",
         "s: register, tone, politeness or hedging. i: small traceable shifts such as tense, person, "
         "number or this/that."},
    };
    return nodes;
}

namespace {

const DecisionNode& node(std::string_view id) {
    const auto& nodes = decision_nodes();
    return *std::find_if(nodes.begin(), nodes.end(), [&](const DecisionNode& n) { return n.id == id; });
}

}  // namespace

AnnotatedLabel derive_label(const GuidelineAnswers& a) {
    if (!a.consistent()) {
        throw InconsistentAnswers(
            "inconsistent guideline answers: a paraphrase must be related and a universal paraphrase must "
            "hold in context");
    }
    if (a.skippable) return AnnotatedLabel::skip();
    if (!a.related) return AnnotatedLabel::unrelated();
    if (!a.paraphrase_in_context) return AnnotatedLabel::related();
    if (a.generality == Generality::Both) return AnnotatedLabel::context_paraphrase();
    if (!a.universal_after_flags) return AnnotatedLabel::context_paraphrase();

    FlagSet flags;
    if (a.generality == Generality::FormerMoreGeneral) flags.direction = Direction::FormerMoreGeneral;
    if (a.generality == Generality::LatterMoreGeneral) flags.direction = Direction::LatterMoreGeneral;
    flags.style = a.style_difference;
    flags.minor_deviation = a.minor_deviation;
    return AnnotatedLabel::universal(flags);
}

std::vector<DecisionNode> decision_path(const GuidelineAnswers& a) {
    std::vector<DecisionNode> path{node("skip")};
    if (a.skippable) return path;
    path.push_back(node("related"));
    if (!a.related) return path;
    path.push_back(node("context"));
    if (!a.paraphrase_in_context) return path;
    path.push_back(node("generality"));
    if (a.generality == Generality::Both) return path;
    path.push_back(node("universal"));
    if (!a.universal_after_flags) return path;
    path.push_back(node("flags"));
    return path;
}

std::string_view to_string(LintKind kind) {
    switch (kind) {
        case LintKind::IdenticalPair: return "IdenticalPair";
        case LintKind::WordOrderOnly: return "WordOrderOnly";
        case LintKind::PunctuationOnly: return "PunctuationOnly";
        case LintKind::SingleTokenDiff: return "SingleTokenDiff";
    }
    return "?";
}

namespace {

std::vector<std::string> lint_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (const auto& tok : text::split_whitespace(s)) {
        auto stripped = text::strip_punctuation(tok);
        if (!stripped.empty()) out.push_back(text::fold_case(stripped));
    }
    return out;
}

}  // namespace

std::vector<LintFinding> lint_pair(std::string_view text1, std::string_view text2) {
    std::vector<LintFinding> findings;
    if (text::normalize_whitespace(text1) == text::normalize_whitespace(text2)) {
        findings.push_back({LintKind::IdenticalPair, "texts are identical; assign x"});
        return findings;
    }

    const auto a = lint_tokens(text1);
    const auto b = lint_tokens(text2);
    if (a == b) {
        findings.push_back({LintKind::PunctuationOnly, "texts differ only in punctuation or letter case"});
        return findings;
    }

    auto sorted_a = a;
    auto sorted_b = b;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a == sorted_b) {
        findings.push_back({LintKind::WordOrderOnly, "texts differ only in word order"});
    }

    if (text::token_edit_distance(a, b) == 1) {
        findings.push_back({LintKind::SingleTokenDiff, "texts differ by a single token"});
    }
    return findings;
}

}  // namespace parannot
