#pragma once

// Decision tree from structured annotator judgments to a label, and lint
// heuristics that flag degenerate candidate pairs.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parannot/label.hpp"

namespace parannot {

enum class Generality {
    Neither,
    FormerMoreGeneral,
    LatterMoreGeneral,
    Both,  // each text more detailed in a different aspect
};

struct GuidelineAnswers {
    bool skippable = false;  // wrong language, not understandable, or identical
    bool related = false;
    bool paraphrase_in_context = false;
    Generality generality = Generality::Neither;
    bool universal_after_flags = false;  // substitution test holds once flagged differences are set aside
    bool style_difference = false;
    bool minor_deviation = false;

    /// paraphrase_in_context implies related; universal_after_flags implies
    /// paraphrase_in_context.
    bool consistent() const;
};

class InconsistentAnswers : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

AnnotatedLabel derive_label(const GuidelineAnswers& answers);

/// One question of the decision tree together with the hint shown to the
/// annotator at that point.
struct DecisionNode {
    std::string_view id;
    std::string_view question;
    std::string_view guidance;
};

const std::vector<DecisionNode>& decision_nodes();

/// Nodes visited by derive_label for these answers, in evaluation order.
std::vector<DecisionNode> decision_path(const GuidelineAnswers& answers);

enum class LintKind {
    IdenticalPair,
    WordOrderOnly,
    PunctuationOnly,
    SingleTokenDiff,
};

std::string_view to_string(LintKind kind);

struct LintFinding {
    LintKind kind;
    std::string detail;
};

/// All lint findings for a candidate pair. IdenticalPair is exclusive; the
/// other kinds compare case-folded tokens with surrounding punctuation
/// stripped and punctuation-only tokens dropped.
std::vector<LintFinding> lint_pair(std::string_view text1, std::string_view text2);

}  // namespace parannot
