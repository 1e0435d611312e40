#pragma once

// Annotation labels: base grade 1-4 or skip, plus the flags that may only
// decorate a universal (4) paraphrase.
//
// Surface syntax is a base character followed by flag characters:
//
//   label   := base4 flag* | base_other
//   base4   := '4'
//   base_other := '1' | '2' | '3' | 'x' | 'X'
//   flag    := '<' | '>' | 's' | 'S' | 'i' | 'I'     (each at most once)
//
// The canonical form orders flags as direction, 's', 'i' and uses lowercase.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace parannot {

enum class BaseLabel : std::uint8_t {
    Unrelated = 1,
    Related = 2,
    ContextParaphrase = 3,
    Universal = 4,
    Skip = 5,
};

/// '<' means the former text is more general, '>' the latter one.
enum class Direction : std::uint8_t {
    FormerMoreGeneral,
    LatterMoreGeneral,
};

struct FlagSet {
    std::optional<Direction> direction;
    bool style = false;
    bool minor_deviation = false;

    bool empty() const { return !direction && !style && !minor_deviation; }
    friend bool operator==(const FlagSet&, const FlagSet&) = default;
};

enum class LabelErrorCode : std::uint8_t {
    EmptyLabel,
    UnknownSymbol,
    DuplicateFlag,
    BothDirections,
    FlagOnNonUniversal,
    FlagsOnSkip,
};

std::string_view to_string(LabelErrorCode code);

class LabelError : public std::runtime_error {
public:
    LabelError(LabelErrorCode code, std::vector<LabelErrorCode> violations, const std::string& what);

    /// The primary reason the label was rejected.
    LabelErrorCode code() const { return code_; }
    /// Every constraint the input violates, primary code first.
    const std::vector<LabelErrorCode>& violations() const { return violations_; }

private:
    LabelErrorCode code_;
    std::vector<LabelErrorCode> violations_;
};

class AnnotatedLabel;

/// Either a constructed label or the complete list of violated constraints.
using ValidationResult = std::variant<AnnotatedLabel, std::vector<LabelErrorCode>>;

// Flags can only be attached through universal(); the remaining bases are
// constructed bare, so a flagged 1/2/3/x label is not representable.
class AnnotatedLabel {
public:
    static AnnotatedLabel unrelated() { return AnnotatedLabel(BaseLabel::Unrelated, {}); }
    static AnnotatedLabel related() { return AnnotatedLabel(BaseLabel::Related, {}); }
    static AnnotatedLabel context_paraphrase() { return AnnotatedLabel(BaseLabel::ContextParaphrase, {}); }
    static AnnotatedLabel skip() { return AnnotatedLabel(BaseLabel::Skip, {}); }
    static AnnotatedLabel universal(FlagSet flags = {}) { return AnnotatedLabel(BaseLabel::Universal, flags); }

    /// Bare label for any base.
    static AnnotatedLabel bare(BaseLabel base) { return AnnotatedLabel(base, {}); }

    BaseLabel base() const { return base_; }
    const FlagSet& flags() const { return flags_; }

    /// Dense index in [0, 16) following the order of all_labels().
    std::size_t index() const;

    friend bool operator==(const AnnotatedLabel&, const AnnotatedLabel&) = default;

private:
    AnnotatedLabel(BaseLabel base, FlagSet flags) : base_(base), flags_(flags) {}

    friend ValidationResult validate(BaseLabel base, const FlagSet& flags);

    BaseLabel base_;
    FlagSet flags_;
};

inline constexpr std::size_t kLabelCount = 16;

/// Every valid label, in index() order: 1, 2, 3, then the twelve 4-labels
/// (direction none/</>, then s, then i), then x.
const std::array<AnnotatedLabel, kLabelCount>& all_labels();

AnnotatedLabel parse_label(std::string_view text);
std::string format_label(const AnnotatedLabel& label);

ValidationResult validate(BaseLabel base, const FlagSet& flags);

/// Label for the same pair with text1 and text2 exchanged.
AnnotatedLabel swap(const AnnotatedLabel& label);

bool is_paraphrase(const AnnotatedLabel& label);

/// Positive (3/4) versus negative (1/2); Skip has no polarity.
std::optional<bool> polarity(const AnnotatedLabel& label);

enum class MatchLevel : std::uint8_t {
    Exact,
    BaseOnly,
    BothPositive,
    Disagree,
    SkipInvolved,
};

std::string_view to_string(MatchLevel level);

MatchLevel compare_labels(const AnnotatedLabel& a, const AnnotatedLabel& b);

char base_char(BaseLabel base);

}  // namespace parannot
