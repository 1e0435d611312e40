#include "parannot/label.hpp"

#include <algorithm>

namespace parannot {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::optional<BaseLabel> base_from_char(char c) {
    switch (c) {
        case '1': return BaseLabel::Unrelated;
        case '2': return BaseLabel::Related;
        case '3': return BaseLabel::ContextParaphrase;
        case '4': return BaseLabel::Universal;
        case 'x':
        case 'X': return BaseLabel::Skip;
        default: return std::nullopt;
    }
}

std::string describe(std::string_view input, const std::string& reason) {
    std::string msg = "invalid label \"";
    msg.append(input);
    msg += "\": ";
    msg += reason;
    return msg;
}

}  // namespace

std::string_view to_string(LabelErrorCode code) {
    switch (code) {
        case LabelErrorCode::EmptyLabel: return "EmptyLabel";
        case LabelErrorCode::UnknownSymbol: return "UnknownSymbol";
        case LabelErrorCode::DuplicateFlag: return "DuplicateFlag";
        case LabelErrorCode::BothDirections: return "BothDirections";
        case LabelErrorCode::FlagOnNonUniversal: return "FlagOnNonUniversal";
        case LabelErrorCode::FlagsOnSkip: return "FlagsOnSkip";
    }
    return "?";
}

LabelError::LabelError(LabelErrorCode code, std::vector<LabelErrorCode> violations, const std::string& what)
    : std::runtime_error(what), code_(code), violations_(std::move(violations)) {}

std::size_t AnnotatedLabel::index() const {
    switch (base_) {
        case BaseLabel::Unrelated: return 0;
        case BaseLabel::Related: return 1;
        case BaseLabel::ContextParaphrase: return 2;
        case BaseLabel::Skip: return 15;
        case BaseLabel::Universal: break;
    }
    std::size_t dir = 0;
    if (flags_.direction == Direction::FormerMoreGeneral) dir = 1;
    if (flags_.direction == Direction::LatterMoreGeneral) dir = 2;
    return 3 + dir * 4 + (flags_.style ? 2 : 0) + (flags_.minor_deviation ? 1 : 0);
}

const std::array<AnnotatedLabel, kLabelCount>& all_labels() {
    static const auto labels = [] {
        std::vector<AnnotatedLabel> out{AnnotatedLabel::unrelated(), AnnotatedLabel::related(),
                                        AnnotatedLabel::context_paraphrase()};
        const std::optional<Direction> dirs[] = {std::nullopt, Direction::FormerMoreGeneral,
                                                 Direction::LatterMoreGeneral};
        for (const auto& dir : dirs) {
            for (bool style : {false, true}) {
                for (bool minor : {false, true}) {
                    out.push_back(AnnotatedLabel::universal({dir, style, minor}));
                }
            }
        }
        out.push_back(AnnotatedLabel::skip());
        std::array<AnnotatedLabel, kLabelCount> arr{
            out[0], out[1], out[2], out[3], out[4], out[5], out[6], out[7],
            out[8], out[9], out[10], out[11], out[12], out[13], out[14], out[15]};
        return arr;
    }();
    return labels;
}

char base_char(BaseLabel base) {
    switch (base) {
        case BaseLabel::Unrelated: return '1';
        case BaseLabel::Related: return '2';
        case BaseLabel::ContextParaphrase: return '3';
        case BaseLabel::Universal: return '4';
        case BaseLabel::Skip: return 'x';
    }
    return '?';
}

AnnotatedLabel parse_label(std::string_view text) {
    const std::string_view body = trim(text);
    if (body.empty()) {
        throw LabelError(LabelErrorCode::EmptyLabel, {LabelErrorCode::EmptyLabel}, describe(text, "empty label"));
    }

    const auto base = base_from_char(body.front());
    if (!base) {
        throw LabelError(LabelErrorCode::UnknownSymbol, {LabelErrorCode::UnknownSymbol},
                         describe(text, std::string("unknown base symbol '") + body.front() + "'"));
    }

    int former = 0;
    int latter = 0;
    int style = 0;
    int minor = 0;
    for (char c : body.substr(1)) {
        switch (c) {
            case '<': ++former; break;
            case '>': ++latter; break;
            case 's':
            case 'S': ++style; break;
            case 'i':
            case 'I': ++minor; break;
            default:
                throw LabelError(LabelErrorCode::UnknownSymbol, {LabelErrorCode::UnknownSymbol},
                                 describe(text, std::string("unknown symbol '") + c + "'"));
        }
    }

    std::vector<LabelErrorCode> violations;
    const bool has_flags = body.size() > 1;
    if (has_flags && *base != BaseLabel::Universal) {
        violations.push_back(LabelErrorCode::FlagOnNonUniversal);
        if (*base == BaseLabel::Skip) violations.push_back(LabelErrorCode::FlagsOnSkip);
    }
    if (former > 1 || latter > 1 || style > 1 || minor > 1) violations.push_back(LabelErrorCode::DuplicateFlag);
    if (former > 0 && latter > 0) violations.push_back(LabelErrorCode::BothDirections);

    if (!violations.empty()) {
        std::string reason;
        for (auto v : violations) {
            if (!reason.empty()) reason += ", ";
            reason += to_string(v);
        }
        const auto primary = violations.front();
        throw LabelError(primary, std::move(violations), describe(text, reason));
    }

    if (*base != BaseLabel::Universal) return AnnotatedLabel::bare(*base);

    FlagSet flags;
    if (former) flags.direction = Direction::FormerMoreGeneral;
    if (latter) flags.direction = Direction::LatterMoreGeneral;
    flags.style = style > 0;
    flags.minor_deviation = minor > 0;
    return AnnotatedLabel::universal(flags);
}

std::string format_label(const AnnotatedLabel& label) {
    std::string out(1, base_char(label.base()));
    const auto& f = label.flags();
    if (f.direction == Direction::FormerMoreGeneral) out += '<';
    if (f.direction == Direction::LatterMoreGeneral) out += '>';
    if (f.style) out += 's';
    if (f.minor_deviation) out += 'i';
    return out;
}

ValidationResult validate(BaseLabel base, const FlagSet& flags) {
    std::vector<LabelErrorCode> violations;
    if (!flags.empty() && base != BaseLabel::Universal) violations.push_back(LabelErrorCode::FlagOnNonUniversal);
    if (!flags.empty() && base == BaseLabel::Skip) violations.push_back(LabelErrorCode::FlagsOnSkip);
    if (!violations.empty()) return violations;
    return AnnotatedLabel(base, base == BaseLabel::Universal ? flags : FlagSet{});
}

AnnotatedLabel swap(const AnnotatedLabel& label) {
    if (!label.flags().direction) return label;
    FlagSet flags = label.flags();
    flags.direction = *flags.direction == Direction::FormerMoreGeneral ? Direction::LatterMoreGeneral
                                                                       : Direction::FormerMoreGeneral;
    return AnnotatedLabel::universal(flags);
}

bool is_paraphrase(const AnnotatedLabel& label) {
    return label.base() == BaseLabel::ContextParaphrase || label.base() == BaseLabel::Universal;
}

std::optional<bool> polarity(const AnnotatedLabel& label) {
    if (label.base() == BaseLabel::Skip) return std::nullopt;
    return is_paraphrase(label);
}

std::string_view to_string(MatchLevel level) {
    switch (level) {
        case MatchLevel::Exact: return "Exact";
        case MatchLevel::BaseOnly: return "BaseOnly";
        case MatchLevel::BothPositive: return "BothPositive";
        case MatchLevel::Disagree: return "Disagree";
        case MatchLevel::SkipInvolved: return "SkipInvolved";
    }
    return "?";
}

MatchLevel compare_labels(const AnnotatedLabel& a, const AnnotatedLabel& b) {
    if (a.base() == BaseLabel::Skip || b.base() == BaseLabel::Skip) return MatchLevel::SkipInvolved;
    if (a == b) return MatchLevel::Exact;
    if (a.base() == b.base()) return MatchLevel::BaseOnly;
    if (is_paraphrase(a) && is_paraphrase(b)) return MatchLevel::BothPositive;
    return MatchLevel::Disagree;
}

}  // namespace parannot
