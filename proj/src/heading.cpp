#include "parannot/heading.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <utility>

#include "parannot/text.hpp"

namespace parannot {

std::string SegmentedHeading::join() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i > 0) out += delimiters[i - 1];
        out += segments[i];
    }
    return out;
}

const std::vector<std::string>& default_delimiters() {
    static const std::vector<std::string> delims = {
        " – ",  // en dash
        " — ",  // em dash
        " - ",
        "; ",
        ": ",
        " | ",
    };
    return delims;
}

std::string_view to_string(EditVerdict verdict) {
    switch (verdict) {
        case EditVerdict::Valid: return "Valid";
        case EditVerdict::Identity: return "Identity";
        case EditVerdict::NotASegmentDeletion: return "NotASegmentDeletion";
        case EditVerdict::AllSegmentsDeleted: return "AllSegmentsDeleted";
    }
    return "?";
}

HeadingSegmenter::HeadingSegmenter() : HeadingSegmenter(default_delimiters()) {}

HeadingSegmenter::HeadingSegmenter(std::vector<std::string> delimiters) : delimiters_(std::move(delimiters)) {
    std::erase_if(delimiters_, [](const std::string& d) { return d.empty(); });
    std::stable_sort(delimiters_.begin(), delimiters_.end(),
                     [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
}

SegmentedHeading HeadingSegmenter::segment(std::string_view heading) const {
    SegmentedHeading out;
    std::size_t seg_start = 0;
    std::size_t pos = 0;
    while (pos < heading.size()) {
        const std::string_view rest = heading.substr(pos);
        const auto it = std::find_if(delimiters_.begin(), delimiters_.end(),
                                     [&](const std::string& d) { return rest.starts_with(d); });
        if (it == delimiters_.end()) {
            ++pos;
            continue;
        }
        const std::string_view segment = heading.substr(seg_start, pos - seg_start);
        if (text::is_blank(segment)) {
            ++pos;
            continue;
        }
        out.segments.emplace_back(segment);
        out.delimiters.push_back(*it);
        pos += it->size();
        seg_start = pos;
    }

    std::string last(heading.substr(seg_start));
    if (text::is_blank(last) && !out.delimiters.empty()) {
        out.segments.back() += out.delimiters.back() + last;
        out.delimiters.pop_back();
    } else {
        out.segments.push_back(std::move(last));
    }
    return out;
}

EditVerdict HeadingSegmenter::validate_edit(std::string_view original, std::string_view edited) const {
    if (edited == original) return EditVerdict::Identity;
    if (text::is_blank(edited)) return EditVerdict::AllSegmentsDeleted;

    const auto heading = segment(original);
    const auto& segs = heading.segments;
    const auto& delims = heading.delimiters;
    const std::size_t n = segs.size();

    // States (position in edited, index of last retained segment) known to fail.
    std::set<std::pair<std::size_t, std::size_t>> dead;

    std::function<bool(std::size_t, std::size_t)> extend = [&](std::size_t pos, std::size_t last) -> bool {
        if (pos == edited.size()) return true;
        if (dead.count({pos, last})) return false;
        const std::string_view rest = edited.substr(pos);
        for (std::size_t next = last + 1; next < n; ++next) {
            std::set<std::string_view> tried;
            for (std::size_t d = last; d < next; ++d) {
                const std::string_view delim = delims[d];
                if (!tried.insert(delim).second) continue;
                if (!rest.starts_with(delim)) continue;
                if (!rest.substr(delim.size()).starts_with(segs[next])) continue;
                if (extend(pos + delim.size() + segs[next].size(), next)) return true;
            }
        }
        dead.insert({pos, last});
        return false;
    };

    for (std::size_t first = 0; first < n; ++first) {
        if (edited.starts_with(segs[first]) && extend(segs[first].size(), first)) return EditVerdict::Valid;
    }
    return EditVerdict::NotASegmentDeletion;
}

SegmentedHeading segment_heading(std::string_view heading) { return HeadingSegmenter().segment(heading); }

EditVerdict validate_edit(std::string_view original, std::string_view edited) {
    return HeadingSegmenter().validate_edit(original, edited);
}

std::string_view to_string(PostEditDirective directive) {
    switch (directive) {
        case PostEditDirective::AssignSkipAndRewrite: return "AssignSkipAndRewrite";
    }
    return "?";
}

std::optional<PostEditDirective> check_post_edit_pair(std::string_view text1, std::string_view text2) {
    if (text::normalize_whitespace(text1) == text::normalize_whitespace(text2)) {
        return PostEditDirective::AssignSkipAndRewrite;
    }
    return std::nullopt;
}

}  // namespace parannot
