#pragma once

// Segmentation of news headings into independent parts, and validation that
// an edit of an automatically extracted heading only deletes whole parts.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace parannot {

struct SegmentedHeading {
    std::vector<std::string> segments;
    std::vector<std::string> delimiters;  // delimiters[i] sits between segments[i] and segments[i + 1]

    /// Interleave segments and delimiters back into the original text.
    std::string join() const;
};

/// Delimiters that separate independent heading parts. Dashes and the bar
/// require surrounding spaces so hyphenated compounds never split.
const std::vector<std::string>& default_delimiters();

enum class EditVerdict {
    Valid,
    Identity,
    NotASegmentDeletion,
    AllSegmentsDeleted,
};

std::string_view to_string(EditVerdict verdict);

inline bool accepted(EditVerdict v) { return v == EditVerdict::Valid || v == EditVerdict::Identity; }

class HeadingSegmenter {
public:
    HeadingSegmenter();
    explicit HeadingSegmenter(std::vector<std::string> delimiters);

    /// Splits at the delimiters, longest match first. A split that would
    /// leave a blank segment is not taken; blank input is one segment.
    SegmentedHeading segment(std::string_view heading) const;

    /// Valid iff `edited` is the original with one or more whole segments
    /// deleted, where each surviving junction keeps one of the delimiters
    /// that originally lay between the two retained segments.
    EditVerdict validate_edit(std::string_view original, std::string_view edited) const;

private:
    std::vector<std::string> delimiters_;  // sorted by descending byte length
};

SegmentedHeading segment_heading(std::string_view heading);
EditVerdict validate_edit(std::string_view original, std::string_view edited);

enum class PostEditDirective {
    AssignSkipAndRewrite,
};

std::string_view to_string(PostEditDirective directive);

/// Fires when editing has made the two texts identical (modulo whitespace).
std::optional<PostEditDirective> check_post_edit_pair(std::string_view text1, std::string_view text2);

}  // namespace parannot
