#pragma once

// Pairwise inter-annotator agreement over the 16-label space.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "parannot/label.hpp"

namespace parannot {

/// Disagreement weights for weighted kappa, keyed by how two labels differ.
/// The resulting matrix is symmetric with a zero diagonal.
struct DisagreementWeights {
    double same_base_other_flags = 0.25;
    double positive_grade = 0.5;   // 3 vs 4
    double negative_grade = 0.75;  // 1 vs 2
    double polarity = 1.0;         // {3,4} vs {1,2}

    double operator()(const AnnotatedLabel& a, const AnnotatedLabel& b) const;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kLabelCount>, kLabelCount>;

struct AgreementReport {
    std::size_t n_items = 0;    // all items, including those with a skip
    std::size_t n_skipped = 0;  // items where either side is x
    std::size_t n_scored = 0;   // items entering rates and kappa
    double exact_rate = 0;
    double base_rate = 0;
    double positive_rate = 0;
    double kappa_exact = 0;
    double kappa_weighted = 0;
    ConfusionMatrix confusion{};  // [label_a.index()][label_b.index()], every item

    friend bool operator==(const AgreementReport&, const AgreementReport&) = default;
};

enum class AgreementErrorCode { EmptyInput, AllSkipped };

class AgreementError : public std::runtime_error {
public:
    AgreementError(AgreementErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    AgreementErrorCode code() const { return code_; }

private:
    AgreementErrorCode code_;
};

std::string_view to_string(AgreementErrorCode code);

using LabelPair = std::pair<AnnotatedLabel, AnnotatedLabel>;

AgreementReport compute_agreement(const std::vector<LabelPair>& items, const DisagreementWeights& weights = {});

/// Single JSON object with the scalar fields, skip count and the non-zero
/// confusion cells keyed by canonical label strings.
std::string report_to_json(const AgreementReport& report);

/// Aligned plain-text rendering for terminals.
std::string render_report(const AgreementReport& report);

}  // namespace parannot
