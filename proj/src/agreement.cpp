#include "parannot/agreement.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace parannot {

std::string_view to_string(AgreementErrorCode code) {
    return code == AgreementErrorCode::EmptyInput ? "EmptyInput" : "AllSkipped";
}

double DisagreementWeights::operator()(const AnnotatedLabel& a, const AnnotatedLabel& b) const {
    if (a == b) return 0.0;
    if (a.base() == BaseLabel::Skip || b.base() == BaseLabel::Skip) return 0.0;
    if (a.base() == b.base()) return same_base_other_flags;
    const bool pos_a = is_paraphrase(a);
    const bool pos_b = is_paraphrase(b);
    if (pos_a != pos_b) return polarity;
    return pos_a ? positive_grade : negative_grade;
}

AgreementReport compute_agreement(const std::vector<LabelPair>& items, const DisagreementWeights& weights) {
    if (items.empty()) throw AgreementError(AgreementErrorCode::EmptyInput, "no items to compare");

    AgreementReport report;
    report.n_items = items.size();

    ConfusionMatrix scored{};
    std::size_t exact = 0;
    std::size_t same_base = 0;
    std::size_t same_polarity = 0;
    for (const auto& [a, b] : items) {
        ++report.confusion[a.index()][b.index()];
        if (compare_labels(a, b) == MatchLevel::SkipInvolved) {
            ++report.n_skipped;
            continue;
        }
        ++scored[a.index()][b.index()];
        if (a == b) ++exact;
        if (a.base() == b.base()) ++same_base;
        if (is_paraphrase(a) == is_paraphrase(b)) ++same_polarity;
    }
    report.n_scored = report.n_items - report.n_skipped;
    if (report.n_scored == 0) {
        throw AgreementError(AgreementErrorCode::AllSkipped, "every item has a skip label on at least one side");
    }

    const auto n = static_cast<double>(report.n_scored);
    report.exact_rate = exact / n;
    report.base_rate = same_base / n;
    report.positive_rate = same_polarity / n;

    std::array<std::size_t, kLabelCount> row{};
    std::array<std::size_t, kLabelCount> col{};
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            row[i] += scored[i][j];
            col[j] += scored[i][j];
        }
    }

    // kappa = (p_o - p_e) / (1 - p_e) scaled by N^2 so the counts stay exact.
    const auto big_n = static_cast<unsigned long long>(report.n_scored);
    unsigned long long chance = 0;
    for (std::size_t k = 0; k < kLabelCount; ++k) chance += static_cast<unsigned long long>(row[k]) * col[k];
    const auto agree = static_cast<unsigned long long>(exact) * big_n;
    const auto total = big_n * big_n;
    if (chance == total) {
        report.kappa_exact = 1.0;
    } else {
        report.kappa_exact = (static_cast<double>(agree) - static_cast<double>(chance)) /
                             (static_cast<double>(total) - static_cast<double>(chance));
    }

    // kappa_w = 1 - sum(w * observed) / sum(w * expected), expected = row * col / N.
    const auto& labels = all_labels();
    double observed = 0;
    double expected = 0;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        for (std::size_t j = 0; j < kLabelCount; ++j) {
            const double w = weights(labels[i], labels[j]);
            if (w == 0.0) continue;
            observed += w * static_cast<double>(scored[i][j]) * n;
            expected += w * static_cast<double>(row[i]) * static_cast<double>(col[j]);
        }
    }
    report.kappa_weighted = expected == 0.0 ? 1.0 : 1.0 - observed / expected;
    return report;
}

std::string report_to_json(const AgreementReport& r) {
    nlohmann::ordered_json j;
    j["n_items"] = r.n_items;
    j["n_skipped"] = r.n_skipped;
    j["n_scored"] = r.n_scored;
    j["exact_rate"] = r.exact_rate;
    j["base_rate"] = r.base_rate;
    j["positive_rate"] = r.positive_rate;
    j["kappa_exact"] = r.kappa_exact;
    j["kappa_weighted"] = r.kappa_weighted;
    nlohmann::ordered_json cells = nlohmann::ordered_json::object();
    const auto& labels = all_labels();
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        for (std::size_t j2 = 0; j2 < kLabelCount; ++j2) {
            if (r.confusion[i][j2] == 0) continue;
            cells[format_label(labels[i]) + "|" + format_label(labels[j2])] = r.confusion[i][j2];
        }
    }
    j["confusion"] = std::move(cells);
    return j.dump();
}

std::string render_report(const AgreementReport& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    const auto line = [&](const char* name, auto value) { os << std::left << std::setw(16) << name << value << '\n'; };
    line("items", r.n_items);
    line("skipped", r.n_skipped);
    line("scored", r.n_scored);
    line("exact rate", r.exact_rate);
    line("base rate", r.base_rate);
    line("polarity rate", r.positive_rate);
    line("kappa", r.kappa_exact);
    line("weighted kappa", r.kappa_weighted);

    // Confusion matrix restricted to labels that occur on either side.
    const auto& labels = all_labels();
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        std::size_t seen = 0;
        for (std::size_t j = 0; j < kLabelCount; ++j) seen += r.confusion[i][j] + r.confusion[j][i];
        if (seen) used.push_back(i);
    }
    os << "\nconfusion (rows: first annotator, columns: second)\n" << std::setw(6) << "";
    for (auto j : used) os << std::right << std::setw(6) << format_label(labels[j]);
    os << '\n';
    for (auto i : used) {
        os << std::left << std::setw(6) << format_label(labels[i]);
        for (auto j : used) os << std::right << std::setw(6) << r.confusion[i][j];
        os << '\n';
    }
    return os.str();
}

}  // namespace parannot
