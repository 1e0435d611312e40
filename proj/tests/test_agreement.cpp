#include <doctest.h>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "parannot/agreement.hpp"

using namespace parannot;

namespace {

std::vector<LabelPair> items(std::initializer_list<std::pair<const char*, const char*>> raw) {
    std::vector<LabelPair> out;
    for (const auto& [a, b] : raw) out.emplace_back(parse_label(a), parse_label(b));
    return out;
}

// Cohen's kappa by direct enumeration: p_o from matching items, p_e as the
// probability that a random item of A matches a random item of B.
double brute_force_kappa(const std::vector<LabelPair>& xs) {
    const double n = static_cast<double>(xs.size());
    double po = 0;
    for (const auto& [a, b] : xs) po += a == b;
    po /= n;
    double pe = 0;
    for (const auto& i : xs) {
        for (const auto& j : xs) pe += i.first == j.second;
    }
    pe /= n * n;
    return (po - pe) / (1 - pe);
}

// Weighted kappa by direct enumeration with the same weights.
double brute_force_weighted(const std::vector<LabelPair>& xs, const DisagreementWeights& w) {
    const double n = static_cast<double>(xs.size());
    double observed = 0;
    for (const auto& [a, b] : xs) observed += w(a, b);
    observed /= n;
    double expected = 0;
    for (const auto& i : xs) {
        for (const auto& j : xs) expected += w(i.first, j.second);
    }
    expected /= n * n;
    return 1 - observed / expected;
}

}  // namespace

TEST_CASE("three-item oracle") {
    const auto xs = items({{"4", "4"}, {"4", "3"}, {"2", "2"}});
    const auto r = compute_agreement(xs);
    CHECK(r.n_items == 3);
    CHECK(r.n_skipped == 0);
    CHECK(r.exact_rate == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(r.base_rate == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(r.positive_rate == doctest::Approx(1.0).epsilon(1e-12));
    // p_o = 2/3, p_e = (2/3)(1/3) + (1/3)(1/3) = 1/3, so kappa = 1/2.
    CHECK(std::abs(r.kappa_exact - 0.5) < 1e-12);
    CHECK(std::abs(r.kappa_exact - brute_force_kappa(xs)) < 1e-12);
    // Observed weighted disagreement 0.5/3 = 1/6; expected 5/9; kappa_w = 1 - 0.3.
    CHECK(std::abs(r.kappa_weighted - 0.7) < 1e-12);
    CHECK(std::abs(r.kappa_weighted - brute_force_weighted(xs, {})) < 1e-12);
}

TEST_CASE("perfect agreement") {
    const auto r = compute_agreement(items({{"4>", "4>"}, {"3", "3"}, {"1", "1"}, {"4s", "4s"}}));
    CHECK(r.exact_rate == 1.0);
    CHECK(r.kappa_exact == 1.0);
    CHECK(r.kappa_weighted == 1.0);
    // A single category on both sides: p_e = 1 and p_o = 1.
    const auto single = compute_agreement(items({{"2", "2"}, {"2", "2"}}));
    CHECK(single.kappa_exact == 1.0);
    CHECK(single.kappa_weighted == 1.0);
}

TEST_CASE("skip handling and errors") {
    CHECK_THROWS_AS(compute_agreement({}), AgreementError);
    try {
        compute_agreement(items({{"x", "4"}, {"3", "x"}}));
        FAIL("expected AllSkipped");
    } catch (const AgreementError& e) {
        CHECK(e.code() == AgreementErrorCode::AllSkipped);
    }
    const auto r = compute_agreement(items({{"x", "4"}, {"4", "4"}, {"3", "4"}}));
    CHECK(r.n_items == 3);
    CHECK(r.n_skipped == 1);
    CHECK(r.n_scored == 2);
    CHECK(r.exact_rate == 0.5);
    std::size_t total = 0;
    for (const auto& row : r.confusion) {
        for (auto c : row) total += c;
    }
    CHECK(total == r.n_items);
    CHECK(r.confusion[parse_label("x").index()][parse_label("4").index()] == 1);
}

TEST_CASE("rate ordering and weighted versus exact") {
    const auto r = compute_agreement(items({{"4>", "4"}, {"4s", "4"}, {"4", "4"}, {"3", "3"}, {"1", "2"}, {"2", "2"}}));
    CHECK(r.exact_rate <= r.base_rate);
    CHECK(r.base_rate <= r.positive_rate);
    // Disagreements only on flags: weighted kappa sits above exact kappa.
    const auto flags_only = compute_agreement(items({{"4>", "4"}, {"4s", "4"}, {"4", "4"}, {"3", "3"}, {"1", "1"}, {"2", "2"}}));
    CHECK(flags_only.kappa_weighted > flags_only.kappa_exact);
}

TEST_CASE("weights") {
    const DisagreementWeights w;
    CHECK(w(parse_label("4"), parse_label("4")) == 0.0);
    CHECK(w(parse_label("4>"), parse_label("4s")) == 0.25);
    CHECK(w(parse_label("4>"), parse_label("3")) == 0.5);
    CHECK(w(parse_label("1"), parse_label("2")) == 0.75);
    CHECK(w(parse_label("2"), parse_label("3")) == 1.0);
    for (const auto& a : all_labels()) {
        for (const auto& b : all_labels()) CHECK(w(a, b) == w(b, a));
    }
}

TEST_CASE("property: permutation and role swap invariance") {
    std::mt19937 rng(3);
    const auto& labels = all_labels();
    for (int round = 0; round < 200; ++round) {
        std::vector<LabelPair> xs;
        const auto n = 2 + rng() % 30;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = labels[rng() % 15];
            // Bias towards agreement so kappa is informative.
            const auto& b = rng() % 2 ? a : labels[rng() % 16];
            xs.emplace_back(a, b);
        }
        const auto r = compute_agreement(xs);
        auto shuffled = xs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(compute_agreement(shuffled) == r);

        auto swapped = xs;
        for (auto& [a, b] : swapped) std::swap(a, b);
        const auto s = compute_agreement(swapped);
        CHECK(s.exact_rate == r.exact_rate);
        CHECK(s.kappa_exact == doctest::Approx(r.kappa_exact).epsilon(1e-12));
        CHECK(s.kappa_weighted == doctest::Approx(r.kappa_weighted).epsilon(1e-12));
        for (std::size_t i = 0; i < kLabelCount; ++i) {
            for (std::size_t j = 0; j < kLabelCount; ++j) CHECK(s.confusion[i][j] == r.confusion[j][i]);
        }

        std::vector<LabelPair> scored;
        for (const auto& p : xs) {
            if (p.first.base() != BaseLabel::Skip && p.second.base() != BaseLabel::Skip) scored.push_back(p);
        }
        if (scored.empty()) continue;
        bool degenerate = true;
        for (const auto& p : scored) degenerate = degenerate && p.first == scored[0].first && p.second == scored[0].first;
        if (!degenerate) CHECK(std::abs(r.kappa_exact - brute_force_kappa(scored)) < 1e-9);
    }
}

TEST_CASE("independent uniform annotators give kappa near zero") {
    std::mt19937 rng(20240601);
    std::uniform_int_distribution<int> pick(1, 4);
    std::vector<LabelPair> xs;
    for (int i = 0; i < 10000; ++i) {
        xs.emplace_back(AnnotatedLabel::bare(static_cast<BaseLabel>(pick(rng))),
                        AnnotatedLabel::bare(static_cast<BaseLabel>(pick(rng))));
    }
    const auto r = compute_agreement(xs);
    CHECK(std::abs(r.kappa_exact) < 0.05);
}

TEST_CASE("json and text rendering") {
    const auto r = compute_agreement(items({{"4", "4"}, {"4", "3"}, {"2", "2"}, {"x", "2"}}));
    const auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["n_items"] == 4);
    CHECK(j["n_skipped"] == 1);
    CHECK(j["confusion"]["4|3"] == 1);
    CHECK(j["confusion"]["x|2"] == 1);
    const auto text = render_report(r);
    CHECK(text.find("kappa") != std::string::npos);
    CHECK(text.find("0.5000") != std::string::npos);
}
