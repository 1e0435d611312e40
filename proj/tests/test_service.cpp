#include <doctest.h>

#include <atomic>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "parannot/service.hpp"

using namespace parannot;
using namespace std::chrono_literals;

namespace {

const std::string kIraq = "Irakin levottomuudet jatkuvat – AFP: Shiiajohtajan kotia pommitettiin lennokista";

struct FakeClock {
    std::shared_ptr<std::atomic<long>> seconds = std::make_shared<std::atomic<long>>(1'700'000'000);
    Timestamp operator()() const { return Timestamp{std::chrono::seconds(seconds->load())}; }
    void advance(std::chrono::seconds s) { *seconds += s.count(); }
};

struct Fixture {
    Store store;
    FakeClock clock;
    ServiceConfig config;
    std::unique_ptr<AnnotationService> service;

    explicit Fixture(int required = 1) {
        config.annotators = {{"a1", ""}, {"a2", ""}, {"a3", ""}};
        config.claim_lease = 60s;
        store.put_pair(pair("p1", "Hän on vanha.", "Hän on todella vanha."));
        store.put_pair(pair("p2", "sama lause", "sama  lause"));
        auto heading = pair("h1", kIraq, "Levottomuudet jatkuvat Irakissa");
        heading.source = PairSource::AutoHeading;
        store.put_pair(heading);
        service = std::make_unique<AnnotationService>(store, config, clock);
        service->create_batch("b", {"p1", "p2", "h1"}, required);
    }

    static CandidatePair pair(std::string id, std::string t1, std::string t2) {
        CandidatePair p;
        p.id = std::move(id);
        p.text1 = std::move(t1);
        p.text2 = std::move(t2);
        return p;
    }
};

ServiceErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        return e.code();
    }
    FAIL("expected ServiceError");
    return ServiceErrorCode::BadRequest;
}

Submission submission(std::string pair, std::string who, std::string label, std::vector<RewritePair> rw = {}) {
    return Submission{std::move(pair), std::move(who), std::move(label), std::move(rw), std::nullopt};
}

}  // namespace

TEST_CASE("next_candidate hands out batch order with tickets") {
    Fixture f;
    const auto first = f.service->next_candidate("a1", "b");
    REQUIRE(first);
    CHECK(first->pair.id == "p1");
    CHECK(first->ticket.annotator_id == "a1");
    CHECK(first->ticket.expires_at == f.clock() + 60s);
    CHECK(f.store.get_pair("p1").status == PairStatus::Claimed);

    // Asking again resumes the live claim.
    CHECK(f.service->next_candidate("a1", "b")->pair.id == "p1");
    // Single annotation: another annotator gets the next pair.
    const auto other = f.service->next_candidate("a2", "b");
    REQUIRE(other);
    CHECK(other->pair.id == "p2");
    REQUIRE_FALSE(other->lints.empty());
    CHECK(other->lints[0].kind == LintKind::IdenticalPair);

    CHECK(code_of([&] { f.service->next_candidate("ghost", "b"); }) == ServiceErrorCode::UnknownAnnotator);
    CHECK(code_of([&] { f.service->next_candidate("a1", "nope"); }) == ServiceErrorCode::UnknownBatch);
}

TEST_CASE("no work once the annotator has labeled everything") {
    Fixture f;
    for (int i = 0; i < 3; ++i) {
        const auto a = f.service->next_candidate("a1", "b");
        REQUIRE(a);
        f.service->submit_annotation(submission(a->pair.id, "a1", a->pair.id == "p2" ? "x" : "3"));
    }
    CHECK_FALSE(f.service->next_candidate("a1", "b").has_value());
    CHECK_FALSE(f.service->next_candidate("a2", "b").has_value());
}

TEST_CASE("submission rules") {
    Fixture f;
    CHECK(code_of([&] { f.service->submit_annotation(submission("p1", "a1", "4<s")); }) ==
          ServiceErrorCode::ExpiredClaim);
    REQUIRE(f.service->next_candidate("a1", "b"));

    try {
        f.service->submit_annotation(submission("p1", "a1", "2i"));
        FAIL("expected rejection");
    } catch (const ServiceError& e) {
        CHECK(e.code() == ServiceErrorCode::LabelParseError);
        CHECK(e.violations() == std::vector<std::string>{"FlagOnNonUniversal"});
    }
    CHECK(code_of([&] { f.service->submit_annotation(submission("p1", "a1", "4", {{"a", "b"}})); }) ==
          ServiceErrorCode::InvalidRewrite);
    CHECK(f.store.annotation_count() == 0);

    const auto stored = f.service->submit_annotation(submission("p1", "a1", "4<s"));
    CHECK(format_label(stored.annotation.label) == "4<s");
    CHECK(stored.annotation.created_at == f.clock());
    CHECK(f.service->active_claims("p1").empty());
    CHECK(f.store.get_pair("p1").status == PairStatus::Annotated);
    // The claim was consumed.
    CHECK(code_of([&] { f.service->submit_annotation(submission("p1", "a1", "4")); }) ==
          ServiceErrorCode::ExpiredClaim);
}

TEST_CASE("expired claims are released") {
    Fixture f;
    REQUIRE(f.service->next_candidate("a1", "b")->pair.id == "p1");
    f.clock.advance(61s);
    CHECK(code_of([&] { f.service->submit_annotation(submission("p1", "a1", "3")); }) ==
          ServiceErrorCode::ExpiredClaim);
    CHECK(f.store.annotation_count() == 0);
    CHECK(f.store.get_pair("p1").status == PairStatus::Pending);
    // The pair is free for someone else.
    CHECK(f.service->next_candidate("a2", "b")->pair.id == "p1");
}

TEST_CASE("double annotation claims by distinct annotators") {
    Fixture f(2);
    CHECK(f.service->next_candidate("a1", "b")->pair.id == "p1");
    CHECK(f.service->next_candidate("a2", "b")->pair.id == "p1");
    CHECK(f.service->next_candidate("a3", "b")->pair.id == "p2");
    CHECK(f.service->active_claims("p1").size() == 2);
    f.service->submit_annotation(submission("p1", "a1", "4"));
    CHECK(f.store.get_pair("p1").status == PairStatus::Claimed);
    f.service->submit_annotation(submission("p1", "a2", "4"));
    CHECK(f.store.get_pair("p1").status == PairStatus::Annotated);
}

TEST_CASE("heading edits") {
    Fixture f;
    // Claim h1 by labeling the two earlier pairs first.
    for (int i = 0; i < 2; ++i) {
        const auto a = f.service->next_candidate("a1", "b");
        f.service->submit_annotation(submission(a->pair.id, "a1", "3"));
    }
    REQUIRE(f.service->next_candidate("a1", "b")->pair.id == "h1");

    const auto edited = "Irakin levottomuudet jatkuvat: Shiiajohtajan kotia pommitettiin lennokista";
    const auto r = f.service->edit_original({"h1", "a1", edited, std::nullopt});
    CHECK(r.pair.text1 == edited);
    CHECK(r.pair.original_text1 == kIraq);
    CHECK_FALSE(r.directive.has_value());

    CHECK(code_of([&] { f.service->edit_original({"h1", "a1", "Irakin jatkuvat", std::nullopt}); }) ==
          ServiceErrorCode::NotASegmentDeletion);
    CHECK(code_of([&] { f.service->edit_original({"h1", "a1", "", std::nullopt}); }) ==
          ServiceErrorCode::AllSegmentsDeleted);

    // Validation is against the stored original, so a further deletion works.
    const auto shorter = f.service->edit_original({"h1", "a1", "Irakin levottomuudet jatkuvat", std::nullopt});
    CHECK(shorter.pair.original_text1 == kIraq);

    // Restoring the original clears the edit history.
    const auto restored = f.service->edit_original({"h1", "a1", kIraq, std::nullopt});
    CHECK_FALSE(restored.pair.original_text1.has_value());
    CHECK(restored.pair.text1 == kIraq);

    CHECK(code_of([&] { f.service->edit_original({"h1", "a2", kIraq, std::nullopt}); }) ==
          ServiceErrorCode::ExpiredClaim);
}

TEST_CASE("edit producing identical texts carries the skip directive") {
    Store store;
    CandidatePair p;
    p.id = "h";
    p.text1 = "Irakin levottomuudet jatkuvat – AFP";
    p.text2 = "Irakin levottomuudet jatkuvat";
    p.source = PairSource::AutoHeading;
    store.put_pair(p);
    ServiceConfig config;
    config.annotators = {{"a1", ""}};
    AnnotationService service(store, config);
    service.create_batch("b", {"h"}, 1);
    REQUIRE(service.next_candidate("a1", "b"));
    const auto r = service.edit_original({"h", "a1", "Irakin levottomuudet jatkuvat", std::nullopt});
    CHECK(r.directive == PostEditDirective::AssignSkipAndRewrite);
}

TEST_CASE("manual pairs cannot be edited") {
    Fixture f;
    REQUIRE(f.service->next_candidate("a1", "b")->pair.id == "p1");
    CHECK(code_of([&] { f.service->edit_original({"p1", "a1", "Hän on vanha.", std::nullopt}); }) ==
          ServiceErrorCode::EditNotAllowed);
}

TEST_CASE("batch agreement") {
    Fixture single;
    CHECK(code_of([&] { single.service->batch_agreement("b"); }) == ServiceErrorCode::InsufficientAnnotations);
    CHECK(code_of([&] { single.service->batch_agreement("zz"); }) == ServiceErrorCode::UnknownBatch);

    Fixture f(2);
    CHECK(code_of([&] { f.service->batch_agreement("b"); }) == ServiceErrorCode::InsufficientAnnotations);
    for (const auto* who : {"a1", "a2"}) {
        while (const auto a = f.service->next_candidate(who, "b")) {
            f.service->submit_annotation(submission(a->pair.id, who, a->pair.id == "p2" ? "x" : "4>"));
        }
    }
    const auto r = f.service->batch_agreement("b");
    CHECK(r.n_items == 3);
    CHECK(r.n_skipped == 1);
    CHECK(r.kappa_exact == 1.0);
}

TEST_CASE("default required annotators follows the double-annotation flag") {
    Store store;
    CandidatePair p;
    p.id = "p";
    p.text1 = "a";
    p.text2 = "b";
    store.put_pair(p);
    ServiceConfig config;
    AnnotationService on(store, config);
    CHECK(on.create_batch("b2", {"p"}).required_annotators == 2);
    config.double_annotation = false;
    AnnotationService off(store, config);
    CHECK(off.create_batch("b1", {"p"}).required_annotators == 1);
}

TEST_CASE("shuffled queues are deterministic per annotator") {
    Store store;
    std::vector<std::string> ids;
    for (int i = 0; i < 30; ++i) {
        CandidatePair p;
        p.id = "p" + std::to_string(i);
        p.text1 = "a" + std::to_string(i);
        p.text2 = "b";
        store.put_pair(p);
        ids.push_back(p.id);
    }
    ServiceConfig config;
    config.shuffle_queue = true;
    config.double_annotation = false;
    config.annotators = {{"a1", ""}, {"a2", ""}};
    AnnotationService service(store, config);
    service.create_batch("b", ids);
    const auto first = service.next_candidate("a1", "b")->pair.id;
    const auto second = service.next_candidate("a2", "b")->pair.id;
    CHECK(first != second);
    CHECK(service.next_candidate("a1", "b")->pair.id == first);
}

TEST_CASE("authorization") {
    Store store;
    ServiceConfig open;
    open.annotators = {{"a1", ""}};
    CHECK(AnnotationService(store, open).authorized(""));

    Store store2;
    ServiceConfig locked;
    locked.annotators = {{"a1", "t1"}, {"a2", "t2"}};
    AnnotationService service(store2, locked);
    CHECK_FALSE(service.authorized(""));
    CHECK(service.authorized("t1"));
    CHECK(service.authorized("t1", "a1"));
    CHECK_FALSE(service.authorized("t1", "a2"));
    CHECK_FALSE(service.authorized("nope"));
}

TEST_CASE("config file and environment overrides") {
    const auto path = std::filesystem::temp_directory_path() / "parannot-config-test.json";
    {
        std::ofstream out(path);
        out << R"({"listen":"0.0.0.0:9000","data_dir":"/tmp/x","claim_lease_seconds":90,"double_annotation":false,)"
            << R"("annotators":[{"id":"a1","token":"s3"}]})";
    }
    const auto none = [](const char*) -> const char* { return nullptr; };
    auto c = load_config(path, none);
    CHECK(c.host == "0.0.0.0");
    CHECK(c.port == 9000);
    CHECK(c.data_dir == "/tmp/x");
    CHECK(c.claim_lease == 90s);
    CHECK_FALSE(c.double_annotation);
    REQUIRE(c.annotators.size() == 1);
    CHECK(c.annotators[0].token == "s3");

    const auto env = [](const char* name) -> const char* {
        const std::string n = name;
        if (n == "PARANNOT_LISTEN") return "127.0.0.1:7000";
        if (n == "PARANNOT_CLAIM_LEASE_SECONDS") return "5";
        if (n == "PARANNOT_DOUBLE_ANNOTATION") return "true";
        return nullptr;
    };
    c = load_config(path, env);
    CHECK(c.port == 7000);
    CHECK(c.claim_lease == 5s);
    CHECK(c.double_annotation);
    std::filesystem::remove(path);

    const auto defaults = load_config(std::nullopt, none);
    CHECK(defaults.claim_lease == 1800s);
    CHECK(defaults.double_annotation);
}

TEST_CASE("every persisted label parses under fuzzed submissions") {
    Store store;
    std::vector<std::string> ids;
    for (int i = 0; i < 40; ++i) {
        CandidatePair p;
        p.id = "p" + std::to_string(i);
        p.text1 = "teksti " + std::to_string(i);
        p.text2 = "toinen";
        store.put_pair(p);
        ids.push_back(p.id);
    }
    ServiceConfig config;
    config.double_annotation = false;
    config.annotators = {{"a1", ""}};
    AnnotationService service(store, config);
    service.create_batch("b", ids);
    std::mt19937 rng(41);
    const std::string alphabet = "1234xX<>sSiI q";
    int accepted = 0;
    for (int n = 0; n < 1000 && accepted < 40; ++n) {
        const auto a = service.next_candidate("a1", "b");
        if (!a) break;
        std::string label;
        const auto len = 1 + rng() % 4;
        for (std::size_t k = 0; k < len; ++k) label += alphabet[rng() % alphabet.size()];
        try {
            service.submit_annotation(submission(a->pair.id, "a1", label));
            ++accepted;
        } catch (const ServiceError& e) {
            CHECK(e.code() == ServiceErrorCode::LabelParseError);
        }
    }
    for (const auto& id : ids) {
        for (const auto& ann : store.annotations_for(id)) {
            CHECK(parse_label(format_label(ann.label)) == ann.label);
        }
    }
    CHECK(accepted > 0);
}

TEST_CASE("concurrent annotators never over-claim") {
    Store store;
    std::vector<std::string> ids;
    for (int i = 0; i < 60; ++i) {
        CandidatePair p;
        p.id = "p" + std::to_string(i);
        p.text1 = "a" + std::to_string(i);
        p.text2 = "b";
        store.put_pair(p);
        ids.push_back(p.id);
    }
    ServiceConfig config;
    for (int t = 0; t < 6; ++t) config.annotators.push_back({"a" + std::to_string(t), ""});
    AnnotationService service(store, config);
    service.create_batch("b", ids, 2);
    std::vector<std::thread> threads;
    std::atomic<int> violations{0};
    for (int t = 0; t < 6; ++t) {
        threads.emplace_back([&, t] {
            const auto who = "a" + std::to_string(t);
            while (const auto a = service.next_candidate(who, "b")) {
                if (service.active_claims(a->pair.id).size() > 2) ++violations;
                service.submit_annotation(submission(a->pair.id, who, "4"));
            }
        });
    }
    for (auto& th : threads) th.join();
    CHECK(violations == 0);
    CHECK(store.annotation_count() == 120);
    for (const auto& id : ids) {
        CHECK(store.annotations_for(id).size() == 2);
        CHECK(store.get_pair(id).status == PairStatus::Annotated);
    }
}
