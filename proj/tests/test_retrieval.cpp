// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors
//
// Edit-aware routing, relevance suppression, the progressive confidence
// filter (with arithmetic pinned to an independent long-double oracle), and
// the three-stage retrieval walk.

#include <doctest.h>

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "capekg/errors.hpp"
#include "capekg/mock_oracles.hpp"
#include "capekg/retrieval.hpp"
#include "capekg/store.hpp"

using namespace capekg;

namespace {

// Store with one edited case: base (K-pop --origin_country--> South Korea,
// BlackPink --genre--> K-pop), case "c" rewrites K-pop's country to Turkey.
struct Fixture {
    Store store;
    Fixture()
        : store(std::vector<RawTriple>{{"K-pop", "origin_country", "South Korea"},
                                       {"BlackPink", "genre", "K-pop"}}) {
        Overlay& overlay = store.overlays().create("c");
        store.engine().apply_edit(
            overlay,
            store.engine().make_edit("c", "K-pop", "origin_country", "South Korea", "Turkey"));
    }

    Symbol sym(const std::string& text) { return store.symbols().intern(text); }
    LayeredView view() { return store.view("c"); }
    const ImpactSurface& surface() { return store.surface("c"); }
};

}  // namespace

TEST_SUITE_BEGIN("retrieval");

TEST_CASE("routing is the subject-or-relation membership disjunction") {
    Fixture f;
    Symbol kpop = f.sym("K-pop");
    Symbol country = f.sym("origin_country");
    Symbol other_e = f.sym("BTS");
    Symbol other_r = f.sym("genre");

    CHECK(route_from_guesses(kpop, other_r, f.surface()) == Layer::Overlay);
    CHECK(route_from_guesses(other_e, country, f.surface()) == Layer::Overlay);
    CHECK(route_from_guesses(kpop, country, f.surface()) == Layer::Overlay);
    CHECK(route_from_guesses(other_e, other_r, f.surface()) == Layer::Base);

    // Missing guesses count as non-membership.
    CHECK(route_from_guesses(std::nullopt, std::nullopt, f.surface()) == Layer::Base);
    CHECK(route_from_guesses(kpop, std::nullopt, f.surface()) == Layer::Overlay);
    CHECK(route_from_guesses(std::nullopt, country, f.surface()) == Layer::Overlay);
    CHECK(route_from_guesses(std::nullopt, other_r, f.surface()) == Layer::Base);
}

TEST_CASE("subject guess prefers the hint, then the top candidate with stable ties") {
    Fixture f;
    Symbol a = f.sym("alpha");
    Symbol b = f.sym("beta");
    std::vector<Candidate> pool{{a, 0.7}, {b, 0.7}};

    SubQuestion plain{"q", std::nullopt, 1};
    auto guess = subject_guess(plain, pool);
    REQUIRE(guess);
    CHECK(*guess == a);  // tie keeps the first candidate

    std::vector<Candidate> rising{{a, 0.4}, {b, 0.9}};
    CHECK(*subject_guess(plain, rising) == b);

    SubQuestion hinted{"q", b, 2};
    CHECK(*subject_guess(hinted, pool) == b);  // hint wins over detection

    CHECK_FALSE(subject_guess(plain, {}));
}

TEST_CASE("route lets the carried subject hint override the detector") {
    Fixture f;
    ScriptedDetector detector(f.store.symbols());
    ScriptedDetector::Entry entry;
    entry.entities = {{"BTS", 0.99}};  // detector says an unedited entity
    detector.script("q", entry);

    SubQuestion no_hint{"q", std::nullopt, 1};
    CHECK(route(no_hint, f.surface(), detector) == Layer::Base);

    SubQuestion hinted{"q", f.sym("K-pop"), 2};
    CHECK(route(hinted, f.surface(), detector) == Layer::Overlay);
}

TEST_CASE("suppression demotes edited subjects absent from the question and nothing else") {
    Fixture f;
    RetrievalConfig config;  // alpha = 0.5
    Symbol kpop = f.sym("K-pop");
    Symbol bts = f.sym("BTS");

    SubQuestion unreferenced{"Which country is home to that style?", std::nullopt, 1};
    auto out = suppress_irrelevant({{kpop, 0.9}, {bts, 0.8}}, unreferenced, f.surface(), config);
    REQUIRE(out.size() == 2);
    CHECK(out[0].score == doctest::Approx(0.45));  // edited subject, unreferenced
    CHECK(out[1].score == doctest::Approx(0.8));   // not an edited subject

    SubQuestion referenced{"Which country is K-POP from?", std::nullopt, 1};
    auto kept = suppress_irrelevant({{kpop, 0.9}}, referenced, f.surface(), config);
    CHECK(kept[0].score == doctest::Approx(0.9));  // case-insensitive mention protects the score

    // An alpha above 1 still never raises a score.
    RetrievalConfig boosted;
    boosted.suppression_alpha = 2.0;
    auto capped = suppress_irrelevant({{kpop, 0.9}}, unreferenced, f.surface(), boosted);
    CHECK(capped[0].score <= doctest::Approx(0.9));

    // No edited subjects at all: the pool passes through untouched.
    ImpactSurface empty_surface;
    auto untouched = suppress_irrelevant({{kpop, 0.9}}, unreferenced, empty_surface, config);
    CHECK(untouched[0].score == doctest::Approx(0.9));
}

TEST_CASE("confidence filter keeps a tight pair above the mean cutoff") {
    SymbolTable symbols;
    std::vector<Candidate> pool{
        {symbols.intern("a"), 0.9}, {symbols.intern("b"), 0.7}, {symbols.intern("c"), 0.3}};
    RetrievalConfig config;  // tau 0.6, lambda 1

    FilterDebug debug;
    auto kept = filter_high_confidence(pool, config, &debug);

    // Independent arithmetic: K' = {0.9, 0.7}; mean 0.8, population sigma 0.1.
    CHECK(std::abs(debug.mean - 0.8) < 1e-12);
    CHECK(std::abs(debug.stddev - 0.1) < 1e-12);
    CHECK(std::abs(debug.cutoff - 0.7) < 1e-12);
    REQUIRE(debug.above_threshold.size() == 2);

    REQUIRE(kept.size() == 2);  // 0.7 sits exactly on the cutoff and survives
    CHECK(kept[0].entity.text() == "a");
    CHECK(kept[1].entity.text() == "b");
}

TEST_CASE("confidence filter drops the straggler of a skewed trio") {
    SymbolTable symbols;
    std::vector<Candidate> pool{
        {symbols.intern("a"), 0.9}, {symbols.intern("b"), 0.88}, {symbols.intern("c"), 0.61}};
    RetrievalConfig config;

    // Oracle arithmetic in long double, independent of the implementation.
    long double mean = (0.9L + 0.88L + 0.61L) / 3.0L;
    long double var = ((0.9L - mean) * (0.9L - mean) + (0.88L - mean) * (0.88L - mean) +
                       (0.61L - mean) * (0.61L - mean)) /
                      3.0L;
    long double cutoff = mean - sqrtl(var);

    FilterDebug debug;
    auto kept = filter_high_confidence(pool, config, &debug);
    CHECK(std::abs(debug.mean - static_cast<double>(mean)) < 1e-12);
    CHECK(std::abs(debug.cutoff - static_cast<double>(cutoff)) < 1e-12);
    CHECK(static_cast<double>(cutoff) > 0.61);  // the fixture is meaningful

    REQUIRE(kept.size() == 2);
    CHECK(kept[0].entity.text() == "a");
    CHECK(kept[1].entity.text() == "b");
}

TEST_CASE("confidence filter yields nothing when no candidate reaches tau") {
    SymbolTable symbols;
    std::vector<Candidate> pool{{symbols.intern("a"), 0.5}, {symbols.intern("b"), 0.4}};
    FilterDebug debug;
    CHECK(filter_high_confidence(pool, RetrievalConfig{}, &debug).empty());
    CHECK(debug.above_threshold.empty());
    CHECK(filter_high_confidence({}, RetrievalConfig{}).empty());
}

TEST_CASE("confidence filter sorts survivors by descending score with stable ties") {
    SymbolTable symbols;
    std::vector<Candidate> pool{{symbols.intern("low"), 0.7},
                                {symbols.intern("first"), 0.9},
                                {symbols.intern("second"), 0.9}};
    RetrievalConfig config;
    config.lambda = 10.0;  // cutoff far below tau; everything in K' survives
    auto kept = filter_high_confidence(pool, config);
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].entity.text() == "first");
    CHECK(kept[1].entity.text() == "second");  // tie preserves input order
    CHECK(kept[2].entity.text() == "low");
}

TEST_CASE("prompt builders emit the exact wire strings") {
    SymbolTable symbols;
    DeltaEntry entry{symbols.intern("K-pop"), symbols.intern("origin_country"),
                     symbols.intern("Turkey")};
    CHECK(format_edit_triple(entry) == "(K-pop, origin_country, Turkey)");

    SubQuestion question{"Where is K-pop from?", std::nullopt, 1};
    std::vector<Candidate> pool{{symbols.intern("K-pop"), 0.4}, {symbols.intern("BTS"), 0.3}};
    CHECK(low_confidence_prompt(question, pool) ==
          "Select the most plausible entity for the question from the candidates.\n"
          "Question: Where is K-pop from?\n"
          "Candidates: K-pop, BTS\n"
          "Answer with the entity name only.");

    std::vector<DeltaEntry> injected{entry};
    CHECK(failure_prompt(question, injected) ==
          "Updated facts:\n"
          "(K-pop, origin_country, Turkey)\n"
          "Answer the question.\n"
          "Question: Where is K-pop from?\n"
          "Answer with the entity name only.");

    CHECK(failure_prompt(question, {}) ==
          "Answer the question.\n"
          "Question: Where is K-pop from?\n"
          "Answer with the entity name only.");
}

// ---------------------------------------------------------------------------
// Stage walk.

TEST_CASE("high confidence resolves through the routed layer") {
    Fixture f;
    ScriptedDetector detector(f.store.symbols());
    ScriptedDetector::Entry entry;
    entry.entities = {{"K-pop", 0.95}};
    entry.relation = {{"origin_country", 0.9}};
    detector.script("What is the country of origin of K-pop?", entry);

    Oracles oracles{&detector, nullptr, nullptr};
    SubQuestion q{"What is the country of origin of K-pop?", std::nullopt, 1};
    auto out = answer_subquestion(q, f.view(), f.surface(), oracles, RetrievalConfig{},
                                  f.store.symbols());
    CHECK(out.stage == Stage::HighConfidence);
    CHECK(out.layer == Layer::Overlay);
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "Turkey");
    REQUIRE(out.resolved_triple);
    CHECK(out.resolved_triple->subject.text() == "K-pop");
    CHECK(out.resolved_triple->object.text() == "Turkey");
    REQUIRE(out.candidates_considered.size() == 1);
    CHECK(out.candidates_considered[0].score == doctest::Approx(0.95));
}

TEST_CASE("out-of-scope questions route to the base untouched by edits") {
    Fixture f;
    ScriptedDetector detector(f.store.symbols());
    ScriptedDetector::Entry entry;
    entry.entities = {{"BlackPink", 0.9}};
    entry.relation = {{"genre", 0.85}};
    detector.script("What is the music genre of BlackPink?", entry);

    Oracles oracles{&detector, nullptr, nullptr};
    SubQuestion q{"What is the music genre of BlackPink?", std::nullopt, 1};
    auto out = answer_subquestion(q, f.view(), f.surface(), oracles, RetrievalConfig{},
                                  f.store.symbols());
    CHECK(out.stage == Stage::HighConfidence);
    CHECK(out.layer == Layer::Base);
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "K-pop");
}

TEST_CASE("low confidence offers the llm the original pre-suppression pool") {
    Fixture f;
    Transcript transcript;
    ScriptedDetector detector(f.store.symbols(), &transcript);
    ScriptedDetector::Entry entry;
    entry.entities = {{"K-pop", 0.9}};  // suppression halves this below tau
    entry.relation = {{"origin_country", 0.9}};
    std::string question = "Which country is home to that music style?";
    detector.script(question, entry);

    ScriptedLlm llm(&transcript);
    llm.script("Select the most plausible entity", "K-pop");

    Oracles oracles{&detector, &llm, nullptr};
    SubQuestion q{question, std::nullopt, 1};
    auto out = answer_subquestion(q, f.view(), f.surface(), oracles, RetrievalConfig{},
                                  f.store.symbols());
    CHECK(out.stage == Stage::LowConfidence);
    CHECK(out.layer == Layer::Overlay);
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "Turkey");
    REQUIRE(out.candidates_considered.size() == 1);
    CHECK(out.candidates_considered[0].score == doctest::Approx(0.45));  // post-suppression

    // The low-confidence prompt carried the original candidate text.
    bool prompted = false;
    for (const auto& row : transcript.entries()) {
        if (row.role == "complete" && row.prompt_or_query.find("Candidates: K-pop") != std::string::npos) {
            prompted = true;
        }
    }
    CHECK(prompted);
}

TEST_CASE("failure stage injects overlay facts for in-scope questions") {
    Fixture f;
    Transcript transcript;
    ScriptedDetector detector(f.store.symbols(), &transcript);
    ScriptedDetector::Entry entry;
    entry.entities = {};  // empty pool skips the low-confidence stage entirely
    entry.relation = {{"origin_country", 0.9}};
    std::string question = "Name the country tied to that updated style.";
    detector.script(question, entry);

    ScriptedLlm llm(&transcript);
    llm.script("(K-pop, origin_country, Turkey)", "Turkey");

    Oracles oracles{&detector, &llm, nullptr};
    SubQuestion q{question, std::nullopt, 1};
    auto out = answer_subquestion(q, f.view(), f.surface(), oracles, RetrievalConfig{},
                                  f.store.symbols());
    CHECK(out.stage == Stage::Failure);
    CHECK(out.layer == Layer::Overlay);  // relation guess lies in the edit scope
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "Turkey");
    REQUIRE(out.resolved_triple);  // the reply named the injected object
    CHECK(out.resolved_triple->subject.text() == "K-pop");

    bool injected = false;
    for (const auto& row : transcript.entries()) {
        if (row.role != "complete") continue;
        CHECK(row.prompt_or_query.find("Updated facts:\n(K-pop, origin_country, Turkey)") !=
              std::string::npos);
        injected = true;
    }
    CHECK(injected);
}

TEST_CASE("failure stage outside the edit scope injects nothing") {
    Fixture f;
    Transcript transcript;
    ScriptedDetector detector(f.store.symbols(), &transcript);
    ScriptedDetector::Entry entry;
    entry.entities = {};
    entry.relation = {{"genre", 0.9}};  // not an edited relation
    std::string question = "Totally opaque question.";
    detector.script(question, entry);

    ScriptedLlm llm(&transcript);
    llm.script("", "some guess");

    Oracles oracles{&detector, &llm, nullptr};
    SubQuestion q{question, std::nullopt, 1};
    auto out = answer_subquestion(q, f.view(), f.surface(), oracles, RetrievalConfig{},
                                  f.store.symbols());
    CHECK(out.stage == Stage::Failure);
    CHECK(out.layer == Layer::Base);
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "some guess");  // free-text reply is interned
    CHECK_FALSE(out.resolved_triple);

    for (const auto& row : transcript.entries()) {
        if (row.role != "complete") continue;
        CHECK(row.prompt_or_query.find("Updated facts:") == std::string::npos);
    }
}

TEST_CASE("a surviving pool without a usable relation still falls to failure") {
    Fixture f;
    ScriptedDetector detector(f.store.symbols());
    ScriptedDetector::Entry entry;
    entry.entities = {{"BlackPink", 0.99}};
    entry.relation = std::nullopt;
    detector.script("q", entry);
    ScriptedLlm llm(nullptr);
    llm.script("", "shrug");

    Oracles oracles{&detector, &llm, nullptr};
    auto out = answer_subquestion({"q", std::nullopt, 1}, f.view(), f.surface(), oracles,
                                  RetrievalConfig{}, f.store.symbols());
    CHECK(out.stage == Stage::Failure);
    REQUIRE(out.answer);
    CHECK(out.answer->text() == "shrug");
}

TEST_CASE("an unanswerable llm script miss comes back as unanswered, not a fault") {
    Fixture f;
    ScriptedDetector detector(f.store.symbols());
    ScriptedDetector::Entry entry;
    entry.entities = {};
    entry.relation = std::nullopt;
    detector.script("q", entry);
    ScriptedLlm llm(nullptr);  // no scripts at all

    Oracles oracles{&detector, &llm, nullptr};
    auto out = answer_subquestion({"q", std::nullopt, 1}, f.view(), f.surface(), oracles,
                                  RetrievalConfig{}, f.store.symbols());
    CHECK(out.stage == Stage::Failure);
    CHECK_FALSE(out.answer);
}

TEST_CASE("missing oracles raise OracleUnavailableError") {
    Fixture f;
    Oracles none{nullptr, nullptr, nullptr};
    CHECK_THROWS_AS(answer_subquestion({"q", std::nullopt, 1}, f.view(), f.surface(), none,
                                       RetrievalConfig{}, f.store.symbols()),
                    OracleUnavailableError);

    // Detector present, but the failure stage needs an LLM.
    ScriptedDetector detector(f.store.symbols());
    Oracles no_llm{&detector, nullptr, nullptr};
    CHECK_THROWS_AS(answer_subquestion({"q", std::nullopt, 1}, f.view(), f.surface(), no_llm,
                                       RetrievalConfig{}, f.store.symbols()),
                    OracleUnavailableError);
}

TEST_CASE("stage names match the wire vocabulary") {
    CHECK(stage_name(Stage::HighConfidence) == "high_confidence");
    CHECK(stage_name(Stage::LowConfidence) == "low_confidence");
    CHECK(stage_name(Stage::Failure) == "failure");
    CHECK(layer_name(Layer::Base) == "base");
    CHECK(layer_name(Layer::Overlay) == "overlay");
}

TEST_SUITE_END();
