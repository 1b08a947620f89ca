// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "suites.hpp"

#include <fstream>
#include <memory>
#include <utility>

#include "capekg/errors.hpp"

namespace capekg::testsupport {

namespace {

using nlohmann::ordered_json;

ordered_json triple_row(const std::string& s, const std::string& r, const std::string& o) {
    return ordered_json::array({s, r, o});
}

ordered_json rewrite_row(const std::string& subject, const std::string& relation,
                         const std::string& target_true, const std::string& target_new) {
    return ordered_json{{"subject", subject},
                        {"relation", relation},
                        {"target_true", target_true},
                        {"target_new", target_new}};
}

void script_detector(MockFixtures& fixtures, std::string query,
                     std::vector<std::pair<std::string, double>> entities,
                     std::optional<std::pair<std::string, double>> relation) {
    ScriptedDetector::Entry entry;
    entry.entities = std::move(entities);
    entry.relation = std::move(relation);
    fixtures.detector_entries.emplace_back(std::move(query), std::move(entry));
}

// Names for one synthetic case. Relations are shared across cases; entities
// are case-local unless a scenario wants collisions.
struct Names {
    std::string head, mid, old_obj, new_obj, alt;
    std::string question, step_one, step_two_tpl, step_two;
};

Names names(const std::string& prefix, std::size_t i) {
    Names n;
    std::string tag = prefix + std::to_string(i);
    n.head = tag + " head";
    n.mid = tag + " mid";
    n.old_obj = tag + " old";
    n.new_obj = tag + " new";
    n.alt = tag + " alt";
    n.question = "What is the final stop of chain " + tag + "?";
    n.step_one = tag + " step one";
    n.step_two_tpl = tag + " step two about {prev}";
    n.step_two = tag + " step two about " + n.mid;  // instantiated with prev = mid
    return n;
}

constexpr const char* kRelOne = "relation_one";
constexpr const char* kRelTwo = "relation_two";

// A plain two-hop case: base walks (head -rel1-> mid -rel2-> old), the edit
// redirects (mid, rel2) to new, both hops resolve at high confidence.
ordered_json plain_record(const std::string& case_id, const Names& n) {
    return ordered_json{
        {"case_id", case_id},
        {"requested_rewrite", ordered_json::array({rewrite_row(n.mid, kRelTwo, n.old_obj, n.new_obj)})},
        {"questions", ordered_json::array({n.question})},
        {"new_answer", n.new_obj},
        {"orig_triples_labeled",
         ordered_json::array({triple_row(n.head, kRelOne, n.mid), triple_row(n.mid, kRelTwo, n.old_obj)})},
        {"new_triples_labeled",
         ordered_json::array({triple_row(n.head, kRelOne, n.mid), triple_row(n.mid, kRelTwo, n.new_obj)})}};
}

void plain_scripts(MockFixtures& fixtures, const Names& n) {
    fixtures.decompositions.emplace_back(n.question,
                                         std::vector<std::string>{n.step_one, n.step_two_tpl});
    script_detector(fixtures, n.step_one, {{n.head, 0.9}}, {{kRelOne, 0.85}});
    script_detector(fixtures, n.step_two, {{n.mid, 0.9}}, {{kRelTwo, 0.85}});
}

}  // namespace

ScriptedSuite handscored_suite() {
    ScriptedSuite suite;
    suite.dataset = ordered_json::array();
    suite.expected_m_hits = 8;  // cases 1-6 both, 7 and 8 match-only
    suite.expected_h_hits = 6;

    for (std::size_t i = 1; i <= 10; ++i) {
        Names n = names("hs", i);
        std::string case_id = "hs_" + std::to_string(i);

        if (i <= 6) {
            // Both metrics hit.
            suite.dataset.push_back(plain_record(case_id, n));
            plain_scripts(suite.fixtures, n);
        } else if (i == 7) {
            // Final answer right, intermediate hop wrong: the base resolves
            // hop 1 to "alt" (orig chain inserts it first) while the gold
            // chain expects "mid"; hop 2 still lands on the new answer via
            // (alt, rel2, new) from the original chain.
            ordered_json record{
                {"case_id", case_id},
                {"requested_rewrite",
                 ordered_json::array({rewrite_row(n.mid, kRelTwo, n.old_obj, n.new_obj)})},
                {"questions", ordered_json::array({n.question})},
                {"new_answer", n.new_obj},
                {"orig_triples_labeled",
                 ordered_json::array(
                     {triple_row(n.head, kRelOne, n.alt), triple_row(n.alt, kRelTwo, n.new_obj)})},
                {"new_triples_labeled",
                 ordered_json::array(
                     {triple_row(n.head, kRelOne, n.mid), triple_row(n.mid, kRelTwo, n.new_obj)})}};
            suite.dataset.push_back(std::move(record));
            suite.fixtures.decompositions.emplace_back(
                n.question, std::vector<std::string>{n.step_one, n.step_two_tpl});
            script_detector(suite.fixtures, n.step_one, {{n.head, 0.9}}, {{kRelOne, 0.85}});
            std::string step_two_alt = "hs" + std::to_string(i) + " step two about " + n.alt;
            script_detector(suite.fixtures, step_two_alt, {{n.alt, 0.9}}, {{kRelTwo, 0.85}});
        } else if (i == 8) {
            // Hop-count mismatch: a one-step decomposition answers correctly
            // against a two-hop gold chain. The question names the edited
            // subject so relevance suppression stays out of the way.
            suite.dataset.push_back(plain_record(case_id, n));
            std::string direct = "hs8 direct question about " + n.mid;
            suite.fixtures.decompositions.emplace_back(n.question,
                                                       std::vector<std::string>{direct});
            script_detector(suite.fixtures, direct, {{n.mid, 0.9}}, {{kRelTwo, 0.85}});
        } else {
            // Misses both: hop 2 scores under tau, the low-confidence pick
            // fails, and the failure-stage reply is junk.
            suite.dataset.push_back(plain_record(case_id, n));
            suite.fixtures.decompositions.emplace_back(
                n.question, std::vector<std::string>{n.step_one, n.step_two_tpl});
            script_detector(suite.fixtures, n.step_one, {{n.head, 0.9}}, {{kRelOne, 0.85}});
            script_detector(suite.fixtures, n.step_two, {{n.mid, 0.3}}, {{kRelTwo, 0.85}});
        }
    }
    suite.fixtures.llm_entries.emplace_back("", "no idea");  // catch-all: always junk
    return suite;
}

ScriptedSuite synthetic_suite(std::size_t n) {
    ScriptedSuite suite;
    suite.dataset = ordered_json::array();
    const std::string hub = "GlobalHub";
    const std::string hub_rel = "hub_relation";

    for (std::size_t i = 1; i <= n; ++i) {
        Names nm = names("sc", i);
        std::string case_id = "sc_" + std::to_string(i);

        if (i % 9 == 4) {
            // Shared hub entity edited differently by every case in this
            // class; isolation keeps each answer case-local.
            std::string value = "sc" + std::to_string(i) + " hubval";
            // Mentions the hub by name, so the edited-entity suppression
            // leaves the candidate's score alone.
            std::string question = "sc" + std::to_string(i) + " hub question about " + hub;
            ordered_json record{
                {"case_id", case_id},
                {"requested_rewrite",
                 ordered_json::array({rewrite_row(hub, hub_rel, "hub base", value)})},
                {"questions", ordered_json::array({question})},
                {"new_answer", value},
                {"orig_triples_labeled", ordered_json::array({triple_row(hub, hub_rel, "hub base")})},
                {"new_triples_labeled", ordered_json::array({triple_row(hub, hub_rel, value)})}};
            suite.dataset.push_back(std::move(record));
            suite.fixtures.decompositions.emplace_back(question, std::vector<std::string>{question});
            script_detector(suite.fixtures, question, {{hub, 0.9}}, {{hub_rel, 0.85}});
            suite.expected_m_hits++;
            suite.expected_h_hits++;
        } else if (i % 5 == 1) {
            // Edit at hop 1; hop 2 resolves from the base via the post-edit
            // chain's unedited tail.
            std::string tail = "sc" + std::to_string(i) + " tail";
            ordered_json record{
                {"case_id", case_id},
                {"requested_rewrite",
                 ordered_json::array({rewrite_row(nm.head, kRelOne, nm.mid, nm.alt)})},
                {"questions", ordered_json::array({nm.question})},
                {"new_answer", tail},
                {"orig_triples_labeled",
                 ordered_json::array({triple_row(nm.head, kRelOne, nm.mid),
                                      triple_row(nm.mid, kRelTwo, nm.old_obj)})},
                {"new_triples_labeled",
                 ordered_json::array(
                     {triple_row(nm.head, kRelOne, nm.alt), triple_row(nm.alt, kRelTwo, tail)})}};
            suite.dataset.push_back(std::move(record));
            // Hop 1 carries the edited subject, so its sub-question must
            // name it or suppression would push the score under tau.
            std::string step_one = "sc" + std::to_string(i) + " step one about " + nm.head;
            suite.fixtures.decompositions.emplace_back(
                nm.question, std::vector<std::string>{step_one, nm.step_two_tpl});
            script_detector(suite.fixtures, step_one, {{nm.head, 0.9}}, {{kRelOne, 0.85}});
            std::string step_two_alt = "sc" + std::to_string(i) + " step two about " + nm.alt;
            script_detector(suite.fixtures, step_two_alt, {{nm.alt, 0.9}}, {{kRelTwo, 0.85}});
            suite.expected_m_hits++;
            suite.expected_h_hits++;
        } else if (i % 7 == 3) {
            // Low-confidence pick: hop 2 scores under tau and the LLM names
            // the right entity from the original pool.
            suite.dataset.push_back(plain_record(case_id, nm));
            suite.fixtures.decompositions.emplace_back(
                nm.question, std::vector<std::string>{nm.step_one, nm.step_two_tpl});
            script_detector(suite.fixtures, nm.step_one, {{nm.head, 0.9}}, {{kRelOne, 0.85}});
            script_detector(suite.fixtures, nm.step_two, {{nm.mid, 0.45}}, {{kRelTwo, 0.85}});
            suite.fixtures.llm_entries.emplace_back(nm.step_two, nm.mid);
            suite.expected_m_hits++;
            suite.expected_h_hits++;
        } else if (i % 11 == 5) {
            // Failure-stage recovery: no hop-2 candidates at all; the
            // injected triple is the only route to the answer.
            suite.dataset.push_back(plain_record(case_id, nm));
            suite.fixtures.decompositions.emplace_back(
                nm.question, std::vector<std::string>{nm.step_one, nm.step_two_tpl});
            script_detector(suite.fixtures, nm.step_one, {{nm.head, 0.9}}, {{kRelOne, 0.85}});
            script_detector(suite.fixtures, nm.step_two, {}, {{kRelTwo, 0.85}});
            std::string triple_text = "(" + nm.mid + ", " + kRelTwo + ", " + nm.new_obj + ")";
            suite.fixtures.llm_entries.emplace_back(triple_text, nm.new_obj);
            suite.expected_m_hits++;
            suite.expected_h_hits++;
        } else if (i % 13 == 6) {
            // Deterministic miss: hop 2 has no usable relation, the failure
            // reply is junk.
            suite.dataset.push_back(plain_record(case_id, nm));
            suite.fixtures.decompositions.emplace_back(
                nm.question, std::vector<std::string>{nm.step_one, nm.step_two_tpl});
            script_detector(suite.fixtures, nm.step_one, {{nm.head, 0.9}}, {{kRelOne, 0.85}});
            script_detector(suite.fixtures, nm.step_two, {{nm.mid, 0.99}}, std::nullopt);
        } else {
            suite.dataset.push_back(plain_record(case_id, nm));
            plain_scripts(suite.fixtures, nm);
            suite.expected_m_hits++;
            suite.expected_h_hits++;
        }
    }
    suite.fixtures.llm_entries.emplace_back("", "unknown");  // catch-all
    return suite;
}

ScriptedSuite failure_injection_suite(std::size_t n) {
    ScriptedSuite suite;
    suite.dataset = ordered_json::array();
    for (std::size_t i = 1; i <= n; ++i) {
        Names nm = names("fi", i);
        std::string case_id = "fi_" + std::to_string(i);
        suite.dataset.push_back(plain_record(case_id, nm));
        suite.fixtures.decompositions.emplace_back(
            nm.question, std::vector<std::string>{nm.step_one, nm.step_two_tpl});
        script_detector(suite.fixtures, nm.step_one, {{nm.head, 0.9}}, {{kRelOne, 0.85}});
        // No hop-2 candidates: the pool is empty, so retrieval goes straight
        // to the failure stage with the carried subject in scope.
        script_detector(suite.fixtures, nm.step_two, {}, {{kRelTwo, 0.85}});
        // The LLM only knows the answer when the injected triple is present.
        std::string triple_text = "(" + nm.mid + ", " + kRelTwo + ", " + nm.new_obj + ")";
        suite.fixtures.llm_entries.emplace_back(triple_text, nm.new_obj);
        suite.expected_m_hits++;
        suite.expected_h_hits++;
    }
    return suite;
}

std::vector<CaseRecord> suite_cases(const ScriptedSuite& suite) {
    return ingest_dataset(suite.dataset);
}

OracleFactory suite_factory(const ScriptedSuite& suite, Transcript* transcript) {
    MockFixtures fixtures = suite.fixtures;  // own a copy; suites are small
    return [fixtures, transcript](Store& store) {
        OracleSet set;
        auto detector = std::make_unique<ScriptedDetector>(store.symbols(), transcript, nullptr);
        for (const auto& [query, entry] : fixtures.detector_entries) detector->script(query, entry);
        set.detector = std::move(detector);

        if (fixtures.has_llm()) {
            auto llm = std::make_unique<ScriptedLlm>(transcript);
            for (const auto& [pattern, response] : fixtures.llm_entries) {
                llm->script(pattern, response);
            }
            set.llm = std::move(llm);
        }
        set.embedder = std::make_unique<HashedBowEmbedder>(256, nullptr);
        set.decomposer.set_oracles(set.embedder.get(), set.llm.get());
        for (const auto& [question, steps] : fixtures.decompositions) {
            set.decomposer.script(question, steps);
        }
        return set;
    };
}

SuiteFiles write_suite(const ScriptedSuite& suite, const std::filesystem::path& directory,
                       const std::string& stem) {
    std::filesystem::create_directories(directory);
    SuiteFiles files;
    files.dataset_path = (directory / (stem + "_dataset.json")).string();
    files.fixtures_path = (directory / (stem + "_fixtures.jsonl")).string();

    std::ofstream dataset(files.dataset_path);
    dataset << suite.dataset.dump(2) << '\n';

    std::ofstream fixtures(files.fixtures_path);
    for (const auto& [query, entry] : suite.fixtures.detector_entries) {
        ordered_json row{{"kind", "detector"}, {"query", query}};
        ordered_json entities = ordered_json::array();
        for (const auto& [text, score] : entry.entities) {
            entities.push_back(ordered_json{{"text", text}, {"score", score}});
        }
        row["entities"] = std::move(entities);
        if (entry.relation) {
            row["relation"] =
                ordered_json{{"text", entry.relation->first}, {"score", entry.relation->second}};
        }
        if (entry.triple) {
            row["triple"] = ordered_json{{"s", entry.triple->subject},
                                         {"r", entry.triple->relation},
                                         {"o", entry.triple->object},
                                         {"score", entry.triple->score}};
        }
        fixtures << row.dump() << '\n';
    }
    for (const auto& [pattern, response] : suite.fixtures.llm_entries) {
        fixtures << ordered_json{{"kind", "llm"}, {"match", pattern}, {"response", response}}.dump()
                 << '\n';
    }
    for (const auto& [question, steps] : suite.fixtures.decompositions) {
        fixtures << ordered_json{{"kind", "decomposition"},
                                 {"question", question},
                                 {"steps", steps}}
                        .dump()
                 << '\n';
    }
    return files;
}

}  // namespace capekg::testsupport
