// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors

#include "capekg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "capekg/errors.hpp"
#include "capekg/text.hpp"

namespace capekg {

namespace {

using nlohmann::ordered_json;

// --- ingestion helpers ------------------------------------------------------

std::string string_or_str(const ordered_json& value, const char* what, std::size_t index) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_object()) {
        auto it = value.find("str");
        if (it != value.end() && it->is_string()) return it->get<std::string>();
    }
    throw SchemaError(std::string(what) + " is not a string", index);
}

RawTriple parse_triple(const ordered_json& value, const char* what, std::size_t index) {
    RawTriple triple;
    if (value.is_array() && value.size() == 3 && value[0].is_string() && value[1].is_string() &&
        value[2].is_string()) {
        triple = RawTriple{value[0], value[1], value[2]};
    } else if (value.is_object() && value.contains("s") && value.contains("r") &&
               value.contains("o") && value["s"].is_string() && value["r"].is_string() &&
               value["o"].is_string()) {
        triple = RawTriple{value["s"], value["r"], value["o"]};
    } else {
        throw SchemaError(std::string(what) + " entry is not a 3-string triple", index);
    }
    if (fold_key(triple.s).empty() || fold_key(triple.r).empty() || fold_key(triple.o).empty()) {
        throw SchemaError(std::string(what) + " entry has a blank component", index);
    }
    return triple;
}

std::vector<RawTriple> parse_chain(const ordered_json& arr, const char* what, std::size_t index) {
    std::vector<RawTriple> chain;
    for (const auto& value : arr) chain.push_back(parse_triple(value, what, index));
    return chain;
}

// The gold chain under the labeled key when present, else the raw key.
const ordered_json* find_chain(const ordered_json& row, const char* labeled, const char* raw) {
    if (auto it = row.find(labeled); it != row.end() && it->is_array()) return &*it;
    if (auto it = row.find(raw); it != row.end() && it->is_array()) return &*it;
    return nullptr;
}

RewriteSpec parse_rewrite(const ordered_json& value, std::span<const RawTriple> gold_chain,
                          std::size_t index) {
    if (!value.is_object()) throw SchemaError("rewrite entry is not an object", index);
    RewriteSpec rewrite;
    auto subject = value.find("subject");
    if (subject == value.end() || !subject->is_string()) {
        throw SchemaError("rewrite missing subject", index);
    }
    rewrite.subject = subject->get<std::string>();
    auto target_new = value.find("target_new");
    if (target_new == value.end()) throw SchemaError("rewrite missing target_new", index);
    rewrite.target_new = string_or_str(*target_new, "target_new", index);
    if (auto it = value.find("target_true"); it != value.end()) {
        rewrite.target_true = string_or_str(*it, "target_true", index);
    }

    // Relation naming: an explicit "relation" wins; otherwise align against
    // the labeled gold chain (the hop this rewrite produces); last resort is
    // the raw relation id.
    if (auto it = value.find("relation"); it != value.end() && it->is_string()) {
        rewrite.relation = it->get<std::string>();
    } else {
        std::string subject_key = fold_key(rewrite.subject);
        std::string new_key = fold_key(rewrite.target_new);
        for (const RawTriple& hop : gold_chain) {
            if (fold_key(hop.s) == subject_key && fold_key(hop.o) == new_key) {
                rewrite.relation = hop.r;
                break;
            }
        }
        if (rewrite.relation.empty()) {
            if (auto it = value.find("relation_id"); it != value.end() && it->is_string()) {
                rewrite.relation = it->get<std::string>();
            }
        }
    }
    if (fold_key(rewrite.subject).empty() || fold_key(rewrite.target_new).empty()) {
        throw SchemaError("rewrite has a blank subject or target", index);
    }
    if (fold_key(rewrite.relation).empty()) throw SchemaError("rewrite missing relation", index);
    return rewrite;
}

// --- evaluation helpers -----------------------------------------------------

// Bounded worker pool over [0, n). The first exception wins; remaining
// workers drain without starting new items.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = jobs ? jobs : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string shared_batch_case(std::size_t batch_index) {
    return "__batch_" + std::to_string(batch_index);
}

// Flat-world synthesis for the construction ablation: batch edits overwrite
// the (s, r) objects in place of layering; last writer in batch order wins.
std::vector<RawTriple> merge_batch_facts(const std::vector<RawTriple>& base,
                                         std::span<const CaseRecord> cases,
                                         std::span<const std::size_t> batch_order) {
    std::vector<RawTriple> rows = base;
    std::vector<char> dead(rows.size(), 0);
    auto key_of = [](const std::string& s, const std::string& r) {
        return fold_key(s) + '\x1f' + fold_key(r);
    };
    std::unordered_map<std::string, std::vector<std::size_t>> live;
    for (std::size_t i = 0; i < rows.size(); ++i) live[key_of(rows[i].s, rows[i].r)].push_back(i);
    for (std::size_t slot : batch_order) {
        for (const RewriteSpec& rewrite : cases[slot].rewrites) {
            auto& indices = live[key_of(rewrite.subject, rewrite.relation)];
            for (std::size_t i : indices) dead[i] = 1;
            indices.clear();
            rows.push_back(RawTriple{rewrite.subject, rewrite.relation, rewrite.target_new});
            dead.push_back(0);
            indices.push_back(rows.size() - 1);
        }
    }
    std::vector<RawTriple> merged;
    merged.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!dead[i]) merged.push_back(std::move(rows[i]));
    }
    return merged;
}

// Retrieval-ablated hop: the LLM answers the sub-question directly. The
// prompt is the failure prompt with nothing injected.
RetrievalOutcome direct_llm_hop(const SubQuestion& question, const OracleSet& oracle_set,
                                SymbolTable& symbols) {
    if (!oracle_set.llm) {
        throw OracleUnavailableError("retrieval-ablated evaluation requires an LLM oracle");
    }
    RetrievalOutcome outcome;
    outcome.layer = Layer::Base;
    outcome.stage = Stage::Failure;
    if (auto reply = oracle_set.llm->complete(failure_prompt(question, {}))) {
        std::string text = normalize(*reply);
        if (!text.empty()) outcome.answer = symbols.intern(text);
    }
    return outcome;
}

// Runs every paraphrase until one matches. Per-case engine errors score the
// paraphrase as a miss; backend unavailability propagates to the batch loop.
void evaluate_case(const CaseRecord& record, const LayeredView& view,
                   const ImpactSurface& surface, const OracleSet& oracle_set,
                   const EvalContext& ctx, SymbolTable& symbols, CaseOutcome& out) {
    out.evaluated = true;
    bool first = true;
    for (std::size_t qi = 0; qi < record.questions.size(); ++qi) {
        const std::string& question = record.questions[qi];
        CaseAnswer run;
        std::string run_error;
        try {
            Decomposition decomposition = oracle_set.decomposer.decompose(question);
            if (ctx.flags.disable_retrieval) {
                run = run_chain(decomposition, [&](const SubQuestion& sub) {
                    return direct_llm_hop(sub, oracle_set, symbols);
                });
            } else {
                run = run_chain(decomposition, view, surface, oracle_set.oracles(), ctx.retrieval,
                                symbols);
            }
        } catch (const OracleUnavailableError&) {
            throw;
        } catch (const Error& e) {
            run_error = e.what();
        }
        ordered_json row;
        row["question"] = question;
        row["chain"] = case_answer_json(run);
        if (!run_error.empty()) row["error"] = run_error;
        out.runs.push_back(std::move(row));

        Score score = run_error.empty() ? score_case(run, record) : Score{};
        if (first) {
            first = false;
            out.h_hit = score.h_hit;
            out.question = question;
            out.answer = run.final_answer ? std::string(run.final_answer->text()) : std::string();
            out.error = run_error;
        }
        if (score.m_hit) {
            out.m_hit = true;
            out.paraphrase_index = static_cast<int>(qi);
            out.h_hit = score.h_hit;
            out.question = question;
            out.answer = std::string(run.final_answer->text());
            out.error.clear();
            break;
        }
    }
}

}  // namespace

ordered_json flags_json(const AblationFlags& flags) {
    return ordered_json{{"disable_construction", flags.disable_construction},
                        {"disable_retrieval", flags.disable_retrieval},
                        {"disable_update", flags.disable_update}};
}

std::vector<CaseRecord> ingest_dataset(const ordered_json& doc) {
    if (!doc.is_array()) throw SchemaError("dataset is not a JSON array");
    std::vector<CaseRecord> cases;
    std::unordered_set<std::string> seen_ids;
    for (std::size_t index = 0; index < doc.size(); ++index) {
        const ordered_json& row = doc[index];
        if (!row.is_object()) throw SchemaError("case is not a JSON object", index);
        CaseRecord record;

        if (auto it = row.find("case_id"); it != row.end()) {
            if (it->is_string()) {
                record.case_id = it->get<std::string>();
            } else if (it->is_number_integer()) {
                record.case_id = std::to_string(it->get<long long>());
            } else {
                throw SchemaError("case_id is neither a string nor an integer", index);
            }
        } else {
            record.case_id = "case_" + std::to_string(index + 1);
        }
        if (!seen_ids.insert(record.case_id).second) {
            throw SchemaError("duplicate case_id '" + record.case_id + "'", index);
        }

        auto questions = row.find("questions");
        if (questions == row.end() || !questions->is_array() || questions->empty()) {
            throw SchemaError("record missing questions", index);
        }
        for (const auto& q : *questions) {
            if (!q.is_string()) throw SchemaError("non-string question", index);
            record.questions.push_back(q.get<std::string>());
        }

        auto answer = row.find("new_answer");
        if (answer == row.end() || !answer->is_string() ||
            fold_key(answer->get<std::string>()).empty()) {
            throw SchemaError("record missing new_answer", index);
        }
        record.new_answer = answer->get<std::string>();

        for (const char* alias_key : {"new_answer_alias", "new_answer_aliases"}) {
            if (auto it = row.find(alias_key); it != row.end()) {
                if (!it->is_array()) throw SchemaError("aliases are not an array", index);
                for (const auto& alias : *it) {
                    if (!alias.is_string()) throw SchemaError("non-string alias", index);
                    record.aliases.push_back(alias.get<std::string>());
                }
            }
        }

        const ordered_json* gold = find_chain(row, "new_triples_labeled", "new_triples");
        if (gold == nullptr || gold->empty()) throw SchemaError("record missing new_triples", index);
        record.gold_new_chain = parse_chain(*gold, "new_triples", index);
        for (std::size_t hop = 1; hop < record.gold_new_chain.size(); ++hop) {
            if (fold_key(record.gold_new_chain[hop].s) !=
                fold_key(record.gold_new_chain[hop - 1].o)) {
                throw SchemaError("gold chain breaks between hop " + std::to_string(hop) + " and " +
                                      std::to_string(hop + 1),
                                  index);
            }
        }

        if (const ordered_json* orig = find_chain(row, "orig_triples_labeled", "orig_triples")) {
            record.orig_chain = parse_chain(*orig, "orig_triples", index);
        } else if (auto it = row.find("orig"); it != row.end() && it->is_object()) {
            if (const ordered_json* nested = find_chain(*it, "triples_labeled", "triples")) {
                record.orig_chain = parse_chain(*nested, "orig.triples", index);
            }
        }

        auto rewrites = row.find("requested_rewrite");
        if (rewrites == row.end() || !rewrites->is_array() || rewrites->empty()) {
            throw SchemaError("record missing requested_rewrite", index);
        }
        for (const auto& rw : *rewrites) {
            record.rewrites.push_back(parse_rewrite(rw, record.gold_new_chain, index));
        }

        cases.push_back(std::move(record));
    }
    return cases;
}

std::vector<CaseRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open dataset: " + path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
    return ingest_dataset(doc);
}

std::vector<RawTriple> evaluation_facts(std::span<const CaseRecord> cases,
                                        std::span<const RawTriple> extra_facts) {
    std::vector<RawTriple> facts;
    for (const CaseRecord& record : cases) {
        for (const RawTriple& triple : record.orig_chain) facts.push_back(triple);
        // Post-edit hops survive into the base unless this case's own rewrite
        // produced them; those carry edited content and must stay out.
        for (const RawTriple& triple : record.gold_new_chain) {
            bool edited = false;
            for (const RewriteSpec& rewrite : record.rewrites) {
                if (fold_key(triple.s) == fold_key(rewrite.subject) &&
                    fold_key(triple.r) == fold_key(rewrite.relation)) {
                    edited = true;
                    break;
                }
            }
            if (!edited) facts.push_back(triple);
        }
    }
    facts.insert(facts.end(), extra_facts.begin(), extra_facts.end());
    return facts;
}

Score score_case(const CaseAnswer& answer, const CaseRecord& record) {
    Score score;
    if (answer.final_answer) {
        std::string key = fold_key(answer.final_answer->text());
        if (key == fold_key(record.new_answer)) {
            score.m_hit = true;
        } else {
            for (const std::string& alias : record.aliases) {
                if (key == fold_key(alias)) {
                    score.m_hit = true;
                    break;
                }
            }
        }
    }
    if (!answer.hops.empty() && answer.hops.size() == record.gold_new_chain.size()) {
        bool all = true;
        for (std::size_t i = 0; i < answer.hops.size(); ++i) {
            const auto& carried = answer.hops[i].carried_entity;
            if (!carried || fold_key(carried->text()) != fold_key(record.gold_new_chain[i].o)) {
                all = false;
                break;
            }
        }
        score.h_hit = all;
    }
    return score;
}

MetricsReport run_eval(std::span<const CaseRecord> cases, const EvalContext& ctx,
                       const OracleFactory& factory) {
    MetricsReport report;
    report.setting = ctx.batch.name();
    report.flags = ctx.flags;
    report.n_cases = cases.size();
    report.per_case.resize(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) report.per_case[i].case_id = cases[i].case_id;

    const std::size_t n = cases.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (ctx.shuffle_seed) {
        std::mt19937_64 rng(*ctx.shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    const std::size_t batch_size = ctx.batch.k ? ctx.batch.k : n;

    std::vector<RawTriple> base_facts = evaluation_facts(cases, ctx.extra_facts);

    std::optional<Store> global_store;
    std::optional<OracleSet> global_oracles;
    if (!ctx.flags.disable_construction && n > 0) {
        global_store.emplace(std::span<const RawTriple>(base_facts));
        global_oracles = factory(*global_store);
    }

    try {
        for (std::size_t start = 0, batch_index = 0; start < n;
             start += batch_size, ++batch_index) {
            const std::size_t end = std::min(n, start + batch_size);
            std::span<const std::size_t> batch_order(order.data() + start, end - start);

            if (ctx.flags.disable_construction) {
                std::vector<RawTriple> merged = merge_batch_facts(base_facts, cases, batch_order);
                Store batch_store{std::span<const RawTriple>(merged)};
                OracleSet oracle_set = factory(batch_store);
                ImpactSurface no_surface;  // flat world: routing always stays on base
                LayeredView view = batch_store.base_view();
                parallel_for(batch_order.size(), ctx.jobs, [&](std::size_t j) {
                    const std::size_t slot = batch_order[j];
                    evaluate_case(cases[slot], view, no_surface, oracle_set, ctx,
                                  batch_store.symbols(), report.per_case[slot]);
                });
                continue;
            }

            Store& store = *global_store;
            const std::string shared_case = shared_batch_case(batch_index);
            for (std::size_t slot : batch_order) {
                const CaseRecord& record = cases[slot];
                const std::string& target = ctx.flags.disable_update ? shared_case : record.case_id;
                Overlay& overlay = store.overlays().ensure(target);
                for (const RewriteSpec& rewrite : record.rewrites) {
                    Edit edit = store.engine().make_edit(
                        target, rewrite.subject, rewrite.relation,
                        rewrite.target_true ? std::optional<std::string_view>(*rewrite.target_true)
                                            : std::nullopt,
                        rewrite.target_new);
                    store.engine().apply_edit(overlay, edit);
                }
            }
            parallel_for(batch_order.size(), ctx.jobs, [&](std::size_t j) {
                const std::size_t slot = batch_order[j];
                const CaseRecord& record = cases[slot];
                const std::string& view_case =
                    ctx.flags.disable_update ? shared_case : record.case_id;
                LayeredView view = store.view(view_case);
                const ImpactSurface& surface = store.surface(view_case);
                evaluate_case(record, view, surface, *global_oracles, ctx, store.symbols(),
                              report.per_case[slot]);
            });
        }
    } catch (const OracleUnavailableError& e) {
        report.complete = false;
        report.error = e.what();
    }

    for (const CaseOutcome& outcome : report.per_case) {
        report.m_hits += outcome.m_hit ? 1 : 0;
        report.h_hits += outcome.h_hit ? 1 : 0;
    }
    report.m_acc = n ? static_cast<double>(report.m_hits) / static_cast<double>(n) : 0.0;
    report.h_acc = n ? static_cast<double>(report.h_hits) / static_cast<double>(n) : 0.0;
    return report;
}

ordered_json MetricsReport::to_json() const {
    ordered_json j;
    j["m_acc"] = m_acc;
    j["h_acc"] = h_acc;
    j["setting"] = setting;
    j["flags"] = flags_json(flags);
    j["n_cases"] = n_cases;
    j["m_hits"] = m_hits;
    j["h_hits"] = h_hits;
    j["complete"] = complete;
    if (!complete) j["error"] = error;
    return j;
}

void write_traces_jsonl(std::ostream& out, const MetricsReport& report) {
    for (const CaseOutcome& c : report.per_case) {
        ordered_json row;
        row["case_id"] = c.case_id;
        row["evaluated"] = c.evaluated;
        row["m_hit"] = c.m_hit;
        row["h_hit"] = c.h_hit;
        row["paraphrase_index"] = c.paraphrase_index;
        row["question"] = c.question;
        row["answer"] = c.answer;
        if (!c.error.empty()) row["error"] = c.error;
        row["runs"] = ordered_json(c.runs);
        out << row.dump() << '\n';
    }
}

ordered_json settings_breakdown(std::span<const MetricsReport> reports) {
    ordered_json per_setting = ordered_json::object();
    for (const MetricsReport& report : reports) per_setting[report.setting] = report.to_json();
    return ordered_json{{"per_setting", per_setting}};
}

}  // namespace capekg
