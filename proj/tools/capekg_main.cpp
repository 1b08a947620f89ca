// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 CAPE-KG Contributors
//
// capekg — layered knowledge-graph engine with case-isolated edits,
// edit-aware progressive retrieval, and a multi-hop evaluation harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capekg/config.hpp"
#include "capekg/errors.hpp"
#include "capekg/eval.hpp"
#include "capekg/http_llm.hpp"
#include "capekg/io.hpp"
#include "capekg/mock_oracles.hpp"
#include "capekg/reasoner.hpp"
#include "capekg/store.hpp"

namespace {

using capekg::EngineConfig;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInternalError = 2;

// Flag values shared by the retrieval-bearing subcommands. NaN sentinels mean
// "not set on the command line" so config-file values survive.
struct CommonOptions {
    std::string config_path;
    double tau = -1.0;
    double lambda = -1.0;
    double alpha = -1.0;
    long long demo_count = -1;
    std::string mock_fixtures_path;
    std::string demos_path;
    std::string transcript_path;
    bool json = false;
};

void add_tuning_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "INI config file");
    cmd->add_option("--tau", opt.tau, "high-confidence threshold");
    cmd->add_option("--lambda", opt.lambda, "sigma multiplier for the confidence cutoff");
    cmd->add_option("--alpha", opt.alpha, "suppression factor for unreferenced edited entities");
    cmd->add_option("--demo-count", opt.demo_count, "few-shot demos per decomposition");
}

void add_oracle_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--mock-fixtures", opt.mock_fixtures_path,
                    "JSONL fixtures for scripted detector/LLM/decompositions");
    cmd->add_option("--demos", opt.demos_path, "JSONL demo pool for few-shot decomposition");
    cmd->add_option("--transcript", opt.transcript_path, "write the oracle transcript JSONL here");
}

// Flag > config file > built-in default.
EngineConfig resolve_config(const CommonOptions& opt) {
    EngineConfig config;
    if (!opt.config_path.empty()) config = capekg::load_config(opt.config_path);
    if (opt.tau >= 0.0) config.retrieval.tau = opt.tau;
    if (opt.lambda >= 0.0) config.retrieval.lambda = opt.lambda;
    if (opt.alpha >= 0.0) config.retrieval.suppression_alpha = opt.alpha;
    if (opt.demo_count >= 0) config.demo_count = static_cast<std::size_t>(opt.demo_count);
    return config;
}

// Lexicon detector over everything the base graph mentions: subjects and
// objects as entities, relations as relations.
std::unique_ptr<capekg::LexiconDetector> lexicon_from_base(capekg::Store& store,
                                                           capekg::Transcript* transcript) {
    auto detector = std::make_unique<capekg::LexiconDetector>(store.symbols(), transcript);
    for (const capekg::Triple& triple : store.base().triples()) {
        detector->add_entity(triple.subject);
        detector->add_entity(triple.object);
        detector->add_relation(triple.relation);
    }
    return detector;
}

capekg::OracleSet build_oracles(capekg::Store& store, const capekg::MockFixtures& fixtures,
                                const std::vector<capekg::DemoExample>& demo_pool,
                                const EngineConfig& config, capekg::Transcript* transcript) {
    capekg::OracleSet set;
    if (fixtures.has_detector()) {
        auto scripted = std::make_unique<capekg::ScriptedDetector>(
            store.symbols(), transcript, lexicon_from_base(store, nullptr));
        for (const auto& [query, entry] : fixtures.detector_entries) scripted->script(query, entry);
        set.detector = std::move(scripted);
    } else {
        set.detector = lexicon_from_base(store, transcript);
    }

    if (fixtures.has_llm()) {
        auto llm = std::make_unique<capekg::ScriptedLlm>(transcript);
        for (const auto& [pattern, response] : fixtures.llm_entries) llm->script(pattern, response);
        set.llm = std::move(llm);
    } else if (auto http = capekg::HttpLlmClient::config_from_env()) {
        set.llm = std::make_unique<capekg::HttpLlmClient>(*http, transcript);
    }

    set.embedder = std::make_unique<capekg::HashedBowEmbedder>(512, nullptr);

    set.decomposer.set_demo_pool(demo_pool);
    set.decomposer.set_demo_count(config.demo_count);
    set.decomposer.set_oracles(set.embedder.get(), set.llm.get());
    for (const auto& [question, steps] : fixtures.decompositions) {
        set.decomposer.script(question, steps);
    }
    return set;
}

void apply_edit_file(capekg::Store& store, const std::string& edits_path,
                     capekg::DetectorOracle& detector, std::size_t& applied) {
    for (const capekg::RawEdit& raw : capekg::load_edits_jsonl(edits_path)) {
        capekg::Overlay& overlay = store.overlays().ensure(raw.case_id);
        capekg::Edit edit =
            raw.is_text()
                ? store.engine().extract_edit(capekg::EditStatement{raw.case_id, raw.text},
                                              detector)
                : store.engine().make_edit(
                      raw.case_id, raw.subject, raw.relation,
                      raw.object_true ? std::optional<std::string_view>(*raw.object_true)
                                      : std::nullopt,
                      raw.object_new);
        store.engine().apply_edit(overlay, edit);
        ++applied;
    }
}

void write_transcript_if_requested(const CommonOptions& opt, const capekg::Transcript& transcript) {
    if (opt.transcript_path.empty()) return;
    std::ofstream out(opt.transcript_path);
    if (!out) throw capekg::ParseError("cannot write transcript: " + opt.transcript_path);
    transcript.write_jsonl(out);
}

// Output path that may name a directory ("<dir>/traces.jsonl" inside).
std::string resolve_trace_path(const std::string& raw) {
    namespace fs = std::filesystem;
    fs::path path(raw);
    if (fs::is_directory(path)) return (path / "traces.jsonl").string();
    return path.string();
}

// --- subcommands -------------------------------------------------------------

int cmd_build(const std::string& facts_path, const std::string& out_path, bool json) {
    std::vector<capekg::RawTriple> facts = capekg::load_facts_jsonl(facts_path);
    capekg::Store store{std::span<const capekg::RawTriple>(facts)};

    std::ofstream out(out_path);
    if (!out) throw capekg::ParseError("cannot write base artifact: " + out_path);
    capekg::save_facts_jsonl(out, store.base());

    ordered_json summary{{"triples", store.base().size()},
                         {"entities", store.base().entity_count()},
                         {"relations", store.base().relation_count()},
                         {"duplicates", store.duplicate_facts()}};
    if (!json) summary["out"] = out_path;
    std::cout << summary.dump() << '\n';
    return kExitOk;
}

int cmd_edit(const std::string& base_path, const std::string& edits_path,
             const std::string& out_path, const CommonOptions& opt) {
    std::vector<capekg::RawTriple> facts = capekg::load_facts_jsonl(base_path);
    capekg::Store store{std::span<const capekg::RawTriple>(facts)};
    store.engine().set_extraction_floor(resolve_config(opt).retrieval.tau);

    capekg::Transcript transcript;
    capekg::MockFixtures fixtures;
    if (!opt.mock_fixtures_path.empty()) fixtures = capekg::MockFixtures::load(opt.mock_fixtures_path);
    capekg::OracleSet oracles = build_oracles(store, fixtures, {}, resolve_config(opt), &transcript);

    std::size_t applied = 0;
    apply_edit_file(store, edits_path, *oracles.detector, applied);

    std::ostringstream dump;
    capekg::save_overlay_dump(dump, store.overlays());
    if (out_path.empty()) {
        std::cout << dump.str();
    } else {
        std::ofstream out(out_path);
        if (!out) throw capekg::ParseError("cannot write overlay dump: " + out_path);
        out << dump.str();
    }
    write_transcript_if_requested(opt, transcript);

    // With --out the dump lands in the file and stdout carries the summary;
    // without it stdout is the dump itself (already line-delimited JSON).
    ordered_json summary{{"cases", store.overlays().size()}, {"edits", applied}};
    if (!out_path.empty()) std::cout << summary.dump() << '\n';
    return kExitOk;
}

int cmd_query(const std::string& base_path, const std::string& edits_path,
              const std::string& case_id, const std::string& question, const CommonOptions& opt) {
    EngineConfig config = resolve_config(opt);

    std::vector<capekg::RawTriple> facts = capekg::load_facts_jsonl(base_path);
    capekg::Store store{std::span<const capekg::RawTriple>(facts)};
    store.engine().set_extraction_floor(config.retrieval.tau);

    capekg::Transcript transcript;
    capekg::MockFixtures fixtures;
    if (!opt.mock_fixtures_path.empty()) fixtures = capekg::MockFixtures::load(opt.mock_fixtures_path);
    std::vector<capekg::DemoExample> demos;
    if (!opt.demos_path.empty()) demos = capekg::load_demo_pool(opt.demos_path);
    capekg::OracleSet oracles = build_oracles(store, fixtures, demos, config, &transcript);

    if (!edits_path.empty()) {
        std::size_t applied = 0;
        apply_edit_file(store, edits_path, *oracles.detector, applied);
    }
    // A case with no edits still gets an (empty) overlay and surface.
    store.overlays().ensure(case_id);

    capekg::Decomposition decomposition = oracles.decomposer.decompose(question);
    capekg::CaseAnswer answer =
        capekg::run_chain(decomposition, store.view(case_id), store.surface(case_id),
                          oracles.oracles(), config.retrieval, store.symbols());
    write_transcript_if_requested(opt, transcript);

    ordered_json result;
    result["case_id"] = case_id;
    result["question"] = question;
    result["final_answer"] = answer.final_answer ? ordered_json(answer.final_answer->text())
                                                 : ordered_json(nullptr);
    result["hops"] = ordered_json::array();
    for (const capekg::HopTrace& hop : answer.hops) result["hops"].push_back(capekg::hop_json(hop));

    if (opt.json) {
        std::cout << result.dump() << '\n';
    } else {
        std::cout << "answer: "
                  << (answer.final_answer ? std::string(answer.final_answer->text())
                                          : std::string("(unanswered)"))
                  << '\n';
        for (const capekg::HopTrace& hop : answer.hops) {
            std::cout << "hop " << hop.hop << ": " << capekg::hop_json(hop).dump() << '\n';
        }
    }
    return kExitOk;
}

int cmd_eval(const std::string& dataset_path, const std::string& batch_text,
             const std::vector<std::string>& ablations, const std::string& extra_facts_path,
             const std::string& traces_path, unsigned jobs,
             std::optional<std::uint64_t> shuffle_seed, const CommonOptions& opt) {
    EngineConfig config = resolve_config(opt);

    capekg::EvalContext ctx;
    ctx.retrieval = config.retrieval;
    ctx.jobs = jobs;
    ctx.shuffle_seed = shuffle_seed;
    if (batch_text == "all") {
        ctx.batch.k = 0;
    } else {
        try {
            std::size_t pos = 0;
            long long parsed = std::stoll(batch_text, &pos);
            if (pos != batch_text.size() || parsed <= 0) throw std::invalid_argument(batch_text);
            ctx.batch.k = static_cast<std::size_t>(parsed);
        } catch (const std::logic_error&) {
            throw capekg::ParseError("--batch expects a positive integer or 'all', got '" +
                                     batch_text + "'");
        }
    }
    for (const std::string& flag : ablations) {
        if (flag == "construction") {
            ctx.flags.disable_construction = true;
        } else if (flag == "retrieval") {
            ctx.flags.disable_retrieval = true;
        } else if (flag == "update") {
            ctx.flags.disable_update = true;
        } else {
            throw capekg::ParseError("unknown --ablate value '" + flag +
                                     "' (expected construction|retrieval|update)");
        }
    }
    if (!extra_facts_path.empty()) ctx.extra_facts = capekg::load_facts_jsonl(extra_facts_path);

    std::vector<capekg::CaseRecord> cases = capekg::load_dataset(dataset_path);

    capekg::Transcript transcript;
    capekg::MockFixtures fixtures;
    if (!opt.mock_fixtures_path.empty()) fixtures = capekg::MockFixtures::load(opt.mock_fixtures_path);
    std::vector<capekg::DemoExample> demos;
    if (!opt.demos_path.empty()) demos = capekg::load_demo_pool(opt.demos_path);

    capekg::OracleFactory factory = [&](capekg::Store& store) {
        return build_oracles(store, fixtures, demos, config, &transcript);
    };
    capekg::MetricsReport report = capekg::run_eval(cases, ctx, factory);

    if (!traces_path.empty()) {
        std::string resolved = resolve_trace_path(traces_path);
        std::ofstream out(resolved);
        if (!out) throw capekg::ParseError("cannot write traces: " + resolved);
        capekg::write_traces_jsonl(out, report);
    }
    write_transcript_if_requested(opt, transcript);

    std::cout << report.to_json().dump() << '\n';
    return report.complete ? kExitOk : kExitInternalError;
}

int cmd_inspect(const std::string& base_path, const std::string& edits_path,
                const CommonOptions& opt) {
    std::vector<capekg::RawTriple> facts = capekg::load_facts_jsonl(base_path);
    capekg::Store store{std::span<const capekg::RawTriple>(facts)};
    store.engine().set_extraction_floor(resolve_config(opt).retrieval.tau);

    if (!edits_path.empty()) {
        capekg::Transcript transcript;
        capekg::MockFixtures fixtures;
        if (!opt.mock_fixtures_path.empty()) {
            fixtures = capekg::MockFixtures::load(opt.mock_fixtures_path);
        }
        capekg::OracleSet oracles =
            build_oracles(store, fixtures, {}, resolve_config(opt), &transcript);
        std::size_t applied = 0;
        apply_edit_file(store, edits_path, *oracles.detector, applied);
    }

    char fingerprint[17];
    std::snprintf(fingerprint, sizeof fingerprint, "%016llx",
                  static_cast<unsigned long long>(store.base().fingerprint()));

    ordered_json result{{"triples", store.base().size()},
                        {"entities", store.base().entity_count()},
                        {"relations", store.base().relation_count()},
                        {"duplicates", store.duplicate_facts()},
                        {"fingerprint", fingerprint},
                        {"indices_ok", store.base().check_indices()}};
    ordered_json case_rows = ordered_json::array();
    for (const capekg::Overlay* overlay : store.overlays().in_creation_order()) {
        ordered_json row{{"case_id", overlay->case_id()},
                         {"delta_size", overlay->delta_size()},
                         {"log_size", overlay->log().size()}};
        const capekg::ImpactSurface& surface = store.surface(overlay->case_id());
        row["subjects"] = surface.subjects.size();
        row["relations"] = surface.relations.size();
        case_rows.push_back(std::move(row));
    }
    result["cases"] = std::move(case_rows);

    if (opt.json) {
        std::cout << result.dump() << '\n';
    } else {
        std::cout << "triples=" << store.base().size() << " entities="
                  << store.base().entity_count() << " relations=" << store.base().relation_count()
                  << " duplicates=" << store.duplicate_facts() << " fingerprint=" << fingerprint
                  << '\n';
        for (const auto& row : result["cases"]) {
            std::cout << "case " << row["case_id"].get<std::string>()
                      << ": delta=" << row["delta_size"].get<std::size_t>()
                      << " log=" << row["log_size"].get<std::size_t>() << '\n';
        }
    }
    return kExitOk;
}

int classify_error_exit(const capekg::Error& error) {
    if (error.kind() == "OracleUnavailable") return kExitInternalError;
    return kExitUserError;
}

void print_error(const capekg::Error& error) {
    ordered_json row{{"error", ordered_json{{"kind", error.kind()}, {"message", error.what()}}}};
    std::cerr << row.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered knowledge-graph engine with case-isolated edits"};
    app.require_subcommand(1);

    // build
    std::string build_facts, build_out;
    bool build_json = false;
    CLI::App* build = app.add_subcommand("build", "seal a base graph from a facts JSONL file");
    build->add_option("--facts", build_facts, "facts JSONL ({\"s\",\"r\",\"o\"} rows)")->required();
    build->add_option("--out", build_out, "output path for the canonical base artifact")->required();
    build->add_flag("--json", build_json, "machine-readable output");

    // edit
    std::string edit_base, edit_edits, edit_out;
    CommonOptions edit_opt;
    CLI::App* edit = app.add_subcommand("edit", "apply an edits file onto per-case overlays");
    edit->add_option("--base", edit_base, "base facts JSONL")->required();
    edit->add_option("--edits", edit_edits, "edits JSONL (structured or free-text rows)")->required();
    edit->add_option("--out", edit_out, "overlay dump path (stdout when omitted)");
    add_tuning_flags(edit, edit_opt);
    add_oracle_flags(edit, edit_opt);
    edit->add_flag("--json", edit_opt.json, "machine-readable output");

    // query
    std::string query_base, query_edits, query_case, query_question;
    CommonOptions query_opt;
    CLI::App* query = app.add_subcommand("query", "answer one question under a case's overlay");
    query->add_option("--base", query_base, "base facts JSONL")->required();
    query->add_option("--edits", query_edits, "edits JSONL applied before answering");
    query->add_option("--case", query_case, "case id selecting the overlay")->required();
    query->add_option("--question", query_question, "question text")->required();
    add_tuning_flags(query, query_opt);
    add_oracle_flags(query, query_opt);
    query->add_flag("--json", query_opt.json, "machine-readable output");

    // eval
    std::string eval_dataset, eval_batch = "all", eval_facts, eval_traces;
    std::vector<std::string> eval_ablate;
    unsigned eval_jobs = 0;
    std::optional<std::uint64_t> eval_seed;
    std::uint64_t eval_seed_value = 0;
    CommonOptions eval_opt;
    CLI::App* eval = app.add_subcommand("eval", "run a dataset and report M-Acc / H-Acc");
    eval->add_option("--dataset", eval_dataset, "dataset JSON (array of cases)")->required();
    eval->add_option("--batch", eval_batch, "batch size: positive integer or 'all'");
    eval->add_option("--ablate", eval_ablate, "disable construction|retrieval|update")
        ->delimiter(',');
    eval->add_option("--facts", eval_facts, "extra facts JSONL merged into the base");
    eval->add_option("--traces", eval_traces, "per-case trace JSONL file (or directory)");
    eval->add_option("--jobs", eval_jobs, "worker threads (0 = hardware)");
    CLI::Option* seed_opt = eval->add_option("--shuffle-seed", eval_seed_value,
                                             "shuffle case order with this seed before batching");
    add_tuning_flags(eval, eval_opt);
    add_oracle_flags(eval, eval_opt);
    eval->add_flag("--json", eval_opt.json, "machine-readable output");

    // inspect
    std::string inspect_base, inspect_edits;
    CommonOptions inspect_opt;
    CLI::App* inspect = app.add_subcommand("inspect", "summarize a base artifact and overlays");
    inspect->add_option("--base", inspect_base, "base facts JSONL")->required();
    inspect->add_option("--edits", inspect_edits, "edits JSONL to apply before inspecting");
    add_tuning_flags(inspect, inspect_opt);
    add_oracle_flags(inspect, inspect_opt);
    inspect->add_flag("--json", inspect_opt.json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (seed_opt->count() > 0) eval_seed = eval_seed_value;
        if (build->parsed()) return cmd_build(build_facts, build_out, build_json);
        if (edit->parsed()) return cmd_edit(edit_base, edit_edits, edit_out, edit_opt);
        if (query->parsed()) {
            return cmd_query(query_base, query_edits, query_case, query_question, query_opt);
        }
        if (eval->parsed()) {
            return cmd_eval(eval_dataset, eval_batch, eval_ablate, eval_facts, eval_traces,
                            eval_jobs, eval_seed, eval_opt);
        }
        if (inspect->parsed()) return cmd_inspect(inspect_base, inspect_edits, inspect_opt);
        std::cerr << "no subcommand given\n";
        return kExitUserError;
    } catch (const capekg::Error& e) {
        print_error(e);
        return classify_error_exit(e);
    } catch (const std::exception& e) {
        ordered_json row{{"error", ordered_json{{"kind", "Internal"}, {"message", e.what()}}}};
        std::cerr << row.dump() << '\n';
        return kExitInternalError;
    }
}
