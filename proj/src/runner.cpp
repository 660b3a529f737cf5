#include "agora/runner.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "agora/turtle.hpp"

#if defined(AGORA_EXTERNAL_BACKEND)
#include "agora/external_backend.hpp"
#endif

namespace agora::runner {

using nlohmann::json;

bool ReplayResult::all_passed() const {
    for (const auto& check : checks) {
        if (!check.passed) {
            return false;
        }
    }
    return true;
}

std::unique_ptr<Perspective> build_perspective(const PerspectiveSpec& spec,
                                               const std::map<std::string, std::string>& prefixes,
                                               BackendOverride backend) {
    PerspectiveConfig config = spec.config;
    switch (backend) {
        case BackendOverride::FromScenario: break;
        case BackendOverride::Scripted: config.backend = BackendKind::Scripted; break;
        case BackendOverride::Rules: config.backend = BackendKind::RuleBased; break;
    }

    std::shared_ptr<PerspectiveBackend> impl;
    switch (config.backend) {
        case BackendKind::Scripted:
            if (!spec.fixture) {
                throw ScenarioError("perspective '" + config.id +
                                    "' has no scripted fixture but the scripted backend was "
                                    "requested");
            }
            impl = std::make_shared<ScriptedBackend>(*spec.fixture);
            break;
        case BackendKind::RuleBased:
            if (!spec.rules) {
                throw ScenarioError("perspective '" + config.id +
                                    "' has no rule set but the rule backend was requested");
            }
            impl = std::make_shared<RuleBasedBackend>(*spec.rules);
            break;
        case BackendKind::External:
#if defined(AGORA_EXTERNAL_BACKEND)
            if (!spec.endpoint) {
                throw ScenarioError("perspective '" + config.id +
                                    "' has no endpoint but the external backend was requested");
            }
            impl = std::make_shared<ExternalBackend>(*spec.endpoint);
            break;
#else
            throw ScenarioError("perspective '" + config.id +
                                "' requests the external backend, but this build does not "
                                "include it (configure with AGORA_EXTERNAL_BACKEND=ON)");
#endif
    }
    return std::make_unique<Perspective>(std::move(config), std::move(impl), prefixes);
}

std::unique_ptr<Arbiter> build_arbiter(const Scenario& scenario, const RunnerOptions& options) {
    auto arbiter = std::make_unique<Arbiter>(options.arbiter, scenario.buffer_ttl);
    for (const auto& spec : scenario.perspectives) {
        arbiter->register_perspective(
            build_perspective(spec, scenario.prefixes, options.backend));
    }
    return arbiter;
}

namespace {

std::string join_sorted(const std::set<std::string>& values) {
    std::string out = "{";
    bool first = true;
    for (const auto& v : values) {
        if (!first) {
            out += ", ";
        }
        out += v;
        first = false;
    }
    return out + "}";
}

std::string mode_string(const RetrievalOutcome& outcome) {
    return outcome.mode ? af::to_string(outcome.mode->mode) : "none";
}

std::optional<std::string> detail_string(const RetrievalOutcome& outcome) {
    if (outcome.mode && outcome.mode->detail) {
        return *outcome.mode->detail == af::CompositionDetail::Complementary
                   ? std::string("complementary")
                   : std::string("filtered");
    }
    return std::nullopt;
}

}  // namespace

std::vector<ReplayCheck> diff_encoding(const Scenario& scenario, const EncodingReport& report) {
    std::vector<ReplayCheck> checks;
    if (!scenario.expected) {
        return checks;
    }
    const auto& expected = *scenario.expected;

    for (const auto& observation : scenario.observations) {
        auto row = expected.matrix.find(observation.id);
        if (row == expected.matrix.end()) {
            continue;
        }
        ReplayCheck check{"encoding.matrix[" + observation.id + "]", true, ""};
        for (const auto& [pid, want_encoded] : row->second) {
            const auto obs_row = report.cells.find(observation.id);
            const bool encoded =
                obs_row != report.cells.end() && obs_row->second.count(pid) &&
                obs_row->second.at(pid).status == EncodingCell::Status::Encoded;
            if (encoded != want_encoded) {
                check.passed = false;
                check.detail += (check.detail.empty() ? "" : "; ") + pid + ": expected " +
                                (want_encoded ? "encoded" : "skipped") + ", got " +
                                (encoded ? "encoded" : "not encoded");
            }
        }
        checks.push_back(std::move(check));
    }

    ReplayCheck totals{"encoding.totals", true, ""};
    for (const auto& [pid, want] : expected.totals) {
        const auto it = report.encoded_per_perspective.find(pid);
        const int got = it == report.encoded_per_perspective.end() ? 0 : it->second;
        if (got != want) {
            totals.passed = false;
            totals.detail += (totals.detail.empty() ? "" : "; ") + pid + ": expected " +
                             std::to_string(want) + ", got " + std::to_string(got);
        }
    }
    if (report.encoded_total != expected.total) {
        totals.passed = false;
        totals.detail += (totals.detail.empty() ? "" : "; ") + std::string("total: expected ") +
                         std::to_string(expected.total) + ", got " +
                         std::to_string(report.encoded_total);
    }
    checks.push_back(std::move(totals));
    return checks;
}

std::vector<ReplayCheck> diff_query(const Scenario& scenario, const std::string& query_id,
                                    const RetrievalOutcome& outcome) {
    std::vector<ReplayCheck> checks;
    if (!scenario.expected) {
        return checks;
    }
    auto it = scenario.expected->queries.find(query_id);
    if (it == scenario.expected->queries.end()) {
        return checks;
    }
    const GoldenQueryExpectation& golden = it->second;
    const std::string base = "queries." + query_id;

    std::set<std::pair<std::string, std::string>> got_attacks;
    for (const auto& [attacker, target] : outcome.graph.edges()) {
        got_attacks.insert({attacker, target});
    }
    {
        ReplayCheck check{base + ".attacks", got_attacks == golden.attacks, ""};
        if (!check.passed) {
            std::string want;
            for (const auto& [a, t] : golden.attacks) {
                want += a + "->" + t + " ";
            }
            std::string got;
            for (const auto& [a, t] : got_attacks) {
                got += a + "->" + t + " ";
            }
            check.detail = "expected [" + want + "], got [" + got + "]";
        }
        checks.push_back(std::move(check));
    }
    {
        const std::set<std::string> got(outcome.grounded.begin(), outcome.grounded.end());
        ReplayCheck check{base + ".grounded", got == golden.grounded, ""};
        if (!check.passed) {
            check.detail =
                "expected " + join_sorted(golden.grounded) + ", got " + join_sorted(got);
        }
        checks.push_back(std::move(check));
    }
    {
        const std::string got_mode = mode_string(outcome);
        const auto got_detail = detail_string(outcome);
        bool passed = got_mode == golden.mode;
        if (golden.detail && (!got_detail || *got_detail != *golden.detail)) {
            passed = false;
        }
        ReplayCheck check{base + ".mode", passed, ""};
        if (!passed) {
            check.detail = "expected " + golden.mode +
                           (golden.detail ? "(" + *golden.detail + ")" : "") + ", got " +
                           got_mode + (got_detail ? "(" + *got_detail + ")" : "");
        }
        checks.push_back(std::move(check));
    }
    if (golden.preferred) {
        std::set<std::set<std::string>> got;
        if (outcome.preferred) {
            for (const auto& ext : *outcome.preferred) {
                got.insert(std::set<std::string>(ext.begin(), ext.end()));
            }
        }
        ReplayCheck check{base + ".preferred", got == *golden.preferred, ""};
        if (!check.passed) {
            std::string detail = "expected {";
            for (const auto& ext : *golden.preferred) {
                detail += join_sorted(ext) + " ";
            }
            detail += "}, got {";
            for (const auto& ext : got) {
                detail += join_sorted(ext) + " ";
            }
            check.detail = detail + "}";
        }
        checks.push_back(std::move(check));
    }
    return checks;
}

ReplayResult run_replay(const Scenario& scenario, const RunnerOptions& options) {
    if (!scenario.expected) {
        throw ScenarioError("scenario '" + scenario.name +
                            "' has no expected section; replay needs goldens to compare "
                            "against");
    }
    ReplayResult result;
    result.arbiter = build_arbiter(scenario, options);
    result.report = result.arbiter->run_encoding_cycle(scenario.observations);
    result.checks = diff_encoding(scenario, result.report);
    for (const auto& query : scenario.queries) {
        RetrievalOutcome outcome = result.arbiter->run_query(query.ctx);
        const auto checks = diff_query(scenario, query.id, outcome);
        result.checks.insert(result.checks.end(), checks.begin(), checks.end());
        result.outcomes.emplace_back(query.id, std::move(outcome));
    }
    return result;
}

namespace {

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json cell_to_json(const EncodingCell& cell) {
    json out;
    switch (cell.status) {
        case EncodingCell::Status::Encoded:
            out["status"] = "encoded";
            out["encoding_id"] = cell.encoding_id;
            break;
        case EncodingCell::Status::Skipped:
            out["status"] = "skipped";
            out["rationale"] = cell.rationale;
            break;
        case EncodingCell::Status::Failed:
            out["status"] = "failed";
            out["error"] = cell.error;
            break;
    }
    return out;
}

json extension_json(const af::AttackGraph& graph, const af::Extension& extension) {
    return json(af::declaration_ordered(graph, extension));
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << content;
}

}  // namespace

json report_to_json(const Scenario& scenario, const EncodingReport& report,
                    const RunnerOptions& options) {
    json out;
    out["scenario"] = scenario.name;
    if (!options.logical_clock) {
        out["generated_at"] = iso_now();
    }
    out["observations"] = report.observation_order;
    out["perspectives"] = report.perspective_order;
    json matrix = json::object();
    for (const auto& [obs_id, row] : report.cells) {
        json row_json = json::object();
        for (const auto& [pid, cell] : row) {
            row_json[pid] = cell_to_json(cell);
        }
        matrix[obs_id] = std::move(row_json);
    }
    out["matrix"] = std::move(matrix);
    out["totals"] = {{"per_perspective", report.encoded_per_perspective},
                     {"encoded", report.encoded_total}};
    out["relevance_checks"] = report.relevance_checks;
    out["encode_calls"] = report.encode_calls;
    out["evicted"] = report.evicted;
    return out;
}

json outcome_to_json(const std::string& query_id, const RetrievalOutcome& outcome) {
    json out;
    out["query"] = {{"id", query_id},
                    {"text", outcome.ctx.query},
                    {"querier", outcome.ctx.querier},
                    {"decision_type", outcome.ctx.decision_type},
                    {"priorities", outcome.ctx.priorities}};

    json proposals = json::array();
    for (const auto& p : outcome.proposals) {
        proposals.push_back({{"perspective", p.perspective_id},
                             {"interpretation", p.interpretation},
                             {"relevance_claim", p.relevance_claim},
                             {"supporting_encodings", p.supporting_encodings}});
    }
    out["proposals"] = std::move(proposals);

    json attacks = json::array();
    for (const auto& a : outcome.attacks) {
        attacks.push_back(
            {{"attacker", a.attacker}, {"target", a.target}, {"justification", a.justification}});
    }
    out["attacks"] = std::move(attacks);

    json edges = json::array();
    for (const auto& [attacker, target] : outcome.graph.edges()) {
        edges.push_back(json::array({attacker, target}));
    }
    out["graph"] = {{"arguments", outcome.graph.arguments()}, {"edges", std::move(edges)}};
    out["grounded"] = extension_json(outcome.graph, outcome.grounded);
    if (outcome.preferred) {
        json preferred = json::array();
        for (const auto& ext : *outcome.preferred) {
            preferred.push_back(extension_json(outcome.graph, ext));
        }
        out["preferred"] = std::move(preferred);
    }
    out["mode"] = mode_string(outcome);
    if (const auto detail = detail_string(outcome)) {
        out["detail"] = *detail;
    }

    json response;
    response["kind"] = outcome.response.kind;
    if (outcome.response.primary) {
        response["primary"] = {{"perspective", outcome.response.primary->perspective_id},
                               {"heading", outcome.response.primary->heading},
                               {"interpretation", outcome.response.primary->interpretation}};
    }
    json sections = json::array();
    for (const auto& s : outcome.response.sections) {
        sections.push_back({{"perspective", s.perspective_id},
                            {"heading", s.heading},
                            {"interpretation", s.interpretation}});
    }
    response["sections"] = std::move(sections);
    if (!outcome.response.conflict_statement.empty()) {
        response["conflict_statement"] = outcome.response.conflict_statement;
    }
    out["response"] = std::move(response);

    json explanation;
    explanation["summary"] = outcome.explanation.summary;
    json selected = json::array();
    for (const auto& s : outcome.explanation.selected) {
        selected.push_back(
            {{"perspective", s.perspective_id}, {"interpretation", s.interpretation}});
    }
    explanation["selected"] = std::move(selected);
    json rejected = json::array();
    for (const auto& r : outcome.explanation.rejected) {
        json grounds = json::array();
        for (const auto& g : r.rejection_grounds) {
            grounds.push_back({{"attacker", g.attacker}, {"justification", g.justification}});
        }
        rejected.push_back({{"perspective", r.perspective_id},
                            {"interpretation", r.interpretation},
                            {"grounds", std::move(grounds)},
                            {"counterattacked", r.counterattacked}});
    }
    explanation["rejected"] = std::move(rejected);
    out["explanation"] = std::move(explanation);

    out["warnings"] = outcome.warnings;
    out["invocations"] = {{"propose_calls", outcome.invocations.propose_calls},
                          {"critique_calls", outcome.invocations.critique_calls},
                          {"assemblies", outcome.invocations.assemblies}};
    return out;
}

std::string render_selectivity_table(const Scenario& scenario, const EncodingReport& report) {
    std::size_t label_width = std::string("observation").size();
    std::vector<std::pair<std::string, std::string>> rows;  // (id, label)
    for (const auto& obs_id : report.observation_order) {
        const std::string label = scenario.observation_label(obs_id);
        rows.emplace_back(obs_id, label);
        label_width = std::max(label_width, label.size());
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(label_width + 2)) << "observation";
    for (const auto& pid : report.perspective_order) {
        out << std::setw(6) << pid;
    }
    out << "\n";
    for (const auto& [obs_id, label] : rows) {
        out << std::left << std::setw(static_cast<int>(label_width + 2)) << label;
        for (const auto& pid : report.perspective_order) {
            const auto& cell = report.cell(obs_id, pid);
            const char* mark = cell.status == EncodingCell::Status::Encoded  ? "✓"
                               : cell.status == EncodingCell::Status::Failed ? "!"
                                                                             : "-";
            out << std::setw(6) << mark;
        }
        out << "\n";
    }
    out << std::left << std::setw(static_cast<int>(label_width + 2)) << "encoded/total";
    const int observation_count = static_cast<int>(report.observation_order.size());
    for (const auto& pid : report.perspective_order) {
        std::string ratio = std::to_string(report.encoded_per_perspective.at(pid)) + "/" +
                            std::to_string(observation_count);
        out << std::setw(6) << ratio;
    }
    out << "\n";
    return out.str();
}

std::string render_explanation_text(const RetrievalOutcome& outcome,
                                    const std::map<std::string, std::string>& display_names) {
    auto name_of = [&](const std::string& id) {
        auto it = display_names.find(id);
        return it == display_names.end() ? id : it->second;
    };
    std::ostringstream out;
    out << outcome.explanation.summary << "\n";
    if (!outcome.explanation.selected.empty()) {
        out << "\nselected:\n";
        for (const auto& s : outcome.explanation.selected) {
            out << "  - " << name_of(s.perspective_id) << ": " << s.interpretation << "\n";
        }
    }
    if (!outcome.explanation.rejected.empty()) {
        out << (outcome.mode && outcome.mode->mode == af::Mode::Surfacing
                    ? "\nalternatives (all contested):\n"
                    : "\nrejected:\n");
        for (const auto& r : outcome.explanation.rejected) {
            out << "  - " << name_of(r.perspective_id) << ": " << r.interpretation << "\n";
            for (const auto& g : r.rejection_grounds) {
                out << "      attacked by " << name_of(g.attacker) << ": \"" << g.justification
                    << "\"\n";
            }
            out << "      " << (r.counterattacked ? "counterattacked" : "not counterattacked")
                << "\n";
        }
    }
    return out.str();
}

void write_encode_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                            Arbiter& arbiter, const EncodingReport& report,
                            const RunnerOptions& options) {
    std::filesystem::create_directories(dir);
    for (const auto& pid : report.perspective_order) {
        write_file(dir / (pid + ".ttl"), kg::serialize_turtle(arbiter.perspective(pid).graph()));
    }
    write_file(dir / "report.json", report_to_json(scenario, report, options).dump(2) + "\n");
}

void write_query_artifacts(const std::filesystem::path& dir, const std::string& query_id,
                           const RetrievalOutcome& outcome, Arbiter& arbiter) {
    std::filesystem::create_directories(dir);
    write_file(dir / (query_id + ".outcome.json"),
               outcome_to_json(query_id, outcome).dump(2) + "\n");
    write_file(dir / (query_id + ".af"), af::serialize_af(outcome.graph));
    write_file(dir / (query_id + ".dot"),
               af::to_dot(outcome.graph, outcome.grounded, arbiter.display_names()));
    write_file(dir / (query_id + ".explanation.txt"),
               render_explanation_text(outcome, arbiter.display_names()));
}

void write_replay_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                            const ReplayResult& result, const RunnerOptions& options) {
    write_encode_artifacts(dir, scenario, *result.arbiter, result.report, options);
    for (const auto& [query_id, outcome] : result.outcomes) {
        write_query_artifacts(dir, query_id, outcome, *result.arbiter);
    }
    json checks = json::array();
    for (const auto& check : result.checks) {
        json entry = {{"name", check.name}, {"passed", check.passed}};
        if (!check.detail.empty()) {
            entry["detail"] = check.detail;
        }
        checks.push_back(std::move(entry));
    }
    json summary = {{"scenario", scenario.name},
                    {"checks", std::move(checks)},
                    {"all_passed", result.all_passed()}};
    write_file(dir / "replay_checks.json", summary.dump(2) + "\n");
}

}  // namespace agora::runner
