#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agora/arbiter.hpp"
#include "agora/scenario.hpp"

namespace agora::runner {

enum class BackendOverride { FromScenario, Scripted, Rules };

struct RunnerOptions {
    BackendOverride backend = BackendOverride::FromScenario;
    /// Replace wall-clock stamps in artifacts with nothing, making two
    /// runs byte-identical.
    bool logical_clock = false;
    ArbiterConfig arbiter;
};

/// Instantiates the perspective with the requested backend; throws
/// ScenarioError when the spec lacks the needed fixture/rules/endpoint
/// (or when the external adapter is not compiled in).
std::unique_ptr<Perspective> build_perspective(const PerspectiveSpec& spec,
                                               const std::map<std::string, std::string>& prefixes,
                                               BackendOverride backend);

std::unique_ptr<Arbiter> build_arbiter(const Scenario& scenario, const RunnerOptions& options);

struct ReplayCheck {
    std::string name;
    bool passed = false;
    std::string detail;  // mismatch description
};

struct ReplayResult {
    EncodingReport report;
    std::vector<std::pair<std::string, RetrievalOutcome>> outcomes;  // (query id, outcome)
    std::vector<ReplayCheck> checks;
    /// The arbiter that ran the replay; artifact writers read its graphs.
    std::unique_ptr<Arbiter> arbiter;

    bool all_passed() const;
};

std::vector<ReplayCheck> diff_encoding(const Scenario& scenario, const EncodingReport& report);
std::vector<ReplayCheck> diff_query(const Scenario& scenario, const std::string& query_id,
                                    const RetrievalOutcome& outcome);

/// Full pipeline against the goldens: encoding cycle, every query in
/// declared order, structural diff of matrix, attack edge sets,
/// grounded extensions and modes. Throws ScenarioError when the
/// scenario has no `expected` section.
ReplayResult run_replay(const Scenario& scenario, const RunnerOptions& options);

nlohmann::json report_to_json(const Scenario& scenario, const EncodingReport& report,
                              const RunnerOptions& options);
nlohmann::json outcome_to_json(const std::string& query_id, const RetrievalOutcome& outcome);
std::string render_selectivity_table(const Scenario& scenario, const EncodingReport& report);
std::string render_explanation_text(const RetrievalOutcome& outcome,
                                    const std::map<std::string, std::string>& display_names);

void write_encode_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                            Arbiter& arbiter, const EncodingReport& report,
                            const RunnerOptions& options);
void write_query_artifacts(const std::filesystem::path& dir, const std::string& query_id,
                           const RetrievalOutcome& outcome, Arbiter& arbiter);
void write_replay_artifacts(const std::filesystem::path& dir, const Scenario& scenario,
                            const ReplayResult& result, const RunnerOptions& options);

}  // namespace agora::runner
