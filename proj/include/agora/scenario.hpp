#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "agora/arbiter.hpp"
#include "agora/perspective.hpp"

namespace agora {

/// Descriptor for the external text-generation adapter. Only read when
/// the adapter is compiled in; scenarios may always declare it.
struct ExternalEndpoint {
    std::string url;
    int timeout_ms = 30000;
};

struct PerspectiveSpec {
    PerspectiveConfig config;
    std::optional<ScriptedFixture> fixture;
    std::optional<RuleSet> rules;
    std::optional<ExternalEndpoint> endpoint;
};

struct ScenarioQuery {
    std::string id;
    QueryContext ctx;
};

struct GoldenQueryExpectation {
    std::set<std::pair<std::string, std::string>> attacks;  // (attacker, target)
    std::set<std::string> grounded;
    std::string mode;  // "selection" | "composition" | "surfacing" | "none"
    std::optional<std::string> detail;  // composition: "complementary" | "filtered"
    std::optional<std::set<std::set<std::string>>> preferred;
};

struct GoldenExpectations {
    std::map<std::string, std::map<std::string, bool>> matrix;  // obs id -> perspective id
    std::map<std::string, int> totals;
    int total = 0;
    std::map<std::string, GoldenQueryExpectation> queries;
};

/// One self-contained run: perspectives with their seed terminologies
/// and backends, the observation stream, the query list, and optional
/// golden expectations for replay verification.
struct Scenario {
    std::string name;
    std::map<std::string, std::string> prefixes;
    std::optional<Instant> buffer_ttl;
    std::vector<PerspectiveSpec> perspectives;
    std::vector<Observation> observations;
    std::vector<ScenarioQuery> queries;
    std::optional<GoldenExpectations> expected;

    const ScenarioQuery* find_query(const std::string& id) const;
    const PerspectiveSpec* find_perspective(const std::string& id) const;
    std::string observation_label(const std::string& id) const;
};

/// Throws ScenarioError with a message naming the offending field.
Scenario parse_scenario(const nlohmann::json& document);
Scenario load_scenario(const std::filesystem::path& path);

/// Shared JSON term/triple decoding, also used by the external adapter
/// to validate structured backend output.
///   IRI strings resolve prefixed names against `prefixes`; "xsd:" is
///   built in. Objects: plain string -> string literal, integer ->
///   xsd:integer, {"iri": ...} -> IRI, {"lit": ..., "lang"|"type": ...}
///   -> tagged/typed literal.
kg::Iri parse_iri(const std::string& text, const std::map<std::string, std::string>& prefixes,
                  const std::string& path);
kg::RdfTerm parse_term(const nlohmann::json& value,
                       const std::map<std::string, std::string>& prefixes,
                       const std::string& path);
kg::TBox parse_tbox(const nlohmann::json& value,
                    const std::map<std::string, std::string>& prefixes, const std::string& path);
/// Returns the triples and their task tags ("task": "A"|"B"|"C").
std::pair<std::vector<kg::Triple>, std::vector<EncodingTask>> parse_tagged_triples(
    const nlohmann::json& value, const std::map<std::string, std::string>& prefixes,
    const std::string& path);

}  // namespace agora
