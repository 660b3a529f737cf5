#include "agora/external_backend.hpp"

#include <httplib.h>

namespace agora {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw BackendError("endpoint url '" + url + "' has no scheme");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

json context_json(const QueryContext& ctx) {
    return {{"query", ctx.query},
            {"querier", ctx.querier},
            {"decision_type", ctx.decision_type},
            {"priorities", ctx.priorities}};
}

json proposal_json(const Proposal& p) {
    return {{"perspective", p.perspective_id},
            {"interpretation", p.interpretation},
            {"claim", p.relevance_claim},
            {"cites", p.supporting_encodings}};
}

const json& require(const json& j, const std::string& key, const std::string& schema) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw BackendError("response does not match schema '" + schema + "': missing '" + key +
                           "'");
    }
    return *it;
}

}  // namespace

ExternalBackend::ExternalBackend(ExternalEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

json ExternalBackend::invoke(const PerspectiveConfig& config, const std::string& task,
                             json payload, const std::string& schema) {
    const SplitUrl url = split_url(endpoint_.url);
    if (url.base.rfind("http://", 0) != 0) {
        throw BackendError("external backend supports plain http endpoints only, got '" +
                           endpoint_.url + "'");
    }

    const json request = {
        {"role", "You are the " + config.display_name +
                     " perspective of a multi-perspective memory. Goal: " +
                     config.goal_statement + " Respond with a single JSON object matching the '" +
                     schema + "' schema; no prose."},
        {"task", task},
        {"payload", std::move(payload)},
        {"schema", schema},
        {"temperature", 0},
    };
    const std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt < 2; ++attempt) {  // one retry on transport failure
        httplib::Client client(url.base);
        client.set_connection_timeout(0, endpoint_.timeout_ms * 1000);
        client.set_read_timeout(endpoint_.timeout_ms / 1000, (endpoint_.timeout_ms % 1000) * 1000);
        auto result = client.Post(url.path, body, "application/json");
        if (!result) {
            last_error = "transport error (" + httplib::to_string(result.error()) + ")";
            continue;
        }
        if (result->status != 200) {
            throw BackendError("endpoint returned status " + std::to_string(result->status) +
                               " for task '" + task + "'");
        }
        try {
            return json::parse(result->body);
        } catch (const json::parse_error& e) {
            throw BackendError("endpoint returned unparseable JSON for task '" + task +
                               "': " + e.what());
        }
    }
    throw BackendError("endpoint unreachable for task '" + task + "': " + last_error);
}

RelevanceDecision ExternalBackend::assess_relevance(const PerspectiveConfig& config,
                                                    const Observation& observation) {
    const json response =
        invoke(config, "assess_relevance",
               {{"observation",
                 {{"id", observation.id}, {"content", observation.content},
                  {"source", observation.source}}}},
               "relevance_decision");
    RelevanceDecision decision;
    decision.relevant = require(response, "relevant", "relevance_decision").get<bool>();
    decision.rationale = require(response, "rationale", "relevance_decision").get<std::string>();
    if (decision.rationale.empty()) {
        throw BackendError("response does not match schema 'relevance_decision': empty rationale");
    }
    return decision;
}

EncodingResult ExternalBackend::encode(const PerspectiveConfig& config,
                                       const Observation& observation,
                                       const kg::PerspectiveGraph& graph) {
    const json response =
        invoke(config, "encode",
               {{"observation", {{"id", observation.id}, {"content", observation.content}}},
                {"known_classes", [&] {
                     json classes = json::array();
                     for (const auto& [iri, label] : graph.tbox().classes) {
                         classes.push_back(iri.value);
                     }
                     return classes;
                 }()}},
               "encoding_result");
    EncodingResult result;
    try {
        if (response.contains("tbox_delta")) {
            result.tbox_delta =
                parse_tbox(response["tbox_delta"], graph.prefixes(), "response.tbox_delta");
        }
        std::vector<EncodingTask> tags;
        std::tie(result.triples, tags) = parse_tagged_triples(
            require(response, "triples", "encoding_result"), graph.prefixes(),
            "response.triples");
        result.trace = build_task_trace(result.triples, tags, result.tbox_delta);
    } catch (const ScenarioError& e) {
        throw BackendError(std::string("response does not match schema 'encoding_result': ") +
                           e.what());
    }
    return result;
}

std::optional<Proposal> ExternalBackend::propose(const PerspectiveConfig& config,
                                                 const QueryContext& ctx,
                                                 const kg::PerspectiveGraph& graph) {
    json encodings = json::array();
    for (const auto& [id, encoding] : graph.encodings()) {
        encodings.push_back(id);
    }
    const json response = invoke(config, "propose",
                                 {{"context", context_json(ctx)}, {"encodings", encodings}},
                                 "proposal_or_abstention");
    const json& proposal = require(response, "proposal", "proposal_or_abstention");
    if (proposal.is_null()) {
        return std::nullopt;
    }
    Proposal out;
    out.perspective_id = config.id;
    out.interpretation =
        require(proposal, "interpretation", "proposal_or_abstention").get<std::string>();
    out.relevance_claim = require(proposal, "claim", "proposal_or_abstention").get<std::string>();
    for (const auto& cite : require(proposal, "cites", "proposal_or_abstention")) {
        out.supporting_encodings.push_back(cite.get<std::string>());
    }
    return out;
}

std::vector<Attack> ExternalBackend::critique(const PerspectiveConfig& config,
                                              const QueryContext& ctx,
                                              const std::optional<Proposal>& own,
                                              const std::vector<Proposal>& others,
                                              const kg::PerspectiveGraph& graph) {
    (void)graph;
    json others_json = json::array();
    for (const auto& p : others) {
        others_json.push_back(proposal_json(p));
    }
    const json response =
        invoke(config, "critique",
               {{"context", context_json(ctx)},
                {"own_proposal", own ? proposal_json(*own) : json(nullptr)},
                {"other_proposals", others_json}},
               "attack_list");
    std::vector<Attack> attacks;
    for (const auto& entry : require(response, "attacks", "attack_list")) {
        Attack attack;
        attack.attacker = config.id;
        attack.target = require(entry, "target", "attack_list").get<std::string>();
        attack.justification = require(entry, "justification", "attack_list").get<std::string>();
        attacks.push_back(std::move(attack));
    }
    return attacks;
}

}  // namespace agora
