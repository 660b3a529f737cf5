#include "agora/perspective.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace agora {

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Scripted: return "scripted";
        case BackendKind::RuleBased: return "rules";
        case BackendKind::External: return "external";
    }
    return "?";
}

char task_code(EncodingTask task) {
    switch (task) {
        case EncodingTask::TermTyping: return 'A';
        case EncodingTask::TaxonomyDiscovery: return 'B';
        case EncodingTask::RelationExtraction: return 'C';
    }
    return '?';
}

EncodingTask task_from_code(char code) {
    switch (code) {
        case 'A': return EncodingTask::TermTyping;
        case 'B': return EncodingTask::TaxonomyDiscovery;
        case 'C': return EncodingTask::RelationExtraction;
        default:
            throw std::invalid_argument(std::string("unknown encoding task code '") + code + "'");
    }
}

namespace {

std::string render_triple(const kg::Triple& triple) {
    std::string object;
    if (const auto* iri = std::get_if<kg::Iri>(&triple.object)) {
        object = kg::local_name(*iri);
    } else {
        object = kg::term_to_string(triple.object);
    }
    return kg::local_name(triple.subject) + " " +
           (triple.predicate == kg::rdf_type() ? "a" : kg::local_name(triple.predicate)) + " " +
           object;
}

}  // namespace

TaskTrace build_task_trace(const std::vector<kg::Triple>& triples,
                           const std::vector<EncodingTask>& tags, const kg::TBox& tbox_delta) {
    if (triples.size() != tags.size()) {
        throw std::invalid_argument("every encoded triple needs exactly one task tag");
    }
    TaskTrace trace;
    trace.triple_tasks = tags;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        switch (tags[i]) {
            case EncodingTask::TermTyping:
                trace.typings.push_back(render_triple(triples[i]));
                break;
            case EncodingTask::TaxonomyDiscovery:
                trace.placements.push_back(render_triple(triples[i]));
                break;
            case EncodingTask::RelationExtraction:
                trace.relations.push_back(render_triple(triples[i]));
                break;
        }
    }
    for (const auto& [child, parent] : tbox_delta.subclass_edges) {
        trace.placements.push_back(kg::local_name(child) + " subClassOf " +
                                   kg::local_name(parent));
    }
    return trace;
}

// --- scripted backend ------------------------------------------------------

ScriptedBackend::ScriptedBackend(ScriptedFixture fixture) : fixture_(std::move(fixture)) {}

const ScriptedObservationRecord& ScriptedBackend::observation_record(
    const PerspectiveConfig& config, const Observation& observation) const {
    auto it = fixture_.observations.find(observation.id);
    if (it == fixture_.observations.end()) {
        throw FixtureGapError("perspective '" + config.id +
                              "' has no fixture entry for observation '" + observation.id + "'");
    }
    return it->second;
}

const ScriptedQueryRecord& ScriptedBackend::query_record(const PerspectiveConfig& config,
                                                         const QueryContext& ctx) const {
    auto id = fixture_.query_id_by_text.find(ctx.query);
    if (id == fixture_.query_id_by_text.end()) {
        throw FixtureGapError("perspective '" + config.id +
                              "' has no fixture entry for query \"" + ctx.query + "\"");
    }
    return fixture_.queries.at(id->second);
}

RelevanceDecision ScriptedBackend::assess_relevance(const PerspectiveConfig& config,
                                                    const Observation& observation) {
    const auto& record = observation_record(config, observation);
    return RelevanceDecision{record.relevant, record.rationale};
}

EncodingResult ScriptedBackend::encode(const PerspectiveConfig& config,
                                       const Observation& observation,
                                       const kg::PerspectiveGraph& graph) {
    (void)graph;
    const auto& record = observation_record(config, observation);
    EncodingResult result;
    result.tbox_delta = record.tbox_delta;
    result.triples = record.triples;
    result.trace = build_task_trace(record.triples, record.tasks, record.tbox_delta);
    return result;
}

std::optional<Proposal> ScriptedBackend::propose(const PerspectiveConfig& config,
                                                 const QueryContext& ctx,
                                                 const kg::PerspectiveGraph& graph) {
    (void)graph;
    return query_record(config, ctx).proposal;
}

std::vector<Attack> ScriptedBackend::critique(const PerspectiveConfig& config,
                                              const QueryContext& ctx,
                                              const std::optional<Proposal>& own,
                                              const std::vector<Proposal>& others,
                                              const kg::PerspectiveGraph& graph) {
    (void)own;
    (void)others;
    (void)graph;
    return query_record(config, ctx).attacks;
}

// --- rule-based backend ----------------------------------------------------

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(current);
    }
    return tokens;
}

RuleBasedBackend::RuleBasedBackend(RuleSet rules) : rules_(std::move(rules)) {}

std::vector<std::string> RuleBasedBackend::matched_keywords(
    const Observation& observation) const {
    const auto tokens = tokenize(observation.content);
    const std::set<std::string> token_set(tokens.begin(), tokens.end());
    std::vector<std::string> matched;
    for (const auto& keyword : rules_.relevance_keywords) {
        if (token_set.count(keyword)) {
            matched.push_back(keyword);
        }
    }
    std::sort(matched.begin(), matched.end());
    return matched;
}

RelevanceDecision RuleBasedBackend::assess_relevance(const PerspectiveConfig& config,
                                                     const Observation& observation) {
    (void)config;
    const auto matched = matched_keywords(observation);
    if (matched.empty()) {
        return RelevanceDecision{false, "no goal keywords matched the observation"};
    }
    std::string rationale = "matched goal keywords:";
    for (const auto& k : matched) {
        rationale += " " + k;
    }
    return RelevanceDecision{true, rationale};
}

namespace {

std::string substitute(std::string text, const std::string& placeholder,
                       const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
    return text;
}

kg::Iri substitute_iri(const kg::Iri& iri, const std::string& observation_id) {
    return kg::Iri{substitute(iri.value, "{obs}", observation_id)};
}

kg::Triple instantiate_template(const kg::Triple& tmpl, const std::string& observation_id) {
    kg::Triple out;
    out.subject = substitute_iri(tmpl.subject, observation_id);
    out.predicate = substitute_iri(tmpl.predicate, observation_id);
    if (const auto* iri = std::get_if<kg::Iri>(&tmpl.object)) {
        out.object = substitute_iri(*iri, observation_id);
    } else {
        auto lit = std::get<kg::Literal>(tmpl.object);
        lit.lexical = substitute(lit.lexical, "{obs}", observation_id);
        out.object = std::move(lit);
    }
    return out;
}

}  // namespace

EncodingResult RuleBasedBackend::encode(const PerspectiveConfig& config,
                                        const Observation& observation,
                                        const kg::PerspectiveGraph& graph) {
    (void)config;
    (void)graph;
    const auto tokens = tokenize(observation.content);
    const std::set<std::string> token_set(tokens.begin(), tokens.end());

    EncodingResult result;
    std::vector<EncodingTask> tags;
    for (const auto& rule : rules_.encoding_rules) {
        const bool applies =
            rule.keywords.empty() ||
            std::any_of(rule.keywords.begin(), rule.keywords.end(),
                        [&](const std::string& k) { return token_set.count(k) != 0; });
        if (!applies) {
            continue;
        }
        for (std::size_t i = 0; i < rule.triple_templates.size(); ++i) {
            result.triples.push_back(
                instantiate_template(rule.triple_templates[i], observation.id));
            tags.push_back(rule.tasks[i]);
        }
    }
    result.trace = build_task_trace(result.triples, tags, result.tbox_delta);
    return result;
}

std::optional<Proposal> RuleBasedBackend::propose(const PerspectiveConfig& config,
                                                  const QueryContext& ctx,
                                                  const kg::PerspectiveGraph& graph) {
    if (graph.encodings().empty()) {
        return std::nullopt;  // nothing relevant stored: abstain
    }
    auto it = rules_.proposals_by_decision_type.find(ctx.decision_type);
    if (it == rules_.proposals_by_decision_type.end()) {
        return std::nullopt;
    }
    Proposal proposal;
    proposal.perspective_id = config.id;
    proposal.interpretation = it->second.interpretation;
    proposal.relevance_claim = it->second.relevance_claim;
    for (const auto& [id, encoding] : graph.encodings()) {
        proposal.supporting_encodings.push_back(id);
    }
    return proposal;
}

std::vector<Attack> RuleBasedBackend::critique(const PerspectiveConfig& config,
                                               const QueryContext& ctx,
                                               const std::optional<Proposal>& own,
                                               const std::vector<Proposal>& others,
                                               const kg::PerspectiveGraph& graph) {
    (void)own;
    (void)graph;
    auto it = rules_.critiques_by_decision_type.find(ctx.decision_type);
    if (it == rules_.critiques_by_decision_type.end()) {
        return {};
    }
    std::set<std::string> live_targets;
    for (const auto& p : others) {
        live_targets.insert(p.perspective_id);
    }
    std::vector<Attack> out;
    for (Attack attack : it->second) {
        attack.attacker = config.id;
        if (live_targets.count(attack.target)) {
            out.push_back(std::move(attack));
        }
    }
    return out;
}

// --- perspective agent -----------------------------------------------------

Perspective::Perspective(PerspectiveConfig config, std::shared_ptr<PerspectiveBackend> backend,
                         std::map<std::string, std::string> prefixes)
    : config_(std::move(config)),
      backend_(std::move(backend)),
      graph_(config_.id, std::move(prefixes), config_.seed_tbox) {
    if (!backend_) {
        throw std::invalid_argument("perspective '" + config_.id + "' has no backend");
    }
    if (config_.display_name.empty()) {
        config_.display_name = config_.id;
    }
}

RelevanceDecision Perspective::assess_relevance(const Observation& observation) {
    RelevanceDecision decision = backend_->assess_relevance(config_, observation);
    if (decision.rationale.empty()) {
        throw BackendError("perspective '" + config_.id +
                           "' returned a relevance decision without a rationale");
    }
    return decision;
}

EncodingResult Perspective::encode(const Observation& observation) {
    EncodingResult result = backend_->encode(config_, observation, graph_);
    if (result.triples.empty()) {
        throw BackendError("perspective '" + config_.id +
                           "' produced an empty encoding for observation '" + observation.id +
                           "'");
    }
    return result;
}

std::string Perspective::ingest(const std::string& observation_id, const EncodingResult& result) {
    return graph_.insert_encoding(observation_id, result.triples, result.tbox_delta);
}

std::optional<Proposal> Perspective::propose(const QueryContext& ctx) {
    auto proposal = backend_->propose(config_, ctx, graph_);
    if (!proposal) {
        return std::nullopt;
    }
    if (proposal->perspective_id.empty()) {
        proposal->perspective_id = config_.id;
    }
    if (proposal->perspective_id != config_.id) {
        throw BackendError("perspective '" + config_.id + "' proposed under the wrong id '" +
                           proposal->perspective_id + "'");
    }
    if (proposal->supporting_encodings.empty()) {
        throw BackendError("perspective '" + config_.id +
                           "' submitted a proposal without supporting encodings");
    }
    for (const auto& encoding_id : proposal->supporting_encodings) {
        if (!graph_.has_encoding(encoding_id)) {
            throw BackendError("perspective '" + config_.id +
                               "' cites unknown encoding '" + encoding_id + "'");
        }
    }
    return proposal;
}

std::vector<Attack> Perspective::critique(const QueryContext& ctx,
                                          const std::optional<Proposal>& own,
                                          const std::vector<Proposal>& others) {
    auto attacks = backend_->critique(config_, ctx, own, others, graph_);
    for (auto& attack : attacks) {
        attack.attacker = config_.id;
    }
    return attacks;
}

}  // namespace agora
