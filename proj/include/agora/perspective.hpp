#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agora/buffer.hpp"
#include "agora/errors.hpp"
#include "agora/kgstore.hpp"

namespace agora {

enum class BackendKind { Scripted, RuleBased, External };

std::string to_string(BackendKind kind);

/// Static identity of a goal-perspective: what it optimizes for and the
/// vocabulary it starts from.
struct PerspectiveConfig {
    std::string id;
    std::string display_name;  // presentation name; defaults to id
    std::string goal_statement;
    kg::TBox seed_tbox;
    BackendKind backend = BackendKind::Scripted;
};

/// Outcome of the relevance filter. The rationale is mandatory in both
/// directions so filtering stays auditable.
struct RelevanceDecision {
    bool relevant = false;
    std::string rationale;
};

/// Which encoding-pipeline stage produced a triple's vocabulary:
/// term typing, taxonomy discovery, or relation extraction.
enum class EncodingTask { TermTyping, TaxonomyDiscovery, RelationExtraction };

char task_code(EncodingTask task);           // 'A' | 'B' | 'C'
EncodingTask task_from_code(char code);

/// Per-stage record of what an encoding did.
struct TaskTrace {
    std::vector<std::string> typings;     // entities classified against the TBox
    std::vector<std::string> placements;  // new classes placed in the hierarchy
    std::vector<std::string> relations;   // properties extracted between entities
    std::vector<EncodingTask> triple_tasks;  // parallel to EncodingResult::triples
};

struct EncodingResult {
    kg::TBox tbox_delta;
    std::vector<kg::Triple> triples;
    TaskTrace trace;
};

/// Builds the human-readable stage lists from tagged triples and the
/// hierarchy delta; validates that tags and triples line up.
TaskTrace build_task_trace(const std::vector<kg::Triple>& triples,
                           const std::vector<EncodingTask>& tags,
                           const kg::TBox& tbox_delta);

/// A perspective's candidate interpretation for one query.
struct Proposal {
    std::string perspective_id;
    std::string interpretation;
    std::string relevance_claim;
    std::vector<std::string> supporting_encodings;

    bool operator==(const Proposal&) const = default;
};

/// A directed, justified claim that the attacker's framing should
/// dominate the target's for the current query.
struct Attack {
    std::string attacker;
    std::string target;
    std::string justification;

    bool operator==(const Attack&) const = default;
};

struct QueryContext {
    std::string query;
    std::string querier;
    std::string decision_type;
    std::vector<std::string> priorities;
};

/// Behavior contract each backend implements. Scripted and rule-based
/// backends are pure functions of (config, inputs); the external
/// adapter proxies a text-generation service.
class PerspectiveBackend {
public:
    virtual ~PerspectiveBackend() = default;

    virtual RelevanceDecision assess_relevance(const PerspectiveConfig& config,
                                               const Observation& observation) = 0;
    virtual EncodingResult encode(const PerspectiveConfig& config, const Observation& observation,
                                  const kg::PerspectiveGraph& graph) = 0;
    virtual std::optional<Proposal> propose(const PerspectiveConfig& config,
                                            const QueryContext& ctx,
                                            const kg::PerspectiveGraph& graph) = 0;
    /// Batched critique: one call covering all other proposals.
    /// `others` never contains this perspective's own proposal.
    virtual std::vector<Attack> critique(const PerspectiveConfig& config, const QueryContext& ctx,
                                         const std::optional<Proposal>& own,
                                         const std::vector<Proposal>& others,
                                         const kg::PerspectiveGraph& graph) = 0;
};

// ---------------------------------------------------------------------------
// Scripted backend: replays recorded behavior from a fixture. Missing
// entries fail loudly instead of defaulting to "irrelevant".

struct ScriptedObservationRecord {
    bool relevant = false;
    std::string rationale;
    kg::TBox tbox_delta;
    std::vector<kg::Triple> triples;
    std::vector<EncodingTask> tasks;  // parallel to triples
};

struct ScriptedQueryRecord {
    std::optional<Proposal> proposal;  // nullopt = abstention
    std::vector<Attack> attacks;
};

struct ScriptedFixture {
    std::map<std::string, ScriptedObservationRecord> observations;  // by observation id
    std::map<std::string, ScriptedQueryRecord> queries;             // by query id
    std::map<std::string, std::string> query_id_by_text;            // ctx.query -> query id
};

class ScriptedBackend : public PerspectiveBackend {
public:
    explicit ScriptedBackend(ScriptedFixture fixture);

    RelevanceDecision assess_relevance(const PerspectiveConfig& config,
                                       const Observation& observation) override;
    EncodingResult encode(const PerspectiveConfig& config, const Observation& observation,
                          const kg::PerspectiveGraph& graph) override;
    std::optional<Proposal> propose(const PerspectiveConfig& config, const QueryContext& ctx,
                                    const kg::PerspectiveGraph& graph) override;
    std::vector<Attack> critique(const PerspectiveConfig& config, const QueryContext& ctx,
                                 const std::optional<Proposal>& own,
                                 const std::vector<Proposal>& others,
                                 const kg::PerspectiveGraph& graph) override;

private:
    const ScriptedObservationRecord& observation_record(const PerspectiveConfig& config,
                                                        const Observation& observation) const;
    const ScriptedQueryRecord& query_record(const PerspectiveConfig& config,
                                            const QueryContext& ctx) const;

    ScriptedFixture fixture_;
};

// ---------------------------------------------------------------------------
// Rule-based backend: deterministic keyword heuristics standing in for
// model judgment. Relevance fires when any goal keyword occurs in the
// observation; encoding emits template triples; proposals and critiques
// come from tables keyed on the query's decision type.

struct EncodingRule {
    /// Keywords gating this rule; an empty list matches every relevant
    /// observation.
    std::vector<std::string> keywords;
    std::vector<kg::Triple> triple_templates;  // "{obs}" expands to the observation id
    std::vector<EncodingTask> tasks;
};

struct RuleProposalTemplate {
    std::string interpretation;
    std::string relevance_claim;
};

struct RuleSet {
    std::vector<std::string> relevance_keywords;
    std::vector<EncodingRule> encoding_rules;
    std::map<std::string, RuleProposalTemplate> proposals_by_decision_type;
    std::map<std::string, std::vector<Attack>> critiques_by_decision_type;
};

/// Lowercased alphanumeric tokens of the text.
std::vector<std::string> tokenize(const std::string& text);

class RuleBasedBackend : public PerspectiveBackend {
public:
    explicit RuleBasedBackend(RuleSet rules);

    RelevanceDecision assess_relevance(const PerspectiveConfig& config,
                                       const Observation& observation) override;
    EncodingResult encode(const PerspectiveConfig& config, const Observation& observation,
                          const kg::PerspectiveGraph& graph) override;
    std::optional<Proposal> propose(const PerspectiveConfig& config, const QueryContext& ctx,
                                    const kg::PerspectiveGraph& graph) override;
    std::vector<Attack> critique(const PerspectiveConfig& config, const QueryContext& ctx,
                                 const std::optional<Proposal>& own,
                                 const std::vector<Proposal>& others,
                                 const kg::PerspectiveGraph& graph) override;

private:
    std::vector<std::string> matched_keywords(const Observation& observation) const;

    RuleSet rules_;
};

// ---------------------------------------------------------------------------

/// A goal-perspective agent: config + backend + its own knowledge
/// graph. Encoding mutates only this agent's graph; query-time calls
/// read it. Different agents may run concurrently, calls on one agent
/// are serialized by the arbiter.
class Perspective {
public:
    Perspective(PerspectiveConfig config, std::shared_ptr<PerspectiveBackend> backend,
                std::map<std::string, std::string> prefixes);

    const PerspectiveConfig& config() const { return config_; }
    const std::string& id() const { return config_.id; }
    const kg::PerspectiveGraph& graph() const { return graph_; }
    kg::PerspectiveGraph& graph() { return graph_; }

    RelevanceDecision assess_relevance(const Observation& observation);

    /// Precondition: the relevance filter accepted this observation.
    EncodingResult encode(const Observation& observation);

    /// Applies an encoding result to this perspective's graph; returns
    /// the new encoding id.
    std::string ingest(const std::string& observation_id, const EncodingResult& result);

    /// Validates the backend's proposal: correct perspective id,
    /// non-empty supporting encodings, all resolvable in this graph.
    /// Throws BackendError on contract breaches.
    std::optional<Proposal> propose(const QueryContext& ctx);

    /// Stamps this perspective as attacker on every returned attack.
    std::vector<Attack> critique(const QueryContext& ctx, const std::optional<Proposal>& own,
                                 const std::vector<Proposal>& others);

private:
    PerspectiveConfig config_;
    std::shared_ptr<PerspectiveBackend> backend_;
    kg::PerspectiveGraph graph_;
};

}  // namespace agora
