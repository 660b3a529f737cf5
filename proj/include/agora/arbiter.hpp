#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agora/argumentation.hpp"
#include "agora/buffer.hpp"
#include "agora/perspective.hpp"

namespace agora {

struct ArbiterConfig {
    /// Weight added to each encoding cited by a surviving proposal.
    double retrieval_bump = 1.0;
    /// Multiplier applied to every weight on each curation pass.
    double decay_factor = 0.95;
    /// Run decay after every k-th query round; 0 disables decay.
    unsigned decay_cadence = 1;
    /// Fan proposal/critique phases out across threads. Results are
    /// slot-ordered, so outcomes are identical either way.
    bool parallel_phases = true;
    /// Attacks with shorter justifications are dropped as inauditable.
    std::size_t min_justification_length = 20;
};

struct QueryInvocations {
    int propose_calls = 0;
    int critique_calls = 0;
    int assemblies = 0;

    int total() const { return propose_calls + critique_calls + assemblies; }

    bool operator==(const QueryInvocations&) const = default;
};

struct InvocationStats {
    int relevance_checks = 0;
    int encode_calls = 0;
    std::vector<QueryInvocations> per_query;
};

struct EncodingCell {
    enum class Status { Encoded, Skipped, Failed };
    Status status = Status::Skipped;
    std::string encoding_id;  // Encoded
    std::string rationale;    // Skipped
    std::string error;        // Failed
};

/// Selectivity matrix for one encoding cycle plus totals.
struct EncodingReport {
    std::vector<std::string> observation_order;
    std::vector<std::string> perspective_order;
    std::map<std::string, std::map<std::string, EncodingCell>> cells;  // obs id -> perspective id
    std::map<std::string, int> encoded_per_perspective;
    int encoded_total = 0;
    int relevance_checks = 0;
    int encode_calls = 0;
    std::vector<std::string> evicted;

    bool any_failures() const;
    const EncodingCell& cell(const std::string& observation_id,
                             const std::string& perspective_id) const;
};

struct SelectedEntry {
    std::string perspective_id;
    std::string interpretation;
};

struct RejectedEntry {
    std::string perspective_id;
    std::string interpretation;
    std::vector<Attack> rejection_grounds;  // every incoming accepted attack
    bool counterattacked = false;
};

/// Contrastive account of one retrieval round: what was selected, what
/// was set aside and on exactly which grounds. In surfacing mode
/// `selected` is empty and every proposal appears as an alternative
/// with its incoming attacks.
struct Explanation {
    std::string summary;
    std::vector<SelectedEntry> selected;
    std::vector<RejectedEntry> rejected;
    af::AttackGraph graph;
};

struct ResponseSection {
    std::string perspective_id;
    std::string heading;  // display name
    std::string interpretation;
};

/// Structured response, shaped by mode: selection has a single primary
/// interpretation, composition one labeled section per surviving
/// perspective (registration order, no merging), surfacing one section
/// per proposal plus an explicit conflict statement.
struct ComposedResponse {
    std::string kind;  // "selection" | "composition" | "surfacing" | "none"
    std::optional<ResponseSection> primary;
    std::vector<ResponseSection> sections;
    std::string conflict_statement;
};

struct RetrievalOutcome {
    QueryContext ctx;
    std::vector<Proposal> proposals;  // registration order of proposers
    std::vector<Attack> attacks;      // accepted attacks
    af::AttackGraph graph;
    af::Extension grounded;
    /// Populated exactly when the round surfaces conflict.
    std::optional<std::vector<af::Extension>> preferred;
    /// Absent when no perspective proposed (distinct from surfacing).
    std::optional<af::RetrievalMode> mode;
    ComposedResponse response;
    Explanation explanation;
    std::vector<std::string> warnings;
    QueryInvocations invocations;

    bool no_participants() const { return proposals.empty(); }
};

ComposedResponse compose_response(const std::optional<af::RetrievalMode>& mode,
                                  const std::vector<Proposal>& surviving,
                                  const std::vector<Proposal>& all,
                                  const std::optional<std::vector<af::Extension>>& preferred,
                                  const std::map<std::string, std::string>& display_names);

struct ExplanationInputs {
    std::vector<Proposal> proposals;
    std::vector<Attack> accepted_attacks;
    af::AttackGraph graph;
    af::Extension grounded;
    std::optional<af::RetrievalMode> mode;
    std::map<std::string, std::string> display_names;
};

Explanation assemble_explanation(const ExplanationInputs& inputs);

/// Orchestrates the retrieval protocol: broadcast the query, gather
/// proposals, run one batched critique round, then resolve the attack
/// graph with grounded semantics and assemble response + explanation.
/// Proposal and critique phases fan out to all perspectives and join at
/// a barrier; cross-agent data only flows through immutable phase
/// messages; resolution and assembly are sequential.
class Arbiter {
public:
    explicit Arbiter(ArbiterConfig config = {}, std::optional<Instant> buffer_ttl = std::nullopt);

    void register_perspective(std::unique_ptr<Perspective> perspective);

    std::size_t perspective_count() const { return perspectives_.size(); }
    Perspective& perspective(const std::string& id);
    const Perspective& perspective(const std::string& id) const;
    std::vector<std::string> perspective_ids() const;
    std::map<std::string, std::string> display_names() const;

    ObservationBuffer& buffer() { return buffer_; }
    const InvocationStats& stats() const { return stats_; }

    /// Appends the observations, gives every perspective exactly one
    /// relevance check per pending observation and exactly one encode
    /// call per relevant one, acknowledges everything processed, then
    /// evicts. Failures abort their pair and are recorded; the cycle
    /// continues.
    EncodingReport run_encoding_cycle(const std::vector<Observation>& observations);

    /// Runs the four-phase protocol for one query. Invalid attacks
    /// (self-attack, non-proposing target, too-short justification) are
    /// dropped with warnings. Zero proposals yield the distinct
    /// empty-outcome variant, not surfacing.
    RetrievalOutcome run_query(const QueryContext& ctx);

private:
    void run_decay_if_due();

    ArbiterConfig config_;
    std::function<Instant()> clock_;
    ObservationBuffer buffer_;
    std::vector<std::unique_ptr<Perspective>> perspectives_;  // registration order
    InvocationStats stats_;
    unsigned query_rounds_ = 0;
};

}  // namespace agora
