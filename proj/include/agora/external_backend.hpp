#pragma once

// HTTP adapter for an external text-generation service. Off the default
// build path: compiled only when AGORA_EXTERNAL_BACKEND is enabled, and
// no test depends on a live service. Scripted and rule backends
// reproduce its recorded behavior offline.

#include "agora/perspective.hpp"
#include "agora/scenario.hpp"

namespace agora {

/// Proxies the four backend calls to `endpoint.url` as JSON POSTs.
/// Every request carries a role prompt derived from the goal statement,
/// a task payload, the name of the expected response schema, and
/// temperature pinned to 0. Responses must validate against the schema
/// or the call fails (BackendError); transport failures are retried
/// once within the per-call timeout.
class ExternalBackend : public PerspectiveBackend {
public:
    explicit ExternalBackend(ExternalEndpoint endpoint);

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
    nlohmann::json invoke(const PerspectiveConfig& config, const std::string& task,
                          nlohmann::json payload, const std::string& schema);

    ExternalEndpoint endpoint_;
};

}  // namespace agora
