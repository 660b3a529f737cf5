#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agora/errors.hpp"

namespace agora {

/// Logical or wall-clock instant; tests and deterministic runs use a
/// counting clock.
using Instant = std::int64_t;

/// A raw timestamped experience awaiting interpretation.
struct Observation {
    std::string id;
    Instant timestamp = 0;
    std::string content;
    std::map<std::string, std::string> source;

    bool operator==(const Observation&) const = default;
};

struct BufferEntry {
    Observation observation;
    std::set<std::string> acked_by;
    Instant inserted_at = 0;
};

/// Time-bounded staging log shared by all perspectives. Entries live
/// until every registered perspective has acknowledged them or the TTL
/// expires, whichever comes first; eviction is permanent. Single
/// writer; snapshot reads (pending_for, entries) are safe concurrently
/// as long as the caller serializes them against mutations.
class ObservationBuffer {
public:
    explicit ObservationBuffer(std::function<Instant()> clock = {},
                               std::optional<Instant> ttl = std::nullopt);

    void register_perspective(const std::string& perspective_id);
    const std::vector<std::string>& registered() const { return perspectives_; }

    /// Throws DuplicateError if the id was ever appended before.
    void append(const Observation& observation);

    /// Non-evicted observations not yet acknowledged by this
    /// perspective, in insertion order.
    std::vector<Observation> pending_for(const std::string& perspective_id) const;

    /// Acknowledgement is final; re-acknowledging is a no-op. Throws
    /// std::invalid_argument for unknown perspectives and for unknown
    /// or already-evicted observations.
    void acknowledge(const std::string& perspective_id, const std::string& observation_id);

    /// Removes entries acknowledged by all registered perspectives and,
    /// when a TTL is configured, entries older than it. Returns the
    /// evicted ids in insertion order.
    std::vector<std::string> evict(Instant now);

    bool is_live(const std::string& observation_id) const;
    std::size_t live_count() const { return entries_.size(); }
    const std::vector<BufferEntry>& entries() const { return entries_; }

private:
    bool is_registered(const std::string& perspective_id) const;

    std::vector<std::string> perspectives_;
    std::vector<BufferEntry> entries_;  // live, insertion order
    std::set<std::string> seen_ids_;
    std::set<std::string> evicted_ids_;
    std::function<Instant()> clock_;
    std::optional<Instant> ttl_;
};

}  // namespace agora
