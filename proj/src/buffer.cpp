#include "agora/buffer.hpp"

#include <algorithm>

namespace agora {

ObservationBuffer::ObservationBuffer(std::function<Instant()> clock, std::optional<Instant> ttl)
    : clock_(std::move(clock)), ttl_(ttl) {
    if (!clock_) {
        // Counting clock: deterministic by construction.
        clock_ = [tick = Instant{0}]() mutable { return tick++; };
    }
    if (ttl_ && *ttl_ < 0) {
        throw std::invalid_argument("TTL must be non-negative");
    }
}

bool ObservationBuffer::is_registered(const std::string& perspective_id) const {
    return std::find(perspectives_.begin(), perspectives_.end(), perspective_id) !=
           perspectives_.end();
}

void ObservationBuffer::register_perspective(const std::string& perspective_id) {
    if (perspective_id.empty()) {
        throw std::invalid_argument("perspective id must be non-empty");
    }
    if (is_registered(perspective_id)) {
        throw DuplicateError("perspective '" + perspective_id + "' already registered");
    }
    perspectives_.push_back(perspective_id);
}

void ObservationBuffer::append(const Observation& observation) {
    if (observation.id.empty()) {
        throw std::invalid_argument("observation id must be non-empty");
    }
    if (observation.content.empty()) {
        throw std::invalid_argument("observation content must be non-empty");
    }
    if (seen_ids_.count(observation.id)) {
        throw DuplicateError("observation '" + observation.id + "' appended twice");
    }
    seen_ids_.insert(observation.id);
    entries_.push_back(BufferEntry{observation, {}, clock_()});
}

std::vector<Observation> ObservationBuffer::pending_for(const std::string& perspective_id) const {
    if (!is_registered(perspective_id)) {
        throw std::invalid_argument("unknown perspective '" + perspective_id + "'");
    }
    std::vector<Observation> out;
    for (const auto& entry : entries_) {
        if (!entry.acked_by.count(perspective_id)) {
            out.push_back(entry.observation);
        }
    }
    return out;
}

void ObservationBuffer::acknowledge(const std::string& perspective_id,
                                    const std::string& observation_id) {
    if (!is_registered(perspective_id)) {
        throw std::invalid_argument("unknown perspective '" + perspective_id + "'");
    }
    if (evicted_ids_.count(observation_id)) {
        throw std::invalid_argument("observation '" + observation_id + "' was already evicted");
    }
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const BufferEntry& e) {
        return e.observation.id == observation_id;
    });
    if (it == entries_.end()) {
        throw std::invalid_argument("unknown observation '" + observation_id + "'");
    }
    it->acked_by.insert(perspective_id);
}

std::vector<std::string> ObservationBuffer::evict(Instant now) {
    std::vector<std::string> evicted;
    std::vector<BufferEntry> kept;
    for (auto& entry : entries_) {
        const bool fully_acked =
            std::all_of(perspectives_.begin(), perspectives_.end(),
                        [&](const std::string& p) { return entry.acked_by.count(p) != 0; });
        const bool expired = ttl_ && (now - entry.inserted_at > *ttl_);
        if (fully_acked || expired) {
            evicted.push_back(entry.observation.id);
            evicted_ids_.insert(entry.observation.id);
        } else {
            kept.push_back(std::move(entry));
        }
    }
    entries_ = std::move(kept);
    return evicted;
}

bool ObservationBuffer::is_live(const std::string& observation_id) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const BufferEntry& e) {
        return e.observation.id == observation_id;
    });
}

}  // namespace agora
