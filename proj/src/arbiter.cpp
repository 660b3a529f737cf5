#include "agora/arbiter.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <memory>
#include <sstream>

namespace agora {

bool EncodingReport::any_failures() const {
    for (const auto& [obs, row] : cells) {
        for (const auto& [pid, cell] : row) {
            if (cell.status == EncodingCell::Status::Failed) {
                return true;
            }
        }
    }
    return false;
}

const EncodingCell& EncodingReport::cell(const std::string& observation_id,
                                         const std::string& perspective_id) const {
    return cells.at(observation_id).at(perspective_id);
}

namespace {

std::string count_word(std::size_t n) {
    static const char* words[] = {"zero", "one", "two",   "three", "four", "five",
                                  "six",  "seven", "eight", "nine",  "ten"};
    if (n < sizeof(words) / sizeof(words[0])) {
        return words[n];
    }
    return std::to_string(n);
}

std::string capitalized(std::string word) {
    if (!word.empty()) {
        word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    }
    return word;
}

std::string display_name_of(const std::map<std::string, std::string>& names,
                            const std::string& id) {
    auto it = names.find(id);
    return it == names.end() ? id : it->second;
}

// "A", "A and B", "A, B and C"
std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) {
            out += (i + 1 == names.size()) ? " and " : ", ";
        }
        out += names[i];
    }
    return out;
}

// Fan `fn(0..n-1)` out across threads and join. `fn` must not throw.
template <typename Fn>
void fan_out(std::size_t n, bool parallel, Fn&& fn) {
    if (!parallel || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::future<void>> joins;
    joins.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        joins.push_back(std::async(std::launch::async, [i, &fn] { fn(i); }));
    }
    for (auto& j : joins) {
        j.get();
    }
}

}  // namespace

ComposedResponse compose_response(const std::optional<af::RetrievalMode>& mode,
                                  const std::vector<Proposal>& surviving,
                                  const std::vector<Proposal>& all,
                                  const std::optional<std::vector<af::Extension>>& preferred,
                                  const std::map<std::string, std::string>& display_names) {
    (void)preferred;
    auto section = [&](const Proposal& p) {
        return ResponseSection{p.perspective_id, display_name_of(display_names, p.perspective_id),
                               p.interpretation};
    };

    ComposedResponse response;
    if (!mode) {
        if (!surviving.empty() || !all.empty()) {
            throw std::invalid_argument("empty outcome cannot carry proposals");
        }
        response.kind = "none";
        return response;
    }
    switch (mode->mode) {
        case af::Mode::Selection:
            if (surviving.size() != 1) {
                throw std::invalid_argument("selection requires exactly one survivor");
            }
            response.kind = "selection";
            response.primary = section(surviving.front());
            break;
        case af::Mode::Composition:
            if (surviving.empty()) {
                throw std::invalid_argument("composition requires survivors");
            }
            response.kind = "composition";
            for (const auto& p : surviving) {
                response.sections.push_back(section(p));
            }
            break;
        case af::Mode::Surfacing:
            if (!surviving.empty()) {
                throw std::invalid_argument("surfacing admits no survivors");
            }
            response.kind = "surfacing";
            for (const auto& p : all) {
                response.sections.push_back(section(p));
            }
            response.conflict_statement = capitalized(count_word(all.size())) +
                                          " strategic perspectives apply and they conflict.";
            break;
    }
    return response;
}

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string argued_sentences(const std::vector<RejectedEntry>& rejected,
                             const std::map<std::string, std::string>& names) {
    std::string out;
    for (const auto& entry : rejected) {
        for (const auto& ground : entry.rejection_grounds) {
            out += " " + display_name_of(names, ground.attacker) + " argued: " +
                   quote(ground.justification);
        }
    }
    return out;
}

std::string counterattack_sentence(const std::vector<RejectedEntry>& rejected,
                                   const std::map<std::string, std::string>& names) {
    const bool none_counterattacked =
        std::none_of(rejected.begin(), rejected.end(),
                     [](const RejectedEntry& e) { return e.counterattacked; });
    if (none_counterattacked) {
        if (rejected.size() == 1) {
            return " " + display_name_of(names, rejected.front().perspective_id) +
                   " did not counterattack.";
        }
        if (rejected.size() == 2) {
            return " Neither perspective counterattacked.";
        }
        return " None of the defeated perspectives counterattacked.";
    }
    std::string out;
    for (const auto& entry : rejected) {
        out += " " + display_name_of(names, entry.perspective_id) +
               (entry.counterattacked ? " counterattacked." : " did not counterattack.");
    }
    return out;
}

}  // namespace

Explanation assemble_explanation(const ExplanationInputs& inputs) {
    const auto& names = inputs.display_names;
    Explanation explanation;
    explanation.graph = inputs.graph;

    if (inputs.proposals.empty()) {
        explanation.summary = "No perspective found the query relevant.";
        return explanation;
    }
    if (!inputs.mode) {
        throw std::logic_error("explanation with proposals requires a mode");
    }

    const bool surfacing = inputs.mode->mode == af::Mode::Surfacing;
    std::vector<std::string> selected_names;
    std::vector<std::string> rejected_names;
    for (const auto& proposal : inputs.proposals) {
        const bool survived = !surfacing && inputs.grounded.count(proposal.perspective_id) != 0;
        if (survived) {
            explanation.selected.push_back(
                SelectedEntry{proposal.perspective_id, proposal.interpretation});
            selected_names.push_back(display_name_of(names, proposal.perspective_id));
            continue;
        }
        RejectedEntry entry;
        entry.perspective_id = proposal.perspective_id;
        entry.interpretation = proposal.interpretation;
        for (const auto& attack : inputs.accepted_attacks) {
            if (attack.target == proposal.perspective_id) {
                entry.rejection_grounds.push_back(attack);
            }
        }
        entry.counterattacked = std::any_of(
            inputs.accepted_attacks.begin(), inputs.accepted_attacks.end(),
            [&](const Attack& a) {
                return a.attacker == proposal.perspective_id &&
                       inputs.graph.has_attack(a.target, proposal.perspective_id);
            });
        if (entry.rejection_grounds.empty()) {
            throw std::logic_error("defeated proposal '" + proposal.perspective_id +
                                   "' has no rejection grounds");
        }
        explanation.rejected.push_back(std::move(entry));
        rejected_names.push_back(display_name_of(names, proposal.perspective_id));
    }

    if (explanation.selected.size() + explanation.rejected.size() != inputs.proposals.size()) {
        throw std::logic_error("explanation does not partition the proposals");
    }

    std::ostringstream summary;
    switch (inputs.mode->mode) {
        case af::Mode::Selection:
            summary << "This response is based on " << selected_names.front()
                    << "'s assessment. " << join_names(rejected_names)
                    << (rejected_names.size() == 1 ? " was" : " were")
                    << " also considered but set aside.";
            summary << argued_sentences(explanation.rejected, names);
            summary << counterattack_sentence(explanation.rejected, names);
            break;
        case af::Mode::Composition:
            if (explanation.rejected.empty()) {
                if (inputs.proposals.size() == 1) {
                    summary << selected_names.front()
                            << " was the only perspective to find the query relevant; its "
                               "interpretation stands unchallenged.";
                } else {
                    summary << "All " << count_word(inputs.proposals.size())
                            << " perspectives contributed complementary interpretations; no "
                               "framing was challenged.";
                }
            } else {
                summary << "This response composes the " << join_names(selected_names)
                        << " assessments. " << join_names(rejected_names)
                        << (rejected_names.size() == 1 ? " was" : " were")
                        << " also considered but set aside.";
                summary << argued_sentences(explanation.rejected, names);
                summary << counterattack_sentence(explanation.rejected, names);
            }
            break;
        case af::Mode::Surfacing:
            summary << capitalized(count_word(inputs.proposals.size()))
                    << " strategic perspectives apply and they conflict.";
            for (const auto& proposal : inputs.proposals) {
                summary << " " << display_name_of(names, proposal.perspective_id)
                        << " recommends: " << proposal.interpretation;
            }
            summary << " Each perspective argued that the others' framing would misdirect the"
                       " decision. The system cannot recommend one framing over the others"
                       " without knowing which strategic priority the team is currently"
                       " optimizing for.";
            break;
    }
    explanation.summary = summary.str();
    return explanation;
}

Arbiter::Arbiter(ArbiterConfig config, std::optional<Instant> buffer_ttl)
    : config_(config),
      clock_([tick = std::make_shared<Instant>(0)]() { return (*tick)++; }),
      buffer_(clock_, buffer_ttl) {}

void Arbiter::register_perspective(std::unique_ptr<Perspective> perspective) {
    if (!perspective) {
        throw std::invalid_argument("perspective must not be null");
    }
    for (const auto& existing : perspectives_) {
        if (existing->id() == perspective->id()) {
            throw DuplicateError("perspective '" + perspective->id() + "' already registered");
        }
    }
    buffer_.register_perspective(perspective->id());
    perspectives_.push_back(std::move(perspective));
}

Perspective& Arbiter::perspective(const std::string& id) {
    for (auto& p : perspectives_) {
        if (p->id() == id) {
            return *p;
        }
    }
    throw std::invalid_argument("unknown perspective '" + id + "'");
}

const Perspective& Arbiter::perspective(const std::string& id) const {
    return const_cast<Arbiter*>(this)->perspective(id);
}

std::vector<std::string> Arbiter::perspective_ids() const {
    std::vector<std::string> out;
    out.reserve(perspectives_.size());
    for (const auto& p : perspectives_) {
        out.push_back(p->id());
    }
    return out;
}

std::map<std::string, std::string> Arbiter::display_names() const {
    std::map<std::string, std::string> out;
    for (const auto& p : perspectives_) {
        out.emplace(p->id(), p->config().display_name);
    }
    return out;
}

void Arbiter::run_decay_if_due() {
    ++query_rounds_;
    if (config_.decay_cadence != 0 && query_rounds_ % config_.decay_cadence == 0) {
        for (auto& p : perspectives_) {
            p->graph().decay_weights(config_.decay_factor);
        }
    }
}

EncodingReport Arbiter::run_encoding_cycle(const std::vector<Observation>& observations) {
    for (const auto& observation : observations) {
        buffer_.append(observation);
    }

    EncodingReport report;
    report.perspective_order = perspective_ids();

    // Snapshot each perspective's pending list before fanning out; the
    // buffer is only touched again after the join.
    std::vector<std::vector<Observation>> pending(perspectives_.size());
    for (std::size_t i = 0; i < perspectives_.size(); ++i) {
        pending[i] = buffer_.pending_for(perspectives_[i]->id());
    }

    std::set<std::string> pending_ids;
    for (const auto& list : pending) {
        for (const auto& observation : list) {
            pending_ids.insert(observation.id);
        }
    }
    for (const auto& entry : buffer_.entries()) {
        if (pending_ids.count(entry.observation.id)) {
            report.observation_order.push_back(entry.observation.id);
        }
    }

    std::atomic<int> relevance_checks{0};
    std::atomic<int> encode_calls{0};
    std::vector<std::map<std::string, EncodingCell>> columns(perspectives_.size());

    fan_out(perspectives_.size(), config_.parallel_phases, [&](std::size_t i) {
        Perspective& p = *perspectives_[i];
        for (const auto& observation : pending[i]) {
            EncodingCell cell;
            try {
                ++relevance_checks;
                const RelevanceDecision decision = p.assess_relevance(observation);
                if (decision.relevant) {
                    ++encode_calls;
                    const EncodingResult result = p.encode(observation);
                    cell.status = EncodingCell::Status::Encoded;
                    cell.encoding_id = p.ingest(observation.id, result);
                } else {
                    cell.status = EncodingCell::Status::Skipped;
                    cell.rationale = decision.rationale;
                }
            } catch (const std::exception& e) {
                cell.status = EncodingCell::Status::Failed;
                cell.error = e.what();
            }
            columns[i].emplace(observation.id, std::move(cell));
        }
    });

    // Acknowledgements are serialized through this (writer) thread.
    for (std::size_t i = 0; i < perspectives_.size(); ++i) {
        for (const auto& observation : pending[i]) {
            buffer_.acknowledge(perspectives_[i]->id(), observation.id);
        }
    }

    for (std::size_t i = 0; i < perspectives_.size(); ++i) {
        const std::string& pid = perspectives_[i]->id();
        int encoded = 0;
        for (auto& [obs_id, cell] : columns[i]) {
            if (cell.status == EncodingCell::Status::Encoded) {
                ++encoded;
            }
            report.cells[obs_id].emplace(pid, std::move(cell));
        }
        report.encoded_per_perspective[pid] = encoded;
        report.encoded_total += encoded;
    }
    report.relevance_checks = relevance_checks.load();
    report.encode_calls = encode_calls.load();
    report.evicted = buffer_.evict(clock_());

    stats_.relevance_checks += report.relevance_checks;
    stats_.encode_calls += report.encode_calls;
    return report;
}

RetrievalOutcome Arbiter::run_query(const QueryContext& ctx) {
    if (perspectives_.empty()) {
        throw std::invalid_argument("run_query requires at least one registered perspective");
    }
    if (ctx.query.empty()) {
        throw std::invalid_argument("query must be non-empty");
    }

    RetrievalOutcome outcome;
    outcome.ctx = ctx;
    QueryInvocations invocations;

    // Phase 1 is the broadcast itself: every agent receives the same
    // immutable context. Phase 2 collects proposals at the barrier.
    std::vector<std::optional<Proposal>> slots(perspectives_.size());
    std::vector<std::string> slot_warnings(perspectives_.size());
    fan_out(perspectives_.size(), config_.parallel_phases, [&](std::size_t i) {
        try {
            slots[i] = perspectives_[i]->propose(ctx);
        } catch (const std::exception& e) {
            slot_warnings[i] = "perspective '" + perspectives_[i]->id() +
                               "' failed to propose (" + e.what() + "); treated as abstention";
        }
    });
    invocations.propose_calls = static_cast<int>(perspectives_.size());

    std::vector<std::size_t> proposer_index;
    for (std::size_t i = 0; i < perspectives_.size(); ++i) {
        if (!slot_warnings[i].empty()) {
            outcome.warnings.push_back(slot_warnings[i]);
        }
        if (slots[i]) {
            outcome.proposals.push_back(*slots[i]);
            proposer_index.push_back(i);
        }
    }

    if (outcome.proposals.empty()) {
        invocations.assemblies = 1;
        outcome.mode = std::nullopt;
        outcome.response = compose_response(std::nullopt, {}, {}, std::nullopt, display_names());
        ExplanationInputs inputs;
        inputs.display_names = display_names();
        outcome.explanation = assemble_explanation(inputs);
        outcome.invocations = invocations;
        stats_.per_query.push_back(invocations);
        run_decay_if_due();
        return outcome;
    }

    // Phase 3: one batched critique call per proposer that has peers.
    std::vector<std::vector<Attack>> raw_attacks(proposer_index.size());
    std::vector<std::string> critique_warnings(proposer_index.size());
    std::vector<std::size_t> critique_slots;
    for (std::size_t k = 0; k < proposer_index.size(); ++k) {
        if (outcome.proposals.size() > 1) {
            critique_slots.push_back(k);
        }
    }
    fan_out(critique_slots.size(), config_.parallel_phases, [&](std::size_t slot) {
        const std::size_t k = critique_slots[slot];
        Perspective& p = *perspectives_[proposer_index[k]];
        std::vector<Proposal> others;
        for (std::size_t j = 0; j < outcome.proposals.size(); ++j) {
            if (j != k) {
                others.push_back(outcome.proposals[j]);
            }
        }
        try {
            raw_attacks[k] = p.critique(ctx, outcome.proposals[k], others);
        } catch (const std::exception& e) {
            critique_warnings[k] = "perspective '" + p.id() + "' failed to critique (" +
                                   e.what() + "); no attacks recorded";
        }
    });
    invocations.critique_calls = static_cast<int>(critique_slots.size());

    // Validate attacks; drop invalid ones with warnings rather than
    // failing the round.
    std::set<std::string> proposer_ids;
    for (const auto& p : outcome.proposals) {
        proposer_ids.insert(p.perspective_id);
    }
    for (std::size_t k = 0; k < proposer_index.size(); ++k) {
        if (!critique_warnings[k].empty()) {
            outcome.warnings.push_back(critique_warnings[k]);
        }
        for (const auto& attack : raw_attacks[k]) {
            if (attack.target == attack.attacker) {
                outcome.warnings.push_back("dropped self-attack from '" + attack.attacker + "'");
                continue;
            }
            if (!proposer_ids.count(attack.target)) {
                outcome.warnings.push_back("dropped attack from '" + attack.attacker +
                                           "' on non-proposing '" + attack.target + "'");
                continue;
            }
            if (attack.justification.size() < config_.min_justification_length) {
                outcome.warnings.push_back("dropped attack from '" + attack.attacker + "' on '" +
                                           attack.target + "': justification shorter than " +
                                           std::to_string(config_.min_justification_length) +
                                           " characters");
                continue;
            }
            outcome.attacks.push_back(attack);
        }
    }

    // Phase 4: build the attack graph and resolve it.
    for (const auto& proposal : outcome.proposals) {
        outcome.graph.add_argument(proposal.perspective_id);
    }
    for (const auto& attack : outcome.attacks) {
        outcome.graph.add_attack(attack.attacker, attack.target);
    }
    outcome.grounded = af::grounded_extension(outcome.graph);
    outcome.mode = af::classify_mode(outcome.graph, outcome.grounded);
    if (outcome.mode->mode == af::Mode::Surfacing) {
        const auto preferred = af::preferred_extensions(outcome.graph);
        outcome.preferred.emplace(preferred.begin(), preferred.end());
    }

    std::vector<Proposal> surviving;
    for (const auto& proposal : outcome.proposals) {
        if (outcome.grounded.count(proposal.perspective_id)) {
            surviving.push_back(proposal);
        }
    }

    outcome.response =
        compose_response(outcome.mode, surviving, outcome.proposals, outcome.preferred,
                         display_names());
    ExplanationInputs inputs{outcome.proposals, outcome.attacks,   outcome.graph,
                             outcome.grounded,  outcome.mode,      display_names()};
    outcome.explanation = assemble_explanation(inputs);
    invocations.assemblies = 1;

    // Outcome coherence, machine-checked on every run.
    if (outcome.grounded != af::grounded_extension(outcome.graph) ||
        outcome.mode != af::classify_mode(outcome.graph, outcome.grounded)) {
        throw std::logic_error("retrieval outcome failed coherence checks");
    }
    const int budget = 2 * static_cast<int>(perspectives_.size()) + 1;
    if (invocations.total() > budget) {
        throw std::logic_error("query used " + std::to_string(invocations.total()) +
                               " agent calls, budget is " + std::to_string(budget));
    }

    // Curation: surviving citations gain weight, then everything decays
    // at the configured cadence.
    for (const auto& proposal : surviving) {
        perspective(proposal.perspective_id)
            .graph()
            .record_retrieval(proposal.supporting_encodings, config_.retrieval_bump);
    }
    run_decay_if_due();

    outcome.invocations = invocations;
    stats_.per_query.push_back(invocations);
    return outcome;
}

}  // namespace agora
