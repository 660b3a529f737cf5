#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agora/errors.hpp"

namespace agora::af {

/// Opaque argument name. In retrieval use it equals the proposing
/// perspective's id.
using ArgumentId = std::string;

/// A set of arguments accepted under some semantics.
using Extension = std::set<ArgumentId>;

/// Directed attack graph over a finite set of named arguments.
///
/// Arguments keep their declaration order (it drives serialization and
/// user-facing listings); edges have set semantics. Self-attacks are
/// representable, the retrieval arbiter just never emits them. Values
/// are immutable once built up and safe to share across threads.
class AttackGraph {
public:
    AttackGraph() = default;

    /// Throws std::invalid_argument on an empty id, DuplicateError on a
    /// repeated one.
    void add_argument(const ArgumentId& id);

    /// Both endpoints must already be declared. Duplicate edges are
    /// silently collapsed.
    void add_attack(const ArgumentId& attacker, const ArgumentId& target);

    bool contains(const ArgumentId& id) const { return index_.count(id) != 0; }
    bool has_attack(const ArgumentId& attacker, const ArgumentId& target) const;

    std::size_t size() const { return order_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// Arguments in declaration order.
    const std::vector<ArgumentId>& arguments() const { return order_; }

    /// Edges sorted lexicographically by (attacker, target).
    std::vector<std::pair<ArgumentId, ArgumentId>> edges() const;

    /// Throws std::invalid_argument on an unknown id.
    std::vector<ArgumentId> attackers_of(const ArgumentId& id) const;
    std::vector<ArgumentId> targets_of(const ArgumentId& id) const;

    bool operator==(const AttackGraph& other) const;

private:
    std::size_t index_of(const ArgumentId& id) const;

    std::vector<ArgumentId> order_;
    std::map<ArgumentId, std::size_t> index_;
    std::set<std::pair<std::size_t, std::size_t>> edges_;  // (attacker, target)
};

/// True iff no edge of the graph connects two members of `s`.
/// Throws std::invalid_argument if `s` contains an unknown argument.
bool is_conflict_free(const AttackGraph& graph, const Extension& s);

/// True iff every attacker of `argument` is attacked by some member of `s`.
bool defends(const AttackGraph& graph, const Extension& s, const ArgumentId& argument);

/// True iff `s` is conflict-free and defends every one of its members.
bool is_admissible(const AttackGraph& graph, const Extension& s);

/// Least fixed point of the defense operator: start from the unattacked
/// arguments, keep adding every argument whose attackers are all
/// counterattacked by the set, stop when stable. Unique and independent
/// of iteration order.
Extension grounded_extension(const AttackGraph& graph);

/// All maximal (by set inclusion) admissible sets, found by exhaustive
/// subset search with conflict-free pruning. Intended for arbitration
/// scale (tens of arguments); graphs beyond 64 arguments are rejected.
/// Never empty: the empty set is admissible, so at least one maximal
/// admissible set exists.
std::set<Extension> preferred_extensions(const AttackGraph& graph);

enum class Mode { Selection, Composition, Surfacing };
enum class CompositionDetail { Complementary, Filtered };

/// Outcome class of a retrieval round, derived from extension topology.
struct RetrievalMode {
    Mode mode = Mode::Composition;
    /// Present exactly when mode == Composition.
    std::optional<CompositionDetail> detail;

    bool operator==(const RetrievalMode&) const = default;

    static RetrievalMode selection() { return {Mode::Selection, std::nullopt}; }
    static RetrievalMode surfacing() { return {Mode::Surfacing, std::nullopt}; }
    static RetrievalMode composition(CompositionDetail d) { return {Mode::Composition, d}; }
};

std::string to_string(Mode mode);
std::string to_string(const RetrievalMode& mode);  // "selection" | "composition(filtered)" | ...

/// Maps a grounded extension onto a retrieval mode:
///   - grounded == all arguments        -> Composition(complementary)
///   - grounded empty                   -> Surfacing
///   - single survivor among several    -> Selection
///   - several survivors, not all       -> Composition(filtered)
/// A single-argument graph whose argument survives is complementary
/// composition, not selection: selection presupposes rejected
/// alternatives. Throws std::invalid_argument on an empty graph and
/// std::logic_error when `grounded` is not the graph's grounded
/// extension.
RetrievalMode classify_mode(const AttackGraph& graph, const Extension& grounded);

/// Members of `s` in the graph's declaration order.
std::vector<ArgumentId> declaration_ordered(const AttackGraph& graph, const Extension& s);

/// "{risk, fin}" with members in declaration order; "{}" when empty.
std::string format_extension(const AttackGraph& graph, const Extension& s);

/// Line-oriented AF text format:
///   # comment (anywhere, to end of line)
///   af <n>
///   <argument-name>      (exactly n lines, one token each)
///   att <attacker> <target>
/// Throws ParseError with the offending line number.
AttackGraph parse_af(const std::string& text);

/// Arguments in declaration order, `att` lines sorted by (attacker,
/// target). parse_af(serialize_af(g)) == g.
std::string serialize_af(const AttackGraph& graph);

/// Graphviz rendering. Accepted arguments are filled light blue,
/// defeated ones gray. `labels` maps argument ids to display names and
/// may be partial.
std::string to_dot(const AttackGraph& graph, const Extension& accepted,
                   const std::map<ArgumentId, std::string>& labels = {});

}  // namespace agora::af
