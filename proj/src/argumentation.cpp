#include "agora/argumentation.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace agora::af {

void AttackGraph::add_argument(const ArgumentId& id) {
    if (id.empty()) {
        throw std::invalid_argument("argument id must be non-empty");
    }
    if (index_.count(id) != 0) {
        throw DuplicateError("argument '" + id + "' declared twice");
    }
    index_.emplace(id, order_.size());
    order_.push_back(id);
}

void AttackGraph::add_attack(const ArgumentId& attacker, const ArgumentId& target) {
    edges_.emplace(index_of(attacker), index_of(target));
}

bool AttackGraph::has_attack(const ArgumentId& attacker, const ArgumentId& target) const {
    auto a = index_.find(attacker);
    auto t = index_.find(target);
    if (a == index_.end() || t == index_.end()) {
        return false;
    }
    return edges_.count({a->second, t->second}) != 0;
}

std::vector<std::pair<ArgumentId, ArgumentId>> AttackGraph::edges() const {
    std::vector<std::pair<ArgumentId, ArgumentId>> out;
    out.reserve(edges_.size());
    for (const auto& [a, t] : edges_) {
        out.emplace_back(order_[a], order_[t]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ArgumentId> AttackGraph::attackers_of(const ArgumentId& id) const {
    const std::size_t target = index_of(id);
    std::vector<ArgumentId> out;
    for (const auto& [a, t] : edges_) {
        if (t == target) {
            out.push_back(order_[a]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ArgumentId> AttackGraph::targets_of(const ArgumentId& id) const {
    const std::size_t attacker = index_of(id);
    std::vector<ArgumentId> out;
    for (const auto& [a, t] : edges_) {
        if (a == attacker) {
            out.push_back(order_[t]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool AttackGraph::operator==(const AttackGraph& other) const {
    return order_ == other.order_ && edges_ == other.edges_;
}

std::size_t AttackGraph::index_of(const ArgumentId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::invalid_argument("unknown argument '" + id + "'");
    }
    return it->second;
}

namespace {

// Bitmask view of a graph for subset enumeration. Index order follows
// declaration order.
struct MaskGraph {
    std::size_t n = 0;
    std::vector<std::uint64_t> attackers;  // attackers[i]: arguments attacking i
    std::vector<std::uint64_t> targets;    // targets[i]: arguments i attacks

    explicit MaskGraph(const AttackGraph& g) : n(g.size()), attackers(n, 0), targets(n, 0) {
        std::map<ArgumentId, std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i) {
            idx.emplace(g.arguments()[i], i);
        }
        for (const auto& [a, t] : g.edges()) {
            attackers[idx[t]] |= std::uint64_t{1} << idx[a];
            targets[idx[a]] |= std::uint64_t{1} << idx[t];
        }
    }

    std::uint64_t attacked_by(std::uint64_t set) const {
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (set >> i & 1) {
                out |= targets[i];
            }
        }
        return out;
    }

    bool conflict_free(std::uint64_t set) const {
        for (std::size_t i = 0; i < n; ++i) {
            if ((set >> i & 1) && (attackers[i] & set)) {
                return false;
            }
        }
        return true;
    }

    bool admissible(std::uint64_t set) const {
        if (!conflict_free(set)) {
            return false;
        }
        const std::uint64_t counterattacked = attacked_by(set);
        for (std::size_t i = 0; i < n; ++i) {
            if ((set >> i & 1) && (attackers[i] & ~counterattacked)) {
                return false;
            }
        }
        return true;
    }
};

Extension to_extension(const AttackGraph& g, std::uint64_t mask) {
    Extension out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask >> i & 1) {
            out.insert(g.arguments()[i]);
        }
    }
    return out;
}

void check_members(const AttackGraph& graph, const Extension& s) {
    for (const auto& id : s) {
        if (!graph.contains(id)) {
            throw std::invalid_argument("extension member '" + id + "' is not in the graph");
        }
    }
}

}  // namespace

bool is_conflict_free(const AttackGraph& graph, const Extension& s) {
    check_members(graph, s);
    for (const auto& a : s) {
        for (const auto& t : graph.targets_of(a)) {
            if (s.count(t)) {
                return false;
            }
        }
    }
    return true;
}

bool defends(const AttackGraph& graph, const Extension& s, const ArgumentId& argument) {
    if (!graph.contains(argument)) {
        throw std::invalid_argument("unknown argument '" + argument + "'");
    }
    check_members(graph, s);
    for (const auto& attacker : graph.attackers_of(argument)) {
        bool counterattacked = false;
        for (const auto& defender : s) {
            if (graph.has_attack(defender, attacker)) {
                counterattacked = true;
                break;
            }
        }
        if (!counterattacked) {
            return false;
        }
    }
    return true;
}

bool is_admissible(const AttackGraph& graph, const Extension& s) {
    if (!is_conflict_free(graph, s)) {
        return false;
    }
    for (const auto& member : s) {
        if (!defends(graph, s, member)) {
            return false;
        }
    }
    return true;
}

Extension grounded_extension(const AttackGraph& graph) {
    // Ascending iteration of the defense operator from the empty set;
    // the first pass admits exactly the unattacked arguments.
    Extension current;
    for (;;) {
        Extension next;
        for (const auto& id : graph.arguments()) {
            if (defends(graph, current, id)) {
                next.insert(id);
            }
        }
        if (next == current) {
            return current;
        }
        current = std::move(next);
    }
}

std::set<Extension> preferred_extensions(const AttackGraph& graph) {
    if (graph.size() > 64) {
        throw std::invalid_argument("preferred-extension enumeration supports at most 64 arguments");
    }
    const MaskGraph mg(graph);

    // Enumerate conflict-free sets by branching on each argument in
    // declaration order; prune branches that introduce a conflict.
    std::vector<std::uint64_t> admissible;
    std::vector<std::pair<std::size_t, std::uint64_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [i, set] = stack.back();
        stack.pop_back();
        if (i == mg.n) {
            if (mg.admissible(set)) {
                admissible.push_back(set);
            }
            continue;
        }
        stack.emplace_back(i + 1, set);
        const std::uint64_t bit = std::uint64_t{1} << i;
        const bool conflicts = (mg.attackers[i] & (set | bit)) != 0 || (mg.targets[i] & set) != 0;
        if (!conflicts) {
            stack.emplace_back(i + 1, set | bit);
        }
    }

    std::set<Extension> out;
    for (std::uint64_t s : admissible) {
        bool maximal = true;
        for (std::uint64_t t : admissible) {
            if (t != s && (s & ~t) == 0) {
                maximal = false;
                break;
            }
        }
        if (maximal) {
            out.insert(to_extension(graph, s));
        }
    }
    return out;
}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Selection: return "selection";
        case Mode::Composition: return "composition";
        case Mode::Surfacing: return "surfacing";
    }
    return "?";
}

std::string to_string(const RetrievalMode& mode) {
    std::string out = to_string(mode.mode);
    if (mode.detail) {
        out += *mode.detail == CompositionDetail::Complementary ? "(complementary)" : "(filtered)";
    }
    return out;
}

RetrievalMode classify_mode(const AttackGraph& graph, const Extension& grounded) {
    if (graph.size() == 0) {
        throw std::invalid_argument("classify_mode requires at least one argument");
    }
    if (grounded != grounded_extension(graph)) {
        throw std::logic_error("classify_mode: given set is not the grounded extension of the graph");
    }
    if (grounded.size() == graph.size()) {
        return RetrievalMode::composition(CompositionDetail::Complementary);
    }
    if (grounded.empty()) {
        return RetrievalMode::surfacing();
    }
    if (grounded.size() == 1) {
        return RetrievalMode::selection();
    }
    return RetrievalMode::composition(CompositionDetail::Filtered);
}

std::vector<ArgumentId> declaration_ordered(const AttackGraph& graph, const Extension& s) {
    check_members(graph, s);
    std::vector<ArgumentId> out;
    out.reserve(s.size());
    for (const auto& id : graph.arguments()) {
        if (s.count(id)) {
            out.push_back(id);
        }
    }
    return out;
}

std::string format_extension(const AttackGraph& graph, const Extension& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& id : declaration_ordered(graph, s)) {
        if (!first) {
            out += ", ";
        }
        out += id;
        first = false;
    }
    return out + "}";
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

}  // namespace

AttackGraph parse_af(const std::string& text) {
    AttackGraph graph;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;

    bool saw_header = false;
    std::size_t declared = 0;
    std::size_t expected = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        const auto tokens = split_tokens(raw);
        if (tokens.empty()) {
            continue;
        }
        if (!saw_header) {
            if (tokens.size() != 2 || tokens[0] != "af") {
                throw ParseError("expected header 'af <n>'", line_no);
            }
            try {
                const long long n = std::stoll(tokens[1]);
                if (n < 0) {
                    throw std::out_of_range("negative");
                }
                expected = static_cast<std::size_t>(n);
            } catch (const std::exception&) {
                throw ParseError("malformed argument count '" + tokens[1] + "'", line_no);
            }
            saw_header = true;
            continue;
        }
        if (declared < expected) {
            if (tokens.size() != 1) {
                throw ParseError("expected a single argument name", line_no);
            }
            try {
                graph.add_argument(tokens[0]);
            } catch (const DuplicateError& e) {
                throw ParseError(e.what(), line_no);
            }
            ++declared;
            continue;
        }
        if (tokens.size() != 3 || tokens[0] != "att") {
            throw ParseError("expected 'att <attacker> <target>'", line_no);
        }
        try {
            graph.add_attack(tokens[1], tokens[2]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
    }

    if (!saw_header) {
        throw ParseError("missing 'af <n>' header", line_no == 0 ? 1 : line_no);
    }
    if (declared < expected) {
        throw ParseError("declared " + std::to_string(declared) + " arguments, header promised " +
                             std::to_string(expected),
                         line_no);
    }
    return graph;
}

std::string serialize_af(const AttackGraph& graph) {
    std::ostringstream out;
    out << "af " << graph.size() << "\n";
    for (const auto& id : graph.arguments()) {
        out << id << "\n";
    }
    for (const auto& [a, t] : graph.edges()) {
        out << "att " << a << " " << t << "\n";
    }
    return out.str();
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

}  // namespace

std::string to_dot(const AttackGraph& graph, const Extension& accepted,
                   const std::map<ArgumentId, std::string>& labels) {
    check_members(graph, accepted);
    std::ostringstream out;
    out << "digraph attack_graph {\n";
    out << "  rankdir=LR;\n";
    for (const auto& id : graph.arguments()) {
        out << "  \"" << dot_escape(id) << "\" [";
        auto label = labels.find(id);
        if (label != labels.end()) {
            out << "label=\"" << dot_escape(label->second) << "\", ";
        }
        out << "style=filled, fillcolor=" << (accepted.count(id) ? "lightblue" : "gray85") << "];\n";
    }
    for (const auto& [a, t] : graph.edges()) {
        out << "  \"" << dot_escape(a) << "\" -> \"" << dot_escape(t) << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace agora::af
