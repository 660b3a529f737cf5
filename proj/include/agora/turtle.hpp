#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "agora/kgstore.hpp"

namespace agora::kg {

/// Result of parsing a Turtle document: the declared prefix table and
/// the triples in document order.
struct TurtleDocument {
    std::map<std::string, std::string> prefixes;
    std::vector<Triple> triples;
};

/// Parses the supported Turtle subset:
///   @prefix declarations, prefixed names, absolute IRIs in angle
///   brackets, string/integer/decimal literals, language tags, typed
///   literals via ^^, `a` for rdf:type, `;` predicate lists and `,`
///   object lists, `#` comments.
/// Blank nodes, collections, multiline strings and @base are out of
/// scope. Throws ParseError with line and column.
TurtleDocument parse_turtle(const std::string& text);

/// Deterministic serialization: prefix block sorted by prefix name,
/// triples sorted by (subject, predicate, object) and grouped with `;`
/// and `,`. parse_turtle(serialize_turtle(g)) reproduces the prefix
/// table and triple set exactly.
std::string serialize_turtle(const std::map<std::string, std::string>& prefixes,
                             const std::set<Triple>& triples);

std::string serialize_turtle(const PerspectiveGraph& graph);

}  // namespace agora::kg
