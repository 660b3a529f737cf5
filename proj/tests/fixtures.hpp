#pragma once

// Shared builders for knowledge-graph tests: a small client-engagement
// vocabulary, pre-populated perspective graphs, and a randomized graph
// generator for round-trip properties.

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "agora/kgstore.hpp"

namespace fixtures {

using agora::kg::Iri;
using agora::kg::Literal;
using agora::kg::PerspectiveGraph;
using agora::kg::PropertyDecl;
using agora::kg::RdfTerm;
using agora::kg::TBox;
using agora::kg::Triple;

inline Iri ex(const std::string& local) { return Iri{"http://example.org/mem#" + local}; }

inline std::map<std::string, std::string> prefixes() {
    return {{"ex", "http://example.org/mem#"}};
}

inline Triple triple(const Iri& s, const Iri& p, RdfTerm o) {
    return Triple{s, p, std::move(o)};
}

inline Triple type_triple(const Iri& s, const Iri& cls) {
    return Triple{s, agora::kg::rdf_type(), cls};
}

// Relationship-flavored seed vocabulary.
inline TBox relationship_seed() {
    TBox t;
    t.classes[ex("RelationshipEvent")] = "Relationship event";
    t.classes[ex("StakeholderSignal")] = "Stakeholder signal";
    t.subclass_edges.insert({ex("StakeholderSignal"), ex("RelationshipEvent")});
    t.properties[ex("hasTrustLevel")] = PropertyDecl{ex("RelationshipEvent"), agora::kg::xsd_string()};
    t.properties[ex("hasReciprocityExpectation")] =
        PropertyDecl{ex("RelationshipEvent"), agora::kg::xsd_string()};
    t.properties[ex("involvesStakeholder")] =
        PropertyDecl{ex("RelationshipEvent"), agora::kg::xsd_string()};
    return t;
}

// Risk-flavored seed vocabulary.
inline TBox risk_seed() {
    TBox t;
    t.classes[ex("RiskEvent")] = "Risk event";
    t.classes[ex("PricingPrecedent")] = "Pricing precedent";
    t.subclass_edges.insert({ex("PricingPrecedent"), ex("RiskEvent")});
    t.properties[ex("hasSeverity")] = PropertyDecl{ex("RiskEvent"), agora::kg::xsd_string()};
    return t;
}

// Finance-flavored seed vocabulary.
inline TBox financial_seed() {
    TBox t;
    t.classes[ex("FinancialEvent")] = "Financial event";
    t.classes[ex("MarginEvent")] = "Margin event";
    t.subclass_edges.insert({ex("MarginEvent"), ex("FinancialEvent")});
    t.properties[ex("hasMarginImpactPercent")] =
        PropertyDecl{ex("FinancialEvent"), agora::kg::xsd_integer()};
    t.properties[ex("affectsAccount")] =
        PropertyDecl{ex("FinancialEvent"), agora::kg::xsd_string()};
    return t;
}

// Delta used across tests: a trust-signal class slotted under the
// relationship root.
inline TBox trust_signal_delta() {
    TBox t;
    t.classes[ex("TrustSignal")] = "Trust signal";
    t.subclass_edges.insert({ex("TrustSignal"), ex("RelationshipEvent")});
    return t;
}

inline std::vector<Triple> concession_trust_triples() {
    return {
        type_triple(ex("meridianConcession"), ex("TrustSignal")),
        triple(ex("meridianConcession"), ex("hasTrustLevel"),
               agora::kg::make_string_literal("guarded")),
        triple(ex("meridianConcession"), ex("hasReciprocityExpectation"),
               agora::kg::make_string_literal("low")),
    };
}

inline std::vector<Triple> concession_margin_triples() {
    return {
        type_triple(ex("meridianConcession"), ex("MarginEvent")),
        triple(ex("meridianConcession"), ex("hasMarginImpactPercent"),
               agora::kg::make_integer_literal(-15)),
    };
}

/// Relationship graph holding the concession-as-trust-signal encoding.
inline PerspectiveGraph relationship_graph() {
    PerspectiveGraph g("rel", prefixes(), relationship_seed());
    g.insert_encoding("obs-2", concession_trust_triples(), trust_signal_delta());
    return g;
}

/// Financial graph holding the concession-as-margin-impact encoding.
inline PerspectiveGraph financial_graph() {
    PerspectiveGraph g("fin", prefixes(), financial_seed());
    g.insert_encoding("obs-2", concession_margin_triples());
    return g;
}

/// Random prefix table plus triples covering every term shape the
/// Turtle subset supports, including literals with escapes.
struct RandomGraph {
    std::map<std::string, std::string> prefixes;
    std::set<Triple> triples;
};

inline RandomGraph random_kg(std::mt19937& rng, std::size_t max_triples) {
    RandomGraph out;
    out.prefixes = {{"ex", "http://example.org/a#"},
                    {"v", "http://vocab.example.org/terms/"},
                    {"deep", "http://example.org/a#deep-"}};

    std::uniform_int_distribution<std::size_t> count_dist(0, max_triples);
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_int_distribution<int> small(0, 5);
    std::uniform_int_distribution<long long> num(-100000, 100000);

    auto random_iri = [&]() {
        switch (small(rng)) {
            case 0: return Iri{"http://example.org/a#n" + std::to_string(pick(rng))};
            case 1: return Iri{"http://vocab.example.org/terms/t" + std::to_string(pick(rng))};
            case 2: return Iri{"http://example.org/a#deep-d" + std::to_string(pick(rng))};
            case 3: return Iri{"urn:uuid:0000-" + std::to_string(pick(rng))};
            // locals that cannot compact (leading digit / strange chars)
            case 4: return Iri{"http://example.org/a#" + std::to_string(pick(rng)) + "x"};
            default: return Iri{"http://other.example.net/" + std::to_string(pick(rng))};
        }
    };

    static const std::vector<std::string> lexicals = {
        "plain", "with space", "quote \" inside", "back\\slash", "tab\tchar",
        "new\nline", "carriage\rreturn", "mixed \"q\" and \\e", "", "unicode äöü"};

    auto random_object = [&]() -> RdfTerm {
        switch (pick(rng)) {
            case 0:
            case 1:
            case 2: return random_iri();
            case 3: return agora::kg::make_integer_literal(num(rng));
            case 4: {
                std::string dec = std::to_string(num(rng)) + "." + std::to_string(pick(rng));
                return agora::kg::make_typed_literal(dec, agora::kg::xsd_decimal());
            }
            case 5:
                return agora::kg::make_lang_literal(lexicals[small(rng)],
                                                    small(rng) % 2 ? "en" : "en-GB");
            case 6:
                return agora::kg::make_typed_literal(
                    lexicals[small(rng)], Iri{"http://www.w3.org/2001/XMLSchema#date"});
            default:
                return agora::kg::make_string_literal(
                    lexicals[static_cast<std::size_t>(pick(rng))]);
        }
    };

    const std::size_t n = count_dist(rng);
    for (std::size_t i = 0; i < n; ++i) {
        out.triples.insert(Triple{random_iri(), random_iri(), random_object()});
    }
    return out;
}

}  // namespace fixtures
