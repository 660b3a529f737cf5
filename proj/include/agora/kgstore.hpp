#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "agora/errors.hpp"

namespace agora::kg {

/// Absolute IRI. Prefixed names are resolved to this form at parse or
/// scenario-load time, so equality is plain string equality.
struct Iri {
    std::string value;

    Iri() = default;
    explicit Iri(std::string v) : value(std::move(v)) {}

    auto operator<=>(const Iri&) const = default;
};

// Well-known vocabulary.
const Iri& rdf_type();
const Iri& rdf_lang_string();
const Iri& xsd_string();
const Iri& xsd_integer();
const Iri& xsd_decimal();

/// Typed literal. Exactly one of {datatype, language tag} carries the
/// type; plain strings default to xsd:string and language-tagged ones
/// to rdf:langString. Use the make_* builders to keep that normalized.
struct Literal {
    std::string lexical;
    Iri datatype;
    std::string lang;

    auto operator<=>(const Literal&) const = default;
};

Literal make_string_literal(std::string lexical);
Literal make_lang_literal(std::string lexical, std::string lang);
Literal make_typed_literal(std::string lexical, Iri datatype);
Literal make_integer_literal(long long value);

using RdfTerm = std::variant<Iri, Literal>;

struct Triple {
    Iri subject;
    Iri predicate;
    RdfTerm object;

    auto operator<=>(const Triple&) const = default;
};

std::string term_to_string(const RdfTerm& term);

/// Short human-readable form of an IRI: the fragment or last path segment.
std::string local_name(const Iri& iri);

struct PropertyDecl {
    Iri domain;
    Iri range;  // a declared class or a datatype IRI

    auto operator<=>(const PropertyDecl&) const = default;
};

/// Terminology: class hierarchy plus property declarations. Also used
/// as the delta shape for hierarchy updates.
struct TBox {
    std::map<Iri, std::string> classes;            // class IRI -> human label
    std::set<std::pair<Iri, Iri>> subclass_edges;  // (child, parent)
    std::map<Iri, PropertyDecl> properties;

    bool empty() const { return classes.empty() && subclass_edges.empty() && properties.empty(); }
    bool has_class(const Iri& iri) const { return classes.count(iri) != 0; }
    bool has_property(const Iri& iri) const { return properties.count(iri) != 0; }

    bool operator==(const TBox&) const = default;
};

/// Merges `delta` into `base` and validates the result: subclass edges
/// must stay acyclic, every edge endpoint and property domain must be a
/// declared class. Idempotent. Throws CycleError naming the offending
/// edge, or DeclarationError for dangling/contradictory declarations.
TBox merged_tbox(const TBox& base, const TBox& delta);

/// Full invariant check for a standalone terminology (seed validation).
void validate_tbox(const TBox& tbox);

/// One registered encoding act: the triples a perspective extracted
/// from one observation, plus its curation weight.
struct Encoding {
    std::string id;
    std::string observation_id;
    std::vector<Triple> triples;  // sorted, deduplicated; all present in the abox
    double importance_weight = 1.0;

    bool operator==(const Encoding&) const = default;
};

/// Wildcard slots are nullopt.
struct TriplePattern {
    std::optional<Iri> subject;
    std::optional<Iri> predicate;
    std::optional<RdfTerm> object;
};

/// A perspective's private knowledge graph: terminology, instance
/// triples and the encoding registry. Owned by exactly one perspective
/// agent; mutations follow single-writer discipline, reads on a copied
/// snapshot are safe anywhere.
class PerspectiveGraph {
public:
    PerspectiveGraph() = default;
    PerspectiveGraph(std::string perspective_id,
                     std::map<std::string, std::string> prefixes,
                     TBox seed_tbox);

    const std::string& perspective_id() const { return perspective_id_; }
    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }
    const TBox& tbox() const { return tbox_; }
    const std::set<Triple>& abox() const { return abox_; }
    const std::map<std::string, Encoding>& encodings() const { return encodings_; }

    bool has_encoding(const std::string& encoding_id) const {
        return encodings_.count(encoding_id) != 0;
    }

    /// Transactional: on error the graph is unchanged.
    void apply_tbox_update(const TBox& delta);

    /// Applies `tbox_delta`, validates that every triple only uses
    /// declared vocabulary, then registers the encoding with weight 1.0
    /// and grows the abox by the deduplicated triple set. Returns the
    /// new encoding id (<perspective>/<observation>/<seq>).
    /// Throws std::invalid_argument on an empty triple set and
    /// DeclarationError listing offending IRIs on vocabulary violations.
    std::string insert_encoding(const std::string& observation_id,
                                const std::vector<Triple>& triples,
                                const TBox& tbox_delta = {});

    /// Exactly the abox triples matching all concrete pattern slots.
    std::set<Triple> match(const TriplePattern& pattern) const;

    /// Adds `bump` to each cited encoding's weight. All ids must exist.
    void record_retrieval(const std::vector<std::string>& encoding_ids, double bump = 1.0);

    /// Multiplies every weight by `factor`, which must lie in (0,1).
    void decay_weights(double factor);

    bool operator==(const PerspectiveGraph&) const = default;

private:
    void validate_vocabulary(const TBox& tbox, const std::vector<Triple>& triples) const;

    std::string perspective_id_;
    std::map<std::string, std::string> prefixes_;
    TBox tbox_;
    std::set<Triple> abox_;
    std::map<std::string, Encoding> encodings_;
    std::map<std::string, int> observation_seq_;
};

}  // namespace agora::kg
