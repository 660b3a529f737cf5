#include "agora/kgstore.hpp"

#include <algorithm>
#include <sstream>

namespace agora::kg {

const Iri& rdf_type() {
    static const Iri iri{"http://www.w3.org/1999/02/22-rdf-syntax-ns#type"};
    return iri;
}

const Iri& rdf_lang_string() {
    static const Iri iri{"http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"};
    return iri;
}

const Iri& xsd_string() {
    static const Iri iri{"http://www.w3.org/2001/XMLSchema#string"};
    return iri;
}

const Iri& xsd_integer() {
    static const Iri iri{"http://www.w3.org/2001/XMLSchema#integer"};
    return iri;
}

const Iri& xsd_decimal() {
    static const Iri iri{"http://www.w3.org/2001/XMLSchema#decimal"};
    return iri;
}

Literal make_string_literal(std::string lexical) {
    return Literal{std::move(lexical), xsd_string(), ""};
}

Literal make_lang_literal(std::string lexical, std::string lang) {
    if (lang.empty()) {
        throw std::invalid_argument("language tag must be non-empty");
    }
    return Literal{std::move(lexical), rdf_lang_string(), std::move(lang)};
}

Literal make_typed_literal(std::string lexical, Iri datatype) {
    if (datatype.value.empty()) {
        return make_string_literal(std::move(lexical));
    }
    return Literal{std::move(lexical), std::move(datatype), ""};
}

Literal make_integer_literal(long long value) {
    return Literal{std::to_string(value), xsd_integer(), ""};
}

std::string term_to_string(const RdfTerm& term) {
    if (const auto* iri = std::get_if<Iri>(&term)) {
        return "<" + iri->value + ">";
    }
    const auto& lit = std::get<Literal>(term);
    std::string out = "\"" + lit.lexical + "\"";
    if (!lit.lang.empty()) {
        out += "@" + lit.lang;
    } else if (lit.datatype != xsd_string()) {
        out += "^^<" + lit.datatype.value + ">";
    }
    return out;
}

std::string local_name(const Iri& iri) {
    const auto pos = iri.value.find_last_of("#/");
    if (pos == std::string::npos || pos + 1 >= iri.value.size()) {
        return iri.value;
    }
    return iri.value.substr(pos + 1);
}

namespace {

// Depth-first reachability along subclass edges (child -> parent).
bool reaches(const TBox& tbox, const Iri& from, const Iri& to) {
    if (from == to) {
        return true;
    }
    std::vector<Iri> stack{from};
    std::set<Iri> seen{from};
    while (!stack.empty()) {
        const Iri current = stack.back();
        stack.pop_back();
        for (const auto& [child, parent] : tbox.subclass_edges) {
            if (child == current && seen.insert(parent).second) {
                if (parent == to) {
                    return true;
                }
                stack.push_back(parent);
            }
        }
    }
    return false;
}

}  // namespace

TBox merged_tbox(const TBox& base, const TBox& delta) {
    TBox out = base;
    for (const auto& [iri, label] : delta.classes) {
        auto [it, inserted] = out.classes.emplace(iri, label);
        if (!inserted && it->second.empty() && !label.empty()) {
            it->second = label;  // a delta may supply a label for a known class
        }
    }
    for (const auto& [iri, decl] : delta.properties) {
        auto [it, inserted] = out.properties.emplace(iri, decl);
        if (!inserted && !(it->second == decl)) {
            throw DeclarationError("property <" + iri.value +
                                   "> redeclared with a different domain or range");
        }
        if (!out.has_class(decl.domain)) {
            throw DeclarationError("property <" + iri.value + "> declares undeclared domain <" +
                                   decl.domain.value + ">");
        }
    }
    // Insert subclass edges one at a time so a cycle can be blamed on
    // the exact edge that closes it.
    std::vector<std::pair<Iri, Iri>> new_edges(delta.subclass_edges.begin(),
                                               delta.subclass_edges.end());
    for (const auto& [child, parent] : new_edges) {
        if (!out.has_class(child) || !out.has_class(parent)) {
            const Iri& missing = out.has_class(child) ? parent : child;
            throw DeclarationError("subclass edge <" + child.value + "> -> <" + parent.value +
                                   "> references undeclared class <" + missing.value + ">");
        }
        if (out.subclass_edges.count({child, parent})) {
            continue;
        }
        if (reaches(out, parent, child)) {
            throw CycleError("subclass edge <" + child.value + "> -> <" + parent.value +
                             "> would create a cycle");
        }
        out.subclass_edges.insert({child, parent});
    }
    return out;
}

void validate_tbox(const TBox& tbox) {
    TBox empty;
    TBox merged = merged_tbox(empty, tbox);
    (void)merged;
}

PerspectiveGraph::PerspectiveGraph(std::string perspective_id,
                                   std::map<std::string, std::string> prefixes,
                                   TBox seed_tbox)
    : perspective_id_(std::move(perspective_id)), prefixes_(std::move(prefixes)) {
    if (perspective_id_.empty()) {
        throw std::invalid_argument("perspective id must be non-empty");
    }
    validate_tbox(seed_tbox);
    tbox_ = std::move(seed_tbox);
}

void PerspectiveGraph::apply_tbox_update(const TBox& delta) {
    tbox_ = merged_tbox(tbox_, delta);
}

void PerspectiveGraph::validate_vocabulary(const TBox& tbox,
                                           const std::vector<Triple>& triples) const {
    std::set<Iri> offenders;
    for (const auto& triple : triples) {
        if (triple.predicate == rdf_type()) {
            const auto* cls = std::get_if<Iri>(&triple.object);
            if (cls == nullptr || !tbox.has_class(*cls)) {
                offenders.insert(cls ? *cls : triple.predicate);
            }
        } else if (!tbox.has_property(triple.predicate)) {
            offenders.insert(triple.predicate);
        }
    }
    if (!offenders.empty()) {
        std::ostringstream msg;
        msg << "encoding uses undeclared terms:";
        for (const auto& iri : offenders) {
            msg << " <" << iri.value << ">";
        }
        throw DeclarationError(msg.str());
    }
}

std::string PerspectiveGraph::insert_encoding(const std::string& observation_id,
                                              const std::vector<Triple>& triples,
                                              const TBox& tbox_delta) {
    if (observation_id.empty()) {
        throw std::invalid_argument("observation id must be non-empty");
    }
    if (triples.empty()) {
        throw std::invalid_argument("an encoding must assert at least one triple");
    }
    // Validate against the merged terminology before mutating anything.
    const TBox merged = merged_tbox(tbox_, tbox_delta);
    validate_vocabulary(merged, triples);

    std::vector<Triple> unique(triples);
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    tbox_ = merged;
    abox_.insert(unique.begin(), unique.end());

    const int seq = ++observation_seq_[observation_id];
    Encoding encoding;
    encoding.id = perspective_id_ + "/" + observation_id + "/" + std::to_string(seq);
    encoding.observation_id = observation_id;
    encoding.triples = std::move(unique);
    encoding.importance_weight = 1.0;
    const std::string id = encoding.id;
    encodings_.emplace(id, std::move(encoding));
    return id;
}

std::set<Triple> PerspectiveGraph::match(const TriplePattern& pattern) const {
    std::set<Triple> out;
    for (const auto& triple : abox_) {
        if (pattern.subject && !(triple.subject == *pattern.subject)) {
            continue;
        }
        if (pattern.predicate && !(triple.predicate == *pattern.predicate)) {
            continue;
        }
        if (pattern.object && !(triple.object == *pattern.object)) {
            continue;
        }
        out.insert(triple);
    }
    return out;
}

void PerspectiveGraph::record_retrieval(const std::vector<std::string>& encoding_ids,
                                        double bump) {
    if (bump < 0) {
        throw std::invalid_argument("retrieval bump must be non-negative");
    }
    for (const auto& id : encoding_ids) {
        if (!has_encoding(id)) {
            throw std::invalid_argument("unknown encoding id '" + id + "'");
        }
    }
    for (const auto& id : encoding_ids) {
        encodings_[id].importance_weight += bump;
    }
}

void PerspectiveGraph::decay_weights(double factor) {
    if (!(factor > 0.0 && factor < 1.0)) {
        throw std::invalid_argument("decay factor must lie strictly between 0 and 1");
    }
    for (auto& [id, encoding] : encodings_) {
        encoding.importance_weight *= factor;
    }
}

}  // namespace agora::kg
