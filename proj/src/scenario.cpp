#include "agora/scenario.hpp"

#include <fstream>

namespace agora {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ScenarioError(path + ": " + message);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        fail(path + "." + key, "missing required field");
    }
    return *it;
}

const json* opt_member(const json& j, const std::string& key) {
    if (!j.is_object()) {
        return nullptr;
    }
    auto it = j.find(key);
    return (it == j.end() || it->is_null()) ? nullptr : &*it;
}

std::string as_string(const json& j, const std::string& path, bool allow_empty = false) {
    if (!j.is_string()) {
        fail(path, "expected a string");
    }
    const std::string value = j.get<std::string>();
    if (value.empty() && !allow_empty) {
        fail(path, "expected a non-empty string");
    }
    return value;
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) {
        fail(path, "expected a boolean");
    }
    return j.get<bool>();
}

std::int64_t as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        fail(path, "expected an integer");
    }
    return j.get<std::int64_t>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) {
        fail(path, "expected an array");
    }
    return j;
}

const json& as_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    return j;
}

std::string idx(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

}  // namespace

kg::Iri parse_iri(const std::string& text, const std::map<std::string, std::string>& prefixes,
                  const std::string& path) {
    if (text.empty()) {
        fail(path, "expected a non-empty IRI");
    }
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string prefix = text.substr(0, colon);
        auto it = prefixes.find(prefix);
        if (it != prefixes.end()) {
            return kg::Iri{it->second + text.substr(colon + 1)};
        }
        if (prefix == "xsd") {
            return kg::Iri{"http://www.w3.org/2001/XMLSchema#" + text.substr(colon + 1)};
        }
        if (prefix == "rdf") {
            return kg::Iri{"http://www.w3.org/1999/02/22-rdf-syntax-ns#" + text.substr(colon + 1)};
        }
        if (text.find("://") != std::string::npos || prefix == "urn") {
            return kg::Iri{text};  // already absolute
        }
        fail(path, "unknown prefix '" + prefix + ":' in '" + text + "'");
    }
    fail(path, "'" + text + "' is neither an absolute IRI nor a prefixed name");
}

kg::RdfTerm parse_term(const json& value, const std::map<std::string, std::string>& prefixes,
                       const std::string& path) {
    if (value.is_string()) {
        return kg::make_string_literal(value.get<std::string>());
    }
    if (value.is_number_integer()) {
        return kg::make_integer_literal(value.get<std::int64_t>());
    }
    if (value.is_number_float()) {
        fail(path, "floating-point literals must be written as {\"lit\": ..., \"type\": "
                   "\"xsd:decimal\"} to keep their lexical form");
    }
    if (value.is_object()) {
        if (const json* iri = opt_member(value, "iri")) {
            return parse_iri(as_string(*iri, path + ".iri"), prefixes, path + ".iri");
        }
        if (const json* lit = opt_member(value, "lit")) {
            const std::string lexical = as_string(*lit, path + ".lit", /*allow_empty=*/true);
            const json* lang = opt_member(value, "lang");
            const json* type = opt_member(value, "type");
            if (lang && type) {
                fail(path, "a literal carries either a language tag or a datatype, not both");
            }
            if (lang) {
                return kg::make_lang_literal(lexical, as_string(*lang, path + ".lang"));
            }
            if (type) {
                return kg::make_typed_literal(
                    lexical, parse_iri(as_string(*type, path + ".type"), prefixes, path + ".type"));
            }
            return kg::make_string_literal(lexical);
        }
        fail(path, "object terms need an \"iri\" or \"lit\" field");
    }
    fail(path, "expected a string, integer, or term object");
}

kg::TBox parse_tbox(const json& value, const std::map<std::string, std::string>& prefixes,
                    const std::string& path) {
    kg::TBox tbox;
    as_object(value, path);
    if (const json* classes = opt_member(value, "classes")) {
        const auto& arr = as_array(*classes, path + ".classes");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string cpath = idx(path + ".classes", i);
            const auto& entry = as_object(arr[i], cpath);
            const kg::Iri iri =
                parse_iri(as_string(member(entry, "iri", cpath), cpath + ".iri"), prefixes,
                          cpath + ".iri");
            std::string label;
            if (const json* l = opt_member(entry, "label")) {
                label = as_string(*l, cpath + ".label");
            }
            tbox.classes[iri] = label;
        }
    }
    if (const json* edges = opt_member(value, "subclass_of")) {
        const auto& arr = as_array(*edges, path + ".subclass_of");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string epath = idx(path + ".subclass_of", i);
            const auto& pair = as_array(arr[i], epath);
            if (pair.size() != 2) {
                fail(epath, "expected [child, parent]");
            }
            tbox.subclass_edges.insert(
                {parse_iri(as_string(pair[0], epath + "[0]"), prefixes, epath + "[0]"),
                 parse_iri(as_string(pair[1], epath + "[1]"), prefixes, epath + "[1]")});
        }
    }
    if (const json* properties = opt_member(value, "properties")) {
        const auto& arr = as_array(*properties, path + ".properties");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string ppath = idx(path + ".properties", i);
            const auto& entry = as_object(arr[i], ppath);
            const kg::Iri iri = parse_iri(as_string(member(entry, "iri", ppath), ppath + ".iri"),
                                          prefixes, ppath + ".iri");
            tbox.properties[iri] = kg::PropertyDecl{
                parse_iri(as_string(member(entry, "domain", ppath), ppath + ".domain"), prefixes,
                          ppath + ".domain"),
                parse_iri(as_string(member(entry, "range", ppath), ppath + ".range"), prefixes,
                          ppath + ".range")};
        }
    }
    return tbox;
}

std::pair<std::vector<kg::Triple>, std::vector<EncodingTask>> parse_tagged_triples(
    const json& value, const std::map<std::string, std::string>& prefixes,
    const std::string& path) {
    std::vector<kg::Triple> triples;
    std::vector<EncodingTask> tasks;
    const auto& arr = as_array(value, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string tpath = idx(path, i);
        const auto& entry = as_object(arr[i], tpath);
        kg::Triple triple;
        triple.subject = parse_iri(as_string(member(entry, "s", tpath), tpath + ".s"), prefixes,
                                   tpath + ".s");
        const std::string predicate = as_string(member(entry, "p", tpath), tpath + ".p");
        triple.predicate =
            predicate == "a" ? kg::rdf_type() : parse_iri(predicate, prefixes, tpath + ".p");
        triple.object = parse_term(member(entry, "o", tpath), prefixes, tpath + ".o");
        triples.push_back(std::move(triple));

        const std::string code = as_string(member(entry, "task", tpath), tpath + ".task");
        if (code.size() != 1) {
            fail(tpath + ".task", "expected \"A\", \"B\" or \"C\"");
        }
        try {
            tasks.push_back(task_from_code(code[0]));
        } catch (const std::invalid_argument&) {
            fail(tpath + ".task", "expected \"A\", \"B\" or \"C\"");
        }
    }
    return {std::move(triples), std::move(tasks)};
}

namespace {

Proposal parse_proposal(const json& value, const std::string& perspective_id,
                        const std::string& path) {
    const auto& entry = as_object(value, path);
    Proposal proposal;
    proposal.perspective_id = perspective_id;
    proposal.interpretation =
        as_string(member(entry, "interpretation", path), path + ".interpretation");
    proposal.relevance_claim = as_string(member(entry, "claim", path), path + ".claim");
    const auto& cites = as_array(member(entry, "cites", path), path + ".cites");
    for (std::size_t i = 0; i < cites.size(); ++i) {
        proposal.supporting_encodings.push_back(as_string(cites[i], idx(path + ".cites", i)));
    }
    if (proposal.supporting_encodings.empty()) {
        fail(path + ".cites", "a proposal must cite at least one encoding");
    }
    return proposal;
}

std::vector<Attack> parse_attacks(const json& value, const std::string& attacker,
                                  const std::string& path) {
    std::vector<Attack> attacks;
    const auto& arr = as_array(value, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string apath = idx(path, i);
        const auto& entry = as_object(arr[i], apath);
        Attack attack;
        attack.attacker = attacker;
        attack.target = as_string(member(entry, "target", apath), apath + ".target");
        attack.justification =
            as_string(member(entry, "justification", apath), apath + ".justification");
        attacks.push_back(std::move(attack));
    }
    return attacks;
}

ScriptedFixture parse_fixture(const json& value, const std::string& perspective_id,
                              const std::map<std::string, std::string>& prefixes,
                              const std::string& path) {
    ScriptedFixture fixture;
    const auto& entry = as_object(value, path);
    if (const json* observations = opt_member(entry, "observations")) {
        for (const auto& [obs_id, record_json] :
             as_object(*observations, path + ".observations").items()) {
            const std::string rpath = path + ".observations." + obs_id;
            const auto& record = as_object(record_json, rpath);
            ScriptedObservationRecord out;
            out.relevant = as_bool(member(record, "relevant", rpath), rpath + ".relevant");
            out.rationale = as_string(member(record, "rationale", rpath), rpath + ".rationale");
            if (const json* delta = opt_member(record, "tbox_delta")) {
                out.tbox_delta = parse_tbox(*delta, prefixes, rpath + ".tbox_delta");
            }
            if (const json* triples = opt_member(record, "triples")) {
                std::tie(out.triples, out.tasks) =
                    parse_tagged_triples(*triples, prefixes, rpath + ".triples");
            }
            if (out.relevant && out.triples.empty()) {
                fail(rpath, "a relevant observation needs at least one triple");
            }
            fixture.observations[obs_id] = std::move(out);
        }
    }
    if (const json* queries = opt_member(entry, "queries")) {
        for (const auto& [query_id, record_json] :
             as_object(*queries, path + ".queries").items()) {
            const std::string qpath = path + ".queries." + query_id;
            const auto& record = as_object(record_json, qpath);
            ScriptedQueryRecord out;
            if (const json* proposal = opt_member(record, "proposal")) {
                out.proposal = parse_proposal(*proposal, perspective_id, qpath + ".proposal");
            }
            if (const json* attacks = opt_member(record, "attacks")) {
                out.attacks = parse_attacks(*attacks, perspective_id, qpath + ".attacks");
            }
            fixture.queries[query_id] = std::move(out);
        }
    }
    return fixture;
}

RuleSet parse_rules(const json& value, const std::map<std::string, std::string>& prefixes,
                    const std::string& path) {
    RuleSet rules;
    const auto& entry = as_object(value, path);
    if (const json* keywords = opt_member(entry, "relevance_keywords")) {
        const auto& arr = as_array(*keywords, path + ".relevance_keywords");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            rules.relevance_keywords.push_back(
                as_string(arr[i], idx(path + ".relevance_keywords", i)));
        }
    }
    if (const json* encoding_rules = opt_member(entry, "encoding_rules")) {
        const auto& arr = as_array(*encoding_rules, path + ".encoding_rules");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string rpath = idx(path + ".encoding_rules", i);
            const auto& rule_json = as_object(arr[i], rpath);
            EncodingRule rule;
            if (const json* kw = opt_member(rule_json, "keywords")) {
                const auto& kwarr = as_array(*kw, rpath + ".keywords");
                for (std::size_t k = 0; k < kwarr.size(); ++k) {
                    rule.keywords.push_back(as_string(kwarr[k], idx(rpath + ".keywords", k)));
                }
            }
            std::tie(rule.triple_templates, rule.tasks) = parse_tagged_triples(
                member(rule_json, "triples", rpath), prefixes, rpath + ".triples");
            rules.encoding_rules.push_back(std::move(rule));
        }
    }
    if (const json* proposals = opt_member(entry, "proposals")) {
        for (const auto& [decision_type, tmpl_json] :
             as_object(*proposals, path + ".proposals").items()) {
            const std::string tpath = path + ".proposals." + decision_type;
            const auto& tmpl = as_object(tmpl_json, tpath);
            rules.proposals_by_decision_type[decision_type] = RuleProposalTemplate{
                as_string(member(tmpl, "interpretation", tpath), tpath + ".interpretation"),
                as_string(member(tmpl, "claim", tpath), tpath + ".claim")};
        }
    }
    if (const json* critiques = opt_member(entry, "critiques")) {
        for (const auto& [decision_type, attacks_json] :
             as_object(*critiques, path + ".critiques").items()) {
            rules.critiques_by_decision_type[decision_type] =
                parse_attacks(attacks_json, "", path + ".critiques." + decision_type);
        }
    }
    return rules;
}

GoldenExpectations parse_expected(const json& value, const Scenario& scenario,
                                  const std::string& path) {
    GoldenExpectations expected;
    const auto& entry = as_object(value, path);

    std::set<std::string> observation_ids;
    for (const auto& o : scenario.observations) {
        observation_ids.insert(o.id);
    }
    std::set<std::string> perspective_ids;
    for (const auto& p : scenario.perspectives) {
        perspective_ids.insert(p.config.id);
    }

    if (const json* encoding = opt_member(entry, "encoding")) {
        const std::string epath = path + ".encoding";
        const auto& enc = as_object(*encoding, epath);
        for (const auto& [obs_id, row_json] :
             as_object(member(enc, "matrix", epath), epath + ".matrix").items()) {
            if (!observation_ids.count(obs_id)) {
                fail(epath + ".matrix." + obs_id, "references an undeclared observation");
            }
            for (const auto& [pid, flag] :
                 as_object(row_json, epath + ".matrix." + obs_id).items()) {
                if (!perspective_ids.count(pid)) {
                    fail(epath + ".matrix." + obs_id + "." + pid,
                         "references an undeclared perspective");
                }
                expected.matrix[obs_id][pid] =
                    as_bool(flag, epath + ".matrix." + obs_id + "." + pid);
            }
        }
        for (const auto& [pid, count] :
             as_object(member(enc, "totals", epath), epath + ".totals").items()) {
            if (!perspective_ids.count(pid)) {
                fail(epath + ".totals." + pid, "references an undeclared perspective");
            }
            expected.totals[pid] = static_cast<int>(as_int(count, epath + ".totals." + pid));
        }
        expected.total = static_cast<int>(as_int(member(enc, "total", epath), epath + ".total"));
    }

    if (const json* queries = opt_member(entry, "queries")) {
        for (const auto& [query_id, record_json] :
             as_object(*queries, path + ".queries").items()) {
            const std::string qpath = path + ".queries." + query_id;
            if (scenario.find_query(query_id) == nullptr) {
                fail(qpath, "references an undeclared query");
            }
            const auto& record = as_object(record_json, qpath);
            GoldenQueryExpectation out;
            const auto& attacks = as_array(member(record, "attacks", qpath), qpath + ".attacks");
            for (std::size_t i = 0; i < attacks.size(); ++i) {
                const std::string apath = idx(qpath + ".attacks", i);
                const auto& pair = as_array(attacks[i], apath);
                if (pair.size() != 2) {
                    fail(apath, "expected [attacker, target]");
                }
                out.attacks.insert({as_string(pair[0], apath + "[0]"),
                                    as_string(pair[1], apath + "[1]")});
            }
            const auto& grounded =
                as_array(member(record, "grounded", qpath), qpath + ".grounded");
            for (std::size_t i = 0; i < grounded.size(); ++i) {
                out.grounded.insert(as_string(grounded[i], idx(qpath + ".grounded", i)));
            }
            out.mode = as_string(member(record, "mode", qpath), qpath + ".mode");
            if (const json* detail = opt_member(record, "detail")) {
                out.detail = as_string(*detail, qpath + ".detail");
            }
            if (const json* preferred = opt_member(record, "preferred")) {
                std::set<std::set<std::string>> sets;
                const auto& arr = as_array(*preferred, qpath + ".preferred");
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    const std::string ppath = idx(qpath + ".preferred", i);
                    std::set<std::string> ext;
                    const auto& members = as_array(arr[i], ppath);
                    for (std::size_t k = 0; k < members.size(); ++k) {
                        ext.insert(as_string(members[k], idx(ppath, k)));
                    }
                    sets.insert(std::move(ext));
                }
                out.preferred = std::move(sets);
            }
            expected.queries[query_id] = std::move(out);
        }
    }
    return expected;
}

}  // namespace

const ScenarioQuery* Scenario::find_query(const std::string& id) const {
    for (const auto& q : queries) {
        if (q.id == id) {
            return &q;
        }
    }
    return nullptr;
}

const PerspectiveSpec* Scenario::find_perspective(const std::string& id) const {
    for (const auto& p : perspectives) {
        if (p.config.id == id) {
            return &p;
        }
    }
    return nullptr;
}

std::string Scenario::observation_label(const std::string& id) const {
    for (const auto& o : observations) {
        if (o.id == id) {
            auto it = o.source.find("label");
            if (it != o.source.end()) {
                return it->second;
            }
            return o.content.size() > 48 ? o.content.substr(0, 45) + "..." : o.content;
        }
    }
    return id;
}

Scenario parse_scenario(const json& document) {
    Scenario scenario;
    as_object(document, "scenario");
    scenario.name = as_string(member(document, "name", "scenario"), "name");

    if (const json* prefixes = opt_member(document, "prefixes")) {
        for (const auto& [name, base] : as_object(*prefixes, "prefixes").items()) {
            scenario.prefixes[name] = as_string(base, "prefixes." + name);
        }
    }
    if (const json* ttl = opt_member(document, "buffer_ttl")) {
        scenario.buffer_ttl = as_int(*ttl, "buffer_ttl");
    }

    const auto& observations = as_array(member(document, "observations", "scenario"),
                                        "observations");
    std::set<std::string> observation_ids;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const std::string opath = idx("observations", i);
        const auto& entry = as_object(observations[i], opath);
        Observation observation;
        observation.id = as_string(member(entry, "id", opath), opath + ".id");
        observation.timestamp = as_int(member(entry, "timestamp", opath), opath + ".timestamp");
        observation.content = as_string(member(entry, "content", opath), opath + ".content");
        if (const json* source = opt_member(entry, "source")) {
            for (const auto& [k, v] : as_object(*source, opath + ".source").items()) {
                observation.source[k] = as_string(v, opath + ".source." + k);
            }
        }
        if (!observation_ids.insert(observation.id).second) {
            fail(opath + ".id", "duplicate observation id '" + observation.id + "'");
        }
        scenario.observations.push_back(std::move(observation));
    }

    const auto& queries = as_array(member(document, "queries", "scenario"), "queries");
    std::set<std::string> query_ids;
    std::set<std::string> query_texts;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const std::string qpath = idx("queries", i);
        const auto& entry = as_object(queries[i], qpath);
        ScenarioQuery query;
        query.id = as_string(member(entry, "id", qpath), qpath + ".id");
        query.ctx.query = as_string(member(entry, "query", qpath), qpath + ".query");
        if (const json* querier = opt_member(entry, "querier")) {
            query.ctx.querier = as_string(*querier, qpath + ".querier");
        }
        if (const json* decision_type = opt_member(entry, "decision_type")) {
            query.ctx.decision_type = as_string(*decision_type, qpath + ".decision_type");
        }
        if (const json* priorities = opt_member(entry, "priorities")) {
            const auto& arr = as_array(*priorities, qpath + ".priorities");
            for (std::size_t k = 0; k < arr.size(); ++k) {
                query.ctx.priorities.push_back(as_string(arr[k], idx(qpath + ".priorities", k)));
            }
        }
        if (!query_ids.insert(query.id).second) {
            fail(qpath + ".id", "duplicate query id '" + query.id + "'");
        }
        if (!query_texts.insert(query.ctx.query).second) {
            fail(qpath + ".query", "duplicate query text (scripted fixtures key on it)");
        }
        scenario.queries.push_back(std::move(query));
    }

    const auto& perspectives = as_array(member(document, "perspectives", "scenario"),
                                        "perspectives");
    std::set<std::string> perspective_ids;
    for (std::size_t i = 0; i < perspectives.size(); ++i) {
        const std::string ppath = idx("perspectives", i);
        const auto& entry = as_object(perspectives[i], ppath);
        PerspectiveSpec spec;
        spec.config.id = as_string(member(entry, "id", ppath), ppath + ".id");
        spec.config.display_name = spec.config.id;
        if (const json* name = opt_member(entry, "name")) {
            spec.config.display_name = as_string(*name, ppath + ".name");
        }
        spec.config.goal_statement = as_string(member(entry, "goal", ppath), ppath + ".goal");
        const std::string backend = as_string(member(entry, "backend", ppath), ppath + ".backend");
        if (backend == "scripted") {
            spec.config.backend = BackendKind::Scripted;
        } else if (backend == "rules") {
            spec.config.backend = BackendKind::RuleBased;
        } else if (backend == "external") {
            spec.config.backend = BackendKind::External;
        } else {
            fail(ppath + ".backend", "expected \"scripted\", \"rules\" or \"external\"");
        }
        if (const json* seed = opt_member(entry, "seed_tbox")) {
            spec.config.seed_tbox = parse_tbox(*seed, scenario.prefixes, ppath + ".seed_tbox");
            try {
                kg::validate_tbox(spec.config.seed_tbox);
            } catch (const Error& e) {
                fail(ppath + ".seed_tbox", e.what());
            }
        }
        if (const json* fixture = opt_member(entry, "fixture")) {
            spec.fixture = parse_fixture(*fixture, spec.config.id, scenario.prefixes,
                                         ppath + ".fixture");
            for (const auto& q : scenario.queries) {
                spec.fixture->query_id_by_text[q.ctx.query] = q.id;
            }
            for (const auto& [query_id, record] : spec.fixture->queries) {
                if (!query_ids.count(query_id)) {
                    fail(ppath + ".fixture.queries." + query_id,
                         "references an undeclared query");
                }
            }
        }
        if (const json* rules = opt_member(entry, "rules")) {
            spec.rules = parse_rules(*rules, scenario.prefixes, ppath + ".rules");
        }
        if (const json* endpoint = opt_member(entry, "endpoint")) {
            const std::string epath = ppath + ".endpoint";
            ExternalEndpoint out;
            out.url = as_string(member(*endpoint, "url", epath), epath + ".url");
            if (const json* timeout = opt_member(*endpoint, "timeout_ms")) {
                out.timeout_ms = static_cast<int>(as_int(*timeout, epath + ".timeout_ms"));
            }
            spec.endpoint = out;
        }
        if (!perspective_ids.insert(spec.config.id).second) {
            fail(ppath + ".id", "duplicate perspective id '" + spec.config.id + "'");
        }
        scenario.perspectives.push_back(std::move(spec));
    }

    if (const json* expected = opt_member(document, "expected")) {
        scenario.expected = parse_expected(*expected, scenario, "expected");
    }
    return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file '" + path.string() + "'");
    }
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_scenario(document);
    } catch (const ScenarioError& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
}

}  // namespace agora
