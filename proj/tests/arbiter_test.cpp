#include "agora/arbiter.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace agora;
using fixtures::ex;

namespace {

const char* kJustRiskOnRel =
    "Trust levels and reciprocity dynamics do not constitute exposure in the compliance sense.";
const char* kJustRiskOnFin =
    "Margin impact is a financial performance metric, not an exposure assessment.";
const char* kJustFinOnRel =
    "Relationship framing omits the quantified margin impact this query requires.";
const char* kJustRelOnRisk =
    "Treating the decision as a compliance exercise risks alienating the client.";
const char* kJustRelOnFin =
    "Margin recovery alone undermines the partnership repair this decision needs.";
const char* kJustFinOnRisk =
    "A compliance-first agenda defers margin recovery by another quarter.";

struct QuerySpec {
    std::string id;
    std::string text;
    std::string decision_type;
    bool proposes = true;
    std::vector<Attack> attacks;
};

// Builds one perspective: three observations (o1..o3) with the given
// relevance column, plus scripted query records.
std::unique_ptr<Perspective> make_perspective(const std::string& id, const std::string& name,
                                              const kg::TBox& seed, const kg::Iri& event_class,
                                              const std::map<std::string, bool>& relevant,
                                              const std::vector<QuerySpec>& queries) {
    PerspectiveConfig config;
    config.id = id;
    config.display_name = name;
    config.goal_statement = "Serve the " + name + " agenda.";
    config.seed_tbox = seed;
    config.backend = BackendKind::Scripted;

    ScriptedFixture fixture;
    for (const auto& [obs_id, is_relevant] : relevant) {
        ScriptedObservationRecord record;
        record.relevant = is_relevant;
        record.rationale = is_relevant ? "bears on the " + name + " goal"
                                       : "outside the " + name + " goal";
        if (is_relevant) {
            record.triples = {fixtures::type_triple(ex(obs_id + "-" + id), event_class)};
            record.tasks = {EncodingTask::TermTyping};
        }
        fixture.observations[obs_id] = record;
    }
    for (const auto& q : queries) {
        ScriptedQueryRecord record;
        if (q.proposes) {
            Proposal proposal;
            proposal.perspective_id = id;
            proposal.interpretation = name + " reading of the situation.";
            proposal.relevance_claim = name + " holds encodings that bear on this.";
            proposal.supporting_encodings = {id + "/o1/1"};
            record.proposal = proposal;
        }
        for (const auto& attack : q.attacks) {
            if (attack.attacker == id) {
                record.attacks.push_back(attack);
            }
        }
        fixture.queries[q.id] = record;
        fixture.query_id_by_text[q.text] = q.id;
    }
    return std::make_unique<Perspective>(config, std::make_shared<ScriptedBackend>(fixture),
                                         fixtures::prefixes());
}

std::vector<QuerySpec> standard_queries() {
    return {
        {"q-filtered",
         "Extend the arrangement?",
         "commitment",
         true,
         {Attack{"risk", "rel", kJustRiskOnRel}, Attack{"fin", "rel", kJustFinOnRel}}},
        {"q-complementary", "Was it a good move?", "evaluation", true, {}},
        {"q-selection",
         "Where do we stand on exposure?",
         "assessment",
         true,
         {Attack{"risk", "rel", kJustRiskOnRel}, Attack{"risk", "fin", kJustRiskOnFin},
          Attack{"fin", "rel", kJustFinOnRel}}},
        {"q-surfacing",
         "How should we prepare?",
         "planning",
         true,
         {Attack{"rel", "risk", kJustRelOnRisk}, Attack{"rel", "fin", kJustRelOnFin},
          Attack{"risk", "rel", kJustRiskOnRel}, Attack{"risk", "fin", kJustRiskOnFin},
          Attack{"fin", "rel", kJustFinOnRel}, Attack{"fin", "risk", kJustFinOnRisk}}},
    };
}

Observation obs(const std::string& id) { return Observation{id, 0, "content " + id, {}}; }

// Three perspectives; relevance matrix: o1 everyone, o2 rel+fin, o3 fin.
Arbiter make_arbiter(std::vector<QuerySpec> extra = {}, ArbiterConfig config = {}) {
    auto queries = standard_queries();
    queries.insert(queries.end(), extra.begin(), extra.end());
    Arbiter arbiter(config);
    arbiter.register_perspective(make_perspective(
        "rel", "Relationship Strategy", fixtures::relationship_seed(), ex("RelationshipEvent"),
        {{"o1", true}, {"o2", true}, {"o3", false}}, queries));
    arbiter.register_perspective(make_perspective(
        "risk", "Risk Management", fixtures::risk_seed(), ex("RiskEvent"),
        {{"o1", true}, {"o2", false}, {"o3", false}}, queries));
    arbiter.register_perspective(make_perspective(
        "fin", "Financial Planning", fixtures::financial_seed(), ex("FinancialEvent"),
        {{"o1", true}, {"o2", true}, {"o3", true}}, queries));
    return arbiter;
}

Arbiter encoded_arbiter(std::vector<QuerySpec> extra = {}, ArbiterConfig config = {}) {
    Arbiter arbiter = make_arbiter(std::move(extra), config);
    arbiter.run_encoding_cycle({obs("o1"), obs("o2"), obs("o3")});
    return arbiter;
}

QueryContext ctx_for(const std::string& text, const std::string& decision_type) {
    return QueryContext{text, "team", decision_type, {"priority-a"}};
}

}  // namespace

TEST(EncodingCycle, CountsAndTotals) {
    Arbiter arbiter = make_arbiter();
    const auto report = arbiter.run_encoding_cycle({obs("o1"), obs("o2"), obs("o3")});

    EXPECT_EQ(report.relevance_checks, 9);
    EXPECT_EQ(report.encode_calls, 6);
    EXPECT_EQ(report.encoded_total, 6);
    EXPECT_EQ(report.encoded_per_perspective.at("rel"), 2);
    EXPECT_EQ(report.encoded_per_perspective.at("risk"), 1);
    EXPECT_EQ(report.encoded_per_perspective.at("fin"), 3);
    EXPECT_EQ(report.observation_order, (std::vector<std::string>{"o1", "o2", "o3"}));
    EXPECT_EQ(report.perspective_order, (std::vector<std::string>{"rel", "risk", "fin"}));

    EXPECT_EQ(report.cell("o1", "rel").status, EncodingCell::Status::Encoded);
    EXPECT_EQ(report.cell("o1", "rel").encoding_id, "rel/o1/1");
    EXPECT_EQ(report.cell("o3", "rel").status, EncodingCell::Status::Skipped);
    EXPECT_FALSE(report.cell("o3", "rel").rationale.empty());
    EXPECT_FALSE(report.any_failures());

    // Everything acked by everyone: the cycle evicts the whole batch.
    EXPECT_EQ(report.evicted, (std::vector<std::string>{"o1", "o2", "o3"}));
    EXPECT_EQ(arbiter.buffer().live_count(), 0u);
}

TEST(EncodingCycle, ZeroPerspectivesYieldEmptyReport) {
    Arbiter arbiter;
    const auto report = arbiter.run_encoding_cycle({obs("o1")});
    EXPECT_EQ(report.relevance_checks, 0);
    EXPECT_EQ(report.encoded_total, 0);
    EXPECT_TRUE(report.cells.empty());
    EXPECT_TRUE(report.observation_order.empty());
}

TEST(EncodingCycle, FailuresAreRecordedAndIsolated) {
    // A perspective whose fixture claims relevance but encodes
    // vocabulary its terminology does not declare.
    std::vector<QuerySpec> queries;  // not used here
    Arbiter arbiter;
    PerspectiveConfig config;
    config.id = "bad";
    config.display_name = "Broken";
    config.goal_statement = "g";
    config.seed_tbox = fixtures::relationship_seed();
    ScriptedFixture fixture;
    ScriptedObservationRecord record;
    record.relevant = true;
    record.rationale = "claims relevance";
    record.triples = {fixtures::type_triple(ex("x"), ex("UndeclaredClass"))};
    record.tasks = {EncodingTask::TermTyping};
    fixture.observations["o1"] = record;
    arbiter.register_perspective(std::make_unique<Perspective>(
        config, std::make_shared<ScriptedBackend>(fixture), fixtures::prefixes()));
    arbiter.register_perspective(make_perspective("rel", "Relationship Strategy",
                                                  fixtures::relationship_seed(),
                                                  ex("RelationshipEvent"), {{"o1", true}}, {}));

    const auto report = arbiter.run_encoding_cycle({obs("o1")});
    EXPECT_TRUE(report.any_failures());
    EXPECT_EQ(report.cell("o1", "bad").status, EncodingCell::Status::Failed);
    EXPECT_NE(report.cell("o1", "bad").error.find("UndeclaredClass"), std::string::npos);
    EXPECT_EQ(report.cell("o1", "rel").status, EncodingCell::Status::Encoded);
    // Failed pairs are still acknowledged so the buffer can release.
    EXPECT_EQ(arbiter.buffer().live_count(), 0u);
}

TEST(EncodingCycle, MissingFixtureEntryFailsThePairLoudly) {
    Arbiter arbiter = make_arbiter();
    const auto report = arbiter.run_encoding_cycle({obs("o1"), obs("o9")});
    EXPECT_TRUE(report.any_failures());
    EXPECT_EQ(report.cell("o9", "rel").status, EncodingCell::Status::Failed);
    EXPECT_NE(report.cell("o9", "rel").error.find("fixture"), std::string::npos);
}

TEST(RunQuery, SelectionRound) {
    Arbiter arbiter = encoded_arbiter();
    const auto outcome = arbiter.run_query(ctx_for("Where do we stand on exposure?", "assessment"));

    EXPECT_EQ(outcome.proposals.size(), 3u);
    EXPECT_EQ(outcome.attacks.size(), 3u);
    EXPECT_EQ(outcome.grounded, af::Extension{"risk"});
    ASSERT_TRUE(outcome.mode.has_value());
    EXPECT_EQ(*outcome.mode, af::RetrievalMode::selection());
    EXPECT_FALSE(outcome.preferred.has_value());

    ASSERT_TRUE(outcome.response.primary.has_value());
    EXPECT_EQ(outcome.response.primary->perspective_id, "risk");
    EXPECT_EQ(outcome.response.primary->heading, "Risk Management");

    const auto& explanation = outcome.explanation;
    ASSERT_EQ(explanation.selected.size(), 1u);
    EXPECT_EQ(explanation.selected[0].perspective_id, "risk");
    ASSERT_EQ(explanation.rejected.size(), 2u);
    EXPECT_EQ(explanation.rejected[0].perspective_id, "rel");
    EXPECT_EQ(explanation.rejected[0].rejection_grounds.size(), 2u);  // risk and fin attack rel
    EXPECT_EQ(explanation.rejected[1].perspective_id, "fin");
    ASSERT_EQ(explanation.rejected[1].rejection_grounds.size(), 1u);

    EXPECT_NE(explanation.summary.find("This response is based on Risk Management's assessment."),
              std::string::npos);
    EXPECT_NE(explanation.summary.find(kJustRiskOnRel), std::string::npos);
    EXPECT_NE(explanation.summary.find(kJustRiskOnFin), std::string::npos);
    EXPECT_NE(explanation.summary.find("Neither perspective counterattacked."), std::string::npos);
    EXPECT_TRUE(outcome.warnings.empty());
}

TEST(RunQuery, SurfacingRound) {
    Arbiter arbiter = encoded_arbiter();
    const auto outcome = arbiter.run_query(ctx_for("How should we prepare?", "planning"));

    EXPECT_EQ(outcome.attacks.size(), 6u);
    EXPECT_TRUE(outcome.grounded.empty());
    EXPECT_EQ(*outcome.mode, af::RetrievalMode::surfacing());
    ASSERT_TRUE(outcome.preferred.has_value());
    EXPECT_EQ(outcome.preferred->size(), 3u);
    for (const auto& ext : *outcome.preferred) {
        EXPECT_EQ(ext.size(), 1u);
    }

    EXPECT_EQ(outcome.response.kind, "surfacing");
    EXPECT_EQ(outcome.response.sections.size(), 3u);
    EXPECT_EQ(outcome.response.conflict_statement,
              "Three strategic perspectives apply and they conflict.");

    const auto& explanation = outcome.explanation;
    EXPECT_TRUE(explanation.selected.empty());
    ASSERT_EQ(explanation.rejected.size(), 3u);
    for (const auto& entry : explanation.rejected) {
        EXPECT_EQ(entry.rejection_grounds.size(), 2u);  // two incoming edges each
        EXPECT_TRUE(entry.counterattacked);
    }
    EXPECT_NE(explanation.summary.find("Three strategic perspectives apply and they conflict."),
              std::string::npos);
    EXPECT_NE(explanation.summary.find(
                  "which strategic priority the team is currently optimizing for"),
              std::string::npos);
}

TEST(RunQuery, ComplementaryRound) {
    Arbiter arbiter = encoded_arbiter();
    const auto outcome = arbiter.run_query(ctx_for("Was it a good move?", "evaluation"));

    EXPECT_TRUE(outcome.attacks.empty());
    EXPECT_EQ(outcome.grounded, af::Extension({"rel", "risk", "fin"}));
    EXPECT_EQ(*outcome.mode, af::RetrievalMode::composition(af::CompositionDetail::Complementary));
    EXPECT_EQ(outcome.response.kind, "composition");
    ASSERT_EQ(outcome.response.sections.size(), 3u);
    EXPECT_EQ(outcome.response.sections[0].perspective_id, "rel");
    EXPECT_EQ(outcome.response.sections[1].perspective_id, "risk");
    EXPECT_EQ(outcome.response.sections[2].perspective_id, "fin");
    EXPECT_TRUE(outcome.explanation.rejected.empty());
    EXPECT_NE(outcome.explanation.summary.find(
                  "All three perspectives contributed complementary interpretations"),
              std::string::npos);
}

TEST(RunQuery, FilteredCompositionRound) {
    Arbiter arbiter = encoded_arbiter();
    const auto outcome = arbiter.run_query(ctx_for("Extend the arrangement?", "commitment"));

    EXPECT_EQ(outcome.attacks.size(), 2u);
    EXPECT_EQ(outcome.grounded, af::Extension({"risk", "fin"}));
    EXPECT_EQ(*outcome.mode, af::RetrievalMode::composition(af::CompositionDetail::Filtered));
    ASSERT_EQ(outcome.response.sections.size(), 2u);
    EXPECT_EQ(outcome.response.sections[0].perspective_id, "risk");
    EXPECT_EQ(outcome.response.sections[1].perspective_id, "fin");
    ASSERT_EQ(outcome.explanation.rejected.size(), 1u);
    EXPECT_EQ(outcome.explanation.rejected[0].perspective_id, "rel");
    EXPECT_FALSE(outcome.explanation.rejected[0].counterattacked);
    EXPECT_NE(outcome.explanation.summary.find("Relationship Strategy was also considered"),
              std::string::npos);
}

TEST(RunQuery, AbstentionShrinksTheRound) {
    std::vector<QuerySpec> extra{{"q-solo", "Only finance cares?", "analysis", true, {}}};
    // rel and risk abstain by fixture: override their record for q-solo.
    Arbiter arbiter;
    auto queries = standard_queries();
    QuerySpec solo_abstain{"q-solo", "Only finance cares?", "analysis", false, {}};
    QuerySpec solo_propose{"q-solo", "Only finance cares?", "analysis", true, {}};
    auto rel_queries = queries;
    rel_queries.push_back(solo_abstain);
    auto risk_queries = queries;
    risk_queries.push_back(solo_abstain);
    auto fin_queries = queries;
    fin_queries.push_back(solo_propose);
    arbiter.register_perspective(make_perspective(
        "rel", "Relationship Strategy", fixtures::relationship_seed(), ex("RelationshipEvent"),
        {{"o1", true}}, rel_queries));
    arbiter.register_perspective(make_perspective("risk", "Risk Management", fixtures::risk_seed(),
                                                  ex("RiskEvent"), {{"o1", true}}, risk_queries));
    arbiter.register_perspective(make_perspective("fin", "Financial Planning",
                                                  fixtures::financial_seed(), ex("FinancialEvent"),
                                                  {{"o1", true}}, fin_queries));
    arbiter.run_encoding_cycle({obs("o1")});

    const auto outcome = arbiter.run_query(ctx_for("Only finance cares?", "analysis"));
    ASSERT_EQ(outcome.proposals.size(), 1u);
    EXPECT_EQ(outcome.proposals[0].perspective_id, "fin");
    EXPECT_EQ(*outcome.mode, af::RetrievalMode::composition(af::CompositionDetail::Complementary));
    // A single proposer gets no critique call: 3 proposals + 0 + 1.
    EXPECT_EQ(outcome.invocations.propose_calls, 3);
    EXPECT_EQ(outcome.invocations.critique_calls, 0);
    EXPECT_EQ(outcome.invocations.total(), 4);
    EXPECT_NE(outcome.explanation.summary.find(
                  "Financial Planning was the only perspective to find the query relevant"),
              std::string::npos);
}

TEST(RunQuery, ZeroProposalsIsDistinctFromSurfacing) {
    QuerySpec silent{"q-silent", "Anyone?", "other", false, {}};
    Arbiter arbiter = encoded_arbiter({silent});
    const auto outcome = arbiter.run_query(ctx_for("Anyone?", "other"));

    EXPECT_TRUE(outcome.no_participants());
    EXPECT_FALSE(outcome.mode.has_value());
    EXPECT_EQ(outcome.response.kind, "none");
    EXPECT_EQ(outcome.explanation.summary, "No perspective found the query relevant.");
    EXPECT_EQ(outcome.invocations.total(), 4);  // 3 propose + 1 assembly
}

TEST(RunQuery, InvocationBudgetHolds) {
    Arbiter arbiter = encoded_arbiter();
    const int n = static_cast<int>(arbiter.perspective_count());
    for (const auto& [text, decision] :
         std::vector<std::pair<std::string, std::string>>{
             {"Extend the arrangement?", "commitment"},
             {"Was it a good move?", "evaluation"},
             {"Where do we stand on exposure?", "assessment"},
             {"How should we prepare?", "planning"}}) {
        const auto outcome = arbiter.run_query(ctx_for(text, decision));
        EXPECT_LE(outcome.invocations.total(), 2 * n + 1);
        EXPECT_EQ(outcome.invocations.total(), 7);  // 3 + 3 + 1 for full rounds
    }
    EXPECT_EQ(arbiter.stats().per_query.size(), 4u);
}

namespace {

// Backend that proposes normally but emits garbage attacks.
class RogueBackend : public PerspectiveBackend {
public:
    RelevanceDecision assess_relevance(const PerspectiveConfig&, const Observation&) override {
        return {true, "always relevant"};
    }
    EncodingResult encode(const PerspectiveConfig&, const Observation&,
                          const kg::PerspectiveGraph&) override {
        EncodingResult result;
        result.triples = {fixtures::type_triple(ex("e"), ex("RelationshipEvent"))};
        result.trace = build_task_trace(result.triples, {EncodingTask::TermTyping}, {});
        return result;
    }
    std::optional<Proposal> propose(const PerspectiveConfig& config, const QueryContext&,
                                    const kg::PerspectiveGraph& graph) override {
        Proposal p;
        p.perspective_id = config.id;
        p.interpretation = "Rogue reading.";
        p.relevance_claim = "Rogue claim.";
        p.supporting_encodings = {graph.encodings().begin()->first};
        return p;
    }
    std::vector<Attack> critique(const PerspectiveConfig& config, const QueryContext&,
                                 const std::optional<Proposal>&, const std::vector<Proposal>&,
                                 const kg::PerspectiveGraph&) override {
        return {
            Attack{config.id, config.id, "a self-attack that should be rejected outright"},
            Attack{config.id, "ghost", "an attack on a perspective that never proposed"},
            Attack{config.id, "rel", "too short"},
        };
    }
};

}  // namespace

TEST(RunQuery, InvalidAttacksAreDroppedWithWarnings) {
    Arbiter arbiter;
    PerspectiveConfig rogue_config;
    rogue_config.id = "rogue";
    rogue_config.display_name = "Rogue";
    rogue_config.goal_statement = "g";
    rogue_config.seed_tbox = fixtures::relationship_seed();
    arbiter.register_perspective(std::make_unique<Perspective>(
        rogue_config, std::make_shared<RogueBackend>(), fixtures::prefixes()));
    QuerySpec q{"q1", "Query?", "any", true, {}};
    arbiter.register_perspective(make_perspective("rel", "Relationship Strategy",
                                                  fixtures::relationship_seed(),
                                                  ex("RelationshipEvent"), {{"o1", true}}, {q}));
    arbiter.run_encoding_cycle({obs("o1")});

    const auto outcome = arbiter.run_query(QueryContext{"Query?", "team", "any", {}});
    EXPECT_TRUE(outcome.attacks.empty());
    EXPECT_EQ(outcome.graph.edge_count(), 0u);
    ASSERT_EQ(outcome.warnings.size(), 3u);
    EXPECT_NE(outcome.warnings[0].find("self-attack"), std::string::npos);
    EXPECT_NE(outcome.warnings[1].find("non-proposing"), std::string::npos);
    EXPECT_NE(outcome.warnings[2].find("justification shorter"), std::string::npos);
    // No self-attack ever enters the graph.
    EXPECT_FALSE(outcome.graph.has_attack("rogue", "rogue"));
}

TEST(RunQuery, FailedProposeBecomesAbstentionWithWarning) {
    // "missing fixture entry" surfaces as a warning, not a crash.
    Arbiter arbiter = encoded_arbiter();
    QueryContext ctx = ctx_for("Extend the arrangement?", "commitment");
    Arbiter partial;
    auto queries = standard_queries();
    partial.register_perspective(make_perspective(
        "rel", "Relationship Strategy", fixtures::relationship_seed(), ex("RelationshipEvent"),
        {{"o1", true}}, {}));  // no query fixtures at all
    partial.register_perspective(make_perspective("risk", "Risk Management", fixtures::risk_seed(),
                                                  ex("RiskEvent"), {{"o1", true}}, queries));
    partial.register_perspective(make_perspective("fin", "Financial Planning",
                                                  fixtures::financial_seed(), ex("FinancialEvent"),
                                                  {{"o1", true}}, queries));
    partial.run_encoding_cycle({obs("o1")});

    const auto outcome = partial.run_query(ctx);
    EXPECT_EQ(outcome.proposals.size(), 2u);
    ASSERT_FALSE(outcome.warnings.empty());
    EXPECT_NE(outcome.warnings[0].find("treated as abstention"), std::string::npos);
}

TEST(Curation, SurvivorsGainWeightThenEverythingDecays) {
    Arbiter arbiter = encoded_arbiter();
    // Selection round: risk survives citing risk/o1/1.
    arbiter.run_query(ctx_for("Where do we stand on exposure?", "assessment"));

    const auto& risk_graph = arbiter.perspective("risk").graph();
    const auto& rel_graph = arbiter.perspective("rel").graph();
    // cited + surviving: (1.0 + 1.0) * 0.95
    EXPECT_NEAR(risk_graph.encodings().at("risk/o1/1").importance_weight, 1.9, 1e-12);
    // defeated perspective's encodings only decay
    EXPECT_NEAR(rel_graph.encodings().at("rel/o1/1").importance_weight, 0.95, 1e-12);
    EXPECT_NEAR(rel_graph.encodings().at("rel/o2/1").importance_weight, 0.95, 1e-12);
}

TEST(Curation, DecayCadenceIsConfigurable) {
    ArbiterConfig config;
    config.decay_cadence = 0;  // disabled
    Arbiter arbiter = encoded_arbiter({}, config);
    arbiter.run_query(ctx_for("Was it a good move?", "evaluation"));
    // all three survive and cite their o1 encodings: bumped, not decayed
    EXPECT_NEAR(arbiter.perspective("rel").graph().encodings().at("rel/o1/1").importance_weight,
                2.0, 1e-12);
}

TEST(Determinism, RepeatedRunsAreStructurallyIdentical) {
    for (bool parallel : {true, false}) {
        ArbiterConfig config;
        config.parallel_phases = parallel;
        Arbiter a = encoded_arbiter({}, config);
        Arbiter b = encoded_arbiter({}, config);
        for (const auto& [text, decision] :
             std::vector<std::pair<std::string, std::string>>{
                 {"Extend the arrangement?", "commitment"},
                 {"Where do we stand on exposure?", "assessment"},
                 {"How should we prepare?", "planning"}}) {
            const auto oa = a.run_query(ctx_for(text, decision));
            const auto ob = b.run_query(ctx_for(text, decision));
            EXPECT_EQ(oa.proposals, ob.proposals);
            EXPECT_EQ(oa.attacks, ob.attacks);
            EXPECT_EQ(oa.graph, ob.graph);
            EXPECT_EQ(oa.grounded, ob.grounded);
            EXPECT_EQ(oa.mode, ob.mode);
            EXPECT_EQ(oa.explanation.summary, ob.explanation.summary);
            EXPECT_EQ(oa.warnings, ob.warnings);
        }
        EXPECT_EQ(a.perspective("rel").graph(), b.perspective("rel").graph());
    }
}

TEST(ComposeResponse, RejectsInconsistentInputs) {
    const Proposal p{"rel", "i", "c", {"rel/o1/1"}};
    const std::map<std::string, std::string> names;
    EXPECT_THROW(
        compose_response(af::RetrievalMode::selection(), {p, p}, {p, p}, std::nullopt, names),
        std::invalid_argument);
    EXPECT_THROW(compose_response(af::RetrievalMode::surfacing(), {p}, {p}, std::nullopt, names),
                 std::invalid_argument);
    EXPECT_THROW(
        compose_response(af::RetrievalMode::composition(af::CompositionDetail::Complementary), {},
                         {p}, std::nullopt, names),
        std::invalid_argument);
    EXPECT_THROW(compose_response(std::nullopt, {p}, {p}, std::nullopt, names),
                 std::invalid_argument);
}

TEST(RunQuery, RequiresPerspectivesAndQueryText) {
    Arbiter empty;
    EXPECT_THROW(empty.run_query(QueryContext{"q", "", "", {}}), std::invalid_argument);
    Arbiter arbiter = encoded_arbiter();
    EXPECT_THROW(arbiter.run_query(QueryContext{"", "", "", {}}), std::invalid_argument);
}
