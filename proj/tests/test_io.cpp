#include "support.hpp"

#include <gtest/gtest.h>

using namespace bundlex;

namespace {

const char* kFourAgents = R"({
  "agents": ["1", "2", "3", "4"],
  "endowments": {"1": ["o"], "2": ["p"], "3": ["q1", "q2"], "4": ["r"]},
  "preferences": {
    "1": {"attractive": ["q1"], "bearable": ["o", "r"]},
    "2": {"attractive": ["q1"], "bearable": ["p", "r"]},
    "3": {"attractive": ["o", "p"], "bearable": ["q1", "q2"]},
    "4": {"attractive": ["q2"], "bearable": ["r"]}
  },
  "meta": {"source": "hand"}
})";

Document parse(const std::string& text) { return document_from_json(parse_json_text(text, "test")); }

}  // namespace

TEST(Io, ParsesTrichotomousDocument) {
    auto doc = parse(kFourAgents);
    EXPECT_EQ(doc.instance.num_agents(), 4u);
    EXPECT_EQ(doc.instance.num_objects(), 5u);
    ASSERT_TRUE(doc.trichotomous);
    ASSERT_TRUE(doc.marginal);
    EXPECT_EQ((*doc.trichotomous)[2].attractive, doc.instance.objects_named({"o", "p"}));
    EXPECT_EQ(doc.meta["source"], "hand");
}

TEST(Io, RoundTrip) {
    auto doc = parse(kFourAgents);
    auto j = document_to_json(doc);
    auto again = document_from_json(j);
    EXPECT_EQ(document_to_json(again), j);
    EXPECT_EQ(j["objects"], Json::parse(R"(["o", "p", "q1", "q2", "r"])"));
}

TEST(Io, ClassesFormWithImplicitLastClass) {
    auto doc = parse(R"({
      "agents": ["1", "2"],
      "endowments": {"1": ["o1", "o2"], "2": ["p1", "p2"]},
      "preferences": {"1": {"classes": [["o1"], ["p1"], ["p2"]]}, "2": {"classes": [["o1"], ["p1"], ["p2"], ["o2"]]}}
    })");
    ASSERT_TRUE(doc.marginal);
    const auto& p = (*doc.marginal)[0];
    EXPECT_EQ(p.num_classes(), 4u);
    EXPECT_EQ(p.rank(doc.instance.object("o2")), 3u);
    EXPECT_EQ(p, (*doc.marginal)[1]);
    // o2 sits in the fourth class, so no trichotomous view exists
    EXPECT_FALSE(doc.trichotomous);
}

TEST(Io, ClassesThatAreTrichotomousGetBothViews) {
    auto doc = parse(R"({
      "agents": ["1", "2"],
      "endowments": {"1": ["a"], "2": ["b"]},
      "preferences": {"1": {"classes": [["b"], ["a"]]}, "2": {"attractive": ["a", "b"]}}
    })");
    ASSERT_TRUE(doc.trichotomous);
    EXPECT_EQ((*doc.trichotomous)[0].attractive, doc.instance.objects_named({"b"}));
    EXPECT_EQ((*doc.trichotomous)[1].bearable, doc.instance.empty_set());
}

TEST(Io, Rejections) {
    EXPECT_THROW(parse("{"), input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]}, "extra": 1})"), input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"]})"), input_error);
    EXPECT_THROW(parse(R"({"agents": "1", "endowments": {}})"), input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]}, "preferences": {}})"), input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"classes": [["a"]], "attractive": []}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"attractive": ["a", "a"]}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"attractive": ["zz"]}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"attractive": [], "bearable": []}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"bearable": ["a"]}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a", "b"]},
                         "preferences": {"1": {"classes": [["a"], ["a", "b"]]}}})"),
                 input_error);
    EXPECT_THROW(parse(R"({"agents": ["1"], "endowments": {"1": ["a"]},
                         "preferences": {"1": {"attractive": ["a"]}, "2": {"attractive": ["a", "b"]}}})"),
                 input_error);
    EXPECT_THROW(read_document("/nonexistent/file.json"), input_error);
}

TEST(Io, MatchingJson) {
    auto doc = parse(kFourAgents);
    const auto& inst = doc.instance;
    auto m = Matching::endowment(inst);
    auto j = matching_to_json(inst, m);
    EXPECT_EQ(j["3"], Json::parse(R"(["q1", "q2"])"));
    EXPECT_EQ(matching_from_json(inst, j), m);
    j.erase("4");
    EXPECT_THROW(matching_from_json(inst, j), input_error);
    auto bad = Json::parse(R"({"1": ["p"], "2": ["p"], "3": ["q1", "q2"], "4": ["r"]})");
    EXPECT_THROW(matching_from_json(inst, bad), input_error);
}

TEST(Io, Rationals) {
    EXPECT_EQ(rational_to_string(Rational(3)), "3");
    EXPECT_EQ(rational_to_string(Rational(-7, 3)), "-7/3");
    EXPECT_EQ(rational_to_string(Rational(2, 4)), "1/2");
}

TEST(Io, TraceJsonShape) {
    auto doc = parse(kFourAgents);
    auto r = run_ir_priority(doc.instance, *doc.trichotomous);
    auto j = trace_to_json(doc.instance, r.trace);
    ASSERT_EQ(j["rounds"].size(), 3u);
    EXPECT_TRUE(j["rounds"][0]["promises"].is_null());
    EXPECT_EQ(j["rounds"][1]["non_improvable"], Json::parse(R"(["1", "2"])"));
    EXPECT_EQ(j["elicited_at"]["3"], 2);
    EXPECT_EQ(j["final"]["3"], Json::parse(R"(["o", "p"])"));
    EXPECT_EQ(j["final_promises"]["3"], 2);
    EXPECT_EQ(j["flow_queries"], 16);
}

TEST(Io, CycleJson) {
    auto doc = parse(kFourAgents);
    const auto& inst = doc.instance;
    auto c = make_cycle(Matching::endowment(inst), {{0, inst.object("p")}, {1, inst.object("o")}});
    auto j = cycle_to_json(inst, c);
    EXPECT_EQ(j, Json::parse(R"([{"agent": "1", "receives": "p"}, {"agent": "2", "receives": "o"}])"));
}

TEST(Generator, DeterministicAndValid) {
    GeneratorConfig cfg;
    cfg.agents = 6;
    cfg.max_endowment = 3;
    cfg.seed = 12;
    auto a = document_to_json(generate_document(cfg));
    auto b = document_to_json(generate_document(cfg));
    EXPECT_EQ(a, b);
    auto doc = document_from_json(a);
    EXPECT_EQ(doc.instance.num_agents(), 6u);
    ASSERT_TRUE(doc.trichotomous);
    check_profile(doc.instance, *doc.trichotomous);
    cfg.seed = 13;
    EXPECT_NE(document_to_json(generate_document(cfg)), a);
}

TEST(Generator, FixedObjectCountAndStrongly) {
    GeneratorConfig cfg;
    cfg.agents = 5;
    cfg.total_objects = 17;
    cfg.strongly = true;
    auto doc = generate_document(cfg);
    EXPECT_EQ(doc.instance.num_objects(), 17u);
    for (AgentIndex i = 0; i < 5; ++i) {
        EXPECT_GE(doc.instance.quota(i), 1u);
        EXPECT_EQ(classify_domain(to_marginal((*doc.trichotomous)[i]), doc.instance.endowment(i)).kind,
                  DomainKind::strongly_trichotomous);
    }
}
