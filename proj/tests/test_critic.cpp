#include <doctest/doctest.h>

#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "coral/critic.hpp"
#include "coral/util.hpp"

using namespace coral;
using nlohmann::json;

namespace {

Chunk make_chunk(const std::string& id, Lang lang, const std::string& text) {
    Chunk chunk;
    chunk.chunk_id = id;
    chunk.doc_id = id.substr(0, id.find('#'));
    chunk.lang = lang;
    chunk.text = text;
    chunk.span = {0, text.size()};
    return chunk;
}

AgentGateway make_gateway(const json& script, std::shared_ptr<ScriptedBackend>* out = nullptr) {
    auto backend = std::make_shared<ScriptedBackend>(ScriptedBackend::parse_exchanges(script));
    if (out != nullptr) {
        *out = backend;
    }
    return AgentGateway(backend);
}

EvidenceItem make_item(const std::string& id, CriterionScores scores, int iteration,
                       Lang lang = Lang::en) {
    EvidenceItem item;
    item.chunk_id = id;
    item.lang = lang;
    item.text = "text for " + id;
    item.scores = scores;
    item.s_tot_x2 = total_score_x2(scores);
    item.critique = "c";
    item.found_iteration = iteration;
    item.retrieval_rank = 1;
    return item;
}

} // namespace

TEST_CASE("aggregate score matches the weighted definition on all 1296 tuples") {
    int checked = 0;
    for (int r = 0; r <= 5; ++r) {
        for (int u = 0; u <= 5; ++u) {
            for (int s = 0; s <= 5; ++s) {
                for (int c = 0; c <= 5; ++c) {
                    const CriterionScores scores{r, u, s, c};
                    const int x2 = total_score_x2(scores);
                    REQUIRE(x2 == 2 * r + u + s + c);

                    // Floating-point oracle for the same definition.
                    const double s_tot = r + 0.5 * (u + s + c);
                    REQUIRE(std::abs(x2 / 2.0 - s_tot) == 0.0);

                    const bool expect_valid =
                        r >= 2 && u >= 2 && s >= 2 && c >= 2 && s_tot >= 6.0;
                    REQUIRE(is_valid(scores) == expect_valid);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked == 1296);
}

TEST_CASE("half-point rendering of aggregate scores") {
    CHECK(format_half_points(total_score_x2({3, 4, 4, 4})) == "9.0");
    CHECK(format_half_points(total_score_x2({4, 2, 2, 2})) == "7.0");
    CHECK(format_half_points(total_score_x2({5, 5, 5, 4})) == "12.0");
    CHECK(format_half_points(total_score_x2({2, 2, 2, 3})) == "5.5");
}

TEST_CASE("custom weights and thresholds change totals and validity") {
    const ScoreWeightsX2 flat{2, 2, 2, 2};
    CHECK(total_score_x2({1, 2, 3, 4}, flat) == 20);

    // total_min 7.0 keeps (3,4,4,4) = 9.0 valid and drops (2,2,2,2) = 5.0.
    const ValidityThresholds strict{2, 14};
    CHECK(is_valid({3, 4, 4, 4}, {}, strict));
    CHECK_FALSE(is_valid({2, 2, 2, 2}, {}, strict));
    CHECK_FALSE(is_valid({5, 5, 5, 1}, {}, strict)); // floor violation despite 10.5
}

TEST_CASE("score_document parses scores and records the query") {
    const json script = json::array({{{"role", "critic"},
                                      {"match", "photosynthesis"},
                                      {"reply_json",
                                       {{"scores",
                                         {{"relevance", 4},
                                          {"usefulness", 3},
                                          {"clarity_specificity", 5},
                                          {"compatibility", 2}}},
                                        {"critique", "covers the mechanism directly"}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const Chunk chunk = make_chunk("bio#0001", Lang::ko, "photosynthesis converts light");
    const Critique result = critic.score_document("how does photosynthesis work", chunk, 2, &flags);

    CHECK(result.scores == CriterionScores{4, 3, 5, 2});
    CHECK(result.text == "covers the mechanism directly");
    CHECK(result.chunk_id == "bio#0001");
    CHECK(result.doc_text == chunk.text);
    CHECK(result.query_used == "how does photosynthesis work");
    CHECK(result.lang == Lang::ko);
    CHECK(result.retrieval_rank == 2);
    CHECK_FALSE(result.clamped);
    CHECK_FALSE(result.unparsable);
    CHECK(flags.empty());
}

TEST_CASE("score_document clamps out-of-range and missing values") {
    const json script = json::array(
        {{{"reply_json",
           {{"scores", {{"relevance", 7}, {"usefulness", -1}, {"clarity_specificity", 3.5}}},
            {"critique", "odd"}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const Critique result =
        critic.score_document("q", make_chunk("d#0000", Lang::en, "body"), 1, &flags);

    CHECK(result.scores.relevance == 5);
    CHECK(result.scores.usefulness == 0);
    CHECK(result.scores.clarity_specificity == 4); // rounded half away from zero
    CHECK(result.scores.compatibility == 0);       // missing
    CHECK(result.clamped);
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "critic_scores_clamped:d#0000");
}

TEST_CASE("score_document survives parse exhaustion with an invalid zero critique") {
    const json script = json::array({{{"reply", "no json here"}},
                                     {{"reply", "still prose"}},
                                     {{"reply", "resolutely not an object"}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const Critique result =
        critic.score_document("q", make_chunk("d#0001", Lang::ar, "body"), 3, &flags);

    CHECK(result.unparsable);
    CHECK(result.scores == CriterionScores{0, 0, 0, 0});
    CHECK(result.text == "unparsable");
    CHECK_FALSE(is_valid(result.scores));
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "critic_unparsable:d#0001");
}

TEST_CASE("score_document flags an empty critique") {
    const json script = json::array(
        {{{"reply_json",
           {{"scores",
             {{"relevance", 3},
              {"usefulness", 3},
              {"clarity_specificity", 3},
              {"compatibility", 3}}}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const Critique result =
        critic.score_document("q", make_chunk("d#0002", Lang::en, "body"), 1, &flags);
    CHECK_FALSE(result.clamped);
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "critic_empty_critique:d#0002");
}

TEST_CASE("pool_evidence keeps only valid critiques") {
    auto gateway = make_gateway(json::array());
    CriticEngine critic(gateway);

    Critique valid;
    valid.chunk_id = "a#0000";
    valid.doc_text = "good";
    valid.scores = {3, 4, 4, 4};
    valid.lang = Lang::ko;
    valid.retrieval_rank = 1;

    Critique floor_fail = valid;
    floor_fail.chunk_id = "b#0000";
    floor_fail.scores = {5, 5, 5, 1};

    Critique total_fail = valid;
    total_fail.chunk_id = "c#0000";
    total_fail.scores = {2, 2, 2, 3}; // 5.5 < 6.0

    Critique unparsed = valid;
    unparsed.chunk_id = "d#0000";
    unparsed.unparsable = true;

    std::vector<EvidenceItem> pool;
    critic.pool_evidence(pool, {valid, floor_fail, total_fail, unparsed}, 1);

    REQUIRE(pool.size() == 1);
    CHECK(pool[0].chunk_id == "a#0000");
    CHECK(pool[0].s_tot_x2 == 18);
    CHECK(pool[0].text == "good");
    CHECK(pool[0].found_iteration == 1);
}

TEST_CASE("pool_evidence dedup keeps the higher aggregate; ties keep the earlier find") {
    auto gateway = make_gateway(json::array());
    CriticEngine critic(gateway);

    Critique first;
    first.chunk_id = "a#0000";
    first.doc_text = "t";
    first.scores = {3, 4, 4, 4}; // 9.0
    first.text = "first take";

    std::vector<EvidenceItem> pool;
    critic.pool_evidence(pool, {first}, 1);
    REQUIRE(pool.size() == 1);

    SUBCASE("higher rescore replaces scores, critique, and iteration") {
        Critique better = first;
        better.scores = {5, 4, 4, 4}; // 11.0
        better.text = "second take";
        critic.pool_evidence(pool, {better}, 2);
        REQUIRE(pool.size() == 1);
        CHECK(pool[0].s_tot_x2 == 22);
        CHECK(pool[0].critique == "second take");
        CHECK(pool[0].found_iteration == 2);
    }

    SUBCASE("lower rescore is discarded") {
        Critique worse = first;
        worse.scores = {2, 4, 4, 4}; // 8.0
        critic.pool_evidence(pool, {worse}, 2);
        REQUIRE(pool.size() == 1);
        CHECK(pool[0].s_tot_x2 == 18);
        CHECK(pool[0].found_iteration == 1);
    }

    SUBCASE("equal rescore keeps the earlier iteration") {
        Critique same = first;
        same.text = "later equal take";
        critic.pool_evidence(pool, {same}, 2);
        REQUIRE(pool.size() == 1);
        CHECK(pool[0].found_iteration == 1);
        CHECK(pool[0].critique == "first take");
    }

    SUBCASE("repooling the identical batch is idempotent") {
        std::vector<EvidenceItem> before = pool;
        critic.pool_evidence(pool, {first}, 1);
        CHECK(pool == before);
    }
}

TEST_CASE("pool ordering walks every tie-break level") {
    std::vector<EvidenceItem> pool;
    pool.push_back(make_item("z#0000", {3, 4, 4, 4}, 1)); // 9.0, rel 3
    pool.push_back(make_item("y#0000", {4, 4, 4, 2}, 1)); // 9.0, rel 4
    pool.push_back(make_item("x#0000", {5, 4, 4, 4}, 2)); // 11.0
    pool.push_back(make_item("b#0000", {3, 4, 4, 4}, 2)); // 9.0, rel 3, iter 2
    pool.push_back(make_item("a#0000", {3, 4, 4, 4}, 2)); // 9.0, rel 3, iter 2

    sort_pool(pool);

    REQUIRE(pool.size() == 5);
    CHECK(pool[0].chunk_id == "x#0000"); // highest total
    CHECK(pool[1].chunk_id == "y#0000"); // tie total, higher relevance
    CHECK(pool[2].chunk_id == "z#0000"); // tie, earlier iteration
    CHECK(pool[3].chunk_id == "a#0000"); // tie, chunk id ascending
    CHECK(pool[4].chunk_id == "b#0000");
}

TEST_CASE("serialize_pool renders numbered blocks with scores and critique") {
    EvidenceItem item = make_item("a#0000", {3, 4, 4, 4}, 1, Lang::ko);
    item.text = "the content";
    item.critique = "solid coverage";

    CHECK(serialize_pool({item}) ==
          "[1] content: the content\n"
          "scores: relevance=3, usefulness=4, clarity_specificity=4, compatibility=4, "
          "s_tot=9.0\n"
          "critique: solid coverage");
    CHECK(serialize_pool({}) == "No documents were retrieved.");

    EvidenceItem second = make_item("b#0000", {4, 2, 2, 2}, 1);
    second.text = "more";
    second.critique = "partial";
    const std::string two = serialize_pool({item, second});
    CHECK(two.find("[1] content: the content") != std::string::npos);
    CHECK(two.find("\n\n[2] content: more") != std::string::npos);
    CHECK(two.find("s_tot=7.0") != std::string::npos);
}

TEST_CASE("judge_sufficiency parses the decision and sees the pool and the user query") {
    const json script = json::array({{{"role", "sufficiency"},
                                      {"match", "original question"},
                                      {"reply_json",
                                       {{"enough_documents", false},
                                        {"reason", "needs coverage of the other region"}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const auto decision =
        critic.judge_sufficiency("original question", {make_item("a#0000", {3, 4, 4, 4}, 1)}, &flags);
    CHECK_FALSE(decision.enough);
    CHECK(decision.reason == "needs coverage of the other region");
    CHECK(flags.empty());
}

TEST_CASE("judge_sufficiency prompt carries the serialized pool") {
    const json script = json::array(
        {{{"match", "s_tot=9.0"}, {"reply_json", {{"enough_documents", true}, {"reason", "ok"}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    const auto decision = critic.judge_sufficiency("q", {make_item("a#0000", {3, 4, 4, 4}, 1)});
    CHECK(decision.enough);
}

TEST_CASE("judge_sufficiency substitutes a reason when continuing without one") {
    const json script =
        json::array({{{"reply_json", {{"enough_documents", false}, {"reason", ""}}}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const auto decision = critic.judge_sufficiency("q", {}, &flags);
    CHECK_FALSE(decision.enough);
    CHECK(decision.reason == "No reason was given for requesting more documents.");
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "sufficiency_missing_reason");
}

TEST_CASE("judge_sufficiency parse exhaustion terminates the loop") {
    const json script = json::array({{{"reply", "beats me"}},
                                     {{"reply", "[1, 2]"}},
                                     {{"reply", "{\"enough_documents\": \"yes\"}"}}});
    auto gateway = make_gateway(script);
    CriticEngine critic(gateway);

    std::vector<std::string> flags;
    const auto decision = critic.judge_sufficiency("q", {}, &flags);
    CHECK(decision.enough);
    CHECK(decision.reason == "(sufficiency judgment unparsable; accepting current evidence)");
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "sufficiency_unparsable");
}

TEST_CASE("select_final returns the ordered prefix") {
    auto gateway = make_gateway(json::array());
    CriticEngine critic(gateway);

    std::vector<EvidenceItem> pool;
    pool.push_back(make_item("c#0000", {3, 4, 4, 4}, 1));
    pool.push_back(make_item("a#0000", {5, 4, 4, 4}, 1));
    pool.push_back(make_item("b#0000", {4, 4, 4, 4}, 1));

    const auto top2 = critic.select_final(pool, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].chunk_id == "a#0000");
    CHECK(top2[1].chunk_id == "b#0000");

    const auto all = critic.select_final(pool, 10);
    CHECK(all.size() == 3);

    // Prefix property: select_final(n) is the first n of select_final(n+1).
    for (std::size_t n = 0; n < pool.size(); ++n) {
        const auto shorter = critic.select_final(pool, n);
        const auto longer = critic.select_final(pool, n + 1);
        REQUIRE(shorter.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(shorter[i] == longer[i]);
        }
    }
}
