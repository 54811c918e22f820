#include <doctest/doctest.h>

#include <memory>

#include <nlohmann/json.hpp>

#include "coral/baselines.hpp"
#include "coral/embedding.hpp"
#include "coral/errors.hpp"
#include "temp_dir.hpp"

using namespace coral;
using nlohmann::json;

namespace {

struct BaselineRig {
    coral_test::TempDir tmp;
    CorpusStore store;
    VectorIndex index;
    std::shared_ptr<ScriptedBackend> backend;
    AgentGateway gateway;

    explicit BaselineRig(const json& script)
        : store(tmp.path / "store"),
          index(tmp.path / "index", std::make_shared<HashedNgramEmbedder>(64)),
          backend(std::make_shared<ScriptedBackend>(ScriptedBackend::parse_exchanges(script))),
          gateway(backend) {
        store.ingest_documents(Lang::ko,
                               {{"k1", Lang::ko, "", "kimchi fermentation with napa cabbage", {}},
                                {"k2", Lang::ko, "", "hanbok garments worn at ceremonies", {}}},
                               ChunkPolicy{});
        store.ingest_documents(Lang::en,
                               {{"e1", Lang::en, "", "fermentation of cabbage makes kimchi", {}},
                                {"e2", Lang::en, "", "orbital mechanics of small moons", {}}},
                               ChunkPolicy{});
        store.ingest_documents(Lang::ar,
                               {{"a1", Lang::ar, "", "couscous steamed over broth", {}},
                                {"a2", Lang::ar, "", "calligraphy traditions and scripts", {}}},
                               ChunkPolicy{});
        index.build_shard(store, Lang::ko);
        index.build_shard(store, Lang::en);
        index.build_shard(store, Lang::ar);
    }

    BaselinePipeline pipeline(LoopConfig config = {}) {
        return BaselinePipeline(store, index, gateway, config);
    }

    std::vector<float> embed(const std::string& text) { return index.embed_batch({text})[0]; }
};

json generator_exchange(const char* reply, const char* match = nullptr) {
    json e{{"role", "generator"}, {"reply", reply}};
    if (match != nullptr) {
        e["match"] = match;
    }
    return e;
}

} // namespace

TEST_CASE("baseline names round-trip") {
    for (int i = 0; i < 6; ++i) {
        const auto kind = static_cast<BaselineKind>(i);
        CHECK(parse_baseline(baseline_name(kind)) == kind);
    }
    CHECK_FALSE(parse_baseline("coral").has_value());
    CHECK_FALSE(parse_baseline("").has_value());
}

TEST_CASE("non_rag generates from the no-documents line alone") {
    BaselineRig rig(json::array(
        {generator_exchange("Answer: B", "No relevant documents were retrieved.")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::non_rag;
    const RunResult run = pipeline.run("what is kimchi", spec);

    CHECK(run.method == "non_rag");
    CHECK(run.scope.empty());
    CHECK(run.retrieval_hits.empty());
    CHECK(run.evidence_used.empty());
    CHECK(run.trace.empty());
    CHECK(run.iterations_run == 0);
    CHECK(run.answer == 'B');
    CHECK(rig.backend->exhausted());
}

TEST_CASE("mono_rag retrieves only from the query language's corpus") {
    BaselineRig rig(json::array({generator_exchange("Answer: A", "(ko)")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::mono_rag;
    spec.query_lang = Lang::ko;
    const RunResult run = pipeline.run("kimchi fermentation", spec);

    CHECK(run.scope == std::vector<Lang>{Lang::ko});
    REQUIRE_FALSE(run.retrieval_hits.empty());
    for (const ScoredHit& hit : run.retrieval_hits) {
        CHECK(hit.lang == Lang::ko);
    }
    REQUIRE(run.evidence_used.size() == run.retrieval_hits.size());
    CHECK(run.evidence_used[0].text ==
          rig.store.find_chunk(Lang::ko, run.retrieval_hits[0].chunk_id)->text);
    CHECK(run.answer == 'A');
}

TEST_CASE("t_rag retrieves with the translated query but generates with the original") {
    const json script = json::array({
        {{"role", "translator"},
         {"match",
          "Translate the following text into English. Output only the translation.\n\n"
          "kimchi balhyo"}},
        generator_exchange("Answer: C", "kimchi balhyo"), // original query, not the translation
    });
    // Fill in the translator reply.
    json fixed = script;
    fixed[0]["reply"] = "kimchi fermentation cabbage";
    BaselineRig rig(fixed);
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::t_rag;
    spec.query_lang = Lang::ko;
    const RunResult run = pipeline.run("kimchi balhyo", spec);

    CHECK(run.scope == std::vector<Lang>{Lang::en});
    CHECK(run.retrieval_query == "kimchi fermentation cabbage");
    for (const ScoredHit& hit : run.retrieval_hits) {
        CHECK(hit.lang == Lang::en);
    }

    // Hits must equal a direct pooled search with the translated text.
    const auto expected =
        rig.index.search_pooled(rig.embed("kimchi fermentation cabbage"), {Lang::en}, 5);
    REQUIRE(run.retrieval_hits.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(run.retrieval_hits[i].chunk_id == expected[i].chunk_id);
        CHECK(run.retrieval_hits[i].score == expected[i].score);
    }
    CHECK(run.answer == 'C');
    CHECK(rig.backend->exhausted());
}

TEST_CASE("multi_rag pools across every indexed corpus") {
    BaselineRig rig(json::array({generator_exchange("Answer: D")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::multi_rag;
    spec.query_lang = Lang::ko;
    const RunResult run = pipeline.run("fermentation of cabbage", spec);

    CHECK(run.scope == std::vector<Lang>{Lang::ar, Lang::en, Lang::ko});
    const auto expected = rig.index.search_pooled(rig.embed("fermentation of cabbage"), 5);
    REQUIRE(run.retrieval_hits.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(run.retrieval_hits[i].chunk_id == expected[i].chunk_id);
        CHECK(run.retrieval_hits[i].lang == expected[i].lang);
    }
    CHECK(run.answer == 'D');
}

TEST_CASE("cross_rag translates each selected chunk after ranking") {
    LoopConfig config;
    config.final_k = 3;

    // Ranking is embedding-determined; replies T1..T3 land in pooled order.
    const json script = json::array({
        {{"role", "translator"}, {"reply", "T1"}},
        {{"role", "translator"}, {"reply", "T2"}},
        {{"role", "translator"}, {"reply", "T3"}},
        generator_exchange("Answer: E", "[3] ("),
    });
    BaselineRig rig(script);
    auto pipeline = rig.pipeline(config);

    BaselineSpec spec;
    spec.kind = BaselineKind::cross_rag;
    const RunResult run = pipeline.run("traditions", spec);

    // Same ranking as multi_rag: translation happens after selection.
    const auto expected = rig.index.search_pooled(rig.embed("traditions"), 3);
    REQUIRE(run.retrieval_hits.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(run.retrieval_hits[i].chunk_id == expected[i].chunk_id);
    }
    REQUIRE(run.evidence_used.size() == 3);
    CHECK(run.evidence_used[0].text == "T1");
    CHECK(run.evidence_used[1].text == "T2");
    CHECK(run.evidence_used[2].text == "T3");
    CHECK(run.answer == 'E');
    CHECK(rig.backend->exhausted());
}

TEST_CASE("fixed_scope pools over the chosen corpora only") {
    BaselineRig rig(json::array({generator_exchange("Answer: A")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::fixed_scope;
    spec.scope = {Lang::ko, Lang::ar};
    const RunResult run = pipeline.run("ceremonies", spec);

    CHECK(run.scope == std::vector<Lang>{Lang::ko, Lang::ar});
    for (const ScoredHit& hit : run.retrieval_hits) {
        CHECK((hit.lang == Lang::ko || hit.lang == Lang::ar));
    }
    const auto expected =
        rig.index.search_pooled(rig.embed("ceremonies"), {Lang::ko, Lang::ar}, 5);
    REQUIRE(run.retrieval_hits.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(run.retrieval_hits[i].chunk_id == expected[i].chunk_id);
    }
    CHECK(run.answer == 'A');
}

TEST_CASE("fixed_scope over the full pool matches multi_rag hit for hit") {
    const std::string query = "fermentation of cabbage makes";

    BaselineRig rig_multi(json::array({generator_exchange("Answer: A")}));
    auto multi = rig_multi.pipeline();
    BaselineSpec multi_spec;
    multi_spec.kind = BaselineKind::multi_rag;
    const RunResult multi_run = multi.run(query, multi_spec);

    BaselineRig rig_fixed(json::array({generator_exchange("Answer: A")}));
    auto fixed = rig_fixed.pipeline();
    BaselineSpec fixed_spec;
    fixed_spec.kind = BaselineKind::fixed_scope;
    fixed_spec.scope = all_langs();
    const RunResult fixed_run = fixed.run(query, fixed_spec);

    REQUIRE(multi_run.retrieval_hits.size() == fixed_run.retrieval_hits.size());
    for (std::size_t i = 0; i < multi_run.retrieval_hits.size(); ++i) {
        CHECK(multi_run.retrieval_hits[i].chunk_id == fixed_run.retrieval_hits[i].chunk_id);
        CHECK(multi_run.retrieval_hits[i].lang == fixed_run.retrieval_hits[i].lang);
        CHECK(multi_run.retrieval_hits[i].score == fixed_run.retrieval_hits[i].score);
    }
}

TEST_CASE("fixed_scope requires a scope") {
    BaselineRig rig(json::array());
    auto pipeline = rig.pipeline();
    BaselineSpec spec;
    spec.kind = BaselineKind::fixed_scope;
    CHECK_THROWS_AS(pipeline.run("q", spec), ConfigError);
}

TEST_CASE("translate short-circuits on empty text and flags failures") {
    BaselineRig rig(json::array());
    auto pipeline = rig.pipeline();

    std::vector<std::string> flags;
    CHECK(pipeline.translate("", Lang::en, &flags).empty());
    CHECK(flags.empty());
    CHECK(rig.backend->consumed() == 0);

    // The exhausted script makes the call fail; the text passes through.
    CHECK(pipeline.translate("texte original", Lang::en, &flags) == "texte original");
    REQUIRE(flags.size() == 1);
    CHECK(flags[0] == "translation_failed");
}

TEST_CASE("scopes missing shards degrade to the available ones") {
    BaselineRig rig(json::array({generator_exchange("Answer: B")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::fixed_scope;
    spec.scope = {Lang::am, Lang::ko};
    const RunResult run = pipeline.run("ceremonies", spec);

    CHECK(std::count(run.flags.begin(), run.flags.end(), "no_shard_for:am") == 1);
    for (const ScoredHit& hit : run.retrieval_hits) {
        CHECK(hit.lang == Lang::ko);
    }
    CHECK(run.answer == 'B');
}

TEST_CASE("mono_rag with no shard for the query language answers without evidence") {
    BaselineRig rig(json::array(
        {generator_exchange("Answer: C", "No relevant documents were retrieved.")}));
    auto pipeline = rig.pipeline();

    BaselineSpec spec;
    spec.kind = BaselineKind::mono_rag;
    spec.query_lang = Lang::am;
    const RunResult run = pipeline.run("q", spec);

    CHECK(run.retrieval_hits.empty());
    CHECK(run.evidence_used.empty());
    CHECK(run.answer == 'C');
}
