#include <doctest/doctest.h>

#include <nlohmann/json.hpp>

#include "coral/errors.hpp"
#include "coral/simulate.hpp"
#include "coral/trace.hpp"
#include "temp_dir.hpp"

using namespace coral;
using nlohmann::json;

namespace {

json minimal_script() {
    return {
        {"query", "q"},
        {"method", "non_rag"},
        {"exchanges", json::array({{{"role", "generator"}, {"reply", "Answer: A"}}})},
    };
}

} // namespace

TEST_CASE("simulation scripts parse strictly") {
    const SimulationScript script = simulation_from_json(minimal_script());
    CHECK(script.query == "q");
    CHECK(script.method == "non_rag");
    CHECK(script.query_lang == Lang::en);
    CHECK(script.exchanges.size() == 1);
    CHECK(script.require_exhausted);

    CHECK_THROWS_WITH_AS(simulation_from_json({{"query", "q"}, {"mode", "x"}}),
                         "mode: unknown key", ConfigError);
    CHECK_THROWS_AS(simulation_from_json({{"method", "coral"}}), ConfigError); // query missing
    CHECK_THROWS_AS(simulation_from_json({{"query", "q"}, {"method", "super_rag"}}), ConfigError);
    CHECK_THROWS_AS(simulation_from_json({{"query", "q"}, {"query_lang", "xx"}}), ConfigError);
    CHECK_THROWS_AS(simulation_from_json({{"query", "q"}, {"scope", {"yy"}}}), ConfigError);
    CHECK_THROWS_AS(
        simulation_from_json({{"query", "q"}, {"corpora", {{"ko", {{{"body", "x"}}}}}}}),
        ConfigError);
    CHECK_THROWS_AS(
        simulation_from_json({{"query", "q"}, {"config", {{"loop", {{"bogus", 1}}}}}}),
        ConfigError);
    CHECK_THROWS_AS(simulation_from_json(json::array()), ConfigError);
}

TEST_CASE("a scripted baseline simulation runs against inline corpora") {
    json j = {
        {"query", "kimchi"},
        {"query_lang", "ko"},
        {"method", "mono_rag"},
        {"corpora", {{"ko", {{{"id", "d1"}, {"text", "kimchi is fermented cabbage"}}}}}},
        {"exchanges",
         json::array({{{"role", "generator"},
                       {"match", "kimchi is fermented cabbage"},
                       {"reply", "Answer: C"}}})},
    };
    coral_test::TempDir dir;
    const RunResult run = run_simulation(simulation_from_json(j), dir.path / "w");
    CHECK(run.method == "mono_rag");
    CHECK(run.answer == 'C');
    REQUIRE(run.retrieval_hits.size() == 1);
    CHECK(run.retrieval_hits[0].chunk_id == "d1#0000");
    CHECK(run.evidence_used.size() == 1);
}

TEST_CASE("leftover exchanges fail the run unless waived") {
    json j = minimal_script();
    j["exchanges"].push_back({{"role", "generator"}, {"reply", "never consumed"}});
    coral_test::TempDir dir;
    CHECK_THROWS_AS(run_simulation(simulation_from_json(j), dir.path / "a"), ScriptError);

    j["require_exhausted"] = false;
    CHECK(run_simulation(simulation_from_json(j), dir.path / "b").answer == 'A');
}

TEST_CASE("results do not depend on where the scratch directory lives") {
    json j = {
        {"query", "harvest"},
        {"method", "multi_rag"},
        {"config", {{"embedding", {{"dim", 64}}}, {"loop", {{"final_k", 2}}}}},
        {"corpora",
         {{"ko", {{{"id", "k1"}, {"text", "harvest rites"}}}},
          {"en", {{{"id", "e1"}, {"text", "harvest festival"}}}}}},
        {"exchanges", json::array({{{"role", "generator"}, {"reply", "Answer: B"}}})},
    };
    const SimulationScript script = simulation_from_json(j);
    coral_test::TempDir first;
    coral_test::TempDir second;
    const RunResult a = run_simulation(script, first.path / "deep" / "nest");
    const RunResult b = run_simulation(script, second.path / "flat");
    CHECK(a == b);
    CHECK(run_to_json(a) == run_to_json(b));
}

TEST_CASE("the checked-in two-round fixture replays through the simulator") {
    const SimulationScript script =
        load_simulation(std::filesystem::path(CORAL_SOURCE_DIR) / "fixtures" / "two_iter.json");
    coral_test::TempDir dir;
    const RunResult run = run_simulation(script, dir.path / "w");
    CHECK(run.method == "coral");
    CHECK(run.answer == 'B');
    CHECK(run.iterations_run == 2);
    REQUIRE(run.trace.size() == 2);
    CHECK(run.trace[1].plan.rewritten_query == "festival date and foods");
    CHECK(run.evidence_used.size() == 2);
}
