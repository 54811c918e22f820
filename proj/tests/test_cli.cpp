#include <doctest/doctest.h>

#include <atomic>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "coral/trace.hpp"
#include "coral/util.hpp"
#include "temp_dir.hpp"

using namespace coral;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the installed binary with stdout/stderr captured to scratch files.
CliResult run_cli(const coral_test::TempDir& dir, const std::string& args) {
    static std::atomic<int> counter{0};
    const int n = counter.fetch_add(1);
    const auto out_path = dir.path / ("cli_out_" + std::to_string(n));
    const auto err_path = dir.path / ("cli_err_" + std::to_string(n));
    const std::string cmd = std::string(CORAL_BIN) + " " + args + " > " + out_path.string() +
                            " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file_bytes(out_path);
    result.err = read_file_bytes(err_path);
    return result;
}

std::string fixture_path() {
    return (std::filesystem::path(CORAL_SOURCE_DIR) / "fixtures" / "two_iter.json").string();
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
    coral_test::TempDir dir;
    CHECK(run_cli(dir, "").exit_code == 2);
    CHECK(run_cli(dir, "frobnicate").exit_code == 2);
    CHECK(run_cli(dir, "eval --dataset wiki --data x").exit_code == 2);
    CHECK(run_cli(dir, "--help").exit_code == 0);
    CHECK(run_cli(dir, "simulate --help").exit_code == 0);
}

TEST_CASE("runtime failures exit with 1 and a one-line diagnostic") {
    coral_test::TempDir dir;
    const auto script = dir.path / "empty.json";
    write_file_bytes(script, "[]");
    const CliResult bad_method =
        run_cli(dir, "run --query q --method super_rag --script " + script.string() +
                         " --store " + (dir.path / "s").string() + " --index " +
                         (dir.path / "i").string());
    CHECK(bad_method.exit_code == 1);
    CHECK(contains(bad_method.err, "error: unknown method 'super_rag'"));

    const CliResult missing = run_cli(dir, "simulate --script " + (dir.path / "nope.json").string());
    CHECK(missing.exit_code == 1);
    CHECK(contains(missing.err, "error: "));

    // No chat endpoint configured and no script: refuse to run.
    const CliResult no_backend = run_cli(dir, "run --query q --store " + (dir.path / "s").string() +
                                                  " --index " + (dir.path / "i").string());
    CHECK(no_backend.exit_code == 1);
    CHECK(contains(no_backend.err, "chat.base_url"));
}

TEST_CASE("the two-round fixture replays through the simulate subcommand") {
    coral_test::TempDir dir;
    const auto trace_path = dir.path / "trace.json";
    const CliResult result =
        run_cli(dir, "simulate --script " + fixture_path() + " --trace-out " + trace_path.string());
    CHECK(result.exit_code == 0);
    CHECK(contains(result.out, "method: coral"));
    CHECK(contains(result.out, "answer: B"));
    CHECK(contains(result.out, "iterations: 2"));

    const TraceFile trace = read_trace(trace_path);
    CHECK(trace.run.answer == 'B');
    CHECK(trace.run.trace.size() == 2);
    CHECK(trace.config.at("embedding").at("dim") == 64);
}

TEST_CASE("ingest, index, and a scripted run work end to end") {
    coral_test::TempDir dir;
    const auto store = (dir.path / "store").string();
    const auto index = (dir.path / "index").string();

    const auto docs = dir.path / "docs.jsonl";
    write_file_bytes(docs, std::string(R"({"id": "d1", "text": "kimchi is fermented cabbage"})") +
                               "\n" +
                               R"({"id": "d2", "text": "bibimbap is mixed rice"})" + "\n");
    const CliResult ingested =
        run_cli(dir, "ingest --store " + store + " --lang ko --input " + docs.string());
    CHECK(ingested.exit_code == 0);
    CHECK(contains(ingested.out, "ingested ko: 2 docs, 2 chunks"));

    const CliResult indexed = run_cli(dir, "index --store " + store + " --index " + index);
    CHECK(indexed.exit_code == 0);
    CHECK(contains(indexed.out, "indexed ko: 2 rows"));

    const auto script = dir.path / "exchanges.json";
    const json exchanges = json::array(
        {{{"role", "generator"}, {"match", "kimchi"}, {"reply", "It is kimchi.\nAnswer: D"}}});
    write_file_bytes(script, exchanges.dump());
    const auto trace_path = dir.path / "run_trace.json";
    const CliResult ran = run_cli(
        dir, "run --query kimchi --method mono_rag --query-lang ko --store " + store + " --index " +
                 index + " --script " + script.string() + " --trace-out " + trace_path.string());
    CHECK(ran.exit_code == 0);
    CHECK(contains(ran.out, "method: mono_rag"));
    CHECK(contains(ran.out, "answer: D"));
    CHECK(read_trace(trace_path).run.retrieval_hits.size() == 2);
}

TEST_CASE("scripted eval replays the transcript per instance and writes a report") {
    coral_test::TempDir dir;
    const json data = json::array({
        {{"id", "b1"},
         {"language", "ko"},
         {"country", "South Korea"},
         {"question", "pick one"},
         {"options", {{"A", "right"}, {"B", "wrong"}}},
         {"answer", "A"}},
        {{"id", "b2"},
         {"language", "en"},
         {"country", "US"},
         {"question", "pick again"},
         {"options", {{"A", "first"}, {"B", "second"}}},
         {"answer", "B"}},
    });
    const auto data_path = dir.path / "blend.json";
    write_file_bytes(data_path, data.dump());

    const auto script = dir.path / "gen.json";
    write_file_bytes(script,
                     json::array({{{"role", "generator"}, {"reply", "Answer: A"}}}).dump());

    const auto report_path = dir.path / "report.json";
    const auto trace_dir = dir.path / "traces";
    const CliResult evaluated = run_cli(
        dir, "eval --dataset blend --data " + data_path.string() + " --method non_rag --script " +
                 script.string() + " --store " + (dir.path / "s").string() + " --index " +
                 (dir.path / "i").string() + " --out " + report_path.string() + " --trace-dir " +
                 trace_dir.string());
    CHECK(evaluated.exit_code == 0);
    CHECK(contains(evaluated.out, "non_rag/blend"));
    CHECK(contains(evaluated.out, "overall accuracy"));
    CHECK(std::filesystem::exists(trace_dir / "b1.json"));
    CHECK(std::filesystem::exists(trace_dir / "b2.json"));
    CHECK(read_trace(trace_dir / "b2.json").run.uid == "b2");

    const json report = json::parse(read_file_bytes(report_path));
    CHECK(report.at("total") == 2);
    CHECK(report.at("correct") == 1); // scripted 'A' matches b1 only
    CHECK(report.at("overall_accuracy") == 0.5);

    // --limit cuts the instance list before running.
    const CliResult limited = run_cli(
        dir, "eval --dataset blend --data " + data_path.string() + " --method non_rag --script " +
                 script.string() + " --store " + (dir.path / "s").string() + " --index " +
                 (dir.path / "i").string() + " --limit 1");
    CHECK(limited.exit_code == 0);
    CHECK(contains(limited.out, "100.0"));

    const CliResult rendered = run_cli(dir, "report --in " + report_path.string() + " --in " +
                                                report_path.string());
    CHECK(rendered.exit_code == 0);
    CHECK(contains(rendered.out, "non_rag/blend  non_rag/blend"));
}
