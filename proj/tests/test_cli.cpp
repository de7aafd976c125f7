#include "codegenlink/cli.hpp"
#include "codegenlink/pipeline.hpp"

#include "corpora.hpp"
#include "fixture_web.hpp"

#include <doctest.h>

#include <sstream>

using namespace codegenlink;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = run_cli(args, out, err, [env](std::string_view name) -> std::optional<std::string> {
        if (auto it = env.find(std::string(name)); it != env.end()) return it->second;
        return std::nullopt;
    });
    r.out = out.str();
    r.err = err.str();
    return r;
}

const std::string kCode =
    "def fib(n):\n"
    "    a, b = 0, 1\n"
    "    for _ in range(n):\n"
    "        a, b = b, a + b\n"
    "    return a\n";

}  // namespace

TEST_CASE("similarity of a file with itself") {
    fixtures::TempDir dir("cli-sim");
    const auto f = dir.path() / "a.py";
    fixtures::write_text(f, kCode);
    const auto r = run({"similarity", f.string(), f.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "cloning_ratio: 1.000000\ncosine: 1.000000\n");
}

TEST_CASE("similarity of an empty file fails") {
    fixtures::TempDir dir("cli-empty");
    const auto f = dir.path() / "a.py";
    const auto e = dir.path() / "empty.py";
    fixtures::write_text(f, kCode);
    fixtures::write_text(e, "");
    const auto r = run({"similarity", f.string(), e.string()});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("EmptyInput") != std::string::npos);
    CHECK(run({"similarity", f.string(), (dir.path() / "missing.py").string()}).code == kExitFailure);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == kExitUsage);
    const auto unknown = run({"--bogus", "similarity", "a", "b"});
    CHECK(unknown.code == kExitUsage);
    CHECK(unknown.err.find("--bogus") != std::string::npos);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(run({"similarity", "only-one"}).code == kExitUsage);
    CHECK(run({"--clone-th", "1.5", "similarity", "a", "b"}).code == kExitUsage);
    CHECK(run({"--metrics", "jaccard", "similarity", "a", "b"}).code == kExitUsage);
    CHECK(run({"--provider", "magic", "license", "https://example.com/"}).code == kExitUsage);
    CHECK(run({"--html", "scan", "x.py"}).code == kExitUsage);
}

TEST_CASE("help exits 0") {
    const auto r = run({"--help"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("similarity") != std::string::npos);
}

TEST_CASE("config file errors are usage errors") {
    fixtures::TempDir dir("cli-cfg");
    const auto cfg = dir.path() / "bad.conf";
    const auto f = dir.path() / "a.py";
    fixtures::write_text(cfg, "colour = red\n");
    fixtures::write_text(f, kCode);
    CHECK(run({"--config", cfg.string(), "similarity", f.string(), f.string()}).code == kExitUsage);
    CHECK(run({"similarity", f.string(), f.string()}, {{"CODEGENLINK_CONFIG", cfg.string()}}).code == kExitUsage);
}

TEST_CASE("config file and flag precedence") {
    fixtures::TempDir dir("cli-prec");
    const auto cfg = dir.path() / "c.conf";
    const auto f = dir.path() / "a.py";
    fixtures::write_text(cfg, "min_clone_tokens = 100\n");
    fixtures::write_text(f, kCode);
    CHECK(run({"--config", cfg.string(), "similarity", f.string(), f.string()}).out.starts_with("cloning_ratio: 0.000000"));
    CHECK(run({"--config", cfg.string(), "--min-clone-tokens", "5", "similarity", f.string(), f.string()})
              .out.starts_with("cloning_ratio: 1.000000"));
}

TEST_CASE("license and extract on a Stack Overflow page") {
    fixtures::TempDir dir("cli-so");
    fixtures::FixtureWeb web(dir.path());
    const std::string url = "https://stackoverflow.com/questions/42/fib";
    web.page(url, fixtures::stack_overflow_page({kCode, "print(fib(10))\nprint(fib(20))"}, "How to fib?"));
    web.page("https://blog.example/x", fixtures::blog_page(kCode, "Released under the MIT License"));
    web.save();
    const std::string fx = dir.path().string();

    auto r = run({"--fixtures", fx, "license", url});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "CC-BY-SA-4.0 (DomainPolicy)\n");
    CHECK(run({"--fixtures", fx, "license", "https://blog.example/x"}).out == "MIT (HtmlKeywordScan)\n");
    CHECK(run({"--fixtures", fx, "license", "https://blog.example/missing"}).code == kExitFailure);

    r = run({"--fixtures", fx, "extract", url});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("--- snippet 1 ---\n" + kCode) != std::string::npos);
    CHECK(r.out.find("--- snippet 2 ---\nprint(fib(10))") != std::string::npos);
    CHECK(r.out.ends_with("--- 2 snippet(s) ---\n"));

    CHECK(run({"--fixtures", fx, "extract", "https://github.com/a/b"}).code == kExitFailure);
    CHECK(run({"--fixtures", fx, "extract", "not a url"}).code == kExitFailure);
}

TEST_CASE("scan writes JSON and HTML reports") {
    fixtures::TempDir dir("cli-scan");
    const auto demo = corpora::build_demo_web(dir.path() / "web");
    const auto out = dir.path() / "report.json";
    const auto r = run({"--fixtures", demo.fixtures.string(), "--out", out.string(), "--html", "scan", demo.query_file.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(r.err.find("links retained") != std::string::npos);
    const auto report = parse_report_json(fixtures::read_text(out));
    CHECK(report.stats.links_retained >= 3);
    const std::string html = fixtures::read_text(dir.path() / "report.html");
    CHECK(html.find("Possible license found: \"MIT\"") != std::string::npos);

    const auto to_stdout = run({"--fixtures", demo.fixtures.string(), "scan", demo.query_file.string()});
    CHECK(to_stdout.code == kExitOk);
    CHECK(parse_report_json(to_stdout.out) == report);
}

TEST_CASE("scan failures") {
    fixtures::TempDir dir("cli-scan-fail");
    fixtures::FixtureWeb web(dir.path());
    web.save();
    const auto empty = dir.path() / "empty.py";
    const auto code = dir.path() / "a.py";
    fixtures::write_text(empty, " \n");
    fixtures::write_text(code, kCode);
    CHECK(run({"--fixtures", dir.path().string(), "scan", empty.string()}).code == kExitFailure);
    const auto no_fixture = run({"--fixtures", dir.path().string(), "scan", code.string()});
    CHECK(no_fixture.code == kExitFailure);
    CHECK(no_fixture.err.find("ProviderUnavailable") != std::string::npos);
    const auto no_key = run({"--provider", "live", "scan", code.string()});
    CHECK(no_key.code == kExitFailure);
    CHECK(no_key.err.find("ProviderUnavailable") != std::string::npos);
}

TEST_CASE("eval prints a precision table") {
    fixtures::TempDir dir("cli-eval");
    const auto corpus = corpora::build_small_corpus(dir.path());
    auto r = run({"eval", corpus.dir.string(), "--sweep", "0.5,0.99"});
    REQUIRE(r.code == kExitOk);
    CHECK(r.out.starts_with("metric  t=0.50      t=0.99\n"));
    CHECK(r.out.find("clone   0.50 (1)    -") != std::string::npos);
    CHECK(r.out.ends_with("tasks: 4\n"));

    r = run({"eval", corpus.dir.string(), "--sweep", "0.5", "--json", "--joint"});
    CHECK(r.code == kExitOk);
    const auto doc = nlohmann::ordered_json::parse(r.out);
    CHECK(doc["tasks"] == 4);
    CHECK(run({"eval", corpus.dir.string(), "--sweep", "0.9:0.5:0.1"}).code == kExitUsage);
    CHECK(run({"eval", (dir.path() / "nowhere").string()}).code == kExitFailure);
}
