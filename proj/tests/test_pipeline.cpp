#include "codegenlink/errors.hpp"
#include "codegenlink/pipeline.hpp"
#include "codegenlink/similarity.hpp"

#include "expect.hpp"
#include "fixture_web.hpp"

#include <doctest.h>

using namespace codegenlink;
using expect::error_code;

namespace {

const std::string kQuery =
    "def word_counts(path):\n"
    "    counts = {}\n"
    "    with open(path) as handle:\n"
    "        for line in handle:\n"
    "            for word in line.split():\n"
    "                counts[word] = counts.get(word, 0) + 1\n"
    "    return counts\n";

CodeSnippet query() { return {kQuery, Language::Python, std::nullopt}; }

struct Harness {
    FixtureHttpClient http;
    std::shared_ptr<VirtualClock> clock = std::make_shared<VirtualClock>();
    Fetcher fetcher{http, {}, clock};
    RuleRegistry rules;
    LicenseIdentifier licenses{nullptr};

    PipelineServices services(bool with_licenses = true) {
        return {&fetcher, &rules, with_licenses ? &licenses : nullptr, 4};
    }
    void page(const std::string& url, const std::string& html) { http.add(url, {200, {}, html}); }
};

ProvenanceRecord record(std::string url, double clone, double cosine, std::optional<LicenseFinding> license) {
    ProvenanceRecord r;
    r.link = make_link(url, 0);
    r.best_snippet = {"x = 1\n", Language::Python, url};
    r.similarity = {clone, cosine};
    r.license = std::move(license);
    return r;
}

}  // namespace

TEST_CASE("passes_filter examples") {
    AnalysisConfig c;
    CHECK(passes_filter({1.0, 0.0}, c));
    c.combinator = Combinator::All;
    CHECK_FALSE(passes_filter({1.0, 0.0}, c));
    CHECK(passes_filter({0.8, 0.8}, c));
    c.combinator = Combinator::Any;
    CHECK_FALSE(passes_filter({0.79, 0.79}, c));
    CHECK(passes_filter({0.8, 0.0}, c));

    c.metrics_enabled = {Metric::Cosine};
    CHECK_FALSE(passes_filter({1.0, 0.5}, c));
    CHECK(filter_score({1.0, 0.5}, c) == 0.5);
    c.metrics_enabled = {Metric::Clone, Metric::Cosine};
    CHECK(filter_score({0.3, 0.5}, c) == 0.5);
}

TEST_CASE("no links gives an empty report") {
    Harness h;
    const auto report = analyze(query(), {}, AnalysisConfig{}, h.services());
    CHECK(report.stats == ReportStats{0, 0, 0});
    CHECK(report.records.empty());
    CHECK(report.diagnostics.empty());
}

TEST_CASE("blank query is rejected") {
    Harness h;
    for (const char* q : {"", "  \n", "# just a comment\n"}) {
        CAPTURE(q);
        CHECK(error_code([&] { (void)analyze({q, Language::Python, std::nullopt}, {}, AnalysisConfig{}, h.services()); }) ==
              ErrorCode::EmptyQuery);
    }
}

TEST_CASE("verbatim copy is retained with (1, 1)") {
    Harness h;
    h.page("https://blog.example/p", fixtures::blog_page(kQuery, "Counting words"));
    const auto report = analyze(query(), {make_link("https://blog.example/p", 0)}, AnalysisConfig{}, h.services());
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].similarity.cloning_ratio == 1.0);
    CHECK(report.records[0].similarity.cosine == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.records[0].best_snippet.source_url == "https://blog.example/p");
    CHECK_FALSE(report.records[0].license.has_value());
    CHECK(report.stats == ReportStats{1, 1, 1});
}

TEST_CASE("filter keeps the high scorer only") {
    Harness h;
    h.rules.register_rule({DomainKind::Other, [](std::string_view body) { return std::vector<std::string>{std::string(body)}; }});
    const std::string high = kQuery.substr(0, kQuery.rfind("    return"));  // drops the last line
    const std::string low =
        "def word_counts(path):\n"
        "    total = 0\n"
        "    for item in sorted(path):\n"
        "        total += len(item)\n"
        "    print('done', total)\n";
    AnalysisConfig config;
    const auto s_high = compare(query(), {high, Language::Python, "u"}, config);
    const auto s_low = compare(query(), {low, Language::Python, "u"}, config);
    REQUIRE(filter_score(s_high, config) >= 0.8);
    REQUIRE(filter_score(s_low, config) < 0.8);
    h.page("https://a.example/high", high);
    h.page("https://a.example/low", low);

    const auto report = analyze(query(), {make_link("https://a.example/low", 0), make_link("https://a.example/high", 1)},
                                config, h.services());
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].link.url == "https://a.example/high");
    CHECK(report.records[0].similarity == s_high);
    CHECK(report.stats == ReportStats{2, 2, 1});
    REQUIRE(report.diagnostics.size() == 2);
    CHECK(report.diagnostics[0].outcome == LinkOutcome::Filtered);
    CHECK(report.diagnostics[1].outcome == LinkOutcome::Retained);
}

TEST_CASE("per-link failures are recorded, not thrown") {
    Harness h;
    h.http.add_error("https://down.example/", false);
    h.http.add("https://gone.example/", {404, {}, ""});
    h.page("https://prose.example/", "<p>No code on this page.</p>");
    const std::vector<CandidateLink> links{make_link("https://down.example/", 0), make_link("https://gone.example/", 1),
                                           make_link("https://prose.example/", 2),
                                           make_link("https://github.com/a/b", 3)};
    const auto report = analyze(query(), links, AnalysisConfig{}, h.services());
    CHECK(report.stats == ReportStats{4, 0, 0});
    REQUIRE(report.diagnostics.size() == 4);
    CHECK(report.diagnostics[0].outcome == LinkOutcome::FetchFailed);
    CHECK(report.diagnostics[1].outcome == LinkOutcome::FetchFailed);
    CHECK(report.diagnostics[2].outcome == LinkOutcome::NoCode);
    CHECK(report.diagnostics[3].outcome == LinkOutcome::NoCode);
    CHECK(h.http.request_count("https://github.com/a/b") == 0);
}

TEST_CASE("best snippet per page and record order") {
    Harness h;
    const std::string partial = kQuery.substr(0, kQuery.find("        for line"));
    h.page("https://so.example/a", fixtures::stack_overflow_page({partial, kQuery}, "q"));
    h.page("https://so.example/b", fixtures::stack_overflow_page({kQuery}, "q"));
    h.page("https://so.example/c", fixtures::stack_overflow_page({partial + "    return counts\n"}, "q"));
    AnalysisConfig config;
    config.clone_threshold = 0.3;
    config.cosine_threshold = 0.3;
    const auto report = analyze(query(),
                                {make_link("https://so.example/c", 0), make_link("https://so.example/b", 1),
                                 make_link("https://so.example/a", 2)},
                                config, h.services());
    REQUIRE(report.records.size() == 3);
    CHECK(report.records[0].link.url == "https://so.example/a");  // tie with b at 1.0, URL order
    CHECK(report.records[1].link.url == "https://so.example/b");
    CHECK(report.records[2].link.url == "https://so.example/c");
    CHECK(report.records[0].best_snippet.content == kQuery);
    CHECK(report.diagnostics[2].snippet_scores.size() == 2);
}

TEST_CASE("licenses are looked up for retained links only") {
    Harness h;
    h.page("https://blog.example/mit", fixtures::blog_page(kQuery, "Released under the MIT License"));
    h.page("https://blog.example/gpl", fixtures::blog_page("print('unrelated program here')", "GPL-3.0 only"));
    const auto report = analyze(query(), {make_link("https://blog.example/mit", 0), make_link("https://blog.example/gpl", 1)},
                                AnalysisConfig{}, h.services());
    REQUIRE(report.records.size() == 1);
    CHECK(report.records[0].license == LicenseFinding{"MIT", LicenseMethod::HtmlKeywordScan});

    const auto unlicensed = analyze(query(), {make_link("https://blog.example/mit", 0)}, AnalysisConfig{}, h.services(false));
    CHECK_FALSE(unlicensed.records[0].license.has_value());
}

TEST_CASE("JSON report shape") {
    ProvenanceReport report;
    report.query = query();
    const std::string empty = render_report_json(report);
    const auto doc = nlohmann::ordered_json::parse(empty);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"schema_version", "query", "config", "stats", "records", "diagnostics"});
    CHECK(doc["schema_version"] == "1");
    CHECK(doc["records"].empty());
    CHECK(doc["stats"]["links_retrieved"] == 0);
    CHECK(doc["stats"]["links_retained"] == 0);

    report.records.push_back(record("https://blog.example/x", 0.5, 0.25, std::nullopt));
    const auto with_record = nlohmann::ordered_json::parse(render_report_json(report));
    CHECK(with_record["records"][0].contains("license"));
    CHECK(with_record["records"][0]["license"].is_null());
}

TEST_CASE("JSON round-trip") {
    ProvenanceReport report;
    report.query = query();
    report.config.combinator = Combinator::All;
    report.config.metrics_enabled = {Metric::Cosine};
    report.records.push_back(record("https://github.com/a/b/blob/main/x.py", 1.0, 0.987654321, LicenseFinding{"MIT", LicenseMethod::GitHubApi}));
    report.records.push_back(record("https://blog.example/x", 0.5, 0.25, std::nullopt));
    report.stats = {3, 2, 2};
    report.diagnostics.push_back({"https://down.example/", LinkOutcome::FetchFailed, "NetworkError: boom", {}});
    report.diagnostics.push_back({"https://blog.example/x", LinkOutcome::Retained, "", {{0.5, 0.25, 0.125}}});
    const std::string json = render_report_json(report);
    CHECK(parse_report_json(json) == report);
    CHECK(render_report_json(parse_report_json(json)) == json);

    CHECK(error_code([] { (void)parse_report_json("{"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { (void)parse_report_json(R"({"schema_version":"2"})"); }) == ErrorCode::ParseError);
}

TEST_CASE("HTML report") {
    CHECK(license_cell_text(LicenseFinding{"MIT", LicenseMethod::GitHubApi}) == "Possible license found: \"MIT\"");
    CHECK(license_cell_text(std::nullopt) == "No license identified");

    ProvenanceReport report;
    report.query = {"x = '<b>'", Language::Python, std::nullopt};
    const std::string empty = render_report_html(report);
    CHECK(empty.find("<table") != std::string::npos);
    CHECK(empty.find("<th>") != std::string::npos);
    CHECK(empty.find("<td") == std::string::npos);
    CHECK(empty.find("<b>") == std::string::npos);

    report.records.push_back(record("https://blog.example/a?x=1&y=2", 1, 1, LicenseFinding{"MIT", LicenseMethod::HtmlKeywordScan}));
    report.records.push_back(record("https://blog.example/b", 1, 1, std::nullopt));
    const std::string html = render_report_html(report);
    CHECK(html.find("<td>Possible license found: \"MIT\"</td>") != std::string::npos);
    CHECK(html.find("<td>No license identified</td>") != std::string::npos);
    CHECK(html.find("href=\"https://blog.example/a?x=1&amp;y=2\"") != std::string::npos);
    CHECK(html.starts_with("<!DOCTYPE html>"));
}
