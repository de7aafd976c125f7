#include "codegenlink/errors.hpp"
#include "codegenlink/eval.hpp"
#include "codegenlink/retrieval.hpp"

#include "corpora.hpp"
#include "expect.hpp"
#include "fixture_web.hpp"

#include <doctest.h>

using namespace codegenlink;
using expect::error_code;

namespace {

struct Harness {
    FixtureHttpClient http;
    Fetcher fetcher{http, {}, std::make_shared<VirtualClock>()};
    RuleRegistry rules;
    PipelineServices services() { return {&fetcher, &rules, nullptr, 2}; }
};

const std::string kCode =
    "def merge(left, right):\n"
    "    out = []\n"
    "    i = j = 0\n"
    "    while i < len(left) and j < len(right):\n"
    "        if left[i] <= right[j]:\n"
    "            out.append(left[i])\n"
    "            i += 1\n"
    "        else:\n"
    "            out.append(right[j])\n"
    "            j += 1\n"
    "    return out + left[i:] + right[j:]\n";

}  // namespace

TEST_CASE("label parsing") {
    const auto labels = LabelSet::parse(
        "# task\turl\tlabel\n"
        "t1\thttps://a.example/\trelevant\n"
        "\n"
        "t1\thttps://b.example/\tIrrelevant\n"
        "t2\thttps://a.example/\tirrelevant\n"
        "t1\thttps://a.example/\trelevant\n");
    CHECK(labels.size() == 3);
    CHECK(labels.find("t1", "https://a.example/") == Relevance::HighlyRelevant);
    CHECK(labels.find("t1", "https://b.example/") == Relevance::NotRelevant);
    CHECK(labels.find("t2", "https://a.example/") == Relevance::NotRelevant);
    CHECK_FALSE(labels.find("t3", "https://a.example/").has_value());

    CHECK(error_code([] { (void)LabelSet::parse("t1\thttps://a/\trelevant\nt1\thttps://a/\tirrelevant\n"); }) ==
          ErrorCode::ParseError);
    CHECK(error_code([] { (void)LabelSet::parse("t1 https://a/ relevant\n"); }) == ErrorCode::ParseError);
    CHECK(error_code([] { (void)LabelSet::parse("t1\thttps://a/\tmaybe\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("sweep parsing") {
    CHECK(parse_sweep("0.5:0.8:0.1") == std::vector<double>{0.5, 0.6, 0.7, 0.8});
    CHECK(parse_sweep("0.5:0.9:0.1").back() == 0.9);
    CHECK(parse_sweep("0.25,0.75, 1") == std::vector<double>{0.25, 0.75, 1.0});
    CHECK(parse_sweep("0.3") == std::vector<double>{0.3});
    CHECK(parse_sweep("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    for (const char* bad : {"", "0.5:0.9", "0.9:0.5:0.1", "0.5:0.9:0", "x", "0.5,1.5", "-0.1"}) {
        CAPTURE(bad);
        CHECK(error_code([&] { (void)parse_sweep(bad); }) == ErrorCode::ParseError);
    }
}

TEST_CASE("task loading") {
    fixtures::TempDir dir("tasks");
    fixtures::write_text(dir.path() / "tasks" / "b.java", "class B {}\n");
    fixtures::write_text(dir.path() / "tasks" / "a.py", "x = 1\n");
    fixtures::write_text(dir.path() / "tasks" / "notes.txt", "ignored\n");
    const auto tasks = load_eval_tasks(dir.path());
    REQUIRE(tasks.size() == 2);
    CHECK(tasks[0].task_id == "a");
    CHECK(tasks[0].query.language == Language::Python);
    CHECK(tasks[1].task_id == "b");
    CHECK(tasks[1].query.language == Language::Java);
    CHECK(tasks[1].query.content == "class B {}\n");

    fixtures::TempDir empty("tasks-none");
    CHECK(error_code([&] { (void)load_eval_tasks(empty.path()); }) == ErrorCode::IoError);
}

TEST_CASE("precision table counts labeled retained links") {
    Harness h;
    h.http.add("https://a.example/copy", {200, {}, fixtures::blog_page(kCode, "merge")});
    h.http.add("https://a.example/also", {200, {}, fixtures::blog_page(kCode, "merge again")});
    h.http.add("https://a.example/other", {200, {}, fixtures::blog_page("for k in range(3):\n    print(k * k)\n", "squares")});
    const EvalTask task{"t1", {kCode, Language::Python, std::nullopt},
                        {make_link("https://a.example/copy", 0), make_link("https://a.example/also", 1),
                         make_link("https://a.example/other", 2)}};
    LabelSet labels;
    labels.set("t1", "https://a.example/copy", Relevance::HighlyRelevant);
    labels.set("t1", "https://a.example/also", Relevance::NotRelevant);
    labels.set("t1", "https://a.example/other", Relevance::NotRelevant);

    const auto table = evaluate({task, task}, labels, AnalysisConfig{}, h.services(), {{0.0, 0.8}, true});
    CHECK(table.tasks == 2);
    CHECK(table.cells.size() == 6);

    const auto* clone_high = table.find("clone", 0.8);
    REQUIRE(clone_high != nullptr);
    CHECK(clone_high->retained == 4);
    CHECK(clone_high->relevant == 2);
    CHECK(clone_high->precision == 0.5);
    CHECK(clone_high->avg_links == 2.0);

    const auto* cosine_zero = table.find("cosine", 0.0);
    REQUIRE(cosine_zero != nullptr);
    CHECK(cosine_zero->retained == 6);
    CHECK(*cosine_zero->precision == doctest::Approx(1.0 / 3.0));
    CHECK(table.find("joint", 0.8) != nullptr);
    CHECK(table.find("joint", 0.5) == nullptr);
}

TEST_CASE("absent cells and missing labels") {
    Harness h;
    h.http.add("https://a.example/copy", {200, {}, fixtures::blog_page(kCode, "merge")});
    const EvalTask task{"t1", {kCode, Language::Python, std::nullopt}, {make_link("https://a.example/copy", 0)}};

    CHECK(error_code([&] { (void)evaluate({task}, LabelSet{}, AnalysisConfig{}, h.services(), {{0.5}, false}); }) ==
          ErrorCode::MissingLabel);

    const EvalTask nothing{"t2", {kCode, Language::Python, std::nullopt}, {}};
    const auto table = evaluate({nothing}, LabelSet{}, AnalysisConfig{}, h.services(), {{0.5}, false});
    const auto* cell = table.find("clone", 0.5);
    REQUIRE(cell != nullptr);
    CHECK_FALSE(cell->precision.has_value());
    CHECK(cell->retained == 0);

    const std::string text = render_precision_table_text(table);
    CHECK(text.find("clone   -") != std::string::npos);
    const auto json = nlohmann::ordered_json::parse(render_precision_table_json(table));
    CHECK_FALSE(json.dump().find("precision\":") != std::string::npos);
}

TEST_CASE("text table layout") {
    PrecisionTable table;
    table.tasks = 4;
    table.thresholds = {0.5, 0.6};
    table.cells = {{"clone", 0.5, 8, 4, 0.5, 2.0}, {"clone", 0.6, 4, 3, 0.75, 1.0}, {"cosine", 0.5, 0, 0, std::nullopt, 0.0},
                   {"cosine", 0.6, 0, 0, std::nullopt, 0.0}};
    CHECK(render_precision_table_text(table) ==
          "metric  t=0.50      t=0.60\n"
          "clone   0.50 (2)    0.75 (1)\n"
          "cosine  -           -\n"
          "tasks: 4\n");
}

TEST_CASE("retained counts fall as the threshold rises on the sweep corpus") {
    fixtures::TempDir dir("sweep");
    const auto corpus = corpora::build_sweep_corpus(dir.path());
    auto tasks = load_eval_tasks(corpus.dir);
    REQUIRE(tasks.size() == corpus.tasks);

    FixtureHttpClient http(corpus.dir / "fixtures" / "http");
    ReplayProvider provider(corpus.dir / "fixtures" / "prompts");
    for (auto& task : tasks) task.links = retrieve({task.query, QueryMode::SelectedCode, std::nullopt}, provider, 20);
    Fetcher fetcher(http, {}, std::make_shared<VirtualClock>());
    RuleRegistry rules;
    const auto labels = LabelSet::load(corpus.dir / "labels.tsv");
    const auto table = evaluate(tasks, labels, AnalysisConfig{}, {&fetcher, &rules, nullptr, 4},
                                {parse_sweep("0.5:0.9:0.1"), false});
    for (const char* row : {"clone", "cosine"}) {
        for (std::size_t i = 1; i < table.thresholds.size(); ++i) {
            CAPTURE(row);
            CHECK(table.find(row, table.thresholds[i])->retained <= table.find(row, table.thresholds[i - 1])->retained);
        }
    }
}
