#include "codegenlink/cli.hpp"

#include "codegenlink/errors.hpp"
#include "codegenlink/eval.hpp"
#include "codegenlink/extraction.hpp"
#include "codegenlink/http.hpp"
#include "codegenlink/licensing.hpp"
#include "codegenlink/pipeline.hpp"
#include "codegenlink/retrieval.hpp"
#include "codegenlink/similarity.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>

namespace codegenlink {

std::optional<std::string> process_env(std::string_view name) {
    const char* value = std::getenv(std::string(name).c_str());
    if (value == nullptr) return std::nullopt;
    return std::string(value);
}

namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string config_path;
    std::string provider;  // live | replay | "" (auto)
    std::string fixtures;
    std::string model;
    std::string endpoint;
    std::optional<double> clone_th;
    std::optional<double> cosine_th;
    std::optional<int> min_clone_tokens;
    std::string metrics;
    std::string combinator;
    bool html = false;
    std::string out_path;
    std::string language = "auto";
    std::size_t parallel = 4;

    // scan
    std::string code_file;
    std::string response_file;
    // extract / license
    std::string url;
    // similarity
    std::string file_a;
    std::string file_b;
    // eval
    std::string corpus;
    std::string labels;
    std::string sweep = "0.5:0.9:0.1";
    bool joint = false;
    bool eval_json = false;
};

// A bad flag value surfaces as a usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

AnalysisConfig resolve_config(const Flags& flags, const EnvLookup& env) {
    AnalysisConfig config;
    std::string path = flags.config_path;
    if (path.empty()) path = env("CODEGENLINK_CONFIG").value_or("");
    if (!path.empty()) config = load_config(path);
    try {
        if (flags.clone_th) config.clone_threshold = *flags.clone_th;
        if (flags.cosine_th) config.cosine_threshold = *flags.cosine_th;
        if (flags.min_clone_tokens) config.min_clone_tokens = *flags.min_clone_tokens;
        if (!flags.metrics.empty()) {
            config.metrics_enabled.clear();
            if (text::iequals(flags.metrics, "both")) {
                config.metrics_enabled = {Metric::Clone, Metric::Cosine};
            } else {
                for (std::string_view m : text::split(flags.metrics, ',')) {
                    config.metrics_enabled.push_back(parse_metric(text::trim(m)));
                }
            }
        }
        if (!flags.combinator.empty()) config.combinator = parse_combinator(flags.combinator);
        config.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    return config;
}

Language resolve_language(const Flags& flags, const fs::path& file) {
    if (text::iequals(flags.language, "auto")) return file.empty() ? Language::Unknown : language_from_path(file);
    try {
        return parse_language(flags.language);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

/// HTTP, provider, fetcher and license services for one command.
struct Runtime {
    std::shared_ptr<Clock> clock;
    std::unique_ptr<HttpClient> http;
    std::unique_ptr<LinkProvider> provider;
    std::unique_ptr<Fetcher> fetcher;
    std::unique_ptr<RateLimiter> api_limiter;
    std::unique_ptr<GitHubClient> github;
    std::unique_ptr<LicenseIdentifier> licenses;
    RuleRegistry rules;

    PipelineServices services(std::size_t parallel) {
        return PipelineServices{fetcher.get(), &rules, licenses.get(), parallel};
    }
};

std::unique_ptr<Runtime> make_runtime(const Flags& flags, const AnalysisConfig& config, const EnvLookup& env,
                                      const std::string& default_fixtures = {}) {
    auto rt = std::make_unique<Runtime>();
    std::string provider = flags.provider;
    std::string fixtures = flags.fixtures.empty() ? default_fixtures : flags.fixtures;
    if (provider.empty()) provider = fixtures.empty() ? "live" : "replay";

    if (provider == "replay") {
        if (fixtures.empty()) throw UsageError("--provider replay needs --fixtures DIR");
        if (!fs::is_directory(fixtures)) throw Error(ErrorCode::IoError, "fixture directory not found: " + fixtures);
        rt->clock = std::make_shared<VirtualClock>();
        rt->http = std::make_unique<FixtureHttpClient>(fs::path(fixtures) / "http");
        rt->provider = std::make_unique<ReplayProvider>(fs::path(fixtures) / "prompts");
    } else if (provider == "live") {
        rt->clock = std::make_shared<SystemClock>();
        rt->http = std::make_unique<CurlHttpClient>();
        ChatCompletionProvider::Options options;
        if (!flags.model.empty()) options.model = flags.model;
        if (!flags.endpoint.empty()) options.endpoint = flags.endpoint;
        options.api_key = env("LLM_API_KEY").value_or("");
        rt->provider = std::make_unique<ChatCompletionProvider>(*rt->http, options);
    } else {
        throw UsageError("--provider must be live or replay");
    }

    FetchOptions fetch;
    fetch.timeout = std::chrono::seconds(config.http_timeout_seconds);
    fetch.rate_limit_rps = config.per_domain_rate_limit_rps;
    rt->fetcher = std::make_unique<Fetcher>(*rt->http, fetch, rt->clock);

    rt->api_limiter = std::make_unique<RateLimiter>(config.per_domain_rate_limit_rps, rt->clock);
    GitHubClient::Options gh;
    gh.token = env("GITHUB_TOKEN").value_or("");
    gh.timeout = std::chrono::seconds(config.http_timeout_seconds);
    rt->github = std::make_unique<GitHubClient>(*rt->http, *rt->api_limiter, gh);
    rt->licenses = std::make_unique<LicenseIdentifier>(rt->github.get());
    return rt;
}

std::string format_score(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

fs::path html_path_for(const fs::path& json_path) {
    fs::path p = json_path;
    p.replace_extension(".html");
    if (p == json_path) p += ".html";
    return p;
}

int cmd_scan(const Flags& flags, const EnvLookup& env, std::ostream& out, std::ostream& err) {
    if (flags.html && flags.out_path.empty()) throw UsageError("--html needs --out PATH");
    const AnalysisConfig config = resolve_config(flags, env);

    LinkQuery query;
    query.code.content = text::read_file(flags.code_file);
    query.code.language = resolve_language(flags, flags.code_file);
    if (!query.code.admissible()) throw Error(ErrorCode::EmptyQuery, "code file is empty: " + flags.code_file);
    if (!flags.response_file.empty()) {
        query.mode = QueryMode::GeneratedResponse;
        query.prior_response = text::read_file(flags.response_file);
    }

    auto rt = make_runtime(flags, config, env);
    const auto links = retrieve(query, *rt->provider, static_cast<std::size_t>(config.max_links));
    const ProvenanceReport report = analyze(query.code, links, config, rt->services(flags.parallel));
    const std::string json = render_report_json(report);

    if (flags.out_path.empty()) {
        out << json;
    } else {
        text::write_file(flags.out_path, json);
        if (flags.html) text::write_file(html_path_for(flags.out_path).string(), render_report_html(report));
    }
    err << report.stats.links_retained << " of " << report.stats.links_retrieved << " links retained ("
        << report.stats.links_with_code << " with code)\n";
    return kExitOk;
}

int cmd_extract(const Flags& flags, const EnvLookup& env, std::ostream& out) {
    const AnalysisConfig config = resolve_config(flags, env);
    const CandidateLink link = make_link(flags.url, 1);
    const Language language = resolve_language(flags, {});
    if (link.domain_kind == DomainKind::GitHub) (void)github_raw_url(link.url);

    auto rt = make_runtime(flags, config, env);
    const PageCapture capture = rt->fetcher->fetch(link.url);
    const ExtractionResult result = extract_snippets(capture, link.domain_kind, language, rt->rules);
    if (result.unparseable) throw Error(ErrorCode::UnparseableHtml, "page could not be parsed: " + capture.url);
    for (std::size_t i = 0; i < result.snippets.size(); ++i) {
        const std::string& content = result.snippets[i].content;
        out << "--- snippet " << (i + 1) << " ---\n" << content;
        if (!content.empty() && content.back() != '\n') out << '\n';
    }
    out << "--- " << result.snippets.size() << " snippet(s) ---\n";
    return kExitOk;
}

int cmd_similarity(const Flags& flags, const EnvLookup& env, std::ostream& out) {
    const AnalysisConfig config = resolve_config(flags, env);
    CodeSnippet a{text::read_file(flags.file_a), resolve_language(flags, flags.file_a), std::nullopt};
    CodeSnippet b{text::read_file(flags.file_b), resolve_language(flags, flags.file_b), flags.file_b};
    if (text::iequals(flags.language, "auto")) b.language = a.language;
    const ComparisonDetail detail = compare_detailed(a, b, config);
    out << "cloning_ratio: " << format_score(detail.result.cloning_ratio) << '\n';
    out << "cosine: " << format_score(detail.result.cosine) << '\n';
    return kExitOk;
}

int cmd_license(const Flags& flags, const EnvLookup& env, std::ostream& out) {
    const AnalysisConfig config = resolve_config(flags, env);
    const CandidateLink link = make_link(flags.url, 1);
    auto rt = make_runtime(flags, config, env);

    std::optional<PageCapture> capture;
    if (link.domain_kind != DomainKind::GitHub && !domain_policy_license(parse_url(link.url).host)) {
        capture = rt->fetcher->fetch(link.url);
    }
    const auto finding = rt->licenses->identify(link, capture ? &*capture : nullptr);
    if (finding) {
        out << finding->spdx_id << " (" << to_string(finding->method) << ")\n";
    } else {
        out << "none\n";
    }
    return kExitOk;
}

int cmd_eval(const Flags& flags, const EnvLookup& env, std::ostream& out) {
    const AnalysisConfig config = resolve_config(flags, env);
    EvalOptions options;
    options.joint = flags.joint;
    try {
        options.thresholds = parse_sweep(flags.sweep);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }

    const fs::path corpus(flags.corpus);
    const LabelSet labels = LabelSet::load(flags.labels.empty() ? (corpus / "labels.tsv").string() : flags.labels);
    std::vector<EvalTask> tasks = load_eval_tasks(corpus);
    auto rt = make_runtime(flags, config, env, (corpus / "fixtures").string());

    for (EvalTask& task : tasks) {
        LinkQuery query;
        query.code = task.query;
        task.links = retrieve(query, *rt->provider, static_cast<std::size_t>(config.max_links));
    }
    PipelineServices services = rt->services(flags.parallel);
    services.licenses = nullptr;
    const PrecisionTable table = evaluate(tasks, labels, config, services, options);
    out << (flags.eval_json ? render_precision_table_json(table) : render_precision_table_text(table));
    if (!flags.out_path.empty()) text::write_file(flags.out_path, render_precision_table_json(table));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Find where generated code came from and under which license."};
    app.name("codegenlink");
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    app.add_option("--config", flags.config_path, "Configuration file (key = value)");
    app.add_option("--provider", flags.provider, "Link provider: live or replay")
        ->check(CLI::IsMember({"live", "replay"}));
    app.add_option("--fixtures", flags.fixtures, "Replay fixture directory (prompts/ and http/)");
    app.add_option("--model", flags.model, "Model name for the live provider");
    app.add_option("--endpoint", flags.endpoint, "Chat completion endpoint for the live provider");
    app.add_option("--clone-th", flags.clone_th, "Cloning-ratio threshold");
    app.add_option("--cosine-th", flags.cosine_th, "Cosine threshold");
    app.add_option("--min-clone-tokens", flags.min_clone_tokens, "Minimum clone length in tokens");
    app.add_option("--metrics", flags.metrics, "clone, cosine or both");
    app.add_option("--combinator", flags.combinator, "any or all");
    app.add_flag("--html", flags.html, "Also write an HTML report next to --out");
    app.add_option("--out", flags.out_path, "Output file");
    app.add_option("--language", flags.language, "python, java, unknown or auto");
    app.add_option("--parallel", flags.parallel, "Concurrent links")->check(CLI::Range(1, 64));

    auto* scan = app.add_subcommand("scan", "Retrieve, compare and license-check candidate origins of a code file");
    scan->add_option("code_file", flags.code_file, "Code to trace")->required();
    scan->add_option("--response", flags.response_file, "Assistant reply the code came from");

    auto* extract = app.add_subcommand("extract", "Print the code snippets extracted from a page");
    extract->add_option("url", flags.url)->required();

    auto* similarity = app.add_subcommand("similarity", "Compare two code files");
    similarity->add_option("file_a", flags.file_a, "Query file")->required();
    similarity->add_option("file_b", flags.file_b, "Candidate file")->required();

    auto* license = app.add_subcommand("license", "Identify the license governing a link");
    license->add_option("url", flags.url)->required();

    auto* eval = app.add_subcommand("eval", "Precision table over a labeled corpus");
    eval->add_option("corpus", flags.corpus, "Corpus directory (tasks/, fixtures/, labels.tsv)")->required();
    eval->add_option("--labels", flags.labels, "Labels file (default: <corpus>/labels.tsv)");
    eval->add_option("--sweep", flags.sweep, "Thresholds: start:stop:step or a,b,c");
    eval->add_flag("--joint", flags.joint, "Add a row with both metrics combined");
    eval->add_flag("--json", flags.eval_json, "Print JSON instead of the text table");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (scan->parsed()) return cmd_scan(flags, env, out, err);
        if (extract->parsed()) return cmd_extract(flags, env, out);
        if (similarity->parsed()) return cmd_similarity(flags, env, out);
        if (license->parsed()) return cmd_license(flags, env, out);
        if (eval->parsed()) return cmd_eval(flags, env, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace codegenlink
