#include "codegenlink/pipeline.hpp"

#include "codegenlink/errors.hpp"
#include "codegenlink/html.hpp"
#include "codegenlink/similarity.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <thread>

namespace codegenlink {

bool passes_filter(const SimilarityResult& result, const AnalysisConfig& config) {
    bool any = false;
    bool all = true;
    bool tested = false;
    const auto test = [&](Metric metric, double score, double threshold) {
        if (!config.metric_enabled(metric)) return;
        tested = true;
        const bool pass = score >= threshold;
        any = any || pass;
        all = all && pass;
    };
    test(Metric::Clone, result.cloning_ratio, config.clone_threshold);
    test(Metric::Cosine, result.cosine, config.cosine_threshold);
    if (!tested) return false;
    return config.combinator == Combinator::Any ? any : all;
}

double filter_score(const SimilarityResult& result, const AnalysisConfig& config) {
    double score = 0.0;
    if (config.metric_enabled(Metric::Clone)) score = std::max(score, result.cloning_ratio);
    if (config.metric_enabled(Metric::Cosine)) score = std::max(score, result.cosine);
    return score;
}

namespace {

struct LinkWork {
    LinkDiagnostic diagnostic;
    std::optional<ProvenanceRecord> record;
    bool has_code = false;
};

LinkWork process_link(const CodeSnippet& query, const CandidateLink& link, const AnalysisConfig& config,
                      const PipelineServices& services) {
    LinkWork work;
    work.diagnostic.url = link.url;

    if (link.domain_kind == DomainKind::GitHub) {
        try {
            (void)github_raw_url(link.url);
        } catch (const Error& e) {
            work.diagnostic.outcome = LinkOutcome::NoCode;
            work.diagnostic.message = e.what();
            return work;
        }
    }

    PageCapture capture;
    try {
        capture = services.fetcher->fetch(link.url);
    } catch (const Error& e) {
        work.diagnostic.outcome = LinkOutcome::FetchFailed;
        work.diagnostic.message = e.what();
        return work;
    }

    const ExtractionResult extracted = extract_snippets(capture, link.domain_kind, query.language, *services.rules);
    if (extracted.snippets.empty()) {
        work.diagnostic.outcome = LinkOutcome::NoCode;
        work.diagnostic.message = extracted.unparseable ? "page could not be parsed" : "no code snippets";
        return work;
    }
    work.has_code = true;

    std::optional<std::size_t> best;
    SimilarityResult best_result;
    bool best_passes = false;
    double best_score = -1.0;
    for (std::size_t i = 0; i < extracted.snippets.size(); ++i) {
        ComparisonDetail detail;
        try {
            detail = compare_detailed(query, extracted.snippets[i], config);
        } catch (const Error&) {
            continue;
        }
        work.diagnostic.snippet_scores.push_back(
            SnippetScore{detail.result.cloning_ratio, detail.result.cosine, detail.reverse_cloning_ratio});
        const bool passes = passes_filter(detail.result, config);
        const double score = filter_score(detail.result, config);
        if (!best || (passes && !best_passes) || (passes == best_passes && score > best_score)) {
            best = i;
            best_result = detail.result;
            best_passes = passes;
            best_score = score;
        }
    }
    if (!best) {
        work.diagnostic.outcome = LinkOutcome::NoCode;
        work.diagnostic.message = "no comparable snippets";
        work.has_code = false;
        return work;
    }
    if (!best_passes) {
        work.diagnostic.outcome = LinkOutcome::Filtered;
        return work;
    }

    work.diagnostic.outcome = LinkOutcome::Retained;
    ProvenanceRecord record;
    record.link = link;
    record.best_snippet = extracted.snippets[*best];
    record.similarity = best_result;
    if (services.licenses != nullptr) record.license = services.licenses->identify(link, &capture);
    work.record = std::move(record);
    return work;
}

}  // namespace

ProvenanceReport analyze(const CodeSnippet& query, const std::vector<CandidateLink>& links,
                         const AnalysisConfig& config, const PipelineServices& services) {
    if (!query.admissible() || tokenize(query.content, query.language).empty()) {
        throw Error(ErrorCode::EmptyQuery, "query code is empty");
    }
    config.validate();
    if (!links.empty() && (services.fetcher == nullptr || services.rules == nullptr)) {
        throw Error(ErrorCode::ConfigError, "pipeline needs a fetcher and a rule registry");
    }

    std::vector<LinkWork> results(links.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < links.size(); i = next++) {
            results[i] = process_link(query, links[i], config, services);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(services.parallelism, 1, std::max<std::size_t>(links.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    ProvenanceReport report;
    report.query = query;
    report.config = config;
    report.stats.links_retrieved = links.size();
    for (LinkWork& work : results) {
        if (work.has_code) ++report.stats.links_with_code;
        if (work.record) report.records.push_back(std::move(*work.record));
        report.diagnostics.push_back(std::move(work.diagnostic));
    }
    report.stats.links_retained = report.records.size();
    std::stable_sort(report.records.begin(), report.records.end(), [&](const auto& a, const auto& b) {
        const double sa = filter_score(a.similarity, config);
        const double sb = filter_score(b.similarity, config);
        if (sa != sb) return sa > sb;
        return a.link.url < b.link.url;
    });
    return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using Json = nlohmann::ordered_json;

Json snippet_json(const CodeSnippet& s) {
    Json j;
    j["language"] = to_string(s.language);
    j["source_url"] = s.source_url ? Json(*s.source_url) : Json(nullptr);
    j["content"] = s.content;
    return j;
}

CodeSnippet snippet_from(const Json& j) {
    CodeSnippet s;
    s.language = parse_language(j.at("language").get<std::string>());
    if (!j.at("source_url").is_null()) s.source_url = j.at("source_url").get<std::string>();
    s.content = j.at("content").get<std::string>();
    return s;
}

Json config_json(const AnalysisConfig& c) {
    Json metrics = Json::array();
    for (Metric m : c.metrics_enabled) metrics.push_back(to_string(m));
    Json j;
    j["clone_threshold"] = c.clone_threshold;
    j["cosine_threshold"] = c.cosine_threshold;
    j["min_clone_tokens"] = c.min_clone_tokens;
    j["metrics_enabled"] = std::move(metrics);
    j["combinator"] = to_string(c.combinator);
    j["max_links"] = c.max_links;
    j["http_timeout_seconds"] = c.http_timeout_seconds;
    j["per_domain_rate_limit_rps"] = c.per_domain_rate_limit_rps;
    return j;
}

AnalysisConfig config_from(const Json& j) {
    AnalysisConfig c;
    c.clone_threshold = j.at("clone_threshold").get<double>();
    c.cosine_threshold = j.at("cosine_threshold").get<double>();
    c.min_clone_tokens = j.at("min_clone_tokens").get<int>();
    c.metrics_enabled.clear();
    for (const auto& m : j.at("metrics_enabled")) c.metrics_enabled.push_back(parse_metric(m.get<std::string>()));
    c.combinator = parse_combinator(j.at("combinator").get<std::string>());
    c.max_links = j.at("max_links").get<int>();
    c.http_timeout_seconds = j.at("http_timeout_seconds").get<int>();
    c.per_domain_rate_limit_rps = j.at("per_domain_rate_limit_rps").get<double>();
    return c;
}

Json similarity_json(const SimilarityResult& r) {
    Json j;
    j["cloning_ratio"] = r.cloning_ratio;
    j["cosine"] = r.cosine;
    return j;
}

}  // namespace

std::string render_report_json(const ProvenanceReport& report) {
    Json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["query"] = snippet_json(report.query);
    doc["config"] = config_json(report.config);
    doc["stats"] = Json{{"links_retrieved", report.stats.links_retrieved},
                        {"links_with_code", report.stats.links_with_code},
                        {"links_retained", report.stats.links_retained}};

    Json records = Json::array();
    for (const ProvenanceRecord& r : report.records) {
        Json rec;
        rec["url"] = r.link.url;
        rec["domain_kind"] = to_string(r.link.domain_kind);
        rec["rank"] = r.link.rank;
        rec["similarity"] = similarity_json(r.similarity);
        if (r.license) {
            rec["license"] = Json{{"spdx_id", r.license->spdx_id},
                                  {"method", to_string(r.license->method)},
                                  {"confidence", confidence_rank(r.license->method)}};
        } else {
            rec["license"] = nullptr;
        }
        rec["best_snippet"] = snippet_json(r.best_snippet);
        records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);

    Json diagnostics = Json::array();
    for (const LinkDiagnostic& d : report.diagnostics) {
        Json scores = Json::array();
        for (const SnippetScore& s : d.snippet_scores) {
            scores.push_back(Json{{"cloning_ratio", s.cloning_ratio},
                                  {"cosine", s.cosine},
                                  {"reverse_cloning_ratio", s.reverse_cloning_ratio}});
        }
        diagnostics.push_back(Json{{"url", d.url},
                                   {"outcome", to_string(d.outcome)},
                                   {"message", d.message},
                                   {"snippet_scores", std::move(scores)}});
    }
    doc["diagnostics"] = std::move(diagnostics);
    return doc.dump(2) + "\n";
}

ProvenanceReport parse_report_json(std::string_view text) {
    try {
        const Json doc = Json::parse(text);
        if (doc.at("schema_version").get<std::string>() != kReportSchemaVersion) {
            throw Error(ErrorCode::ParseError, "unsupported report schema version");
        }
        ProvenanceReport report;
        report.query = snippet_from(doc.at("query"));
        report.config = config_from(doc.at("config"));
        const Json& stats = doc.at("stats");
        report.stats.links_retrieved = stats.at("links_retrieved").get<std::size_t>();
        report.stats.links_with_code = stats.at("links_with_code").get<std::size_t>();
        report.stats.links_retained = stats.at("links_retained").get<std::size_t>();

        for (const Json& rec : doc.at("records")) {
            ProvenanceRecord r;
            r.link.url = rec.at("url").get<std::string>();
            r.link.domain_kind = parse_domain_kind(rec.at("domain_kind").get<std::string>());
            r.link.rank = rec.at("rank").get<std::size_t>();
            r.similarity.cloning_ratio = rec.at("similarity").at("cloning_ratio").get<double>();
            r.similarity.cosine = rec.at("similarity").at("cosine").get<double>();
            if (const Json& lic = rec.at("license"); !lic.is_null()) {
                r.license = LicenseFinding{lic.at("spdx_id").get<std::string>(),
                                           parse_license_method(lic.at("method").get<std::string>())};
            }
            r.best_snippet = snippet_from(rec.at("best_snippet"));
            report.records.push_back(std::move(r));
        }
        for (const Json& diag : doc.at("diagnostics")) {
            LinkDiagnostic d;
            d.url = diag.at("url").get<std::string>();
            d.outcome = parse_link_outcome(diag.at("outcome").get<std::string>());
            d.message = diag.at("message").get<std::string>();
            for (const Json& s : diag.at("snippet_scores")) {
                d.snippet_scores.push_back(SnippetScore{s.at("cloning_ratio").get<double>(), s.at("cosine").get<double>(),
                                                        s.at("reverse_cloning_ratio").get<double>()});
            }
            report.diagnostics.push_back(std::move(d));
        }
        return report;
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// HTML

std::string license_cell_text(const std::optional<LicenseFinding>& license) {
    if (!license) return "No license identified";
    return "Possible license found: \"" + license->spdx_id + "\"";
}

std::string render_report_html(const ProvenanceReport& report) {
    std::string out;
    out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out += "<title>Code provenance report</title>\n";
    out += "<style>\n"
           "body { font-family: sans-serif; margin: 2em; }\n"
           "table { border-collapse: collapse; }\n"
           "th, td { border: 1px solid #ccc; padding: 4px 8px; text-align: left; }\n"
           "</style>\n</head>\n<body>\n";
    out += "<h1>Code provenance report</h1>\n";
    out += "<p>" + std::to_string(report.stats.links_retained) + " of " + std::to_string(report.stats.links_retrieved) +
           " links retained.</p>\n";
    out += "<table>\n<thead><tr><th>URL</th><th>License</th></tr></thead>\n<tbody>\n";
    for (const ProvenanceRecord& r : report.records) {
        out += "<tr><td><a href=\"" + html::escape(r.link.url) + "\">" + html::escape_text(r.link.url) + "</a></td><td>" +
               html::escape_text(license_cell_text(r.license)) +
               "</td></tr>\n";
    }
    out += "</tbody>\n</table>\n</body>\n</html>\n";
    return out;
}

}  // namespace codegenlink
