#pragma once

#include "codegenlink/extraction.hpp"
#include "codegenlink/licensing.hpp"
#include "codegenlink/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace codegenlink {

/// Each enabled metric is tested with >= against its threshold; the results
/// are combined with config.combinator.
bool passes_filter(const SimilarityResult& result, const AnalysisConfig& config);

/// Maximum over the enabled metrics. Orders snippets within a page and
/// records within a report.
double filter_score(const SimilarityResult& result, const AnalysisConfig& config);

struct PipelineServices {
    Fetcher* fetcher = nullptr;
    const RuleRegistry* rules = nullptr;
    LicenseIdentifier* licenses = nullptr;  // null skips license identification
    std::size_t parallelism = 4;
};

/// Fetch, extract, compare and filter every link, then identify licenses for
/// the retained ones. Per-link failures land in diagnostics. Throws EmptyQuery.
ProvenanceReport analyze(const CodeSnippet& query, const std::vector<CandidateLink>& links,
                         const AnalysisConfig& config, const PipelineServices& services);

inline constexpr std::string_view kReportSchemaVersion = "1";

std::string render_report_json(const ProvenanceReport& report);
/// Inverse of render_report_json. Throws ParseError.
ProvenanceReport parse_report_json(std::string_view text);

/// Text of the license column for one record.
std::string license_cell_text(const std::optional<LicenseFinding>& license);

std::string render_report_html(const ProvenanceReport& report);

}  // namespace codegenlink
