#pragma once

#include "codegenlink/model.hpp"
#include "codegenlink/pipeline.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace codegenlink {

enum class Relevance { HighlyRelevant, NotRelevant };

/// Reconciled relevance judgments keyed by (task_id, url).
class LabelSet {
public:
    /// `task_id<TAB>url<TAB>relevant|irrelevant` per line; blank and '#'
    /// lines ignored. Conflicting duplicates throw ParseError.
    static LabelSet parse(std::string_view text);
    static LabelSet load(const std::filesystem::path& path);

    void set(const std::string& task_id, const std::string& url, Relevance relevance);
    [[nodiscard]] std::optional<Relevance> find(const std::string& task_id, const std::string& url) const;
    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }

private:
    std::map<std::pair<std::string, std::string>, Relevance> labels_;
};

struct EvalTask {
    std::string task_id;
    CodeSnippet query;
    std::vector<CandidateLink> links;
};

/// Query files `<dir>/tasks/<task_id>.{py,java}`, ordered by task id.
std::vector<EvalTask> load_eval_tasks(const std::filesystem::path& corpus_dir);

/// "a:b:step" (inclusive range) or a comma-separated list. Throws ParseError.
std::vector<double> parse_sweep(std::string_view spec);

struct PrecisionCell {
    std::string row;  // "clone", "cosine" or "joint"
    double threshold = 0.0;
    std::size_t retained = 0;
    std::size_t relevant = 0;
    std::optional<double> precision;  // absent when nothing was retained
    double avg_links = 0.0;           // retained / tasks, unrounded
};

struct PrecisionTable {
    std::size_t tasks = 0;
    std::vector<double> thresholds;
    std::vector<PrecisionCell> cells;  // row-major: (row, threshold)

    [[nodiscard]] const PrecisionCell* find(std::string_view row, double threshold) const;
};

struct EvalOptions {
    std::vector<double> thresholds{0.5, 0.6, 0.7, 0.8, 0.9};
    bool joint = false;  // extra row with both metrics under base.combinator
};

/// Runs analyze once per (row, threshold, task) with only that row's metric
/// enabled. Throws MissingLabel for a retained link without a label.
PrecisionTable evaluate(const std::vector<EvalTask>& tasks, const LabelSet& labels, const AnalysisConfig& base,
                        const PipelineServices& services, const EvalOptions& options);

/// Rows by metric, one column per threshold; cells read "precision (links)"
/// with links rounded to an integer, "-" when absent.
std::string render_precision_table_text(const PrecisionTable& table);
std::string render_precision_table_json(const PrecisionTable& table);

}  // namespace codegenlink
